use jets_core::action::act_p_double;
use jets_core::codec::{decode_stream, decode_value, JsonCodec, Value};
use jets_core::contact::{double_contact_of, vertical_quotient};
use jets_core::group::{compose_p, exchange_p, identity_p, inverse_p, PrincipalJetElement};
use jets_core::numeric::{rank, singular_values};
use jets_core::sample::{self, generate, rng_from_seed};
use jets_core::velocity::{exchange, is_holonomic, Dims, DoubleVelocity};
use jets_core::Tensor3;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn small_int() -> impl Strategy<Value = f64> {
    (-5i32..=5).prop_map(f64::from)
}

fn real() -> impl Strategy<Value = f64> {
    -1e3f64..1e3
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(small_int(), rows * cols).prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

fn any_double(m: usize, n: usize) -> impl Strategy<Value = DoubleVelocity> {
    (
        prop::collection::vec(real(), n),
        prop::collection::vec(real(), n * m),
        prop::collection::vec(real(), n * m),
        prop::collection::vec(real(), n * m * m),
    )
        .prop_map(move |(u, ui, uo, w)| {
            DoubleVelocity::new(
                DVector::from_vec(u),
                DMatrix::from_row_slice(n, m, &ui),
                DMatrix::from_row_slice(n, m, &uo),
                Tensor3::from_fn(n, m, m, |a, i, j| w[(a * m + i) * m + j]),
            )
            .unwrap()
        })
}

fn seeded_principal(m: usize) -> impl Strategy<Value = PrincipalJetElement> {
    any::<u64>().prop_map(move |seed| sample::principal(&mut rng_from_seed(seed), m))
}

fn svd_rank(a: &DMatrix<f64>) -> usize {
    let sv = singular_values(a).unwrap();
    let threshold = 1e-9 * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > threshold).count()
}

proptest! {
    #[test]
    fn exact_rank_agrees_with_svd(a in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        prop_assert_eq!(rank(&a, TOL), svd_rank(&a));
    }

    #[test]
    fn exact_rank_sees_dependent_columns(a in int_matrix(5, 2), k in small_int()) {
        let mut b = DMatrix::zeros(5, 3);
        b.columns_mut(0, 2).copy_from(&a);
        let dependent = a.column(0) * k - a.column(1);
        b.column_mut(2).copy_from(&dependent);
        prop_assert_eq!(rank(&b, TOL), rank(&a, TOL));
    }

    #[test]
    fn exchange_is_an_involution(dv in any_double(2, 4)) {
        prop_assert_eq!(exchange(&exchange(&dv)), dv);
    }

    #[test]
    fn exchange_fixes_exactly_the_holonomic(dv in any_double(2, 3)) {
        let sym = DoubleVelocity::new(dv.point().clone(), dv.inner().clone(), dv.inner().clone(), dv.mixed().sym_last()).unwrap();
        prop_assert!(is_holonomic(&sym, TOL));
        prop_assert_eq!(exchange(&sym).rel_diff(&sym) <= TOL, true);
    }

    #[test]
    fn principal_group_axioms(a in seeded_principal(3), b in seeded_principal(3), c in seeded_principal(3)) {
        let left = compose_p(&compose_p(&a, &b).unwrap(), &c).unwrap();
        let right = compose_p(&a, &compose_p(&b, &c).unwrap()).unwrap();
        prop_assert!(left.rel_diff(&right) <= TOL);
        let e = identity_p(3);
        prop_assert!(compose_p(&a, &inverse_p(&a).unwrap()).unwrap().rel_diff(&e) <= TOL);
        prop_assert_eq!(exchange_p(&exchange_p(&a)), a);
    }

    #[test]
    fn canonical_form_is_orbit_invariant(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let dims = Dims::new(m, m + 2).unwrap();
        let dv = sample::double(&mut rng, dims);
        let p = sample::principal(&mut rng, m);
        let d0 = double_contact_of(&dv, TOL).unwrap();
        let d1 = double_contact_of(&act_p_double(&dv, &p).unwrap(), TOL).unwrap();
        prop_assert!(d0.rel_diff(&d1) <= TOL, "error {:e}", d0.rel_diff(&d1));
        let again = double_contact_of(&d0.representative(), TOL).unwrap();
        prop_assert!(again.rel_diff(&d0) <= TOL);
    }

    #[test]
    fn vertical_quotient_is_semiholonomic_invariant(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let dv = sample::vertical_double(&mut rng, Dims::new(m, m + 2).unwrap());
        let p = sample::semiholonomic_principal(&mut rng, m);
        let q0 = vertical_quotient(&dv, TOL).unwrap();
        let q1 = vertical_quotient(&act_p_double(&dv, &p).unwrap(), TOL).unwrap();
        prop_assert!(q0.rel_diff(&q1) <= TOL);
    }

    #[test]
    fn generated_values_roundtrip(seed in any::<u64>(), kind in prop::sample::select(sample::GEN_KINDS.to_vec()), m in 1usize..=3) {
        for v in generate(kind, m, m + 2, seed, 3).unwrap() {
            let text = v.to_json().to_string();
            prop_assert_eq!(decode_value(&text).unwrap(), v);
        }
    }

    #[test]
    fn real_double_velocities_roundtrip(dv in any_double(2, 3), pretty in any::<bool>()) {
        let text = dv.to_json_string(pretty);
        prop_assert_eq!(DoubleVelocity::from_json_str(&text).unwrap(), dv);
    }

    #[test]
    fn decoders_reject_garbage_without_panicking(text in ".{0,200}") {
        let _ = decode_stream(&text);
        let _ = decode_value(&text);
    }

    #[test]
    fn decoders_survive_mutated_documents(seed in any::<u64>(), cut in 0usize..400, byte in any::<u8>()) {
        let v = generate("double", 2, 4, seed, 1).unwrap().remove(0);
        let mut bytes = v.to_json().to_string().into_bytes();
        if cut < bytes.len() {
            bytes[cut] = byte;
        }
        if let Ok(text) = String::from_utf8(bytes) {
            if let Ok(Value::DoubleVelocity(dv)) = decode_value(&text) {
                prop_assert_eq!(dv.dims(), Dims::new(2, 4).unwrap());
            }
        }
    }
}

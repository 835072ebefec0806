//! Deterministic random values with integer coordinates in `[-5, 5]`.
//!
//! Invertible blocks are re-drawn until `|det| ≥ 1`; full-rank blocks until
//! they have rank `m`. Every stream is a ChaCha8 generator so output depends
//! only on the seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::find_pivot_set;
use crate::codec::Value;
use crate::error::{JetError, Result};
use crate::group::{JetGroupElement, PrincipalJetElement, SecondOrderJetElement};
use crate::numeric::{self, Tensor3, DEFAULT_TOL};
use crate::oracle::PolyMap;
use crate::velocity::{Dims, DoubleVelocity, Velocity};

pub type SampleRng = ChaCha8Rng;

pub const COORD_BOUND: i32 = 5;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of the property `label`.
pub fn trial_rng(seed: u64, label: &str, index: u64) -> SampleRng {
    // FNV-1a keeps the label hash stable across platforms and releases
    let label_hash = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&label_hash.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

pub fn int(rng: &mut SampleRng) -> f64 {
    rng.random_range(-COORD_BOUND..=COORD_BOUND) as f64
}

pub fn vector(rng: &mut SampleRng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| int(rng))
}

pub fn matrix(rng: &mut SampleRng, rows: usize, cols: usize) -> DMatrix<f64> {
    // explicit loops fix the draw order
    let mut out = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            out[(r, c)] = int(rng);
        }
    }
    out
}

pub fn tensor(rng: &mut SampleRng, d0: usize, d1: usize, d2: usize) -> Tensor3 {
    Tensor3::from_fn(d0, d1, d2, |_, _, _| int(rng))
}

/// `T + Tᵀ` of an integer array: symmetric with even diagonal.
pub fn sym_tensor(rng: &mut SampleRng, d0: usize, m: usize) -> Tensor3 {
    let t = tensor(rng, d0, m, m);
    t.add(&t.transpose_last())
}

/// `T − Tᵀ` of an integer array.
pub fn skew_tensor(rng: &mut SampleRng, d0: usize, m: usize) -> Tensor3 {
    let t = tensor(rng, d0, m, m);
    t.sub(&t.transpose_last())
}

pub fn invertible(rng: &mut SampleRng, m: usize) -> DMatrix<f64> {
    loop {
        let a = matrix(rng, m, m);
        if a.determinant().abs() >= 0.5 {
            return a;
        }
    }
}

pub fn full_rank(rng: &mut SampleRng, n: usize, m: usize) -> DMatrix<f64> {
    loop {
        let a = matrix(rng, n, m);
        if numeric::rank(&a, DEFAULT_TOL) == m.min(n) {
            return a;
        }
    }
}

pub fn group_element(rng: &mut SampleRng, m: usize) -> JetGroupElement {
    JetGroupElement::new(invertible(rng, m)).expect("sampled block is invertible")
}

pub fn principal(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    let aphi = invertible(rng, m);
    let asigma = invertible(rng, m);
    PrincipalJetElement::new(aphi, asigma, tensor(rng, m, m, m)).expect("sampled blocks are invertible")
}

pub fn semiholonomic_principal(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    let a = invertible(rng, m);
    PrincipalJetElement::new(a.clone(), a, tensor(rng, m, m, m)).expect("sampled block is invertible")
}

pub fn holonomic_principal(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    let a = invertible(rng, m);
    PrincipalJetElement::new(a.clone(), a, sym_tensor(rng, m, m)).expect("sampled block is invertible")
}

pub fn curvature_principal(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    let a = invertible(rng, m);
    PrincipalJetElement::new(a.clone(), a, skew_tensor(rng, m, m)).expect("sampled block is invertible")
}

/// Re-draws until `‖p − id‖∞ ≥ 0.1`.
pub fn away_from_identity(
    rng: &mut SampleRng,
    mut draw: impl FnMut(&mut SampleRng) -> PrincipalJetElement,
) -> PrincipalJetElement {
    loop {
        let p = draw(rng);
        if p.distance_from_identity() >= 0.1 {
            return p;
        }
    }
}

pub fn second_order(rng: &mut SampleRng, m: usize) -> SecondOrderJetElement {
    SecondOrderJetElement::new(invertible(rng, m), sym_tensor(rng, m, m), DEFAULT_TOL)
        .expect("sampled block is invertible")
}

pub fn velocity(rng: &mut SampleRng, dims: Dims) -> Velocity {
    let u = vector(rng, dims.n);
    Velocity::new(u, full_rank(rng, dims.n, dims.m)).expect("shapes agree")
}

/// A double velocity with full-rank inner and outer parts and, when
/// `m < n`, a common admissible pivot set.
pub fn double(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    let Dims { m, n } = dims;
    loop {
        let u = vector(rng, n);
        let inner = full_rank(rng, n, m);
        let outer = full_rank(rng, n, m);
        let mixed = tensor(rng, n, m, m);
        if m < n && find_pivot_set(&[&inner, &outer], DEFAULT_TOL).is_none() {
            continue;
        }
        return DoubleVelocity::new(u, inner, outer, mixed).expect("shapes agree");
    }
}

/// Inner and outer parts drawn independently, including rank-deficient
/// ones, for predicate tests.
pub fn unconstrained_double(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    let Dims { m, n } = dims;
    let u = vector(rng, n);
    let inner = matrix(rng, n, m);
    let outer = if rng.random_bool(0.25) {
        DMatrix::zeros(n, m)
    } else {
        matrix(rng, n, m)
    };
    DoubleVelocity::new(u, inner, outer, tensor(rng, n, m, m)).expect("shapes agree")
}

pub fn semiholonomic_double(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    let Dims { m, n } = dims;
    let u = vector(rng, n);
    let linear = full_rank(rng, n, m);
    DoubleVelocity::new(u, linear.clone(), linear, tensor(rng, n, m, m)).expect("shapes agree")
}

pub fn holonomic_double(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    let Dims { m, n } = dims;
    let u = vector(rng, n);
    let linear = full_rank(rng, n, m);
    DoubleVelocity::new(u, linear.clone(), linear, sym_tensor(rng, n, m)).expect("shapes agree")
}

/// `u_{·j} = 0` with a full-rank inner part and the given mixed part.
pub fn vertical_with(rng: &mut SampleRng, dims: Dims, mixed: impl FnOnce(&mut SampleRng) -> Tensor3) -> DoubleVelocity {
    let Dims { m, n } = dims;
    let u = vector(rng, n);
    let inner = full_rank(rng, n, m);
    let w = mixed(rng);
    DoubleVelocity::new(u, inner, DMatrix::zeros(n, m), w).expect("shapes agree")
}

pub fn vertical_double(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    vertical_with(rng, dims, |r| tensor(r, dims.n, dims.m, dims.m))
}

/// `x ↦ c0 + c1 x + ½ c2[x, x]` with integer coefficients.
pub fn poly_map(rng: &mut SampleRng, m: usize, n: usize) -> PolyMap {
    let c0 = vector(rng, n);
    let c1 = matrix(rng, n, m);
    let c2 = sym_tensor(rng, n, m);
    PolyMap::new(c0, c1, c2, DEFAULT_TOL).expect("shapes agree")
}

/// Kinds accepted by [`generate`].
pub const GEN_KINDS: [&str; 7] = [
    "velocity",
    "double",
    "group",
    "principal",
    "semiholonomic",
    "holonomic",
    "vertical",
];

/// `count` values of the requested kind from a single seeded stream.
pub fn generate(kind: &str, m: usize, n: usize, seed: u64, count: usize) -> Result<Vec<Value>> {
    let dims = Dims::new(m, n)?;
    let needs_codim = matches!(kind, "double" | "semiholonomic" | "holonomic" | "vertical");
    if needs_codim {
        dims.require_codim()?;
    } else if kind == "velocity" && m > n {
        return Err(JetError::Dimension(format!(
            "velocities need m <= n (m = {m}, n = {n})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut draw: Box<dyn FnMut(&mut SampleRng) -> Value> = match kind {
        "velocity" => Box::new(move |r| Value::Velocity(velocity(r, dims))),
        "double" => Box::new(move |r| Value::DoubleVelocity(double(r, dims))),
        "group" => Box::new(move |r| Value::Group(group_element(r, m))),
        "principal" => Box::new(move |r| Value::Principal(principal(r, m))),
        "semiholonomic" => Box::new(move |r| Value::DoubleVelocity(semiholonomic_double(r, dims))),
        "holonomic" => Box::new(move |r| Value::DoubleVelocity(holonomic_double(r, dims))),
        "vertical" => Box::new(move |r| Value::DoubleVelocity(vertical_double(r, dims))),
        other => {
            return Err(JetError::Invalid(format!(
                "unknown kind {other:?} (expected one of {})",
                GEN_KINDS.join(", ")
            )))
        }
    };
    Ok((0..count).map(|_| draw(&mut rng)).collect())
}

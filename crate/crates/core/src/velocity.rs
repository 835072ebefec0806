//! Velocities and double velocities in a single global chart `E = ℝⁿ`.
//!
//! A double velocity carries four blocks: the base point `u^a`, the inner
//! linear part `u^a_i` (derivatives in the inner variable `s`), the outer
//! linear part `u^a_{·j}` (derivatives in the outer variable `t`) and the
//! mixed part `u^a_{ij}`, stored as `mixed[(a, i, j)]` with `i` the inner
//! slot and `j` the outer slot. The exchange map swaps the two linear parts
//! and transposes `(i, j)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, JetError, Result};
use crate::numeric::{self, mat_rel_diff, Tensor3};

/// Source dimension `m` and target dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(JetError::Dimension(format!(
                "dimensions must be positive (m = {m}, n = {n})"
            )));
        }
        Ok(Self { m, n })
    }

    /// Contact elements need `m < n`.
    pub fn require_codim(self) -> Result<Self> {
        if self.m >= self.n {
            return Err(JetError::Dimension(format!(
                "contact elements need m < n (m = {}, n = {})",
                self.m, self.n
            )));
        }
        Ok(self)
    }
}

fn check_finite(what: &str, xs: &[f64]) -> Result<()> {
    if numeric::all_finite(xs) {
        Ok(())
    } else {
        Err(JetError::Invalid(format!("{what} has non-finite entries")))
    }
}

/// A first-order `m`-velocity `(u^a, u^a_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Velocity {
    dims: Dims,
    point: DVector<f64>,
    linear: DMatrix<f64>,
}

impl Velocity {
    pub fn new(point: DVector<f64>, linear: DMatrix<f64>) -> Result<Self> {
        let dims = Dims::new(linear.ncols(), point.len())?;
        if linear.nrows() != dims.n {
            return dim_err(format!("linear part has {} rows, point has {}", linear.nrows(), dims.n));
        }
        check_finite("point", point.as_slice())?;
        check_finite("linear part", linear.as_slice())?;
        Ok(Self { dims, point, linear })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    /// The `n x m` matrix `u^a_i`.
    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn rel_diff(&self, other: &Velocity) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        numeric::vec_rel_diff(&self.point, &other.point).max(mat_rel_diff(&self.linear, &other.linear))
    }
}

/// A double velocity `(u^a, u^a_i, u^a_{·j}, u^a_{ij})` with no algebraic
/// constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleVelocity {
    dims: Dims,
    point: DVector<f64>,
    inner: DMatrix<f64>,
    outer: DMatrix<f64>,
    mixed: Tensor3,
}

impl DoubleVelocity {
    pub fn new(point: DVector<f64>, inner: DMatrix<f64>, outer: DMatrix<f64>, mixed: Tensor3) -> Result<Self> {
        let dims = Dims::new(inner.ncols(), point.len())?;
        let (n, m) = (dims.n, dims.m);
        if inner.shape() != (n, m) || outer.shape() != (n, m) {
            return dim_err(format!(
                "linear parts must be {n}x{m}, got inner {:?} and outer {:?}",
                inner.shape(),
                outer.shape()
            ));
        }
        if mixed.shape() != [n, m, m] {
            return dim_err(format!("mixed part must be {n}x{m}x{m}, got {:?}", mixed.shape()));
        }
        check_finite("point", point.as_slice())?;
        check_finite("inner part", inner.as_slice())?;
        check_finite("outer part", outer.as_slice())?;
        check_finite("mixed part", mixed.as_slice())?;
        Ok(Self {
            dims,
            point,
            inner,
            outer,
            mixed,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    /// `u^a_i`, derivatives in the inner variable.
    pub fn inner(&self) -> &DMatrix<f64> {
        &self.inner
    }

    /// `u^a_{·j}`, derivatives in the outer variable.
    pub fn outer(&self) -> &DMatrix<f64> {
        &self.outer
    }

    /// `u^a_{ij}`.
    pub fn mixed(&self) -> &Tensor3 {
        &self.mixed
    }

    /// Largest combined relative difference over all four blocks.
    pub fn rel_diff(&self, other: &DoubleVelocity) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        numeric::vec_rel_diff(&self.point, &other.point)
            .max(mat_rel_diff(&self.inner, &other.inner))
            .max(mat_rel_diff(&self.outer, &other.outer))
            .max(self.mixed.rel_diff(&other.mixed))
    }
}

/// Which symmetry a vertical vector is declared to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerticalKind {
    General,
    Sym,
    Alt,
}

impl VerticalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerticalKind::General => "general",
            VerticalKind::Sym => "sym",
            VerticalKind::Alt => "alt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "general" => Some(VerticalKind::General),
            "sym" => Some(VerticalKind::Sym),
            "alt" => Some(VerticalKind::Alt),
            _ => None,
        }
    }

    /// Checks the `(i, j)` symmetry type of `t`.
    pub(crate) fn admits(self, t: &Tensor3, tol: f64) -> bool {
        match self {
            VerticalKind::General => true,
            VerticalKind::Sym => t.symmetry_defect() <= tol,
            VerticalKind::Alt => t.skew_defect() <= tol,
        }
    }
}

/// A fibre element of the vertical bundle over a velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalVector {
    base: Velocity,
    fibre: Tensor3,
    kind: VerticalKind,
}

impl VerticalVector {
    pub fn new(base: Velocity, fibre: Tensor3, kind: VerticalKind, tol: f64) -> Result<Self> {
        let Dims { m, n } = base.dims();
        if fibre.shape() != [n, m, m] {
            return dim_err(format!("fibre must be {n}x{m}x{m}, got {:?}", fibre.shape()));
        }
        check_finite("fibre", fibre.as_slice())?;
        if !kind.admits(&fibre, tol) {
            return Err(JetError::Invalid(format!("fibre is not of kind {}", kind.as_str())));
        }
        Ok(Self { base, fibre, kind })
    }

    pub fn zero(base: Velocity) -> Self {
        let Dims { m, n } = base.dims();
        Self {
            base,
            fibre: Tensor3::zeros(n, m, m),
            kind: VerticalKind::General,
        }
    }

    pub fn base(&self) -> &Velocity {
        &self.base
    }

    pub fn fibre(&self) -> &Tensor3 {
        &self.fibre
    }

    pub fn kind(&self) -> VerticalKind {
        self.kind
    }

    /// Vector addition in the fibre; the result is `general` unless both
    /// summands share a kind.
    pub fn add(&self, other: &VerticalVector) -> Result<Self> {
        if self.base != other.base {
            return Err(JetError::Precondition(
                "vertical vectors lie over different velocities".into(),
            ));
        }
        let kind = if self.kind == other.kind {
            self.kind
        } else {
            VerticalKind::General
        };
        Ok(Self {
            base: self.base.clone(),
            fibre: self.fibre.add(&other.fibre),
            kind,
        })
    }

    /// The vertical double velocity `(u, U, 0, K)` representing this vector.
    pub fn to_double_velocity(&self) -> DoubleVelocity {
        let Dims { m, n } = self.base.dims();
        DoubleVelocity {
            dims: self.base.dims,
            point: self.base.point.clone(),
            inner: self.base.linear.clone(),
            outer: DMatrix::zeros(n, m),
            mixed: self.fibre.clone(),
        }
    }
}

/// Projection onto `(u^a, u^a_i)`.
pub fn inner_projection(dv: &DoubleVelocity) -> Velocity {
    Velocity {
        dims: dv.dims,
        point: dv.point.clone(),
        linear: dv.inner.clone(),
    }
}

/// Projection onto `(u^a, u^a_{·i})`.
pub fn outer_projection(dv: &DoubleVelocity) -> Velocity {
    Velocity {
        dims: dv.dims,
        point: dv.point.clone(),
        linear: dv.outer.clone(),
    }
}

/// The exchange involution: swaps inner and outer parts and transposes the
/// mixed part.
pub fn exchange(dv: &DoubleVelocity) -> DoubleVelocity {
    DoubleVelocity {
        dims: dv.dims,
        point: dv.point.clone(),
        inner: dv.outer.clone(),
        outer: dv.inner.clone(),
        mixed: dv.mixed.transpose_last(),
    }
}

pub fn is_regular(v: &Velocity, tol: f64) -> bool {
    numeric::rank(&v.linear, tol) == v.dims.m
}

/// Outer linear part has full rank `m`.
pub fn is_tau_regular(dv: &DoubleVelocity, tol: f64) -> bool {
    numeric::rank(&dv.outer, tol) == dv.dims.m
}

/// Inner linear part has full rank `m`.
pub fn is_inner_regular(dv: &DoubleVelocity, tol: f64) -> bool {
    numeric::rank(&dv.inner, tol) == dv.dims.m
}

/// Immersion test for the curve `t ↦ (u + u_{·j} t^j, u_i + u_{ij} t^j)`:
/// column `j` stacks `u^a_{·j}` over all `u^a_{ij}`, and the resulting
/// `(n + n·m) x m` matrix must have rank `m`.
pub fn is_double_regular(dv: &DoubleVelocity, tol: f64) -> bool {
    let Dims { m, n } = dv.dims;
    let stacked = DMatrix::from_fn(n + n * m, m, |row, j| {
        if row < n {
            dv.outer[(row, j)]
        } else {
            let (a, i) = ((row - n) / m, (row - n) % m);
            dv.mixed[(a, i, j)]
        }
    });
    numeric::rank(&stacked, tol) == m
}

pub fn is_semiholonomic(dv: &DoubleVelocity, tol: f64) -> bool {
    mat_rel_diff(&dv.inner, &dv.outer) <= tol
}

/// Semiholonomic with a symmetric mixed part; equivalently a fixed point of
/// [`exchange`].
pub fn is_holonomic(dv: &DoubleVelocity, tol: f64) -> bool {
    is_semiholonomic(dv, tol) && dv.mixed.symmetry_defect() <= tol
}

/// `‖u_{·j}‖∞ ≤ tol`.
pub fn is_vertical(dv: &DoubleVelocity, tol: f64) -> bool {
    dv.outer.iter().all(|x| x.abs() <= tol)
}

/// The holonomic double velocity with both linear parts `linear` and
/// second-order part `second`.
pub fn make_holonomic(point: DVector<f64>, linear: DMatrix<f64>, second: Tensor3, tol: f64) -> Result<DoubleVelocity> {
    if second.shape()[1] != second.shape()[2] {
        return dim_err("second-order part must be square in its last two indices");
    }
    if second.symmetry_defect() > tol {
        return Err(JetError::Precondition("second-order part is not symmetric".into()));
    }
    DoubleVelocity::new(point, linear.clone(), linear, second)
}

/// Splits a semiholonomic double velocity into its holonomic part and a
/// skew vertical vector over the inner projection.
pub fn split_semiholonomic(dv: &DoubleVelocity, tol: f64) -> Result<(DoubleVelocity, VerticalVector)> {
    if !is_semiholonomic(dv, tol) {
        return Err(JetError::Precondition("double velocity is not semiholonomic".into()));
    }
    let holonomic = DoubleVelocity {
        dims: dv.dims,
        point: dv.point.clone(),
        inner: dv.inner.clone(),
        outer: dv.inner.clone(),
        mixed: dv.mixed.sym_last(),
    };
    let curvature = VerticalVector {
        base: inner_projection(dv),
        fibre: dv.mixed.alt_last(),
        kind: VerticalKind::Alt,
    };
    Ok((holonomic, curvature))
}

/// Adds a vertical vector to the mixed part; `k` must lie over the inner
/// projection of `dv`.
pub fn affine_add_vertical(dv: &DoubleVelocity, k: &VerticalVector, tol: f64) -> Result<DoubleVelocity> {
    if inner_projection(dv).rel_diff(&k.base) > tol {
        return Err(JetError::Precondition(
            "vertical vector does not lie over the inner projection".into(),
        ));
    }
    Ok(DoubleVelocity {
        dims: dv.dims,
        point: dv.point.clone(),
        inner: dv.inner.clone(),
        outer: dv.outer.clone(),
        mixed: dv.mixed.add(&k.fibre),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn col(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(xs.len(), 1, xs)
    }

    fn dv_m1(ui: &[f64], uo: &[f64], w: &[f64]) -> DoubleVelocity {
        let n = ui.len();
        DoubleVelocity::new(
            DVector::zeros(n),
            col(ui),
            col(uo),
            Tensor3::from_fn(n, 1, 1, |a, _, _| w[a]),
        )
        .unwrap()
    }

    fn dv_m2(w12: f64, w21: f64) -> DoubleVelocity {
        let u = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let w = Tensor3::from_fn(3, 2, 2, |a, i, j| match (a, i, j) {
            (0, 0, 1) => w12,
            (0, 1, 0) => w21,
            _ => 0.0,
        });
        DoubleVelocity::new(DVector::zeros(3), u.clone(), u, w).unwrap()
    }

    #[test]
    fn projections_read_off_blocks() {
        let dv = dv_m1(&[1.0, 2.0], &[3.0, 4.0], &[9.0, 9.0]);
        assert_eq!(inner_projection(&dv).linear(), &col(&[1.0, 2.0]));
        assert_eq!(outer_projection(&dv).linear(), &col(&[3.0, 4.0]));
        assert_eq!(inner_projection(&exchange(&dv)), outer_projection(&dv));
        assert_eq!(outer_projection(&exchange(&dv)), inner_projection(&dv));
    }

    #[test]
    fn exchange_m1_swaps_linear_parts_only() {
        let dv = dv_m1(&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]);
        let e = exchange(&dv);
        assert_eq!(e.inner(), &col(&[3.0, 4.0]));
        assert_eq!(e.outer(), &col(&[1.0, 2.0]));
        assert_eq!(e.mixed(), dv.mixed());
        assert_eq!(exchange(&e), dv);
    }

    #[test]
    fn vertical_exchange_has_zero_inner() {
        let dv = dv_m1(&[1.0, 2.0], &[0.0, 0.0], &[5.0, 6.0]);
        assert!(is_vertical(&dv, TOL));
        assert!(!is_tau_regular(&dv, TOL));
        assert_eq!(exchange(&dv).inner(), &DMatrix::zeros(2, 1));
        assert!(!is_vertical(&dv_m1(&[1.0, 2.0], &[3.0, 4.0], &[0.0, 0.0]), TOL));
    }

    #[test]
    fn regularity_predicates() {
        let v = Velocity::new(DVector::zeros(2), col(&[1.0, 2.0])).unwrap();
        assert!(is_regular(&v, TOL));
        let z = Velocity::new(DVector::zeros(2), DMatrix::zeros(2, 1)).unwrap();
        assert!(!is_regular(&z, TOL));
        let eq_cols = Velocity::new(
            DVector::zeros(3),
            DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]),
        )
        .unwrap();
        assert!(!is_regular(&eq_cols, TOL));

        let dv = dv_m1(&[1.0, 0.0], &[4.0, 6.0], &[0.0, 0.0]);
        assert!(is_tau_regular(&dv, TOL));
        assert!(is_inner_regular(&dv, TOL));
        assert!(!is_inner_regular(&dv_m1(&[0.0, 0.0], &[4.0, 6.0], &[0.0, 0.0]), TOL));
        assert_eq!(is_inner_regular(&dv, TOL), is_tau_regular(&exchange(&dv), TOL));
    }

    #[test]
    fn double_regularity_uses_mixed_slices() {
        assert!(is_double_regular(&dv_m1(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]), TOL));
        assert!(!is_double_regular(&dv_m1(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]), TOL));
        assert!(is_double_regular(&dv_m1(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]), TOL));
    }

    #[test]
    fn holonomicity_predicates() {
        assert!(is_semiholonomic(&dv_m2(1.0, 0.0), TOL));
        assert!(!is_holonomic(&dv_m2(1.0, 0.0), TOL));
        assert!(is_holonomic(&dv_m2(3.0, 3.0), TOL));
        assert!(!is_semiholonomic(&dv_m1(&[1.0, 2.0], &[3.0, 4.0], &[0.0, 0.0]), TOL));
    }

    #[test]
    fn make_holonomic_is_exchange_fixed() {
        let mut s = Tensor3::zeros(3, 2, 2);
        s[(0, 0, 1)] = 3.0;
        s[(0, 1, 0)] = 3.0;
        let dv = make_holonomic(
            DVector::zeros(3),
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
            s,
            TOL,
        )
        .unwrap();
        assert!(is_holonomic(&dv, TOL));
        assert_eq!(exchange(&dv), dv);

        let mut bad = Tensor3::zeros(3, 2, 2);
        bad[(1, 0, 1)] = 1.0;
        let err = make_holonomic(DVector::zeros(3), DMatrix::zeros(3, 2), bad, TOL).unwrap_err();
        assert!(matches!(err, JetError::Precondition(_)));
    }

    #[test]
    fn split_halves_the_asymmetric_entry() {
        let dv = dv_m2(1.0, 0.0);
        let (h, k) = split_semiholonomic(&dv, TOL).unwrap();
        assert_eq!(h.mixed()[(0, 0, 1)], 0.5);
        assert_eq!(h.mixed()[(0, 1, 0)], 0.5);
        assert_eq!(k.fibre()[(0, 0, 1)], 0.5);
        assert_eq!(k.fibre()[(0, 1, 0)], -0.5);
        assert_eq!(k.kind(), VerticalKind::Alt);
        assert_eq!(affine_add_vertical(&h, &k, TOL).unwrap(), dv);
    }

    #[test]
    fn split_of_symmetric_or_m1_has_zero_curvature() {
        let (_, k) = split_semiholonomic(&dv_m2(2.0, 2.0), TOL).unwrap();
        assert_eq!(k.fibre().max_abs(), 0.0);
        let (_, k1) = split_semiholonomic(&dv_m1(&[1.0, 2.0], &[1.0, 2.0], &[7.0, -3.0]), TOL).unwrap();
        assert_eq!(k1.fibre().max_abs(), 0.0);
        let err = split_semiholonomic(&dv_m1(&[1.0, 2.0], &[3.0, 4.0], &[0.0, 0.0]), TOL).unwrap_err();
        assert!(matches!(err, JetError::Precondition(_)));
    }

    #[test]
    fn affine_action_is_additive_and_checks_base() {
        let dv = dv_m2(1.0, 0.0);
        let base = inner_projection(&dv);
        let k1 = VerticalVector::new(
            base.clone(),
            Tensor3::from_fn(3, 2, 2, |a, i, j| (a + i + 2 * j) as f64),
            VerticalKind::General,
            TOL,
        )
        .unwrap();
        let k2 = VerticalVector::new(
            base.clone(),
            Tensor3::from_fn(3, 2, 2, |a, i, j| (a * i) as f64 - j as f64),
            VerticalKind::General,
            TOL,
        )
        .unwrap();
        let lhs = affine_add_vertical(&affine_add_vertical(&dv, &k1, TOL).unwrap(), &k2, TOL).unwrap();
        let rhs = affine_add_vertical(&dv, &k1.add(&k2).unwrap(), TOL).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(affine_add_vertical(&dv, &VerticalVector::zero(base), TOL).unwrap(), dv);

        let other = Velocity::new(DVector::from_element(3, 1.0), dv.inner().clone()).unwrap();
        assert!(affine_add_vertical(&dv, &VerticalVector::zero(other), TOL).is_err());
    }

    #[test]
    fn constructors_reject_bad_shapes() {
        assert!(Velocity::new(DVector::zeros(2), DMatrix::zeros(3, 1)).is_err());
        assert!(DoubleVelocity::new(
            DVector::zeros(2),
            DMatrix::zeros(2, 1),
            DMatrix::zeros(2, 2),
            Tensor3::zeros(2, 1, 1)
        )
        .is_err());
        assert!(DoubleVelocity::new(
            DVector::zeros(2),
            DMatrix::zeros(2, 1),
            DMatrix::zeros(2, 1),
            Tensor3::zeros(2, 1, 2)
        )
        .is_err());
        assert!(Velocity::new(DVector::from_element(1, f64::NAN), DMatrix::zeros(1, 1)).is_err());
        let base = Velocity::new(DVector::zeros(2), DMatrix::zeros(2, 2)).unwrap();
        let sym_bad = Tensor3::from_fn(2, 2, 2, |_, i, j| (i * 2 + j) as f64);
        assert!(VerticalVector::new(base, sym_bad, VerticalKind::Sym, TOL).is_err());
    }
}

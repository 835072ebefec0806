//! Contact elements, double contact elements and the vertical quotient
//! bundles.
//!
//! A double contact element is stored in the chart of its pivot set `I`:
//! a representative double velocity is normalized so that its `I`-rows read
//! `(id, id, 0)`, and the remaining rows give the coordinates
//! `(u^α_i, v^α_{·j}, v^α_{ij})`. The pivot set is the lexicographically
//! smallest `m`-subset whose inner and outer blocks are both well
//! conditioned; that set is the same for every point of an orbit.

use nalgebra::{DMatrix, DVector};

use crate::action::{act_p_double, find_pivot_set};
use crate::error::{dim_err, JetError, Result};
use crate::group::PrincipalJetElement;
use crate::numeric::{self, complement, interleave_rows, mat_rel_diff, select_rows, Tensor3};
use crate::velocity::{
    inner_projection, is_inner_regular, is_regular, is_tau_regular, is_vertical, Dims, DoubleVelocity, Velocity,
    VerticalKind,
};

fn check_pivots(pivots: &[usize], dims: Dims) -> Result<()> {
    let ok = pivots.len() == dims.m && pivots.iter().all(|&r| r < dims.n) && pivots.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(JetError::Invalid(format!(
            "pivot set {pivots:?} is not an increasing {}-subset of 0..{}",
            dims.m, dims.n
        )))
    }
}

/// A point together with an `m`-plane, held as the reduced column echelon
/// basis of the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactElement {
    dims: Dims,
    point: DVector<f64>,
    plane: DMatrix<f64>,
    pivots: Vec<usize>,
}

impl ContactElement {
    /// Accepts `plane` only if it already is the canonical echelon basis of
    /// its column space (within `tol`); the given entries are kept as is.
    pub fn new(point: DVector<f64>, plane: DMatrix<f64>, tol: f64) -> Result<Self> {
        let canonical = contact_of(&Velocity::new(point, plane.clone())?, tol)?;
        if mat_rel_diff(&canonical.plane, &plane) > tol {
            return Err(JetError::Invalid(
                "plane basis is not in reduced column echelon form".into(),
            ));
        }
        Ok(Self { plane, ..canonical })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    /// The `n x m` echelon basis `P`.
    pub fn plane(&self) -> &DMatrix<f64> {
        &self.plane
    }

    /// Rows of `P` carrying the identity pattern.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn as_velocity(&self) -> Velocity {
        Velocity::new(self.point.clone(), self.plane.clone()).expect("contact element shapes are consistent")
    }
}

/// Canonical form of the plane spanned by a regular velocity.
pub fn contact_of(v: &Velocity, tol: f64) -> Result<ContactElement> {
    let dims = v.dims().require_codim()?;
    if !is_regular(v, tol) {
        return Err(JetError::Precondition("velocity is not regular".into()));
    }
    let (plane, pivots) = numeric::column_echelon(v.linear(), tol)?;
    Ok(ContactElement {
        dims,
        point: v.point().clone(),
        plane,
        pivots,
    })
}

/// Canonical-form comparison.
pub fn contact_equal(c1: &ContactElement, c2: &ContactElement, tol: f64) -> bool {
    c1.dims == c2.dims
        && numeric::vec_rel_diff(&c1.point, &c2.point) <= tol
        && mat_rel_diff(&c1.plane, &c2.plane) <= tol
}

/// Coordinates `(u^a, u^α_i, v^α_{·j}, v^α_{ij})` of a double contact
/// element in the chart of its pivot set.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleContactElement {
    dims: Dims,
    pivots: Vec<usize>,
    point: DVector<f64>,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    z: Tensor3,
}

impl DoubleContactElement {
    pub fn new(point: DVector<f64>, pivots: Vec<usize>, x: DMatrix<f64>, y: DMatrix<f64>, z: Tensor3) -> Result<Self> {
        let dims = Dims::new(x.ncols(), point.len())?.require_codim()?;
        check_pivots(&pivots, dims)?;
        let (k, m) = (dims.n - dims.m, dims.m);
        if x.shape() != (k, m) || y.shape() != (k, m) {
            return dim_err(format!(
                "X and Y must be {k}x{m}, got {:?} and {:?}",
                x.shape(),
                y.shape()
            ));
        }
        if z.shape() != [k, m, m] {
            return dim_err(format!("Z must be {k}x{m}x{m}, got {:?}", z.shape()));
        }
        for (what, xs) in [
            ("point", point.as_slice()),
            ("X", x.as_slice()),
            ("Y", y.as_slice()),
            ("Z", z.as_slice()),
        ] {
            if !numeric::all_finite(xs) {
                return Err(JetError::Invalid(format!("{what} has non-finite entries")));
            }
        }
        Ok(Self {
            dims,
            pivots,
            point,
            x,
            y,
            z,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn point(&self) -> &DVector<f64> {
        &self.point
    }

    /// Plane coordinates `u^α_i`.
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Outer coordinates `v^α_{·j}`.
    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// Mixed coordinates `v^α_{ij}`.
    pub fn z(&self) -> &Tensor3 {
        &self.z
    }

    /// The normalized double velocity `(u, [I; X], [I; Y], [0; Z])`.
    pub fn representative(&self) -> DoubleVelocity {
        let Dims { m, n } = self.dims;
        let others = complement(&self.pivots, n);
        let id = DMatrix::identity(m, m);
        let inner = interleave_rows(&id, &self.pivots, &self.x, &others);
        let outer = interleave_rows(&id, &self.pivots, &self.y, &others);
        let mixed = Tensor3::interleave_first(&Tensor3::zeros(m, m, m), &self.pivots, &self.z, &others);
        DoubleVelocity::new(self.point.clone(), inner, outer, mixed).expect("shapes are consistent")
    }

    /// The first-order contact element with plane coordinates `X`.
    pub fn base(&self, tol: f64) -> Result<ContactElement> {
        plane_contact(&self.point, &self.pivots, &self.x, tol)
    }

    /// Raw coordinate comparison; only meaningful for equal pivot sets.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        if self.dims != other.dims || self.pivots != other.pivots {
            return f64::INFINITY;
        }
        numeric::vec_rel_diff(&self.point, &other.point)
            .max(mat_rel_diff(&self.x, &other.x))
            .max(mat_rel_diff(&self.y, &other.y))
            .max(self.z.rel_diff(&other.z))
    }
}

fn plane_contact(point: &DVector<f64>, pivots: &[usize], x: &DMatrix<f64>, tol: f64) -> Result<ContactElement> {
    let m = pivots.len();
    let others = complement(pivots, point.len());
    let plane = interleave_rows(&DMatrix::identity(m, m), pivots, x, &others);
    contact_of(&Velocity::new(point.clone(), plane)?, tol)
}

/// Equality of double contact elements; elements stored in different
/// charts are re-canonicalized first.
pub fn double_contact_equal(d1: &DoubleContactElement, d2: &DoubleContactElement, tol: f64) -> bool {
    if d1.dims != d2.dims {
        return false;
    }
    if d1.pivots == d2.pivots {
        return d1.rel_diff(d2) <= tol;
    }
    match (
        double_contact_of(&d1.representative(), tol),
        double_contact_of(&d2.representative(), tol),
    ) {
        (Ok(c1), Ok(c2)) => c1.rel_diff(&c2) <= tol,
        _ => false,
    }
}

/// The normalizing element for pivot set `pivots`: `A_σ = (u_I)⁻¹`,
/// `A_φ = (u_{·I})⁻¹`, and `B` chosen to clear the pivot rows of the mixed
/// part.
fn normalizer(dv: &DoubleVelocity, pivots: &[usize], semiholonomic: bool) -> Result<PrincipalJetElement> {
    let asigma = numeric::invert(&select_rows(dv.inner(), pivots), "inner pivot block")?;
    let aphi = if semiholonomic {
        asigma.clone()
    } else {
        numeric::invert(&select_rows(dv.outer(), pivots), "outer pivot block")?
    };
    let carried = dv.mixed().contract_last_two(&asigma, &aphi).select_first(pivots);
    let b = Tensor3::left_mul(&asigma, &carried).scale(-1.0);
    PrincipalJetElement::new(aphi, asigma, b)
}

/// Canonical representative of the `P¹ₘ`-orbit of a double velocity whose
/// inner and outer linear parts both have full rank.
pub fn double_contact_of(dv: &DoubleVelocity, tol: f64) -> Result<DoubleContactElement> {
    let dims = dv.dims().require_codim()?;
    if !is_tau_regular(dv, tol) {
        return Err(JetError::Precondition("outer linear part is rank deficient".into()));
    }
    if !is_inner_regular(dv, tol) {
        return Err(JetError::Precondition("inner linear part is rank deficient".into()));
    }
    let pivots = find_pivot_set(&[dv.inner(), dv.outer()], tol)
        .ok_or_else(|| JetError::Chart("no pivot rows make both the inner and the outer block invertible".into()))?;
    let others = complement(&pivots, dims.n);
    let ui = select_rows(dv.inner(), &pivots);
    let uo = select_rows(dv.outer(), &pivots);
    let x = numeric::right_divide(&select_rows(dv.inner(), &others), &ui, "inner pivot block")?;
    let y = numeric::right_divide(&select_rows(dv.outer(), &others), &uo, "outer pivot block")?;
    let z = reduced_mixed(dv.mixed(), &pivots, &others, &x, &ui, &uo)?;
    DoubleContactElement::new(dv.point().clone(), pivots, x, y, z)
}

/// Non-pivot rows of the mixed part after normalizing the pivot rows:
///
/// ```text
/// Z_α = (W_α − X · W_I)[(U_I)⁻¹, (V_I)⁻¹]
/// ```
///
/// with `X` the inner chart. Cancelling against `X · W_I` before the two
/// inverse factors are applied, and applying those by LU solves, keeps the
/// result accurate when the pivot blocks are poorly conditioned.
fn reduced_mixed(
    w: &Tensor3,
    pivots: &[usize],
    others: &[usize],
    x: &DMatrix<f64>,
    inner_block: &DMatrix<f64>,
    outer_block: &DMatrix<f64>,
) -> Result<Tensor3> {
    let m = pivots.len();
    let d = w
        .select_first(others)
        .sub(&Tensor3::left_mul(x, &w.select_first(pivots)));
    let mut z = Tensor3::zeros(others.len(), m, m);
    for a in 0..others.len() {
        let da = DMatrix::from_fn(m, m, |h, k| d[(a, h, k)]);
        let right = numeric::right_divide(&da, outer_block, "outer pivot block")?;
        let za = numeric::right_divide(&right.transpose(), inner_block, "inner pivot block")?.transpose();
        for i in 0..m {
            for j in 0..m {
                z[(a, i, j)] = za[(i, j)];
            }
        }
    }
    Ok(z)
}

/// A fibre element of a vertical quotient bundle, in the chart of `pivots`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientVerticalVector {
    base: ContactElement,
    pivots: Vec<usize>,
    values: Tensor3,
    kind: VerticalKind,
}

impl QuotientVerticalVector {
    pub fn new(
        base: ContactElement,
        pivots: Vec<usize>,
        values: Tensor3,
        kind: VerticalKind,
        tol: f64,
    ) -> Result<Self> {
        let dims = base.dims;
        check_pivots(&pivots, dims)?;
        let (k, m) = (dims.n - dims.m, dims.m);
        if values.shape() != [k, m, m] {
            return dim_err(format!("V must be {k}x{m}x{m}, got {:?}", values.shape()));
        }
        if !numeric::all_finite(values.as_slice()) {
            return Err(JetError::Invalid("V has non-finite entries".into()));
        }
        if !kind.admits(&values, tol) {
            return Err(JetError::Invalid(format!("V is not of kind {}", kind.as_str())));
        }
        Ok(Self {
            base,
            pivots,
            values,
            kind,
        })
    }

    pub fn zero(base: ContactElement, pivots: Vec<usize>) -> Result<Self> {
        let Dims { m, n } = base.dims;
        Self::new(base, pivots, Tensor3::zeros(n - m, m, m), VerticalKind::General, 0.0)
    }

    pub fn base(&self) -> &ContactElement {
        &self.base
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Fibre coordinates `v^α_{ij}`.
    pub fn values(&self) -> &Tensor3 {
        &self.values
    }

    pub fn kind(&self) -> VerticalKind {
        self.kind
    }

    pub fn add(&self, other: &Self, tol: f64) -> Result<Self> {
        if !contact_equal(&self.base, &other.base, tol) || self.pivots != other.pivots {
            return Err(JetError::Precondition(
                "quotient vectors lie in different fibres or charts".into(),
            ));
        }
        let kind = if self.kind == other.kind {
            self.kind
        } else {
            VerticalKind::General
        };
        Ok(Self {
            base: self.base.clone(),
            pivots: self.pivots.clone(),
            values: self.values.add(&other.values),
            kind,
        })
    }

    pub fn rel_diff(&self, other: &Self) -> f64 {
        if self.pivots != other.pivots || self.base.dims != other.base.dims {
            return f64::INFINITY;
        }
        numeric::vec_rel_diff(&self.base.point, &other.base.point)
            .max(mat_rel_diff(&self.base.plane, &other.base.plane))
            .max(self.values.rel_diff(&other.values))
    }
}

fn vertical_chart(dv: &DoubleVelocity, tol: f64) -> Result<(ContactElement, Vec<usize>)> {
    dv.dims().require_codim()?;
    if !is_vertical(dv, tol) {
        return Err(JetError::Precondition("double velocity is not vertical".into()));
    }
    if !is_inner_regular(dv, tol) {
        return Err(JetError::Precondition("inner linear part is rank deficient".into()));
    }
    let pivots = find_pivot_set(&[dv.inner()], tol)
        .ok_or_else(|| JetError::Chart("no pivot rows make the inner block invertible".into()))?;
    let base = contact_of(&inner_projection(dv), tol)?;
    Ok((base, pivots))
}

fn kind_of(t: &Tensor3, tol: f64) -> VerticalKind {
    if t.max_abs() > 0.0 && t.symmetry_defect() <= tol {
        VerticalKind::Sym
    } else if t.max_abs() > 0.0 && t.skew_defect() <= tol {
        VerticalKind::Alt
    } else {
        VerticalKind::General
    }
}

/// Fibre coordinates of the class of a vertical double velocity:
///
/// ```text
/// v^α_ij = u^α_hk r^h_i r^k_j − u^α_h r^h_k u^k_pq r^p_i r^q_j,   r = (u_I)⁻¹
/// ```
///
/// The kind is `sym` or `alt` when the mixed part has that symmetry.
pub fn vertical_quotient(dv: &DoubleVelocity, tol: f64) -> Result<QuotientVerticalVector> {
    let (base, pivots) = vertical_chart(dv, tol)?;
    let n = dv.dims().n;
    let others = complement(&pivots, n);
    let ui = select_rows(dv.inner(), &pivots);
    let x = numeric::right_divide(&select_rows(dv.inner(), &others), &ui, "inner pivot block")?;
    let values = reduced_mixed(dv.mixed(), &pivots, &others, &x, &ui, &ui)?;
    let kind = kind_of(dv.mixed(), tol);
    Ok(QuotientVerticalVector {
        base,
        pivots,
        values,
        kind,
    })
}

/// Same coordinates as [`vertical_quotient`], obtained by acting with the
/// semiholonomic element that normalizes the pivot rows to `(id, 0)`.
pub fn vertical_quotient_by_transporter(dv: &DoubleVelocity, tol: f64) -> Result<QuotientVerticalVector> {
    let (base, pivots) = vertical_chart(dv, tol)?;
    let p = normalizer(dv, &pivots, true)?;
    let normalized = act_p_double(dv, &p)?;
    let others = complement(&pivots, dv.dims().n);
    let values = normalized.mixed().select_first(&others);
    let kind = kind_of(dv.mixed(), tol);
    Ok(QuotientVerticalVector {
        base,
        pivots,
        values,
        kind,
    })
}

/// Splits the fibre coordinates into symmetric and skew parts.
pub fn split_quotient(q: &QuotientVerticalVector) -> (QuotientVerticalVector, QuotientVerticalVector) {
    let sym = QuotientVerticalVector {
        base: q.base.clone(),
        pivots: q.pivots.clone(),
        values: q.values.sym_last(),
        kind: VerticalKind::Sym,
    };
    let alt = QuotientVerticalVector {
        base: q.base.clone(),
        pivots: q.pivots.clone(),
        values: q.values.alt_last(),
        kind: VerticalKind::Alt,
    };
    (sym, alt)
}

/// `‖Y − X‖ ≤ tol`.
pub fn is_semiholonomic_contact(d: &DoubleContactElement, tol: f64) -> bool {
    mat_rel_diff(&d.y, &d.x) <= tol
}

pub fn is_holonomic_contact(d: &DoubleContactElement, tol: f64) -> bool {
    is_semiholonomic_contact(d, tol) && d.z.symmetry_defect() <= tol
}

/// Holonomic part `(u, X, X, sym Z)` and curvature part `alt Z` of a
/// semiholonomic double contact element.
pub fn decompose_contact(d: &DoubleContactElement, tol: f64) -> Result<(DoubleContactElement, QuotientVerticalVector)> {
    if !is_semiholonomic_contact(d, tol) {
        return Err(JetError::Precondition(
            "double contact element is not semiholonomic".into(),
        ));
    }
    let holonomic = DoubleContactElement {
        dims: d.dims,
        pivots: d.pivots.clone(),
        point: d.point.clone(),
        x: d.x.clone(),
        y: d.x.clone(),
        z: d.z.sym_last(),
    };
    let curvature = QuotientVerticalVector {
        base: d.base(tol)?,
        pivots: d.pivots.clone(),
        values: d.z.alt_last(),
        kind: VerticalKind::Alt,
    };
    Ok((holonomic, curvature))
}

/// Affine action of the quotient fibre on semiholonomic double contact
/// elements: `(u, X, Y, Z) ↦ (u, X, Y, Z + V)`.
pub fn affine_add_contact(
    d: &DoubleContactElement,
    q: &QuotientVerticalVector,
    tol: f64,
) -> Result<DoubleContactElement> {
    if !is_semiholonomic_contact(d, tol) {
        return Err(JetError::Precondition(
            "double contact element is not semiholonomic".into(),
        ));
    }
    if d.pivots != q.pivots {
        return Err(JetError::Precondition(format!(
            "pivot sets differ ({:?} vs {:?})",
            d.pivots, q.pivots
        )));
    }
    if !contact_equal(&d.base(tol)?, &q.base, tol) {
        return Err(JetError::Precondition(
            "quotient vector lies over a different contact element".into(),
        ));
    }
    Ok(DoubleContactElement {
        dims: d.dims,
        pivots: d.pivots.clone(),
        point: d.point.clone(),
        x: d.x.clone(),
        y: d.y.clone(),
        z: d.z.add(&q.values),
    })
}

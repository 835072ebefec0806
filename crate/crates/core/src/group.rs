//! The jet group `L¹ₘ ≅ GL(m)` and the principal jet group
//! `P¹ₘ = L¹ₘ ⋉ TₘL¹ₘ`.
//!
//! An element of `P¹ₘ` is stored as `(A_φ, A_σ, B)`. The product is
//!
//! ```text
//! A_φ  = A_φ₁ · A_φ₂
//! A_σ  = A_σ₁ · A_σ₂
//! B[i][j][k] = Σ_{h,l} B₁[i][h][l] A_σ₂[h][j] A_φ₂[l][k] + Σ_h A_σ₁[i][h] B₂[h][j][k]
//! ```
//!
//! so the second index of `B` pairs with the `σ` (inner) slot and the third
//! with the `φ` (outer) slot. Equivalently the element is the bi-degree
//! `(1,1)` map `χ(s,t) = A_σ s + A_φ t + B[s,t]`.

use nalgebra::DMatrix;

use crate::error::{dim_err, JetError, Result};
use crate::numeric::{self, mat_rel_diff, Tensor3, DET_FLOOR};

fn check_invertible(what: &str, a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return dim_err(format!("{what} must be square, got {}x{}", a.nrows(), a.ncols()));
    }
    if a.nrows() == 0 {
        return dim_err(format!("{what} is empty"));
    }
    if !numeric::all_finite(a.as_slice()) {
        return Err(JetError::Invalid(format!("{what} has non-finite entries")));
    }
    let det = a.determinant();
    if det.abs() <= DET_FLOOR {
        return Err(JetError::Singular(format!("{what} (det = {det:e})")));
    }
    Ok(())
}

fn check_cube(what: &str, t: &Tensor3, m: usize) -> Result<()> {
    if t.shape() != [m, m, m] {
        return dim_err(format!("{what} must be {m}x{m}x{m}, got {:?}", t.shape()));
    }
    if !numeric::all_finite(t.as_slice()) {
        return Err(JetError::Invalid(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// An element of `L¹ₘ`, i.e. an invertible `m x m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct JetGroupElement {
    matrix: DMatrix<f64>,
}

impl JetGroupElement {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_invertible("jet group element", &matrix)?;
        Ok(Self { matrix })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            matrix: DMatrix::identity(m, m),
        }
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rel_diff(&self, other: &Self) -> f64 {
        mat_rel_diff(&self.matrix, &other.matrix)
    }
}

pub fn compose_l(g1: &JetGroupElement, g2: &JetGroupElement) -> Result<JetGroupElement> {
    if g1.m() != g2.m() {
        return dim_err(format!("cannot compose elements of L¹_{} and L¹_{}", g1.m(), g2.m()));
    }
    Ok(JetGroupElement {
        matrix: &g1.matrix * &g2.matrix,
    })
}

pub fn inverse_l(g: &JetGroupElement) -> Result<JetGroupElement> {
    let matrix = numeric::invert(&g.matrix, "jet group element")?;
    Ok(JetGroupElement { matrix })
}

/// An element `(A_φ, A_σ, B)` of the principal jet group.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalJetElement {
    aphi: DMatrix<f64>,
    asigma: DMatrix<f64>,
    b: Tensor3,
}

impl PrincipalJetElement {
    pub fn new(aphi: DMatrix<f64>, asigma: DMatrix<f64>, b: Tensor3) -> Result<Self> {
        check_invertible("A_phi", &aphi)?;
        check_invertible("A_sigma", &asigma)?;
        let m = aphi.nrows();
        if asigma.nrows() != m {
            return dim_err(format!(
                "A_phi is {m}x{m} but A_sigma is {}x{}",
                asigma.nrows(),
                asigma.ncols()
            ));
        }
        check_cube("B", &b, m)?;
        Ok(Self { aphi, asigma, b })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            aphi: DMatrix::identity(m, m),
            asigma: DMatrix::identity(m, m),
            b: Tensor3::zeros(m, m, m),
        }
    }

    pub fn m(&self) -> usize {
        self.aphi.nrows()
    }

    /// Linear part `A_φ` (the `λ` projection).
    pub fn aphi(&self) -> &DMatrix<f64> {
        &self.aphi
    }

    /// Linear part `A_σ` (the `μ` projection).
    pub fn asigma(&self) -> &DMatrix<f64> {
        &self.asigma
    }

    pub fn b(&self) -> &Tensor3 {
        &self.b
    }

    pub fn rel_diff(&self, other: &Self) -> f64 {
        if self.m() != other.m() {
            return f64::INFINITY;
        }
        mat_rel_diff(&self.aphi, &other.aphi)
            .max(mat_rel_diff(&self.asigma, &other.asigma))
            .max(self.b.rel_diff(&other.b))
    }

    /// `‖p − id‖∞` over all coordinates.
    pub fn distance_from_identity(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.m(), self.m());
        let lin = (&self.aphi - &id).amax().max((&self.asigma - &id).amax());
        lin.max(self.b.max_abs())
    }
}

fn same_m(p1: &PrincipalJetElement, p2: &PrincipalJetElement) -> Result<()> {
    if p1.m() != p2.m() {
        return dim_err(format!("cannot combine elements of P¹_{} and P¹_{}", p1.m(), p2.m()));
    }
    Ok(())
}

pub fn identity_p(m: usize) -> PrincipalJetElement {
    PrincipalJetElement::identity(m)
}

pub fn compose_p(p1: &PrincipalJetElement, p2: &PrincipalJetElement) -> Result<PrincipalJetElement> {
    same_m(p1, p2)?;
    let b =
        p1.b.contract_last_two(&p2.asigma, &p2.aphi)
            .add(&Tensor3::left_mul(&p1.asigma, &p2.b));
    Ok(PrincipalJetElement {
        aphi: &p1.aphi * &p2.aphi,
        asigma: &p1.asigma * &p2.asigma,
        b,
    })
}

/// `(A_φ⁻¹, A_σ⁻¹, −A_σ⁻¹ · B[A_σ⁻¹, A_φ⁻¹])`.
pub fn inverse_p(p: &PrincipalJetElement) -> Result<PrincipalJetElement> {
    let aphi = numeric::invert(&p.aphi, "A_phi")?;
    let asigma = numeric::invert(&p.asigma, "A_sigma")?;
    let b = Tensor3::left_mul(&asigma, &p.b.contract_last_two(&asigma, &aphi)).scale(-1.0);
    Ok(PrincipalJetElement { aphi, asigma, b })
}

/// Induced by `χ(s,t) ↦ χ(t,s)`.
pub fn exchange_p(p: &PrincipalJetElement) -> PrincipalJetElement {
    PrincipalJetElement {
        aphi: p.asigma.clone(),
        asigma: p.aphi.clone(),
        b: p.b.transpose_last(),
    }
}

pub fn lambda_p(p: &PrincipalJetElement) -> JetGroupElement {
    JetGroupElement { matrix: p.aphi.clone() }
}

pub fn mu_p(p: &PrincipalJetElement) -> JetGroupElement {
    JetGroupElement {
        matrix: p.asigma.clone(),
    }
}

/// Coefficients of `χ(s,t) = C_s s + C_t t + C_st[s,t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiCoefficients {
    pub cs: DMatrix<f64>,
    pub ct: DMatrix<f64>,
    pub cst: Tensor3,
}

pub fn to_chi(p: &PrincipalJetElement) -> ChiCoefficients {
    ChiCoefficients {
        cs: p.asigma.clone(),
        ct: p.aphi.clone(),
        cst: p.b.clone(),
    }
}

/// Fails when `χ_s` or `χ^t` is not an immersion at the origin.
pub fn from_chi(c: &ChiCoefficients) -> Result<PrincipalJetElement> {
    PrincipalJetElement::new(c.ct.clone(), c.cs.clone(), c.cst.clone())
}

pub fn is_semiholonomic_p(p: &PrincipalJetElement, tol: f64) -> bool {
    mat_rel_diff(&p.aphi, &p.asigma) <= tol
}

pub fn is_holonomic_p(p: &PrincipalJetElement, tol: f64) -> bool {
    is_semiholonomic_p(p, tol) && p.b.symmetry_defect() <= tol
}

pub fn is_curvature_p(p: &PrincipalJetElement, tol: f64) -> bool {
    is_semiholonomic_p(p, tol) && p.b.skew_defect() <= tol
}

fn require_semiholonomic(p: &PrincipalJetElement, tol: f64) -> Result<()> {
    if is_semiholonomic_p(p, tol) {
        Ok(())
    } else {
        Err(JetError::Precondition(
            "element is not semiholonomic (A_phi != A_sigma)".into(),
        ))
    }
}

/// The projection `∨` onto the holonomic subgroup: symmetrizes `B`.
pub fn symmetrize_p(p: &PrincipalJetElement, tol: f64) -> Result<PrincipalJetElement> {
    require_semiholonomic(p, tol)?;
    Ok(PrincipalJetElement {
        aphi: p.aphi.clone(),
        asigma: p.asigma.clone(),
        b: p.b.sym_last(),
    })
}

/// `p = h · c` with `h = ∨(p)` holonomic and `c = (I, I, A⁻¹ B_alt)` in the
/// curvature subgroup.
pub fn factor_semiholonomic(p: &PrincipalJetElement, tol: f64) -> Result<(PrincipalJetElement, PrincipalJetElement)> {
    let h = symmetrize_p(p, tol)?;
    let a_inv = numeric::invert(&p.asigma, "A_sigma")?;
    let m = p.m();
    let c = PrincipalJetElement {
        aphi: DMatrix::identity(m, m),
        asigma: DMatrix::identity(m, m),
        b: Tensor3::left_mul(&a_inv, &p.b.alt_last()),
    };
    Ok((h, c))
}

/// `A ↦ (A, A, 0)`.
pub fn embed_l(g: &JetGroupElement) -> PrincipalJetElement {
    let m = g.m();
    PrincipalJetElement {
        aphi: g.matrix.clone(),
        asigma: g.matrix.clone(),
        b: Tensor3::zeros(m, m, m),
    }
}

/// The unique `p = t · l` with `l = embed_l(λ(p))` and `t` having
/// `A_φ = I`: `t = (I, A_σ A_φ⁻¹, B[A_φ⁻¹, A_φ⁻¹])`.
pub fn factor_p(p: &PrincipalJetElement) -> Result<(PrincipalJetElement, PrincipalJetElement)> {
    let m = p.m();
    let aphi_inv = numeric::invert(&p.aphi, "A_phi")?;
    let t = PrincipalJetElement {
        aphi: DMatrix::identity(m, m),
        asigma: &p.asigma * &aphi_inv,
        b: p.b.contract_last_two(&aphi_inv, &aphi_inv),
    };
    Ok((t, embed_l(&lambda_p(p))))
}

/// A second-order jet `φ̂(t) = A t + ½ S[t,t]` with `S` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderJetElement {
    linear: DMatrix<f64>,
    second: Tensor3,
}

impl SecondOrderJetElement {
    pub fn new(linear: DMatrix<f64>, second: Tensor3, tol: f64) -> Result<Self> {
        check_invertible("A", &linear)?;
        check_cube("S", &second, linear.nrows())?;
        if second.symmetry_defect() > tol {
            return Err(JetError::Invalid("S is not symmetric in its last two indices".into()));
        }
        Ok(Self { linear, second })
    }

    pub fn m(&self) -> usize {
        self.linear.nrows()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn second(&self) -> &Tensor3 {
        &self.second
    }

    pub fn rel_diff(&self, other: &Self) -> f64 {
        mat_rel_diff(&self.linear, &other.linear).max(self.second.rel_diff(&other.second))
    }
}

pub fn to_second_order(p: &PrincipalJetElement, tol: f64) -> Result<SecondOrderJetElement> {
    if !is_holonomic_p(p, tol) {
        return Err(JetError::Precondition("element is not holonomic".into()));
    }
    Ok(SecondOrderJetElement {
        linear: p.asigma.clone(),
        second: p.b.clone(),
    })
}

pub fn from_second_order(q: &SecondOrderJetElement) -> PrincipalJetElement {
    PrincipalJetElement {
        aphi: q.linear.clone(),
        asigma: q.linear.clone(),
        b: q.second.clone(),
    }
}

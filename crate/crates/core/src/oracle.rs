//! Independent ground truth built from polynomial maps.
//!
//! Double jets are computed by substituting into genuine polynomial maps
//! and reading off `D₁`, `D₂` and `D₁D₂` at the origin. Pure `s²` and `t²`
//! terms never influence a `(1,1)` double jet, so [`Bi11`] drops them; this
//! truncation is exact for everything computed here.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, JetError, Result};
use crate::group::PrincipalJetElement;
use crate::numeric::{self, Tensor3};
use crate::velocity::{is_inner_regular, Dims, DoubleVelocity, Velocity};

/// A scalar polynomial in `s₁..sₘ, t₁..tₘ` modulo all monomials other than
/// `1`, `s_i`, `t_j` and `s_i t_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bi11 {
    m: usize,
    constant: f64,
    s: Vec<f64>,
    t: Vec<f64>,
    st: Vec<f64>,
}

impl Bi11 {
    pub fn constant(m: usize, c: f64) -> Self {
        Self {
            m,
            constant: c,
            s: vec![0.0; m],
            t: vec![0.0; m],
            st: vec![0.0; m * m],
        }
    }

    pub fn s_var(m: usize, i: usize) -> Self {
        let mut out = Self::constant(m, 0.0);
        out.s[i] = 1.0;
        out
    }

    pub fn t_var(m: usize, j: usize) -> Self {
        let mut out = Self::constant(m, 0.0);
        out.t[j] = 1.0;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Self {
            m: self.m,
            constant: self.constant + other.constant,
            s: zip(&self.s, &other.s),
            t: zip(&self.t, &other.t),
            st: zip(&self.st, &other.st),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let sc = |a: &[f64]| a.iter().map(|x| x * c).collect();
        Self {
            m: self.m,
            constant: self.constant * c,
            s: sc(&self.s),
            t: sc(&self.t),
            st: sc(&self.st),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.m;
        let (a0, b0) = (self.constant, other.constant);
        let s = (0..m).map(|i| a0 * other.s[i] + b0 * self.s[i]).collect();
        let t = (0..m).map(|j| a0 * other.t[j] + b0 * self.t[j]).collect();
        let mut st = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                st[i * m + j] = a0 * other.st[i * m + j]
                    + b0 * self.st[i * m + j]
                    + self.s[i] * other.t[j]
                    + other.s[i] * self.t[j];
            }
        }
        Self {
            m,
            constant: a0 * b0,
            s,
            t,
            st,
        }
    }

    pub fn coeff_st(&self, i: usize, j: usize) -> f64 {
        self.st[i * self.m + j]
    }
}

/// A scalar polynomial in `x₁..xₘ` truncated at degree 2, stored as
/// `c + g·x + ½ xᵀ H x` with `H` symmetric.
#[derive(Clone, Debug, PartialEq)]
struct Quad {
    constant: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

impl Quad {
    fn constant(m: usize, c: f64) -> Self {
        Self {
            constant: c,
            grad: DVector::zeros(m),
            hess: DMatrix::zeros(m, m),
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            constant: self.constant + o.constant,
            grad: &self.grad + &o.grad,
            hess: &self.hess + &o.hess,
        }
    }

    fn scale(&self, c: f64) -> Self {
        Self {
            constant: self.constant * c,
            grad: &self.grad * c,
            hess: &self.hess * c,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let cross = &self.grad * o.grad.transpose();
        Self {
            constant: self.constant * o.constant,
            grad: &o.grad * self.constant + &self.grad * o.constant,
            hess: &o.hess * self.constant + &self.hess * o.constant + &cross + cross.transpose(),
        }
    }
}

/// `x ↦ c0 + c1·x + ½ c2[x, x]` from `ℝᵐ` to `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub c0: DVector<f64>,
    pub c1: DMatrix<f64>,
    pub c2: Tensor3,
}

impl PolyMap {
    pub fn new(c0: DVector<f64>, c1: DMatrix<f64>, c2: Tensor3, tol: f64) -> Result<Self> {
        let (n, m) = (c0.len(), c1.ncols());
        if c1.nrows() != n || c2.shape() != [n, m, m] {
            return dim_err("polynomial coefficients have inconsistent shapes");
        }
        if c2.symmetry_defect() > tol {
            return Err(JetError::Invalid("quadratic coefficient must be symmetric".into()));
        }
        Ok(Self { c0, c1, c2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.c1.ncols(), self.c0.len())
    }

    fn components(&self) -> Vec<Quad> {
        let (m, n) = self.dims();
        (0..n)
            .map(|a| Quad {
                constant: self.c0[a],
                grad: DVector::from_fn(m, |i, _| self.c1[(a, i)]),
                hess: DMatrix::from_fn(m, m, |i, j| self.c2[(a, i, j)]),
            })
            .collect()
    }

    fn from_components(parts: &[Quad]) -> Self {
        let n = parts.len();
        let m = parts[0].grad.len();
        Self {
            c0: DVector::from_fn(n, |a, _| parts[a].constant),
            c1: DMatrix::from_fn(n, m, |a, i| parts[a].grad[i]),
            c2: Tensor3::from_fn(n, m, m, |a, i, j| parts[a].hess[(i, j)]),
        }
    }

    fn eval_bi11(&self, x: &[Bi11]) -> Vec<Bi11> {
        let (m, n) = self.dims();
        let mm = x[0].m;
        (0..n)
            .map(|a| {
                let mut acc = Bi11::constant(mm, self.c0[a]);
                for i in 0..m {
                    acc = acc.add(&x[i].scale(self.c1[(a, i)]));
                    for k in 0..m {
                        acc = acc.add(&x[i].mul(&x[k]).scale(0.5 * self.c2[(a, i, k)]));
                    }
                }
                acc
            })
            .collect()
    }
}

/// `(s, t) ↦ c0 + Ps·s + Pt·t + Pst[s, t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPolyMap {
    pub c0: DVector<f64>,
    pub ps: DMatrix<f64>,
    pub pt: DMatrix<f64>,
    pub pst: Tensor3,
}

impl BiPolyMap {
    pub fn dims(&self) -> (usize, usize) {
        (self.ps.ncols(), self.c0.len())
    }

    fn components(&self) -> Vec<Bi11> {
        let (m, n) = self.dims();
        (0..n)
            .map(|a| Bi11 {
                m,
                constant: self.c0[a],
                s: (0..m).map(|i| self.ps[(a, i)]).collect(),
                t: (0..m).map(|j| self.pt[(a, j)]).collect(),
                st: (0..m * m).map(|ij| self.pst[(a, ij / m, ij % m)]).collect(),
            })
            .collect()
    }

    fn from_components(parts: &[Bi11]) -> Self {
        let n = parts.len();
        let m = parts[0].m;
        Self {
            c0: DVector::from_fn(n, |a, _| parts[a].constant),
            ps: DMatrix::from_fn(n, m, |a, i| parts[a].s[i]),
            pt: DMatrix::from_fn(n, m, |a, j| parts[a].t[j]),
            pst: Tensor3::from_fn(n, m, m, |a, i, j| parts[a].coeff_st(i, j)),
        }
    }

    /// Substitutes `s ↦ s_new`, `t ↦ t_new` (each a list of `m` truncated
    /// polynomials without constant term).
    pub fn substitute(&self, s_new: &[Bi11], t_new: &[Bi11]) -> Self {
        let (m, _) = self.dims();
        let mm = s_new[0].m;
        let parts: Vec<Bi11> = self
            .components()
            .iter()
            .map(|comp| {
                let mut acc = Bi11::constant(mm, comp.constant);
                for i in 0..m {
                    acc = acc.add(&s_new[i].scale(comp.s[i]));
                    acc = acc.add(&t_new[i].scale(comp.t[i]));
                }
                for (i, si) in s_new.iter().enumerate().take(m) {
                    for (j, tj) in t_new.iter().enumerate().take(m) {
                        acc = acc.add(&si.mul(tj).scale(comp.coeff_st(i, j)));
                    }
                }
                acc
            })
            .collect();
        Self::from_components(&parts)
    }

    /// `(s, t) ↦ χ(t, s)`.
    pub fn swap_arguments(&self) -> Self {
        let (m, _) = self.dims();
        let s: Vec<_> = (0..m).map(|i| Bi11::t_var(m, i)).collect();
        let t: Vec<_> = (0..m).map(|j| Bi11::s_var(m, j)).collect();
        self.substitute(&s, &t)
    }
}

pub fn to_bipoly(dv: &DoubleVelocity) -> BiPolyMap {
    BiPolyMap {
        c0: dv.point().clone(),
        ps: dv.inner().clone(),
        pt: dv.outer().clone(),
        pst: dv.mixed().clone(),
    }
}

/// Value and Jacobian at the origin.
pub fn jet_of(f: &PolyMap) -> Result<Velocity> {
    Velocity::new(f.c0.clone(), f.c1.clone())
}

/// `(χ(0), D₁χ(0), D₂χ(0), D₁D₂χ(0))`.
pub fn double_jet_of(x: &BiPolyMap) -> Result<DoubleVelocity> {
    DoubleVelocity::new(x.c0.clone(), x.ps.clone(), x.pt.clone(), x.pst.clone())
}

/// Reparametrizes `x` by the group element: `s ↦ A_σ s + B[s, t]`,
/// `t ↦ A_φ t`.
pub fn act_oracle(x: &BiPolyMap, p: &PrincipalJetElement) -> Result<BiPolyMap> {
    let (m, _) = x.dims();
    if p.m() != m {
        return dim_err(format!("map has m = {m} but group element has m = {}", p.m()));
    }
    let s_new: Vec<Bi11> = (0..m)
        .map(|i| {
            let mut acc = Bi11::constant(m, 0.0);
            for j in 0..m {
                acc = acc.add(&Bi11::s_var(m, j).scale(p.asigma()[(i, j)]));
                for k in 0..m {
                    acc = acc.add(&Bi11::s_var(m, j).mul(&Bi11::t_var(m, k)).scale(p.b()[(i, j, k)]));
                }
            }
            acc
        })
        .collect();
    let t_new: Vec<Bi11> = (0..m)
        .map(|i| {
            (0..m).fold(Bi11::constant(m, 0.0), |acc, j| {
                acc.add(&Bi11::t_var(m, j).scale(p.aphi()[(i, j)]))
            })
        })
        .collect();
    Ok(x.substitute(&s_new, &t_new))
}

/// Double jet of `χ(s, t) = g(s + t)`.
pub fn prolong(g: &PolyMap) -> Result<DoubleVelocity> {
    let (m, _) = g.dims();
    let x: Vec<Bi11> = (0..m).map(|i| Bi11::s_var(m, i).add(&Bi11::t_var(m, i))).collect();
    let parts = g.eval_bi11(&x);
    double_jet_of(&BiPolyMap::from_components(&parts))
}

/// Degree-2 truncation of `f1 ∘ f2` for origin-preserving self-maps of
/// `ℝᵐ`.
pub fn compose_second_order(f1: &PolyMap, f2: &PolyMap) -> Result<PolyMap> {
    let (m1, n1) = f1.dims();
    let (m2, n2) = f2.dims();
    if m1 != n1 || m2 != n2 || m1 != m2 {
        return dim_err("compose_second_order needs two self-maps of the same R^m");
    }
    if f1.c0.amax() != 0.0 {
        return Err(JetError::Precondition("maps must fix the origin".into()));
    }
    compose_truncated(f1, f2)
}

/// Degree-2 truncation of `f ∘ g` for `g: ℝᵐ → ℝᵏ` with `g(0) = 0` and
/// `f: ℝᵏ → ℝⁿ`.
pub fn compose_truncated(f: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    let (k, _) = f.dims();
    let (m, gk) = g.dims();
    if gk != k {
        return dim_err(format!(
            "cannot compose: inner map lands in R^{gk}, outer map starts from R^{k}"
        ));
    }
    if g.c0.amax() != 0.0 {
        return Err(JetError::Precondition("inner map must fix the origin".into()));
    }
    let inner = g.components();
    let parts: Vec<Quad> = f
        .components()
        .iter()
        .map(|comp| {
            let mut acc = Quad::constant(m, comp.constant);
            for j in 0..k {
                acc = acc.add(&inner[j].scale(comp.grad[j]));
                for l in 0..k {
                    acc = acc.add(&inner[j].mul(&inner[l]).scale(0.5 * comp.hess[(j, l)]));
                }
            }
            acc
        })
        .collect();
    Ok(PolyMap::from_components(&parts))
}

/// Finite-difference version of the `F¹ₘρ` test: central differences of
/// the chart map `U ↦ U (U_I)⁻¹` along each `u_{ij} t^j`, stacked under the
/// outer part and rank-tested.
pub fn rho_regular_fd(dv: &DoubleVelocity, h: f64, tol: f64) -> Result<bool> {
    let Dims { m, n } = dv.dims().require_codim()?;
    if !is_inner_regular(dv, numeric::DEFAULT_TOL) {
        return Err(JetError::Precondition("double velocity is not inner-regular".into()));
    }
    let pivots = numeric::pivot_rows(dv.inner(), numeric::DEFAULT_TOL);
    let others = numeric::complement(&pivots, n);
    let chart = |u: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let inv = numeric::invert(&numeric::select_rows(u, &pivots), "perturbed pivot block")?;
        Ok(numeric::select_rows(u, &others) * inv)
    };
    let k = others.len();
    let mut stack = DMatrix::zeros(n + k * m, m);
    for j in 0..m {
        let wj = DMatrix::from_fn(n, m, |a, i| dv.mixed()[(a, i, j)]);
        let plus = chart(&(dv.inner() + &wj * h))?;
        let minus = chart(&(dv.inner() - &wj * h))?;
        let slope = (plus - minus) / (2.0 * h);
        for a in 0..n {
            stack[(a, j)] = dv.outer()[(a, j)];
        }
        for a in 0..k {
            for i in 0..m {
                stack[(n + a * m + i, j)] = slope[(a, i)];
            }
        }
    }
    Ok(numeric::rank(&stack, tol) == m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity::is_holonomic;

    const TOL: f64 = 1e-9;

    fn parabola() -> PolyMap {
        // γ(s) = (s, s²)
        PolyMap::new(
            DVector::zeros(2),
            DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Tensor3::from_fn(2, 1, 1, |a, _, _| if a == 1 { 2.0 } else { 0.0 }),
            TOL,
        )
        .unwrap()
    }

    #[test]
    fn jet_of_parabola_drops_quadratic() {
        let v = jet_of(&parabola()).unwrap();
        assert_eq!(v.linear(), &DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        assert_eq!(v.point(), &DVector::zeros(2));
    }

    #[test]
    fn prolongation_of_parabola() {
        let dv = prolong(&parabola()).unwrap();
        assert_eq!(dv.inner(), dv.outer());
        assert_eq!(dv.mixed()[(1, 0, 0)], 2.0);
        assert_eq!(dv.mixed()[(0, 0, 0)], 0.0);
        assert!(is_holonomic(&dv, TOL));
    }

    #[test]
    fn identity_bipoly_has_identity_jet() {
        let x = BiPolyMap {
            c0: DVector::zeros(2),
            ps: DMatrix::identity(2, 2),
            pt: DMatrix::identity(2, 2),
            pst: Tensor3::zeros(2, 2, 2),
        };
        let dv = double_jet_of(&x).unwrap();
        assert_eq!(dv.inner(), &DMatrix::identity(2, 2));
        assert_eq!(dv.mixed().max_abs(), 0.0);
        assert_eq!(to_bipoly(&dv), x);
    }

    #[test]
    fn worked_action_by_substitution() {
        let x = BiPolyMap {
            c0: DVector::zeros(2),
            ps: DMatrix::from_column_slice(2, 1, &[1.0, 2.0]),
            pt: DMatrix::from_column_slice(2, 1, &[3.0, 4.0]),
            pst: Tensor3::from_fn(2, 1, 1, |a, _, _| [5.0, 6.0][a]),
        };
        let p = PrincipalJetElement::new(
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::from_element(1, 1, 3.0),
            Tensor3::from_fn(1, 1, 1, |_, _, _| 7.0),
        )
        .unwrap();
        let y = act_oracle(&x, &p).unwrap();
        assert_eq!(y.pst.as_slice(), &[37.0, 50.0]);
        assert_eq!(y.ps.as_slice(), &[3.0, 6.0]);
        assert_eq!(y.pt.as_slice(), &[6.0, 8.0]);
        assert_eq!(act_oracle(&x, &PrincipalJetElement::identity(1)).unwrap(), x);
    }

    #[test]
    fn scalar_second_order_composition() {
        // (2t + 3t²) ∘ (3t + 2t²) = 6t + 31t²
        let f = |a: f64, s: f64| {
            PolyMap::new(
                DVector::zeros(1),
                DMatrix::from_element(1, 1, a),
                Tensor3::from_fn(1, 1, 1, |_, _, _| s),
                TOL,
            )
            .unwrap()
        };
        let c = compose_second_order(&f(2.0, 6.0), &f(3.0, 4.0)).unwrap();
        assert_eq!(c.c1[(0, 0)], 6.0);
        assert_eq!(c.c2[(0, 0, 0)], 62.0);
        assert_eq!(compose_second_order(&f(2.0, 6.0), &f(1.0, 0.0)).unwrap(), f(2.0, 6.0));
        let shifted = PolyMap::new(
            DVector::from_element(1, 1.0),
            DMatrix::identity(1, 1),
            Tensor3::zeros(1, 1, 1),
            TOL,
        )
        .unwrap();
        assert!(compose_second_order(&shifted, &f(1.0, 0.0)).is_err());
    }

    #[test]
    fn swap_arguments_transposes() {
        let x = BiPolyMap {
            c0: DVector::zeros(1),
            ps: DMatrix::from_row_slice(1, 2, &[1.0, 2.0]),
            pt: DMatrix::from_row_slice(1, 2, &[3.0, 4.0]),
            pst: Tensor3::from_fn(1, 2, 2, |_, i, j| (2 * i + j) as f64),
        };
        let y = x.swap_arguments();
        assert_eq!(y.ps, x.pt);
        assert_eq!(y.pt, x.ps);
        assert_eq!(y.pst, x.pst.transpose_last());
    }

    #[test]
    fn fd_rho_examples() {
        let col = |xs: &[f64]| DMatrix::from_column_slice(xs.len(), 1, xs);
        let mk = |ui: &[f64], uo: &[f64], w: &[f64]| {
            DoubleVelocity::new(
                DVector::zeros(ui.len()),
                col(ui),
                col(uo),
                Tensor3::from_fn(ui.len(), 1, 1, |a, _, _| w[a]),
            )
            .unwrap()
        };
        assert!(rho_regular_fd(&mk(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0]), 1e-5, 1e-6).unwrap());
        assert!(!rho_regular_fd(&mk(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]), 1e-5, 1e-6).unwrap());
        assert!(rho_regular_fd(&mk(&[1.0, 0.0], &[2.0, 1.0], &[0.0, 0.0]), 1e-5, 1e-6).unwrap());
    }
}

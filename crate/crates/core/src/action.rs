//! Right actions of `L¹ₘ` on velocities and of `P¹ₘ` on double velocities,
//! the `F¹ₘρ` membership test, and the transporter solver.

use nalgebra::DMatrix;

use crate::error::{dim_err, JetError, Result};
use crate::group::{JetGroupElement, PrincipalJetElement};
use crate::numeric::{self, select_rows, Tensor3};
use crate::velocity::{is_inner_regular, Dims, DoubleVelocity, Velocity};

/// `U ↦ U · A`.
pub fn act_l_velocity(v: &Velocity, g: &JetGroupElement) -> Result<Velocity> {
    if v.dims().m != g.m() {
        return dim_err(format!(
            "velocity has m = {} but group element has m = {}",
            v.dims().m,
            g.m()
        ));
    }
    Velocity::new(v.point().clone(), v.linear() * g.matrix())
}

/// The right action of `(A_φ, A_σ, B)`:
///
/// ```text
/// u_i'   = u_h A_σ[h][i]
/// u_·j'  = u_·k A_φ[k][j]
/// u_ij'  = u_hk A_σ[h][i] A_φ[k][j] + u_h B[h][i][j]
/// ```
pub fn act_p_double(dv: &DoubleVelocity, p: &PrincipalJetElement) -> Result<DoubleVelocity> {
    if dv.dims().m != p.m() {
        return dim_err(format!(
            "double velocity has m = {} but group element has m = {}",
            dv.dims().m,
            p.m()
        ));
    }
    let mixed = dv
        .mixed()
        .contract_last_two(p.asigma(), p.aphi())
        .add(&Tensor3::left_mul(dv.inner(), p.b()));
    DoubleVelocity::new(
        dv.point().clone(),
        dv.inner() * p.asigma(),
        dv.outer() * p.aphi(),
        mixed,
    )
}

/// Lexicographically smallest `m`-subset of rows whose block in every
/// listed matrix is well conditioned (`|det| > tol · Π‖rows‖`).
pub fn find_pivot_set(blocks: &[&DMatrix<f64>], tol: f64) -> Option<Vec<usize>> {
    let (n, m) = blocks.first()?.shape();
    numeric::lex_subsets(n, m).find(|rows| {
        blocks
            .iter()
            .all(|b| numeric::hadamard_ratio(&select_rows(b, rows)) > tol)
    })
}

/// Derivatives `N_j` of the plane coordinates `U_α (U_I)⁻¹` along the
/// outer directions: `N_j = (W_{α,·,j} − U_α r W_{I,·,j}) r` with
/// `r = (U_I)⁻¹`. Returned as an `(n−m) x m x m` array indexed
/// `[α][i][j]`.
pub(crate) fn plane_derivatives(dv: &DoubleVelocity, pivots: &[usize]) -> Result<Tensor3> {
    let Dims { m, n } = dv.dims();
    let others = numeric::complement(pivots, n);
    let r = numeric::invert(&select_rows(dv.inner(), pivots), "inner pivot block")?;
    let u_alpha_r = select_rows(dv.inner(), &others) * &r;
    let w_i = dv.mixed().select_first(pivots);
    let w_alpha = dv.mixed().select_first(&others);
    let mut out = Tensor3::zeros(others.len(), m, m);
    for j in 0..m {
        let wa = DMatrix::from_fn(others.len(), m, |a, i| w_alpha[(a, i, j)]);
        let wi = DMatrix::from_fn(m, m, |k, i| w_i[(k, i, j)]);
        let nj = (wa - &u_alpha_r * wi) * &r;
        for a in 0..others.len() {
            for i in 0..m {
                out[(a, i, j)] = nj[(a, i)];
            }
        }
    }
    Ok(out)
}

/// The `(n + (n−m)·m) x m` matrix whose column `j` stacks `u^a_{·j}` over
/// all `N_j` entries.
pub(crate) fn rho_stack(dv: &DoubleVelocity, pivots: &[usize]) -> Result<DMatrix<f64>> {
    let Dims { m, n } = dv.dims();
    let nd = plane_derivatives(dv, pivots)?;
    let rows = nd.shape()[0];
    Ok(DMatrix::from_fn(n + rows * m, m, |row, j| {
        if row < n {
            dv.outer()[(row, j)]
        } else {
            let (a, i) = ((row - n) / m, (row - n) % m);
            nd[(a, i, j)]
        }
    }))
}

/// Membership in `F¹ₘρ`: the projected curve of contact elements is an
/// immersion at the origin. Requires an inner-regular double velocity with
/// `m < n`.
pub fn is_rho_regular(dv: &DoubleVelocity, tol: f64) -> Result<bool> {
    dv.dims().require_codim()?;
    if !is_inner_regular(dv, tol) {
        return Err(JetError::Precondition("double velocity is not inner-regular".into()));
    }
    let pivots = numeric::pivot_rows(dv.inner(), tol);
    let stack = rho_stack(dv, &pivots)?;
    Ok(numeric::rank(&stack, tol) == dv.dims().m)
}

/// Solves for the unique `p` with `act_p_double(dv1, p)` agreeing with
/// `dv2` on the pivot rows `pivots`, then checks the remaining rows.
/// Returns `Ok(None)` when `dv2` is not in the orbit of `dv1`.
pub fn solve_transporter(
    dv1: &DoubleVelocity,
    dv2: &DoubleVelocity,
    pivots: &[usize],
    tol: f64,
) -> Result<Option<PrincipalJetElement>> {
    if dv1.dims() != dv2.dims() {
        return dim_err("double velocities have different dimensions");
    }
    let Dims { m, n } = dv1.dims();
    if pivots.len() != m || pivots.iter().any(|&r| r >= n) || pivots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(JetError::Precondition(format!(
            "pivot set {pivots:?} is not an increasing {m}-subset of 0..{n}"
        )));
    }
    if numeric::vec_rel_diff(dv1.point(), dv2.point()) > tol {
        return Ok(None);
    }
    let ui1_inv = numeric::invert(&select_rows(dv1.inner(), pivots), "inner pivot block of dv1")?;
    let uo1_inv = numeric::invert(&select_rows(dv1.outer(), pivots), "outer pivot block of dv1")?;
    let ui2 = select_rows(dv2.inner(), pivots);
    let uo2 = select_rows(dv2.outer(), pivots);
    numeric::invert(&ui2, "inner pivot block of dv2")?;
    numeric::invert(&uo2, "outer pivot block of dv2")?;

    let asigma = &ui1_inv * ui2;
    let aphi = &uo1_inv * uo2;
    let carried = dv1.mixed().contract_last_two(&asigma, &aphi).select_first(pivots);
    let b = Tensor3::left_mul(&ui1_inv, &dv2.mixed().select_first(pivots).sub(&carried));
    let p = PrincipalJetElement::new(aphi, asigma, b)?;
    let image = act_p_double(dv1, &p)?;
    Ok((image.rel_diff(dv2) <= tol).then_some(p))
}

//! Randomized property suites over seeded integer samples.
//!
//! Every trial draws from its own ChaCha8 stream keyed by the seed, the
//! property name and the trial index, so reports are identical across runs
//! and thread counts.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{act_l_velocity, act_p_double, find_pivot_set, is_rho_regular, rho_stack, solve_transporter};
use crate::contact::{
    affine_add_contact, contact_equal, contact_of, decompose_contact, double_contact_of, is_holonomic_contact,
    is_semiholonomic_contact, split_quotient, vertical_quotient, vertical_quotient_by_transporter,
    DoubleContactElement, QuotientVerticalVector,
};
use crate::error::{JetError, Result};
use crate::group::{
    compose_l, compose_p, embed_l, exchange_p, factor_p, factor_semiholonomic, from_chi, from_second_order, identity_p,
    inverse_l, inverse_p, is_curvature_p, is_holonomic_p, is_semiholonomic_p, lambda_p, mu_p, symmetrize_p, to_chi,
    to_second_order, JetGroupElement, PrincipalJetElement,
};
use crate::numeric::{self, Tensor3};
use crate::oracle::{
    act_oracle, compose_second_order, compose_truncated, double_jet_of, jet_of, prolong, rho_regular_fd, to_bipoly,
    PolyMap,
};
use crate::sample::{self as s, SampleRng};
use crate::velocity::{
    affine_add_vertical, exchange, inner_projection, is_holonomic, is_inner_regular, is_semiholonomic, is_tau_regular,
    is_vertical, make_holonomic, outer_projection, split_semiholonomic, Dims, DoubleVelocity, VerticalKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    GroupAxioms,
    Exchange,
    Action,
    Freeness,
    SubgroupChar,
    QuotientInvariance,
    Decomposition,
    OracleEquivalence,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = [
        "group-axioms",
        "exchange",
        "action",
        "freeness",
        "subgroup-char",
        "quotient-invariance",
        "decomposition",
        "oracle-equivalence",
        "all",
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::GroupAxioms => "group-axioms",
            Suite::Exchange => "exchange",
            Suite::Action => "action",
            Suite::Freeness => "freeness",
            Suite::SubgroupChar => "subgroup-char",
            Suite::QuotientInvariance => "quotient-invariance",
            Suite::Decomposition => "decomposition",
            Suite::OracleEquivalence => "oracle-equivalence",
            Suite::All => "all",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "group-axioms" => Suite::GroupAxioms,
            "exchange" => Suite::Exchange,
            "action" => Suite::Action,
            "freeness" => Suite::Freeness,
            "subgroup-char" => Suite::SubgroupChar,
            "quotient-invariance" => Suite::QuotientInvariance,
            "decomposition" => Suite::Decomposition,
            "oracle-equivalence" => Suite::OracleEquivalence,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

/// Deliberate defects used to check that the suites notice broken code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// `compose_p` without the `A_σ₁ · B₂` term.
    ComposeP,
}

impl Fault {
    pub fn parse(name: &str) -> Option<Self> {
        (name == "compose-p").then_some(Fault::ComposeP)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub fault: Option<Fault>,
}

impl VerifyConfig {
    pub fn new(suite: Suite, m: usize, n: usize) -> Self {
        Self {
            suite,
            m,
            n,
            trials: 1000,
            seed: 0,
            tol: numeric::DEFAULT_TOL,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest error seen; `null` in JSON when some trial produced a
    /// non-finite value.
    pub max_error: f64,
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
    pub failures: usize,
    pub max_error: f64,
    pub properties: Vec<PropertyReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json_string(&self, pretty: bool) -> String {
        let doc = serde_json::to_value(self).expect("report serializes");
        crate::codec::render(&doc, pretty)
    }
}

#[derive(Clone, Copy, Debug)]
struct Outcome {
    error: f64,
    pass: bool,
}

impl Outcome {
    fn holds(ok: bool) -> Self {
        Outcome {
            error: if ok { 0.0 } else { 1.0 },
            pass: ok,
        }
    }

    fn failed() -> Self {
        Outcome {
            error: f64::INFINITY,
            pass: false,
        }
    }

    fn and(self, other: Outcome) -> Self {
        Outcome {
            error: self.error.max(other.error),
            pass: self.pass && other.pass,
        }
    }
}

struct Ctx {
    dims: Dims,
    tol: f64,
    fault: Option<Fault>,
}

impl Ctx {
    fn m(&self) -> usize {
        self.dims.m
    }

    fn within(&self, error: f64) -> Outcome {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        Outcome {
            error,
            pass: error <= self.tol,
        }
    }

    /// Group product, possibly with an injected defect.
    fn compose(&self, p1: &PrincipalJetElement, p2: &PrincipalJetElement) -> Result<PrincipalJetElement> {
        match self.fault {
            None => compose_p(p1, p2),
            Some(Fault::ComposeP) => PrincipalJetElement::new(
                p1.aphi() * p2.aphi(),
                p1.asigma() * p2.asigma(),
                p1.b().contract_last_two(p2.asigma(), p2.aphi()),
            ),
        }
    }
}

type Check = fn(&Ctx, &mut SampleRng) -> Result<Outcome>;

struct Property {
    name: &'static str,
    suite: Suite,
    /// Needs `m < n`.
    codim: bool,
    check: Check,
}

const fn prop(name: &'static str, suite: Suite, codim: bool, check: Check) -> Property {
    Property {
        name,
        suite,
        codim,
        check,
    }
}

use Suite::*;

const PROPERTIES: &[Property] = &[
    prop("principal_associativity", GroupAxioms, false, principal_associativity),
    prop("principal_identity", GroupAxioms, false, principal_identity),
    prop("principal_inverse", GroupAxioms, false, principal_inverse),
    prop("linear_group_laws", GroupAxioms, false, linear_group_laws),
    prop(
        "projections_are_homomorphisms",
        GroupAxioms,
        false,
        projections_are_homomorphisms,
    ),
    prop("subgroup_closure", GroupAxioms, false, subgroup_closure),
    prop(
        "symmetrization_homomorphism",
        GroupAxioms,
        false,
        symmetrization_homomorphism,
    ),
    prop(
        "semiholonomic_factorization",
        GroupAxioms,
        false,
        semiholonomic_factorization,
    ),
    prop("principal_factorization", GroupAxioms, false, principal_factorization),
    prop("embedding_homomorphism", GroupAxioms, false, embedding_homomorphism),
    prop(
        "second_order_identification",
        GroupAxioms,
        false,
        second_order_identification,
    ),
    prop("chi_roundtrip", GroupAxioms, false, chi_roundtrip),
    prop("exchange_involution", Exchange, false, exchange_involution),
    prop(
        "exchange_swaps_projections",
        Exchange,
        false,
        exchange_swaps_projections,
    ),
    prop(
        "holonomic_iff_exchange_fixed",
        Exchange,
        false,
        holonomic_iff_exchange_fixed,
    ),
    prop("regularity_duality", Exchange, false, regularity_duality),
    prop(
        "principal_exchange_involution",
        Exchange,
        false,
        principal_exchange_involution,
    ),
    prop(
        "principal_exchange_semiholonomic_homomorphism",
        Exchange,
        false,
        principal_exchange_homomorphism,
    ),
    prop(
        "exchange_intertwines_action",
        Exchange,
        false,
        exchange_intertwines_action,
    ),
    prop("semiholonomic_split", Exchange, false, semiholonomic_split),
    prop(
        "prolongation_is_exchange_fixed",
        Exchange,
        false,
        prolongation_is_exchange_fixed,
    ),
    prop(
        "argument_swap_matches_exchange",
        Exchange,
        false,
        argument_swap_matches_exchange,
    ),
    prop("velocity_action_law", Action, false, velocity_action_law),
    prop("double_action_law", Action, false, double_action_law),
    prop("vertical_preserved", Action, false, vertical_preserved),
    prop(
        "symmetric_vertical_preserved_by_holonomic",
        Action,
        false,
        symmetric_vertical_preserved,
    ),
    prop(
        "skew_vertical_preserved_by_curvature",
        Action,
        false,
        skew_vertical_preserved,
    ),
    prop("regularity_is_invariant", Action, true, regularity_is_invariant),
    prop("contact_element_invariance", Action, true, contact_element_invariance),
    prop("free_on_rho_regular", Freeness, true, free_on_rho_regular),
    prop(
        "semiholonomic_free_on_inner_regular",
        Freeness,
        true,
        semiholonomic_free_on_inner_regular,
    ),
    prop(
        "transporter_recovers_element",
        Freeness,
        true,
        transporter_recovers_element,
    ),
    prop(
        "transporter_rejects_other_orbits",
        Freeness,
        true,
        transporter_rejects_other_orbits,
    ),
    prop(
        "semiholonomic_subgroup_preserves",
        SubgroupChar,
        false,
        semiholonomic_subgroup_preserves,
    ),
    prop(
        "semiholonomic_subgroup_exact",
        SubgroupChar,
        false,
        semiholonomic_subgroup_exact,
    ),
    prop(
        "holonomic_subgroup_preserves",
        SubgroupChar,
        false,
        holonomic_subgroup_preserves,
    ),
    prop(
        "holonomic_subgroup_exact",
        SubgroupChar,
        false,
        holonomic_subgroup_exact,
    ),
    prop(
        "double_contact_orbit_invariance",
        QuotientInvariance,
        true,
        double_contact_orbit_invariance,
    ),
    prop(
        "canonical_form_idempotent",
        QuotientInvariance,
        true,
        canonical_form_idempotent,
    ),
    prop(
        "vertical_quotient_invariance",
        QuotientInvariance,
        true,
        vertical_quotient_invariance,
    ),
    prop(
        "symmetric_quotient_invariance",
        QuotientInvariance,
        true,
        symmetric_quotient_invariance,
    ),
    prop(
        "skew_quotient_invariance",
        QuotientInvariance,
        true,
        skew_quotient_invariance,
    ),
    prop(
        "quotient_formula_matches_transporter",
        QuotientInvariance,
        true,
        quotient_formula_matches_transporter,
    ),
    prop(
        "quotient_kills_orbit_directions",
        QuotientInvariance,
        true,
        quotient_kills_orbit_directions,
    ),
    prop("quotient_split", QuotientInvariance, true, quotient_split),
    prop(
        "quotient_preserves_symmetry_type",
        QuotientInvariance,
        true,
        quotient_preserves_symmetry_type,
    ),
    prop(
        "semiholonomic_contact_invariance",
        QuotientInvariance,
        true,
        semiholonomic_contact_invariance,
    ),
    prop(
        "decomposition_recomposes",
        Decomposition,
        true,
        decomposition_recomposes,
    ),
    prop(
        "decomposition_matches_velocity_split",
        Decomposition,
        true,
        decomposition_matches_velocity_split,
    ),
    prop(
        "decomposition_representative_independent",
        Decomposition,
        true,
        decomposition_representative_independent,
    ),
    prop(
        "semiholonomic_orbit_characterization",
        Decomposition,
        true,
        semiholonomic_orbit_characterization,
    ),
    prop(
        "holonomic_orbit_characterization",
        Decomposition,
        true,
        holonomic_orbit_characterization,
    ),
    prop("affine_action_free", Decomposition, true, affine_action_free),
    prop("affine_action_additive", Decomposition, true, affine_action_additive),
    prop(
        "symmetric_shift_keeps_holonomic",
        Decomposition,
        true,
        symmetric_shift_keeps_holonomic,
    ),
    prop(
        "double_action_matches_oracle",
        OracleEquivalence,
        false,
        double_action_matches_oracle,
    ),
    prop(
        "oracle_composition_consistency",
        OracleEquivalence,
        false,
        oracle_composition_consistency,
    ),
    prop(
        "velocity_action_matches_oracle",
        OracleEquivalence,
        false,
        velocity_action_matches_oracle,
    ),
    prop(
        "second_order_transport",
        OracleEquivalence,
        false,
        second_order_transport,
    ),
    prop(
        "prolongation_matches_make_holonomic",
        OracleEquivalence,
        false,
        prolongation_matches_make_holonomic,
    ),
    prop("double_jet_roundtrip", OracleEquivalence, false, double_jet_roundtrip),
    prop(
        "rho_regularity_matches_finite_differences",
        OracleEquivalence,
        true,
        rho_matches_finite_differences,
    ),
];

/// Names of the properties a suite runs for the given dimensions.
pub fn property_names(suite: Suite, m: usize, n: usize) -> Vec<&'static str> {
    selected(suite, m, n).map(|p| p.name).collect()
}

fn selected(suite: Suite, m: usize, n: usize) -> impl Iterator<Item = &'static Property> {
    PROPERTIES
        .iter()
        .filter(move |p| (suite == All || p.suite == suite) && (!p.codim || m < n))
}

/// Runs every selected property for `config.trials` trials.
///
/// Properties that need `m < n` are skipped when `m == n`; a suite left
/// empty by that is a configuration error.
pub fn run(config: &VerifyConfig) -> Result<Report> {
    let dims = Dims::new(config.m, config.n)?;
    if dims.m > dims.n {
        return Err(JetError::Dimension(format!(
            "verification needs m <= n (m = {}, n = {})",
            dims.m, dims.n
        )));
    }
    if config.trials == 0 {
        return Err(JetError::Invalid("trials must be positive".into()));
    }
    if !(config.tol.is_finite() && config.tol > 0.0) {
        return Err(JetError::Invalid(format!(
            "tolerance must be positive and finite, got {}",
            config.tol
        )));
    }
    let props: Vec<&Property> = selected(config.suite, dims.m, dims.n).collect();
    if props.is_empty() {
        return Err(JetError::Dimension(format!(
            "suite {} needs m < n (m = {}, n = {})",
            config.suite.as_str(),
            dims.m,
            dims.n
        )));
    }
    let ctx = Ctx {
        dims,
        tol: config.tol,
        fault: config.fault,
    };
    let properties: Vec<PropertyReport> = props.iter().map(|p| run_property(p, &ctx, config)).collect();
    Ok(Report {
        suite: config.suite.as_str().to_string(),
        m: dims.m,
        n: dims.n,
        seed: config.seed,
        tol: config.tol,
        trials: config.trials,
        failures: properties.iter().map(|p| p.failures).sum(),
        max_error: properties.iter().map(|p| p.max_error).fold(0.0, f64::max),
        properties,
    })
}

fn run_property(prop: &Property, ctx: &Ctx, config: &VerifyConfig) -> PropertyReport {
    let outcomes: Vec<Outcome> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = s::trial_rng(config.seed, prop.name, t);
            (prop.check)(ctx, &mut rng).unwrap_or_else(|_| Outcome::failed())
        })
        .collect();
    let first_failure = outcomes.iter().position(|o| !o.pass);
    PropertyReport {
        name: prop.name.to_string(),
        suite: prop.suite.as_str().to_string(),
        trials: config.trials,
        failures: outcomes.iter().filter(|o| !o.pass).count(),
        max_error: outcomes.iter().map(|o| o.error).fold(0.0, f64::max),
        first_failure,
    }
}

// ---------------------------------------------------------------- samplers

fn non_identity(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    s::away_from_identity(rng, |r| s::principal(r, m))
}

/// Principal element with `A_φ ≠ A_σ`.
fn non_semiholonomic(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    loop {
        let p = s::principal(rng, m);
        if (p.aphi() - p.asigma()).amax() >= 0.1 {
            return p;
        }
    }
}

/// Semiholonomic element whose `B` is not symmetric (`m ≥ 2`).
fn non_holonomic_semiholonomic(rng: &mut SampleRng, m: usize) -> PrincipalJetElement {
    loop {
        let p = s::semiholonomic_principal(rng, m);
        if p.b().alt_last().max_abs() >= 0.1 {
            return p;
        }
    }
}

/// Vertical double velocity whose mixed part lies in the orbit directions
/// `u · B`, hence not `ρ`-regular.
fn degenerate_vertical(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    let u = s::vector(rng, dims.n);
    let inner = s::full_rank(rng, dims.n, dims.m);
    let b = s::tensor(rng, dims.m, dims.m, dims.m);
    let mixed = Tensor3::left_mul(&inner, &b);
    DoubleVelocity::new(u, inner, DMatrix::zeros(dims.n, dims.m), mixed).expect("shapes agree")
}

/// Inner-regular double velocities on both sides of the `ρ`-regularity
/// boundary.
fn inner_regular_mix(rng: &mut SampleRng, dims: Dims) -> DoubleVelocity {
    match rng.random_range(0..4) {
        0 => s::double(rng, dims),
        1 => s::semiholonomic_double(rng, dims),
        2 => s::vertical_double(rng, dims),
        _ => degenerate_vertical(rng, dims),
    }
}

fn rho_regular(rng: &mut SampleRng, dims: Dims, tol: f64) -> Result<DoubleVelocity> {
    loop {
        let dv = match rng.random_range(0..3) {
            0 => s::double(rng, dims),
            1 => s::semiholonomic_double(rng, dims),
            _ => s::vertical_double(rng, dims),
        };
        if is_rho_regular(&dv, tol)? {
            return Ok(dv);
        }
    }
}

/// Semiholonomic double velocity with a chart in which both parts are
/// admissible.
fn admissible_semiholonomic(rng: &mut SampleRng, dims: Dims, holonomic: bool) -> DoubleVelocity {
    loop {
        let dv = if holonomic {
            s::holonomic_double(rng, dims)
        } else {
            s::semiholonomic_double(rng, dims)
        };
        if find_pivot_set(&[dv.inner()], numeric::DEFAULT_TOL).is_some() {
            return dv;
        }
    }
}

fn random_quotient(
    rng: &mut SampleRng,
    d: &DoubleContactElement,
    kind: VerticalKind,
    tol: f64,
) -> Result<QuotientVerticalVector> {
    let Dims { m, n } = d.dims();
    loop {
        let values = match kind {
            VerticalKind::General => s::tensor(rng, n - m, m, m),
            VerticalKind::Sym => s::sym_tensor(rng, n - m, m),
            VerticalKind::Alt => s::skew_tensor(rng, n - m, m),
        };
        if values.max_abs() > 0.0 {
            return QuotientVerticalVector::new(d.base(tol)?, d.pivots().to_vec(), values, kind, tol);
        }
    }
}

fn nonzero(rng: &mut SampleRng, mut draw: impl FnMut(&mut SampleRng) -> Tensor3) -> Tensor3 {
    loop {
        let t = draw(rng);
        if t.max_abs() > 0.0 {
            return t;
        }
    }
}

// ------------------------------------------------------------ group axioms

fn principal_associativity(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let m = ctx.m();
    let (p1, p2, p3) = (s::principal(rng, m), s::principal(rng, m), s::principal(rng, m));
    let left = ctx.compose(&ctx.compose(&p1, &p2)?, &p3)?;
    let right = ctx.compose(&p1, &ctx.compose(&p2, &p3)?)?;
    Ok(ctx.within(left.rel_diff(&right)))
}

fn principal_identity(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::principal(rng, ctx.m());
    let e = identity_p(ctx.m());
    let err = ctx.compose(&p, &e)?.rel_diff(&p).max(ctx.compose(&e, &p)?.rel_diff(&p));
    Ok(ctx.within(err))
}

fn principal_inverse(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::principal(rng, ctx.m());
    let q = inverse_p(&p)?;
    let e = identity_p(ctx.m());
    let err = ctx
        .compose(&p, &q)?
        .rel_diff(&e)
        .max(ctx.compose(&q, &p)?.rel_diff(&e))
        .max(inverse_p(&q)?.rel_diff(&p));
    Ok(ctx.within(err))
}

fn linear_group_laws(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let m = ctx.m();
    let (g1, g2, g3) = (
        s::group_element(rng, m),
        s::group_element(rng, m),
        s::group_element(rng, m),
    );
    let e = JetGroupElement::identity(m);
    let assoc = compose_l(&compose_l(&g1, &g2)?, &g3)?.rel_diff(&compose_l(&g1, &compose_l(&g2, &g3)?)?);
    let unit = compose_l(&g1, &e)?.rel_diff(&g1).max(compose_l(&e, &g1)?.rel_diff(&g1));
    let inv = compose_l(&g1, &inverse_l(&g1)?)?.rel_diff(&e);
    Ok(ctx.within(assoc.max(unit).max(inv)))
}

fn projections_are_homomorphisms(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let (p1, p2) = (s::principal(rng, ctx.m()), s::principal(rng, ctx.m()));
    let p = ctx.compose(&p1, &p2)?;
    let err = lambda_p(&p)
        .rel_diff(&compose_l(&lambda_p(&p1), &lambda_p(&p2))?)
        .max(mu_p(&p).rel_diff(&compose_l(&mu_p(&p1), &mu_p(&p2))?));
    Ok(ctx.within(err))
}

fn subgroup_closure(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let m = ctx.m();
    let tol = ctx.tol;
    type Draw = fn(&mut SampleRng, usize) -> PrincipalJetElement;
    type Member = fn(&PrincipalJetElement, f64) -> bool;
    let families: [(Draw, Member); 3] = [
        (s::semiholonomic_principal, is_semiholonomic_p),
        (s::holonomic_principal, is_holonomic_p),
        (s::curvature_principal, is_curvature_p),
    ];
    let mut ok = true;
    for (draw, member) in families {
        let (p1, p2) = (draw(rng, m), draw(rng, m));
        ok &= member(&p1, tol) && member(&p2, tol);
        ok &= member(&ctx.compose(&p1, &p2)?, tol) && member(&inverse_p(&p1)?, tol);
    }
    Ok(Outcome::holds(ok))
}

fn symmetrization_homomorphism(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let (p1, p2) = (
        s::semiholonomic_principal(rng, ctx.m()),
        s::semiholonomic_principal(rng, ctx.m()),
    );
    let tol = ctx.tol;
    let lhs = symmetrize_p(&ctx.compose(&p1, &p2)?, tol)?;
    let rhs = ctx.compose(&symmetrize_p(&p1, tol)?, &symmetrize_p(&p2, tol)?)?;
    let sym1 = symmetrize_p(&p1, tol)?;
    let err = lhs.rel_diff(&rhs).max(symmetrize_p(&sym1, tol)?.rel_diff(&sym1));
    Ok(ctx.within(err).and(Outcome::holds(is_holonomic_p(&sym1, tol))))
}

fn semiholonomic_factorization(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::semiholonomic_principal(rng, ctx.m());
    let (h, c) = factor_semiholonomic(&p, ctx.tol)?;
    let shape =
        is_holonomic_p(&h, ctx.tol) && is_curvature_p(&c, ctx.tol) && c.aphi() == &DMatrix::identity(ctx.m(), ctx.m());
    Ok(ctx.within(ctx.compose(&h, &c)?.rel_diff(&p)).and(Outcome::holds(shape)))
}

fn principal_factorization(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::principal(rng, ctx.m());
    let (t, l) = factor_p(&p)?;
    let shape = t.aphi() == &DMatrix::identity(ctx.m(), ctx.m()) && l.aphi() == l.asigma() && l.b().max_abs() == 0.0;
    Ok(ctx.within(ctx.compose(&t, &l)?.rel_diff(&p)).and(Outcome::holds(shape)))
}

fn embedding_homomorphism(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let (g1, g2) = (s::group_element(rng, ctx.m()), s::group_element(rng, ctx.m()));
    let err = embed_l(&compose_l(&g1, &g2)?).rel_diff(&ctx.compose(&embed_l(&g1), &embed_l(&g2))?);
    let e = embed_l(&g1);
    let sections = lambda_p(&e) == g1 && mu_p(&e) == g1 && is_holonomic_p(&e, ctx.tol);
    Ok(ctx.within(err).and(Outcome::holds(sections)))
}

fn second_order_identification(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let (q1, q2) = (s::second_order(rng, ctx.m()), s::second_order(rng, ctx.m()));
    let roundtrip = to_second_order(&from_second_order(&q1), ctx.tol)? == q1;
    let product = ctx.compose(&from_second_order(&q1), &from_second_order(&q2))?;
    Ok(Outcome::holds(roundtrip && is_holonomic_p(&product, ctx.tol)))
}

fn chi_roundtrip(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::principal(rng, ctx.m());
    Ok(Outcome::holds(from_chi(&to_chi(&p))? == p))
}

// ----------------------------------------------------------------- exchange

fn exchange_involution(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    Ok(Outcome::holds(exchange(&exchange(&dv)) == dv))
}

fn exchange_swaps_projections(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    let e = exchange(&dv);
    Ok(Outcome::holds(
        inner_projection(&e) == outer_projection(&dv) && outer_projection(&e) == inner_projection(&dv),
    ))
}

fn holonomic_iff_exchange_fixed(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = match rng.random_range(0..3) {
        0 => s::holonomic_double(rng, ctx.dims),
        1 => s::semiholonomic_double(rng, ctx.dims),
        _ => s::unconstrained_double(rng, ctx.dims),
    };
    let fixed = exchange(&dv).rel_diff(&dv) <= ctx.tol;
    Ok(Outcome::holds(is_holonomic(&dv, ctx.tol) == fixed))
}

fn regularity_duality(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    let e = exchange(&dv);
    Ok(Outcome::holds(
        is_inner_regular(&dv, ctx.tol) == is_tau_regular(&e, ctx.tol)
            && is_tau_regular(&dv, ctx.tol) == is_inner_regular(&e, ctx.tol),
    ))
}

fn principal_exchange_involution(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let p = s::principal(rng, ctx.m());
    let e = exchange_p(&p);
    Ok(Outcome::holds(
        exchange_p(&e) == p && lambda_p(&e) == mu_p(&p) && mu_p(&e) == lambda_p(&p),
    ))
}

fn principal_exchange_homomorphism(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let (p1, p2) = (
        s::semiholonomic_principal(rng, ctx.m()),
        s::semiholonomic_principal(rng, ctx.m()),
    );
    let lhs = exchange_p(&ctx.compose(&p1, &p2)?);
    let rhs = ctx.compose(&exchange_p(&p1), &exchange_p(&p2))?;
    Ok(ctx.within(lhs.rel_diff(&rhs)))
}

fn exchange_intertwines_action(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::semiholonomic_double(rng, ctx.dims);
    let p = s::principal(rng, ctx.m());
    let lhs = exchange(&act_p_double(&dv, &p)?);
    let rhs = act_p_double(&exchange(&dv), &exchange_p(&p))?;
    Ok(ctx.within(lhs.rel_diff(&rhs)))
}

fn semiholonomic_split(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::semiholonomic_double(rng, ctx.dims);
    let (h, k) = split_semiholonomic(&dv, ctx.tol)?;
    let shape = is_holonomic(&h, ctx.tol) && k.fibre().skew_defect() <= ctx.tol;
    Ok(ctx
        .within(affine_add_vertical(&h, &k, ctx.tol)?.rel_diff(&dv))
        .and(Outcome::holds(shape)))
}

fn prolongation_is_exchange_fixed(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let g = s::poly_map(rng, ctx.m(), ctx.dims.n);
    let dv = prolong(&g)?;
    Ok(Outcome::holds(is_holonomic(&dv, ctx.tol) && exchange(&dv) == dv))
}

fn argument_swap_matches_exchange(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    let swapped = double_jet_of(&to_bipoly(&dv).swap_arguments())?;
    Ok(ctx.within(swapped.rel_diff(&exchange(&dv))))
}

// ------------------------------------------------------------------ actions

fn velocity_action_law(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let v = s::velocity(rng, ctx.dims);
    let (g1, g2) = (s::group_element(rng, ctx.m()), s::group_element(rng, ctx.m()));
    let stepwise = act_l_velocity(&act_l_velocity(&v, &g1)?, &g2)?;
    let direct = act_l_velocity(&v, &compose_l(&g1, &g2)?)?;
    let unit = act_l_velocity(&v, &JetGroupElement::identity(ctx.m()))? == v;
    Ok(ctx.within(stepwise.rel_diff(&direct)).and(Outcome::holds(unit)))
}

fn double_action_law(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    let (p1, p2) = (s::principal(rng, ctx.m()), s::principal(rng, ctx.m()));
    let stepwise = act_p_double(&act_p_double(&dv, &p1)?, &p2)?;
    let direct = act_p_double(&dv, &ctx.compose(&p1, &p2)?)?;
    let unit = act_p_double(&dv, &identity_p(ctx.m()))? == dv;
    Ok(ctx.within(stepwise.rel_diff(&direct)).and(Outcome::holds(unit)))
}

fn vertical_preserved(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::vertical_double(rng, ctx.dims);
    let p = s::semiholonomic_principal(rng, ctx.m());
    let image = act_p_double(&dv, &p)?;
    Ok(Outcome::holds(
        is_vertical(&image, ctx.tol)
            && inner_projection(&image).rel_diff(&act_l_velocity(&inner_projection(&dv), &lambda_p(&p))?) <= ctx.tol,
    ))
}

fn symmetric_vertical_preserved(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dims = ctx.dims;
    let dv = s::vertical_with(rng, dims, |r| s::sym_tensor(r, dims.n, dims.m));
    let image = act_p_double(&dv, &s::holonomic_principal(rng, dims.m))?;
    Ok(Outcome::holds(
        is_vertical(&image, ctx.tol) && image.mixed().symmetry_defect() <= ctx.tol,
    ))
}

fn skew_vertical_preserved(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dims = ctx.dims;
    let dv = s::vertical_with(rng, dims, |r| s::skew_tensor(r, dims.n, dims.m));
    let image = act_p_double(&dv, &s::curvature_principal(rng, dims.m))?;
    Ok(Outcome::holds(
        is_vertical(&image, ctx.tol) && image.mixed().skew_defect() <= ctx.tol,
    ))
}

fn regularity_is_invariant(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = inner_regular_mix(rng, ctx.dims);
    let image = act_p_double(&dv, &s::principal(rng, ctx.m()))?;
    let tol = ctx.tol;
    Ok(Outcome::holds(
        is_tau_regular(&dv, tol) == is_tau_regular(&image, tol)
            && is_inner_regular(&image, tol)
            && is_rho_regular(&dv, tol)? == is_rho_regular(&image, tol)?,
    ))
}

fn contact_element_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let v = s::velocity(rng, ctx.dims);
    let g = s::group_element(rng, ctx.m());
    let moved = act_l_velocity(&v, &g)?;
    Ok(Outcome::holds(contact_equal(
        &contact_of(&v, ctx.tol)?,
        &contact_of(&moved, ctx.tol)?,
        ctx.tol,
    )))
}

// ----------------------------------------------------------------- freeness

fn free_on_rho_regular(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = rho_regular(rng, ctx.dims, ctx.tol)?;
    let p = non_identity(rng, ctx.m());
    let moved = act_p_double(&dv, &p)?.rel_diff(&dv) > ctx.tol;
    let stabilizer = match find_pivot_set(&[dv.inner(), dv.outer()], ctx.tol) {
        Some(pv) => solve_transporter(&dv, &dv, &pv, ctx.tol)?.map(|q| q.rel_diff(&identity_p(ctx.m()))),
        None => Some(0.0),
    };
    let stab = stabilizer.map_or(Outcome::failed(), |e| ctx.within(e));
    Ok(Outcome::holds(moved).and(stab))
}

fn semiholonomic_free_on_inner_regular(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = inner_regular_mix(rng, ctx.dims);
    let p = s::away_from_identity(rng, |r| s::semiholonomic_principal(r, ctx.m()));
    Ok(Outcome::holds(act_p_double(&dv, &p)?.rel_diff(&dv) > ctx.tol))
}

fn transporter_recovers_element(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::double(rng, ctx.dims);
    let p = s::principal(rng, ctx.m());
    let target = act_p_double(&dv, &p)?;
    let pivots = find_pivot_set(&[dv.inner(), dv.outer()], ctx.tol)
        .ok_or_else(|| JetError::Chart("sampled double velocity has no admissible chart".into()))?;
    Ok(match solve_transporter(&dv, &target, &pivots, ctx.tol)? {
        Some(q) => ctx.within(q.rel_diff(&p)),
        None => Outcome::failed(),
    })
}

fn transporter_rejects_other_orbits(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::double(rng, ctx.dims);
    let p = s::principal(rng, ctx.m());
    let target = act_p_double(&dv, &p)?;
    let pivots = find_pivot_set(&[dv.inner(), dv.outer()], ctx.tol)
        .ok_or_else(|| JetError::Chart("sampled double velocity has no admissible chart".into()))?;
    let others = numeric::complement(&pivots, ctx.dims.n);
    let row = others[rng.random_range(0..others.len())];
    let col = rng.random_range(0..ctx.m());
    let mut inner = target.inner().clone();
    inner[(row, col)] += 1.0;
    let off_orbit = DoubleVelocity::new(
        target.point().clone(),
        inner,
        target.outer().clone(),
        target.mixed().clone(),
    )?;
    Ok(Outcome::holds(
        solve_transporter(&dv, &off_orbit, &pivots, ctx.tol)?.is_none(),
    ))
}

// ----------------------------------------------------- subgroup structure

fn semiholonomic_subgroup_preserves(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::semiholonomic_double(rng, ctx.dims);
    let image = act_p_double(&dv, &s::semiholonomic_principal(rng, ctx.m()))?;
    Ok(Outcome::holds(is_semiholonomic(&image, ctx.tol)))
}

fn semiholonomic_subgroup_exact(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::semiholonomic_double(rng, ctx.dims);
    let image = act_p_double(&dv, &non_semiholonomic(rng, ctx.m()))?;
    Ok(Outcome::holds(!is_semiholonomic(&image, ctx.tol)))
}

fn holonomic_subgroup_preserves(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::holonomic_double(rng, ctx.dims);
    let image = act_p_double(&dv, &s::holonomic_principal(rng, ctx.m()))?;
    Ok(Outcome::holds(is_holonomic(&image, ctx.tol)))
}

fn holonomic_subgroup_exact(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::holonomic_double(rng, ctx.dims);
    let p = if ctx.m() >= 2 && rng.random_bool(0.5) {
        non_holonomic_semiholonomic(rng, ctx.m())
    } else {
        non_semiholonomic(rng, ctx.m())
    };
    let image = act_p_double(&dv, &p)?;
    Ok(Outcome::holds(!is_holonomic(&image, ctx.tol)))
}

// ------------------------------------------------------ quotient invariance

fn double_contact_orbit_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::double(rng, ctx.dims);
    let p = s::principal(rng, ctx.m());
    let d0 = double_contact_of(&dv, ctx.tol)?;
    let d1 = double_contact_of(&act_p_double(&dv, &p)?, ctx.tol)?;
    Ok(ctx.within(d0.rel_diff(&d1)))
}

fn canonical_form_idempotent(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::double(rng, ctx.dims);
    let d = double_contact_of(&dv, ctx.tol)?;
    let again = double_contact_of(&d.representative(), ctx.tol)?;
    Ok(ctx.within(d.rel_diff(&again)))
}

fn vertical_quotient_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::vertical_double(rng, ctx.dims);
    let p = s::semiholonomic_principal(rng, ctx.m());
    let q0 = vertical_quotient(&dv, ctx.tol)?;
    let q1 = vertical_quotient(&act_p_double(&dv, &p)?, ctx.tol)?;
    Ok(ctx.within(q0.rel_diff(&q1)))
}

fn symmetric_quotient_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dims = ctx.dims;
    let dv = s::vertical_with(rng, dims, |r| nonzero(r, |r| s::sym_tensor(r, dims.n, dims.m)));
    let p = s::holonomic_principal(rng, dims.m);
    let q0 = vertical_quotient(&dv, ctx.tol)?;
    let q1 = vertical_quotient(&act_p_double(&dv, &p)?, ctx.tol)?;
    let kinds = q0.kind() == VerticalKind::Sym && q1.kind() == VerticalKind::Sym;
    Ok(ctx.within(q0.rel_diff(&q1)).and(Outcome::holds(kinds)))
}

fn skew_quotient_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dims = ctx.dims;
    let dv = if dims.m == 1 {
        s::vertical_with(rng, dims, |r| s::skew_tensor(r, dims.n, dims.m))
    } else {
        s::vertical_with(rng, dims, |r| nonzero(r, |r| s::skew_tensor(r, dims.n, dims.m)))
    };
    let p = s::curvature_principal(rng, dims.m);
    let q0 = vertical_quotient(&dv, ctx.tol)?;
    let q1 = vertical_quotient(&act_p_double(&dv, &p)?, ctx.tol)?;
    // for m = 1 the skew part vanishes identically
    let kinds = dims.m == 1 || (q0.kind() == VerticalKind::Alt && q1.kind() == VerticalKind::Alt);
    Ok(ctx.within(q0.rel_diff(&q1)).and(Outcome::holds(kinds)))
}

fn quotient_formula_matches_transporter(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::vertical_double(rng, ctx.dims);
    let a = vertical_quotient(&dv, ctx.tol)?;
    let b = vertical_quotient_by_transporter(&dv, ctx.tol)?;
    Ok(ctx.within(a.rel_diff(&b)))
}

/// Shifting the mixed part along an orbit direction `u_I · B` leaves the
/// quotient unchanged.
fn quotient_kills_orbit_directions(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::vertical_double(rng, ctx.dims);
    let m = ctx.m();
    let shift = Tensor3::left_mul(dv.inner(), &s::tensor(rng, m, m, m));
    let shifted = DoubleVelocity::new(
        dv.point().clone(),
        dv.inner().clone(),
        dv.outer().clone(),
        dv.mixed().add(&shift),
    )?;
    let q0 = vertical_quotient(&dv, ctx.tol)?;
    let q1 = vertical_quotient(&shifted, ctx.tol)?;
    Ok(ctx.within(q0.values().rel_diff(q1.values())))
}

fn quotient_split(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::vertical_double(rng, ctx.dims);
    let part = |w: Tensor3| DoubleVelocity::new(dv.point().clone(), dv.inner().clone(), dv.outer().clone(), w);
    let (qs, qa) = split_quotient(&vertical_quotient(&dv, ctx.tol)?);
    let sym = vertical_quotient(&part(dv.mixed().sym_last())?, ctx.tol)?;
    let alt = vertical_quotient(&part(dv.mixed().alt_last())?, ctx.tol)?;
    let err = qs
        .values()
        .rel_diff(sym.values())
        .max(qa.values().rel_diff(alt.values()));
    Ok(ctx.within(err))
}

/// Symmetric and skew mixed parts give symmetric and skew quotient vectors.
fn quotient_preserves_symmetry_type(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dims = ctx.dims;
    let sym = s::vertical_with(rng, dims, |r| nonzero(r, |r| s::sym_tensor(r, dims.n, dims.m)));
    let qs = vertical_quotient(&sym, ctx.tol)?;
    let mut ok = qs.kind() == VerticalKind::Sym && qs.values().symmetry_defect() <= ctx.tol;
    if dims.m >= 2 {
        let alt = s::vertical_with(rng, dims, |r| nonzero(r, |r| s::skew_tensor(r, dims.n, dims.m)));
        let qa = vertical_quotient(&alt, ctx.tol)?;
        ok &= qa.kind() == VerticalKind::Alt && qa.values().skew_defect() <= ctx.tol;
    }
    Ok(Outcome::holds(ok))
}

fn semiholonomic_contact_invariance(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let p = s::principal(rng, ctx.m());
    let d = double_contact_of(&act_p_double(&dv, &p)?, ctx.tol)?;
    Ok(Outcome::holds(is_semiholonomic_contact(&d, ctx.tol)))
}

// ------------------------------------------------------------ decomposition

fn decomposition_recomposes(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let d = double_contact_of(&act_p_double(&dv, &s::principal(rng, ctx.m()))?, ctx.tol)?;
    let (h, k) = decompose_contact(&d, ctx.tol)?;
    let shape = is_holonomic_contact(&h, ctx.tol) && k.values().skew_defect() <= ctx.tol;
    Ok(ctx
        .within(affine_add_contact(&h, &k, ctx.tol)?.rel_diff(&d))
        .and(Outcome::holds(shape)))
}

fn decomposition_matches_velocity_split(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let (hv, kv) = split_semiholonomic(&dv, ctx.tol)?;
    let (h, k) = decompose_contact(&double_contact_of(&dv, ctx.tol)?, ctx.tol)?;
    let h_ref = double_contact_of(&hv, ctx.tol)?;
    let k_ref = vertical_quotient(&kv.to_double_velocity(), ctx.tol)?;
    Ok(ctx.within(h.rel_diff(&h_ref).max(k.values().rel_diff(k_ref.values()))))
}

fn decomposition_representative_independent(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let moved = act_p_double(&dv, &s::semiholonomic_principal(rng, ctx.m()))?;
    let (h0, k0) = decompose_contact(&double_contact_of(&dv, ctx.tol)?, ctx.tol)?;
    let (h1, k1) = decompose_contact(&double_contact_of(&moved, ctx.tol)?, ctx.tol)?;
    Ok(ctx.within(h0.rel_diff(&h1).max(k0.rel_diff(&k1))))
}

fn semiholonomic_orbit_characterization(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    if rng.random_bool(0.5) {
        let dv = admissible_semiholonomic(rng, ctx.dims, false);
        let d = double_contact_of(&act_p_double(&dv, &s::principal(rng, ctx.m()))?, ctx.tol)?;
        return Ok(Outcome::holds(is_semiholonomic_contact(&d, ctx.tol)));
    }
    // inner and outer spans differ, so no representative is semiholonomic
    loop {
        let dv = s::double(rng, ctx.dims);
        let ci = contact_of(&inner_projection(&dv), ctx.tol)?;
        let co = contact_of(&outer_projection(&dv), ctx.tol)?;
        if !contact_equal(&ci, &co, ctx.tol) {
            let d = double_contact_of(&dv, ctx.tol)?;
            return Ok(Outcome::holds(!is_semiholonomic_contact(&d, ctx.tol)));
        }
    }
}

fn holonomic_orbit_characterization(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    if ctx.m() == 1 || rng.random_bool(0.5) {
        let dv = admissible_semiholonomic(rng, ctx.dims, true);
        let d = double_contact_of(&act_p_double(&dv, &s::principal(rng, ctx.m()))?, ctx.tol)?;
        return Ok(Outcome::holds(is_holonomic_contact(&d, ctx.tol)));
    }
    // a curvature part that survives the quotient rules out holonomic
    // representatives
    loop {
        let dv = admissible_semiholonomic(rng, ctx.dims, false);
        let (_, k) = split_semiholonomic(&dv, ctx.tol)?;
        if vertical_quotient(&k.to_double_velocity(), ctx.tol)?.values().max_abs() < 0.1 {
            continue;
        }
        let d = double_contact_of(&act_p_double(&dv, &s::principal(rng, ctx.m()))?, ctx.tol)?;
        return Ok(Outcome::holds(
            is_semiholonomic_contact(&d, ctx.tol) && !is_holonomic_contact(&d, ctx.tol),
        ));
    }
}

fn affine_action_free(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let d = double_contact_of(&dv, ctx.tol)?;
    let q = random_quotient(rng, &d, VerticalKind::General, ctx.tol)?;
    let zero = QuotientVerticalVector::zero(d.base(ctx.tol)?, d.pivots().to_vec())?;
    let moved = affine_add_contact(&d, &q, ctx.tol)?.rel_diff(&d) > ctx.tol;
    let fixed = affine_add_contact(&d, &zero, ctx.tol)? == d;
    Ok(Outcome::holds(moved && fixed))
}

fn affine_action_additive(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, false);
    let d = double_contact_of(&dv, ctx.tol)?;
    let q1 = random_quotient(rng, &d, VerticalKind::General, ctx.tol)?;
    let q2 = random_quotient(rng, &d, VerticalKind::General, ctx.tol)?;
    let stepwise = affine_add_contact(&affine_add_contact(&d, &q1, ctx.tol)?, &q2, ctx.tol)?;
    let direct = affine_add_contact(&d, &q1.add(&q2, ctx.tol)?, ctx.tol)?;
    Ok(ctx.within(stepwise.rel_diff(&direct)))
}

fn symmetric_shift_keeps_holonomic(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = admissible_semiholonomic(rng, ctx.dims, true);
    let d = double_contact_of(&dv, ctx.tol)?;
    let sym = random_quotient(rng, &d, VerticalKind::Sym, ctx.tol)?;
    let mut ok = is_holonomic_contact(&affine_add_contact(&d, &sym, ctx.tol)?, ctx.tol);
    if ctx.m() >= 2 {
        let alt = random_quotient(rng, &d, VerticalKind::Alt, ctx.tol)?;
        ok &= !is_holonomic_contact(&affine_add_contact(&d, &alt, ctx.tol)?, ctx.tol);
    }
    Ok(Outcome::holds(ok))
}

// -------------------------------------------------------------- oracle

fn double_action_matches_oracle(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    let p = s::principal(rng, ctx.m());
    let oracle = double_jet_of(&act_oracle(&to_bipoly(&dv), &p)?)?;
    Ok(ctx.within(oracle.rel_diff(&act_p_double(&dv, &p)?)))
}

fn oracle_composition_consistency(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let x = to_bipoly(&s::unconstrained_double(rng, ctx.dims));
    let (p1, p2) = (s::principal(rng, ctx.m()), s::principal(rng, ctx.m()));
    let stepwise = double_jet_of(&act_oracle(&act_oracle(&x, &p1)?, &p2)?)?;
    let direct = double_jet_of(&act_oracle(&x, &ctx.compose(&p1, &p2)?)?)?;
    Ok(ctx.within(stepwise.rel_diff(&direct)))
}

fn velocity_action_matches_oracle(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let m = ctx.m();
    let gamma = s::poly_map(rng, m, ctx.dims.n);
    let g = s::group_element(rng, m);
    let linear = PolyMap::new(
        nalgebra::DVector::zeros(m),
        g.matrix().clone(),
        Tensor3::zeros(m, m, m),
        ctx.tol,
    )?;
    let oracle = jet_of(&compose_truncated(&gamma, &linear)?)?;
    Ok(ctx.within(oracle.rel_diff(&act_l_velocity(&jet_of(&gamma)?, &g)?)))
}

fn second_order_transport(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let m = ctx.m();
    let (q1, q2) = (s::second_order(rng, m), s::second_order(rng, m));
    let as_map = |q: &crate::group::SecondOrderJetElement| {
        PolyMap::new(
            nalgebra::DVector::zeros(m),
            q.linear().clone(),
            q.second().clone(),
            ctx.tol,
        )
    };
    let f = compose_second_order(&as_map(&q1)?, &as_map(&q2)?)?;
    let product = to_second_order(&ctx.compose(&from_second_order(&q1), &from_second_order(&q2))?, ctx.tol)?;
    let err = numeric::mat_rel_diff(&f.c1, product.linear()).max(f.c2.rel_diff(product.second()));
    Ok(ctx.within(err))
}

fn prolongation_matches_make_holonomic(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let g = s::poly_map(rng, ctx.m(), ctx.dims.n);
    let reference = make_holonomic(g.c0.clone(), g.c1.clone(), g.c2.clone(), ctx.tol)?;
    Ok(ctx.within(prolong(&g)?.rel_diff(&reference)))
}

fn double_jet_roundtrip(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = s::unconstrained_double(rng, ctx.dims);
    Ok(Outcome::holds(double_jet_of(&to_bipoly(&dv))? == dv))
}

/// Finite-difference step and rank tolerance for the `ρ`-regularity
/// oracle.
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-6;

fn rho_matches_finite_differences(ctx: &Ctx, rng: &mut SampleRng) -> Result<Outcome> {
    let dv = inner_regular_mix(rng, ctx.dims);
    let exact = is_rho_regular(&dv, ctx.tol)?;
    let fd = rho_regular_fd(&dv, FD_STEP, FD_TOL)?;
    // decisions inside the band between the two tolerances are not compared
    let pivots = numeric::pivot_rows(dv.inner(), ctx.tol);
    let sv = numeric::singular_values(&rho_stack(&dv, &pivots)?)
        .ok_or_else(|| JetError::Invalid("singular values did not converge".into()))?;
    let scale = sv.max().max(1.0);
    let smin = sv.min();
    let decided = smin > 10.0 * FD_TOL * scale || smin < 0.1 * FD_TOL * scale;
    Ok(Outcome::holds(!decided || exact == fd))
}

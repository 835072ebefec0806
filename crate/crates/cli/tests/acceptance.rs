//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every criterion runs at m ∈ {1, 2, 3}, n = m + 2, 1000 trials per
//! property, seed 42, tolerance 1e-9.

use std::process::{Command, ExitCode, Output};

use jets_core::action::act_p_double;
use jets_core::contact::{double_contact_of, vertical_quotient, vertical_quotient_by_transporter};
use jets_core::group::{compose_p, from_second_order, PrincipalJetElement, SecondOrderJetElement};
use jets_core::oracle::{act_oracle, compose_second_order, double_jet_of, to_bipoly, PolyMap};
use jets_core::velocity::DoubleVelocity;
use jets_core::verify::{self, Report, Suite, VerifyConfig};
use jets_core::Tensor3;
use nalgebra::{DMatrix, DVector};

const TOL: f64 = 1e-9;
const TRIALS: usize = 1000;
const SEED: u64 = 42;
const DIMS: [usize; 3] = [1, 2, 3];

type Check = Result<String, String>;

struct Criterion {
    title: &'static str,
    properties: &'static [&'static str],
    /// Properties whose error must be exactly zero.
    exact: bool,
    extra: Option<fn() -> Check>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        title: "principal jet group axioms",
        properties: &["principal_associativity", "principal_identity", "principal_inverse"],
        exact: false,
        extra: None,
    },
    Criterion {
        title: "exchange laws",
        properties: &[
            "exchange_involution",
            "principal_exchange_involution",
            "exchange_swaps_projections",
        ],
        exact: true,
        extra: None,
    },
    Criterion {
        title: "action correctness",
        properties: &[
            "double_action_law",
            "double_action_matches_oracle",
            "oracle_composition_consistency",
        ],
        exact: false,
        extra: Some(worked_action),
    },
    Criterion {
        title: "freeness",
        properties: &["free_on_rho_regular", "semiholonomic_free_on_inner_regular"],
        exact: false,
        extra: None,
    },
    Criterion {
        title: "subgroup characterization",
        properties: &[
            "semiholonomic_subgroup_preserves",
            "semiholonomic_subgroup_exact",
            "holonomic_subgroup_preserves",
            "holonomic_subgroup_exact",
        ],
        exact: false,
        extra: None,
    },
    Criterion {
        title: "vertical quotient invariance",
        properties: &[
            "vertical_quotient_invariance",
            "symmetric_quotient_invariance",
            "skew_quotient_invariance",
            "quotient_formula_matches_transporter",
        ],
        exact: false,
        extra: Some(worked_quotient),
    },
    Criterion {
        title: "split exact sequence",
        properties: &["quotient_preserves_symmetry_type", "quotient_split"],
        exact: false,
        extra: None,
    },
    Criterion {
        title: "double contact elements and decomposition",
        properties: &[
            "double_contact_orbit_invariance",
            "semiholonomic_orbit_characterization",
            "holonomic_orbit_characterization",
            "decomposition_representative_independent",
            "decomposition_recomposes",
        ],
        exact: false,
        extra: Some(worked_canonical_form),
    },
    Criterion {
        title: "second-order jet group identification",
        properties: &["second_order_transport"],
        exact: false,
        extra: Some(worked_second_order),
    },
];

fn scalar_p(aphi: f64, asigma: f64, b: f64) -> PrincipalJetElement {
    PrincipalJetElement::new(
        DMatrix::from_element(1, 1, aphi),
        DMatrix::from_element(1, 1, asigma),
        Tensor3::from_fn(1, 1, 1, |_, _, _| b),
    )
    .expect("nonzero scalars")
}

fn scalar_dv(ui: [f64; 2], uo: [f64; 2], w: [f64; 2]) -> DoubleVelocity {
    DoubleVelocity::new(
        DVector::zeros(2),
        DMatrix::from_column_slice(2, 1, &ui),
        DMatrix::from_column_slice(2, 1, &uo),
        Tensor3::from_fn(2, 1, 1, |a, _, _| w[a]),
    )
    .expect("shapes agree")
}

fn worked_action() -> Check {
    let dv = scalar_dv([1.0, 2.0], [3.0, 4.0], [5.0, 6.0]);
    let p = scalar_p(2.0, 3.0, 7.0);
    let out = act_p_double(&dv, &p).map_err(|e| e.to_string())?;
    let oracle =
        double_jet_of(&act_oracle(&to_bipoly(&dv), &p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let got = (
        out.inner().as_slice().to_vec(),
        out.outer().as_slice().to_vec(),
        out.mixed().as_slice().to_vec(),
    );
    if got != (vec![3.0, 6.0], vec![6.0, 8.0], vec![37.0, 50.0]) || oracle.rel_diff(&out) > TOL {
        return Err(format!("m=1 worked action gave {got:?}"));
    }
    Ok("m=1 action (37, 50)".into())
}

fn worked_quotient() -> Check {
    let dv = scalar_dv([2.0, 3.0], [0.0, 0.0], [4.0, 10.0]);
    let q = vertical_quotient(&dv, TOL).map_err(|e| e.to_string())?;
    let t = vertical_quotient_by_transporter(&dv, TOL).map_err(|e| e.to_string())?;
    let v = q.values()[(0, 0, 0)];
    if (v - 1.0).abs() > TOL || q.rel_diff(&t) > TOL {
        return Err(format!("m=1 quotient value {v}"));
    }
    Ok("m=1 quotient 1.0".into())
}

fn worked_canonical_form() -> Check {
    let dv = scalar_dv([2.0, 3.0], [4.0, 6.0], [8.0, 14.0]);
    let d = double_contact_of(&dv, TOL).map_err(|e| e.to_string())?;
    let (x, y, z) = (d.x()[(0, 0)], d.y()[(0, 0)], d.z()[(0, 0, 0)]);
    if (x - 1.5).abs() > TOL || (y - 1.5).abs() > TOL || (z - 0.25).abs() > TOL {
        return Err(format!("m=1 canonical form gave X={x}, Y={y}, Z={z}"));
    }
    Ok("m=1 canonical form (1.5, 1.5, 0.25)".into())
}

fn worked_second_order() -> Check {
    let q1 = SecondOrderJetElement::new(
        DMatrix::from_element(1, 1, 2.0),
        Tensor3::from_fn(1, 1, 1, |_, _, _| 6.0),
        TOL,
    )
    .map_err(|e| e.to_string())?;
    let q2 = SecondOrderJetElement::new(
        DMatrix::from_element(1, 1, 3.0),
        Tensor3::from_fn(1, 1, 1, |_, _, _| 4.0),
        TOL,
    )
    .map_err(|e| e.to_string())?;
    let product = compose_p(&from_second_order(&q1), &from_second_order(&q2)).map_err(|e| e.to_string())?;
    let map = |a: f64, b: f64| {
        PolyMap::new(
            DVector::zeros(1),
            DMatrix::from_element(1, 1, a),
            Tensor3::from_fn(1, 1, 1, |_, _, _| b),
            TOL,
        )
    };
    let taylor = compose_second_order(
        &map(2.0, 6.0).map_err(|e| e.to_string())?,
        &map(3.0, 4.0).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let (group, oracle) = (product.b()[(0, 0, 0)], taylor.c2[(0, 0, 0)]);
    if group != 62.0 || oracle != 62.0 {
        return Err(format!("m=1 second-order composition gave {group} (oracle {oracle})"));
    }
    Ok("m=1 composition 62".into())
}

fn check_properties(c: &Criterion, reports: &[Report]) -> Check {
    let mut worst: f64 = 0.0;
    for r in reports {
        for name in c.properties {
            let p = r
                .properties
                .iter()
                .find(|p| p.name == *name)
                .ok_or_else(|| format!("property {name} did not run for m={}", r.m))?;
            if p.trials != TRIALS {
                return Err(format!("{name} ran {} trials for m={}", p.trials, r.m));
            }
            if p.failures > 0 {
                return Err(format!(
                    "{name}: {} of {} trials failed for m={} (first at {:?}, max error {:e})",
                    p.failures, p.trials, r.m, p.first_failure, p.max_error
                ));
            }
            if c.exact && p.max_error != 0.0 {
                return Err(format!("{name} is not exact for m={} (error {:e})", r.m, p.max_error));
            }
            worst = worst.max(p.max_error);
        }
    }
    Ok(format!(
        "{} properties x m=1..3 x {TRIALS} trials, max error {worst:.2e}",
        c.properties.len()
    ))
}

fn jets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jets"))
        .args(args)
        .output()
        .expect("jets binary runs")
}

fn cli_discipline(reports: &[Report]) -> Check {
    for r in reports {
        let m = r.m.to_string();
        let args = ["verify", "--suite", "all", "--m", &m, "--seed", "42"];
        let first = jets(&args);
        let second = jets(&args);
        if first.status.code() != Some(0) {
            return Err(format!("verify --m {m} exited with {:?}", first.status.code()));
        }
        if first.stdout != second.stdout {
            return Err(format!("verify --m {m} reports differ between runs"));
        }
        if first.stdout != format!("{}\n", r.to_json_string(false)).into_bytes() {
            return Err(format!("verify --m {m} report differs from the library report"));
        }
    }
    let faulty = jets(&[
        "verify",
        "--suite",
        "all",
        "--m",
        "2",
        "--seed",
        "42",
        "--inject-fault",
        "compose-p",
    ]);
    let stderr = String::from_utf8_lossy(&faulty.stderr);
    if faulty.status.code() != Some(1) || !stderr.contains("FAIL") {
        return Err(format!("injected fault exited with {:?}", faulty.status.code()));
    }
    let bad = jets(&["verify", "--suite", "nonsense", "--m", "2"]);
    if bad.status.code() != Some(2) {
        return Err(format!("configuration error exited with {:?}", bad.status.code()));
    }
    Ok("exit 0 with identical reports for m=1..3; injected fault exits 1; bad suite exits 2".into())
}

fn main() -> ExitCode {
    let reports: Vec<Report> = DIMS
        .iter()
        .map(|&m| {
            let config = VerifyConfig {
                trials: TRIALS,
                seed: SEED,
                tol: TOL,
                ..VerifyConfig::new(Suite::All, m, m + 2)
            };
            verify::run(&config).expect("valid configuration")
        })
        .collect();

    let mut failed = 0;
    let mut line = |index: usize, title: &str, result: Check| match result {
        Ok(detail) => println!("PASS  criterion {index:>2}  {title}: {detail}"),
        Err(reason) => {
            failed += 1;
            println!("FAIL  criterion {index:>2}  {title}: {reason}");
        }
    };
    for (i, c) in CRITERIA.iter().enumerate() {
        let mut result = check_properties(c, &reports);
        if let (Ok(summary), Some(extra)) = (&result, c.extra) {
            result = extra().map(|worked| format!("{summary}; {worked}"));
        }
        line(i + 1, c.title, result);
    }
    line(10, "CLI determinism and exit codes", cli_discipline(&reports));

    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}

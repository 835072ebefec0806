use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use jets_core::codec::{decode_stream, Value};
use jets_core::contact::{double_contact_equal, double_contact_of};
use jets_core::velocity::{is_holonomic, is_semiholonomic, is_vertical};

const TOL: f64 = 1e-9;

fn jets(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_jets"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("jets starts");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &str) -> String {
    let out = jets(args, stdin);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn values(text: &str) -> Vec<Value> {
    decode_stream(text).expect("output decodes")
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("jets-cli-{name}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.0.join(name);
        fs::write(&path, contents).unwrap();
        path.to_str().unwrap().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

#[test]
fn gen_is_deterministic_per_seed() {
    let args = ["gen", "--kind", "double", "--m", "2", "--seed", "9", "--count", "4"];
    let a = ok(&args, "");
    assert_eq!(a, ok(&args, ""));
    assert_eq!(a.lines().count(), 4);
    assert_ne!(
        a,
        ok(
            &["gen", "--kind", "double", "--m", "2", "--seed", "10", "--count", "4"],
            ""
        )
    );
}

#[test]
fn gen_kinds_satisfy_their_predicates() {
    for (kind, check) in [
        ("semiholonomic", is_semiholonomic as fn(&_, f64) -> bool),
        ("holonomic", is_holonomic),
        ("vertical", is_vertical),
    ] {
        for v in values(&ok(&["gen", "--kind", kind, "--m", "2", "--count", "20"], "")) {
            match v {
                Value::DoubleVelocity(dv) => assert!(check(&dv, TOL), "{kind}"),
                other => panic!("{kind} produced a {}", other.type_name()),
            }
        }
    }
}

#[test]
fn act_reproduces_scalar_example() {
    let dir = Scratch::new("act");
    let p = dir.file("p.json", r#"{"Aphi":[[2.0]],"Asigma":[[3.0]],"B":[[[7.0]]],"m":1}"#);
    let dv = r#"{"u":[0,0],"Ui":[[1],[2]],"Uo":[[3],[4]],"W":[[[5]],[[6]]],"m":1,"n":2}"#;
    let out = values(&ok(&["act", "-e", &p], dv));
    let Value::DoubleVelocity(out) = &out[0] else {
        panic!("not a double velocity")
    };
    assert_eq!(out.inner().as_slice(), &[3.0, 6.0]);
    assert_eq!(out.outer().as_slice(), &[6.0, 8.0]);
    assert_eq!(out.mixed().as_slice(), &[37.0, 50.0]);
}

#[test]
fn acting_twice_matches_acting_with_the_product() {
    let dir = Scratch::new("twice");
    let a = dir.file(
        "a.json",
        &ok(&["gen", "--kind", "principal", "--m", "2", "--seed", "1"], ""),
    );
    let b = dir.file(
        "b.json",
        &ok(&["gen", "--kind", "principal", "--m", "2", "--seed", "2"], ""),
    );
    let ab = dir.file("ab.json", &ok(&["compose", &a, &b], ""));
    let input = ok(
        &["gen", "--kind", "double", "--m", "2", "--seed", "3", "--count", "5"],
        "",
    );

    let stepwise = values(&ok(&["act", "-e", &b], &ok(&["act", "-e", &a], &input)));
    let direct = values(&ok(&["act", "-e", &ab], &input));
    for (s, d) in stepwise.iter().zip(&direct) {
        let (Value::DoubleVelocity(s), Value::DoubleVelocity(d)) = (s, d) else {
            panic!("wrong types")
        };
        assert!(s.rel_diff(d) <= TOL);
    }

    let inv = dir.file("inv.json", &ok(&["compose", "--invert", &ab], ""));
    let back = values(&ok(&["act", "-e", &inv], &ok(&["act", "-e", &ab], &input)));
    for (b, x) in back.iter().zip(values(&input)) {
        let (Value::DoubleVelocity(b), Value::DoubleVelocity(x)) = (b, &x) else {
            panic!("wrong types")
        };
        assert!(b.rel_diff(x) <= TOL);
    }
}

#[test]
fn canon_is_orbit_invariant_and_idempotent() {
    let dir = Scratch::new("canon");
    let p = dir.file(
        "p.json",
        &ok(&["gen", "--kind", "principal", "--m", "2", "--seed", "5"], ""),
    );
    let input = ok(
        &["gen", "--kind", "double", "--m", "2", "--seed", "6", "--count", "5"],
        "",
    );
    let c0 = ok(&["canon"], &input);
    let c1 = ok(&["canon"], &ok(&["act", "-e", &p], &input));
    let again = ok(&["canon"], &c0);
    for ((a, b), c) in values(&c0).iter().zip(values(&c1)).zip(values(&again)) {
        let (Value::DoubleContact(a), Value::DoubleContact(b), Value::DoubleContact(c)) = (a, &b, &c) else {
            panic!("wrong types")
        };
        assert!(double_contact_equal(a, b, TOL));
        assert!(a.rel_diff(c) <= TOL);
    }
}

#[test]
fn canon_reproduces_scalar_example() {
    let dv = r#"{"u":[0,0],"Ui":[[2],[3]],"Uo":[[4],[6]],"W":[[[8]],[[14]]],"m":1,"n":2}"#;
    let Value::DoubleContact(d) = &values(&ok(&["canon"], dv))[0] else {
        panic!("not a double contact element")
    };
    assert_eq!(d.pivots(), &[0]);
    assert!((d.x()[(0, 0)] - 1.5).abs() <= TOL);
    assert!((d.y()[(0, 0)] - 1.5).abs() <= TOL);
    assert!((d.z()[(0, 0, 0)] - 0.25).abs() <= TOL);

    let vertical = r#"{"K":[[[4]],[[10]]],"base":{"U":[[2],[3]],"m":1,"n":2,"u":[0,0]},"kind":"general"}"#;
    let Value::Quotient(q) = &values(&ok(&["canon"], vertical))[0] else {
        panic!("not a quotient")
    };
    assert!((q.values()[(0, 0, 0)] - 1.0).abs() <= TOL);
}

#[test]
fn decompose_check_passes_on_semiholonomic_input() {
    let input = ok(
        &[
            "gen",
            "--kind",
            "semiholonomic",
            "--m",
            "2",
            "--seed",
            "8",
            "--count",
            "5",
        ],
        "",
    );
    let parts = values(&ok(&["decompose", "--check"], &input));
    assert_eq!(parts.len(), 10);
    for pair in parts.chunks(2) {
        let Value::DoubleVelocity(h) = &pair[0] else {
            panic!("holonomic part missing")
        };
        assert!(is_holonomic(h, TOL));
        assert!(matches!(pair[1], Value::Vertical(_)));
    }

    let contacts = ok(&["canon"], &input);
    let parts = values(&ok(&["decompose", "--check"], &contacts));
    assert!(matches!(
        (&parts[0], &parts[1]),
        (Value::DoubleContact(_), Value::Quotient(_))
    ));
}

#[test]
fn exchange_twice_is_identity() {
    let input = ok(
        &["gen", "--kind", "double", "--m", "3", "--seed", "4", "--count", "3"],
        "",
    );
    assert_eq!(values(&ok(&["exchange"], &ok(&["exchange"], &input))), values(&input));
}

#[test]
fn bad_input_exits_with_code_two() {
    let cases: [(&[&str], &str); 7] = [
        (&["canon"], "not json"),
        (&["canon"], ""),
        (&["canon"], r#"{"Aphi":[[1.0]],"Asigma":[[1.0]],"B":[[[0.0]]],"m":1}"#),
        (
            &["decompose"],
            &ok(&["gen", "--kind", "double", "--m", "1", "--seed", "3"], ""),
        ),
        (&["gen", "--kind", "nope", "--m", "2"], ""),
        (&["gen", "--kind", "double", "--m", "3", "--n", "3"], ""),
        (&["exchange", "/nonexistent/input.json"], ""),
    ];
    for (args, stdin) in cases {
        let out = jets(args, stdin);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("jets: "), "{args:?}");
    }
    assert_eq!(jets(&["canon", "--tol", "-1"], "").status.code(), Some(2));
    assert_eq!(jets(&["frobnicate"], "").status.code(), Some(2));
}

#[test]
fn verify_reports_are_reproducible() {
    let args = [
        "verify", "--suite", "exchange", "--m", "2", "--trials", "50", "--seed", "3",
    ];
    let a = ok(&args, "");
    assert_eq!(a, ok(&args, ""));
    assert!(a.contains("\"failures\":0"));
}

#[test]
fn library_and_cli_canonical_forms_agree() {
    let input = ok(&["gen", "--kind", "double", "--m", "2", "--seed", "11"], "");
    let Value::DoubleVelocity(dv) = &values(&input)[0] else {
        panic!("not a double velocity")
    };
    let Value::DoubleContact(d) = &values(&ok(&["canon"], &input))[0] else {
        panic!("not a double contact")
    };
    assert!(double_contact_of(dv, TOL).unwrap().rel_diff(d) <= TOL);
}

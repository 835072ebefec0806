use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use jets_core::action::{act_l_velocity, act_p_double};
use jets_core::codec::{decode_stream, DecodeError, Value};
use jets_core::contact::{
    affine_add_contact, contact_of, decompose_contact, double_contact_equal, double_contact_of, vertical_quotient,
};
use jets_core::group::{compose_l, compose_p, exchange_p, from_second_order, inverse_l, inverse_p, to_second_order};
use jets_core::sample::generate;
use jets_core::velocity::{affine_add_vertical, exchange as exchange_dv, split_semiholonomic};
use jets_core::verify::{self, Fault, Suite, VerifyConfig};
use jets_core::JetError;

use crate::Global;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<JetError> for CliError {
    fn from(e: JetError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<DecodeError> for CliError {
    fn from(e: DecodeError) -> Self {
        CliError::input(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::input(format!("cannot read standard input: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
    }
}

fn read_values(path: &Path) -> Result<Vec<Value>, CliError> {
    let values = decode_stream(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", display(path))))?;
    if values.is_empty() {
        return Err(CliError::input(format!("{}: no values in input", display(path))));
    }
    Ok(values)
}

fn display(path: &Path) -> String {
    if path.as_os_str() == "-" {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn emit(g: &Global, values: &[Value]) -> CliResult {
    let mut out = io::stdout().lock();
    for v in values {
        writeln!(out, "{}", jets_core::codec::render(&v.to_json(), g.pretty))
            .map_err(|e| CliError::input(format!("cannot write output: {e}")))?;
    }
    Ok(())
}

fn unsupported(cmd: &str, v: &Value) -> CliError {
    CliError::input(format!("{cmd} does not accept a {}", v.type_name()))
}

pub fn gen(g: &Global, kind: &str, m: usize, n: usize, seed: u64, count: usize) -> CliResult {
    emit(g, &generate(kind, m, n, seed, count)?)
}

pub fn act(g: &Global, element: &Path, input: &Path) -> CliResult {
    let mut elements = read_values(element)?;
    if elements.len() != 1 {
        return Err(CliError::input(format!(
            "{}: expected exactly one group element",
            display(element)
        )));
    }
    let element = elements.remove(0);
    let out = read_values(input)?
        .iter()
        .map(|v| match (v, &element) {
            (Value::Velocity(x), Value::Group(a)) => Ok(Value::Velocity(act_l_velocity(x, a)?)),
            (Value::DoubleVelocity(x), Value::Principal(p)) => Ok(Value::DoubleVelocity(act_p_double(x, p)?)),
            (Value::DoubleVelocity(x), Value::SecondOrder(q)) => {
                Ok(Value::DoubleVelocity(act_p_double(x, &from_second_order(q))?))
            }
            (Value::Velocity(_) | Value::DoubleVelocity(_), e) => Err(CliError::input(format!(
                "a {} cannot act on a {}",
                e.type_name(),
                v.type_name()
            ))),
            _ => Err(unsupported("act", v)),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(g, &out)
}

pub fn compose(g: &Global, inputs: &[std::path::PathBuf], invert: bool) -> CliResult {
    let mut factors = Vec::new();
    for path in inputs {
        factors.extend(read_values(path)?);
    }
    let mut iter = factors.into_iter();
    let first = iter.next().ok_or_else(|| CliError::input("nothing to compose"))?;
    let mut acc = iter.try_fold(first, |acc, next| -> Result<Value, CliError> {
        Ok(match (&acc, &next) {
            (Value::Group(a), Value::Group(b)) => Value::Group(compose_l(a, b)?),
            (Value::Principal(a), Value::Principal(b)) => Value::Principal(compose_p(a, b)?),
            (Value::SecondOrder(a), Value::SecondOrder(b)) => Value::SecondOrder(to_second_order(
                &compose_p(&from_second_order(a), &from_second_order(b))?,
                g.tol,
            )?),
            _ => {
                return Err(CliError::input(format!(
                    "cannot compose a {} with a {}",
                    acc.type_name(),
                    next.type_name()
                )))
            }
        })
    })?;
    if invert {
        acc = match &acc {
            Value::Group(a) => Value::Group(inverse_l(a)?),
            Value::Principal(p) => Value::Principal(inverse_p(p)?),
            Value::SecondOrder(q) => Value::SecondOrder(to_second_order(&inverse_p(&from_second_order(q))?, g.tol)?),
            other => return Err(unsupported("compose", other)),
        };
    } else if !matches!(acc, Value::Group(_) | Value::Principal(_) | Value::SecondOrder(_)) {
        return Err(unsupported("compose", &acc));
    }
    emit(g, &[acc])
}

pub fn exchange(g: &Global, input: &Path) -> CliResult {
    let out = read_values(input)?
        .iter()
        .map(|v| match v {
            Value::DoubleVelocity(x) => Ok(Value::DoubleVelocity(exchange_dv(x))),
            Value::Principal(p) => Ok(Value::Principal(exchange_p(p))),
            other => Err(unsupported("exchange", other)),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(g, &out)
}

fn canon_one(v: &Value, tol: f64) -> Result<Value, CliError> {
    Ok(match v {
        Value::Velocity(x) => Value::Contact(contact_of(x, tol)?),
        Value::Contact(c) => Value::Contact(contact_of(&c.as_velocity(), tol)?),
        Value::DoubleVelocity(x) => Value::DoubleContact(double_contact_of(x, tol)?),
        Value::DoubleContact(d) => Value::DoubleContact(double_contact_of(&d.representative(), tol)?),
        Value::Vertical(k) => Value::Quotient(vertical_quotient(&k.to_double_velocity(), tol)?),
        Value::Quotient(q) => Value::Quotient(q.clone()),
        other => return Err(unsupported("canon", other)),
    })
}

pub fn canon(g: &Global, input: &Path) -> CliResult {
    let out = read_values(input)?
        .iter()
        .map(|v| canon_one(v, g.tol))
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(g, &out)
}

pub fn decompose(g: &Global, input: &Path, check: bool) -> CliResult {
    let tol = g.tol;
    let mut out = Vec::new();
    for (index, v) in read_values(input)?.iter().enumerate() {
        match v {
            Value::DoubleVelocity(x) => {
                let (h, k) = split_semiholonomic(x, tol)?;
                if check {
                    let err = affine_add_vertical(&h, &k, tol)?.rel_diff(x);
                    if err > tol {
                        return Err(CliError::failed(format!(
                            "value {index}: parts recombine with error {err:e}"
                        )));
                    }
                }
                out.push(Value::DoubleVelocity(h));
                out.push(Value::Vertical(k));
            }
            Value::DoubleContact(d) => {
                let (h, k) = decompose_contact(d, tol)?;
                if check && !double_contact_equal(&affine_add_contact(&h, &k, tol)?, d, tol) {
                    return Err(CliError::failed(format!(
                        "value {index}: parts do not recombine to the input"
                    )));
                }
                out.push(Value::DoubleContact(h));
                out.push(Value::Quotient(k));
            }
            other => return Err(unsupported("decompose", other)),
        }
    }
    emit(g, &out)
}

pub fn verify(g: &Global, suite: &str, m: usize, n: usize, trials: usize, seed: u64, fault: Option<&str>) -> CliResult {
    let suite = Suite::parse(suite).ok_or_else(|| {
        CliError::input(format!(
            "unknown suite {suite:?} (expected one of {})",
            Suite::NAMES.join(", ")
        ))
    })?;
    let fault = fault
        .map(|f| Fault::parse(f).ok_or_else(|| CliError::input(format!("unknown fault {f:?}"))))
        .transpose()?;
    let config = VerifyConfig {
        suite,
        m,
        n,
        trials,
        seed,
        tol: g.tol,
        fault,
    };
    let report = verify::run(&config)?;

    let mut err = io::stderr().lock();
    for p in &report.properties {
        let status = if p.failures == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(
            err,
            "{status} {:<22} {:<48} {:>3}/{} failed  max error {:.3e}",
            p.suite, p.name, p.failures, p.trials, p.max_error
        );
    }
    let _ = writeln!(
        err,
        "{}: suite {} m={} n={} seed={}: {} failures, max error {:.3e}",
        if report.passed() { "ok" } else { "FAILED" },
        report.suite,
        report.m,
        report.n,
        report.seed,
        report.failures,
        report.max_error
    );
    println!("{}", report.to_json_string(g.pretty));
    if report.passed() {
        Ok(())
    } else {
        let failing: Vec<&str> = report
            .properties
            .iter()
            .filter(|p| p.failures > 0)
            .map(|p| p.name.as_str())
            .collect();
        Err(CliError::failed(format!("failing properties: {}", failing.join(", "))))
    }
}

//! JSON encodings of every value type.
//!
//! Matrices are nested row-major lists and rank-3 arrays are nested
//! `[a][i][j]` lists. Pivot sets are 0-based row indices. A document is
//! recognized by its exact key set, so [`decode_value`] accepts any of the
//! encodings below and rejects everything else with a [`DecodeError`].
//!
//! | type                     | keys                                  |
//! |--------------------------|---------------------------------------|
//! | `Velocity`               | `m n u U`                             |
//! | `DoubleVelocity`         | `m n u Ui Uo W`                       |
//! | `VerticalVector`         | `base K kind`                         |
//! | `JetGroupElement`        | `m A`                                 |
//! | `PrincipalJetElement`    | `m Aphi Asigma B`                     |
//! | `SecondOrderJetElement`  | `m A S`                               |
//! | `ContactElement`         | `m n u P`                             |
//! | `DoubleContactElement`   | `m n I u X Y Z`                       |
//! | `QuotientVerticalVector` | `base I V kind`                       |

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value as Json;
use thiserror::Error;

use crate::contact::{ContactElement, DoubleContactElement, QuotientVerticalVector};
use crate::error::JetError;
use crate::group::{JetGroupElement, PrincipalJetElement, SecondOrderJetElement};
use crate::numeric::{matrix_from_rows, matrix_to_rows, Tensor3, DEFAULT_TOL};
use crate::velocity::{DoubleVelocity, Velocity, VerticalKind, VerticalVector};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unrecognized document: {0}")]
    Unknown(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error(transparent)]
    Invalid(#[from] JetError),
}

type Decoded<T> = Result<T, DecodeError>;

/// Types with a JSON encoding.
pub trait JsonCodec: Sized {
    fn to_json(&self) -> Json;
    fn from_json(doc: &Json) -> Decoded<Self>;

    fn from_json_str(text: &str) -> Decoded<Self> {
        Self::from_json(&serde_json::from_str::<Json>(text)?)
    }

    fn to_json_string(&self, pretty: bool) -> String {
        render(&self.to_json(), pretty)
    }
}

pub fn render(doc: &Json, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(doc).expect("JSON values always serialize")
    } else {
        doc.to_string()
    }
}

fn wire<T: DeserializeOwned>(doc: &Json) -> Decoded<T> {
    Ok(T::deserialize(doc)?)
}

fn to_doc<T: Serialize>(w: &T) -> Json {
    serde_json::to_value(w).expect("wire structs always serialize")
}

fn matrix(name: &str, rows: &[Vec<f64>], shape: (usize, usize)) -> Decoded<DMatrix<f64>> {
    let a = matrix_from_rows(rows).ok_or_else(|| DecodeError::Shape(format!("{name} is empty or ragged")))?;
    if a.shape() != shape {
        return Err(DecodeError::Shape(format!(
            "{name} is {:?}, expected {:?}",
            a.shape(),
            shape
        )));
    }
    Ok(a)
}

fn tensor(name: &str, nested: &[Vec<Vec<f64>>], shape: [usize; 3]) -> Decoded<Tensor3> {
    let t = Tensor3::from_nested(nested).ok_or_else(|| DecodeError::Shape(format!("{name} is empty or ragged")))?;
    if t.shape() != shape {
        return Err(DecodeError::Shape(format!(
            "{name} is {:?}, expected {:?}",
            t.shape(),
            shape
        )));
    }
    Ok(t)
}

fn vector(name: &str, xs: &[f64], n: usize) -> Decoded<DVector<f64>> {
    if xs.len() != n {
        return Err(DecodeError::Shape(format!(
            "{name} has length {}, expected {n}",
            xs.len()
        )));
    }
    Ok(DVector::from_column_slice(xs))
}

fn dims_ok(m: usize, n: usize, codim: bool) -> Decoded<()> {
    if m == 0 || n == 0 || (codim && m >= n) {
        return Err(DecodeError::Shape(format!("invalid dimensions m = {m}, n = {n}")));
    }
    Ok(())
}

fn kind(s: &str) -> Decoded<VerticalKind> {
    VerticalKind::parse(s).ok_or_else(|| DecodeError::Shape(format!("unknown kind {s:?}")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VelocityWire {
    m: usize,
    n: usize,
    u: Vec<f64>,
    #[serde(rename = "U")]
    linear: Vec<Vec<f64>>,
}

impl JsonCodec for Velocity {
    fn to_json(&self) -> Json {
        let d = self.dims();
        to_doc(&VelocityWire {
            m: d.m,
            n: d.n,
            u: self.point().as_slice().to_vec(),
            linear: matrix_to_rows(self.linear()),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: VelocityWire = wire(doc)?;
        dims_ok(w.m, w.n, false)?;
        let u = vector("u", &w.u, w.n)?;
        let linear = matrix("U", &w.linear, (w.n, w.m))?;
        Ok(Velocity::new(u, linear)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoubleVelocityWire {
    m: usize,
    n: usize,
    u: Vec<f64>,
    #[serde(rename = "Ui")]
    inner: Vec<Vec<f64>>,
    #[serde(rename = "Uo")]
    outer: Vec<Vec<f64>>,
    #[serde(rename = "W")]
    mixed: Vec<Vec<Vec<f64>>>,
}

impl JsonCodec for DoubleVelocity {
    fn to_json(&self) -> Json {
        let d = self.dims();
        to_doc(&DoubleVelocityWire {
            m: d.m,
            n: d.n,
            u: self.point().as_slice().to_vec(),
            inner: matrix_to_rows(self.inner()),
            outer: matrix_to_rows(self.outer()),
            mixed: self.mixed().to_nested(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: DoubleVelocityWire = wire(doc)?;
        dims_ok(w.m, w.n, false)?;
        let u = vector("u", &w.u, w.n)?;
        let inner = matrix("Ui", &w.inner, (w.n, w.m))?;
        let outer = matrix("Uo", &w.outer, (w.n, w.m))?;
        let mixed = tensor("W", &w.mixed, [w.n, w.m, w.m])?;
        Ok(DoubleVelocity::new(u, inner, outer, mixed)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerticalWire {
    base: Json,
    #[serde(rename = "K")]
    fibre: Vec<Vec<Vec<f64>>>,
    kind: String,
}

impl JsonCodec for VerticalVector {
    fn to_json(&self) -> Json {
        to_doc(&VerticalWire {
            base: self.base().to_json(),
            fibre: self.fibre().to_nested(),
            kind: self.kind().as_str().to_string(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: VerticalWire = wire(doc)?;
        let base = Velocity::from_json(&w.base)?;
        let d = base.dims();
        let fibre = tensor("K", &w.fibre, [d.n, d.m, d.m])?;
        Ok(VerticalVector::new(base, fibre, kind(&w.kind)?, DEFAULT_TOL)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupWire {
    m: usize,
    #[serde(rename = "A")]
    matrix: Vec<Vec<f64>>,
}

impl JsonCodec for JetGroupElement {
    fn to_json(&self) -> Json {
        to_doc(&GroupWire {
            m: self.m(),
            matrix: matrix_to_rows(self.matrix()),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: GroupWire = wire(doc)?;
        dims_ok(w.m, w.m, false)?;
        Ok(JetGroupElement::new(matrix("A", &w.matrix, (w.m, w.m))?)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrincipalWire {
    m: usize,
    #[serde(rename = "Aphi")]
    aphi: Vec<Vec<f64>>,
    #[serde(rename = "Asigma")]
    asigma: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Vec<f64>>>,
}

impl JsonCodec for PrincipalJetElement {
    fn to_json(&self) -> Json {
        to_doc(&PrincipalWire {
            m: self.m(),
            aphi: matrix_to_rows(self.aphi()),
            asigma: matrix_to_rows(self.asigma()),
            b: self.b().to_nested(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: PrincipalWire = wire(doc)?;
        dims_ok(w.m, w.m, false)?;
        let m = w.m;
        Ok(PrincipalJetElement::new(
            matrix("Aphi", &w.aphi, (m, m))?,
            matrix("Asigma", &w.asigma, (m, m))?,
            tensor("B", &w.b, [m, m, m])?,
        )?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecondOrderWire {
    m: usize,
    #[serde(rename = "A")]
    linear: Vec<Vec<f64>>,
    #[serde(rename = "S")]
    second: Vec<Vec<Vec<f64>>>,
}

impl JsonCodec for SecondOrderJetElement {
    fn to_json(&self) -> Json {
        to_doc(&SecondOrderWire {
            m: self.m(),
            linear: matrix_to_rows(self.linear()),
            second: self.second().to_nested(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: SecondOrderWire = wire(doc)?;
        dims_ok(w.m, w.m, false)?;
        let m = w.m;
        Ok(SecondOrderJetElement::new(
            matrix("A", &w.linear, (m, m))?,
            tensor("S", &w.second, [m, m, m])?,
            DEFAULT_TOL,
        )?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactWire {
    m: usize,
    n: usize,
    u: Vec<f64>,
    #[serde(rename = "P")]
    plane: Vec<Vec<f64>>,
}

impl JsonCodec for ContactElement {
    fn to_json(&self) -> Json {
        let d = self.dims();
        to_doc(&ContactWire {
            m: d.m,
            n: d.n,
            u: self.point().as_slice().to_vec(),
            plane: matrix_to_rows(self.plane()),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: ContactWire = wire(doc)?;
        dims_ok(w.m, w.n, true)?;
        let u = vector("u", &w.u, w.n)?;
        let plane = matrix("P", &w.plane, (w.n, w.m))?;
        Ok(ContactElement::new(u, plane, DEFAULT_TOL)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoubleContactWire {
    m: usize,
    n: usize,
    #[serde(rename = "I")]
    pivots: Vec<usize>,
    u: Vec<f64>,
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
    #[serde(rename = "Z")]
    z: Vec<Vec<Vec<f64>>>,
}

impl JsonCodec for DoubleContactElement {
    fn to_json(&self) -> Json {
        let d = self.dims();
        to_doc(&DoubleContactWire {
            m: d.m,
            n: d.n,
            pivots: self.pivots().to_vec(),
            u: self.point().as_slice().to_vec(),
            x: matrix_to_rows(self.x()),
            y: matrix_to_rows(self.y()),
            z: self.z().to_nested(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: DoubleContactWire = wire(doc)?;
        dims_ok(w.m, w.n, true)?;
        let k = w.n - w.m;
        Ok(DoubleContactElement::new(
            vector("u", &w.u, w.n)?,
            w.pivots,
            matrix("X", &w.x, (k, w.m))?,
            matrix("Y", &w.y, (k, w.m))?,
            tensor("Z", &w.z, [k, w.m, w.m])?,
        )?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientWire {
    base: Json,
    #[serde(rename = "I")]
    pivots: Vec<usize>,
    #[serde(rename = "V")]
    values: Vec<Vec<Vec<f64>>>,
    kind: String,
}

impl JsonCodec for QuotientVerticalVector {
    fn to_json(&self) -> Json {
        to_doc(&QuotientWire {
            base: self.base().to_json(),
            pivots: self.pivots().to_vec(),
            values: self.values().to_nested(),
            kind: self.kind().as_str().to_string(),
        })
    }

    fn from_json(doc: &Json) -> Decoded<Self> {
        let w: QuotientWire = wire(doc)?;
        let base = ContactElement::from_json(&w.base)?;
        let d = base.dims();
        let values = tensor("V", &w.values, [d.n - d.m, d.m, d.m])?;
        Ok(QuotientVerticalVector::new(
            base,
            w.pivots,
            values,
            kind(&w.kind)?,
            DEFAULT_TOL,
        )?)
    }
}

/// Any encodable value, recognized by key set.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Velocity(Velocity),
    DoubleVelocity(DoubleVelocity),
    Vertical(VerticalVector),
    Group(JetGroupElement),
    Principal(PrincipalJetElement),
    SecondOrder(SecondOrderJetElement),
    Contact(ContactElement),
    DoubleContact(DoubleContactElement),
    Quotient(QuotientVerticalVector),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Velocity(_) => "Velocity",
            Value::DoubleVelocity(_) => "DoubleVelocity",
            Value::Vertical(_) => "VerticalVector",
            Value::Group(_) => "JetGroupElement",
            Value::Principal(_) => "PrincipalJetElement",
            Value::SecondOrder(_) => "SecondOrderJetElement",
            Value::Contact(_) => "ContactElement",
            Value::DoubleContact(_) => "DoubleContactElement",
            Value::Quotient(_) => "QuotientVerticalVector",
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Velocity(v) => v.to_json(),
            Value::DoubleVelocity(v) => v.to_json(),
            Value::Vertical(v) => v.to_json(),
            Value::Group(v) => v.to_json(),
            Value::Principal(v) => v.to_json(),
            Value::SecondOrder(v) => v.to_json(),
            Value::Contact(v) => v.to_json(),
            Value::DoubleContact(v) => v.to_json(),
            Value::Quotient(v) => v.to_json(),
        }
    }

    pub fn from_json(doc: &Json) -> Decoded<Self> {
        let obj = doc
            .as_object()
            .ok_or_else(|| DecodeError::Unknown("expected a JSON object".into()))?;
        let keys: BTreeSet<&str> = obj.keys().map(String::as_str).collect();
        let has = |want: &[&str]| keys.len() == want.len() && want.iter().all(|k| keys.contains(k));
        Ok(if has(&["m", "n", "u", "U"]) {
            Value::Velocity(Velocity::from_json(doc)?)
        } else if has(&["m", "n", "u", "Ui", "Uo", "W"]) {
            Value::DoubleVelocity(DoubleVelocity::from_json(doc)?)
        } else if has(&["base", "K", "kind"]) {
            Value::Vertical(VerticalVector::from_json(doc)?)
        } else if has(&["m", "A"]) {
            Value::Group(JetGroupElement::from_json(doc)?)
        } else if has(&["m", "Aphi", "Asigma", "B"]) {
            Value::Principal(PrincipalJetElement::from_json(doc)?)
        } else if has(&["m", "A", "S"]) {
            Value::SecondOrder(SecondOrderJetElement::from_json(doc)?)
        } else if has(&["m", "n", "u", "P"]) {
            Value::Contact(ContactElement::from_json(doc)?)
        } else if has(&["m", "n", "I", "u", "X", "Y", "Z"]) {
            Value::DoubleContact(DoubleContactElement::from_json(doc)?)
        } else if has(&["base", "I", "V", "kind"]) {
            Value::Quotient(QuotientVerticalVector::from_json(doc)?)
        } else {
            let listed: Vec<&str> = keys.into_iter().collect();
            return Err(DecodeError::Unknown(format!("no value type has keys {listed:?}")));
        })
    }
}

/// Decodes a single JSON document.
pub fn decode_value(text: &str) -> Decoded<Value> {
    Value::from_json(&serde_json::from_str::<Json>(text)?)
}

/// Decodes a whitespace-separated stream of JSON documents.
pub fn decode_stream(text: &str) -> Decoded<Vec<Value>> {
    serde_json::Deserializer::from_str(text)
        .into_iter::<Json>()
        .map(|doc| Value::from_json(&doc?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{contact_of, double_contact_of, vertical_quotient};

    fn sample_dv() -> DoubleVelocity {
        DoubleVelocity::new(
            DVector::from_column_slice(&[0.1, -2.0, 3.5]),
            DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 1.0 / 3.0, -4.0]),
            DMatrix::from_row_slice(3, 2, &[2.0, 0.5, 1.0, 1.0, 0.0, 3.0]),
            Tensor3::from_fn(3, 2, 2, |a, i, j| {
                (a as f64 + 0.1) * (i as f64 - 2.0 * j as f64) + 1e-17
            }),
        )
        .unwrap()
    }

    #[test]
    fn double_velocity_field_names() {
        let doc = sample_dv().to_json();
        let obj = doc.as_object().unwrap();
        let keys: Vec<_> = obj.keys().cloned().collect();
        for k in ["m", "n", "u", "Ui", "Uo", "W"] {
            assert!(keys.contains(&k.to_string()));
        }
        assert_eq!(obj["W"][2][1][0], Json::from(sample_dv().mixed()[(2, 1, 0)]));
        assert_eq!(obj["Ui"][2][0], Json::from(1.0 / 3.0));
    }

    #[test]
    fn round_trips_through_text() {
        let dv = sample_dv();
        let text = dv.to_json_string(false);
        assert_eq!(DoubleVelocity::from_json_str(&text).unwrap(), dv);
        let pretty = dv.to_json_string(true);
        assert_eq!(decode_value(&pretty).unwrap(), Value::DoubleVelocity(dv.clone()));

        let c = contact_of(&crate::velocity::inner_projection(&dv), DEFAULT_TOL).unwrap();
        assert_eq!(ContactElement::from_json_str(&c.to_json_string(false)).unwrap(), c);
        let d = double_contact_of(&dv, DEFAULT_TOL).unwrap();
        assert_eq!(
            DoubleContactElement::from_json_str(&d.to_json_string(false)).unwrap(),
            d
        );
    }

    #[test]
    fn quotient_vector_round_trip() {
        let dv = DoubleVelocity::new(
            DVector::zeros(3),
            DMatrix::from_row_slice(3, 1, &[2.0, 3.0, 1.0]),
            DMatrix::zeros(3, 1),
            Tensor3::from_fn(3, 1, 1, |a, _, _| [4.0, 10.0, -1.0][a]),
        )
        .unwrap();
        let q = vertical_quotient(&dv, DEFAULT_TOL).unwrap();
        let back = decode_value(&q.to_json_string(false)).unwrap();
        assert_eq!(back, Value::Quotient(q));
    }

    #[test]
    fn stream_of_mixed_values() {
        let text = format!(
            "{}\n{}\n",
            sample_dv().to_json_string(false),
            PrincipalJetElement::identity(2).to_json_string(true)
        );
        let values = decode_stream(&text).unwrap();
        assert_eq!(values.len(), 2);
        assert_eq!(values[1].type_name(), "PrincipalJetElement");
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(decode_value("[1,2]"), Err(DecodeError::Unknown(_))));
        assert!(matches!(decode_value("{\"m\":1}"), Err(DecodeError::Unknown(_))));
        assert!(matches!(
            decode_value("{\"m\":1,\"n\":2,\"u\":[0],\"U\":[[1],[2]]}"),
            Err(DecodeError::Shape(_))
        ));
        assert!(matches!(
            decode_value("{\"m\":1,\"n\":2,\"u\":[0,0],\"U\":[[1],[2,3]]}"),
            Err(DecodeError::Shape(_))
        ));
        assert!(matches!(
            decode_value("{\"m\":0,\"n\":2,\"u\":[0,0],\"U\":[]}"),
            Err(DecodeError::Shape(_))
        ));
        assert!(matches!(
            decode_value("{\"m\":1,\"A\":[[0]]}"),
            Err(DecodeError::Invalid(_))
        ));
        assert!(matches!(
            decode_value("{\"m\":1,\"A\":[[1e999]]}"),
            Err(DecodeError::Json(_))
        ));
        assert!(matches!(
            decode_value("{\"m\":2,\"n\":3,\"u\":[0,0,0],\"P\":[[2,0],[0,1],[0,0]]}"),
            Err(DecodeError::Invalid(_))
        ));
        let bad_pivots = "{\"m\":1,\"n\":2,\"I\":[5],\"u\":[0,0],\"X\":[[1]],\"Y\":[[1]],\"Z\":[[[0]]]}";
        assert!(matches!(decode_value(bad_pivots), Err(DecodeError::Invalid(_))));
        let bad_kind = "{\"base\":{\"m\":1,\"n\":1,\"u\":[0],\"U\":[[1]]},\"K\":[[[0]]],\"kind\":\"odd\"}";
        assert!(matches!(decode_value(bad_kind), Err(DecodeError::Shape(_))));
    }
}

//! The JSON instance file format.
//!
//! A file is one object with a mandatory `version` (currently `"1"`), a
//! `target` inequality id, optional `tolerance` overrides, and the payload
//! fields for that target:
//!
//! | targets                                   | payload fields                    |
//! |-------------------------------------------|-----------------------------------|
//! | `ADD_MATRIX_14`, `MULT_MATRIX_STAR`       | `form`, `x`, `y`, `omega_pair`    |
//! | `ADD_FUNC`, `MULT_FUNC`                   | `functional`, `x`, `y`, `omega_pair` |
//! | `OP_PAIR_ADD`, `OP_PAIR_MULT`             | `T`, `S`, `v`                     |
//! | all sequence bounds                       | `sequences`                       |
//!
//! Schema errors carry the JSON-pointer path of the offending value.

use std::env;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bounds::{
    additive_matrix_bound, functional_additive_bound, functional_multiplicative_bound, greub_rheinboldt,
    integral_bounds, multiplicative_matrix_bound, operator_pair_bounds, polya_szego_improved,
    polya_szego_multiplicative, weighted_additive, BoundError, BoundReport, InequalityId, WeightedSequences,
};
use crate::forms::{FormInstance, OmegaPair, PositiveFunctional, Vector};
use crate::matalg::{AlgebraElement, Tolerance};

pub const FORMAT_VERSION: &str = "1";
pub const ENV_RTOL: &str = "REVCS_TOL_RTOL";
pub const ENV_ATOL: &str = "REVCS_TOL_ATOL";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixPayload {
    pub form: FormInstance,
    pub x: Vector,
    pub y: Vector,
    pub omega_pair: OmegaPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalPayload {
    pub functional: PositiveFunctional,
    pub x: AlgebraElement,
    pub y: AlgebraElement,
    pub omega_pair: OmegaPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPairPayload {
    #[serde(rename = "T")]
    pub t: AlgebraElement,
    #[serde(rename = "S")]
    pub s: AlgebraElement,
    pub v: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequencesPayload {
    pub sequences: WeightedSequences,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Matrix(MatrixPayload),
    Functional(FunctionalPayload),
    OperatorPair(OperatorPairPayload),
    Sequences(SequencesPayload),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub target: InequalityId,
    pub tolerance: Option<ToleranceOverride>,
    pub payload: Payload,
}

fn decode<T: DeserializeOwned>(value: Value) -> Result<T, InstanceError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = json_pointer(e.path());
        schema(pointer, e.into_inner().to_string())
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn payload_for(target: InequalityId, rest: Value) -> Result<Payload, InstanceError> {
    use InequalityId::*;
    Ok(match target {
        AddMatrix14 | MultMatrixStar => Payload::Matrix(decode(rest)?),
        AddFunc | MultFunc => Payload::Functional(decode(rest)?),
        OpPairAdd | OpPairMult => Payload::OperatorPair(decode(rest)?),
        IntAddD1 | IntMultD2 | GreubRheinboldt | WeightedAddDo | PsMult | PsAdd | PsImprovedGood => {
            Payload::Sequences(decode(rest)?)
        }
    })
}

impl InstanceFile {
    pub fn new(target: InequalityId, payload: Payload) -> Self {
        Self {
            target,
            tolerance: None,
            payload,
        }
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let value: Value = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, InstanceError> {
        let Value::Object(mut map) = value else {
            return Err(schema("", "expected an object"));
        };
        match map.remove("version") {
            Some(Value::String(v)) if v == FORMAT_VERSION => {}
            Some(Value::String(v)) => return Err(schema("/version", format!("unsupported version `{v}`, expected `{FORMAT_VERSION}`"))),
            Some(_) => return Err(schema("/version", "expected a string")),
            None => return Err(schema("/version", "missing required field")),
        }
        let target = match map.remove("target") {
            Some(Value::String(t)) => t.parse::<InequalityId>().map_err(|e| schema("/target", e))?,
            Some(_) => return Err(schema("/target", "expected a string")),
            None => return Err(schema("/target", "missing required field")),
        };
        let tolerance = match map.remove("tolerance") {
            Some(t) => Some(decode::<ToleranceOverride>(t).map_err(|e| prefix("/tolerance", e))?),
            None => None,
        };
        let payload = payload_for(target, Value::Object(map))?;
        Ok(Self { target, tolerance, payload })
    }

    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("version".into(), Value::String(FORMAT_VERSION.into()));
        map.insert("target".into(), Value::String(self.target.as_str().into()));
        if let Some(t) = &self.tolerance {
            map.insert("tolerance".into(), serde_json::to_value(t).expect("tolerance serializes"));
        }
        if let Value::Object(p) = serde_json::to_value(&self.payload).expect("payload serializes") {
            map.extend(p);
        }
        Value::Object(map)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("value serializes")
    }

    /// Evaluates the target inequality on the payload.
    pub fn evaluate(&self, tol: Tolerance) -> Result<BoundReport, BoundError> {
        use InequalityId::*;
        let mismatch = || BoundError::InvalidSequences(format!("payload does not match target {}", self.target));
        match (&self.payload, self.target) {
            (Payload::Matrix(p), AddMatrix14) => additive_matrix_bound(&p.form, &p.x, &p.y, p.omega_pair, tol),
            (Payload::Matrix(p), MultMatrixStar) => multiplicative_matrix_bound(&p.form, &p.x, &p.y, p.omega_pair, tol),
            (Payload::Functional(p), AddFunc) => functional_additive_bound(&p.functional, &p.x, &p.y, p.omega_pair, tol),
            (Payload::Functional(p), MultFunc) => functional_multiplicative_bound(&p.functional, &p.x, &p.y, p.omega_pair, tol),
            (Payload::OperatorPair(p), OpPairAdd) => Ok(operator_pair_bounds(&p.t, &p.s, &p.v, tol)?.additive),
            (Payload::OperatorPair(p), OpPairMult) => Ok(operator_pair_bounds(&p.t, &p.s, &p.v, tol)?.multiplicative),
            (Payload::Sequences(p), id) => {
                let data = &p.sequences;
                match id {
                    IntAddD1 => Ok(integral_bounds(data, tol)?.0),
                    IntMultD2 => Ok(integral_bounds(data, tol)?.1),
                    GreubRheinboldt => greub_rheinboldt(data, tol),
                    WeightedAddDo => weighted_additive(data, tol),
                    PsMult => polya_szego_multiplicative(data, tol),
                    PsAdd => Ok(polya_szego_improved(data, tol)?.classical_additive),
                    PsImprovedGood => Ok(polya_szego_improved(data, tol)?.report),
                    _ => Err(mismatch()),
                }
            }
            _ => Err(mismatch()),
        }
    }
}

fn prefix(p: &str, e: InstanceError) -> InstanceError {
    match e {
        InstanceError::Schema { path, message } => InstanceError::Schema {
            path: format!("{p}{path}"),
            message,
        },
        other => other,
    }
}

/// Tolerances, highest precedence first: explicit values (command-line flags),
/// the instance file's overrides, the `REVCS_TOL_RTOL` / `REVCS_TOL_ATOL`
/// environment variables, and the defaults.
pub fn resolve_tolerance(
    explicit: ToleranceOverride,
    file: Option<ToleranceOverride>,
) -> Result<Tolerance, String> {
    let from_env = |name: &str| -> Result<Option<f64>, String> {
        match env::var(name) {
            Ok(s) => s.trim().parse::<f64>().map(Some).map_err(|_| format!("{name}=`{s}` is not a number")),
            Err(_) => Ok(None),
        }
    };
    let file = file.unwrap_or_default();
    let base = Tolerance::default();
    let rtol = explicit.rtol.or(file.rtol).or(from_env(ENV_RTOL)?).unwrap_or(base.rtol);
    let atol = explicit.atol.or(file.atol).or(from_env(ENV_ATOL)?).unwrap_or(base.atol);
    if !(rtol.is_finite() && atol.is_finite() && rtol >= 0.0 && atol >= 0.0) {
        return Err(format!("tolerances must be finite and nonnegative, got rtol={rtol}, atol={atol}"));
    }
    Ok(Tolerance::new(rtol, atol))
}

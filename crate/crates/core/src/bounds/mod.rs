//! Evaluators for the reverse Cauchy-Schwarz family.
//!
//! Every evaluator returns a [`BoundReport`]: the hypotheses it checked, both
//! sides of the inequality, the margin `RHS - LHS` (smallest eigenvalue of the
//! difference in the matrix case) and a verdict. Verdicts compare the margin
//! against `-(atol + rtol * scale)` with `scale = max(|LHS|, |RHS|, 1)`.

mod discrete;
mod functional;
mod matrix;

pub use discrete::{
    greub_rheinboldt, integral_bounds, polya_szego_improved, polya_szego_multiplicative,
    weighted_additive, ConstantIndex, EqualityCondition, ImprovedPolyaSzego, ScalarWindow,
    WeightedSequences,
};
pub use functional::{
    functional_additive_bound, functional_multiplicative_bound, functional_re_condition,
    operator_pair_bounds, sharpness_witness, OperatorPairClosedForm, OperatorPairReport,
    SharpnessWitness,
};
pub use matrix::{additive_lhs_unexpanded, additive_matrix_bound, multiplicative_matrix_bound};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{FormError, OmegaPair};
use crate::matalg::{loewner_leq, AlgebraElement, Check, MatError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("Re(conj(omega) * Omega) = {value:.6e} is not positive")]
    NonPositiveReOmega { value: f64 },
    #[error("window violation: {0}")]
    WindowViolation(String),
    #[error("invalid sequences: {0}")]
    InvalidSequences(String),
    #[error("the unweighted corollary needs all weights equal to 1")]
    WeightedInput,
}

impl From<MatError> for BoundError {
    fn from(e: MatError) -> Self {
        BoundError::Form(FormError::Mat(e))
    }
}

impl BoundError {
    /// Whether the error means a hypothesis of the inequality is not met (as
    /// opposed to malformed input).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            BoundError::NonPositiveReOmega { .. }
                | BoundError::WindowViolation(_)
                | BoundError::Form(FormError::NotCommuting { .. })
                | BoundError::Form(FormError::NotStrictlyPositive { .. })
                | BoundError::Form(FormError::DegenerateSpace)
                | BoundError::Form(FormError::Mat(MatError::NotPositive { .. }))
                | BoundError::Form(FormError::Mat(MatError::NotHermitian { .. }))
        )
    }
}

macro_rules! inequality_ids {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// Identifier of each evaluated inequality; the wire names are stable.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum InequalityId {
            $(#[serde(rename = $name)] $variant,)+
        }

        impl InequalityId {
            pub const ALL: &'static [InequalityId] = &[$(InequalityId::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(InequalityId::$variant => $name,)+
                }
            }
        }

        impl FromStr for InequalityId {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(InequalityId::$variant),)+
                    other => Err(format!("unknown inequality id `{other}`")),
                }
            }
        }
    };
}

inequality_ids! {
    AddMatrix14 => "ADD_MATRIX_14",
    MultMatrixStar => "MULT_MATRIX_STAR",
    AddFunc => "ADD_FUNC",
    MultFunc => "MULT_FUNC",
    OpPairAdd => "OP_PAIR_ADD",
    OpPairMult => "OP_PAIR_MULT",
    IntAddD1 => "INT_ADD_D1",
    IntMultD2 => "INT_MULT_D2",
    GreubRheinboldt => "GREUB_RHEINBOLDT",
    WeightedAddDo => "WEIGHTED_ADD_DO",
    PsMult => "PS_MULT",
    PsAdd => "PS_ADD",
    PsImprovedGood => "PS_IMPROVED_GOOD",
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Violated,
    PreconditionFailed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Violated => "VIOLATED",
            Verdict::PreconditionFailed => "PRECONDITION_FAILED",
        })
    }
}

/// A named check with its verdict and the number behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
}

impl NamedCheck {
    pub fn new(name: impl Into<String>, holds: bool, margin: f64) -> Self {
        Self {
            name: name.into(),
            holds,
            margin,
        }
    }

    pub fn from_check(name: impl Into<String>, check: Check) -> Self {
        Self::new(name, check.holds, check.value)
    }
}

/// One side of an inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Side {
    Scalar(f64),
    Matrix(AlgebraElement),
}

impl Side {
    pub fn magnitude(&self) -> f64 {
        match self {
            Side::Scalar(x) => x.abs(),
            Side::Matrix(m) => m.frobenius_norm(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Side::Scalar(x) => Some(*x),
            Side::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&AlgebraElement> {
        match self {
            Side::Matrix(m) => Some(m),
            Side::Scalar(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality_id: InequalityId,
    pub preconditions: Vec<NamedCheck>,
    pub lhs: Side,
    pub rhs: Side,
    /// `None` when a precondition failed: no claim is made in that case.
    pub margin: Option<f64>,
    pub scale: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_pair: Option<OmegaPair>,
    /// Consistency checks that do not gate the verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_checks: Vec<NamedCheck>,
}

impl BoundReport {
    pub fn scalar(
        id: InequalityId,
        preconditions: Vec<NamedCheck>,
        lhs: f64,
        rhs: f64,
        tol: Tolerance,
    ) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let margin = rhs - lhs;
        Self::assemble(id, preconditions, Side::Scalar(lhs), Side::Scalar(rhs), scale, || {
            Ok(Check::new(margin >= -tol.band(scale), margin))
        })
        .expect("scalar comparison cannot fail")
    }

    pub fn matrix(
        id: InequalityId,
        preconditions: Vec<NamedCheck>,
        lhs: AlgebraElement,
        rhs: AlgebraElement,
        tol: Tolerance,
    ) -> Result<Self, BoundError> {
        let scale = lhs.frobenius_norm().max(rhs.frobenius_norm()).max(1.0);
        let check = || loewner_leq(&lhs, &rhs, tol).map_err(BoundError::from);
        let (l, r) = (lhs.clone(), rhs.clone());
        Self::assemble(id, preconditions, Side::Matrix(l), Side::Matrix(r), scale, check)
    }

    fn assemble(
        id: InequalityId,
        preconditions: Vec<NamedCheck>,
        lhs: Side,
        rhs: Side,
        scale: f64,
        compare: impl FnOnce() -> Result<Check, BoundError>,
    ) -> Result<Self, BoundError> {
        let (margin, verdict) = if preconditions.iter().all(|p| p.holds) {
            let c = compare()?;
            (Some(c.value), if c.holds { Verdict::Holds } else { Verdict::Violated })
        } else {
            (None, Verdict::PreconditionFailed)
        };
        Ok(Self {
            inequality_id: id,
            preconditions,
            lhs,
            rhs,
            margin,
            scale,
            verdict,
            omega_pair: None,
            cross_checks: Vec::new(),
        })
    }

    pub fn with_omega(mut self, pair: OmegaPair) -> Self {
        self.omega_pair = Some(pair);
        self
    }

    pub fn with_cross_check(mut self, check: NamedCheck) -> Self {
        self.cross_checks.push(check);
        self
    }

    /// `margin / max(|LHS|, |RHS|)`, invariant under joint rescaling of both sides.
    pub fn relative_margin(&self) -> Option<f64> {
        let m = self.margin?;
        let s = self.lhs.magnitude().max(self.rhs.magnitude());
        Some(if s > 0.0 { m / s } else { m })
    }

    pub fn lhs_scalar(&self) -> Option<f64> {
        self.lhs.as_scalar()
    }

    pub fn rhs_scalar(&self) -> Option<f64> {
        self.rhs.as_scalar()
    }
}

pub(crate) fn require_positive_re(pair: OmegaPair) -> Result<f64, BoundError> {
    let value = pair.re_product();
    if value > 0.0 {
        Ok(value)
    } else {
        Err(BoundError::NonPositiveReOmega { value })
    }
}

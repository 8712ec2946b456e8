//! Dense complex matrices standing in for elements of the C*-algebra `M_d(C)`.
//!
//! Everything here is a pure function over immutable values. Tolerance handling
//! follows one rule: a check passes when its deviation or margin lies inside the
//! band `atol + rtol * scale`, where `scale` is stated per operation.

mod eigen;
mod element;

pub use eigen::{eig_hermitian, SpectralDecomposition, MAX_SWEEPS};
pub use element::AlgebraElement;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex scalar used throughout (`re`, `im` as `f64`).
pub type ComplexScalar = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("matrix is not Hermitian within tolerance (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("non-finite entry in matrix")]
    NonFinite,
}

/// Relative and absolute tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rtol: f64, atol: f64) -> Self {
        assert!(rtol >= 0.0 && atol >= 0.0, "tolerances must be nonnegative");
        Self { rtol, atol }
    }

    /// Width of the acceptance band for a quantity of magnitude `scale`.
    pub fn band(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }
}

/// Outcome of a thresholded comparison: the boolean plus the raw number behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub value: f64,
}

impl Check {
    pub fn new(holds: bool, value: f64) -> Self {
        Self { holds, value }
    }
}

pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    a.adjoint()
}

/// `(A + A*) / 2`.
pub fn re_part(a: &AlgebraElement) -> AlgebraElement {
    a.re_part()
}

/// Returns the Hermitian part of `a`, or `NotHermitian` if `a` is too far from it.
pub fn hermitian_checked(a: &AlgebraElement, tol: Tolerance) -> Result<AlgebraElement, MatError> {
    let deviation = a.sub(&a.adjoint()).frobenius_norm();
    if deviation > tol.band(a.frobenius_norm()) {
        return Err(MatError::NotHermitian { deviation });
    }
    Ok(a.re_part())
}

/// Positive square root `V diag(sqrt(l)) V*`.
///
/// Eigenvalues in `[-band, 0)` with `band = atol + rtol * max|l|` are clamped to zero;
/// anything more negative is `NotPositive`.
pub fn sqrt_psd(a: &AlgebraElement, tol: Tolerance) -> Result<AlgebraElement, MatError> {
    let spec = eig_hermitian(a, tol)?;
    let max_abs = spec.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let band = tol.band(max_abs);
    let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -band {
        return Err(MatError::NotPositive { min_eigenvalue: min });
    }
    Ok(spec.apply_real(|l| l.max(0.0).sqrt()))
}

/// `|A| = (A*A)^{1/2}` for any square `A`.
pub fn abs_element(a: &AlgebraElement, tol: Tolerance) -> Result<AlgebraElement, MatError> {
    // A*A is PSD exactly; negative eigenvalues are pure roundoff.
    let gram = a.adjoint().mul(a).re_part();
    let spec = eig_hermitian(&gram, tol)?;
    Ok(spec.apply_real(|l| l.max(0.0).sqrt()))
}

/// `(min eigenvalue, max eigenvalue)`; the C*-norm of a Hermitian element is the larger modulus.
pub fn spectrum_bounds(a: &AlgebraElement, tol: Tolerance) -> Result<(f64, f64), MatError> {
    let spec = eig_hermitian(a, tol)?;
    Ok((spec.min(), spec.max()))
}

/// Loewner comparison `A <= B`.
///
/// `value` is the smallest eigenvalue of `B - A`; the verdict allows the band at
/// `scale = max(|A|_F, |B|_F, 1)`.
pub fn loewner_leq(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: Tolerance,
) -> Result<Check, MatError> {
    if a.dim() != b.dim() {
        return Err(MatError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let a = hermitian_checked(a, tol)?;
    let b = hermitian_checked(b, tol)?;
    let diff = b.sub(&a);
    let spec = eig_hermitian(&diff, tol)?;
    let margin = spec.min();
    let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
    Ok(Check::new(margin >= -tol.band(scale), margin))
}

/// Normality check; `value` is `|A*A - AA*|_F`.
pub fn is_normal(a: &AlgebraElement, tol: Tolerance) -> Check {
    let adj = a.adjoint();
    let deviation = adj.mul(a).sub(&a.mul(&adj)).frobenius_norm();
    let norm = a.frobenius_norm();
    Check::new(deviation <= tol.band(norm * norm), deviation)
}

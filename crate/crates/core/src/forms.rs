//! Concrete positive sesquilinear forms `<.,.> : X x X -> M_d(C)` and the
//! hypothesis checkers used by the reverse Cauchy-Schwarz bounds.
//!
//! All forms are linear in the first slot and conjugate linear in the second.
//!
//! * [`FormInstance::GramTensor`] — `X = C^n`, `<e_i, e_j> = G[i][j]`.
//! * [`FormInstance::ModuleForm`] — `X = M_d(C)`, `<u, v> = v* u`.
//! * [`FormInstance::FunctionalForm`] — `<u, v> = phi(v* u)` as a `1 x 1` element,
//!   with `X = M_m(C)` or `X = C^m` (vectors embedded as first columns).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matalg::{
    self, eig_hermitian, hermitian_checked, loewner_leq, sqrt_psd, AlgebraElement, Check,
    MatError, Tolerance,
};
use crate::rng::{gaussian_matrix, gaussian_vector, trial_rng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("element is not strictly positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotStrictlyPositive { min_eigenvalue: f64 },
    #[error("elements do not commute (|[x, y]|_F = {deviation:.3e})")]
    NotCommuting { deviation: f64 },
    #[error("no z with phi(z*z) = 1 and phi(z*y) = 0 exists: the phi-scalar product is degenerate")]
    DegenerateSpace,
    #[error("invalid form: {0}")]
    Invalid(String),
}

/// A positive linear functional on `M_m(C)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PositiveFunctional {
    /// `phi(R) = <R x0, x0>`. The vector need not be normalized; it must be nonzero.
    VectorState { vector: Vec<Complex64> },
    /// `phi(R) = tr R`.
    Trace { dim: usize },
    /// `phi(R) = sum_i w_i R_ii` with `w_i > 0`.
    WeightedSum { weights: Vec<f64> },
}

impl PositiveFunctional {
    pub fn vector_state(vector: Vec<Complex64>) -> Result<Self, FormError> {
        let f = Self::VectorState { vector };
        f.validate()?;
        Ok(f)
    }

    pub fn trace(dim: usize) -> Result<Self, FormError> {
        let f = Self::Trace { dim };
        f.validate()?;
        Ok(f)
    }

    pub fn weighted_sum(weights: Vec<f64>) -> Result<Self, FormError> {
        let f = Self::WeightedSum { weights };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FormError> {
        match self {
            Self::VectorState { vector } => {
                if vector.is_empty() || vector.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(FormError::Invalid("vector state needs a finite, nonempty vector".into()));
                }
                if vector.iter().all(|z| z.norm() == 0.0) {
                    return Err(FormError::Invalid("vector state vector is zero".into()));
                }
            }
            Self::Trace { dim } => {
                if *dim == 0 {
                    return Err(FormError::Invalid("trace dimension must be at least 1".into()));
                }
            }
            Self::WeightedSum { weights } => {
                if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(FormError::Invalid("weighted sum needs positive finite weights".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::VectorState { vector } => vector.len(),
            Self::Trace { dim } => *dim,
            Self::WeightedSum { weights } => weights.len(),
        }
    }

    pub fn apply(&self, r: &AlgebraElement) -> Result<Complex64, FormError> {
        if r.dim() != self.dim() {
            return Err(FormError::DimMismatch(format!(
                "functional acts on dimension {}, got {}",
                self.dim(),
                r.dim()
            )));
        }
        Ok(match self {
            Self::VectorState { vector } => {
                let rx = r.mul_vec(vector);
                rx.iter().zip(vector).map(|(a, b)| a * b.conj()).sum()
            }
            Self::Trace { .. } => r.trace(),
            Self::WeightedSum { weights } => weights
                .iter()
                .enumerate()
                .map(|(i, &w)| r.get(i, i) * w)
                .sum(),
        })
    }

    /// The induced scalar product `phi(v* u)`.
    pub fn inner(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<Complex64, FormError> {
        self.apply(&v.adjoint().mul(u))
    }

    /// Finds `z` with `phi(z*z) = 1` and `phi(z*y) = 0`.
    ///
    /// Gram-Schmidt of every matrix unit `E_ij` against `y` under `phi(v* u)`
    /// (two passes); the candidate with the largest residual norm wins, with
    /// row-major order breaking ties.
    pub fn orthogonal_unit(&self, y: &AlgebraElement) -> Result<AlgebraElement, FormError> {
        let m = self.dim();
        let yy = self.inner(y, y)?.re;
        if yy <= 0.0 {
            return Err(FormError::DegenerateSpace);
        }
        let mut best: Option<(f64, AlgebraElement)> = None;
        let mut reference = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                let mut e = AlgebraElement::zeros(m);
                e.set(i, j, Complex64::new(1.0, 0.0));
                reference = reference.max(self.inner(&e, &e)?.re);
                let mut z = e;
                for _ in 0..2 {
                    let coeff = self.inner(&z, y)? / yy;
                    z = z.sub(&y.scale(coeff));
                }
                let n2 = self.inner(&z, &z)?.re;
                if best.as_ref().is_none_or(|(b, _)| n2 > *b) {
                    best = Some((n2, z));
                }
            }
        }
        match best {
            Some((n2, z)) if n2 > DEGENERACY_RTOL * reference => Ok(z.scale_real(1.0 / n2.sqrt())),
            _ => Err(FormError::DegenerateSpace),
        }
    }
}

/// Residual norms below this fraction of the largest matrix-unit norm count as zero.
const DEGENERACY_RTOL: f64 = 1e-8;

/// How a [`FormInstance::FunctionalForm`] realizes the space `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalCarrier {
    /// `X = C^m`, `u` embedded as the first column of an `m x m` matrix.
    Vectors,
    /// `X = M_m(C)`.
    Algebra,
}

/// An element of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vector {
    Coords(Vec<Complex64>),
    Element(AlgebraElement),
}

impl Vector {
    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex64, other: &Vector, beta: Complex64) -> Result<Vector, FormError> {
        match (self, other) {
            (Vector::Coords(a), Vector::Coords(b)) if a.len() == b.len() => Ok(Vector::Coords(
                a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect(),
            )),
            (Vector::Element(a), Vector::Element(b)) if a.dim() == b.dim() => {
                Ok(Vector::Element(a.scale(alpha).add(&b.scale(beta))))
            }
            _ => Err(FormError::DimMismatch("incompatible vectors".into())),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Vector {
        match self {
            Vector::Coords(a) => Vector::Coords(a.iter().map(|x| alpha * x).collect()),
            Vector::Element(a) => Vector::Element(a.scale(alpha)),
        }
    }
}

/// The complex pair `(omega, Omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPair {
    pub omega: Complex64,
    #[serde(rename = "Omega")]
    pub big_omega: Complex64,
}

impl OmegaPair {
    pub fn new(omega: Complex64, big_omega: Complex64) -> Self {
        Self { omega, big_omega }
    }

    pub fn real(omega: f64, big_omega: f64) -> Self {
        Self::new(Complex64::new(omega, 0.0), Complex64::new(big_omega, 0.0))
    }

    /// `Re(conj(omega) * Omega)`.
    pub fn re_product(&self) -> f64 {
        (self.omega.conj() * self.big_omega).re
    }

    /// `(|Omega| + |omega|) / sqrt(Re(conj(omega) Omega))`, or `None` when the
    /// real part is not positive.
    pub fn multiplicative_constant(&self) -> Option<f64> {
        let re = self.re_product();
        (re > 0.0).then(|| (self.big_omega.norm() + self.omega.norm()) / re.sqrt())
    }

    /// `|Omega - omega|^2 / 4`.
    pub fn additive_constant(&self) -> f64 {
        0.25 * (self.big_omega - self.omega).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramTensor {
    algebra_dim: usize,
    gram: Vec<Vec<AlgebraElement>>,
}

impl GramTensor {
    pub fn new(gram: Vec<Vec<AlgebraElement>>) -> Result<Self, FormError> {
        let n = gram.len();
        if n == 0 {
            return Err(FormError::Invalid("Gram tensor is empty".into()));
        }
        let d = gram[0].first().map(|g| g.dim()).unwrap_or(0);
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(FormError::Invalid(format!("Gram row {i} has {} blocks, expected {n}", row.len())));
            }
            if let Some(j) = row.iter().position(|g| g.dim() != d) {
                return Err(FormError::Invalid(format!("Gram block [{i}][{j}] is not {d}x{d}")));
            }
        }
        Ok(Self { algebra_dim: d, gram })
    }

    pub fn space_dim(&self) -> usize {
        self.gram.len()
    }

    pub fn block(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.gram[i][j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRecord", into = "FormRecord")]
pub enum FormInstance {
    GramTensor(GramTensor),
    ModuleForm { algebra_dim: usize },
    FunctionalForm {
        functional: PositiveFunctional,
        carrier: FunctionalCarrier,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    GramTensor,
    ModuleForm,
    FunctionalForm,
}

/// Wire layout of a [`FormInstance`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRecord {
    kind: FormKind,
    algebra_dim: usize,
    /// Optional on input; checked against the payload when given.
    #[serde(default)]
    space_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gram: Option<Vec<Vec<AlgebraElement>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    carrier: Option<FunctionalCarrier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    functional: Option<PositiveFunctional>,
}

impl TryFrom<FormRecord> for FormInstance {
    type Error = FormError;

    fn try_from(r: FormRecord) -> Result<Self, FormError> {
        let form = match r.kind {
            FormKind::GramTensor => {
                let gram = r.gram.ok_or_else(|| FormError::Invalid("GramTensor needs `gram`".into()))?;
                FormInstance::GramTensor(GramTensor::new(gram)?)
            }
            FormKind::ModuleForm => FormInstance::ModuleForm { algebra_dim: r.algebra_dim },
            FormKind::FunctionalForm => {
                let functional = r
                    .functional
                    .ok_or_else(|| FormError::Invalid("FunctionalForm needs `functional`".into()))?;
                functional.validate()?;
                FormInstance::FunctionalForm {
                    functional,
                    carrier: r.carrier.unwrap_or(FunctionalCarrier::Algebra),
                }
            }
        };
        if form.algebra_dim() != r.algebra_dim || r.space_dim.is_some_and(|n| n != form.space_dim()) {
            return Err(FormError::Invalid(format!(
                "declared algebra_dim/space_dim {}/{:?} do not match payload {}/{}",
                r.algebra_dim,
                r.space_dim,
                form.algebra_dim(),
                form.space_dim()
            )));
        }
        if form.algebra_dim() == 0 {
            return Err(FormError::Invalid("algebra_dim must be at least 1".into()));
        }
        Ok(form)
    }
}

impl From<FormInstance> for FormRecord {
    fn from(f: FormInstance) -> Self {
        let (algebra_dim, space_dim) = (f.algebra_dim(), Some(f.space_dim()));
        match f {
            FormInstance::GramTensor(g) => FormRecord {
                kind: FormKind::GramTensor,
                algebra_dim,
                space_dim,
                gram: Some(g.gram),
                carrier: None,
                functional: None,
            },
            FormInstance::ModuleForm { .. } => FormRecord {
                kind: FormKind::ModuleForm,
                algebra_dim,
                space_dim,
                gram: None,
                carrier: None,
                functional: None,
            },
            FormInstance::FunctionalForm { functional, carrier } => FormRecord {
                kind: FormKind::FunctionalForm,
                algebra_dim,
                space_dim,
                gram: None,
                carrier: Some(carrier),
                functional: Some(functional),
            },
        }
    }
}

impl FormInstance {
    pub fn gram(gram: Vec<Vec<AlgebraElement>>) -> Result<Self, FormError> {
        Ok(Self::GramTensor(GramTensor::new(gram)?))
    }

    pub fn module(algebra_dim: usize) -> Self {
        Self::ModuleForm { algebra_dim }
    }

    pub fn functional(functional: PositiveFunctional, carrier: FunctionalCarrier) -> Self {
        Self::FunctionalForm { functional, carrier }
    }

    pub fn kind(&self) -> FormKind {
        match self {
            Self::GramTensor(_) => FormKind::GramTensor,
            Self::ModuleForm { .. } => FormKind::ModuleForm,
            Self::FunctionalForm { .. } => FormKind::FunctionalForm,
        }
    }

    /// Dimension `d` of the values `<x, y>`.
    pub fn algebra_dim(&self) -> usize {
        match self {
            Self::GramTensor(g) => g.algebra_dim,
            Self::ModuleForm { algebra_dim } => *algebra_dim,
            Self::FunctionalForm { .. } => 1,
        }
    }

    /// `n` for Gram tensors; the matrix side (or vector length) otherwise.
    pub fn space_dim(&self) -> usize {
        match self {
            Self::GramTensor(g) => g.space_dim(),
            Self::ModuleForm { algebra_dim } => *algebra_dim,
            Self::FunctionalForm { functional, .. } => functional.dim(),
        }
    }

    fn check_vector(&self, v: &Vector) -> Result<(), FormError> {
        let ok = match (self, v) {
            (Self::GramTensor(g), Vector::Coords(c)) => c.len() == g.space_dim(),
            (Self::ModuleForm { algebra_dim }, Vector::Element(e)) => e.dim() == *algebra_dim,
            (Self::FunctionalForm { functional, carrier: FunctionalCarrier::Vectors }, Vector::Coords(c)) => {
                c.len() == functional.dim()
            }
            (Self::FunctionalForm { functional, carrier: FunctionalCarrier::Algebra }, Vector::Element(e)) => {
                e.dim() == functional.dim()
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(FormError::DimMismatch(format!(
                "vector is not an element of the {:?} space (space_dim {})",
                self.kind(),
                self.space_dim()
            )))
        }
    }

    /// A standard Gaussian element of `X`.
    pub fn random_vector<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        match self {
            Self::GramTensor(g) => Vector::Coords(gaussian_vector(rng, g.space_dim())),
            Self::ModuleForm { algebra_dim } => Vector::Element(gaussian_matrix(rng, *algebra_dim)),
            Self::FunctionalForm { functional, carrier: FunctionalCarrier::Vectors } => {
                Vector::Coords(gaussian_vector(rng, functional.dim()))
            }
            Self::FunctionalForm { functional, carrier: FunctionalCarrier::Algebra } => {
                Vector::Element(gaussian_matrix(rng, functional.dim()))
            }
        }
    }
}

fn as_element(v: &Vector) -> AlgebraElement {
    match v {
        Vector::Coords(c) => AlgebraElement::column_embedding(c),
        Vector::Element(e) => e.clone(),
    }
}

pub fn form_eval(form: &FormInstance, x: &Vector, y: &Vector) -> Result<AlgebraElement, FormError> {
    form.check_vector(x)?;
    form.check_vector(y)?;
    match (form, x, y) {
        (FormInstance::GramTensor(g), Vector::Coords(xc), Vector::Coords(yc)) => {
            let mut acc = AlgebraElement::zeros(g.algebra_dim);
            for (i, xi) in xc.iter().enumerate() {
                for (j, yj) in yc.iter().enumerate() {
                    let coeff = xi * yj.conj();
                    if coeff != Complex64::new(0.0, 0.0) {
                        acc = acc.add(&g.block(i, j).scale(coeff));
                    }
                }
            }
            Ok(acc)
        }
        (FormInstance::ModuleForm { .. }, Vector::Element(u), Vector::Element(v)) => Ok(v.adjoint().mul(u)),
        (FormInstance::FunctionalForm { functional, .. }, _, _) => {
            let value = functional.inner(&as_element(x), &as_element(y))?;
            Ok(AlgebraElement::scalar(value))
        }
        _ => unreachable!("check_vector rejects mismatched kinds"),
    }
}

/// `<x, y>* = <y, x>`; `value` is `|<x,y>* - <y,x>|_F`.
pub fn check_star1(form: &FormInstance, x: &Vector, y: &Vector, tol: Tolerance) -> Result<Check, FormError> {
    let xy = form_eval(form, x, y)?;
    let yx = form_eval(form, y, x)?;
    let deviation = xy.adjoint().sub(&yx).frobenius_norm();
    let scale = xy.frobenius_norm().max(yx.frobenius_norm()).max(1.0);
    Ok(Check::new(deviation <= tol.band(scale), deviation))
}

/// `<y,y>^{1/2} <x,y> = <x,y> <y,y>^{1/2}`; `value` is the commutator norm.
pub fn check_com(form: &FormInstance, x: &Vector, y: &Vector, tol: Tolerance) -> Result<Check, FormError> {
    let xy = form_eval(form, x, y)?;
    let root = sqrt_psd(&form_eval(form, y, y)?, tol)?;
    let deviation = root.commutator(&xy).frobenius_norm();
    let scale = (root.frobenius_norm() * xy.frobenius_norm()).max(1.0);
    Ok(Check::new(deviation <= tol.band(scale), deviation))
}

/// `Re <Omega y - x, x - omega y> >= 0`; `value` is the smallest eigenvalue.
pub fn check_re_condition(
    form: &FormInstance,
    x: &Vector,
    y: &Vector,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<Check, FormError> {
    let one = Complex64::new(1.0, 0.0);
    let left = y.combine(pair.big_omega, x, -one)?;
    let right = x.combine(one, y, -pair.omega)?;
    let m = form_eval(form, &left, &right)?.re_part();
    Ok(loewner_leq(&AlgebraElement::zeros(m.dim()), &m, tol)?)
}

/// `(inf sigma(x) / sup sigma(y), sup sigma(x) / inf sigma(y))` for commuting,
/// strictly positive `x`, `y`, so that `omega y <= x <= Omega y`.
pub fn omega_from_spectra(x: &AlgebraElement, y: &AlgebraElement, tol: Tolerance) -> Result<OmegaPair, FormError> {
    if x.dim() != y.dim() {
        return Err(MatError::DimMismatch { left: x.dim(), right: y.dim() }.into());
    }
    let x = hermitian_checked(x, tol)?;
    let y = hermitian_checked(y, tol)?;
    let (x_lo, x_hi) = matalg::spectrum_bounds(&x, tol)?;
    let (y_lo, y_hi) = matalg::spectrum_bounds(&y, tol)?;
    let lowest = x_lo.min(y_lo);
    if lowest <= tol.atol {
        return Err(FormError::NotStrictlyPositive { min_eigenvalue: lowest });
    }
    let deviation = x.commutator(&y).frobenius_norm();
    if deviation > tol.band(x.frobenius_norm() * y.frobenius_norm()) {
        return Err(FormError::NotCommuting { deviation });
    }
    Ok(OmegaPair::real(x_lo / y_hi, x_hi / y_lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub samples: usize,
    /// Smallest eigenvalue of `<x, x>` over all samples.
    pub worst_min_eigenvalue: f64,
    pub valid: bool,
}

/// Samples Gaussian `x` and checks `<x, x> >= 0` on each.
pub fn validate_positivity(form: &FormInstance, samples: usize, seed: u64, tol: Tolerance) -> Result<PositivityReport, FormError> {
    let mut worst = f64::INFINITY;
    let mut valid = true;
    for k in 0..samples {
        let mut rng = trial_rng(seed, k as u64);
        let x = form.random_vector(&mut rng);
        let xx = form_eval(form, &x, &x)?;
        // Non-Hermitian <x,x> is itself a positivity failure.
        let Ok(h) = hermitian_checked(&xx, tol) else {
            valid = false;
            worst = f64::NEG_INFINITY;
            continue;
        };
        let min = eig_hermitian(&h, tol)?.min();
        worst = worst.min(min);
        if min < -tol.band(h.frobenius_norm()) {
            valid = false;
        }
    }
    Ok(PositivityReport {
        samples,
        worst_min_eigenvalue: if samples == 0 { 0.0 } else { worst },
        valid,
    })
}

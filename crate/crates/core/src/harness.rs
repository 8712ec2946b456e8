//! Seeded instance generators, a cofactor oracle for positivity, and the fuzz
//! loop.
//!
//! Trial `k` of a campaign draws everything from `trial_rng(seed, k)`, so a
//! campaign gives the same summary whether trials run serially, in parallel,
//! or one at a time through [`replay`].

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    additive_matrix_bound, functional_additive_bound, functional_multiplicative_bound, functional_re_condition,
    greub_rheinboldt, integral_bounds, multiplicative_matrix_bound, operator_pair_bounds, polya_szego_improved,
    polya_szego_multiplicative, weighted_additive, BoundError, BoundReport, InequalityId, ScalarWindow, Verdict,
    WeightedSequences,
};
use crate::forms::{omega_from_spectra, FormError, FormInstance, FunctionalCarrier, OmegaPair, PositiveFunctional, Vector};
use crate::matalg::{AlgebraElement, Tolerance};
use crate::rng::{complex_gaussian, gaussian_matrix, gaussian_vector, trial_rng};

pub const REJECTION_CAP: usize = 1000;
pub const MAX_DIM: usize = 16;
pub const ORACLE_MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("no acceptable sample after {attempts} attempts")]
    RejectionCapExceeded { attempts: usize },
    #[error("dimension {dim} is too large for the cofactor oracle (max {max})")]
    DimTooLarge { dim: usize, max: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

impl From<FormError> for HarnessError {
    fn from(e: FormError) -> Self {
        HarnessError::Bound(e.into())
    }
}

/// Sampling ranges for random windows: `a`, `b` log-uniform in `low`, and
/// `A / a`, `B / b` log-uniform in `ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRanges {
    pub low: (f64, f64),
    pub ratio: (f64, f64),
}

impl Default for WindowRanges {
    fn default() -> Self {
        Self {
            low: (0.1, 10.0),
            ratio: (1.0, 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Algebra dimensions `d`, one drawn per trial.
    pub dims: Vec<usize>,
    /// Sequence lengths `n`, one drawn per trial.
    pub space_dims: Vec<usize>,
    pub trials: usize,
    pub spectrum_range: (f64, f64),
    pub window_ranges: WindowRanges,
    pub tolerance: Tolerance,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dims: vec![1, 2, 3, 4],
            space_dims: vec![1, 2, 4, 8, 16],
            trials: 100,
            spectrum_range: (0.1, 10.0),
            window_ranges: WindowRanges::default(),
            tolerance: Tolerance::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self {
            seed,
            trials,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
            return bad(format!("dims must be a nonempty subset of 1..={MAX_DIM}, got {:?}", self.dims));
        }
        if self.space_dims.is_empty() || self.space_dims.contains(&0) {
            return bad(format!("space_dims must be nonempty and positive, got {:?}", self.space_dims));
        }
        let (lo, hi) = self.spectrum_range;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return bad(format!("spectrum_range needs 0 < lo < hi, got ({lo}, {hi})"));
        }
        let WindowRanges { low, ratio } = self.window_ranges;
        if !(low.0 > 0.0 && low.0 <= low.1 && ratio.0 >= 1.0 && ratio.0 <= ratio.1 && low.1.is_finite() && ratio.1.is_finite()) {
            return bad(format!("window ranges need 0 < low.0 <= low.1 and 1 <= ratio.0 <= ratio.1, got {:?}", self.window_ranges));
        }
        Ok(())
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Uniform on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn pick<R: Rng + ?Sized, T: Copy>(rng: &mut R, xs: &[T]) -> T {
    xs[rng.random_range(0..xs.len())]
}

/// Haar-like unitary: modified Gram-Schmidt, applied twice, on the columns of
/// a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> AlgebraElement {
    let g = gaussian_matrix(rng, d);
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|j| (0..d).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..d {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[k];
                let c: Complex64 = q.iter().zip(&rest[0]).map(|(qi, vi)| qi.conj() * vi).sum();
                for (vi, qi) in rest[0].iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= n;
        }
    }
    AlgebraElement::from_fn(d, |i, j| cols[j][i])
}

pub fn gen_random_unitary(d: usize, seed: u64) -> AlgebraElement {
    random_unitary(&mut trial_rng(seed, 0), d)
}

/// `U diag(values) U*`, made exactly Hermitian.
pub fn conjugate_diagonal(u: &AlgebraElement, values: &[f64]) -> AlgebraElement {
    u.mul(&AlgebraElement::diag(values)).mul(&u.adjoint()).re_part()
}

/// `T = U D1 U*`, `S = U D2 U*` with diagonals log-uniform in `spectrum_range`.
pub fn commuting_positive_pair<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    spectrum_range: (f64, f64),
) -> (AlgebraElement, AlgebraElement) {
    let u = random_unitary(rng, d);
    let d1: Vec<f64> = (0..d).map(|_| log_uniform(rng, spectrum_range)).collect();
    let d2: Vec<f64> = (0..d).map(|_| log_uniform(rng, spectrum_range)).collect();
    (conjugate_diagonal(&u, &d1), conjugate_diagonal(&u, &d2))
}

pub fn gen_commuting_positive_pair(d: usize, seed: u64, spectrum_range: (f64, f64)) -> (AlgebraElement, AlgebraElement) {
    commuting_positive_pair(&mut trial_rng(seed, 0), d, spectrum_range)
}

pub fn random_window<R: Rng + ?Sized>(rng: &mut R, ranges: WindowRanges) -> ScalarWindow {
    let a = log_uniform(rng, ranges.low);
    let big_a = a * log_uniform(rng, ranges.ratio);
    let b = log_uniform(rng, ranges.low);
    let big_b = b * log_uniform(rng, ranges.ratio);
    ScalarWindow::new(a, big_a, b, big_b).expect("sampled window is valid")
}

/// Uniform samples in the window with weights uniform in `(0, 1]` (or all ones).
/// For `n >= 4` the first four samples are pinned so that `a_0 = a`,
/// `a_1 = A`, `b_2 = b`, `b_3 = B` and the window is tight.
pub fn bounded_sequences<R: Rng + ?Sized>(rng: &mut R, n: usize, window: ScalarWindow, unit_weights: bool) -> WeightedSequences {
    let uniform = |rng: &mut R, lo: f64, hi: f64| (lo + rng.random::<f64>() * (hi - lo)).min(hi);
    let mut a: Vec<f64> = (0..n).map(|_| uniform(rng, window.a, window.big_a)).collect();
    let mut b: Vec<f64> = (0..n).map(|_| uniform(rng, window.b, window.big_b)).collect();
    if n >= 4 {
        a[0] = window.a;
        a[1] = window.big_a;
        b[2] = window.b;
        b[3] = window.big_b;
    }
    let w = if unit_weights {
        vec![1.0; n]
    } else {
        (0..n).map(|_| open_unit(rng)).collect()
    };
    WeightedSequences::weighted(a, b, w, window).expect("generated sequences lie in their window")
}

pub fn gen_bounded_sequences(n: usize, window: ScalarWindow, seed: u64) -> WeightedSequences {
    bounded_sequences(&mut trial_rng(seed, 0), n, window, false)
}

/// Construction used for instances satisfying the Re condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Module form on `M_d` with commuting strictly positive `x`, `y` and the
    /// pair read off their spectra.
    ModuleCommuting,
    /// Functional form with `x` in the disk whose diameter joins `omega y` and
    /// `Omega y`, by rejection.
    FunctionalDisk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReValidInstance {
    pub form: FormInstance,
    pub x: Vector,
    pub y: Vector,
    pub omega_pair: OmegaPair,
}

fn random_functional<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PositiveFunctional {
    match rng.random_range(0..3) {
        0 => PositiveFunctional::vector_state(gaussian_vector(rng, d)),
        1 => PositiveFunctional::trace(d),
        _ => PositiveFunctional::weighted_sum((0..d).map(|_| open_unit(rng)).collect()),
    }
    .expect("sampled functional is valid")
}

/// `omega` a complex Gaussian, `Omega = omega * rho e^{i theta}` with
/// `rho in [1, 4]`, `|theta| < 1.2`, so `Re(conj(omega) Omega) > 0`.
fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> OmegaPair {
    let omega = complex_gaussian(rng);
    let omega = if omega.norm() < 1e-3 { Complex64::new(1.0, 0.0) } else { omega };
    let rho = 1.0 + 3.0 * rng.random::<f64>();
    let theta = 1.2 * (2.0 * rng.random::<f64>() - 1.0);
    OmegaPair::new(omega, omega * Complex64::from_polar(rho, theta))
}

pub fn gen_re_valid_instance<R: Rng + ?Sized>(
    rng: &mut R,
    kind: GeneratorKind,
    d: usize,
    spectrum_range: (f64, f64),
    tol: Tolerance,
) -> Result<ReValidInstance, HarnessError> {
    match kind {
        GeneratorKind::ModuleCommuting => {
            let (t, s) = commuting_positive_pair(rng, d, spectrum_range);
            let omega_pair = omega_from_spectra(&t, &s, tol)?;
            Ok(ReValidInstance {
                form: FormInstance::module(d),
                x: Vector::Element(t),
                y: Vector::Element(s),
                omega_pair,
            })
        }
        GeneratorKind::FunctionalDisk => {
            let phi = random_functional(rng, d);
            let pair = random_pair(rng);
            let (x, y) = disk_sample(rng, &phi, pair, tol)?;
            Ok(ReValidInstance {
                form: FormInstance::functional(phi, FunctionalCarrier::Algebra),
                x: Vector::Element(x),
                y: Vector::Element(y),
                omega_pair: pair,
            })
        }
    }
}

/// `x = c y + h u` with `c = (Omega + omega)/2`, `h = (Omega - omega)/2` and
/// `phi(u*u) = r^2 phi(y*y)`, `r in [0, 1.25]`. The Re value is
/// `|h|^2 (phi(y*y) - phi(u*u))`, so draws with `r > 1` are rejected.
pub fn disk_sample<R: Rng + ?Sized>(
    rng: &mut R,
    phi: &PositiveFunctional,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<(AlgebraElement, AlgebraElement), HarnessError> {
    let d = phi.dim();
    let c = (pair.big_omega + pair.omega) * 0.5;
    let h = (pair.big_omega - pair.omega) * 0.5;
    for _ in 0..REJECTION_CAP {
        let y = gaussian_matrix(rng, d);
        let g = gaussian_matrix(rng, d);
        let r = 1.25 * rng.random::<f64>();
        let yy = phi.inner(&y, &y)?.re;
        let gg = phi.inner(&g, &g)?.re;
        if !(yy > 0.0 && gg > 0.0) {
            continue;
        }
        let u = g.scale_real(r * (yy / gg).sqrt());
        let x = y.scale(c).add(&u.scale(h));
        if functional_re_condition(phi, &x, &y, pair, tol)?.holds {
            return Ok((x, y));
        }
    }
    Err(HarnessError::RejectionCapExceeded { attempts: REJECTION_CAP })
}

/// Result of the cofactor positivity oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorsVerdict {
    pub psd: bool,
    /// Smallest principal minor, each divided by `scale^k` for its size `k`.
    pub min_scaled_minor: f64,
}

fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    match m.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<Complex64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, z)| *z).collect()).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[0][j] * cofactor_det(&minor) * sign
            })
            .sum(),
    }
}

/// PSD test by the signs of all principal minors, computed by cofactor
/// expansion. A minor of size `k` counts as nonnegative when it is at least
/// `-1e-12 * scale^k` with `scale = max(||A||_F, 1)`.
pub fn oracle_psd_minors(a: &AlgebraElement) -> Result<MinorsVerdict, HarnessError> {
    let d = a.dim();
    if d > ORACLE_MAX_DIM {
        return Err(HarnessError::DimTooLarge { dim: d, max: ORACLE_MAX_DIM });
    }
    let scale = a.frobenius_norm().max(1.0);
    let mut min_scaled = f64::INFINITY;
    for mask in 1u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<Complex64>> = idx.iter().map(|&i| idx.iter().map(|&j| a.get(i, j)).collect()).collect();
        let det = cofactor_det(&sub).re / scale.powi(idx.len() as i32);
        min_scaled = min_scaled.min(det);
    }
    Ok(MinorsVerdict {
        psd: min_scaled >= -1e-12,
        min_scaled_minor: min_scaled,
    })
}

/// Evaluates trial `trial` of a campaign for `id`.
pub fn run_trial(config: &GeneratorConfig, id: InequalityId, trial: u64) -> Result<BoundReport, HarnessError> {
    let mut rng = trial_rng(config.seed, trial);
    let rng = &mut rng;
    let tol = config.tolerance;
    let d = pick(rng, &config.dims);
    let n = pick(rng, &config.space_dims);
    use InequalityId::*;
    let report = match id {
        AddMatrix14 | MultMatrixStar => {
            let inst = gen_re_valid_instance(rng, GeneratorKind::ModuleCommuting, d, config.spectrum_range, tol)?;
            if id == AddMatrix14 {
                additive_matrix_bound(&inst.form, &inst.x, &inst.y, inst.omega_pair, tol)?
            } else {
                multiplicative_matrix_bound(&inst.form, &inst.x, &inst.y, inst.omega_pair, tol)?
            }
        }
        AddFunc | MultFunc => {
            let inst = gen_re_valid_instance(rng, GeneratorKind::FunctionalDisk, d, config.spectrum_range, tol)?;
            let FormInstance::FunctionalForm { functional, .. } = &inst.form else {
                unreachable!("disk instances carry a functional form")
            };
            let (Vector::Element(x), Vector::Element(y)) = (&inst.x, &inst.y) else {
                unreachable!("disk instances live in the algebra")
            };
            if id == AddFunc {
                functional_additive_bound(functional, x, y, inst.omega_pair, tol)?
            } else {
                functional_multiplicative_bound(functional, x, y, inst.omega_pair, tol)?
            }
        }
        OpPairAdd | OpPairMult => {
            let (t, s) = commuting_positive_pair(rng, d, config.spectrum_range);
            let v = gaussian_vector(rng, d);
            let r = operator_pair_bounds(&t, &s, &v, tol)?;
            if id == OpPairAdd {
                r.additive
            } else {
                r.multiplicative
            }
        }
        IntAddD1 | IntMultD2 | GreubRheinboldt | WeightedAddDo => {
            let window = random_window(rng, config.window_ranges);
            let data = bounded_sequences(rng, n, window, false);
            match id {
                IntAddD1 => integral_bounds(&data, tol)?.0,
                IntMultD2 => integral_bounds(&data, tol)?.1,
                GreubRheinboldt => greub_rheinboldt(&data, tol)?,
                _ => weighted_additive(&data, tol)?,
            }
        }
        PsMult | PsAdd | PsImprovedGood => {
            let window = random_window(rng, config.window_ranges);
            let data = bounded_sequences(rng, n, window, true);
            match id {
                PsMult => polya_szego_multiplicative(&data, tol)?,
                PsAdd => polya_szego_improved(&data, tol)?.classical_additive,
                _ => polya_szego_improved(&data, tol)?.report,
            }
        }
    };
    Ok(report)
}

/// Same as [`run_trial`]; named for replaying a recorded trial.
pub fn replay(config: &GeneratorConfig, id: InequalityId, trial: u64) -> Result<BoundReport, HarnessError> {
    run_trial(config, id, trial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub inequality_id: InequalityId,
    pub seed: u64,
    pub trials_run: usize,
    pub holds: usize,
    pub violated: usize,
    /// Includes trials whose generator or evaluator reported an error.
    pub precondition_failed: usize,
    /// Smallest margin over trials with a verdict; `None` if there were none.
    pub worst_margin: Option<f64>,
    pub worst_relative_margin: Option<f64>,
    /// Trial index attaining `worst_margin`; replay with the same seed.
    pub worst_trial: Option<u64>,
}

impl FuzzSummary {
    fn empty(id: InequalityId, seed: u64) -> Self {
        Self {
            inequality_id: id,
            seed,
            trials_run: 0,
            holds: 0,
            violated: 0,
            precondition_failed: 0,
            worst_margin: None,
            worst_relative_margin: None,
            worst_trial: None,
        }
    }

    fn record(&mut self, trial: u64, outcome: &Result<BoundReport, HarnessError>) {
        self.trials_run += 1;
        let report = match outcome {
            Ok(r) => r,
            Err(_) => {
                self.precondition_failed += 1;
                return;
            }
        };
        match report.verdict {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::PreconditionFailed => self.precondition_failed += 1,
        }
        if let Some(m) = report.margin {
            if self.worst_margin.is_none_or(|w| m < w) {
                self.worst_margin = Some(m);
                self.worst_trial = Some(trial);
            }
        }
        if let Some(rm) = report.relative_margin() {
            if self.worst_relative_margin.is_none_or(|w| rm < w) {
                self.worst_relative_margin = Some(rm);
            }
        }
    }

    /// The campaign passes when nothing was violated.
    pub fn passed(&self) -> bool {
        self.violated == 0
    }
}

pub fn fuzz_run(config: &GeneratorConfig, id: InequalityId) -> Result<FuzzSummary, HarnessError> {
    config.validate()?;
    let mut summary = FuzzSummary::empty(id, config.seed);
    for k in 0..config.trials as u64 {
        summary.record(k, &run_trial(config, id, k));
    }
    Ok(summary)
}

/// Parallel trials, folded in trial order: identical to [`fuzz_run`].
pub fn fuzz_run_parallel(config: &GeneratorConfig, id: InequalityId) -> Result<FuzzSummary, HarnessError> {
    config.validate()?;
    let outcomes: Vec<_> = (0..config.trials as u64).into_par_iter().map(|k| run_trial(config, id, k)).collect();
    let mut summary = FuzzSummary::empty(id, config.seed);
    for (k, outcome) in outcomes.iter().enumerate() {
        summary.record(k as u64, outcome);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{check_com, check_re_condition, check_star1, form_eval};
    use crate::matalg::{eig_hermitian, is_normal};

    #[test]
    fn unitary_residual_and_seed_dependence() {
        for d in [1, 2, 5, 16] {
            let u = gen_random_unitary(d, 3);
            let r = u.adjoint().mul(&u).sub(&AlgebraElement::identity(d)).frobenius_norm();
            assert!(r <= 1e-12, "d={d} residual {r}");
        }
        assert!((gen_random_unitary(1, 9).get(0, 0).norm() - 1.0).abs() < 1e-15);
        for s in 0..10 {
            let u1 = gen_random_unitary(3, 2 * s);
            let u2 = gen_random_unitary(3, 2 * s + 1);
            assert!(u1.sub(&u2).frobenius_norm() > 1e-6);
        }
    }

    #[test]
    fn commuting_pairs_commute_and_are_positive() {
        let tol = Tolerance::default();
        for (seed, d) in [(1, 1), (2, 3), (3, 8)] {
            let (t, s) = gen_commuting_positive_pair(d, seed, (0.1, 10.0));
            assert!(t.commutator(&s).frobenius_norm() <= 1e-10 * t.frobenius_norm() * s.frobenius_norm());
            assert!(eig_hermitian(&t, tol).unwrap().min() > 0.0);
            assert!(eig_hermitian(&s, tol).unwrap().min() > 0.0);
            omega_from_spectra(&t, &s, tol).unwrap();
        }
        let u = gen_random_unitary(4, 5);
        let t = conjugate_diagonal(&u, &[1.0, 2.0, 3.0, 4.0]);
        let s = conjugate_diagonal(&u, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.commutator(&s).frobenius_norm(), 0.0);
    }

    #[test]
    fn sequences_pin_window_endpoints() {
        let w = ScalarWindow::new(0.5, 2.0, 1.0, 3.0).unwrap();
        let s = gen_bounded_sequences(4, w, 11);
        assert!(s.a().contains(&0.5) && s.a().contains(&2.0));
        assert!(s.b().contains(&1.0) && s.b().contains(&3.0));
        assert!(s.w().iter().all(|&x| x > 0.0 && x <= 1.0));
        s.check_window().unwrap();

        let tight = ScalarWindow::new(1.5, 1.5, 0.25, 0.25).unwrap();
        let one = gen_bounded_sequences(1, tight, 0);
        assert_eq!((one.a(), one.b()), (&[1.5][..], &[0.25][..]));
    }

    #[test]
    fn module_instances_meet_all_hypotheses() {
        let tol = Tolerance::default();
        for k in 0..50 {
            let mut rng = trial_rng(7, k);
            let inst = gen_re_valid_instance(&mut rng, GeneratorKind::ModuleCommuting, 1 + (k as usize % 5), (0.1, 10.0), tol).unwrap();
            let f = &inst.form;
            assert!(check_star1(f, &inst.x, &inst.y, tol).unwrap().holds);
            assert!(check_com(f, &inst.x, &inst.y, tol).unwrap().holds);
            assert!(is_normal(&form_eval(f, &inst.x, &inst.y).unwrap(), tol).holds);
            let re = check_re_condition(f, &inst.x, &inst.y, inst.omega_pair, tol).unwrap();
            assert!(re.holds, "trial {k}: {re:?}");
        }
    }

    #[test]
    fn scalar_disk_instances_lie_in_the_disk() {
        let tol = Tolerance::default();
        for k in 0..100 {
            let mut rng = trial_rng(13, k);
            let inst = gen_re_valid_instance(&mut rng, GeneratorKind::FunctionalDisk, 1, (0.1, 10.0), tol).unwrap();
            let (Vector::Element(x), Vector::Element(y)) = (&inst.x, &inst.y) else { panic!() };
            let ratio = x.get(0, 0) / y.get(0, 0);
            let p = inst.omega_pair;
            let center = (p.big_omega + p.omega) * 0.5;
            let radius = (p.big_omega - p.omega).norm() * 0.5;
            assert!((ratio - center).norm() <= radius * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn degenerate_disk_forces_x_parallel_to_y() {
        let tol = Tolerance::default();
        let phi = PositiveFunctional::trace(2).unwrap();
        let omega = Complex64::new(0.5, 1.0);
        let (x, y) = disk_sample(&mut trial_rng(1, 0), &phi, OmegaPair::new(omega, omega), tol).unwrap();
        assert!(x.sub(&y.scale(omega)).frobenius_norm() <= 1e-12 * y.frobenius_norm());
    }

    #[test]
    fn oracle_known_answers() {
        assert!(oracle_psd_minors(&AlgebraElement::identity(3)).unwrap().psd);
        let m = AlgebraElement::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        let v = oracle_psd_minors(&m).unwrap();
        assert!(!v.psd);
        assert!((v.min_scaled_minor * m.frobenius_norm().powi(2) + 3.0).abs() < 1e-12);
        assert!(matches!(
            oracle_psd_minors(&AlgebraElement::identity(5)),
            Err(HarnessError::DimTooLarge { dim: 5, max: 4 })
        ));
    }

    #[test]
    fn zero_trials_give_empty_summary() {
        let cfg = GeneratorConfig::new(1, 0);
        let s = fuzz_run(&cfg, InequalityId::MultMatrixStar).unwrap();
        assert_eq!((s.trials_run, s.holds, s.violated, s.precondition_failed), (0, 0, 0, 0));
        assert_eq!(s.worst_margin, None);
    }

    #[test]
    fn every_inequality_fuzzes_cleanly() {
        for &id in InequalityId::ALL {
            let cfg = GeneratorConfig::new(5, 40);
            let s = fuzz_run(&cfg, id).unwrap();
            assert_eq!(s.violated, 0, "{id}: {s:?}");
            assert_eq!(s.precondition_failed, 0, "{id}: {s:?}");
            assert_eq!(s.holds, 40);
        }
    }

    #[test]
    fn replay_reproduces_worst_margin() {
        let cfg = GeneratorConfig::new(42, 60);
        let s = fuzz_run(&cfg, InequalityId::AddFunc).unwrap();
        let r = replay(&cfg, InequalityId::AddFunc, s.worst_trial.unwrap()).unwrap();
        assert_eq!(r.margin.unwrap().to_bits(), s.worst_margin.unwrap().to_bits());
    }

    #[test]
    fn parallel_matches_serial() {
        let cfg = GeneratorConfig::new(9, 64);
        assert_eq!(fuzz_run(&cfg, InequalityId::GreubRheinboldt), fuzz_run_parallel(&cfg, InequalityId::GreubRheinboldt));
    }

    #[test]
    fn config_validation() {
        let mut cfg = GeneratorConfig::default();
        cfg.dims = vec![17];
        assert!(fuzz_run(&cfg, InequalityId::AddFunc).is_err());
        cfg.dims = vec![2];
        cfg.spectrum_range = (1.0, 1.0);
        assert!(cfg.validate().is_err());
    }
}

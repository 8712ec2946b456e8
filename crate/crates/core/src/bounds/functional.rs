//! Scalar bounds through a positive linear functional, the sharpness witness,
//! and the commuting operator-pair corollary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::forms::{omega_from_spectra, FormError, OmegaPair, PositiveFunctional};
use crate::matalg::{spectrum_bounds, AlgebraElement, Check, Tolerance};

use super::{require_positive_re, BoundError, BoundReport, InequalityId, NamedCheck, Side};

/// `Re phi((x - omega y)* (Omega y - x)) >= 0`, thresholded at the magnitude of
/// the terms in its expansion.
pub fn functional_re_condition(
    phi: &PositiveFunctional,
    x: &AlgebraElement,
    y: &AlgebraElement,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<Check, FormError> {
    let left = x.sub(&y.scale(pair.omega));
    let right = y.scale(pair.big_omega).sub(x);
    let value = phi.apply(&left.adjoint().mul(&right))?.re;
    let scale = phi.inner(x, x)?.re
        + pair.omega.norm() * pair.big_omega.norm() * phi.inner(y, y)?.re
        + (pair.omega.norm() + pair.big_omega.norm()) * phi.inner(x, y)?.norm();
    Ok(Check::new(value >= -tol.band(scale.max(1.0)), value))
}

struct FunctionalValues {
    xx: f64,
    yy: f64,
    yx: Complex64,
}

fn values(phi: &PositiveFunctional, x: &AlgebraElement, y: &AlgebraElement) -> Result<FunctionalValues, FormError> {
    Ok(FunctionalValues {
        xx: phi.inner(x, x)?.re,
        yy: phi.inner(y, y)?.re,
        yx: phi.inner(x, y)?,
    })
}

/// `phi(x*x) phi(y*y) - |phi(y*x)|^2  <=  |Omega - omega|^2 / 4 * phi(y*y)^2`
pub fn functional_additive_bound(
    phi: &PositiveFunctional,
    x: &AlgebraElement,
    y: &AlgebraElement,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<BoundReport, BoundError> {
    let pre = vec![NamedCheck::from_check("re_condition", functional_re_condition(phi, x, y, pair, tol)?)];
    let v = values(phi, x, y)?;
    let lhs = v.xx * v.yy - v.yx.norm_sqr();
    let rhs = pair.additive_constant() * v.yy * v.yy;
    Ok(BoundReport::scalar(InequalityId::AddFunc, pre, lhs, rhs, tol).with_omega(pair))
}

/// `phi(x*x)^{1/2} phi(y*y)^{1/2}  <=  (|Omega|+|omega|) / (2 Re(conj(omega) Omega)^{1/2}) * |phi(y*x)|`
pub fn functional_multiplicative_bound(
    phi: &PositiveFunctional,
    x: &AlgebraElement,
    y: &AlgebraElement,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<BoundReport, BoundError> {
    let re = require_positive_re(pair)?;
    let pre = vec![
        NamedCheck::from_check("re_condition", functional_re_condition(phi, x, y, pair, tol)?),
        NamedCheck::new("re_omega_positive", true, re),
    ];
    let v = values(phi, x, y)?;
    let lhs = v.xx.max(0.0).sqrt() * v.yy.max(0.0).sqrt();
    let rhs = 0.5 * (pair.big_omega.norm() + pair.omega.norm()) / re.sqrt() * v.yx.norm();
    Ok(BoundReport::scalar(InequalityId::MultFunc, pre, lhs, rhs, tol).with_omega(pair))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessWitness {
    /// `y` rescaled so that `phi(y*y) = 1`.
    pub y: AlgebraElement,
    /// Unit vector orthogonal to `y` under `phi`; absent when `omega = Omega`.
    pub z: Option<AlgebraElement>,
    pub x: AlgebraElement,
    pub report: BoundReport,
    /// `LHS / (|Omega - omega|^2 phi(y*y)^2)`; `None` when `omega = Omega`.
    pub ratio: Option<f64>,
    /// `Re phi((x - omega y)* (Omega y - x))`, zero by construction.
    pub re_value: f64,
}

/// Builds `x = (Omega + omega)/2 y + (Omega - omega)/2 z`, which attains the
/// constant `1/4` in the additive functional bound.
pub fn sharpness_witness(
    phi: &PositiveFunctional,
    y: &AlgebraElement,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<SharpnessWitness, BoundError> {
    let yy = phi.inner(y, y)?.re;
    if !(yy > tol.atol) {
        return Err(FormError::DegenerateSpace.into());
    }
    let y = y.scale_real(1.0 / yy.sqrt());
    let half_sum = (pair.big_omega + pair.omega) * 0.5;
    let half_diff = (pair.big_omega - pair.omega) * 0.5;

    let (x, z) = if pair.omega == pair.big_omega {
        (y.scale(pair.omega), None)
    } else {
        let z = phi.orthogonal_unit(&y)?;
        (y.scale(half_sum).add(&z.scale(half_diff)), Some(z))
    };

    let report = functional_additive_bound(phi, &x, &y, pair, tol)?;
    let left = x.sub(&y.scale(pair.omega));
    let right = y.scale(pair.big_omega).sub(&x);
    let re_value = phi.apply(&left.adjoint().mul(&right))?.re;
    let yy = phi.inner(&y, &y)?.re;
    let denom = (pair.big_omega - pair.omega).norm_sqr() * yy * yy;
    let ratio = z.as_ref().map(|_| report.lhs_scalar().unwrap_or(f64::NAN) / denom);
    let scale = half_sum.norm_sqr() + half_diff.norm_sqr();
    let report = report.with_cross_check(NamedCheck::new(
        "re_condition_equality",
        re_value.abs() <= tol.band(scale.max(1.0)),
        re_value,
    ));
    Ok(SharpnessWitness {
        y,
        z,
        x,
        report,
        ratio,
        re_value,
    })
}

/// Both sides of the operator-pair bounds evaluated directly from `Tv`, `Sv`
/// and the spectral extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorPairClosedForm {
    pub additive_lhs: f64,
    pub additive_rhs: f64,
    pub multiplicative_lhs: f64,
    pub multiplicative_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorPairReport {
    pub additive: BoundReport,
    pub multiplicative: BoundReport,
    pub closed_form: OperatorPairClosedForm,
}

/// Bounds for commuting strictly positive `T`, `S` and a vector `v`.
///
/// Evaluated through `phi(R) = <R v, v>` with `x = T`, `y = S`: the additive
/// bound is the smaller of the two functional bounds obtained with the pairs
/// from `(T, S)` and `(S, T)`. The closed-form expressions are computed
/// separately from the spectra and recorded as cross-checks.
pub fn operator_pair_bounds(
    t: &AlgebraElement,
    s: &AlgebraElement,
    v: &[Complex64],
    tol: Tolerance,
) -> Result<OperatorPairReport, BoundError> {
    let phi = PositiveFunctional::vector_state(v.to_vec())?;
    let pair_ts = omega_from_spectra(t, s, tol)?;
    let pair_st = omega_from_spectra(s, t, tol)?;
    let t = t.re_part();
    let s = s.re_part();

    let via_s = functional_additive_bound(&phi, &t, &s, pair_ts, tol)?;
    let via_t = functional_additive_bound(&phi, &s, &t, pair_st, tol)?;
    let lhs = via_s.lhs_scalar().expect("scalar report");
    let rhs = via_s.rhs_scalar().expect("scalar report").min(via_t.rhs_scalar().expect("scalar report"));
    let mut pre = Vec::new();
    pre.extend(via_s.preconditions.iter().map(|p| NamedCheck { name: format!("{}(T,S)", p.name), ..p.clone() }));
    pre.extend(via_t.preconditions.iter().map(|p| NamedCheck { name: format!("{}(S,T)", p.name), ..p.clone() }));
    let additive = BoundReport::scalar(InequalityId::OpPairAdd, pre, lhs, rhs, tol).with_omega(pair_ts);

    let mut multiplicative = functional_multiplicative_bound(&phi, &t, &s, pair_ts, tol)?;
    multiplicative.inequality_id = InequalityId::OpPairMult;

    let closed = closed_form(&t, &s, v, tol)?;
    let agree = |a: f64, b: f64| {
        let d = (a - b).abs();
        NamedCheck::new("closed_form_agreement", d <= 1e-12 * a.abs().max(b.abs()).max(1.0), d)
    };
    let additive = additive
        .with_cross_check(NamedCheck { name: "closed_form_lhs".into(), ..agree(lhs, closed.additive_lhs) })
        .with_cross_check(NamedCheck { name: "closed_form_rhs".into(), ..agree(rhs, closed.additive_rhs) });
    let (ml, mr) = match (&multiplicative.lhs, &multiplicative.rhs) {
        (Side::Scalar(l), Side::Scalar(r)) => (*l, *r),
        _ => unreachable!("functional reports are scalar"),
    };
    let multiplicative = multiplicative
        .with_cross_check(NamedCheck { name: "closed_form_lhs".into(), ..agree(ml, closed.multiplicative_lhs) })
        .with_cross_check(NamedCheck { name: "closed_form_rhs".into(), ..agree(mr, closed.multiplicative_rhs) });

    Ok(OperatorPairReport {
        additive,
        multiplicative,
        closed_form: closed,
    })
}

fn closed_form(t: &AlgebraElement, s: &AlgebraElement, v: &[Complex64], tol: Tolerance) -> Result<OperatorPairClosedForm, BoundError> {
    let (t_lo, t_hi) = spectrum_bounds(t, tol)?;
    let (s_lo, s_hi) = spectrum_bounds(s, tol)?;
    let tv = t.mul_vec(v);
    let sv = s.mul_vec(v);
    let norm_sq = |u: &[Complex64]| u.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let tv2 = norm_sq(&tv);
    let sv2 = norm_sq(&sv);
    let inner: Complex64 = tv.iter().zip(&sv).map(|(a, b)| a * b.conj()).sum();

    let half_gap = (t_hi * s_hi - t_lo * s_lo) / 2.0;
    let bracket = (sv2 * sv2 / (s_hi * s_hi * s_lo * s_lo)).min(tv2 * tv2 / (t_hi * t_hi * t_lo * t_lo));
    let low = t_lo * s_lo;
    let high = t_hi * s_hi;
    Ok(OperatorPairClosedForm {
        additive_lhs: tv2 * sv2 - inner.norm_sqr(),
        additive_rhs: half_gap * half_gap * bracket,
        multiplicative_lhs: tv2.sqrt() * sv2.sqrt(),
        multiplicative_rhs: 0.5 * ((low / high).sqrt() + (high / low).sqrt()) * inner.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Verdict;
    use crate::rng::{gaussian_matrix, trial_rng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn additive_trivial_equality() {
        let phi = PositiveFunctional::trace(2).unwrap();
        let y = AlgebraElement::diag(&[1.0, 2.0]);
        let r = functional_additive_bound(&phi, &y, &y, OmegaPair::real(1.0, 1.0), Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.lhs_scalar(), Some(0.0));
        assert_eq!(r.rhs_scalar(), Some(0.0));
    }

    #[test]
    fn additive_trace_hand_instance() {
        // phi(x*x) = 13, phi(y*x) = 5, phi(y*y) = 2.
        let phi = PositiveFunctional::trace(2).unwrap();
        let r = functional_additive_bound(
            &phi,
            &AlgebraElement::diag(&[2.0, 3.0]),
            &AlgebraElement::identity(2),
            OmegaPair::real(2.0, 3.0),
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(r.lhs_scalar(), Some(1.0));
        assert_eq!(r.rhs_scalar(), Some(1.0));
        assert_eq!(r.margin, Some(0.0));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn multiplicative_equality_at_x_equals_omega_y() {
        let phi = PositiveFunctional::trace(1).unwrap();
        let r = functional_multiplicative_bound(
            &phi,
            &AlgebraElement::real_scalar(2.0),
            &AlgebraElement::real_scalar(1.0),
            OmegaPair::real(2.0, 2.0),
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(r.lhs_scalar(), Some(2.0));
        assert_eq!(r.rhs_scalar(), Some(2.0));
    }

    #[test]
    fn multiplicative_constant_functions() {
        // f = 3, g = 0.5 on three weighted points: window a = A, b = B.
        let phi = PositiveFunctional::weighted_sum(vec![0.2, 0.3, 0.5]).unwrap();
        let f = AlgebraElement::identity(3).scale_real(3.0);
        let g = AlgebraElement::identity(3).scale_real(0.5);
        let pair = omega_from_spectra(&f, &g, Tolerance::default()).unwrap();
        let r = functional_multiplicative_bound(&phi, &f, &g, pair, Tolerance::default()).unwrap();
        let (l, rr) = (r.lhs_scalar().unwrap(), r.rhs_scalar().unwrap());
        assert!((l / rr - 1.0).abs() < 1e-15);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn multiplicative_rejects_non_positive_re() {
        let phi = PositiveFunctional::trace(1).unwrap();
        let one = AlgebraElement::real_scalar(1.0);
        let err = functional_multiplicative_bound(&phi, &one, &one, OmegaPair::new(c(1.0), Complex64::new(0.0, 1.0)), Tolerance::default());
        assert!(matches!(err, Err(BoundError::NonPositiveReOmega { .. })));
    }

    #[test]
    fn sharpness_hand_instance() {
        let phi = PositiveFunctional::vector_state(vec![c(1.0), c(0.0)]).unwrap();
        let y = AlgebraElement::column_embedding(&[c(1.0), c(0.0)]);
        let w = sharpness_witness(&phi, &y, OmegaPair::real(1.0, 3.0), Tolerance::default()).unwrap();
        assert_eq!(w.x, AlgebraElement::column_embedding(&[c(2.0), c(1.0)]));
        assert_eq!(w.report.lhs_scalar(), Some(1.0));
        assert_eq!(w.report.rhs_scalar(), Some(1.0));
        assert_eq!(w.ratio, Some(0.25));
        assert_eq!(w.re_value, 0.0);
    }

    #[test]
    fn sharpness_degenerate_pair() {
        let phi = PositiveFunctional::trace(2).unwrap();
        let y = AlgebraElement::identity(2);
        let w = sharpness_witness(&phi, &y, OmegaPair::real(2.0, 2.0), Tolerance::default()).unwrap();
        assert_eq!(w.ratio, None);
        assert!(w.report.lhs_scalar().unwrap().abs() < 1e-15);
        assert_eq!(w.report.rhs_scalar(), Some(0.0));
    }

    #[test]
    fn sharpness_normalized_trace() {
        let phi = PositiveFunctional::trace(2).unwrap();
        let y = AlgebraElement::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let w = sharpness_witness(&phi, &y, OmegaPair::real(1.0, 2.0), Tolerance::default()).unwrap();
        assert!((w.ratio.unwrap() - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn sharpness_scalar_algebra_is_degenerate() {
        let phi = PositiveFunctional::trace(1).unwrap();
        let err = sharpness_witness(&phi, &AlgebraElement::real_scalar(1.0), OmegaPair::real(1.0, 3.0), Tolerance::default());
        assert_eq!(err.unwrap_err(), BoundError::Form(FormError::DegenerateSpace));
    }

    #[test]
    fn sharpness_random_complex_pairs() {
        for k in 0..20 {
            let mut rng = trial_rng(77, k);
            let phi = PositiveFunctional::vector_state(crate::rng::gaussian_vector(&mut rng, 3)).unwrap();
            let y = gaussian_matrix(&mut rng, 3);
            let pair = OmegaPair::new(Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.5));
            let w = sharpness_witness(&phi, &y, pair, Tolerance::default()).unwrap();
            assert!((w.ratio.unwrap() - 0.25).abs() <= 1e-12, "ratio {:?}", w.ratio);
            assert!(w.report.cross_checks.iter().all(|c| c.holds));
        }
    }

    #[test]
    fn operator_pair_hand_instance() {
        let t = AlgebraElement::diag(&[1.0, 2.0]);
        let s = AlgebraElement::diag(&[2.0, 1.0]);
        let r = operator_pair_bounds(&t, &s, &[c(1.0), c(1.0)], Tolerance::default()).unwrap();
        assert_eq!(r.additive.lhs_scalar(), Some(9.0));
        assert!((r.additive.rhs_scalar().unwrap() - 14.0625).abs() < 1e-12);
        assert_eq!(r.additive.verdict, Verdict::Holds);
        assert!((r.multiplicative.lhs_scalar().unwrap() - 5.0).abs() < 1e-12);
        assert!((r.multiplicative.rhs_scalar().unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(r.multiplicative.verdict, Verdict::Holds);
        assert!((r.closed_form.additive_rhs - 14.0625).abs() < 1e-12);
        assert!(r.additive.cross_checks.iter().all(|c| c.holds));
        assert!(r.multiplicative.cross_checks.iter().all(|c| c.holds));
    }

    #[test]
    fn equal_operators_with_equal_pair_give_equality() {
        let t = AlgebraElement::diag(&[1.0, 3.0, 2.0]);
        let v = [c(1.0), c(-0.5), c(2.0)];
        let phi = PositiveFunctional::vector_state(v.to_vec()).unwrap();
        let r = functional_multiplicative_bound(&phi, &t, &t, OmegaPair::real(1.0, 1.0), Tolerance::default()).unwrap();
        let tv2: f64 = t.mul_vec(&v).iter().map(|z| z.norm_sqr()).sum();
        assert!((r.lhs_scalar().unwrap() - tv2).abs() < 1e-12);
        assert!((r.rhs_scalar().unwrap() - tv2).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Holds);

        // With the spectral pair the bound is loose but still holds.
        let r = operator_pair_bounds(&t, &t, &v, Tolerance::default()).unwrap();
        assert_eq!(r.multiplicative.verdict, Verdict::Holds);
        assert_eq!(r.additive.verdict, Verdict::Holds);
    }

    #[test]
    fn operator_pair_rejects_non_commuting() {
        let t = AlgebraElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let s = AlgebraElement::diag(&[1.0, 2.0]);
        let err = operator_pair_bounds(&t, &s, &[c(1.0), c(0.0)], Tolerance::default());
        assert!(matches!(err, Err(BoundError::Form(FormError::NotCommuting { .. }))));
    }
}

//! Matrix-valued additive and multiplicative bounds for a general form.

use crate::forms::{check_com, check_re_condition, check_star1, form_eval, FormInstance, OmegaPair, Vector};
use crate::matalg::{abs_element, is_normal, sqrt_psd, AlgebraElement, Tolerance};

use super::{require_positive_re, BoundError, BoundReport, InequalityId, NamedCheck};

/// `<y,y>^{1/2} <x,x> <y,y>^{1/2} - <x,y><y,x>  <=  |Omega - omega|^2 / 4 * <y,y>^2`
///
/// Hypotheses: `<x,y>* = <y,x>`, `<y,y>^{1/2}` commutes with `<x,y>`, and
/// `Re <Omega y - x, x - omega y> >= 0`.
pub fn additive_matrix_bound(
    form: &FormInstance,
    x: &Vector,
    y: &Vector,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<BoundReport, BoundError> {
    let preconditions = vec![
        NamedCheck::from_check("star1", check_star1(form, x, y, tol)?),
        NamedCheck::from_check("com", check_com(form, x, y, tol)?),
        NamedCheck::from_check("re_condition", check_re_condition(form, x, y, pair, tol)?),
    ];
    let xx = form_eval(form, x, x)?;
    let yy = form_eval(form, y, y)?;
    let xy = form_eval(form, x, y)?;
    let yx = form_eval(form, y, x)?;
    let root = sqrt_psd(&yy, tol)?;

    let lhs = root.mul(&xx).mul(&root).sub(&xy.mul(&yx));
    let rhs = yy.mul(&yy).scale_real(pair.additive_constant());
    // Hermitian only up to roundoff once star1 holds.
    let (lhs, rhs) = if preconditions.iter().all(|p| p.holds) {
        (lhs.re_part(), rhs.re_part())
    } else {
        (lhs, rhs)
    };
    Ok(BoundReport::matrix(InequalityId::AddMatrix14, preconditions, lhs, rhs, tol)?.with_omega(pair))
}

/// `|<x,x>^{1/2} <y,y>^{1/2}|^2 - |<y,x>|^2`, the left side before expansion.
pub fn additive_lhs_unexpanded(form: &FormInstance, x: &Vector, y: &Vector, tol: Tolerance) -> Result<AlgebraElement, BoundError> {
    let a = sqrt_psd(&form_eval(form, x, x)?, tol)?;
    let b = sqrt_psd(&form_eval(form, y, y)?, tol)?;
    let ab = a.mul(&b);
    let yx = form_eval(form, y, x)?;
    Ok(ab.adjoint().mul(&ab).sub(&yx.adjoint().mul(&yx)))
}

/// `<x,x>^{1/2}<y,y>^{1/2} + <y,y>^{1/2}<x,x>^{1/2}  <=  (|Omega|+|omega|) / Re(conj(omega) Omega)^{1/2} * |<x,y>|`
///
/// Hypotheses: `<x,y>* = <y,x>`, `<x,y>` normal, the Re condition, and
/// `Re(conj(omega) Omega) > 0` (an error otherwise).
pub fn multiplicative_matrix_bound(
    form: &FormInstance,
    x: &Vector,
    y: &Vector,
    pair: OmegaPair,
    tol: Tolerance,
) -> Result<BoundReport, BoundError> {
    let re = require_positive_re(pair)?;
    let xy = form_eval(form, x, y)?;
    let preconditions = vec![
        NamedCheck::from_check("star1", check_star1(form, x, y, tol)?),
        NamedCheck::from_check("normal", is_normal(&xy, tol)),
        NamedCheck::from_check("re_condition", check_re_condition(form, x, y, pair, tol)?),
        NamedCheck::new("re_omega_positive", true, re),
    ];
    let a = sqrt_psd(&form_eval(form, x, x)?, tol)?;
    let b = sqrt_psd(&form_eval(form, y, y)?, tol)?;
    let lhs = a.mul(&b).add(&b.mul(&a)).re_part();
    let constant = (pair.big_omega.norm() + pair.omega.norm()) / re.sqrt();
    let rhs = abs_element(&xy, tol)?.scale_real(constant);
    Ok(BoundReport::matrix(InequalityId::MultMatrixStar, preconditions, lhs, rhs, tol)?.with_omega(pair))
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::bounds::Verdict;
    use crate::forms::{FunctionalCarrier, PositiveFunctional};

    fn elem(m: AlgebraElement) -> Vector {
        Vector::Element(m)
    }

    #[test]
    fn additive_diagonal_module_instance() {
        let tol = Tolerance::default();
        let f = FormInstance::module(2);
        let r = additive_matrix_bound(
            &f,
            &elem(AlgebraElement::diag(&[2.0, 3.0])),
            &elem(AlgebraElement::identity(2)),
            OmegaPair::real(2.0, 3.0),
            tol,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.lhs.as_matrix().unwrap().frobenius_norm() < 1e-15);
        let rhs = r.rhs.as_matrix().unwrap();
        assert!(rhs.sub(&AlgebraElement::identity(2).scale_real(0.25)).frobenius_norm() < 1e-15);
        assert!((r.margin.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn additive_equality_when_x_equals_y() {
        let f = FormInstance::module(3);
        let y = elem(AlgebraElement::diag(&[1.0, 2.0, 0.5]));
        let r = additive_matrix_bound(&f, &y, &y, OmegaPair::real(1.0, 1.0), Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margin.unwrap().abs() < 1e-14);
        assert!(r.rhs.as_matrix().unwrap().frobenius_norm() == 0.0);
    }

    #[test]
    fn additive_sharp_scalar_instance() {
        // phi = <. e1, e1> on vectors: x = (2,1), y = (1,0), omega = 1, Omega = 3.
        let phi = PositiveFunctional::vector_state(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let f = FormInstance::functional(phi, FunctionalCarrier::Vectors);
        let x = Vector::Coords(vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
        let y = Vector::Coords(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let r = additive_matrix_bound(&f, &x, &y, OmegaPair::real(1.0, 3.0), Tolerance::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.lhs, crate::bounds::Side::Matrix(AlgebraElement::real_scalar(1.0)));
        assert_eq!(r.rhs, crate::bounds::Side::Matrix(AlgebraElement::real_scalar(1.0)));
        assert_eq!(r.margin, Some(0.0));
    }

    #[test]
    fn additive_precondition_failure() {
        // x = 5, y = 1 violates the Re condition for [1, 3].
        let f = FormInstance::functional(PositiveFunctional::trace(1).unwrap(), FunctionalCarrier::Algebra);
        let r = additive_matrix_bound(
            &f,
            &elem(AlgebraElement::real_scalar(5.0)),
            &elem(AlgebraElement::real_scalar(1.0)),
            OmegaPair::real(1.0, 3.0),
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::PreconditionFailed);
        assert_eq!(r.margin, None);
        assert!(!r.preconditions[2].holds);
    }

    #[test]
    fn expansion_matches_unexpanded_lhs() {
        let tol = Tolerance::default();
        let f = FormInstance::module(2);
        let x = elem(AlgebraElement::diag(&[2.0, 3.0]));
        let y = elem(AlgebraElement::diag(&[1.5, 0.5]));
        let r = additive_matrix_bound(&f, &x, &y, OmegaPair::real(1.0, 6.0), tol).unwrap();
        let direct = additive_lhs_unexpanded(&f, &x, &y, tol).unwrap();
        assert!(direct.sub(r.lhs.as_matrix().unwrap()).frobenius_norm() < 1e-13);
    }

    #[test]
    fn multiplicative_diagonal_module_instance() {
        let tol = Tolerance::default();
        let f = FormInstance::module(2);
        let r = multiplicative_matrix_bound(
            &f,
            &elem(AlgebraElement::diag(&[2.0, 3.0])),
            &elem(AlgebraElement::identity(2)),
            OmegaPair::real(2.0, 3.0),
            tol,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let lhs = r.lhs.as_matrix().unwrap();
        assert!(lhs.sub(&AlgebraElement::diag(&[4.0, 6.0])).frobenius_norm() < 1e-14);
        let c = 5.0 / 6f64.sqrt();
        let rhs = r.rhs.as_matrix().unwrap();
        assert!(rhs.sub(&AlgebraElement::diag(&[2.0 * c, 3.0 * c])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn multiplicative_forced_equality() {
        let f = FormInstance::functional(PositiveFunctional::trace(1).unwrap(), FunctionalCarrier::Algebra);
        let r = multiplicative_matrix_bound(
            &f,
            &elem(AlgebraElement::real_scalar(2.0)),
            &elem(AlgebraElement::real_scalar(1.0)),
            OmegaPair::real(2.0, 2.0),
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.lhs.as_matrix().unwrap().get(0, 0).re - 4.0).abs() < 1e-14);
        assert!((r.rhs.as_matrix().unwrap().get(0, 0).re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn multiplicative_rejects_non_positive_re() {
        let f = FormInstance::module(1);
        let one = elem(AlgebraElement::real_scalar(1.0));
        let err = multiplicative_matrix_bound(&f, &one, &one, OmegaPair::real(-1.0, 1.0), Tolerance::default());
        assert!(matches!(err, Err(BoundError::NonPositiveReOmega { .. })));
    }
}

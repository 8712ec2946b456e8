//! Weighted-sum bounds for bounded positive sequences: the integral corollary
//! realized on a weighted counting measure, Greub-Rheinboldt, the weighted
//! additive bound, and the classical and improved Polya-Szego inequalities.

use serde::{Deserialize, Serialize};

use crate::matalg::Tolerance;

use super::{BoundError, BoundReport, InequalityId, NamedCheck};

/// Bounds `0 < a <= a_i <= A`, `0 < b <= b_i <= B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarWindow {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
}

impl ScalarWindow {
    pub fn new(a: f64, big_a: f64, b: f64, big_b: f64) -> Result<Self, BoundError> {
        let w = Self { a, big_a, b, big_b };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi;
        if ok(self.a, self.big_a) && ok(self.b, self.big_b) {
            Ok(())
        } else {
            Err(BoundError::InvalidSequences(format!(
                "window needs 0 < a <= A and 0 < b <= B, got a={}, A={}, b={}, B={}",
                self.a, self.big_a, self.b, self.big_b
            )))
        }
    }

    fn lows(&self) -> f64 {
        self.a * self.b
    }

    fn highs(&self) -> f64 {
        self.big_a * self.big_b
    }

    /// `(AB - ab)^2 / 4`.
    fn additive_scale(&self) -> f64 {
        let gap = self.highs() - self.lows();
        gap * gap / 4.0
    }
}

/// Sequences `a_i`, `b_i` with weights `w_i > 0` and their window.
///
/// Construction checks shapes and positivity; window membership is a
/// hypothesis of each evaluator and reported as `WindowViolation` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequencesRecord")]
pub struct WeightedSequences {
    a: Vec<f64>,
    b: Vec<f64>,
    w: Vec<f64>,
    window: ScalarWindow,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequencesRecord {
    a: Vec<f64>,
    b: Vec<f64>,
    #[serde(default)]
    w: Option<Vec<f64>>,
    window: ScalarWindow,
}

impl TryFrom<SequencesRecord> for WeightedSequences {
    type Error = BoundError;

    fn try_from(r: SequencesRecord) -> Result<Self, BoundError> {
        match r.w {
            Some(w) => Self::weighted(r.a, r.b, w, r.window),
            None => Self::unweighted(r.a, r.b, r.window),
        }
    }
}

impl WeightedSequences {
    pub fn weighted(a: Vec<f64>, b: Vec<f64>, w: Vec<f64>, window: ScalarWindow) -> Result<Self, BoundError> {
        window.validate()?;
        if a.is_empty() || a.len() != b.len() || a.len() != w.len() {
            return Err(BoundError::InvalidSequences(format!(
                "need equal nonzero lengths, got |a|={}, |b|={}, |w|={}",
                a.len(),
                b.len(),
                w.len()
            )));
        }
        if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(BoundError::InvalidSequences(format!("weight w[{i}] = {} is not positive", w[i])));
        }
        if let Some(i) = a.iter().chain(&b).position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(BoundError::InvalidSequences(format!("entry {i} of a ++ b is not a positive real")));
        }
        Ok(Self { a, b, w, window })
    }

    pub fn unweighted(a: Vec<f64>, b: Vec<f64>, window: ScalarWindow) -> Result<Self, BoundError> {
        let w = vec![1.0; a.len()];
        Self::weighted(a, b, w, window)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn window(&self) -> ScalarWindow {
        self.window
    }

    pub fn is_unweighted(&self) -> bool {
        self.w.iter().all(|&x| x == 1.0)
    }

    /// Multiplies every weight by `c > 0`.
    pub fn rescale_weights(&self, c: f64) -> Result<Self, BoundError> {
        Self::weighted(self.a.clone(), self.b.clone(), self.w.iter().map(|x| x * c).collect(), self.window)
    }

    pub fn check_window(&self) -> Result<(), BoundError> {
        let win = self.window;
        for (i, (&ai, &bi)) in self.a.iter().zip(&self.b).enumerate() {
            if ai < win.a || ai > win.big_a {
                return Err(BoundError::WindowViolation(format!("a[{i}] = {ai} is outside [{}, {}]", win.a, win.big_a)));
            }
            if bi < win.b || bi > win.big_b {
                return Err(BoundError::WindowViolation(format!("b[{i}] = {bi} is outside [{}, {}]", win.b, win.big_b)));
            }
        }
        Ok(())
    }

    fn sums(&self) -> Result<Sums, BoundError> {
        self.check_window()?;
        let mut s = Sums { aa: 0.0, bb: 0.0, ab: 0.0 };
        for ((&a, &b), &w) in self.a.iter().zip(&self.b).zip(&self.w) {
            s.aa += a * a * w;
            s.bb += b * b * w;
            s.ab += a * b * w;
        }
        Ok(s)
    }
}

/// `sum w a^2`, `sum w b^2`, `sum w a b`.
struct Sums {
    aa: f64,
    bb: f64,
    ab: f64,
}

/// `s^2 / (hi^2 lo^2)`.
fn squared_term(s: f64, hi: f64, lo: f64) -> f64 {
    s * s / (hi * hi * lo * lo)
}

fn window_check() -> Vec<NamedCheck> {
    vec![NamedCheck::new("window", true, 0.0)]
}

fn additive_report(id: InequalityId, data: &WeightedSequences, tol: Tolerance) -> Result<BoundReport, BoundError> {
    let s = data.sums()?;
    let win = data.window;
    let lhs = s.aa * s.bb - s.ab * s.ab;
    let bracket = squared_term(s.bb, win.big_b, win.b).min(squared_term(s.aa, win.big_a, win.a));
    let rhs = win.additive_scale() * bracket;
    Ok(BoundReport::scalar(id, window_check(), lhs, rhs, tol))
}

/// Additive (`d1`) and multiplicative (`d2`) integral bounds with the measure
/// `sum_i w_i delta_i`. Weights are used as given, not normalized.
pub fn integral_bounds(data: &WeightedSequences, tol: Tolerance) -> Result<(BoundReport, BoundReport), BoundError> {
    let d1 = additive_report(InequalityId::IntAddD1, data, tol)?;
    let s = data.sums()?;
    let win = data.window;
    let lhs = s.aa.sqrt() * s.bb.sqrt();
    let ratio = win.lows() / win.highs();
    let constant = 0.5 * (ratio.sqrt() + (1.0 / ratio).sqrt());
    let d2 = BoundReport::scalar(InequalityId::IntMultD2, window_check(), lhs, constant * s.ab, tol);
    Ok((d1, d2))
}

fn greub_rheinboldt_sides(s: &Sums, win: ScalarWindow) -> (f64, f64) {
    let (ab, big) = (win.lows(), win.highs());
    let constant = (big + ab) * (big + ab) / (4.0 * big * ab);
    (s.aa * s.bb, constant * (s.ab * s.ab))
}

/// `sum a^2 w * sum b^2 w <= (AB + ab)^2 / (4 AB ab) * (sum a b w)^2`.
///
/// The squared `d2` bound on the same data is recorded as a cross-check: both
/// margins must agree to `1e-12` relative and give the same verdict.
pub fn greub_rheinboldt(data: &WeightedSequences, tol: Tolerance) -> Result<BoundReport, BoundError> {
    let s = data.sums()?;
    let (lhs, rhs) = greub_rheinboldt_sides(&s, data.window);
    let report = BoundReport::scalar(InequalityId::GreubRheinboldt, window_check(), lhs, rhs, tol);

    let (_, d2) = integral_bounds(data, tol)?;
    let (l2, r2) = (d2.lhs_scalar().unwrap(), d2.rhs_scalar().unwrap());
    let squared = BoundReport::scalar(InequalityId::IntMultD2, window_check(), l2 * l2, r2 * r2, tol);
    let diff = (report.margin.unwrap() - squared.margin.unwrap()).abs();
    let agrees = diff <= 1e-12 * report.scale.max(squared.scale) && report.verdict == squared.verdict;
    Ok(report.with_cross_check(NamedCheck::new("squared_d2_agreement", agrees, diff)))
}

/// Weighted additive bound:
/// `sum a^2 w * sum b^2 w - (sum a b w)^2 <= (AB - ab)^2 / 4 * min{(sum b^2 w)^2 / (B b)^2, (sum a^2 w)^2 / (A a)^2}`.
pub fn weighted_additive(data: &WeightedSequences, tol: Tolerance) -> Result<BoundReport, BoundError> {
    additive_report(InequalityId::WeightedAddDo, data, tol)
}

fn require_unweighted(data: &WeightedSequences) -> Result<Sums, BoundError> {
    if !data.is_unweighted() {
        return Err(BoundError::WeightedInput);
    }
    data.sums()
}

/// Classical multiplicative form `sum a^2 sum b^2 <= (ab + AB)^2 / (4 abAB) (sum a b)^2`.
pub fn polya_szego_multiplicative(data: &WeightedSequences, tol: Tolerance) -> Result<BoundReport, BoundError> {
    let s = require_unweighted(data)?;
    let win = data.window;
    let (ab, big) = (win.lows(), win.highs());
    let constant = (ab + big) * (ab + big) / (4.0 * ab * big);
    Ok(BoundReport::scalar(InequalityId::PsMult, window_check(), s.aa * s.bb, constant * (s.ab * s.ab), tol))
}

/// Which of the three bracket terms is smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantIndex {
    C1,
    C2,
    C3,
}

impl ConstantIndex {
    pub fn index(&self) -> usize {
        match self {
            ConstantIndex::C1 => 0,
            ConstantIndex::C2 => 1,
            ConstantIndex::C3 => 2,
        }
    }

    fn from_index(i: usize) -> Self {
        [ConstantIndex::C1, ConstantIndex::C2, ConstantIndex::C3][i]
    }
}

impl std::fmt::Display for ConstantIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "C{}", self.index() + 1)
    }
}

/// Both sides of `(1/Aa) sum a^2 = (1/Bb) sum b^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityCondition {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl EqualityCondition {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovedPolyaSzego {
    pub report: BoundReport,
    /// `(AB - ab)^2 / 4` times each bracket term.
    pub constants: [f64; 3],
    pub argmin: ConstantIndex,
    pub equality_condition: EqualityCondition,
    pub classical_multiplicative: BoundReport,
    pub classical_additive: BoundReport,
    /// Improved right side never exceeds the classical additive right side.
    pub improves_classical: bool,
}

const ARGMIN_TIE_RTOL: f64 = 1e-12;

/// The unweighted improvement of the additive Polya-Szego inequality: the right
/// side is the least of three constants, the third being the classical one.
pub fn polya_szego_improved(data: &WeightedSequences, tol: Tolerance) -> Result<ImprovedPolyaSzego, BoundError> {
    let s = require_unweighted(data)?;
    let win = data.window;
    let (ab, big) = (win.lows(), win.highs());
    let k = win.additive_scale();
    let lhs = s.aa * s.bb - s.ab * s.ab;

    let gap = big - ab;
    let classical_rhs = gap * gap / (4.0 * ab * big) * (s.ab * s.ab);
    let constants = [
        k * squared_term(s.aa, win.big_a, win.a),
        k * squared_term(s.bb, win.big_b, win.b),
        classical_rhs,
    ];
    let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let cutoff = min + ARGMIN_TIE_RTOL * min.abs();
    let argmin = ConstantIndex::from_index(constants.iter().position(|&c| c <= cutoff).unwrap_or(0));

    let report = BoundReport::scalar(InequalityId::PsImprovedGood, window_check(), lhs, min, tol);
    let classical_additive = BoundReport::scalar(InequalityId::PsAdd, window_check(), lhs, classical_rhs, tol);
    let classical_multiplicative = polya_szego_multiplicative(data, tol)?;

    let eq_lhs = s.aa / (win.big_a * win.a);
    let eq_rhs = s.bb / (win.big_b * win.b);
    let equality_condition = EqualityCondition {
        holds: (eq_lhs - eq_rhs).abs() <= tol.band(eq_lhs.abs().max(eq_rhs.abs())),
        lhs: eq_lhs,
        rhs: eq_rhs,
    };

    let report = report
        .with_cross_check(NamedCheck::new("improves_classical", min <= classical_rhs, classical_rhs - min))
        .with_cross_check(NamedCheck::new("equality_condition", equality_condition.holds, equality_condition.residual()));
    Ok(ImprovedPolyaSzego {
        improves_classical: min <= classical_rhs,
        report,
        constants,
        argmin,
        equality_condition,
        classical_multiplicative,
        classical_additive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Verdict;

    fn window(a: f64, big_a: f64, b: f64, big_b: f64) -> ScalarWindow {
        ScalarWindow::new(a, big_a, b, big_b).unwrap()
    }

    fn swap_pair() -> WeightedSequences {
        WeightedSequences::unweighted(vec![1.0, 2.0], vec![2.0, 1.0], window(1.0, 2.0, 1.0, 2.0)).unwrap()
    }

    #[test]
    fn constants_give_trivial_bounds() {
        let data = WeightedSequences::weighted(vec![3.0; 4], vec![0.5; 4], vec![0.1, 0.2, 0.3, 0.4], window(3.0, 3.0, 0.5, 0.5)).unwrap();
        let (d1, d2) = integral_bounds(&data, Tolerance::default()).unwrap();
        assert!(d1.lhs_scalar().unwrap().abs() < 1e-15);
        assert_eq!(d1.rhs_scalar(), Some(0.0));
        assert_eq!(d1.verdict, Verdict::Holds);
        let r = d2.lhs_scalar().unwrap() / d2.rhs_scalar().unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn d2_swap_pair_equality() {
        let (_, d2) = integral_bounds(&swap_pair(), Tolerance::default()).unwrap();
        assert!((d2.lhs_scalar().unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(d2.rhs_scalar(), Some(5.0));
        assert_eq!(d2.verdict, Verdict::Holds);
    }

    #[test]
    fn greub_rheinboldt_swap_pair_equality() {
        let r = greub_rheinboldt(&swap_pair(), Tolerance::default()).unwrap();
        assert_eq!(r.lhs_scalar(), Some(25.0));
        assert_eq!(r.rhs_scalar(), Some(25.0));
        assert_eq!(r.margin, Some(0.0));
        assert!(r.cross_checks[0].holds);
    }

    #[test]
    fn greub_rheinboldt_unit_weights_is_polya_szego() {
        let data = WeightedSequences::unweighted(vec![1.3, 2.2, 1.9], vec![0.7, 0.4, 0.9], window(1.0, 2.5, 0.3, 1.0)).unwrap();
        let gr = greub_rheinboldt(&data, Tolerance::default()).unwrap();
        let ps = polya_szego_multiplicative(&data, Tolerance::default()).unwrap();
        assert_eq!(gr.lhs_scalar().unwrap().to_bits(), ps.lhs_scalar().unwrap().to_bits());
        assert_eq!(gr.rhs_scalar().unwrap().to_bits(), ps.rhs_scalar().unwrap().to_bits());
        assert_eq!(gr.margin.unwrap().to_bits(), ps.margin.unwrap().to_bits());
    }

    #[test]
    fn weighted_additive_paper_family() {
        let data = WeightedSequences::unweighted(vec![2.0, 2.0], vec![0.5, 0.5], window(1.0, 2.0, 0.5, 0.5)).unwrap();
        let r = weighted_additive(&data, Tolerance::default()).unwrap();
        assert_eq!(r.lhs_scalar(), Some(0.0));
        assert_eq!(r.rhs_scalar(), Some(0.25));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn window_violation_is_reported() {
        let data = WeightedSequences::unweighted(vec![1.0, 3.0], vec![1.0, 1.0], window(1.0, 2.0, 1.0, 1.0)).unwrap();
        assert!(matches!(weighted_additive(&data, Tolerance::default()), Err(BoundError::WindowViolation(_))));
        assert!(matches!(integral_bounds(&data, Tolerance::default()), Err(BoundError::WindowViolation(_))));
        assert!(matches!(greub_rheinboldt(&data, Tolerance::default()), Err(BoundError::WindowViolation(_))));
        assert!(matches!(polya_szego_improved(&data, Tolerance::default()), Err(BoundError::WindowViolation(_))));
    }

    #[test]
    fn invalid_shapes_rejected() {
        let w = window(1.0, 2.0, 1.0, 2.0);
        assert!(WeightedSequences::unweighted(vec![], vec![], w).is_err());
        assert!(WeightedSequences::unweighted(vec![1.0], vec![1.0, 1.0], w).is_err());
        assert!(WeightedSequences::weighted(vec![1.0], vec![1.0], vec![0.0], w).is_err());
        assert!(ScalarWindow::new(2.0, 1.0, 1.0, 1.0).is_err());
        assert!(ScalarWindow::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn improved_paper_family_picks_second_constant() {
        let data = WeightedSequences::unweighted(vec![2.0, 2.0], vec![0.5, 0.5], window(1.0, 2.0, 0.5, 0.5)).unwrap();
        let r = polya_szego_improved(&data, Tolerance::default()).unwrap();
        assert_eq!(r.constants, [1.0, 0.25, 0.5]);
        assert_eq!(r.argmin, ConstantIndex::C2);
        assert_eq!(r.report.lhs_scalar(), Some(0.0));
        assert!(r.improves_classical);
    }

    #[test]
    fn improved_mirror_family_picks_first_constant() {
        let data = WeightedSequences::unweighted(vec![0.5, 0.5], vec![2.0, 2.0], window(0.5, 0.5, 1.0, 2.0)).unwrap();
        let r = polya_szego_improved(&data, Tolerance::default()).unwrap();
        assert_eq!(r.constants, [0.25, 1.0, 0.5]);
        assert_eq!(r.argmin, ConstantIndex::C1);
    }

    #[test]
    fn improved_swap_family_picks_third_constant() {
        // (1/Aa) sum a^2 = (1/Bb) sum b^2 = 5/2 and the sequences are not proportional.
        let r = polya_szego_improved(&swap_pair(), Tolerance::default()).unwrap();
        assert!(r.equality_condition.holds);
        assert_eq!(r.equality_condition.lhs, 2.5);
        assert_eq!(r.argmin, ConstantIndex::C3);
        let k = 9.0 / 4.0;
        assert_eq!(r.constants, [k * 6.25, k * 6.25, k * 4.0]);
    }

    #[test]
    fn improved_constant_sequences() {
        let data = WeightedSequences::unweighted(vec![1.5; 3], vec![0.5; 3], window(1.5, 1.5, 0.5, 0.5)).unwrap();
        let r = polya_szego_improved(&data, Tolerance::default()).unwrap();
        assert_eq!(r.report.lhs_scalar(), Some(0.0));
        assert!(r.equality_condition.holds);
        assert_eq!(r.report.verdict, Verdict::Holds);
    }

    #[test]
    fn improved_rejects_weights() {
        let data = WeightedSequences::weighted(vec![1.0], vec![1.0], vec![2.0], window(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(polya_szego_improved(&data, Tolerance::default()).unwrap_err(), BoundError::WeightedInput);
    }

    #[test]
    fn sequences_json_defaults_weights() {
        let s = r#"{"a":[1.0,2.0],"b":[2.0,1.0],"window":{"a":1.0,"A":2.0,"b":1.0,"B":2.0}}"#;
        let data: WeightedSequences = serde_json::from_str(s).unwrap();
        assert_eq!(data, swap_pair());
        let back: WeightedSequences = serde_json::from_str(&serde_json::to_string(&data).unwrap()).unwrap();
        assert_eq!(back, data);
    }
}

//! Which of the three constants in the improved additive Polya-Szego bound is
//! the smallest, over a mix of constructed families and random windows.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{polya_szego_improved, BoundError, ConstantIndex, ScalarWindow, WeightedSequences};
use crate::harness::{bounded_sequences, random_window, WindowRanges};
use crate::matalg::Tolerance;
use crate::rng::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `a_i = A = n`, `a = 1`, `b_i = b = B = 1/n`.
    Constant,
    /// The constant family with the roles of `a` and `b` exchanged.
    Mirror,
    /// `b` the reversal of `a` on a shared window: both sides of the equality
    /// condition agree while the sequences are not proportional.
    Reversed,
    Random,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Mirror => "mirror",
            Family::Reversed => "reversed",
            Family::Random => "random",
        }
    }
}

/// One CSV row: the window, the three constants, the selected index, the left
/// side, the margin of the improved bound, and the equality-condition residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub sample: usize,
    pub family: Family,
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub argmin: ConstantIndex,
    pub lhs: f64,
    pub margin: f64,
    pub eq_residual: f64,
}

pub const CSV_HEADER: [&str; 13] = ["sample", "family", "a", "A", "b", "B", "c1", "c2", "c3", "argmin", "lhs", "margin", "eq_residual"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareStudy {
    pub rows: Vec<CompareRow>,
    /// How often `C1`, `C2`, `C3` was the smallest.
    pub argmin_counts: [usize; 3],
    /// Rows whose improved bound failed, or exceeded the classical one.
    pub violations: usize,
}

impl CompareStudy {
    pub fn all_indices_seen(&self) -> bool {
        self.argmin_counts.iter().all(|&c| c > 0)
    }
}

pub fn constant_family(n: usize) -> WeightedSequences {
    let n = n.max(1) as f64;
    let window = ScalarWindow::new(1.0, n, 1.0 / n, 1.0 / n).expect("valid window");
    let len = n as usize;
    WeightedSequences::unweighted(vec![n; len], vec![1.0 / n; len], window).expect("valid family")
}

pub fn mirror_family(n: usize) -> WeightedSequences {
    let n = n.max(1) as f64;
    let window = ScalarWindow::new(1.0 / n, 1.0 / n, 1.0, n).expect("valid window");
    let len = n as usize;
    WeightedSequences::unweighted(vec![1.0 / n; len], vec![n; len], window).expect("valid family")
}

/// `a` uniform in `[p, q]` with `a_0 = p`, `a_1 = q`, and `b` its reversal, on
/// the window `a = b = p`, `A = B = q`. Needs `n >= 2` and `p < q`; shorter
/// lengths are raised to 2.
pub fn reversed_family<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64, q: f64) -> WeightedSequences {
    let n = n.max(2);
    let mut a: Vec<f64> = (0..n).map(|_| (p + rng.random::<f64>() * (q - p)).min(q)).collect();
    a[0] = p;
    a[1] = q;
    let b: Vec<f64> = a.iter().rev().copied().collect();
    let window = ScalarWindow::new(p, q, p, q).expect("valid window");
    WeightedSequences::unweighted(a, b, window).expect("valid family")
}

fn row(sample: usize, family: Family, data: &WeightedSequences, tol: Tolerance) -> Result<(CompareRow, bool), BoundError> {
    let r = polya_szego_improved(data, tol)?;
    let w = data.window();
    let ok = r.improves_classical && r.report.verdict == crate::bounds::Verdict::Holds;
    Ok((
        CompareRow {
            sample,
            family,
            a: w.a,
            big_a: w.big_a,
            b: w.b,
            big_b: w.big_b,
            c1: r.constants[0],
            c2: r.constants[1],
            c3: r.constants[2],
            argmin: r.argmin,
            lhs: r.report.lhs_scalar().unwrap_or(f64::NAN),
            margin: r.report.margin.unwrap_or(f64::NAN),
            eq_residual: r.equality_condition.residual(),
        },
        ok,
    ))
}

/// Every tenth sample is a reversed-family instance, the rest use random
/// windows. Rows 0 and 1 are the constant and mirror families of length `n`.
pub fn constant_comparison_study(n: usize, samples: usize, seed: u64, ranges: WindowRanges, tol: Tolerance) -> Result<CompareStudy, BoundError> {
    let mut out = vec![row(0, Family::Constant, &constant_family(n), tol)?, row(1, Family::Mirror, &mirror_family(n), tol)?];
    let drawn: Result<Vec<_>, BoundError> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k as u64);
            if k % 10 == 0 {
                let p = 0.1 + rng.random::<f64>() * 2.0;
                let q = p * (1.5 + rng.random::<f64>() * 4.0);
                row(k + 2, Family::Reversed, &reversed_family(&mut rng, n, p, q), tol)
            } else {
                let window = random_window(&mut rng, ranges);
                row(k + 2, Family::Random, &bounded_sequences(&mut rng, n, window, true), tol)
            }
        })
        .collect();
    out.extend(drawn?);

    let mut argmin_counts = [0; 3];
    let mut violations = 0;
    for (r, ok) in &out {
        argmin_counts[r.argmin.index()] += 1;
        violations += usize::from(!ok);
    }
    Ok(CompareStudy {
        rows: out.into_iter().map(|(r, _)| r).collect(),
        argmin_counts,
        violations,
    })
}

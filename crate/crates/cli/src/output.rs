//! Human-readable tables. Numbers are printed with six significant digits.

use std::fmt::Write;

use revcs_core::bounds::{BoundReport, SharpnessWitness, Side};
use revcs_core::compare::CompareStudy;
use revcs_core::harness::FuzzSummary;
use revcs_core::matalg::Tolerance;

fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), sci)
}

fn side(s: &Side) -> String {
    match s {
        Side::Scalar(x) => sci(*x),
        Side::Matrix(m) if m.dim() == 1 => sci(m.get(0, 0).re),
        Side::Matrix(m) => format!("{}x{} matrix, |.|_F = {}", m.dim(), m.dim(), sci(m.frobenius_norm())),
    }
}

pub fn report_table(r: &BoundReport, tol: Tolerance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14}{}", "inequality", r.inequality_id);
    let _ = writeln!(out, "{:<14}{}", "verdict", r.verdict);
    let _ = writeln!(out, "{:<14}{}", "lhs", side(&r.lhs));
    let _ = writeln!(out, "{:<14}{}", "rhs", side(&r.rhs));
    let _ = writeln!(out, "{:<14}{}", "margin", opt(r.margin));
    let _ = writeln!(out, "{:<14}{}", "relative", opt(r.relative_margin()));
    let _ = writeln!(out, "{:<14}rtol {} atol {}", "tolerance", sci(tol.rtol), sci(tol.atol));
    if let Some(p) = &r.omega_pair {
        let _ = writeln!(out, "{:<14}omega {} Omega {}", "pair", p.omega, p.big_omega);
    }
    for (title, checks) in [("precondition", &r.preconditions), ("cross-check", &r.cross_checks)] {
        for c in checks {
            let mark = if c.holds { "ok" } else { "FAILED" };
            let _ = writeln!(out, "{title:<14}{:<24}{mark:<8}{}", c.name, sci(c.margin));
        }
    }
    out
}

pub fn fuzz_table(s: &FuzzSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22}{}", "inequality", s.inequality_id);
    let _ = writeln!(out, "{:<22}{}", "seed", s.seed);
    let _ = writeln!(out, "{:<22}{}", "trials", s.trials_run);
    let _ = writeln!(out, "{:<22}{}", "holds", s.holds);
    let _ = writeln!(out, "{:<22}{}", "violated", s.violated);
    let _ = writeln!(out, "{:<22}{}", "precondition failed", s.precondition_failed);
    let _ = writeln!(out, "{:<22}{}", "worst margin", opt(s.worst_margin));
    let _ = writeln!(out, "{:<22}{}", "worst relative margin", opt(s.worst_relative_margin));
    if let Some(t) = s.worst_trial {
        let _ = writeln!(out, "{:<22}{t} (replay with --seed {} --replay {t})", "worst trial", s.seed);
    }
    out
}

pub fn sharpness_table(w: &SharpnessWitness, deviation: Option<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "witness x:");
    for row in w.x.rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:>12.5e}{:+.5e}i", z.re, z.im)).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
    let _ = writeln!(out, "{:<18}{}", "lhs", side(&w.report.lhs));
    let _ = writeln!(out, "{:<18}{}", "rhs", side(&w.report.rhs));
    let _ = writeln!(out, "{:<18}{}", "ratio", opt(w.ratio));
    let _ = writeln!(out, "{:<18}{}", "|ratio - 0.25|", opt(deviation));
    let _ = writeln!(out, "{:<18}{}", "Re condition", sci(w.re_value));
    out
}

pub fn compare_table(s: &CompareStudy) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18}{}", "rows", s.rows.len());
    for (i, c) in s.argmin_counts.iter().enumerate() {
        let _ = writeln!(out, "{:<18}{c}", format!("argmin C{}", i + 1));
    }
    let _ = writeln!(out, "{:<18}{}", "all indices seen", s.all_indices_seen());
    let _ = writeln!(out, "{:<18}{}", "violations", s.violations);
    out
}

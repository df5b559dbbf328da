//! Pass/fail aggregation over a finished sweep: per-row tolerance checks plus
//! the qualitative claims each figure is meant to show.

use std::fmt;

use super::{FigureId, Metric, SweepRow, SweepTable, TolerancePolicy};
use crate::analytic::Exactness;
use crate::simulator::Discipline;
use crate::stochastic::{DecisionKind, ServiceKind};

#[derive(Clone, Debug, PartialEq)]
pub struct RowFailure {
    pub swept: f64,
    pub system: String,
    pub metric: Metric,
    pub analytic: f64,
    pub sim: f64,
    /// Standard error the check used.
    pub stderr: f64,
    pub exactness: Exactness,
}

impl fmt::Display for RowFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "swept={} {} {}: analytic={} ({}) sim={} stderr={}",
            self.swept,
            self.system,
            self.metric.name(),
            self.analytic,
            self.exactness.name(),
            self.sim,
            self.stderr
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimCheck {
    pub name: String,
    pub passed: bool,
    /// First counterexample, or a short summary.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub figure: FigureId,
    pub rows_checked: usize,
    pub failures: Vec<RowFailure>,
    /// `(swept, system, message)` for rows that could not be evaluated.
    pub errors: Vec<(f64, String, String)>,
    /// Largest relative deviation over approximate-formula rows, per metric.
    pub max_approx_gap_aud: Option<f64>,
    pub max_approx_gap_pmis: Option<f64>,
    pub claims: Vec<ClaimCheck>,
    /// Claims that could not be evaluated on this table.
    pub skipped: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty() && self.claims.iter().all(|c| c.passed)
    }

    pub fn claim(&self, name: &str) -> Option<&ClaimCheck> {
        self.claims.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "fail" };
        writeln!(f, "{}: {verdict}", self.figure)?;
        writeln!(
            f,
            "rows checked: {}, failed: {}, errors: {}",
            self.rows_checked,
            self.failures.len(),
            self.errors.len()
        )?;
        let gap =
            |g: Option<f64>| g.map_or_else(|| "-".to_string(), |g| format!("{:.4}%", 100.0 * g));
        writeln!(
            f,
            "max approximation gap: aud {}, pmis {}",
            gap(self.max_approx_gap_aud),
            gap(self.max_approx_gap_pmis)
        )?;
        for c in &self.claims {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "claim [{mark}] {}: {}", c.name, c.detail)?;
        }
        for s in &self.skipped {
            writeln!(f, "claim [skip] {s}")?;
        }
        for r in &self.failures {
            writeln!(f, "row failure: {r}")?;
        }
        for (x, system, msg) in &self.errors {
            writeln!(f, "row error: swept={x} {system}: {msg}")?;
        }
        Ok(())
    }
}

pub const CLAIM_AUD_DECREASING_IN_RHO: &str = "bufferless AuD decreasing in rho";
pub const CLAIM_POISSON_ORDERING: &str = "D < U < E for AuD and missing probability";
pub const CLAIM_BLOCKING_BEATS_FCFS_AUD: &str = "blocking AuD below FCFS AuD for rho > 0.5";
pub const CLAIM_BLOCKING_PMIS_BELOW_FCFS: &str =
    "bufferless missing probability below infinite buffer";
pub const CLAIM_DET_PMIS_ZERO: &str = "deterministic service never misses with periodic decisions";
pub const CLAIM_PERIODIC_AUD_TOWARD_POISSON: &str =
    "periodic AuD decreases in nu toward the Poisson-decision AuD";
pub const CLAIM_PERIODIC_PMIS_BELOW_POISSON: &str = "periodic missing probability below Poisson";
pub const CLAIM_SUMMARY_BLOCKING_WINS: &str =
    "blocking beats infinite buffer on both metrics for deterministic service";

fn sim_value(row: &SweepRow, metric: Metric) -> Option<(f64, f64)> {
    let s = row.sim.as_ref()?;
    Some(match metric {
        Metric::Aud => (s.avg_aud, s.aud_stderr),
        Metric::Pmis => (s.missing_prob, s.pmis_stderr),
    })
}

fn analytic_value(row: &SweepRow, metric: Metric) -> Option<f64> {
    match metric {
        Metric::Aud => row.analytic_aud.map(|a| a.value),
        Metric::Pmis => row.analytic_pmis.map(|a| a.value),
    }
}

/// `a <= b` up to `k` combined standard errors.
fn sim_le(a: (f64, f64), b: (f64, f64), k: f64) -> bool {
    a.0 <= b.0 + k * (a.1 * a.1 + b.1 * b.1).sqrt()
}

struct ClaimBuilder {
    name: &'static str,
    checked: usize,
    counterexample: Option<String>,
}

impl ClaimBuilder {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            counterexample: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn finish(self, report: &mut VerifyReport) {
        if self.checked == 0 {
            report
                .skipped
                .push(format!("{}: no applicable rows", self.name));
            return;
        }
        report.claims.push(ClaimCheck {
            name: self.name.to_string(),
            passed: self.counterexample.is_none(),
            detail: self
                .counterexample
                .unwrap_or_else(|| format!("{} comparisons hold", self.checked)),
        });
    }
}

/// Analytic values strictly decrease and simulated values do not increase
/// beyond noise along each series.
fn decreasing(claim: &mut ClaimBuilder, series: &[&SweepRow], metric: Metric, k: f64) {
    for w in series.windows(2) {
        let (a, b) = (w[0], w[1]);
        if let (Some(x), Some(y)) = (analytic_value(a, metric), analytic_value(b, metric)) {
            claim.check(y < x, || {
                format!(
                    "{} analytic {} at {} -> {} at {}",
                    a.system,
                    metric.name(),
                    a.swept,
                    y,
                    b.swept
                )
            });
        }
        if let (Some(x), Some(y)) = (sim_value(a, metric), sim_value(b, metric)) {
            claim.check(sim_le(y, x, k), || {
                format!(
                    "{} sim {} rises {} -> {} from {} to {}",
                    a.system,
                    metric.name(),
                    x.0,
                    y.0,
                    a.swept,
                    b.swept
                )
            });
        }
    }
}

/// Row `lo` stays at or below row `hi`: exactly on analytic values, within
/// noise on simulated ones.
fn below(
    claim: &mut ClaimBuilder,
    lo: &SweepRow,
    hi: &SweepRow,
    metric: Metric,
    k: f64,
    strict_sim: bool,
) {
    if let (Some(x), Some(y)) = (analytic_value(lo, metric), analytic_value(hi, metric)) {
        claim.check(x <= y, || {
            format!(
                "at {}: {} analytic {} = {} above {} = {}",
                lo.swept,
                metric.name(),
                lo.system,
                x,
                hi.system,
                y
            )
        });
    }
    if let (Some(x), Some(y)) = (sim_value(lo, metric), sim_value(hi, metric)) {
        let ok = if strict_sim {
            x.0 < y.0
        } else {
            sim_le(x, y, k)
        };
        claim.check(ok, || {
            format!(
                "at {}: {} sim {} = {} above {} = {}",
                lo.swept,
                metric.name(),
                lo.system,
                x.0,
                hi.system,
                y.0
            )
        });
    }
}

fn pair(
    table: &SweepTable,
    service: ServiceKind,
    a: (Discipline, DecisionKind),
    b: (Discipline, DecisionKind),
) -> Vec<(&SweepRow, &SweepRow)> {
    let xs = table.series(service, a.0, a.1);
    let ys = table.series(service, b.0, b.1);
    xs.into_iter()
        .filter_map(|x| ys.iter().find(|y| y.swept == x.swept).map(|y| (x, *y)))
        .collect()
}

const BLOCKING_M: (Discipline, DecisionKind) = (Discipline::Blocking1, DecisionKind::Poisson);
const BLOCKING_D: (Discipline, DecisionKind) = (Discipline::Blocking1, DecisionKind::Periodic);
const FCFS_M: (Discipline, DecisionKind) = (Discipline::FcfsInfinite, DecisionKind::Poisson);
const FCFS_D: (Discipline, DecisionKind) = (Discipline::FcfsInfinite, DecisionKind::Periodic);

fn claims(table: &SweepTable, k: f64, report: &mut VerifyReport) {
    use ServiceKind::*;
    let figure = table.spec.figure;
    let decisions = match figure {
        FigureId::AudVsRhoM | FigureId::PmisVsNuM => vec![DecisionKind::Poisson],
        _ => vec![DecisionKind::Periodic],
    };

    if matches!(figure, FigureId::AudVsRhoM | FigureId::AudVsRhoD) {
        let mut c = ClaimBuilder::new(CLAIM_AUD_DECREASING_IN_RHO);
        for kind in ServiceKind::ALL {
            decreasing(
                &mut c,
                &table.series(kind, Discipline::Blocking1, decisions[0]),
                Metric::Aud,
                k,
            );
        }
        c.finish(report);

        let mut c = ClaimBuilder::new(CLAIM_BLOCKING_BEATS_FCFS_AUD);
        let (b, q) = if figure == FigureId::AudVsRhoM {
            (BLOCKING_M, FCFS_M)
        } else {
            (BLOCKING_D, FCFS_D)
        };
        for kind in ServiceKind::ALL {
            for (lo, hi) in pair(table, kind, b, q) {
                if lo.swept > 0.5 {
                    below(&mut c, lo, hi, Metric::Aud, k, true);
                }
            }
        }
        c.finish(report);
    }

    if matches!(figure, FigureId::AudVsRhoM | FigureId::PmisVsNuM) {
        let mut c = ClaimBuilder::new(CLAIM_POISSON_ORDERING);
        let order = [Deterministic, Uniform, Exponential];
        for metric in [Metric::Aud, Metric::Pmis] {
            let series: Vec<_> = order
                .iter()
                .map(|&s| table.series(s, Discipline::Blocking1, DecisionKind::Poisson))
                .collect();
            for i in 0..series[0].len() {
                for w in series.windows(2) {
                    if let (Some(lo), Some(hi)) = (w[0].get(i), w[1].get(i)) {
                        if let (Some(x), Some(y)) =
                            (analytic_value(lo, metric), analytic_value(hi, metric))
                        {
                            c.check(x < y, || {
                                format!(
                                    "at {}: {} {} = {x} not below {} = {y}",
                                    lo.swept,
                                    metric.name(),
                                    lo.system,
                                    hi.system
                                )
                            });
                        }
                    }
                }
            }
        }
        c.finish(report);
    }

    if matches!(figure, FigureId::PmisVsNuM | FigureId::PmisVsNuD) {
        let mut c = ClaimBuilder::new(CLAIM_BLOCKING_PMIS_BELOW_FCFS);
        let (b, q) = if figure == FigureId::PmisVsNuM {
            (BLOCKING_M, FCFS_M)
        } else {
            (BLOCKING_D, FCFS_D)
        };
        for kind in ServiceKind::ALL {
            for (lo, hi) in pair(table, kind, b, q) {
                below(&mut c, lo, hi, Metric::Pmis, k, false);
            }
        }
        c.finish(report);
    }

    if figure == FigureId::PmisVsNuD {
        let mut c = ClaimBuilder::new(CLAIM_DET_PMIS_ZERO);
        for row in table.rows.iter().filter(|r| r.service == Deterministic) {
            if let Some(s) = &row.sim {
                c.check(s.n_missed_updates == 0, || {
                    format!(
                        "{} at {} missed {} updates",
                        row.system, row.swept, s.n_missed_updates
                    )
                });
            }
        }
        c.finish(report);
    }

    if figure == FigureId::DecisionCompare {
        let mut c = ClaimBuilder::new(CLAIM_PERIODIC_AUD_TOWARD_POISSON);
        for kind in ServiceKind::ALL {
            let periodic = table.series(kind, Discipline::Blocking1, DecisionKind::Periodic);
            let with_formula: Vec<_> = periodic
                .iter()
                .copied()
                .filter(|r| r.analytic_aud.is_some())
                .collect();
            for w in with_formula.windows(2) {
                let (x, y) = (
                    w[0].analytic_aud.unwrap().value,
                    w[1].analytic_aud.unwrap().value,
                );
                c.check(y < x, || {
                    format!(
                        "{} analytic AuD {x} at {} -> {y} at {}",
                        w[0].system, w[0].swept, w[1].swept
                    )
                });
            }
            for (m, d) in pair(table, kind, BLOCKING_M, BLOCKING_D) {
                if let (Some(x), Some(y)) = (
                    analytic_value(m, Metric::Aud),
                    analytic_value(d, Metric::Aud),
                ) {
                    c.check(x <= y, || {
                        format!(
                            "at {}: periodic analytic AuD {y} below Poisson {x} for {}",
                            m.swept, d.system
                        )
                    });
                }
            }
        }
        c.finish(report);

        let mut c = ClaimBuilder::new(CLAIM_PERIODIC_PMIS_BELOW_POISSON);
        for kind in ServiceKind::ALL {
            for (m, d) in pair(table, kind, BLOCKING_M, BLOCKING_D) {
                below(&mut c, d, m, Metric::Pmis, k, false);
            }
        }
        c.finish(report);
    }

    if figure == FigureId::SummaryBar {
        let mut c = ClaimBuilder::new(CLAIM_SUMMARY_BLOCKING_WINS);
        for (b, q) in [(BLOCKING_M, FCFS_M), (BLOCKING_D, FCFS_D)] {
            for (lo, hi) in pair(table, Deterministic, b, q) {
                below(&mut c, lo, hi, Metric::Aud, k, true);
                below(&mut c, lo, hi, Metric::Pmis, k, false);
            }
        }
        c.finish(report);
    }
}

/// Re-check every row of `table` under `policy` and evaluate the figure's
/// qualitative claims.
pub fn verify(table: &SweepTable, policy: &TolerancePolicy) -> VerifyReport {
    let mut report = VerifyReport {
        figure: table.spec.figure,
        rows_checked: 0,
        failures: Vec::new(),
        errors: Vec::new(),
        max_approx_gap_aud: None,
        max_approx_gap_pmis: None,
        claims: Vec::new(),
        skipped: Vec::new(),
    };
    for row in &table.rows {
        if let Some(e) = &row.error {
            report
                .errors
                .push((row.swept, row.system.clone(), e.clone()));
        }
        let mut checked = false;
        for metric in [Metric::Aud, Metric::Pmis] {
            let Some(ok) = row.check(metric, policy) else {
                continue;
            };
            checked = true;
            let (analytic, sim, stderr) = row.metric(metric).expect("checked rows are complete");
            if analytic.exactness == Exactness::UniformEpochApprox {
                let gap = row.rel_dev(metric).unwrap_or(0.0);
                let slot = match metric {
                    Metric::Aud => &mut report.max_approx_gap_aud,
                    Metric::Pmis => &mut report.max_approx_gap_pmis,
                };
                *slot = Some(slot.map_or(gap, |g: f64| g.max(gap)));
            }
            if !ok {
                report.failures.push(RowFailure {
                    swept: row.swept,
                    system: row.system.clone(),
                    metric,
                    analytic: analytic.value,
                    sim,
                    stderr,
                    exactness: analytic.exactness,
                });
            }
        }
        if checked {
            report.rows_checked += 1;
        }
    }
    claims(table, policy.k_sigma, &mut report);
    report
}

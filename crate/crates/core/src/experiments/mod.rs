//! Parameter sweeps that pair closed-form values with simulation estimates,
//! one table per figure of the evaluation, plus CSV output and a
//! pass/fail harness.
//!
//! Every row of a sweep uses the same seed, so neighbouring grid points share
//! random numbers and trend checks are not swamped by independent noise.

mod config;
mod output;
mod verify;

use std::fmt;
use std::str::FromStr;

pub use config::{parse_config, ConfigMap};
pub use output::{emit_csv, write_csv, CSV_HEADER};
pub use verify::{
    verify, ClaimCheck, RowFailure, VerifyReport, CLAIM_AUD_DECREASING_IN_RHO,
    CLAIM_BLOCKING_BEATS_FCFS_AUD, CLAIM_BLOCKING_PMIS_BELOW_FCFS, CLAIM_DET_PMIS_ZERO,
    CLAIM_PERIODIC_AUD_TOWARD_POISSON, CLAIM_PERIODIC_PMIS_BELOW_POISSON, CLAIM_POISSON_ORDERING,
    CLAIM_SUMMARY_BLOCKING_WINS,
};

use crate::analytic::{
    aud_specialized_d, m0_from_rates, pmis_mg11_d, pmis_mg1_m_infinite, pmis_mm11_d_unit_load,
    report_poisson, AnalyticValue, Exactness,
};
use crate::error::{invalid, Error, Result};
use crate::simulator::{
    replicate, Discipline, SimEstimate, SimRunConfig, SystemSpec, DEFAULT_WARMUP,
};
use crate::stochastic::{ArrivalModel, DecisionKind, DecisionModel, ServiceKind, ServiceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Poisson-decision AuD against load.
    AudVsRhoM,
    /// Poisson-decision missing probability against decision rate, bufferless
    /// and infinite buffer.
    PmisVsNuM,
    /// Periodic-decision AuD against load.
    AudVsRhoD,
    /// Periodic-decision missing probability against decision rate.
    PmisVsNuD,
    /// Poisson against periodic decisions along the decision rate.
    DecisionCompare,
    /// Every system variant at a single operating point.
    SummaryBar,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::AudVsRhoM,
        FigureId::PmisVsNuM,
        FigureId::AudVsRhoD,
        FigureId::PmisVsNuD,
        FigureId::DecisionCompare,
        FigureId::SummaryBar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::AudVsRhoM => "fig_aud_vs_rho_M",
            FigureId::PmisVsNuM => "fig_pmis_vs_nu_M",
            FigureId::AudVsRhoD => "fig_aud_vs_rho_D",
            FigureId::PmisVsNuD => "fig_pmis_vs_nu_D",
            FigureId::DecisionCompare => "fig_decision_compare",
            FigureId::SummaryBar => "fig_summary_bar",
        }
    }

    pub fn swept(self) -> SweptVariable {
        match self {
            FigureId::AudVsRhoM | FigureId::AudVsRhoD | FigureId::SummaryBar => SweptVariable::Rho,
            FigureId::PmisVsNuM | FigureId::PmisVsNuD | FigureId::DecisionCompare => {
                SweptVariable::Nu
            }
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid("figure", format!("unknown figure `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweptVariable {
    Rho,
    Nu,
}

/// Simulation effort per row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimBudget {
    pub horizon: u64,
    pub warmup: u64,
    pub n_reps: u64,
    pub seed: u64,
}

impl Default for SimBudget {
    fn default() -> Self {
        Self {
            horizon: 2_000_000,
            warmup: DEFAULT_WARMUP,
            n_reps: 4,
            seed: 1,
        }
    }
}

/// Pass bands for comparing a simulated value with a closed form.
///
/// Exact formulas must lie within `k_sigma` standard errors. Approximate
/// AuD must lie within `approx_rel_aud` relative; approximate missing
/// probability within `k_sigma` standard errors or `approx_rel_pmis`
/// relative, whichever is wider.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TolerancePolicy {
    pub k_sigma: f64,
    pub approx_rel_aud: f64,
    pub approx_rel_pmis: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            k_sigma: 5.0,
            approx_rel_aud: 0.05,
            approx_rel_pmis: 0.10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Aud,
    Pmis,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Aud => "aud",
            Metric::Pmis => "pmis",
        }
    }
}

impl TolerancePolicy {
    pub fn accepts(&self, metric: Metric, analytic: &AnalyticValue, sim: f64, stderr: f64) -> bool {
        let dev = (sim - analytic.value).abs();
        if dev == 0.0 {
            return true;
        }
        let sigma_ok = dev <= self.k_sigma * stderr;
        match (analytic.exactness, metric) {
            (Exactness::Exact, _) => sigma_ok,
            (Exactness::UniformEpochApprox, Metric::Aud) => {
                dev <= self.approx_rel_aud * analytic.value.abs()
            }
            (Exactness::UniformEpochApprox, Metric::Pmis) => {
                sigma_ok || dev <= self.approx_rel_pmis * analytic.value.abs()
            }
        }
    }
}

/// `|sim − analytic| / |analytic|`; zero when both vanish, infinite when
/// only the analytic value does.
pub fn rel_dev(analytic: f64, sim: f64) -> f64 {
    let dev = (sim - analytic).abs();
    if analytic == 0.0 {
        if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        dev / analytic.abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub figure: FigureId,
    /// Service rate.
    pub mu: f64,
    /// Fixed load for decision-rate sweeps and the summary point.
    pub rho: f64,
    /// Poisson decision rate for load sweeps.
    pub nu: f64,
    /// Periodic decision ratio `nu / mu` for load sweeps and the summary.
    pub m0: u64,
    pub grid: Vec<f64>,
    /// Add infinite-buffer FCFS rows (only where `rho < 1`) to load sweeps.
    /// Decision-rate sweeps and the summary always carry them.
    pub fcfs_baselines: bool,
    pub budget: SimBudget,
    pub tolerance: TolerancePolicy,
}

/// `start, start + step, …` up to `stop` inclusive, built from integer
/// multiples so grid points are exact decimals.
pub fn decimal_grid(start_tenths: u32, stop_tenths: u32, step_tenths: u32) -> Vec<f64> {
    (start_tenths..=stop_tenths)
        .step_by(step_tenths as usize)
        .map(|t| t as f64 / 10.0)
        .collect()
}

impl SweepSpec {
    /// Default parameters and grid for a figure.
    pub fn for_figure(figure: FigureId) -> Self {
        let rho_grid = decimal_grid(1, 30, 1);
        let nu_grid = decimal_grid(5, 100, 5);
        let base = Self {
            figure,
            mu: 1.5,
            rho: 0.5,
            nu: 1.0,
            m0: 30,
            grid: rho_grid,
            fcfs_baselines: false,
            budget: SimBudget::default(),
            tolerance: TolerancePolicy::default(),
        };
        match figure {
            FigureId::AudVsRhoM | FigureId::AudVsRhoD => base,
            FigureId::PmisVsNuM | FigureId::PmisVsNuD | FigureId::DecisionCompare => Self {
                mu: 0.5,
                grid: nu_grid,
                ..base
            },
            FigureId::SummaryBar => Self {
                rho: 0.6,
                m0: 1,
                grid: vec![0.6],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("mu", self.mu)?;
        positive("rho", self.rho)?;
        positive("nu", self.nu)?;
        if self.m0 == 0 {
            return Err(invalid("m0", "must be a positive integer"));
        }
        if self.grid.is_empty() {
            return Err(invalid("grid", "must not be empty"));
        }
        for &g in &self.grid {
            positive("grid", g)?;
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("grid", "must be strictly increasing"));
        }
        if self.budget.n_reps == 0 {
            return Err(invalid("reps", "must be >= 1"));
        }
        if self.budget.warmup >= self.budget.horizon {
            return Err(Error::HorizonTooSmall {
                horizon: self.budget.horizon,
                warmup: self.budget.warmup,
            });
        }
        Ok(())
    }

    /// `(lambda, nu)` at one grid point.
    fn operating_point(&self, x: f64) -> (f64, f64) {
        match self.figure {
            FigureId::AudVsRhoM => (x * self.mu, self.nu),
            FigureId::AudVsRhoD | FigureId::SummaryBar => (x * self.mu, self.m0 as f64 * self.mu),
            FigureId::PmisVsNuM | FigureId::PmisVsNuD | FigureId::DecisionCompare => {
                (self.rho * self.mu, x)
            }
        }
    }

    fn variants(&self, rho: f64) -> Vec<Variant> {
        let decisions: &[DecisionKind] = match self.figure {
            FigureId::AudVsRhoM | FigureId::PmisVsNuM => &[DecisionKind::Poisson],
            FigureId::AudVsRhoD | FigureId::PmisVsNuD => &[DecisionKind::Periodic],
            FigureId::DecisionCompare | FigureId::SummaryBar => {
                &[DecisionKind::Poisson, DecisionKind::Periodic]
            }
        };
        let with_fcfs = match self.figure {
            FigureId::AudVsRhoM | FigureId::AudVsRhoD => self.fcfs_baselines,
            FigureId::PmisVsNuM | FigureId::PmisVsNuD | FigureId::SummaryBar => true,
            FigureId::DecisionCompare => false,
        } && rho < 1.0;
        let mut disciplines = vec![Discipline::Blocking1];
        if with_fcfs {
            disciplines.push(Discipline::FcfsInfinite);
        }
        let mut out = Vec::new();
        for &discipline in &disciplines {
            for &decision in decisions {
                for service in ServiceKind::ALL {
                    out.push(Variant {
                        service,
                        discipline,
                        decision,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Variant {
    service: ServiceKind,
    discipline: Discipline,
    decision: DecisionKind,
}

/// One system at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub swept: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub system: String,
    pub service: ServiceKind,
    pub discipline: Discipline,
    pub decision: DecisionKind,
    /// `None` where no closed form covers the system.
    pub analytic_aud: Option<AnalyticValue>,
    pub analytic_pmis: Option<AnalyticValue>,
    pub sim: Option<SimEstimate>,
    /// Failure while evaluating this row; the sweep continues regardless.
    pub error: Option<String>,
    /// `None` when there is nothing to compare.
    pub pass: Option<bool>,
}

impl SweepRow {
    /// `(analytic, simulated, standard error used for the check)`.
    ///
    /// For the missing probability the batch-means error is floored at the
    /// binomial error `sqrt(p(1−p)/n)` implied by the analytic `p`: when misses
    /// are so rare that no batch sees one, the batch error collapses to zero
    /// even though the estimate is far from settled.
    pub fn metric(&self, metric: Metric) -> Option<(AnalyticValue, f64, f64)> {
        let sim = self.sim.as_ref()?;
        match metric {
            Metric::Aud => Some((self.analytic_aud?, sim.avg_aud, sim.aud_stderr)),
            Metric::Pmis => {
                let a = self.analytic_pmis?;
                let n = sim.n_successful.max(1) as f64;
                let binomial = (a.value * (1.0 - a.value) / n).sqrt();
                Some((a, sim.missing_prob, sim.pmis_stderr.max(binomial)))
            }
        }
    }

    pub fn abs_dev(&self, metric: Metric) -> Option<f64> {
        self.metric(metric).map(|(a, s, _)| (s - a.value).abs())
    }

    pub fn rel_dev(&self, metric: Metric) -> Option<f64> {
        self.metric(metric).map(|(a, s, _)| rel_dev(a.value, s))
    }

    /// Per-metric verdict under `policy`; `None` when the metric has no
    /// analytic or simulated value.
    pub fn check(&self, metric: Metric, policy: &TolerancePolicy) -> Option<bool> {
        self.metric(metric)
            .map(|(a, s, se)| policy.accepts(metric, &a, s, se))
    }

    /// Combined verdict over both metrics.
    pub fn evaluate(&self, policy: &TolerancePolicy) -> Option<bool> {
        let checks: Vec<bool> = [Metric::Aud, Metric::Pmis]
            .into_iter()
            .filter_map(|m| self.check(m, policy))
            .collect();
        if checks.is_empty() {
            None
        } else {
            Some(checks.into_iter().all(|c| c))
        }
    }
}

/// Finished sweep: the spec that produced it and its rows in
/// (grid index, system) order.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows of one system, in grid order.
    pub fn series(
        &self,
        service: ServiceKind,
        discipline: Discipline,
        decision: DecisionKind,
    ) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| {
                r.service == service && r.discipline == discipline && r.decision == decision
            })
            .collect()
    }
}

/// Closed-form `(AuD, missing probability)` covering `system`; `None` where
/// no formula is in scope (infinite-buffer AuD, infinite buffer with
/// periodic decisions, periodic decisions at non-integer `nu / mu`, and
/// periodic decisions with a general service law).
///
/// Exponential service at exactly unit load takes the continuous extension
/// of its periodic missing probability.
pub fn closed_forms(system: &SystemSpec) -> Result<(Option<AnalyticValue>, Option<AnalyticValue>)> {
    let lambda = system.arrival.lambda;
    let nu = system.decision.nu();
    let service = &system.service;
    match (system.discipline, system.decision.kind()) {
        (Discipline::Blocking1, DecisionKind::Poisson) => {
            let r = report_poisson(lambda, service, nu)?;
            Ok((Some(r.avg_aud), Some(r.missing_prob)))
        }
        (Discipline::Blocking1, DecisionKind::Periodic) => {
            let Some(kind) = service.kind() else {
                return Ok((None, None));
            };
            let mu = service.mu();
            let Ok(m0) = m0_from_rates(nu, mu) else {
                return Ok((None, None));
            };
            let aud = aud_specialized_d(lambda, mu, m0, kind)?;
            let pmis = match pmis_mg11_d(lambda, mu, m0, kind) {
                Err(Error::SingularLoad { .. }) => pmis_mm11_d_unit_load(m0)?,
                other => other?,
            };
            Ok((Some(aud), Some(pmis)))
        }
        (Discipline::FcfsInfinite, DecisionKind::Poisson) => {
            Ok((None, Some(pmis_mg1_m_infinite(lambda, nu, service)?)))
        }
        (Discipline::FcfsInfinite, DecisionKind::Periodic) => Ok((None, None)),
    }
}

fn evaluate_row(spec: &SweepSpec, x: f64, lambda: f64, nu: f64, v: Variant) -> SweepRow {
    let mu = spec.mu;
    let mut errors = Vec::new();
    let service = ServiceModel::named(v.service, mu);
    let decision = match v.decision {
        DecisionKind::Poisson => DecisionModel::poisson(nu),
        DecisionKind::Periodic => DecisionModel::periodic(nu, None),
    };
    let mut row = SweepRow {
        swept: x,
        lambda,
        mu,
        nu,
        system: String::new(),
        service: v.service,
        discipline: v.discipline,
        decision: v.decision,
        analytic_aud: None,
        analytic_pmis: None,
        sim: None,
        error: None,
        pass: None,
    };
    let built = (|| -> Result<SystemSpec> {
        Ok(SystemSpec {
            arrival: ArrivalModel::new(lambda)?,
            service: service?,
            decision: decision?,
            discipline: v.discipline,
        })
    })();
    match built {
        Ok(system) => {
            row.system = system.label();
            match closed_forms(&system) {
                Ok((aud, pmis)) => {
                    row.analytic_aud = aud;
                    row.analytic_pmis = pmis;
                }
                Err(e) => errors.push(format!("analytic: {e}")),
            }
            let config = SimRunConfig {
                spec: system,
                horizon: spec.budget.horizon,
                warmup: spec.budget.warmup,
                seed: spec.budget.seed,
            };
            match replicate(&config, spec.budget.n_reps) {
                Ok(est) => row.sim = Some(est),
                Err(e) => errors.push(format!("simulation: {e}")),
            }
        }
        Err(e) => errors.push(e.to_string()),
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row.pass = row.evaluate(&spec.tolerance);
    row
}

/// Evaluate every system variant at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &x in &spec.grid {
        let (lambda, nu) = spec.operating_point(x);
        let rho = lambda / spec.mu;
        for v in spec.variants(rho) {
            rows.push(evaluate_row(spec, x, lambda, nu, v));
        }
    }
    Ok(SweepTable {
        spec: spec.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(figure: FigureId) -> SweepSpec {
        let mut spec = SweepSpec::for_figure(figure);
        spec.budget = SimBudget {
            horizon: 20_000,
            warmup: 1_000,
            n_reps: 1,
            seed: 5,
        };
        spec
    }

    #[test]
    fn figure_names_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig_nope".parse::<FigureId>().is_err());
    }

    #[test]
    fn default_grids() {
        let g = SweepSpec::for_figure(FigureId::AudVsRhoM).grid;
        assert_eq!(g.len(), 30);
        assert_eq!((g[0], g[9], g[29]), (0.1, 1.0, 3.0));
        let g = SweepSpec::for_figure(FigureId::PmisVsNuD).grid;
        assert_eq!(g.len(), 20);
        assert_eq!((g[0], g[19]), (0.5, 10.0));
    }

    #[test]
    fn row_counts() {
        let mut spec = quick(FigureId::AudVsRhoM);
        spec.grid = vec![0.5, 2.0];
        assert_eq!(run_sweep(&spec).unwrap().rows.len(), 6);
        spec.fcfs_baselines = true;
        // fcfs only below unit load
        assert_eq!(run_sweep(&spec).unwrap().rows.len(), 9);
        let mut spec = quick(FigureId::SummaryBar);
        spec.budget.horizon = 5_000;
        assert_eq!(run_sweep(&spec).unwrap().rows.len(), 12);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = quick(FigureId::AudVsRhoM);
        spec.grid = vec![1.0, 1.0];
        assert!(run_sweep(&spec).is_err());
        spec.grid = vec![];
        assert!(run_sweep(&spec).is_err());
        let mut spec = quick(FigureId::AudVsRhoM);
        spec.budget.n_reps = 0;
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn analytic_columns_follow_scope() {
        let mut spec = quick(FigureId::PmisVsNuM);
        spec.grid = vec![1.0];
        let t = run_sweep(&spec).unwrap();
        for r in &t.rows {
            assert!(r.analytic_pmis.is_some());
            assert_eq!(
                r.analytic_aud.is_some(),
                r.discipline == Discipline::Blocking1
            );
        }
        // nu / mu = 1.5 is not an integer, so no periodic closed form
        let mut spec = quick(FigureId::PmisVsNuD);
        spec.grid = vec![0.75];
        let t = run_sweep(&spec).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.analytic_aud.is_none() && r.pass.is_none()));
    }

    #[test]
    fn unit_load_uses_continuous_extension() {
        let mut spec = quick(FigureId::AudVsRhoD);
        spec.grid = vec![1.0];
        let t = run_sweep(&spec).unwrap();
        let e = t
            .rows
            .iter()
            .find(|r| r.service == ServiceKind::Exponential)
            .unwrap();
        assert!(e.error.is_none());
        assert!(e.analytic_pmis.unwrap().value > 0.0);
    }

    #[test]
    fn tolerance_bands() {
        let p = TolerancePolicy::default();
        let exact = AnalyticValue {
            value: 1.0,
            exactness: Exactness::Exact,
            formula_id: "x",
        };
        assert!(p.accepts(Metric::Aud, &exact, 1.04, 0.01));
        assert!(!p.accepts(Metric::Aud, &exact, 1.06, 0.01));
        let approx = AnalyticValue {
            exactness: Exactness::UniformEpochApprox,
            ..exact
        };
        assert!(p.accepts(Metric::Aud, &approx, 1.049, 1e-6));
        assert!(!p.accepts(Metric::Aud, &approx, 1.06, 0.1));
        assert!(p.accepts(Metric::Pmis, &approx, 1.09, 1e-6));
        assert!(p.accepts(Metric::Pmis, &approx, 1.3, 0.1));
        assert!(!p.accepts(Metric::Pmis, &approx, 1.3, 0.01));
    }

    #[test]
    fn rel_dev_edges() {
        assert_eq!(rel_dev(0.0, 0.0), 0.0);
        assert_eq!(rel_dev(0.0, 0.1), f64::INFINITY);
        assert!((rel_dev(2.0, 2.2) - 0.1).abs() < 1e-12);
    }
}

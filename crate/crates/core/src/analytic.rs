//! Closed-form average age-upon-decisions (AuD) and missing probabilities
//! for the bufferless M/G/1/1 queue, plus the ordering predicates that
//! compare service laws.
//!
//! Notation used throughout: `rho = lambda / mu`, `nu` is the decision rate,
//! and for periodic decisions `nu = m0 * mu` with integer `m0 >= 1`. The
//! periodic-decision constants are `alpha = e^(−mu/nu)` and
//! `beta = e^(−lambda/nu)`.
//!
//! Poisson-decision results are exact. Periodic-decision AuDs assume decision
//! epochs fall uniformly inside each inter-departure interval, and the
//! periodic missing probabilities for uniform and exponential service assume
//! a uniform lattice offset at each departure; those values are flagged
//! [`Exactness::UniformEpochApprox`].

use std::fmt;

use crate::error::{check_rate, invalid, Error, Result};
use crate::stochastic::{service_mgf_neg, service_moments, ServiceKind, ServiceModel};

/// Half-width of the rejected band around `rho = 1` in the exponential-service
/// periodic missing probability.
pub const SINGULAR_LOAD_BAND: f64 = 1e-9;

/// Roundoff allowed outside `[0, 1]` before a probability is reported as an
/// error instead of clamped.
const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    Exact,
    UniformEpochApprox,
}

impl Exactness {
    pub fn name(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::UniformEpochApprox => "approx",
        }
    }
}

/// One closed-form value and where it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticValue {
    pub value: f64,
    pub exactness: Exactness,
    pub formula_id: &'static str,
}

impl fmt::Display for AnalyticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}, {}]",
            self.value,
            self.formula_id,
            self.exactness.name()
        )
    }
}

/// Average AuD and missing probability of one bufferless system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticReport {
    pub avg_aud: AnalyticValue,
    pub missing_prob: AnalyticValue,
}

/// First and second moments of the decision counts before (`n1`) and after
/// (`n2`) the arrival of a successful update, within one inter-departure
/// interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionCountMoments {
    pub e_n1: f64,
    pub e_n1_sq: f64,
    pub e_n2: f64,
    pub e_n2_sq: f64,
}

/// Service kinds ordered from smallest to largest metric value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingVerdict {
    pub relation: Vec<ServiceKind>,
    pub strict: bool,
}

impl OrderingVerdict {
    fn from_values(values: [(ServiceKind, f64); 3]) -> Self {
        let mut sorted = values;
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let strict = sorted.windows(2).all(|w| w[0].1 < w[1].1);
        Self {
            relation: sorted.iter().map(|(k, _)| *k).collect(),
            strict,
        }
    }

    /// True when the verdict is exactly `order`, strictly.
    pub fn is_strictly(&self, order: &[ServiceKind]) -> bool {
        self.strict && self.relation == order
    }
}

impl fmt::Display for OrderingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.strict { " < " } else { " <= " };
        let labels: Vec<String> = self
            .relation
            .iter()
            .map(|k| k.kendall().to_string())
            .collect();
        f.write_str(&labels.join(sep))
    }
}

/// Orderings of both metrics for Poisson decisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonOrdering {
    pub aud: OrderingVerdict,
    pub pmis: OrderingVerdict,
}

fn formula_id(
    metric: &str,
    kind: Option<ServiceKind>,
    buffer: &str,
    decision: char,
) -> &'static str {
    // A fixed table keeps ids `'static` and greppable in CSV output.
    match (metric, kind.map(ServiceKind::kendall), buffer, decision) {
        ("aud", None, "1/1", 'M') => "aud:M/G/1/1-M",
        ("aud", Some('U'), "1/1", 'M') => "aud:M/U/1/1-M",
        ("aud", Some('M'), "1/1", 'M') => "aud:M/M/1/1-M",
        ("aud", Some('D'), "1/1", 'M') => "aud:M/D/1/1-M",
        ("aud", None, "1/1", 'D') => "aud:M/G/1/1-D",
        ("aud", Some('U'), "1/1", 'D') => "aud:M/U/1/1-D",
        ("aud", Some('M'), "1/1", 'D') => "aud:M/M/1/1-D",
        ("aud", Some('D'), "1/1", 'D') => "aud:M/D/1/1-D",
        ("pmis", _, "1/1", 'M') => "pmis:M/G/1/1-M",
        ("pmis", _, "1", 'M') => "pmis:M/G/1-M",
        ("pmis", Some('U'), "1/1", 'D') => "pmis:M/U/1/1-D",
        ("pmis", Some('M'), "1/1", 'D') => "pmis:M/M/1/1-D",
        ("pmis", Some('D'), "1/1", 'D') => "pmis:M/D/1/1-D",
        _ => "unknown",
    }
}

fn check_m0(m0: u64) -> Result<()> {
    if m0 >= 1 {
        Ok(())
    } else {
        Err(invalid("m0", "must be a positive integer"))
    }
}

fn checked_probability(value: f64) -> Result<f64> {
    if !value.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&value) {
        return Err(Error::OutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Integer `m0 = nu / mu`, if the decision rate is a whole multiple of the
/// service rate (relative tolerance 1e-9).
pub fn m0_from_rates(nu: f64, mu: f64) -> Result<u64> {
    check_rate("nu", nu)?;
    check_rate("mu", mu)?;
    let ratio = nu / mu;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * rounded {
        Ok(rounded as u64)
    } else {
        Err(invalid(
            "m0",
            format!("nu/mu = {ratio} is not a positive integer"),
        ))
    }
}

/// `(1 + e^(−a/m0)) / (m0 (1 − e^(−a/m0)))`.
///
/// With `a = 1` this is the alpha term and tends to `2`; with `a = rho` it is
/// the beta term and tends to `2/rho` as `m0` grows.
pub fn lattice_ratio(a: f64, m0: f64) -> f64 {
    let x = a / m0;
    let e = (-x).exp();
    (1.0 + e) / (m0 * -(-x).exp_m1())
}

/// Average AuD of M/G/1/1 with Poisson decisions:
/// `λμE[S²] / (2(λ+μ)) + (λ+μ)/(λμ)`. Independent of the decision rate.
pub fn aud_mg11_m(lambda: f64, service: &ServiceModel) -> Result<AnalyticValue> {
    check_rate("lambda", lambda)?;
    let (mean, second) = service_moments(service)?;
    let mu = 1.0 / mean;
    let value = lambda * mu * second / (2.0 * (lambda + mu)) + (lambda + mu) / (lambda * mu);
    Ok(AnalyticValue {
        value,
        exactness: Exactness::Exact,
        formula_id: formula_id("aud", None, "1/1", 'M'),
    })
}

/// Poisson-decision AuD for a named service law, written in terms of `rho`.
pub fn aud_specialized_m(lambda: f64, mu: f64, kind: ServiceKind) -> Result<f64> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    let rho = lambda / mu;
    Ok(match kind {
        ServiceKind::Uniform => (3.0 + 6.0 * rho + 5.0 * rho * rho) / (3.0 * lambda * (1.0 + rho)),
        ServiceKind::Exponential => (1.0 + 2.0 * rho + 2.0 * rho * rho) / (lambda * (1.0 + rho)),
        ServiceKind::Deterministic => {
            (2.0 + 4.0 * rho + 3.0 * rho * rho) / (2.0 * lambda * (1.0 + rho))
        }
    })
}

/// Missing probability of M/G/1/1 with Poisson decisions,
/// `λ/(λ+ν) · G_S(−ν)`.
pub fn pmis_mg11_m(lambda: f64, nu: f64, service: &ServiceModel) -> Result<AnalyticValue> {
    check_rate("lambda", lambda)?;
    check_rate("nu", nu)?;
    let g = service_mgf_neg(service, nu)?;
    Ok(AnalyticValue {
        value: checked_probability(lambda / (lambda + nu) * g)?,
        exactness: Exactness::Exact,
        formula_id: formula_id("pmis", service.kind(), "1/1", 'M'),
    })
}

/// Poisson-decision missing probability for a named service law, evaluated
/// from its own closed form rather than through the MGF.
pub fn pmis_specialized_m(lambda: f64, mu: f64, nu: f64, kind: ServiceKind) -> Result<f64> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    check_rate("nu", nu)?;
    Ok(match kind {
        ServiceKind::Uniform => {
            lambda * mu / (2.0 * nu * (lambda + nu)) * -(-2.0 * nu / mu).exp_m1()
        }
        ServiceKind::Exponential => lambda * mu / ((lambda + nu) * (mu + nu)),
        ServiceKind::Deterministic => lambda / (lambda + nu) * (-nu / mu).exp(),
    })
}

/// Missing probability of the infinite-buffer FCFS M/G/1 queue with Poisson
/// decisions, `G_S(−ν)(ρν + λ)/(λ + ν)`. Requires `rho = λE[S] < 1`.
pub fn pmis_mg1_m_infinite(lambda: f64, nu: f64, service: &ServiceModel) -> Result<AnalyticValue> {
    check_rate("lambda", lambda)?;
    check_rate("nu", nu)?;
    let (mean, _) = service_moments(service)?;
    let rho = lambda * mean;
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    let g = service_mgf_neg(service, nu)?;
    Ok(AnalyticValue {
        value: checked_probability(g * (rho * nu + lambda) / (lambda + nu))?,
        exactness: Exactness::Exact,
        formula_id: formula_id("pmis", service.kind(), "1", 'M'),
    })
}

pub fn decision_count_moments(
    lambda: f64,
    mu: f64,
    m0: u64,
    kind: ServiceKind,
) -> Result<DecisionCountMoments> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    check_m0(m0)?;
    let m = m0 as f64;
    let nu = m * mu;
    let beta = (-lambda / nu).exp();
    let one_minus_beta = -(-lambda / nu).exp_m1();
    let e_n1 = nu / lambda;
    let e_n1_sq = nu * (1.0 + beta) / (lambda * one_minus_beta);
    let (e_n2, e_n2_sq) = match kind {
        ServiceKind::Uniform => (
            (2.0 * m + 1.0) / 2.0,
            (2.0 * m + 1.0) * (2.0 * m + 2.0) * (4.0 * m + 3.0) / (12.0 * m),
        ),
        ServiceKind::Exponential => {
            let alpha = (-mu / nu).exp();
            let one_minus_alpha = -(-mu / nu).exp_m1();
            (nu / mu, nu * (1.0 + alpha) / (mu * one_minus_alpha))
        }
        ServiceKind::Deterministic => (m, m * m),
    };
    Ok(DecisionCountMoments {
        e_n1,
        e_n1_sq,
        e_n2,
        e_n2_sq,
    })
}

/// Periodic-decision AuD from the decision-count moments:
///
/// `E[T](E[N1] + E[N2]) / (ν E[Y]) + (E[N1²] + E[N2²] + 2E[N1]E[N2]) / (2ν² E[Y])`
pub fn aud_mg11_d_general(
    e_t_prev: f64,
    e_y: f64,
    nu: f64,
    m: &DecisionCountMoments,
) -> Result<AnalyticValue> {
    check_rate("e_t_prev", e_t_prev)?;
    check_rate("e_y", e_y)?;
    check_rate("nu", nu)?;
    let counts = m.e_n1 + m.e_n2;
    let second = m.e_n1_sq + m.e_n2_sq + 2.0 * m.e_n1 * m.e_n2;
    let value = e_t_prev * counts / (nu * e_y) + second / (2.0 * nu * nu * e_y);
    Ok(AnalyticValue {
        value,
        exactness: Exactness::UniformEpochApprox,
        formula_id: formula_id("aud", None, "1/1", 'D'),
    })
}

/// Periodic-decision AuD for a named service law (closed forms in `rho`,
/// `m0`, `alpha`, `beta`).
pub fn aud_specialized_d(
    lambda: f64,
    mu: f64,
    m0: u64,
    kind: ServiceKind,
) -> Result<AnalyticValue> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    check_m0(m0)?;
    let rho = lambda / mu;
    let m = m0 as f64;
    let beta_term = lattice_ratio(rho, m) / (2.0 * mu * (1.0 + rho));
    let value = match kind {
        ServiceKind::Uniform => {
            (2.0 * rho * m + 4.0 * m + rho + 1.0) / (2.0 * mu * m * (1.0 + rho))
                + beta_term
                + rho * (8.0 * m * m * m + 18.0 * m * m + 13.0 * m + 3.0)
                    / (12.0 * mu * m * m * m * (1.0 + rho))
        }
        ServiceKind::Exponential => {
            (2.0 + rho) / (mu * (1.0 + rho))
                + rho * lattice_ratio(1.0, m) / (2.0 * mu * (1.0 + rho))
                + beta_term
        }
        ServiceKind::Deterministic => (4.0 + 3.0 * rho) / (2.0 * mu * (1.0 + rho)) + beta_term,
    };
    Ok(AnalyticValue {
        value,
        exactness: Exactness::UniformEpochApprox,
        formula_id: formula_id("aud", Some(kind), "1/1", 'D'),
    })
}

/// Periodic-decision missing probability for a named service law.
///
/// Deterministic service is exactly zero: every inter-departure interval is
/// at least `1/mu = m0/nu` long and so contains at least one decision.
pub fn pmis_mg11_d(lambda: f64, mu: f64, m0: u64, kind: ServiceKind) -> Result<AnalyticValue> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    check_m0(m0)?;
    let rho = lambda / mu;
    let m = m0 as f64;
    let nu = m * mu;
    let one_minus_beta = -(-lambda / nu).exp_m1();
    let (value, exactness) = match kind {
        ServiceKind::Uniform => (
            1.0 / (4.0 * m) + (m * one_minus_beta - rho) / (2.0 * rho * rho),
            Exactness::UniformEpochApprox,
        ),
        ServiceKind::Exponential => {
            if (rho - 1.0).abs() < SINGULAR_LOAD_BAND {
                return Err(Error::SingularLoad { rho });
            }
            let alpha = (-mu / nu).exp();
            let one_minus_alpha = -(-mu / nu).exp_m1();
            // alpha - beta = beta (e^((λ−μ)/ν) − 1)
            let alpha_minus_beta = (-lambda / nu).exp() * ((lambda - mu) / nu).exp_m1();
            (
                m * alpha_minus_beta / (rho * (rho - 1.0))
                    + (rho - m - rho * m) * one_minus_alpha / rho
                    + alpha,
                Exactness::UniformEpochApprox,
            )
        }
        ServiceKind::Deterministic => (0.0, Exactness::Exact),
    };
    Ok(AnalyticValue {
        value: checked_probability(value)?,
        exactness,
        formula_id: formula_id("pmis", Some(kind), "1/1", 'D'),
    })
}

/// Exponential-service periodic missing probability at exactly `rho = 1`,
/// the continuous extension across the removable singularity:
/// `2α − (2m0 − 1)(1 − α)`.
pub fn pmis_mm11_d_unit_load(m0: u64) -> Result<AnalyticValue> {
    check_m0(m0)?;
    let m = m0 as f64;
    let alpha = (-1.0 / m).exp();
    let one_minus_alpha = -(-1.0 / m).exp_m1();
    Ok(AnalyticValue {
        value: checked_probability(2.0 * alpha - (2.0 * m - 1.0) * one_minus_alpha)?,
        exactness: Exactness::UniformEpochApprox,
        formula_id: formula_id("pmis", Some(ServiceKind::Exponential), "1/1", 'D'),
    })
}

/// Both metrics for a bufferless queue with Poisson decisions.
pub fn report_poisson(lambda: f64, service: &ServiceModel, nu: f64) -> Result<AnalyticReport> {
    let mut avg_aud = aud_mg11_m(lambda, service)?;
    if let Some(kind) = service.kind() {
        avg_aud.formula_id = formula_id("aud", Some(kind), "1/1", 'M');
    }
    Ok(AnalyticReport {
        avg_aud,
        missing_prob: pmis_mg11_m(lambda, nu, service)?,
    })
}

/// Both metrics for a bufferless queue with periodic decisions at
/// `nu = m0 * mu`.
pub fn report_periodic(lambda: f64, mu: f64, m0: u64, kind: ServiceKind) -> Result<AnalyticReport> {
    Ok(AnalyticReport {
        avg_aud: aud_specialized_d(lambda, mu, m0, kind)?,
        missing_prob: pmis_mg11_d(lambda, mu, m0, kind)?,
    })
}

/// Smallest `m0*` such that uniform service has a lower periodic-decision AuD
/// than exponential service exactly when `m0 > m0*`.
///
/// Scans `1..=m0_max`. Returns `Ok(None)` when uniform never wins in range.
/// A sign pattern with more than one crossing is reported as an error.
pub fn find_m0_star(lambda: f64, mu: f64, m0_max: u64) -> Result<Option<u64>> {
    check_rate("lambda", lambda)?;
    check_rate("mu", mu)?;
    check_m0(m0_max)?;
    let mut crossing = None;
    for m0 in 1..=m0_max {
        let u = aud_specialized_d(lambda, mu, m0, ServiceKind::Uniform)?.value;
        let e = aud_specialized_d(lambda, mu, m0, ServiceKind::Exponential)?.value;
        let uniform_wins = u < e;
        match (crossing, uniform_wins) {
            (None, true) => crossing = Some(m0),
            (Some(_), false) => return Err(Error::NonMonotoneCrossing { m0_max }),
            _ => {}
        }
    }
    Ok(match crossing {
        Some(c) if c > 1 => Some(c - 1),
        _ => None,
    })
}

/// Orderings of the three named service laws under Poisson decisions.
pub fn ordering_m(lambda: f64, mu: f64, nu: f64) -> Result<PoissonOrdering> {
    let aud = ServiceKind::ALL.map(|k| (k, aud_specialized_m(lambda, mu, k)));
    let pmis = ServiceKind::ALL.map(|k| (k, pmis_specialized_m(lambda, mu, nu, k)));
    let unwrap = |v: [(ServiceKind, Result<f64>); 3]| -> Result<[(ServiceKind, f64); 3]> {
        let [(k0, a), (k1, b), (k2, c)] = v;
        Ok([(k0, a?), (k1, b?), (k2, c?)])
    };
    Ok(PoissonOrdering {
        aud: OrderingVerdict::from_values(unwrap(aud)?),
        pmis: OrderingVerdict::from_values(unwrap(pmis)?),
    })
}

/// AuD ordering of the three named service laws under periodic decisions.
pub fn ordering_d(lambda: f64, mu: f64, m0: u64) -> Result<OrderingVerdict> {
    let mut values = [(ServiceKind::Uniform, 0.0); 3];
    for (slot, kind) in values.iter_mut().zip(ServiceKind::ALL) {
        *slot = (kind, aud_specialized_d(lambda, mu, m0, kind)?.value);
    }
    Ok(OrderingVerdict::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ServiceKind::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn unit_load_limit_is_continuous() {
        // the general formula cancels badly once the value is ~1e-6
        for (m0, tol) in [(1u64, 1e-6), (2, 1e-6), (7, 1e-6), (30, 1e-6), (500, 1e-4)] {
            let mu = 1.5;
            let at = pmis_mm11_d_unit_load(m0).unwrap().value;
            let lo = pmis_mg11_d(mu * (1.0 - 1e-5), mu, m0, Exponential)
                .unwrap()
                .value;
            let hi = pmis_mg11_d(mu * (1.0 + 1e-5), mu, m0, Exponential)
                .unwrap()
                .value;
            assert!(
                close(at, 0.5 * (lo + hi), tol),
                "m0={m0}: {at} vs {lo}/{hi}"
            );
        }
        assert!(matches!(
            pmis_mg11_d(1.5, 1.5, 30, Exponential),
            Err(Error::SingularLoad { .. })
        ));
    }

    #[test]
    fn poisson_aud_examples() {
        let d = aud_mg11_m(1.0, &ServiceModel::Deterministic { mu: 1.0 }).unwrap();
        assert!(close(d.value, 2.25, 1e-15));
        assert_eq!(d.exactness, Exactness::Exact);
        let e = aud_mg11_m(1.0, &ServiceModel::Exponential { mu: 1.0 }).unwrap();
        assert!(close(e.value, 2.5, 1e-15));
        let u = aud_mg11_m(1.0, &ServiceModel::Uniform { mu: 1.0 }).unwrap();
        assert!(close(u.value, 7.0 / 3.0, 1e-15));
    }

    #[test]
    fn specialized_poisson_aud_examples() {
        assert!(close(
            aud_specialized_m(1.0, 1.0, Uniform).unwrap(),
            7.0 / 3.0,
            1e-15
        ));
        assert!(close(
            aud_specialized_m(2.0, 4.0, Deterministic).unwrap(),
            4.75 / 6.0,
            1e-15
        ));
        // instant service leaves only the inter-arrival age
        let fast = aud_specialized_m(1.0, 1e9, Exponential).unwrap();
        assert!(close(fast, 1.0, 1e-8));
    }

    #[test]
    fn poisson_pmis_examples() {
        let d = pmis_mg11_m(1.0, 1.0, &ServiceModel::Deterministic { mu: 1.0 }).unwrap();
        assert!(close(d.value, 0.5 * (-1.0f64).exp(), 1e-15));
        let e = pmis_mg11_m(1.0, 2.0, &ServiceModel::Exponential { mu: 2.0 }).unwrap();
        assert!(close(e.value, 1.0 / 6.0, 1e-15));
        let tiny = pmis_mg11_m(1.0, 1e-12, &ServiceModel::Uniform { mu: 1.0 }).unwrap();
        assert!(close(tiny.value, 1.0, 1e-9));
    }

    #[test]
    fn infinite_buffer_pmis() {
        let p = pmis_mg1_m_infinite(1.0, 2.0, &ServiceModel::Exponential { mu: 2.0 }).unwrap();
        assert!(close(p.value, 1.0 / 3.0, 1e-15));
        assert!(matches!(
            pmis_mg1_m_infinite(1.0, 2.0, &ServiceModel::Exponential { mu: 1.0 }),
            Err(Error::Unstable { .. })
        ));
        // vanishing load: no queueing, so the bufferless value with G_S -> 1
        let p = pmis_mg1_m_infinite(1.0, 2.0, &ServiceModel::Deterministic { mu: 1e9 }).unwrap();
        assert!(close(p.value, 1.0 / 3.0, 1e-8));
    }

    #[test]
    fn deterministic_counts() {
        let m = decision_count_moments(1.0, 1.0, 3, Deterministic).unwrap();
        assert_eq!((m.e_n2, m.e_n2_sq), (3.0, 9.0));
        let u = decision_count_moments(1.0, 1.0, 1, Uniform).unwrap();
        assert_eq!((u.e_n2, u.e_n2_sq), (1.5, 7.0));
        assert!(decision_count_moments(1.0, 1.0, 0, Uniform).is_err());
    }

    #[test]
    fn periodic_aud_example() {
        let beta = (-1.0f64).exp();
        let expected = 1.75 + (1.0 + beta) / (4.0 * (1.0 - beta));
        let d = aud_specialized_d(1.0, 1.0, 1, Deterministic).unwrap();
        assert!(close(d.value, expected, 1e-14));
        assert_eq!(d.exactness, Exactness::UniformEpochApprox);
        assert_eq!(d.formula_id, "aud:M/D/1/1-D");
    }

    #[test]
    fn periodic_pmis_examples() {
        assert_eq!(pmis_mg11_d(0.3, 7.0, 4, Deterministic).unwrap().value, 0.0);
        assert_eq!(
            pmis_mg11_d(0.3, 7.0, 4, Deterministic).unwrap().exactness,
            Exactness::Exact
        );
        let u = pmis_mg11_d(1.0, 1.0, 1, Uniform).unwrap();
        assert!(close(u.value, 0.25 - 0.5 * (-1.0f64).exp(), 1e-13));
        assert_eq!(u.exactness, Exactness::UniformEpochApprox);
        // 0.0582432 (the hand-rounded 0.058219 drops a digit in α − β)
        let e = pmis_mg11_d(1.0, 2.0, 1, Exponential).unwrap();
        assert!(close(e.value, 0.058_243_197_679_091_36, 1e-12));
    }

    #[test]
    fn exponential_periodic_pmis_rejects_unit_load() {
        assert!(matches!(
            pmis_mg11_d(1.0, 1.0, 2, Exponential),
            Err(Error::SingularLoad { .. })
        ));
        assert!(pmis_mg11_d(1.0 + 1e-6, 1.0, 2, Exponential).is_ok());
    }

    #[test]
    fn m0_parsing() {
        assert_eq!(m0_from_rates(45.0, 1.5).unwrap(), 30);
        assert!(m0_from_rates(1.0, 2.0).is_err());
        assert!(m0_from_rates(2.5, 1.0).is_err());
    }

    #[test]
    fn ordering_at_unit_rates() {
        let o = ordering_m(1.0, 1.0, 1.0).unwrap();
        assert!(o.aud.is_strictly(&[Deterministic, Uniform, Exponential]));
        assert!(o.pmis.is_strictly(&[Deterministic, Uniform, Exponential]));
        assert_eq!(o.aud.to_string(), "D < U < M");
    }

    #[test]
    fn m0_star_rejects_zero_range() {
        assert!(find_m0_star(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn m0_star_none_when_range_too_short() {
        assert_eq!(find_m0_star(1.0, 1.0, 1).unwrap(), None);
    }
}

//! Closed forms against independently derived values: numerical quadrature,
//! direct series and Monte Carlo draws.

use aud_core::analytic::*;
use aud_core::stochastic::{
    service_mgf_neg, service_moments, RngStream, ServiceKind, ServiceModel,
};

use ServiceKind::{Deterministic, Exponential, Uniform};

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫ g(s) dF_S(s)` for the named laws.
fn service_expectation(kind: ServiceKind, mu: f64, g: impl Fn(f64) -> f64) -> f64 {
    match kind {
        Uniform => simpson(|s| g(s) * mu / 2.0, 0.0, 2.0 / mu, 4000),
        // truncate where the tail is below 1e-17
        Exponential => simpson(|s| g(s) * mu * (-mu * s).exp(), 0.0, 40.0 / mu, 40_000),
        Deterministic => g(1.0 / mu),
    }
}

#[test]
fn mgf_matches_quadrature() {
    for kind in ServiceKind::ALL {
        for (mu, nu) in [(0.5, 0.1), (1.5, 1.0), (2.0, 7.5), (10.0, 0.3)] {
            let model = ServiceModel::named(kind, mu).unwrap();
            let want = service_expectation(kind, mu, |s| (-nu * s).exp());
            let got = service_mgf_neg(&model, nu).unwrap();
            assert!(
                rel(got, want) < 1e-10,
                "{kind} mu={mu} nu={nu}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn moments_match_quadrature() {
    for kind in ServiceKind::ALL {
        let mu = 1.7;
        let model = ServiceModel::named(kind, mu).unwrap();
        let (m1, m2) = service_moments(&model).unwrap();
        assert!(rel(m1, service_expectation(kind, mu, |s| s)) < 1e-10);
        assert!(rel(m2, service_expectation(kind, mu, |s| s * s)) < 1e-10);
    }
}

#[test]
fn samplers_match_moments() {
    let n = 400_000;
    for kind in ServiceKind::ALL {
        let model = ServiceModel::named(kind, 2.0).unwrap();
        let (m1, m2) = service_moments(&model).unwrap();
        let mut rng = RngStream::new(11, 3);
        let draws: Vec<f64> = (0..n).map(|_| model.sample(&mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sq = draws.iter().map(|s| s * s).sum::<f64>() / n as f64;
        let var = draws.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
        let var_sq = draws.iter().map(|s| (s * s - sq).powi(2)).sum::<f64>() / n as f64;
        let se1 = (var / n as f64).sqrt();
        let se2 = (var_sq / n as f64).sqrt();
        assert!((mean - m1).abs() <= 5.0 * se1 + 1e-15, "{kind} mean {mean}");
        assert!((sq - m2).abs() <= 5.0 * se2 + 1e-15, "{kind} E[S²] {sq}");
    }
}

// Time-average age of a renewal-type departure stream: E[S] + E[Y²]/(2E[Y])
// with Y = Z + S, Z ~ Exp(λ) independent of S. Poisson decisions see time
// averages.
fn renewal_age(lambda: f64, kind: ServiceKind, mu: f64) -> f64 {
    let es = service_expectation(kind, mu, |s| s);
    let es2 = service_expectation(kind, mu, |s| s * s);
    let ey = 1.0 / lambda + es;
    let ey2 = 2.0 / (lambda * lambda) + 2.0 * es / lambda + es2;
    es + ey2 / (2.0 * ey)
}

#[test]
fn poisson_aud_matches_renewal_age() {
    for kind in ServiceKind::ALL {
        for (lambda, mu) in [(1.0, 1.5), (3.0, 1.5), (0.2, 9.0), (1.0, 1.0)] {
            let model = ServiceModel::named(kind, mu).unwrap();
            let got = aud_mg11_m(lambda, &model).unwrap();
            assert_eq!(got.exactness, Exactness::Exact);
            let want = renewal_age(lambda, kind, mu);
            assert!(
                rel(got.value, want) < 1e-9,
                "{kind}: {} vs {want}",
                got.value
            );
            let special = aud_specialized_m(lambda, mu, kind).unwrap();
            assert!(rel(special, want) < 1e-9);
        }
    }
}

#[test]
fn poisson_pmis_matches_quadrature() {
    for kind in ServiceKind::ALL {
        for (lambda, mu, nu) in [(1.0, 1.5, 1.0), (3.0, 1.5, 5.0), (1.0, 2.0, 0.25)] {
            let model = ServiceModel::named(kind, mu).unwrap();
            // P(no decision in Z) · P(no decision in S)
            let want = lambda / (lambda + nu) * service_expectation(kind, mu, |s| (-nu * s).exp());
            let got = pmis_mg11_m(lambda, nu, &model).unwrap().value;
            assert!(rel(got, want) < 1e-10);
            let special = pmis_specialized_m(lambda, mu, nu, kind).unwrap();
            assert!(rel(special, want) < 1e-10);
        }
    }
}

#[test]
fn infinite_buffer_pmis_is_a_mixture() {
    // a departure leaves the queue empty with probability 1 − ρ, and only
    // then does the next inter-departure time include an idle period
    for kind in ServiceKind::ALL {
        for (lambda, mu, nu) in [(0.5, 1.0, 1.0), (1.2, 1.5, 3.0), (0.1, 2.0, 0.7)] {
            let model = ServiceModel::named(kind, mu).unwrap();
            let rho = lambda / mu;
            let g = service_expectation(kind, mu, |s| (-nu * s).exp());
            let want = (1.0 - rho) * lambda / (lambda + nu) * g + rho * g;
            let got = pmis_mg1_m_infinite(lambda, nu, &model).unwrap().value;
            assert!(rel(got, want) < 1e-10, "{kind}");
        }
    }
}

// With the decision lattice at a uniform phase relative to the interval, an
// interval of length y is missed with probability (1 − νy)⁺.
fn lattice_miss(lambda: f64, mu: f64, nu: f64, kind: ServiceKind) -> f64 {
    service_expectation(kind, mu, |s| {
        let z_max = 1.0 / nu - s;
        if z_max <= 0.0 {
            return 0.0;
        }
        simpson(
            |z| lambda * (-lambda * z).exp() * (1.0 - nu * (s + z)),
            0.0,
            z_max,
            2000,
        )
    })
}

#[test]
fn periodic_pmis_matches_quadrature() {
    for (lambda, mu, m0, kind) in [
        (1.0, 2.0, 1, Exponential),
        (1.0, 1.0, 1, Uniform),
        (0.5, 1.5, 2, Uniform),
        (3.0, 1.5, 4, Exponential),
        (0.4, 1.0, 3, Exponential),
        (1.0, 1.0, 2, Deterministic),
    ] {
        let nu = m0 as f64 * mu;
        let want = lattice_miss(lambda, mu, nu, kind);
        let got = pmis_mg11_d(lambda, mu, m0, kind).unwrap().value;
        assert!(
            (got - want).abs() < 1e-9,
            "{kind} λ={lambda} μ={mu} m0={m0}: {got} vs {want}"
        );
    }
    // two hand-checked values
    let e = pmis_mg11_d(1.0, 2.0, 1, Exponential).unwrap().value;
    assert!((e - 0.058_243_197_679_091_36).abs() < 1e-14);
    let u = pmis_mg11_d(1.0, 1.0, 1, Uniform).unwrap().value;
    assert!((u - 0.066_060_279_414_278_6).abs() < 1e-12);
}

#[test]
fn unit_load_matches_quadrature() {
    for m0 in [1, 2, 5] {
        let want = lattice_miss(1.0, 1.0, m0 as f64, Exponential);
        let got = pmis_mm11_d_unit_load(m0).unwrap().value;
        assert!((got - want).abs() < 1e-9, "m0={m0}");
    }
}

#[test]
fn residual_count_moments_match_series() {
    // P(N1 >= k) = β^(k−1) (1 − β) ν/λ for an exponential gap against a
    // uniformly shifted lattice
    for (lambda, mu, m0) in [(1.0, 1.0, 1), (3.0, 1.5, 7), (0.2, 4.0, 2)] {
        let nu = m0 as f64 * mu;
        let beta = (-lambda / nu).exp();
        let c = (1.0 - beta) * nu / lambda;
        let (mut e1, mut e2) = (0.0, 0.0);
        for k in 1..200_000u32 {
            let tail = c * beta.powi(k as i32 - 1);
            e1 += tail;
            e2 += (2.0 * k as f64 - 1.0) * tail;
            if tail < 1e-300 {
                break;
            }
        }
        for kind in ServiceKind::ALL {
            let m = decision_count_moments(lambda, mu, m0, kind).unwrap();
            assert!(rel(m.e_n1, e1) < 1e-10);
            assert!(rel(m.e_n1_sq, e2) < 1e-10);
        }
    }
}

#[test]
fn exponential_service_count_moments_match_series() {
    for (mu, m0) in [(1.0, 1), (1.5, 30), (0.5, 3)] {
        let nu = m0 as f64 * mu;
        let alpha = (-mu / nu).exp();
        let c = (1.0 - alpha) * nu / mu;
        let (mut e1, mut e2) = (0.0, 0.0);
        for k in 1..100_000u32 {
            let tail = c * alpha.powi(k as i32 - 1);
            e1 += tail;
            e2 += (2.0 * k as f64 - 1.0) * tail;
        }
        let m = decision_count_moments(1.0, mu, m0, Exponential).unwrap();
        assert!(rel(m.e_n2, e1) < 1e-9);
        assert!(rel(m.e_n2_sq, e2) < 1e-9);
    }
}

#[test]
fn uniform_service_count_moments_are_the_tabulated_ones() {
    // The tabulated second moment for uniform service is the finite sum
    // Σ_{j=1}^{2m0+1} j² / (2m0); the mean is (2m0 + 1)/2.
    for m0 in [1u64, 2, 3, 10, 30] {
        let m = decision_count_moments(1.0, 1.0, m0, Uniform).unwrap();
        let sum: f64 = (1..=2 * m0 + 1).map(|j| (j * j) as f64).sum::<f64>() / (2 * m0) as f64;
        assert!(rel(m.e_n2_sq, sum) < 1e-13, "m0={m0}");
        assert_eq!(m.e_n2, (2 * m0 + 1) as f64 / 2.0);
    }
}

#[test]
fn uniform_service_true_count_moments_differ() {
    // Monte Carlo of the actual count of lattice points (uniform phase)
    // inside a U(0, 2/μ) service time: E[N2] = m0, E[N2²] = 4m0²/3 + 1/6.
    // The tabulated moments overshoot both, which is why the uniform
    // periodic AuD is only an approximation at small m0.
    let n = 400_000;
    let mut rng = RngStream::new(5, 0);
    for m0 in [1u64, 3] {
        let m = m0 as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = 2.0 * m * rng.open01(); // ν S
            let u = rng.open01();
            let count = (x - u).ceil().max(0.0);
            s1 += count;
            s2 += count * count;
        }
        let (e1, e2) = (s1 / n as f64, s2 / n as f64);
        let true_e2 = 4.0 * m * m / 3.0 + 1.0 / 6.0;
        let sd2 = 4.0 * m * m; // loose bound on sd(N2²)
        assert!((e1 - m).abs() < 5.0 * (2.0 * m) / (n as f64).sqrt());
        assert!((e2 - true_e2).abs() < 5.0 * sd2 / (n as f64).sqrt());
        let tabulated = decision_count_moments(1.0, 1.0, m0, Uniform).unwrap();
        assert!(tabulated.e_n2_sq - true_e2 > 10.0 * sd2 / (n as f64).sqrt());
    }
}

#[test]
fn periodic_aud_composes_from_moments() {
    for kind in ServiceKind::ALL {
        for (lambda, mu, m0) in [(1.0, 1.5, 30), (0.3, 2.0, 1), (5.0, 0.5, 4)] {
            let m = decision_count_moments(lambda, mu, m0, kind).unwrap();
            let nu = m0 as f64 * mu;
            let general = aud_mg11_d_general(1.0 / mu, 1.0 / lambda + 1.0 / mu, nu, &m).unwrap();
            let special = aud_specialized_d(lambda, mu, m0, kind).unwrap();
            assert!(rel(special.value, general.value) < 1e-12, "{kind}");
            assert_eq!(special.exactness, Exactness::UniformEpochApprox);
        }
    }
}

#[test]
fn periodic_aud_tends_to_poisson_value() {
    for kind in ServiceKind::ALL {
        let (lambda, mu) = (1.0, 1.5);
        let poisson = aud_specialized_m(lambda, mu, kind).unwrap();
        let far = aud_specialized_d(lambda, mu, 1_000_000, kind)
            .unwrap()
            .value;
        assert!(rel(far, poisson) < 1e-5, "{kind}: {far} vs {poisson}");
    }
}

#[test]
fn lattice_ratio_limits() {
    assert!(rel(lattice_ratio(1.0, 1e6), 2.0) < 1e-9);
    assert!(rel(lattice_ratio(0.5, 1e6), 4.0) < 1e-9);
    // m0 = 1, a = 1: (1 + 1/e) / (1 − 1/e)
    let e = (-1.0f64).exp();
    assert!(rel(lattice_ratio(1.0, 1.0), (1.0 + e) / (1.0 - e)) < 1e-15);
}

#[test]
fn m0_star_at_unit_rates() {
    assert_eq!(find_m0_star(1.0, 1.0, 1000).unwrap(), Some(7));
}

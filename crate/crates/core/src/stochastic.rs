//! Service, arrival and decision laws, their moments and MGFs, and seeded
//! variate streams.
//!
//! Every named service law is parameterised by its rate `mu`, so the mean
//! service time is always `1/mu`:
//!
//! | kind          | support / law        | E\[S²\]      | E\[e^(−νS)\]              |
//! |---------------|----------------------|-------------|--------------------------|
//! | uniform       | U(0, 2/μ)            | 4/(3μ²)     | (μ/2ν)(1 − e^(−2ν/μ))    |
//! | exponential   | Exp(μ)               | 2/μ²        | μ/(μ + ν)                |
//! | deterministic | point mass at 1/μ    | 1/μ²        | e^(−ν/μ)                 |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Open01};

use crate::error::{check_rate, invalid, Error, Result};

/// Below this value of `2ν/μ` the uniform MGF switches to its Taylor series.
const UNIFORM_MGF_SERIES_CUTOFF: f64 = 1e-6;

/// A reproducible variate stream.
///
/// Streams are counter-based: `(seed, substream_id)` selects an independent
/// ChaCha8 keystream, so draws from one stream never shift another.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    substream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, substream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream_id);
        Self {
            seed,
            substream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream_id(&self) -> u64 {
        self.substream_id
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        Open01.sample(&mut self.rng)
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        Exp::new(rate)
            .expect("rate validated by the owning model")
            .sample(&mut self.rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// The three named service laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServiceKind {
    Uniform,
    Exponential,
    Deterministic,
}

impl ServiceKind {
    pub const ALL: [ServiceKind; 3] = [
        ServiceKind::Uniform,
        ServiceKind::Exponential,
        ServiceKind::Deterministic,
    ];

    /// Kendall letter: U, M or D.
    pub fn kendall(self) -> char {
        match self {
            ServiceKind::Uniform => 'U',
            ServiceKind::Exponential => 'M',
            ServiceKind::Deterministic => 'D',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ServiceKind::Uniform => "uniform",
            ServiceKind::Exponential => "exp",
            ServiceKind::Deterministic => "det",
        }
    }
}

impl fmt::Display for ServiceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ServiceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "u" => Ok(ServiceKind::Uniform),
            "exp" | "exponential" | "m" | "e" => Ok(ServiceKind::Exponential),
            "det" | "deterministic" | "d" => Ok(ServiceKind::Deterministic),
            other => Err(invalid(
                "service",
                format!("unknown service kind `{other}`"),
            )),
        }
    }
}

pub type MgfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut RngStream) -> f64 + Send + Sync>;

/// A service law known only through its moments, its MGF at negative
/// arguments and, optionally, a sampler.
#[derive(Clone)]
pub struct GeneralService {
    pub mean: f64,
    pub second_moment: f64,
    pub mgf_neg: MgfFn,
    pub sampler: Option<SamplerFn>,
}

impl fmt::Debug for GeneralService {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralService")
            .field("mean", &self.mean)
            .field("second_moment", &self.second_moment)
            .field("sampler", &self.sampler.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum ServiceModel {
    Uniform { mu: f64 },
    Exponential { mu: f64 },
    Deterministic { mu: f64 },
    General(GeneralService),
}

impl ServiceModel {
    pub fn named(kind: ServiceKind, mu: f64) -> Result<Self> {
        check_rate("mu", mu)?;
        Ok(match kind {
            ServiceKind::Uniform => ServiceModel::Uniform { mu },
            ServiceKind::Exponential => ServiceModel::Exponential { mu },
            ServiceKind::Deterministic => ServiceModel::Deterministic { mu },
        })
    }

    pub fn general(
        mean: f64,
        second_moment: f64,
        mgf_neg: MgfFn,
        sampler: Option<SamplerFn>,
    ) -> Result<Self> {
        let model = ServiceModel::General(GeneralService {
            mean,
            second_moment,
            mgf_neg,
            sampler,
        });
        model.validate()?;
        Ok(model)
    }

    pub fn kind(&self) -> Option<ServiceKind> {
        match self {
            ServiceModel::Uniform { .. } => Some(ServiceKind::Uniform),
            ServiceModel::Exponential { .. } => Some(ServiceKind::Exponential),
            ServiceModel::Deterministic { .. } => Some(ServiceKind::Deterministic),
            ServiceModel::General(_) => None,
        }
    }

    /// Service rate, `1 / E[S]`.
    pub fn mu(&self) -> f64 {
        match self {
            ServiceModel::Uniform { mu }
            | ServiceModel::Exponential { mu }
            | ServiceModel::Deterministic { mu } => *mu,
            ServiceModel::General(g) => 1.0 / g.mean,
        }
    }

    pub fn has_sampler(&self) -> bool {
        match self {
            ServiceModel::General(g) => g.sampler.is_some(),
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ServiceModel::Uniform { mu }
            | ServiceModel::Exponential { mu }
            | ServiceModel::Deterministic { mu } => check_rate("mu", *mu),
            ServiceModel::General(g) => {
                if !g.mean.is_finite() || !g.second_moment.is_finite() {
                    return Err(Error::NonFiniteMoment);
                }
                if g.mean <= 0.0 {
                    return Err(invalid("mean", format!("must be > 0, got {}", g.mean)));
                }
                // Jensen, with a little room for rounding in user-supplied moments.
                if g.second_moment < g.mean * g.mean * (1.0 - 1e-12) {
                    return Err(invalid(
                        "second_moment",
                        format!("{} is below mean² = {}", g.second_moment, g.mean * g.mean),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Draw one service time. Fails for moment-only general laws.
    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        if !self.has_sampler() {
            return Err(Error::NoSampler);
        }
        Ok(self.draw(rng))
    }

    /// Infallible draw for callers that already checked `has_sampler`.
    pub(crate) fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            ServiceModel::Uniform { mu } => 2.0 / mu * rng.open01(),
            ServiceModel::Exponential { mu } => rng.exponential(*mu),
            ServiceModel::Deterministic { mu } => 1.0 / mu,
            ServiceModel::General(g) => {
                let sampler = g.sampler.as_ref().expect("sampler presence checked");
                sampler(rng)
            }
        }
    }
}

/// Returns `(E[S], E[S²])`.
pub fn service_moments(s: &ServiceModel) -> Result<(f64, f64)> {
    s.validate()?;
    Ok(match s {
        ServiceModel::Uniform { mu } => (1.0 / mu, 4.0 / (3.0 * mu * mu)),
        ServiceModel::Exponential { mu } => (1.0 / mu, 2.0 / (mu * mu)),
        ServiceModel::Deterministic { mu } => (1.0 / mu, 1.0 / (mu * mu)),
        ServiceModel::General(g) => (g.mean, g.second_moment),
    })
}

/// `G_S(−ν) = E[e^(−νS)]`.
pub fn service_mgf_neg(s: &ServiceModel, nu: f64) -> Result<f64> {
    if nu.is_nan() || nu < 0.0 {
        return Err(invalid("nu", format!("must be >= 0, got {nu}")));
    }
    s.validate()?;
    Ok(match s {
        ServiceModel::Uniform { mu } => {
            let x = 2.0 * nu / mu;
            if x < UNIFORM_MGF_SERIES_CUTOFF {
                1.0 - x / 2.0 + x * x / 6.0
            } else {
                -(-x).exp_m1() / x
            }
        }
        ServiceModel::Exponential { mu } => mu / (mu + nu),
        ServiceModel::Deterministic { mu } => (-nu / mu).exp(),
        ServiceModel::General(g) => (g.mgf_neg)(nu),
    })
}

/// Poisson update generation at rate `lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrivalModel {
    pub lambda: f64,
}

impl ArrivalModel {
    pub fn new(lambda: f64) -> Result<Self> {
        check_rate("lambda", lambda)?;
        Ok(Self { lambda })
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        rng.exponential(self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecisionKind {
    Poisson,
    Periodic,
}

impl DecisionKind {
    /// Kendall suffix letter: M or D.
    pub fn kendall(self) -> char {
        match self {
            DecisionKind::Poisson => 'M',
            DecisionKind::Periodic => 'D',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecisionKind::Poisson => "poisson",
            DecisionKind::Periodic => "periodic",
        }
    }
}

impl FromStr for DecisionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" | "m" => Ok(DecisionKind::Poisson),
            "periodic" | "d" => Ok(DecisionKind::Periodic),
            other => Err(invalid(
                "decision",
                format!("unknown decision kind `{other}`"),
            )),
        }
    }
}

/// Decision epochs: a Poisson process, or the lattice `phase + j/ν`.
///
/// A periodic model without a phase draws one uniformly on `[0, 1/ν)` per
/// replication.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecisionModel {
    Poisson { nu: f64 },
    Periodic { nu: f64, phase: Option<f64> },
}

impl DecisionModel {
    pub fn poisson(nu: f64) -> Result<Self> {
        check_rate("nu", nu)?;
        Ok(DecisionModel::Poisson { nu })
    }

    pub fn periodic(nu: f64, phase: Option<f64>) -> Result<Self> {
        let model = DecisionModel::Periodic { nu, phase };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DecisionModel::Poisson { nu } => check_rate("nu", nu),
            DecisionModel::Periodic { nu, phase } => {
                check_rate("nu", nu)?;
                match phase {
                    Some(p) if !(0.0..1.0 / nu).contains(&p) => Err(invalid(
                        "phase",
                        format!("must lie in [0, 1/nu) = [0, {}), got {p}", 1.0 / nu),
                    )),
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn nu(&self) -> f64 {
        match *self {
            DecisionModel::Poisson { nu } | DecisionModel::Periodic { nu, .. } => nu,
        }
    }

    pub fn kind(&self) -> DecisionKind {
        match self {
            DecisionModel::Poisson { .. } => DecisionKind::Poisson,
            DecisionModel::Periodic { .. } => DecisionKind::Periodic,
        }
    }

    /// One inter-decision time.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            DecisionModel::Poisson { nu } => rng.exponential(nu),
            DecisionModel::Periodic { nu, .. } => 1.0 / nu,
        }
    }
}

//! Reward distributions and seeded random streams.
//!
//! Each replication of an experiment owns a [`SeededRng`] identified by a
//! `(seed, stream_id)` pair. A replication splits its stream into *lanes*:
//! lane 0 feeds the policy's own randomness and lane `k + 1` feeds the
//! samples of arm `k`. Because arm `k`'s `s`-th draw depends on nothing but
//! the lane, two runs that pull arms in the same order observe identical
//! noise, whatever the arm means are.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator handed out for a single lane.
pub type StreamRng = ChaCha8Rng;

/// Words reserved per lane: `2^48` 32-bit words, far beyond any horizon.
const LANE_SHIFT: u32 = 48;

/// Lane consumed by a policy's internal randomness.
pub const POLICY_LANE: u32 = 0;

/// Address of an independent random stream.
///
/// ChaCha8 keyed by `seed` with the 64-bit stream selector set to
/// `stream_id`, so distinct replications never overlap and results do not
/// depend on which worker ran which replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// The whole stream, positioned at its start.
    pub fn stream(&self) -> StreamRng {
        self.lane(0)
    }

    /// A jump-ahead view of this stream starting at `lane * 2^48` words.
    pub fn lane(&self, lane: u32) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(u128::from(lane) << LANE_SHIFT);
        rng
    }

    /// Lane carrying the samples of arm `arm`.
    pub fn arm_lane(&self, arm: usize) -> StreamRng {
        let lane = u32::try_from(arm + 1).expect("arm index exceeds lane space");
        self.lane(lane)
    }
}

/// Distribution family of an arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ArmKind {
    Bernoulli {
        p: f64,
    },
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Indicator that a draw of `base` exceeds `level`.
    LevelSet {
        base: Box<ArmModel>,
        level: f64,
    },
}

/// A validated reward distribution with known mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArmKind", into = "ArmKind")]
pub struct ArmModel {
    kind: ArmKind,
    true_mean: f64,
    subgaussian_r: f64,
}

impl ArmModel {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "bernoulli p must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self {
            kind: ArmKind::Bernoulli { p },
            true_mean: p,
            subgaussian_r: 0.5,
        })
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gaussian mean must be finite, got {mean}"
            )));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian variance must be strictly positive, got {variance}"
            )));
        }
        Ok(Self {
            kind: ArmKind::Gaussian { mean, variance },
            true_mean: mean,
            subgaussian_r: variance.sqrt(),
        })
    }

    pub fn kind(&self) -> &ArmKind {
        &self.kind
    }

    pub fn true_mean(&self) -> f64 {
        self.true_mean
    }

    /// Sub-Gaussian constant `R` of the distribution.
    pub fn subgaussian_r(&self) -> f64 {
        self.subgaussian_r
    }

    /// Standard deviation of a Gaussian arm.
    pub fn gaussian_sd(&self) -> Option<f64> {
        match self.kind {
            ArmKind::Gaussian { variance, .. } => Some(variance.sqrt()),
            _ => None,
        }
    }

    /// Same family with the mean replaced. Bernoulli means must stay in
    /// `[0, 1]`; level-set arms cannot be re-centred.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        match &self.kind {
            ArmKind::Bernoulli { .. } => Self::bernoulli(mean),
            ArmKind::Gaussian { variance, .. } => Self::gaussian(mean, *variance),
            ArmKind::LevelSet { .. } => Err(Error::InvalidParameter(
                "cannot move the mean of a level-set arm".into(),
            )),
        }
    }

    /// One draw. Gaussian arms return `mean + sd * z` with `z` a standard
    /// normal draw from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            ArmKind::Bernoulli { p } => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmKind::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + variance.sqrt() * z
            }
            ArmKind::LevelSet { base, level } => {
                if base.sample(rng) > *level {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl TryFrom<ArmKind> for ArmModel {
    type Error = Error;

    fn try_from(kind: ArmKind) -> Result<Self> {
        match kind {
            ArmKind::Bernoulli { p } => Self::bernoulli(p),
            ArmKind::Gaussian { mean, variance } => Self::gaussian(mean, variance),
            ArmKind::LevelSet { base, level } => transform_level_set(&base, level),
        }
    }
}

impl From<ArmModel> for ArmKind {
    fn from(arm: ArmModel) -> Self {
        arm.kind
    }
}

/// Free-function form of [`ArmModel::sample`].
pub fn sample<R: Rng + ?Sized>(arm: &ArmModel, rng: &mut R) -> f64 {
    arm.sample(rng)
}

/// Wrap `base` so each sample becomes `1` if the base draw exceeds `level`
/// and `0` otherwise. The result is Bernoulli with mean `P(X > level)` and
/// sub-Gaussian constant 1/2.
pub fn transform_level_set(base: &ArmModel, level: f64) -> Result<ArmModel> {
    if level.is_nan() {
        return Err(Error::InvalidParameter("level must not be NaN".into()));
    }
    let true_mean = match base.kind {
        ArmKind::Bernoulli { p } => {
            if level < 0.0 {
                1.0
            } else if level < 1.0 {
                p
            } else {
                0.0
            }
        }
        ArmKind::Gaussian { mean, variance } => {
            gaussian_upper_tail((level - mean) / variance.sqrt())
        }
        ArmKind::LevelSet { .. } => {
            return Err(Error::InvalidParameter(
                "level-set base must be bernoulli or gaussian".into(),
            ))
        }
    };
    Ok(ArmModel {
        kind: ArmKind::LevelSet {
            base: Box::new(base.clone()),
            level,
        },
        true_mean,
        subgaussian_r: 0.5,
    })
}

/// `P(Z > z)` for a standard normal `Z`.
pub fn gaussian_upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

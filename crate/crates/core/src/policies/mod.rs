//! Sequential allocation policies and the game loop.
//!
//! A [`Policy`] picks one arm per round from the current [`RunState`] and, at
//! the end of the horizon, turns that state into an [`OutputSet`]. Ties are
//! always broken towards the lowest arm index.

mod apt;
mod csar;
mod state;
mod ua;
mod ucbe;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{SeededRng, StreamRng, POLICY_LANE};
use crate::error::{Error, Result};
use crate::problem::{OutputSet, ThresholdProblem};

pub use apt::{apt_index, apt_recommend, apt_select, Apt};
pub use csar::{csar_run, csar_schedule, Csar, CsarOutcome};
pub use state::RunState;
pub use ua::{ua_select, Uniform};
pub use ucbe::{ucbe_exploration, ucbe_select, Ucbe};

/// Minimum horizon a policy needs, as a multiple of the arm count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonRule {
    AtLeastOne,
    AtLeastArms,
    AtLeastTwiceArms,
}

impl HorizonRule {
    pub fn min_horizon(self, num_arms: usize) -> usize {
        match self {
            HorizonRule::AtLeastOne => 1,
            HorizonRule::AtLeastArms => num_arms.max(1),
            HorizonRule::AtLeastTwiceArms => 2 * num_arms,
        }
    }

    pub fn check(self, label: &str, num_arms: usize, horizon: usize) -> Result<()> {
        if horizon >= self.min_horizon(num_arms) {
            return Ok(());
        }
        let bound = match self {
            HorizonRule::AtLeastOne => "1",
            HorizonRule::AtLeastArms => "K",
            HorizonRule::AtLeastTwiceArms => "2K",
        };
        Err(Error::Budget(format!(
            "T must be ≥ {bound} for {label} (got T={horizon}, K={num_arms})"
        )))
    }
}

/// A sequential allocation rule confined to one game.
pub trait Policy {
    /// Index of the next arm to pull. Must be `< state.num_arms()`.
    fn select(&mut self, state: &RunState, rng: &mut StreamRng) -> usize;

    /// Final classification once the budget is spent.
    fn recommend(&self, state: &RunState) -> OutputSet;

    fn horizon_rule(&self) -> HorizonRule {
        HorizonRule::AtLeastOne
    }
}

/// Builds a fresh policy for each replication.
pub trait PolicyFactory: Sync {
    fn label(&self) -> String;

    fn horizon_rule(&self) -> HorizonRule;

    fn build(&self, problem: &ThresholdProblem, horizon: usize) -> Result<Box<dyn Policy>>;
}

/// Named policies reachable from configs and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyId {
    Apt,
    Ua,
    /// UCB-E with `a = 4^i (T - K) / H`.
    Ucbe(i32),
    Csar,
}

impl PolicyId {
    /// The six competitors of the benchmark experiments.
    pub const BENCHMARK: [PolicyId; 6] = [
        PolicyId::Ua,
        PolicyId::Apt,
        PolicyId::Ucbe(-1),
        PolicyId::Ucbe(0),
        PolicyId::Ucbe(4),
        PolicyId::Csar,
    ];
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyId::Apt => f.write_str("apt"),
            PolicyId::Ua => f.write_str("ua"),
            PolicyId::Ucbe(i) => write!(f, "ucbe:{i}"),
            PolicyId::Csar => f.write_str("csar"),
        }
    }
}

impl FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "apt" => Ok(PolicyId::Apt),
            "ua" => Ok(PolicyId::Ua),
            "csar" => Ok(PolicyId::Csar),
            _ => s
                .strip_prefix("ucbe:")
                .and_then(|i| i.parse().ok())
                .map(PolicyId::Ucbe)
                .ok_or_else(|| Error::UnknownPolicy(s.to_string())),
        }
    }
}

impl TryFrom<String> for PolicyId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyId> for String {
    fn from(id: PolicyId) -> Self {
        id.to_string()
    }
}

impl PolicyFactory for PolicyId {
    fn label(&self) -> String {
        self.to_string()
    }

    fn horizon_rule(&self) -> HorizonRule {
        match self {
            PolicyId::Apt | PolicyId::Ucbe(_) => HorizonRule::AtLeastTwiceArms,
            PolicyId::Csar => HorizonRule::AtLeastArms,
            PolicyId::Ua => HorizonRule::AtLeastOne,
        }
    }

    fn build(&self, problem: &ThresholdProblem, horizon: usize) -> Result<Box<dyn Policy>> {
        let tau = problem.tau().clone();
        let eps = problem.epsilon();
        Ok(match *self {
            PolicyId::Apt => Box::new(Apt::new(tau, eps)),
            PolicyId::Ua => Box::new(Uniform::new(tau)),
            PolicyId::Ucbe(i) => {
                let h = problem.complexity()?;
                let a = ucbe_exploration(i, horizon, problem.num_arms(), h);
                Box::new(Ucbe::new(tau, eps, a))
            }
            PolicyId::Csar => Box::new(Csar::new(tau, problem.num_arms(), horizon)?),
        })
    }
}

/// Result of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub output: OutputSet,
    pub state: RunState,
    /// Sum of all observed rewards.
    pub reward_sum: f64,
}

/// Play exactly `horizon` rounds of `policy` on `problem`.
///
/// Arm `k` draws its samples from lane `k + 1` of `streams` and the policy's
/// own randomness comes from lane 0.
pub fn run_game(
    policy: &mut dyn Policy,
    problem: &ThresholdProblem,
    horizon: usize,
    streams: &SeededRng,
) -> Result<GameOutcome> {
    let k = problem.num_arms();
    policy.horizon_rule().check("this policy", k, horizon)?;
    let mut policy_rng = streams.lane(POLICY_LANE);
    let mut arm_rngs: Vec<StreamRng> = (0..k).map(|arm| streams.arm_lane(arm)).collect();
    let mut state = RunState::new(k);
    let mut reward_sum = 0.0;
    for _ in 0..horizon {
        let arm = policy.select(&state, &mut policy_rng);
        assert!(arm < k, "policy selected arm {arm} out of {k}");
        let x = problem.arms()[arm].sample(&mut arm_rngs[arm]);
        state.record(arm, x);
        reward_sum += x;
    }
    let output = policy.recommend(&state);
    Ok(GameOutcome {
        output,
        state,
        reward_sum,
    })
}

/// Most-pulled arm, lowest index on ties.
pub fn best_arm_recommend(state: &RunState) -> usize {
    let mut best = 0;
    for (k, &n) in state.pulls().iter().enumerate() {
        if n > state.pulls()[best] {
            best = k;
        }
    }
    best
}

/// First index of the minimum under strict `<`.
pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (k, v) in values.enumerate() {
        if k == 0 || v < best_val {
            best = k;
            best_val = v;
        }
    }
    best
}

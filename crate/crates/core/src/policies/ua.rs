use rand::Rng;

use super::{apt_recommend, Policy, RunState};
use crate::distributions::StreamRng;
use crate::problem::{OutputSet, Threshold};

/// Uniformly random arm.
pub fn ua_select(state: &RunState, rng: &mut StreamRng) -> usize {
    rng.random_range(0..state.num_arms())
}

/// Uniform allocation: every round samples an arm uniformly at random. The
/// final set uses the same `mu_hat >= tau` rule as APT, so unpulled arms are
/// rejected.
#[derive(Debug, Clone)]
pub struct Uniform {
    tau: Threshold,
}

impl Uniform {
    pub fn new(tau: impl Into<Threshold>) -> Self {
        Self { tau: tau.into() }
    }
}

impl Policy for Uniform {
    fn select(&mut self, state: &RunState, rng: &mut StreamRng) -> usize {
        ua_select(state, rng)
    }

    fn recommend(&self, state: &RunState) -> OutputSet {
        apt_recommend(state, &self.tau)
    }
}

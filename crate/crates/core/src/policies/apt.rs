//! Anytime parameter-free thresholding.
//!
//! After one pull per arm, APT pulls the arm minimising
//! `sqrt(T_i) * (|mu_hat_i - tau| + epsilon)`: arms that are both close to
//! the threshold and under-sampled get priority, and a static allocation
//! with `T_i Δ_i^2` roughly constant across arms emerges.

use super::{argmin, HorizonRule, Policy, RunState};
use crate::distributions::StreamRng;
use crate::error::{Error, Result};
use crate::problem::{OutputSet, Threshold};

/// `sqrt(T_arm) * (|mu_hat_arm - tau| + epsilon)`.
pub fn apt_index(state: &RunState, arm: usize, tau: f64, epsilon: f64) -> Result<f64> {
    let mean = state
        .mean(arm)
        .ok_or_else(|| Error::Domain(format!("apt index of arm {arm} before its first pull")))?;
    Ok(index(state.pulls()[arm], mean, tau, epsilon))
}

#[inline]
fn index(pulls: u64, mean: f64, tau: f64, epsilon: f64) -> f64 {
    (pulls as f64).sqrt() * ((mean - tau).abs() + epsilon)
}

/// Arm with the smallest APT index. Every arm must have been pulled.
pub fn apt_select(state: &RunState, tau: &Threshold, epsilon: f64) -> usize {
    argmin((0..state.num_arms()).map(|k| {
        let mean = state.mean(k).expect("apt selection before initialisation");
        index(state.pulls()[k], mean, tau.at(k), epsilon)
    }))
}

/// `{k : mu_hat_k >= tau_k}`; arms never pulled are rejected.
pub fn apt_recommend(state: &RunState, tau: &Threshold) -> OutputSet {
    OutputSet::from_flags(
        (0..state.num_arms())
            .map(|k| state.mean(k).is_some_and(|m| m >= tau.at(k)))
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct Apt {
    tau: Threshold,
    epsilon: f64,
}

impl Apt {
    pub fn new(tau: impl Into<Threshold>, epsilon: f64) -> Self {
        Self {
            tau: tau.into(),
            epsilon,
        }
    }
}

impl Policy for Apt {
    fn select(&mut self, state: &RunState, _rng: &mut StreamRng) -> usize {
        // initialisation pulls arms in index order
        match state.first_unpulled() {
            Some(k) => k,
            None => apt_select(state, &self.tau, self.epsilon),
        }
    }

    fn recommend(&self, state: &RunState) -> OutputSet {
        apt_recommend(state, &self.tau)
    }

    fn horizon_rule(&self) -> HorizonRule {
        HorizonRule::AtLeastTwiceArms
    }
}

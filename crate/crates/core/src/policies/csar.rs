//! Successive-rejects classification for thresholding.
//!
//! The horizon is split into phases of fixed, non-adaptive length. During
//! phase `k` every still-active arm is sampled until it holds `n_k` pulls,
//!
//! ```text
//! n_k = ceil((T - K) / (logbar(K) * (K + 1 - k))),   logbar(K) = 1/2 + Σ_{i=2..K} 1/i
//! ```
//!
//! and at the end of the phase the active arm whose empirical mean is
//! furthest from its threshold is classified (accepted iff `mu_hat >= tau`)
//! and deactivated. The last remaining arm receives whatever budget is left
//! and is classified at the end of the game.

use super::{HorizonRule, Policy, RunState};
use crate::distributions::StreamRng;
use crate::error::{Error, Result};
use crate::problem::{OutputSet, Threshold};

/// Cumulative per-arm targets `n_1..n_{K-1}` for `num_arms` arms and
/// `horizon` pulls. Each target is at least one so every classified arm has
/// an empirical mean.
pub fn csar_schedule(num_arms: usize, horizon: usize) -> Vec<u64> {
    if num_arms < 2 {
        return Vec::new();
    }
    let logbar = 0.5 + (2..=num_arms).map(|i| 1.0 / i as f64).sum::<f64>();
    let spare = horizon.saturating_sub(num_arms) as f64;
    (1..num_arms)
        .map(|k| {
            let n = (spare / (logbar * (num_arms + 1 - k) as f64)).ceil() as u64;
            n.max(1)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Csar {
    tau: Threshold,
    schedule: Vec<u64>,
    active: Vec<bool>,
    decisions: Vec<Option<bool>>,
    /// Arms in the order they were classified.
    order: Vec<usize>,
    phase: usize,
}

impl Csar {
    pub fn new(tau: impl Into<Threshold>, num_arms: usize, horizon: usize) -> Result<Self> {
        HorizonRule::AtLeastArms.check("csar", num_arms, horizon)?;
        if num_arms == 0 {
            return Err(Error::InvalidParameter("csar needs at least one arm".into()));
        }
        Ok(Self {
            tau: tau.into(),
            schedule: csar_schedule(num_arms, horizon),
            active: vec![true; num_arms],
            decisions: vec![None; num_arms],
            order: Vec::with_capacity(num_arms),
            phase: 0,
        })
    }

    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    fn classify(&mut self, state: &RunState, arm: usize) {
        let decision = state.mean(arm).is_some_and(|m| m >= self.tau.at(arm));
        self.decisions[arm] = Some(decision);
        self.active[arm] = false;
        self.order.push(arm);
    }

    /// Close every phase whose target has been reached by all active arms.
    fn close_finished_phases(&mut self, state: &RunState) {
        while self.active_count() > 1 && self.phase < self.schedule.len() {
            let target = self.schedule[self.phase];
            let done = (0..self.active.len())
                .filter(|&k| self.active[k])
                .all(|k| state.pulls()[k] >= target);
            if !done {
                return;
            }
            let mut furthest = None::<(usize, f64)>;
            for k in (0..self.active.len()).filter(|&k| self.active[k]) {
                let dist = (state.mean(k).expect("phase target is at least one") - self.tau.at(k)).abs();
                if furthest.is_none_or(|(_, d)| dist > d) {
                    furthest = Some((k, dist));
                }
            }
            let (arm, _) = furthest.expect("at least two active arms");
            self.classify(state, arm);
            self.phase += 1;
        }
    }

    /// Classify everything still active and report the final set.
    fn finish(&mut self, state: &RunState) -> OutputSet {
        self.close_finished_phases(state);
        for k in 0..self.active.len() {
            if self.active[k] {
                self.classify(state, k);
            }
        }
        OutputSet::from_flags(self.decisions.iter().map(|d| d.unwrap_or(false)).collect())
    }
}

impl Policy for Csar {
    fn select(&mut self, state: &RunState, _rng: &mut StreamRng) -> usize {
        self.close_finished_phases(state);
        let mut active = (0..self.active.len()).filter(|&k| self.active[k]);
        if self.active_count() == 1 {
            return active.next().expect("one active arm");
        }
        let target = self.schedule[self.phase];
        active
            .find(|&k| state.pulls()[k] < target)
            .expect("an unfinished phase has an arm below target")
    }

    fn recommend(&self, state: &RunState) -> OutputSet {
        self.clone().finish(state)
    }

    fn horizon_rule(&self) -> HorizonRule {
        HorizonRule::AtLeastArms
    }
}

/// Result of a stand-alone CSAR run.
#[derive(Debug, Clone)]
pub struct CsarOutcome {
    pub output: OutputSet,
    pub state: RunState,
    /// Arms in the order they were classified; each appears exactly once.
    pub classification_order: Vec<usize>,
}

/// Run CSAR for `horizon` pulls against `sampler(arm) -> reward`.
pub fn csar_run(
    mut sampler: impl FnMut(usize) -> f64,
    num_arms: usize,
    horizon: usize,
    tau: impl Into<Threshold>,
) -> Result<CsarOutcome> {
    let mut csar = Csar::new(tau, num_arms, horizon)?;
    let mut state = RunState::new(num_arms);
    // CSAR never consumes policy randomness; any stream will do
    let mut rng = crate::distributions::SeededRng::new(0, 0).stream();
    while state.total() < horizon as u64 {
        let arm = csar.select(&state, &mut rng);
        state.record(arm, sampler(arm));
    }
    let output = csar.finish(&state);
    Ok(CsarOutcome {
        output,
        state,
        classification_order: csar.order,
    })
}

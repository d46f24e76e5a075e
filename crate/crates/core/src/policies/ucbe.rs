use super::{apt_recommend, argmin, HorizonRule, Policy, RunState};
use crate::distributions::StreamRng;
use crate::problem::{OutputSet, Threshold};

/// Exploration parameter `a = 4^i (T - K) / H`.
pub fn ucbe_exploration(exponent: i32, horizon: usize, num_arms: usize, complexity: f64) -> f64 {
    4f64.powi(exponent) * (horizon as f64 - num_arms as f64) / complexity
}

/// Arm minimising `|mu_hat_k - tau_k| + epsilon - sqrt(a / T_k)`.
pub fn ucbe_select(state: &RunState, tau: &Threshold, epsilon: f64, a: f64) -> usize {
    argmin((0..state.num_arms()).map(|k| {
        let mean = state.mean(k).expect("ucbe selection before initialisation");
        let n = state.pulls()[k] as f64;
        (mean - tau.at(k)).abs() + epsilon - (a / n).sqrt()
    }))
}

/// UCB-E adapted to thresholding. Needs the problem complexity to tune `a`.
#[derive(Debug, Clone)]
pub struct Ucbe {
    tau: Threshold,
    epsilon: f64,
    a: f64,
}

impl Ucbe {
    pub fn new(tau: impl Into<Threshold>, epsilon: f64, a: f64) -> Self {
        Self {
            tau: tau.into(),
            epsilon,
            a,
        }
    }

    pub fn exploration(&self) -> f64 {
        self.a
    }
}

impl Policy for Ucbe {
    fn select(&mut self, state: &RunState, _rng: &mut StreamRng) -> usize {
        match state.first_unpulled() {
            Some(k) => k,
            None => ucbe_select(state, &self.tau, self.epsilon, self.a),
        }
    }

    fn recommend(&self, state: &RunState) -> OutputSet {
        apt_recommend(state, &self.tau)
    }

    fn horizon_rule(&self) -> HorizonRule {
        HorizonRule::AtLeastTwiceArms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(entries: &[(u64, f64)]) -> RunState {
        let mut s = RunState::new(entries.len());
        for (k, &(n, mean)) in entries.iter().enumerate() {
            for _ in 0..n {
                s.record(k, mean);
            }
        }
        s
    }

    #[test]
    fn zero_exploration_is_greedy() {
        let tau = Threshold::Scalar(0.5);
        let s = state_with(&[(5, 0.9), (1, 0.45), (3, 0.2)]);
        assert_eq!(ucbe_select(&s, &tau, 0.1, 0.0), 1);
    }

    #[test]
    fn huge_exploration_picks_least_pulled() {
        let tau = Threshold::Scalar(0.5);
        let s = state_with(&[(5, 0.5), (9, 0.9), (2, 0.9), (4, 0.5)]);
        assert_eq!(ucbe_select(&s, &tau, 0.1, 1e12), 2);
    }

    #[test]
    fn exploration_tuning() {
        let h = 144.0;
        assert!((ucbe_exploration(0, 500, 10, h) - 490.0 / 144.0).abs() < 1e-12);
        assert!((ucbe_exploration(-1, 500, 10, h) - 490.0 / 576.0).abs() < 1e-12);
        assert!((ucbe_exploration(4, 500, 10, h) - 256.0 * 490.0 / 144.0).abs() < 1e-9);
    }
}

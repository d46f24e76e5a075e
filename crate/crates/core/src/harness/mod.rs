//! Monte-Carlo estimation of error rates and regret.
//!
//! Replication `r` of a cell always plays on stream `(master_seed, r)`, so
//! two cells with the same seed and problem are paired: they see the same
//! per-arm sample sequences. Results do not depend on the thread count.

mod experiment;
mod output;

use serde::{Deserialize, Serialize};

use crate::distributions::SeededRng;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::policies::{best_arm_recommend, run_game, PolicyFactory, PolicyId};
use crate::problem::{loss, ThresholdProblem};

pub use experiment::{
    run_experiment, Cell, ExperimentConfig, ExperimentResult, LowerBoundSpec, Metadata,
    PresetSpec, ProblemSource, ResolvedExperiment, MAX_MEMBER,
};
pub use output::{write_csv, CSV_COLUMNS};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// What a replication measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The thresholding loss of the output set.
    #[default]
    ThresholdLoss,
    /// Whether the most-pulled arm is suboptimal, with `tau = mu*` and
    /// `epsilon = 0`.
    BestArmError,
    /// Pseudo-regret `Σ_{i != i*} (mu* - mu_i) T_i`, with `tau = mu*` and
    /// `epsilon = 0`.
    CumulativeRegret,
}

impl Mode {
    pub fn is_loss(self) -> bool {
        !matches!(self, Mode::CumulativeRegret)
    }
}

/// One Monte-Carlo estimate with its 95% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    /// Error rate in the loss modes, mean pseudo-regret otherwise.
    pub value: f64,
    pub half_width: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub replications: u64,
    /// The estimate is exactly zero; log-scale outputs plot `1 / (2N)`.
    pub censored: bool,
}

impl CellEstimate {
    /// Error rate from a count of failed replications. Zero failures use the
    /// rule-of-three interval `[0, 3/N]`.
    pub fn from_failures(failures: u64, replications: u64) -> Self {
        let n = replications as f64;
        let p = failures as f64 / n;
        if failures == 0 {
            return Self {
                value: 0.0,
                half_width: 3.0 / n,
                ci_lower: 0.0,
                ci_upper: 3.0 / n,
                replications,
                censored: true,
            };
        }
        let half_width = Z_95 * (p * (1.0 - p) / n).sqrt();
        Self {
            value: p,
            half_width,
            ci_lower: (p - half_width).max(0.0),
            ci_upper: (p + half_width).min(1.0),
            replications,
            censored: false,
        }
    }

    /// Sample mean with a normal-approximation interval.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let half_width = Z_95 * (var / n).sqrt();
        Self {
            value: mean,
            half_width,
            ci_lower: mean - half_width,
            ci_upper: mean + half_width,
            replications: samples.len() as u64,
            censored: mean == 0.0,
        }
    }

    /// Value to use on a log axis.
    pub fn log_value(&self) -> f64 {
        if self.censored {
            1.0 / (2.0 * self.replications as f64)
        } else {
            self.value
        }
    }
}

fn check_replications(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("replications must be at least 1".into()));
    }
    Ok(())
}

/// Estimate a cell under any mode.
///
/// In the best-arm and regret modes the policy is built against the problem
/// re-thresholded at `tau = mu*`, `epsilon = 0`; the maximal mean must be
/// unique.
pub fn estimate_with<F>(
    factory: &F,
    problem: &ThresholdProblem,
    horizon: usize,
    replications: u64,
    master_seed: u64,
    mode: Mode,
    exec: Execution,
) -> Result<CellEstimate>
where
    F: PolicyFactory + ?Sized,
{
    check_replications(replications)?;
    factory
        .horizon_rule()
        .check(&factory.label(), problem.num_arms(), horizon)?;
    let played = match mode {
        Mode::ThresholdLoss => problem.clone(),
        Mode::BestArmError | Mode::CumulativeRegret => {
            let (_, top) = problem.unique_best()?;
            problem.with_threshold(top, 0.0)?
        }
    };
    // surface construction errors before fanning out
    factory.build(&played, horizon)?;
    let means = played.means();
    let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let outcomes = exec.map_indexed(replications, |r| -> Result<f64> {
        let mut policy = factory.build(&played, horizon)?;
        let game = run_game(policy.as_mut(), &played, horizon, &SeededRng::new(master_seed, r))?;
        Ok(match mode {
            Mode::ThresholdLoss => f64::from(loss(&played, &game.output)),
            Mode::BestArmError => {
                f64::from(u8::from(means[best_arm_recommend(&game.state)] != top))
            }
            Mode::CumulativeRegret => game
                .state
                .pulls()
                .iter()
                .zip(&means)
                .map(|(&n, &mu)| (top - mu) * n as f64)
                .sum(),
        })
    });
    let values = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(if mode.is_loss() {
        let failures = values.iter().filter(|&&v| v > 0.0).count() as u64;
        CellEstimate::from_failures(failures, replications)
    } else {
        CellEstimate::from_samples(&values)
    })
}

/// Probability that `factory`'s output set incurs a loss, over `replications`
/// games on streams `(master_seed, 0..replications)`.
pub fn estimate_error<F>(
    factory: &F,
    problem: &ThresholdProblem,
    horizon: usize,
    replications: u64,
    master_seed: u64,
    exec: Execution,
) -> Result<CellEstimate>
where
    F: PolicyFactory + ?Sized,
{
    estimate_with(
        factory,
        problem,
        horizon,
        replications,
        master_seed,
        Mode::ThresholdLoss,
        exec,
    )
}

/// APT with `tau = mu*`, `epsilon = 0`, recommending the most-pulled arm.
pub fn estimate_best_arm_error(
    problem: &ThresholdProblem,
    horizon: usize,
    replications: u64,
    master_seed: u64,
    exec: Execution,
) -> Result<CellEstimate> {
    estimate_with(
        &PolicyId::Apt,
        problem,
        horizon,
        replications,
        master_seed,
        Mode::BestArmError,
        exec,
    )
}

/// Mean pseudo-regret of APT with `tau = mu*`, `epsilon = 0`.
pub fn estimate_pseudo_regret(
    problem: &ThresholdProblem,
    horizon: usize,
    replications: u64,
    master_seed: u64,
    exec: Execution,
) -> Result<CellEstimate> {
    estimate_with(
        &PolicyId::Apt,
        problem,
        horizon,
        replications,
        master_seed,
        Mode::CumulativeRegret,
        exec,
    )
}

/// Least-squares line through `(T, ln error)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// `ln error - fitted` for each point used, in input order.
    pub residuals: Vec<f64>,
    pub points_used: usize,
}

/// Fit `ln(error)` against `T` using every point with a positive error.
/// Fewer than three such points is degenerate: raise `N` or shrink the grid.
pub fn decay_slope_check(curve: &[(usize, f64)]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(t, e)| (t as f64, e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} positive-error points, need at least 3; raise N or shrink the T grid",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all horizons are equal".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    Ok(SlopeFit {
        slope,
        intercept,
        residuals,
        points_used: pts.len(),
    })
}

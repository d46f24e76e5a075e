use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{estimate_with, CellEstimate, Mode};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::policies::{PolicyFactory, PolicyId};
use crate::problem::{
    lower_bound_family, preset_with_ratio, Family, PresetName, ThresholdProblem,
    EXP3_DEFAULT_RATIO,
};

/// Member label of the per-horizon maximum row in lower-bound sweeps.
pub const MAX_MEMBER: &str = "max";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: PresetName,
    pub family: Family,
    /// Geometric ratio of the upper arms of `exp3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp3_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundSpec {
    pub d: Vec<f64>,
    pub tau: f64,
    pub epsilon: f64,
}

/// Where an experiment's problem(s) come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Inline(ThresholdProblem),
    Preset(PresetSpec),
    LowerBound(LowerBoundSpec),
}

/// Experiment description, as read from a JSON config. Exactly one of
/// `problem`, `preset` or `lower_bound` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ThresholdProblem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<LowerBoundSpec>,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicyId>,
    pub horizons: Vec<usize>,
    pub replications: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub mode: Mode,
}

fn default_policies() -> Vec<PolicyId> {
    vec![PolicyId::Apt]
}

impl ExperimentConfig {
    pub fn new(source: ProblemSource, policies: Vec<PolicyId>, horizons: Vec<usize>) -> Self {
        let mut cfg = Self {
            problem: None,
            preset: None,
            lower_bound: None,
            policies,
            horizons,
            replications: 1,
            master_seed: 0,
            mode: Mode::ThresholdLoss,
        };
        match source {
            ProblemSource::Inline(p) => cfg.problem = Some(p),
            ProblemSource::Preset(p) => cfg.preset = Some(p),
            ProblemSource::LowerBound(l) => cfg.lower_bound = Some(l),
        }
        cfg
    }

    pub fn source(&self) -> Result<ProblemSource> {
        match (&self.problem, &self.preset, &self.lower_bound) {
            (Some(p), None, None) => Ok(ProblemSource::Inline(p.clone())),
            (None, Some(p), None) => Ok(ProblemSource::Preset(p.clone())),
            (None, None, Some(l)) => Ok(ProblemSource::LowerBound(l.clone())),
            (None, None, None) => Err(Error::Config(
                "one of `problem`, `preset` or `lower_bound` is required".into(),
            )),
            _ => Err(Error::Config(
                "only one of `problem`, `preset` or `lower_bound` may be given".into(),
            )),
        }
    }

    /// Check every precondition and expand the problem source. Nothing is
    /// simulated.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        if self.policies.is_empty() {
            return Err(Error::Config("policies: at least one policy is required".into()));
        }
        if self.horizons.is_empty() {
            return Err(Error::Config("horizons: at least one horizon is required".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons: must be strictly ascending".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications: must be at least 1".into()));
        }
        let (members, complexity) = match self.source()? {
            ProblemSource::Inline(p) => {
                let h = p.complexity().ok();
                (vec![(None, p)], h)
            }
            ProblemSource::Preset(spec) => {
                let p = preset_with_ratio(
                    spec.name,
                    spec.family,
                    spec.exp3_ratio.unwrap_or(EXP3_DEFAULT_RATIO),
                )
                .map_err(|e| Error::Config(format!("preset: {e}")))?;
                let h = p.complexity().ok();
                (vec![(None, p)], h)
            }
            ProblemSource::LowerBound(spec) => {
                let fam = lower_bound_family(&spec.d, spec.tau, spec.epsilon)?;
                let members = fam
                    .problems
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| (Some(i.to_string()), p))
                    .collect();
                (members, Some(fam.shared_complexity))
            }
        };
        for (_, problem) in &members {
            let k = problem.num_arms();
            for policy in &self.policies {
                for &horizon in &self.horizons {
                    policy.horizon_rule().check(&policy.label(), k, horizon)?;
                }
                let played = match self.mode {
                    Mode::ThresholdLoss => problem.clone(),
                    _ => problem.with_threshold(problem.unique_best()?.1, 0.0)?,
                };
                policy
                    .build(&played, self.horizons[self.horizons.len() - 1])
                    .map_err(|e| Error::Config(format!("policy {policy}: {e}")))?;
            }
        }
        Ok(ResolvedExperiment {
            members,
            complexity,
        })
    }
}

/// Problems an experiment will actually play, in member order.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub members: Vec<(Option<String>, ThresholdProblem)>,
    pub complexity: Option<f64>,
}

/// One `(policy, T[, member])` estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub policy: String,
    /// Lower-bound family member index, or [`MAX_MEMBER`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
    pub horizon: usize,
    #[serde(flatten)]
    pub estimate: CellEstimate,
    #[serde(default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    /// Complexity `H` of the problem; `None` when some gap is zero.
    pub complexity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub cells: Vec<Cell>,
}

impl ExperimentResult {
    pub fn mode(&self) -> Mode {
        self.metadata.config.mode
    }

    /// Drop wall-clock timings so the result is a pure function of the
    /// config.
    pub fn without_timing(mut self) -> Self {
        for cell in &mut self.cells {
            cell.wall_time_ms = None;
        }
        self
    }

    pub fn has_members(&self) -> bool {
        self.cells.iter().any(|c| c.member.is_some())
    }

    /// Cells of `policy` (optionally restricted to a member), in horizon order.
    pub fn curve(&self, policy: &str, member: Option<&str>) -> Vec<&Cell> {
        self.cells
            .iter()
            .filter(|c| c.policy == policy && c.member.as_deref() == member)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Run every `(policy, horizon, member)` cell of `config`.
///
/// Lower-bound sweeps additionally get one [`MAX_MEMBER`] row per
/// `(policy, horizon)` holding the worst member's estimate.
pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    let resolved = config.resolve()?;
    let family = resolved.members.len() > 1 || resolved.members[0].0.is_some();
    let mut cells = Vec::new();
    for policy in &config.policies {
        for &horizon in &config.horizons {
            let mut rows = Vec::with_capacity(resolved.members.len());
            for (member, problem) in &resolved.members {
                let start = Instant::now();
                let estimate = estimate_with(
                    policy,
                    problem,
                    horizon,
                    config.replications,
                    config.master_seed,
                    config.mode,
                    exec,
                )?;
                rows.push(Cell {
                    policy: policy.label(),
                    member: member.clone(),
                    horizon,
                    estimate,
                    wall_time_ms: Some(start.elapsed().as_secs_f64() * 1e3),
                });
            }
            if family {
                let worst = rows
                    .iter()
                    .fold(None::<&Cell>, |acc, c| match acc {
                        Some(w) if w.estimate.value >= c.estimate.value => Some(w),
                        _ => Some(c),
                    })
                    .expect("family has members");
                let total: f64 = rows.iter().filter_map(|c| c.wall_time_ms).sum();
                let max_row = Cell {
                    member: Some(MAX_MEMBER.to_string()),
                    wall_time_ms: Some(total),
                    ..worst.clone()
                };
                cells.extend(rows);
                cells.push(max_row);
            } else {
                cells.extend(rows);
            }
        }
    }
    Ok(ExperimentResult {
        metadata: Metadata {
            config: config.clone(),
            complexity: resolved.complexity,
        },
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let p = ThresholdProblem::bernoulli(&[0.3, 0.7], 0.5, 0.1).unwrap();
        let mut cfg = ExperimentConfig::new(ProblemSource::Inline(p), vec![PolicyId::Apt], vec![10, 20]);
        cfg.replications = 200;
        cfg.master_seed = 4;
        cfg
    }

    #[test]
    fn precondition_checked_before_running() {
        let mut cfg = ExperimentConfig::new(
            ProblemSource::Preset(PresetSpec {
                name: PresetName::Exp1,
                family: Family::Bernoulli,
                exp3_ratio: None,
            }),
            vec![PolicyId::Apt],
            vec![5],
        );
        cfg.replications = 10;
        let err = run_experiment(&cfg, Execution::Sequential).unwrap_err();
        assert!(err.to_string().starts_with("T must be ≥ 2K for apt"), "{err}");
    }

    #[test]
    fn config_validation() {
        let mut cfg = small();
        cfg.horizons = vec![20, 10];
        assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
        let mut cfg = small();
        cfg.replications = 0;
        assert!(cfg.resolve().is_err());
        let mut cfg = small();
        cfg.preset = Some(PresetSpec {
            name: PresetName::Exp2,
            family: Family::Gaussian,
            exp3_ratio: None,
        });
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn json_round_trip_of_config_echo() {
        let result = run_experiment(&small(), Execution::Parallel).unwrap().without_timing();
        let json = result.to_json().unwrap();
        let back: ExperimentResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, result);
        assert_eq!(back.metadata.config, small());
    }

    #[test]
    fn lower_bound_rows() {
        let mut cfg = ExperimentConfig::new(
            ProblemSource::LowerBound(LowerBoundSpec {
                d: vec![1.0, 1.0, 1.0],
                tau: 0.0,
                epsilon: 0.0,
            }),
            vec![PolicyId::Apt],
            vec![12, 24],
        );
        cfg.replications = 300;
        let result = run_experiment(&cfg, Execution::Parallel).unwrap();
        assert_eq!(result.cells.len(), 2 * 5);
        for t in [12, 24] {
            let rows: Vec<_> = result.cells.iter().filter(|c| c.horizon == t).collect();
            let max = rows.iter().find(|c| c.member.as_deref() == Some(MAX_MEMBER)).unwrap();
            for r in &rows {
                assert!(max.estimate.value >= r.estimate.value);
            }
        }
        assert_eq!(result.metadata.complexity, Some(3.0));
    }
}

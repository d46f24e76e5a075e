//! Thresholding problems: gaps, complexity, the loss functional, presets and
//! the lower-bound instance family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::ArmModel;
use crate::error::{Error, Result};

/// Threshold `tau`, either shared by all arms or given per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Scalar(f64),
    PerArm(Vec<f64>),
}

impl Threshold {
    /// Threshold applied to arm `k`.
    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Threshold::Scalar(t) => *t,
            Threshold::PerArm(ts) => ts[k],
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Threshold {
        match self {
            Threshold::Scalar(t) => Threshold::Scalar(f(*t)),
            Threshold::PerArm(ts) => Threshold::PerArm(ts.iter().copied().map(f).collect()),
        }
    }
}

impl From<f64> for Threshold {
    fn from(t: f64) -> Self {
        Threshold::Scalar(t)
    }
}

impl From<Vec<f64>> for Threshold {
    fn from(ts: Vec<f64>) -> Self {
        Threshold::PerArm(ts)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawProblem {
    arms: Vec<ArmModel>,
    tau: Threshold,
    epsilon: f64,
}

/// A `(tau, epsilon)` thresholding problem over an ordered arm set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct ThresholdProblem {
    arms: Vec<ArmModel>,
    tau: Threshold,
    epsilon: f64,
}

impl TryFrom<RawProblem> for ThresholdProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        Self::new(raw.arms, raw.tau, raw.epsilon)
    }
}

impl From<ThresholdProblem> for RawProblem {
    fn from(p: ThresholdProblem) -> Self {
        RawProblem {
            arms: p.arms,
            tau: p.tau,
            epsilon: p.epsilon,
        }
    }
}

impl ThresholdProblem {
    pub fn new(arms: Vec<ArmModel>, tau: impl Into<Threshold>, epsilon: f64) -> Result<Self> {
        let tau = tau.into();
        if arms.is_empty() {
            return Err(Error::InvalidParameter("a problem needs at least one arm".into()));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        match &tau {
            Threshold::Scalar(t) if !t.is_finite() => {
                return Err(Error::InvalidParameter(format!("tau must be finite, got {t}")))
            }
            Threshold::PerArm(ts) if ts.len() != arms.len() => {
                return Err(Error::InvalidParameter(format!(
                    "per-arm tau has {} entries for {} arms",
                    ts.len(),
                    arms.len()
                )))
            }
            Threshold::PerArm(ts) if ts.iter().any(|t| !t.is_finite()) => {
                return Err(Error::InvalidParameter("per-arm tau must be finite".into()))
            }
            _ => {}
        }
        Ok(Self { arms, tau, epsilon })
    }

    /// Bernoulli arms with the given means.
    pub fn bernoulli(means: &[f64], tau: f64, epsilon: f64) -> Result<Self> {
        let arms = means
            .iter()
            .map(|&p| ArmModel::bernoulli(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, tau, epsilon)
    }

    /// Gaussian arms sharing one variance.
    pub fn gaussian(means: &[f64], variance: f64, tau: f64, epsilon: f64) -> Result<Self> {
        let arms = means
            .iter()
            .map(|&m| ArmModel::gaussian(m, variance))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, tau, epsilon)
    }

    pub fn arms(&self) -> &[ArmModel] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn tau(&self) -> &Threshold {
        &self.tau
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmModel::true_mean).collect()
    }

    /// `Δ_i = |μ_i - τ_i| + ε` for every arm.
    pub fn gaps(&self) -> Vec<f64> {
        self.arms
            .iter()
            .enumerate()
            .map(|(k, arm)| gap(arm.true_mean(), self.tau.at(k), self.epsilon))
            .collect()
    }

    pub fn complexity(&self) -> Result<f64> {
        complexity(self)
    }

    /// The same arms played against a different `(tau, epsilon)`.
    pub fn with_threshold(&self, tau: impl Into<Threshold>, epsilon: f64) -> Result<Self> {
        Self::new(self.arms.clone(), tau, epsilon)
    }

    /// Largest true mean and the arm holding it. Errors when the maximum is
    /// shared by two or more arms.
    pub fn unique_best(&self) -> Result<(usize, f64)> {
        let means = self.means();
        let (best, &top) = means
            .iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, &f64)>, (i, m)| match acc {
                Some((_, b)) if *b >= *m => acc,
                _ => Some((i, m)),
            })
            .expect("problem has at least one arm");
        if means.iter().filter(|&&m| m == top).count() > 1 {
            return Err(Error::Domain(format!(
                "maximal mean {top} is shared by several arms"
            )));
        }
        Ok((best, top))
    }

    /// Every mean and the threshold moved by `shift`.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        let arms = self
            .arms
            .iter()
            .map(|a| a.with_mean(a.true_mean() + shift))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, self.tau.map(|t| t + shift), self.epsilon)
    }

    /// Every gap multiplied by `factor`: each mean moves to
    /// `tau + factor * (mu - tau)` and `epsilon` becomes `factor * epsilon`.
    /// Noise levels are untouched.
    pub fn scale_gaps(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gap scale factor must be positive, got {factor}"
            )));
        }
        let arms = self
            .arms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let t = self.tau.at(k);
                a.with_mean(t + factor * (a.true_mean() - t))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, self.tau.clone(), factor * self.epsilon)
    }

    /// The error-free answer `{k : mu_k >= tau_k}`.
    pub fn oracle_set(&self) -> OutputSet {
        OutputSet::from_flags(
            self.arms
                .iter()
                .enumerate()
                .map(|(k, a)| a.true_mean() >= self.tau.at(k))
                .collect(),
        )
    }
}

/// A learner's final classification: accepted arms form the estimated
/// above-threshold set, everything else is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutputSet {
    accepted: Vec<bool>,
}

impl OutputSet {
    pub fn from_flags(accepted: Vec<bool>) -> Self {
        Self { accepted }
    }

    pub fn from_accepted(num_arms: usize, accepted: impl IntoIterator<Item = usize>) -> Self {
        let mut flags = vec![false; num_arms];
        for k in accepted {
            flags[k] = true;
        }
        Self { accepted: flags }
    }

    pub fn num_arms(&self) -> usize {
        self.accepted.len()
    }

    pub fn is_accepted(&self, k: usize) -> bool {
        self.accepted[k]
    }

    pub fn accepted(&self) -> Vec<usize> {
        (0..self.accepted.len()).filter(|&k| self.accepted[k]).collect()
    }

    pub fn rejected(&self) -> Vec<usize> {
        (0..self.accepted.len()).filter(|&k| !self.accepted[k]).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            accepted: self.accepted.iter().map(|a| !a).collect(),
        }
    }
}

/// `|mu - tau| + epsilon`.
#[inline]
pub fn gap(mu: f64, tau: f64, epsilon: f64) -> f64 {
    (mu - tau).abs() + epsilon
}

/// `H = Σ_i Δ_i^{-2}`. A zero gap (an arm exactly at `tau` with
/// `epsilon = 0`) makes the instance ill-posed and is reported as a domain
/// error.
pub fn complexity(problem: &ThresholdProblem) -> Result<f64> {
    let gaps = problem.gaps();
    if let Some(k) = gaps.iter().position(|&g| g <= 0.0) {
        return Err(Error::Domain(format!(
            "arm {k} has zero gap (mean equals tau with epsilon = 0); complexity undefined"
        )));
    }
    Ok(gaps.iter().map(|g| g.powi(-2)).sum())
}

/// 1 if some arm with `mu >= tau + epsilon` is rejected or some arm with
/// `mu < tau - epsilon` is accepted, 0 otherwise. Arms inside the band are
/// free either way.
pub fn loss(problem: &ThresholdProblem, out: &OutputSet) -> u8 {
    assert_eq!(
        out.num_arms(),
        problem.num_arms(),
        "output set does not cover the arm set"
    );
    let eps = problem.epsilon();
    let mistake = problem.arms().iter().enumerate().any(|(k, arm)| {
        let mu = arm.true_mean();
        let tau = problem.tau().at(k);
        let accepted = out.is_accepted(k);
        (mu >= tau + eps && !accepted) || (mu < tau - eps && accepted)
    });
    u8::from(mistake)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Exp1,
    Exp2,
    Exp3,
}

impl PresetName {
    pub const ALL: [PresetName; 3] = [PresetName::Exp1, PresetName::Exp2, PresetName::Exp3];

    /// Arm means with the default geometric ratio for `exp3`.
    pub fn means(self) -> Vec<f64> {
        self.means_with_ratio(EXP3_DEFAULT_RATIO)
    }

    /// Arm means; `ratio` only affects the upper half of `exp3`.
    pub fn means_with_ratio(self, ratio: f64) -> Vec<f64> {
        match self {
            PresetName::Exp1 => vec![0.1, 0.1, 0.1, 0.35, 0.45, 0.55, 0.65, 0.9, 0.9, 0.9],
            PresetName::Exp2 => {
                let mut m: Vec<f64> = (0..4).map(|j| 0.2 + j as f64 * 0.05).collect();
                m.extend([0.45, 0.55]);
                m.extend((0..4).map(|j| 0.65 + j as f64 * 0.05));
                m
            }
            PresetName::Exp3 => {
                let mut m: Vec<f64> = (1..=4).map(|j| 0.4 - 0.2f64.powi(j)).collect();
                m.extend([0.45, 0.55]);
                m.extend((1..=4).map(|j| 0.6 + ratio.powi(5 - j)));
                m
            }
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetName::Exp1 => "exp1",
            PresetName::Exp2 => "exp2",
            PresetName::Exp3 => "exp3",
        })
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(PresetName::Exp1),
            "exp2" => Ok(PresetName::Exp2),
            "exp3" => Ok(PresetName::Exp3),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bernoulli,
    Gaussian,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Bernoulli => "bernoulli",
            Family::Gaussian => "gaussian",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(Family::Bernoulli),
            "gaussian" => Ok(Family::Gaussian),
            other => Err(Error::InvalidParameter(format!("unknown family: {other}"))),
        }
    }
}

pub const PRESET_TAU: f64 = 0.5;
pub const PRESET_EPSILON: f64 = 0.1;
pub const PRESET_GAUSSIAN_VARIANCE: f64 = 0.25;
/// Geometric ratio of the upper arms in `exp3`, mirroring the lower arms.
pub const EXP3_DEFAULT_RATIO: f64 = 0.2;

/// The ten-arm benchmark instances with `tau = 0.5`, `epsilon = 0.1`.
pub fn preset(name: PresetName, family: Family) -> ThresholdProblem {
    preset_with_ratio(name, family, EXP3_DEFAULT_RATIO).expect("preset parameters are valid")
}

pub fn preset_with_ratio(name: PresetName, family: Family, ratio: f64) -> Result<ThresholdProblem> {
    let means = name.means_with_ratio(ratio);
    match family {
        Family::Bernoulli => ThresholdProblem::bernoulli(&means, PRESET_TAU, PRESET_EPSILON),
        Family::Gaussian => ThresholdProblem::gaussian(
            &means,
            PRESET_GAUSSIAN_VARIANCE,
            PRESET_TAU,
            PRESET_EPSILON,
        ),
    }
}

/// Problems sharing one complexity value.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFamily {
    pub problems: Vec<ThresholdProblem>,
    pub shared_complexity: f64,
}

/// Unit-variance Gaussian instances `B^0..B^K`. In `B^0` arm `j` has mean
/// `tau + d_j + epsilon`; `B^i` moves arm `i` alone to `tau - d_i - epsilon`.
/// Every member has complexity `Σ_j (d_j + 2 epsilon)^{-2}`.
pub fn lower_bound_family(d: &[f64], tau: f64, epsilon: f64) -> Result<ProblemFamily> {
    if d.is_empty() {
        return Err(Error::InvalidParameter("gap vector d is empty".into()));
    }
    if let Some(bad) = d.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "gap entries must be finite and non-negative, got {bad}"
        )));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    if let Some(j) = d.iter().position(|&x| x + 2.0 * epsilon == 0.0) {
        return Err(Error::Domain(format!(
            "d[{j}] + 2 epsilon = 0; family complexity undefined"
        )));
    }
    let shared_complexity = d.iter().map(|&x| (x + 2.0 * epsilon).powi(-2)).sum();
    let problems = (0..=d.len())
        .map(|flipped| {
            let means: Vec<f64> = d
                .iter()
                .enumerate()
                .map(|(j, &dj)| {
                    if flipped == j + 1 {
                        tau - dj - epsilon
                    } else {
                        tau + dj + epsilon
                    }
                })
                .collect();
            ThresholdProblem::gaussian(&means, 1.0, tau, epsilon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProblemFamily {
        problems,
        shared_complexity,
    })
}

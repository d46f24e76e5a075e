//! Oracles and property checks shared by the integration suites.
#![allow(dead_code)]

use tbp_core::distributions::StreamRng;
use tbp_core::policies::{csar_run, Apt, HorizonRule};
use tbp_core::{
    exec, loss, run_experiment, run_game, ArmModel, Execution, ExperimentConfig, OutputSet,
    Policy, PolicyFactory, PolicyId, ProblemSource, RunState, SeededRng, ThresholdProblem,
};

/// APT's arm choice written out from the definition, without touching the
/// library's selection code: one pull per arm in index order, then the first
/// minimiser of `sqrt(n) * (|sum/n - tau| + eps)`.
pub fn reference_apt_arm(pulls: &[u64], sums: &[f64], tau: f64, eps: f64) -> usize {
    if let Some(k) = pulls.iter().position(|&n| n == 0) {
        return k;
    }
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..pulls.len() {
        let n = pulls[k] as f64;
        let v = n.sqrt() * ((sums[k] / n - tau).abs() + eps);
        if v < best_val {
            best = k;
            best_val = v;
        }
    }
    best
}

/// Exact APT error probability on Bernoulli arms by enumerating every
/// reward sequence of length `horizon` and weighting it by its probability.
/// The library policy is replayed at each node and cross-checked against
/// [`reference_apt_arm`].
pub fn exact_apt_error(means: &[f64], tau: f64, eps: f64, horizon: usize) -> f64 {
    let problem = ThresholdProblem::bernoulli(means, tau, eps).unwrap();
    let mut dummy = SeededRng::new(0, 0).stream();
    fn walk(
        problem: &ThresholdProblem,
        policy: &Apt,
        state: &RunState,
        left: usize,
        prob: f64,
        tau: f64,
        eps: f64,
        rng: &mut StreamRng,
    ) -> f64 {
        if left == 0 {
            let out = policy.recommend(state);
            return prob * f64::from(loss(problem, &out));
        }
        let mut p = policy.clone();
        let arm = p.select(state, rng);
        assert_eq!(
            arm,
            reference_apt_arm(state.pulls(), state.sums(), tau, eps),
            "library APT diverged from the reference rule"
        );
        let mu = problem.arms()[arm].true_mean();
        let mut total = 0.0;
        for (reward, w) in [(1.0, mu), (0.0, 1.0 - mu)] {
            if w == 0.0 {
                continue;
            }
            let mut next = state.clone();
            next.record(arm, reward);
            total += walk(problem, &p, &next, left - 1, prob * w, tau, eps, rng);
        }
        total
    }
    let apt = Apt::new(tau, eps);
    walk(
        &problem,
        &apt,
        &RunState::new(means.len()),
        horizon,
        1.0,
        tau,
        eps,
        &mut dummy,
    )
}

/// Wraps a policy and remembers every arm it selected.
pub struct Recording {
    pub inner: Box<dyn Policy>,
    pub pulls: Vec<usize>,
}

impl Recording {
    pub fn new(inner: Box<dyn Policy>) -> Self {
        Self {
            inner,
            pulls: Vec::new(),
        }
    }
}

impl Policy for Recording {
    fn select(&mut self, state: &RunState, rng: &mut StreamRng) -> usize {
        let k = self.inner.select(state, rng);
        self.pulls.push(k);
        k
    }

    fn recommend(&self, state: &RunState) -> OutputSet {
        self.inner.recommend(state)
    }

    fn horizon_rule(&self) -> HorizonRule {
        self.inner.horizon_rule()
    }
}

/// Pull sequence and output set of APT on `problem`.
pub fn apt_trace(problem: &ThresholdProblem, horizon: usize, streams: &SeededRng) -> (Vec<usize>, OutputSet) {
    let mut rec = Recording::new(PolicyId::Apt.build(problem, horizon).unwrap());
    let out = run_game(&mut rec, problem, horizon, streams).unwrap();
    (rec.pulls, out.output)
}

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Σ T_i = T after a game, for the given policy.
pub fn check_budget(means: &[f64], policy: PolicyId, extra: usize, seed: u64) -> Check {
    let problem = ThresholdProblem::bernoulli(means, 0.5, 0.1).unwrap();
    let horizon = policy.horizon_rule().min_horizon(means.len()) + extra;
    let mut p = policy.build(&problem, horizon).map_err(|e| e.to_string())?;
    let out = run_game(p.as_mut(), &problem, horizon, &SeededRng::new(seed, 0)).map_err(|e| e.to_string())?;
    ensure(
        out.state.pulls().iter().sum::<u64>() == horizon as u64 && out.state.total() == horizon as u64,
        || format!("{policy} used {:?} for T={horizon}", out.state.pulls()),
    )
}

/// From any state where all arms look identical, APT picks arm 0, and two
/// runs from the same stream are identical.
pub fn check_tie_break(k: usize, pulls: u64, mean: f64, seed: u64) -> Check {
    let mut state = RunState::new(k);
    for arm in 0..k {
        for _ in 0..pulls {
            state.record(arm, mean);
        }
    }
    let mut apt = Apt::new(0.5, 0.05);
    let mut rng = SeededRng::new(seed, 0).stream();
    ensure(apt.select(&state, &mut rng) == 0, || "tie not broken towards arm 0".into())?;
    let problem = ThresholdProblem::bernoulli(&vec![mean.clamp(0.0, 1.0); k], 0.5, 0.05).unwrap();
    let streams = SeededRng::new(seed, 3);
    let a = apt_trace(&problem, 4 * k, &streams);
    let b = apt_trace(&problem, 4 * k, &streams);
    ensure(a == b, || "same stream gave different traces".into())
}

fn gaussian_problem(means: &[f64], sds: &[f64], tau: f64, eps: f64) -> ThresholdProblem {
    let arms = means
        .iter()
        .zip(sds)
        .map(|(&m, &s)| ArmModel::gaussian(m, s * s).unwrap())
        .collect();
    ThresholdProblem::new(arms, tau, eps).unwrap()
}

/// Shifting every mean and tau by `shift` under shared noise leaves the pull
/// sequence and the accepted set unchanged.
pub fn check_translation(means: &[f64], sds: &[f64], tau: f64, eps: f64, shift: f64, seed: u64) -> Check {
    let base = gaussian_problem(means, sds, tau, eps);
    let moved = base.translated(shift).unwrap();
    let horizon = 2 * means.len() + 60;
    let streams = SeededRng::new(seed, 1);
    let (pa, oa) = apt_trace(&base, horizon, &streams);
    let (pb, ob) = apt_trace(&moved, horizon, &streams);
    ensure(pa == pb, || format!("pull sequences differ after shift {shift}"))?;
    ensure(oa == ob, || format!("accepted sets differ after shift {shift}"))
}

/// Scaling means, tau, epsilon and noise by `c > 0` leaves the pull sequence
/// unchanged.
pub fn check_scale(means: &[f64], sds: &[f64], tau: f64, eps: f64, c: f64, seed: u64) -> Check {
    let base = gaussian_problem(means, sds, tau, eps);
    let m2: Vec<f64> = means.iter().map(|m| m * c).collect();
    let s2: Vec<f64> = sds.iter().map(|s| s * c).collect();
    let scaled = gaussian_problem(&m2, &s2, tau * c, eps * c);
    let horizon = 2 * means.len() + 60;
    let streams = SeededRng::new(seed, 2);
    let (pa, _) = apt_trace(&base, horizon, &streams);
    let (pb, _) = apt_trace(&scaled, horizon, &streams);
    ensure(pa == pb, || format!("pull sequences differ after scaling by {c}"))
}

/// CSAR classifies every arm exactly once and never exceeds the budget.
pub fn check_csar(means: &[f64], extra: usize, seed: u64) -> Check {
    let problem = ThresholdProblem::bernoulli(means, 0.5, 0.0).unwrap();
    let k = means.len();
    let horizon = k + extra;
    let streams = SeededRng::new(seed, 0);
    let mut lanes: Vec<_> = (0..k).map(|a| streams.arm_lane(a)).collect();
    let out = csar_run(
        |a| problem.arms()[a].sample(&mut lanes[a]),
        k,
        horizon,
        0.5,
    )
    .map_err(|e| e.to_string())?;
    let mut order = out.classification_order.clone();
    order.sort_unstable();
    ensure(order == (0..k).collect::<Vec<_>>(), || {
        format!("classification order {:?}", out.classification_order)
    })?;
    ensure(out.state.total() <= horizon as u64, || "budget exceeded".into())
}

/// Identical configs give byte-identical CSV and JSON at any thread count.
pub fn check_thread_independence(seed: u64, threads: usize) -> Check {
    let problem = ThresholdProblem::bernoulli(&[0.2, 0.45, 0.55, 0.8], 0.5, 0.1).unwrap();
    let mut cfg = ExperimentConfig::new(
        ProblemSource::Inline(problem),
        PolicyId::BENCHMARK.to_vec(),
        vec![16, 40],
    );
    cfg.replications = 64;
    cfg.master_seed = seed;
    let render = |threads: usize, schedule: Execution| {
        let result = exec::with_threads(threads, || run_experiment(&cfg, schedule))
            .unwrap()
            .without_timing();
        let mut csv = Vec::new();
        tbp_core::harness::write_csv(&result, &mut csv).unwrap();
        (csv, result.to_json().unwrap())
    };
    let reference = render(1, Execution::Sequential);
    let other = render(threads, Execution::Parallel);
    ensure(reference == other, || format!("outputs differ at {threads} threads"))
}

/// Arms inside the `[tau - eps, tau + eps)` band never change the loss, and
/// the oracle set has zero loss.
pub fn check_band(means: &[f64], tau: f64, eps: f64, accepted: &[bool]) -> Check {
    let problem = ThresholdProblem::bernoulli(means, tau, eps).unwrap();
    ensure(loss(&problem, &problem.oracle_set()) == 0, || "oracle set has loss".into())?;
    let out = OutputSet::from_flags(accepted.to_vec());
    let base = loss(&problem, &out);
    for (k, &mu) in means.iter().enumerate() {
        if mu >= tau - eps && mu < tau + eps {
            let mut flipped = accepted.to_vec();
            flipped[k] = !flipped[k];
            let l = loss(&problem, &OutputSet::from_flags(flipped));
            ensure(l == base, || format!("flipping in-band arm {k} changed the loss"))?;
        }
    }
    Ok(())
}

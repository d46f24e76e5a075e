mod common;

use proptest::prelude::*;
use tbp_core::policies::{apt_index, ucbe_select, apt_select};
use tbp_core::{complexity, PolicyId, RunState, SeededRng, Threshold, ThresholdProblem};

fn policy_strategy() -> impl Strategy<Value = PolicyId> {
    prop_oneof![
        Just(PolicyId::Apt),
        Just(PolicyId::Ua),
        Just(PolicyId::Csar),
        (-2i32..=4).prop_map(PolicyId::Ucbe),
    ]
}

/// Bernoulli means that keep every gap positive for tau = 0.5, eps = 0.1.
fn means(k: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, k)
}

fn gaussian_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..6).prop_flat_map(|k| {
        (
            prop::collection::vec(-2.0f64..2.0, k),
            prop::collection::vec(0.2f64..2.0, k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn budget_conservation(m in means(1..8), policy in policy_strategy(), extra in 0usize..40, seed: u64) {
        common::check_budget(&m, policy, extra, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn apt_tie_break(k in 1usize..8, pulls in 1u64..5, mean in 0.0f64..1.0, seed: u64) {
        common::check_tie_break(k, pulls, mean, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn translation_coupling((m, s) in gaussian_instance(), tau in -1.0f64..1.0, eps in 0.0f64..0.3,
                            shift in -5.0f64..5.0, seed: u64) {
        common::check_translation(&m, &s, tau, eps, shift, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn scale_coupling((m, s) in gaussian_instance(), tau in -1.0f64..1.0, eps in 0.0f64..0.3,
                      c in 0.1f64..10.0, seed: u64) {
        common::check_scale(&m, &s, tau, eps, c, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn csar_classifies_once(m in means(1..10), extra in 0usize..200, seed: u64) {
        common::check_csar(&m, extra, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn loss_band((m, acc) in (1usize..8).prop_flat_map(|k| (means(k..k + 1), prop::collection::vec(any::<bool>(), k))),
                 tau in 0.2f64..0.8, eps in 0.0f64..0.2) {
        common::check_band(&m, tau, eps, &acc).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn complexity_permutation_and_translation(m in prop::collection::vec(-3.0f64..3.0, 2..8),
                                              shift in -10.0f64..10.0, rot in 0usize..8) {
        let p = ThresholdProblem::gaussian(&m, 1.0, 0.05, 0.1).unwrap();
        let mut permuted = m.clone();
        permuted.rotate_left(rot % m.len());
        permuted.reverse();
        let q = ThresholdProblem::gaussian(&permuted, 1.0, 0.05, 0.1).unwrap();
        let h = complexity(&p).unwrap();
        prop_assert!((complexity(&q).unwrap() - h).abs() <= 1e-9 * h);
        let t = p.translated(shift).unwrap();
        prop_assert!((complexity(&t).unwrap() - h).abs() <= 1e-9 * h);
    }

    #[test]
    fn exact_threshold_without_precision(m in prop::collection::vec(0.0f64..1.0, 2..8),
                                         acc in prop::collection::vec(any::<bool>(), 8)) {
        prop_assume!(m.iter().all(|&x| x != 0.5));
        let p = ThresholdProblem::bernoulli(&m, 0.5, 0.0).unwrap();
        let flags: Vec<bool> = acc[..m.len()].to_vec();
        let out = tbp_core::OutputSet::from_flags(flags.clone());
        let exact: Vec<bool> = m.iter().map(|&x| x > 0.5).collect();
        prop_assert_eq!(tbp_core::loss(&p, &out) == 0, flags == exact);
    }

    #[test]
    fn lower_bound_members_share_complexity(d in prop::collection::vec(0.0f64..3.0, 1..7),
                                            tau in -2.0f64..2.0, eps in 0.01f64..0.5) {
        let fam = tbp_core::lower_bound_family(&d, tau, eps).unwrap();
        prop_assert_eq!(fam.problems.len(), d.len() + 1);
        for (i, p) in fam.problems.iter().enumerate() {
            let h = p.complexity().unwrap();
            prop_assert!((h - fam.shared_complexity).abs() <= 1e-9 * fam.shared_complexity);
            let differing = p.means().iter().zip(fam.problems[0].means()).filter(|(a, b)| **a != *b).count();
            prop_assert_eq!(differing, usize::from(i > 0));
        }
    }

    /// Between two consecutive APT rounds only the pulled arm's index moves.
    #[test]
    fn selection_locality(m in prop::collection::vec(0.05f64..0.95, 2..7), steps in 1usize..60, seed: u64) {
        let k = m.len();
        let problem = ThresholdProblem::bernoulli(&m, 0.5, 0.1).unwrap();
        let streams = SeededRng::new(seed, 0);
        let mut lanes: Vec<_> = (0..k).map(|a| streams.arm_lane(a)).collect();
        let mut state = RunState::new(k);
        for a in 0..k {
            state.record(a, problem.arms()[a].sample(&mut lanes[a]));
        }
        let tau = Threshold::Scalar(0.5);
        for _ in 0..steps {
            let before: Vec<f64> = (0..k).map(|a| apt_index(&state, a, 0.5, 0.1).unwrap()).collect();
            let arm = apt_select(&state, &tau, 0.1);
            state.record(arm, problem.arms()[arm].sample(&mut lanes[arm]));
            for a in (0..k).filter(|&a| a != arm) {
                prop_assert_eq!(apt_index(&state, a, 0.5, 0.1).unwrap().to_bits(), before[a].to_bits());
            }
        }
    }

    #[test]
    fn ucbe_without_exploration_is_greedy(pulls in prop::collection::vec(1u64..20, 2..8), seed: u64) {
        use rand::Rng;
        let mut rng = SeededRng::new(seed, 0).stream();
        let mut state = RunState::new(pulls.len());
        for (a, &n) in pulls.iter().enumerate() {
            for _ in 0..n {
                state.record(a, f64::from(u8::from(rng.random_bool(0.5))));
            }
        }
        let tau = Threshold::Scalar(0.5);
        let greedy = (0..pulls.len())
            .map(|a| (state.mean(a).unwrap() - 0.5).abs() + 0.1)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (a, v)| if v < acc.1 { (a, v) } else { acc })
            .0;
        prop_assert_eq!(ucbe_select(&state, &tau, 0.1, 0.0), greedy);
    }

    #[test]
    fn empirical_mean_within_five_se(p in 0.0f64..1.0, m in -3.0f64..3.0, var in 0.1f64..4.0, seed: u64) {
        let n = 100_000;
        let arms = [
            tbp_core::ArmModel::bernoulli(p).unwrap(),
            tbp_core::ArmModel::gaussian(m, var).unwrap(),
        ];
        for arm in arms {
            let mut rng = SeededRng::new(seed, 0).stream();
            let mean = (0..n).map(|_| arm.sample(&mut rng)).sum::<f64>() / n as f64;
            let sd = match arm.gaussian_sd() {
                Some(s) => s,
                None => (p * (1.0 - p)).sqrt(),
            };
            let se = sd / (n as f64).sqrt();
            prop_assert!((mean - arm.true_mean()).abs() <= 5.0 * se + 1e-12,
                         "mean {} vs {} (se {})", mean, arm.true_mean(), se);
        }
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    for threads in [2, 4] {
        common::check_thread_independence(99, threads).unwrap();
    }
}

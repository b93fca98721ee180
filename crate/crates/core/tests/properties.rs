use biased_evidence::analysis::outcome_probs;
use biased_evidence::cost::FlowCostFamily;
use biased_evidence::sim::{run_paths, SimConfig, ThetaMode};
use biased_evidence::solver::{solve_by_oracle, ORACLE_STEP};
use biased_evidence::{reprior, solve_static, Belief, CostSpec, Regime, StaticProblem};
use proptest::prelude::*;

fn b(x: f64) -> Belief {
    Belief::new(x).unwrap()
}

fn family(index: usize, prior: f64) -> CostSpec {
    match index {
        0 => CostSpec::variance(4.0, prior),
        1 => CostSpec::entropy(prior),
        2 => CostSpec::log_likelihood(prior),
        _ => CostSpec::tsallis(1.0, 0.5, prior),
    }
    .unwrap()
}

/// A scenario in which certainty is too costly to be worth buying.
fn scenario(index: usize, mu: f64, a: f64, scale: f64) -> Option<StaticProblem> {
    let cost = family(index, mu);
    let v = match index {
        // reward ratio d = scale * a stays below the threshold
        0 => 4.0 * (scale * a).powi(2),
        _ => scale * 2.0,
    };
    if !cost.certainty_prohibitive(a, v).ok()? {
        return None;
    }
    StaticProblem::new(b(mu), b(a), v, cost).ok()
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

proptest! {
    #[test]
    fn reprior_is_a_bijection(x in 0.001..0.999f64, p in 0.01..0.99f64, q in 0.01..0.99f64) {
        let there = reprior(b(x), b(p), b(q)).unwrap();
        let back = reprior(there, b(q), b(p)).unwrap();
        prop_assert!(close(back.get(), x, 1e-12));
    }

    #[test]
    fn reprior_preserves_order(x in 0.001..0.998f64, gap in 1e-6..0.5f64, p in 0.01..0.99f64, q in 0.01..0.99f64) {
        let y = (x + gap).min(0.999);
        let rx = reprior(b(x), b(p), b(q)).unwrap().get();
        let ry = reprior(b(y), b(p), b(q)).unwrap().get();
        prop_assert!(rx < ry);
    }

    #[test]
    fn reprior_increases_with_target_prior(x in 0.01..0.99f64, p in 0.01..0.99f64, q in 0.01..0.98f64, dq in 1e-4..0.01f64) {
        let lo = reprior(b(x), b(p), b(q)).unwrap().get();
        let hi = reprior(b(x), b(p), b(q + dq)).unwrap().get();
        prop_assert!(hi > lo);
    }

    #[test]
    fn cost_derivatives_match_finite_differences(index in 0usize..4, prior in 0.05..0.95f64, x in 0.05..0.95f64) {
        let cost = family(index, prior);
        let h = 1e-6;
        let slope = (cost.phi(x + h).unwrap() - cost.phi(x - h).unwrap()) / (2.0 * h);
        let d1 = cost.phi_prime(x).unwrap();
        prop_assert!(close(slope, d1, 1e-6 * (1.0 + d1.abs())), "phi' {d1} vs {slope}");
        let curvature = (cost.phi_prime(x + h).unwrap() - cost.phi_prime(x - h).unwrap()) / (2.0 * h);
        let d2 = cost.phi_double_prime(x).unwrap();
        prop_assert!(close(curvature, d2, 1e-5 * (1.0 + d2.abs())), "phi'' {d2} vs {curvature}");
        prop_assert!(d2 > 0.0);
        prop_assert!(cost.phi(x).unwrap() >= 0.0);
        prop_assert!(close(cost.phi(prior).unwrap(), 0.0, 1e-15));
        prop_assert!(close(cost.phi_prime(prior).unwrap(), 0.0, 1e-12));
    }

    #[test]
    fn flow_transform_round_trips(index in 0usize..4, sigma in 0.5..2.0f64, x in 0.02..0.98f64) {
        let cost = family(index, 0.4);
        let numeric = CostSpec::from_flow_cost(cost.flow_cost_preimage(sigma).unwrap(), sigma, 0.4).unwrap();
        let (want, got) = (cost.phi_double_prime(x).unwrap(), numeric.phi_double_prime(x).unwrap());
        prop_assert!(close(got, want, 1e-9 * want.abs()));
        prop_assert!(close(numeric.phi(x).unwrap(), cost.phi(x).unwrap(), 1e-8));
    }

    #[test]
    fn built_in_flow_costs_are_well_posed(kind in 0usize..3, kappa in 0.2..5.0f64, x in 0.02..0.98f64) {
        let flow = [FlowCostFamily::Constant, FlowCostFamily::Variance, FlowCostFamily::VarianceSquared][kind]
            .build(kappa, 1.0);
        let cost = CostSpec::from_flow_cost(flow, 1.0, 0.5).unwrap();
        prop_assert!(cost.phi(x).unwrap() >= 0.0);
        prop_assert!(cost.phi_double_prime(x).unwrap() > 0.0);
    }

    #[test]
    fn solutions_are_bayes_plausible(index in 0usize..4, mu in 0.05..0.8f64, gap in 0.02..0.9f64, scale in 0.05..0.95f64) {
        let a = (mu + gap * (1.0 - mu)).min(0.98);
        let problem = scenario(index, mu, a, scale);
        prop_assume!(problem.is_some());
        let solution = solve_static(&problem.unwrap()).unwrap();
        let (w_low, w_high) = solution.support_weights();
        prop_assert!((0.0..=1.0).contains(&w_low) && (0.0..=1.0).contains(&w_high));
        prop_assert!(close(solution.mean(), mu, 1e-10), "mean {} vs prior {mu}", solution.mean());
        if solution.regime == Regime::Interior {
            prop_assert!(solution.low < mu && mu < solution.high);
            prop_assert!(close(solution.high, a, 1e-12));
        }
    }

    #[test]
    fn optimum_dominates_alternative_splits(
        index in 0usize..4, mu in 0.05..0.8f64, gap in 0.02..0.9f64, scale in 0.05..0.95f64,
        low_frac in 0.0..1.0f64, high_frac in 0.0..1.0f64,
    ) {
        let a = (mu + gap * (1.0 - mu)).min(0.98);
        let problem = scenario(index, mu, a, scale);
        prop_assume!(problem.is_some());
        let problem = problem.unwrap();
        let solution = solve_static(&problem).unwrap();
        let best = solution.value.unwrap();
        let (lo, hi) = problem.cost.value_domain();
        let x_low = lo.max(1e-6) + low_frac * (mu - lo.max(1e-6));
        let x_high = mu + high_frac * (hi.min(1.0 - 1e-6) - mu);
        prop_assume!(x_high > x_low + 1e-9);
        let w = (mu - x_low) / (x_high - x_low);
        let split = w * problem.value(x_high).unwrap() + (1.0 - w) * problem.value(x_low).unwrap();
        prop_assert!(best >= split - 1e-9, "optimum {best} below split {split}");
        prop_assert!(best >= problem.value(mu).unwrap() - 1e-12);
    }

    #[test]
    fn conviction_odds_ratio(index in 0usize..4, mu in 0.05..0.8f64, gap in 0.02..0.9f64, scale in 0.05..0.95f64, true_mu in 0.01..0.99f64) {
        let a = (mu + gap * (1.0 - mu)).min(0.98);
        let problem = scenario(index, mu, a, scale);
        prop_assume!(problem.is_some());
        let solution = solve_static(&problem.unwrap()).unwrap();
        prop_assume!(solution.regime == Regime::Interior && solution.p > 1e-9);
        let probs = outcome_probs(&solution, b(true_mu), b(mu)).unwrap();
        let ratio = probs.gamma / probs.lambda;
        let want = b(solution.high).odds() / b(mu).odds();
        prop_assert!(close(ratio, want, 1e-9 * want));
        prop_assert!(probs.gamma >= probs.lambda);
    }

    #[test]
    fn acquisition_vanishes_continuously(index in 0usize..4, mu in 0.05..0.7f64, gap in 0.05..0.9f64) {
        let a = (mu + gap * (1.0 - mu)).min(0.95);
        let cost = family(index, mu);
        // The reward at which acquiring evidence starts to pay.
        let onset = cost.phi(a).unwrap();
        let p_at = |factor: f64| {
            let problem = StaticProblem::new(b(mu), b(a), onset * factor, family(index, mu)).unwrap();
            solve_static(&problem).unwrap()
        };
        prop_assert_eq!(p_at(0.999).regime, Regime::NoAcquisition);
        let (near, far) = (p_at(1.0 + 1e-6), p_at(1.0 + 1e-2));
        prop_assert!(near.p <= far.p);
        prop_assert!(near.p < 1e-3, "p = {} just past onset", near.p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn first_order_solution_matches_grid_oracle(index in 0usize..4, mu in 0.05..0.8f64, gap in 0.02..0.9f64, scale in 0.05..0.95f64) {
        let a = (mu + gap * (1.0 - mu)).min(0.98);
        let problem = scenario(index, mu, a, scale);
        prop_assume!(problem.is_some());
        let problem = problem.unwrap();
        let exact = solve_static(&problem).unwrap();
        let (grid, _) = solve_by_oracle(&problem, ORACLE_STEP).unwrap();
        let value_gap = (exact.value.unwrap() - grid.value.unwrap()).abs();
        prop_assert!(value_gap <= 10.0 * ORACLE_STEP, "value gap {value_gap}");
        if exact.regime == Regime::Interior && grid.regime == Regime::Interior && !exact.corner {
            prop_assert!((exact.low - grid.low).abs() <= 2.0 * ORACLE_STEP, "low {} vs {}", exact.low, grid.low);
            prop_assert!((exact.high - grid.high).abs() <= 2.0 * ORACLE_STEP);
        }
    }
}

fn small_config(seed: u64, dt: f64, n_paths: u64) -> SimConfig {
    let cost = CostSpec::variance(4.0, 0.3).unwrap();
    SimConfig::new(
        1.0,
        dt,
        n_paths,
        seed,
        ThetaMode::DrawnFromPrior(b(0.3)),
        (b(0.22), b(0.72)),
        b(0.3),
        cost.flow_cost_preimage(1.0).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn simulation_is_deterministic_across_thread_counts(seed in any::<u64>()) {
        let config = small_config(seed, 1e-4, 500);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let stats = pool.install(|| run_paths(&config)).unwrap();
            serde_json::to_string(&stats).unwrap()
        };
        prop_assert_eq!(run(1), run(3));
    }
}

#[test]
fn refining_the_time_step_keeps_hit_probability() {
    let coarse = run_paths(&small_config(5, 1e-3, 4000)).unwrap();
    let fine = run_paths(&small_config(5, 2.5e-4, 4000)).unwrap();
    let spread = 3.0 * (coarse.hit_high.radius.powi(2) + fine.hit_high.radius.powi(2)).sqrt();
    assert!(
        (coarse.hit_high.value - fine.hit_high.value).abs() <= spread.max(0.02),
        "coarse {} fine {}",
        coarse.hit_high.value,
        fine.hit_high.value
    );
    assert!((fine.hit_high.value - 0.16).abs() <= 0.03);
}

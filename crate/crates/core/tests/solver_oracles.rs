//! Cross-checks of the ADMM solvers against closed forms and long-run
//! projected-subgradient references, plus solver-level invariants.

mod common;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specgraph::graphs::{generate_er, AdjacencyMatrix};
use specgraph::signals::{
    sample_covariance, sample_signals, true_covariance, CovarianceEstimate, FilterSpec,
    Provenance,
};
use specgraph::solvers::{
    barrier_objective, solve_logspect, solve_rlogspect, solve_rspect, SolverConfig,
};

fn tight(max_iters: usize) -> SolverConfig {
    SolverConfig {
        eps_primal: 1e-9,
        eps_dual: 1e-9,
        max_iters,
        ..SolverConfig::default()
    }
}

/// Best subgradient value over a small grid of step scales; still fully
/// independent of the ADMM path.
fn rlogspect_oracle(c: &DMatrix<f64>, alpha: f64, delta: f64, iters: usize) -> f64 {
    [0.1, 0.02, 0.005, 0.001]
        .iter()
        .map(|&scale| common::rlogspect_subgradient_reference(c, alpha, delta, iters, scale))
        .fold(f64::INFINITY, f64::min)
}

fn healthy_er(m: usize, p: f64, seed: u64) -> AdjacencyMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = generate_er(m, p, &mut rng).unwrap();
        if g.degrees().min() >= 1.0 {
            return g;
        }
    }
}

#[test]
fn subgradient_reference_matches_closed_form_at_m2() {
    // validates the oracle itself before it is used as a reference
    let (h11, h22) = (2.0f64, 0.5);
    let c = DMatrix::from_row_slice(2, 2, &[h11, 0.0, 0.0, h22]);
    for delta in [0.3, 1.0] {
        let expected_s = f64::min(1.0, delta / (2f64.sqrt() * (h11 - h22).abs()));
        let expected = 2.0 * expected_s - 2.0 * expected_s.ln();
        let oracle = rlogspect_oracle(&c, 1.0, delta, 400_000);
        assert!(
            (oracle - expected).abs() <= 1e-3 * expected.abs(),
            "delta {delta}: oracle {oracle} vs closed form {expected}"
        );
    }
}

#[test]
fn rlogspect_objective_matches_subgradient_reference_at_m4() {
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = healthy_er(4, 0.5, seed + 50);
        let x = sample_signals(&FilterSpec::Quadratic, &g, 80, &mut rng).unwrap();
        let cov = sample_covariance(&x).unwrap();
        let delta = 0.3 * cov.operator_norm();
        let cfg = SolverConfig {
            alpha: 1.0,
            delta,
            ..tight(400_000)
        };
        let admm = solve_rlogspect(&cov, &cfg).unwrap();
        let oracle = rlogspect_oracle(cov.matrix(), 1.0, delta, 1_000_000);
        let rel = (admm.objective - oracle).abs() / oracle.abs();
        assert!(
            rel <= 1e-3,
            "seed {seed}: admm {} vs oracle {oracle} (rel {rel:.2e})",
            admm.objective
        );
    }
}

#[test]
fn rspect_objective_matches_subgradient_reference_on_commuting_m4() {
    // commuting instance: exact covariance of a connected 4-node graph
    let g = healthy_er(4, 0.7, 3);
    let cov = true_covariance(&FilterSpec::Quadratic, &g).unwrap();
    let delta = 0.05 * cov.operator_norm();
    let admm = solve_rspect(&cov, delta, &tight(400_000)).unwrap();
    let oracle = [0.1, 0.02, 0.005, 0.001]
        .iter()
        .map(|&scale| {
            common::rspect_subgradient_reference(cov.matrix(), delta, 1_000_000, scale, 1e-6)
        })
        .fold(f64::INFINITY, f64::min);
    let rel = (admm.objective - oracle).abs() / oracle.abs();
    assert!(
        rel <= 1e-3,
        "admm {} vs oracle {oracle} (rel {rel:.2e})",
        admm.objective
    );
}

#[test]
fn scaling_law_at_m2() {
    let cov = CovarianceEstimate::new(
        DMatrix::from_row_slice(2, 2, &[1.7, 0.0, 0.0, 1.7]),
        Provenance::Exact,
    )
    .unwrap();
    let base = solve_rlogspect(
        &cov,
        &SolverConfig {
            alpha: 1.0,
            delta: 0.2,
            ..tight(200_000)
        },
    )
    .unwrap();
    for alpha in [0.5, 1.5, 2.0, 3.0] {
        let scaled = solve_rlogspect(
            &cov,
            &SolverConfig {
                alpha,
                delta: 0.2,
                ..tight(200_000)
            },
        )
        .unwrap();
        let gap = (scaled.s_hat.weight(0, 1) - alpha * base.s_hat.weight(0, 1)).abs();
        assert!(gap <= 1e-4, "alpha {alpha}: gap {gap}");
    }
}

#[test]
fn logspect_satisfies_kkt_identity_and_value_bound() {
    for (m, filter, alpha, seed) in [
        (5usize, FilterSpec::lowpass(), 1.0, 1u64),
        (8, FilterSpec::Quadratic, 0.5, 2),
        (8, FilterSpec::highpass(), 2.0, 3),
    ] {
        let g = healthy_er(m, 0.4, seed);
        let cov = true_covariance(&filter, &g).unwrap();
        let result = solve_logspect(&cov, alpha).unwrap();
        let target = alpha * m as f64;
        assert!(
            (result.s_hat.l11_norm() - target).abs() <= 0.01 * target,
            "m {m}: l11 {} vs {target}",
            result.s_hat.l11_norm()
        );
        let lower = target * (1.0 - alpha.ln());
        assert!(result.objective >= lower - 1e-6);
    }
}

#[test]
fn rlogspect_is_always_feasible() {
    // a finite objective comes back for every radius, arbitrarily small
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (m, n, delta_frac) in [(4usize, 30usize, 1e-3), (6, 60, 1e-2), (5, 40, 0.5)] {
        let g = healthy_er(m, 0.5, 11 + m as u64);
        let x = sample_signals(&FilterSpec::lowpass(), &g, n, &mut rng).unwrap();
        let cov = sample_covariance(&x).unwrap();
        let cfg = SolverConfig {
            alpha: 0.8,
            delta: delta_frac * cov.operator_norm(),
            max_iters: 60_000,
            ..SolverConfig::default()
        };
        let result = solve_rlogspect(&cov, &cfg).unwrap();
        assert!(result.objective.is_finite());
        assert!(result.s_hat.degrees().min() > 0.0);
    }
}

#[test]
fn fixed_budget_objective_matches_longer_reference() {
    // the objective at a fixed budget sits within 1e-4 relative of the best
    // objective over a 10x longer run
    for (m, seed) in [(6usize, 21u64), (10, 22)] {
        let g = healthy_er(m, 0.4, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_signals(&FilterSpec::Quadratic, &g, 500, &mut rng).unwrap();
        let cov = sample_covariance(&x).unwrap();
        let delta = 0.05 * cov.operator_norm();
        let budget = 8_000usize;
        let run = |iters: usize| {
            solve_rlogspect(
                &cov,
                &SolverConfig {
                    alpha: 1.0,
                    delta,
                    max_iters: iters,
                    eps_primal: 1e-12,
                    eps_dual: 1e-12,
                    ..SolverConfig::default()
                },
            )
            .unwrap()
        };
        let short = run(budget);
        let long = run(budget * 10);
        let best = long
            .objective_history
            .iter()
            .cloned()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let rel = (short.objective - best).abs() / best.abs();
        assert!(rel <= 1e-4, "m {m}: budget objective off by {rel:.2e}");
    }
}

#[test]
fn residuals_trend_down_near_convergence() {
    // 10-iteration moving medians of max(p, d) over the last 50 iterations
    // before convergence are non-increasing
    let g = healthy_er(5, 0.5, 31);
    let cov = true_covariance(&FilterSpec::Quadratic, &g).unwrap();
    let cfg = SolverConfig {
        alpha: 1.0,
        delta: 0.05 * cov.operator_norm(),
        ..SolverConfig::default()
    };
    let result = solve_rlogspect(&cov, &cfg).unwrap();
    assert!(result.converged);
    let history = &result.residual_history;
    assert!(history.len() >= 50);
    let tail: Vec<f64> = history[history.len() - 50..]
        .iter()
        .map(|&(p, d)| p.max(d))
        .collect();
    let medians: Vec<f64> = tail
        .windows(10)
        .map(|w| {
            let mut s = w.to_vec();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            0.5 * (s[4] + s[5])
        })
        .collect();
    for w in medians.windows(2) {
        assert!(
            w[1] <= w[0] * (1.0 + 1e-9),
            "moving median increased: {medians:?}"
        );
    }
}

#[test]
fn rspect_gate_is_consistent_with_delta_min() {
    // a noncommuting sample covariance at m = 5: infeasible just below the
    // certified radius, feasible just above
    let g = healthy_er(5, 0.5, 41);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let x = sample_signals(&FilterSpec::Quadratic, &g, 25, &mut rng).unwrap();
    let cov = sample_covariance(&x).unwrap();
    let dm = specgraph::feasibility::delta_min(&cov, 1e-11).unwrap();
    assert!(dm.value > 0.0);
    assert!(matches!(
        solve_rspect(&cov, 0.99 * dm.value, &SolverConfig::default()),
        Err(specgraph::Error::Infeasible { .. })
    ));
    let ok = solve_rspect(&cov, 1.01 * dm.value, &tight(200_000));
    assert!(ok.is_ok(), "{ok:?}");
}

#[test]
fn objective_definition_matches_result_field() {
    let g = healthy_er(5, 0.5, 51);
    let cov = true_covariance(&FilterSpec::lowpass(), &g).unwrap();
    let cfg = SolverConfig {
        alpha: 1.3,
        delta: 0.1 * cov.operator_norm(),
        max_iters: 50_000,
        ..SolverConfig::default()
    };
    let result = solve_rlogspect(&cov, &cfg).unwrap();
    let recomputed = barrier_objective(&result.s_hat, 1.3);
    assert!((result.objective - recomputed).abs() <= 1e-12 * recomputed.abs());
}

//! Infeasibility certification for the row-sum-normalized model and
//! computation of the smallest feasible commutator radius.
//!
//! A full-column-rank commutator edge matrix certifies that the normalized
//! model is infeasible for all radii below some positive threshold. The
//! operational quantity is `delta_min`: the smallest Frobenius commutator
//! norm attainable over valid adjacency matrices whose first row sums to
//! one. It is computed in upper-triangle coordinates, where the constraint
//! set is a simplex crossed with the nonnegative orthant and projection is
//! exact and cheap.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{pair_count, GraphEnsembleSpec};
use crate::linops::{assemble_commutator_edge_matrix, CommutatorOp};
use crate::proj::project_simplex_orthant;
use crate::signals::{sample_covariance, sample_signals, CovarianceEstimate, FilterSpec};

/// Which evidence backs a feasibility report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// Full column rank of the commutator edge matrix: a sufficient
    /// certificate of infeasibility for all small radii.
    RankCertificate,
    /// Only the numerical delta_min is available.
    DeltaMinOnly,
}

/// Feasibility diagnostics for one covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub m: usize,
    pub rank_anb: usize,
    pub full_column_rank: bool,
    pub delta_min: f64,
    pub certificate_kind: CertificateKind,
}

impl FeasibilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Numerical rank of the commutator edge matrix and whether it has full
/// column rank. Uses the standard SVD tolerance max_dim * sigma_max * eps
/// unless `tol` overrides it.
pub fn rank_certificate_with_tol(
    cov: &CovarianceEstimate,
    tol: Option<f64>,
) -> Result<(usize, bool)> {
    let op = CommutatorOp::new(cov)?;
    let a = assemble_commutator_edge_matrix(&op)?;
    let m = cov.node_count();
    let svd = a.svd(false, false);
    let sigma_max = svd.singular_values.max();
    let threshold = tol.unwrap_or_else(|| {
        let max_dim = (m * m).max(pair_count(m)) as f64;
        max_dim * sigma_max * f64::EPSILON
    });
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count();
    Ok((rank, rank == pair_count(m)))
}

/// [`rank_certificate_with_tol`] with the default tolerance.
pub fn rank_certificate(cov: &CovarianceEstimate) -> Result<(usize, bool)> {
    rank_certificate_with_tol(cov, None)
}

/// Result of the delta_min solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMinResult {
    /// Smallest commutator norm found (an upper bound on the true minimum,
    /// tight at convergence).
    pub value: f64,
    /// False when the iteration cap was reached before the gradient-mapping
    /// tolerance; `value` is then best-so-far.
    pub converged: bool,
    pub iterations: usize,
}

/// Options for the accelerated projected-gradient delta_min solver.
#[derive(Debug, Clone, Copy)]
pub struct DeltaMinOptions {
    /// Gradient-mapping tolerance on the unit-normalized problem.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for DeltaMinOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 60_000,
        }
    }
}

/// Smallest Frobenius commutator norm over valid adjacency matrices with
/// first row summing to one, by accelerated projected gradient on the
/// squared norm in upper-triangle coordinates.
///
/// The problem is solved on C / ||C|| and rescaled afterwards, which keeps
/// the gradient Lipschitz constant O(1) regardless of covariance scale.
pub fn delta_min(cov: &CovarianceEstimate, tol: f64) -> Result<DeltaMinResult> {
    delta_min_with(
        cov,
        &DeltaMinOptions {
            tol,
            ..DeltaMinOptions::default()
        },
    )
}

pub fn delta_min_with(cov: &CovarianceEstimate, opts: &DeltaMinOptions) -> Result<DeltaMinResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!(
            "delta_min tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let m = cov.node_count();
    if m < 2 {
        return Err(Error::Parameter(format!(
            "delta_min needs at least 2 nodes, got {m}"
        )));
    }
    let scale = cov.operator_norm();
    if scale == 0.0 {
        // the zero covariance commutes with everything
        return Ok(DeltaMinResult {
            value: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let op = CommutatorOp::from_matrix(cov.matrix() / scale)?;
    let a = assemble_commutator_edge_matrix(&op)?;
    let gram = a.transpose() * &a;
    let dim = pair_count(m);
    let split = m - 1;

    // Lipschitz constant of the gradient 2 * Gram * y via power iteration.
    let mut v = DVector::from_element(dim, (dim as f64).sqrt().recip());
    let mut lam_max: f64 = 0.0;
    for _ in 0..200 {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        lam_max = norm;
        v = w / norm;
    }
    let lipschitz = (2.0 * lam_max * 1.01).max(1e-12);
    let step = 1.0 / lipschitz;

    let value_of = |y: &DVector<f64>| -> f64 { (y.transpose() * (&gram * y))[(0, 0)].max(0.0) };

    // FISTA with function-value restart on the simplex-times-orthant set
    let mut y = DVector::from_element(dim, 0.0);
    for i in 0..split {
        y[i] = 1.0 / split as f64;
    }
    project_simplex_orthant(y.as_mut_slice(), split);
    let mut momentum = y.clone();
    let mut t: f64 = 1.0;
    let mut best_value = value_of(&y);
    let mut prev_value = best_value;
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..opts.max_iters {
        iterations = k + 1;
        let grad = (&gram * &momentum) * 2.0;
        let mut next = &momentum - &grad * step;
        project_simplex_orthant(next.as_mut_slice(), split);

        // gradient mapping at the momentum point
        let gm = (&momentum - &next).norm() * lipschitz;

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let mut candidate = &next + (&next - &y) * beta;
        project_simplex_orthant(candidate.as_mut_slice(), split);

        let value = value_of(&next);
        if value > prev_value {
            // restart momentum
            momentum = next.clone();
            t = 1.0;
        } else {
            momentum = candidate;
            t = t_next;
        }
        y = next;
        best_value = best_value.min(value);
        prev_value = value;

        if gm <= opts.tol {
            converged = true;
            break;
        }
    }

    Ok(DeltaMinResult {
        value: best_value.sqrt() * scale,
        converged,
        iterations,
    })
}

/// Full diagnostics: rank certificate plus delta_min.
pub fn feasibility_report(cov: &CovarianceEstimate, tol: f64) -> Result<FeasibilityReport> {
    let (rank_anb, full_column_rank) = rank_certificate(cov)?;
    let dm = delta_min(cov, tol)?;
    Ok(FeasibilityReport {
        m: cov.node_count(),
        rank_anb,
        full_column_rank,
        delta_min: dm.value,
        certificate_kind: if full_column_rank {
            CertificateKind::RankCertificate
        } else {
            CertificateKind::DeltaMinOnly
        },
    })
}

/// Random quadratic filter t1 S^2 + t2 S + t3 I with i.i.d. Gaussian
/// coefficients (mean zero, standard deviation `sigma`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomQuadraticFilter {
    pub sigma: f64,
}

impl Default for RandomQuadraticFilter {
    fn default() -> Self {
        Self { sigma: 2.0 }
    }
}

impl RandomQuadraticFilter {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "filter coefficient deviation must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<FilterSpec> {
        self.validate()?;
        let normal = Normal::new(0.0, self.sigma)
            .map_err(|e| Error::Parameter(format!("bad filter law: {e}")))?;
        let t1 = normal.sample(rng);
        let t2 = normal.sample(rng);
        let t3 = normal.sample(rng);
        Ok(FilterSpec::Polynomial {
            coeffs: vec![t3, t2, t1],
        })
    }
}

/// Monte-Carlo summary of how often the normalized model is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilitySummary {
    /// Fraction of trials with delta_min above the positivity threshold.
    pub frequency: f64,
    pub mean_delta_min: f64,
    pub trials: usize,
}

/// Threshold above which a numerical delta_min counts as positive.
pub const DELTA_MIN_POSITIVE_TOL: f64 = 1e-6;

/// Draw `trials` (graph, random filter, n signals) triples, compute
/// delta_min of each sample covariance, and report the frequency of
/// delta_min above `DELTA_MIN_POSITIVE_TOL` together with its mean. Trials
/// run in parallel, each on an RNG stream split deterministically from
/// `seed`.
pub fn infeasibility_frequency(
    ensemble: &GraphEnsembleSpec,
    law: &RandomQuadraticFilter,
    n_samples: usize,
    trials: usize,
    seed: u64,
) -> Result<InfeasibilitySummary> {
    if trials == 0 {
        return Err(Error::Parameter("need at least one trial".into()));
    }
    if n_samples == 0 {
        return Err(Error::Parameter("need at least one sample per trial".into()));
    }
    ensemble.validate()?;
    law.validate()?;

    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let graph = ensemble.generate_with(&mut rng)?;
            let filter = law.draw(&mut rng)?;
            let signals = sample_signals(&filter, &graph, n_samples, &mut rng)?;
            let cov = sample_covariance(&signals)?;
            let opts = DeltaMinOptions {
                tol: 1e-9,
                max_iters: 30_000,
            };
            Ok(delta_min_with(&cov, &opts)?.value)
        })
        .collect::<Result<_>>()?;

    let positive = values
        .iter()
        .filter(|&&v| v > DELTA_MIN_POSITIVE_TOL)
        .count();
    Ok(InfeasibilitySummary {
        frequency: positive as f64 / trials as f64,
        mean_delta_min: values.iter().sum::<f64>() / trials as f64,
        trials,
    })
}

//! Solvers for graph learning from stationary signals.
//!
//! The main entry point is [`solve_rlogspect`]: a linearized ADMM for
//!
//! ```text
//! min  ||S||_{1,1} - alpha 1^T log(S 1)
//! s.t. S symmetric, nonnegative, zero diagonal,
//!      ||C S - S C||_F <= delta
//! ```
//!
//! The problem is split as C S - S C = Z (ball-constrained slack) and
//! q = S 1 (positive degree slack). Both slack updates are closed form: Z is
//! a ball projection and q the positive root of a per-coordinate quadratic.
//! The S block is handled with a proximal linearization so its update is a
//! single projection onto the valid-adjacency set. Dual ascent and a
//! residual-balancing penalty update complete the iteration.
//!
//! [`solve_rspect`] reuses the same skeleton for the classical model that
//! minimizes ||S||_{1,1} with the first row sum pinned to one; its extra
//! constraint is absorbed into the projection (simplex on the first-row
//! block, clamp elsewhere). [`solve_logspect`] drives the robust solver with
//! a tiny radius to approximate the equality-constrained ideal model.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{delta_min, DeltaMinResult};
use crate::graphs::AdjacencyMatrix;
use crate::linops::CommutatorOp;
use crate::proj::project_simplex_orthant;
use crate::signals::{spectral_rank_normalize, CovarianceEstimate};

/// Degrees at or below this value send the barrier objective to +inf.
pub const DEGREE_FLOOR: f64 = 1e-300;

/// Iterations during which the penalty parameter may adapt. Residual
/// balancing keeps oscillating on degenerate instances (feasible sets with
/// empty interior), so after this window the penalty is frozen and the
/// fixed-penalty convergence theory applies from the current iterate.
pub const RHO_ADAPT_WINDOW: usize = 2_000;

/// Bounds on the adapted penalty. Unchecked halving can collapse the
/// penalty exponentially and the 1/rho terms then blow the iterate up.
pub const RHO_MIN: f64 = 1e-6;
pub const RHO_MAX: f64 = 1e6;

/// Hyperparameters of the linearized ADMM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Log-barrier weight, strictly positive.
    pub alpha: f64,
    /// Commutator ball radius, nonnegative (zero collapses the ball to
    /// {0}), in the units of the covariance handed to the solver.
    pub delta: f64,
    /// Initial penalty parameter.
    pub rho0: f64,
    /// Proximal step parameter; defaults to 1.05 (m + ||commutator||^2)
    /// computed on the unit-normalized covariance, the smallest safe margin
    /// over the convergence condition.
    pub tau: Option<f64>,
    pub max_iters: usize,
    /// Residual tolerances, measured on the unit-normalized problem.
    pub eps_primal: f64,
    pub eps_dual: f64,
    /// Double rho when the primal residual is 5x the dual one and halve it
    /// in the opposite case, during the first [`RHO_ADAPT_WINDOW`]
    /// iterations; the penalty is then frozen so the fixed-penalty
    /// convergence guarantee takes over.
    pub rho_adapt: bool,
    /// Weight of an optional Tikhonov term ridge * ||S||_F^2 added to the
    /// objective. The barrier objective depends on S only through its
    /// degrees, so covariances with repeated eigenvalues have a whole face
    /// of optima; a vanishing ridge selects the minimum-norm one, which
    /// spreads weight over the face instead of an arbitrary extreme point.
    /// Zero (the default) solves the unmodified model.
    pub ridge: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            delta: 0.0,
            rho0: 1.0,
            tau: None,
            max_iters: 50_000,
            eps_primal: 1e-5,
            eps_dual: 1e-5,
            rho_adapt: true,
            ridge: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Parameter(format!(
                "delta must be nonnegative, got {}",
                self.delta
            )));
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::Parameter(format!(
                "rho0 must be positive, got {}",
                self.rho0
            )));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        if !(self.eps_primal > 0.0 && self.eps_dual > 0.0) {
            return Err(Error::Parameter(
                "residual tolerances must be positive".into(),
            ));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Parameter(format!(
                "ridge must be nonnegative, got {}",
                self.ridge
            )));
        }
        Ok(())
    }
}

/// Primal and dual iterates of the linearized ADMM, exposed to observers.
/// Slack and dual variables are in the solver's unit-normalized covariance
/// units; `s` needs no rescaling.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Current graph iterate; always a valid adjacency matrix.
    pub s: DMatrix<f64>,
    /// Ball-constrained commutator slack, ||z||_F <= delta / ||C||.
    pub z: DMatrix<f64>,
    /// Positive degree slack.
    pub q: DVector<f64>,
    /// Dual matrix for the commutator constraint.
    pub lambda: DMatrix<f64>,
    /// Dual vector for the degree constraint.
    pub lambda2: DVector<f64>,
    pub rho: f64,
    pub iteration: usize,
    /// (primal, dual) residuals per iteration.
    pub residuals: Vec<(f64, f64)>,
}

/// Outcome of a solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    pub s_hat: AdjacencyMatrix,
    /// Model objective at `s_hat` (+inf sentinel when a degree hits zero).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective_history: Vec<f64>,
    pub residual_history: Vec<(f64, f64)>,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }

    /// Learned degree vector.
    pub fn degrees(&self) -> DVector<f64> {
        self.s_hat.degrees()
    }
}

/// ||S||_{1,1} - alpha sum_i log((S 1)_i), with a +inf sentinel when any
/// degree is at or below `DEGREE_FLOOR`.
pub fn barrier_objective(s: &AdjacencyMatrix, alpha: f64) -> f64 {
    barrier_objective_from_degrees(&s.degrees(), alpha)
}

fn barrier_objective_from_degrees(degrees: &DVector<f64>, alpha: f64) -> f64 {
    let mut total = 0.0;
    let mut barrier = 0.0;
    for &d in degrees.iter() {
        if d <= DEGREE_FLOOR {
            return f64::INFINITY;
        }
        total += d;
        barrier += d.ln();
    }
    total - alpha * barrier
}

/// Positive root of rho q^2 + (lambda2 - rho d) q - alpha = 0 per
/// coordinate: the degree-slack update.
fn update_q(out: &mut DVector<f64>, degrees: &DVector<f64>, lambda2: &DVector<f64>, rho: f64, alpha: f64) {
    let shift = 4.0 * alpha / rho;
    for i in 0..out.len() {
        let qt = degrees[i] - lambda2[i] / rho;
        out[i] = 0.5 * (qt + (qt * qt + shift).sqrt());
    }
}

fn frob_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn vec_dist(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric complete-graph start with every degree equal to alpha, the
/// unconstrained optimum of the barrier part.
fn initial_iterate(m: usize, alpha: f64) -> DMatrix<f64> {
    let w = alpha / (m as f64 - 1.0);
    DMatrix::from_fn(m, m, |i, j| if i == j { 0.0 } else { w })
}

fn divergence_error(state: &SolverState, p_res: f64, d_res: f64) -> Error {
    let tail = state.residuals.len().saturating_sub(50);
    Error::Divergence {
        iteration: state.iteration,
        p_res,
        d_res,
        trace: state.residuals[tail..].to_vec(),
    }
}

/// Solve the robust log-barrier model. See the module docs for the
/// iteration; the observer runs once per iteration after the dual updates.
pub fn solve_rlogspect(cov: &CovarianceEstimate, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_rlogspect_observed(cov, cfg, |_| {})
}

pub fn solve_rlogspect_observed<F: FnMut(&SolverState)>(
    cov: &CovarianceEstimate,
    cfg: &SolverConfig,
    mut observe: F,
) -> Result<SolveResult> {
    cfg.validate()?;
    let m = cov.node_count();
    if m < 2 {
        return Err(Error::Parameter(format!("need at least 2 nodes, got {m}")));
    }
    // The commutator constraint is linear in C, so dividing C and delta by
    // ||C|| leaves the feasible set (and hence the problem) unchanged while
    // keeping the proximal parameter tau at most 1.05 (m + 4) regardless of
    // covariance scale. Iterates, duals, and residuals live in these
    // normalized units.
    let scale = if cov.operator_norm() > 0.0 {
        cov.operator_norm()
    } else {
        1.0
    };
    let op = CommutatorOp::from_matrix(cov.matrix() / scale)?;
    let tau = cfg
        .tau
        .unwrap_or_else(|| 1.05 * (m as f64 + op.operator_norm().powi(2)));
    let c = op.matrix();
    let c2 = op.matrix_squared();
    let alpha = cfg.alpha;
    let delta = cfg.delta / scale;

    let mut state = SolverState {
        s: initial_iterate(m, alpha),
        z: DMatrix::zeros(m, m),
        q: DVector::zeros(m),
        lambda: DMatrix::zeros(m, m),
        lambda2: DVector::zeros(m),
        rho: cfg.rho0,
        iteration: 0,
        residuals: Vec::new(),
    };

    // workspace
    let mut cs = c * &state.s;
    let mut sc = &state.s * c;
    let mut comm = &cs - &sc;
    let mut degrees = state.s.column_sum();
    let mut cs_new = DMatrix::zeros(m, m);
    let mut sc_new = DMatrix::zeros(m, m);
    let mut comm_new = DMatrix::zeros(m, m);
    let mut s_new = DMatrix::zeros(m, m);
    let mut grad = DMatrix::zeros(m, m);
    let mut csc = DMatrix::zeros(m, m);
    let mut c2s = DMatrix::zeros(m, m);
    let mut sc2 = DMatrix::zeros(m, m);
    let mut cz = DMatrix::zeros(m, m);
    let mut zc = DMatrix::zeros(m, m);
    let mut clam = DMatrix::zeros(m, m);
    let mut lamc = DMatrix::zeros(m, m);

    let mut objective_history = Vec::new();
    let mut converged = false;
    let (mut p_res, mut d_res) = (f64::INFINITY, f64::INFINITY);

    for k in 0..cfg.max_iters {
        let rho = state.rho;

        // Z step: ball projection of the shifted commutator
        {
            let zs = state.z.as_mut_slice();
            for (dst, (co, la)) in zs
                .iter_mut()
                .zip(comm.as_slice().iter().zip(state.lambda.as_slice()))
            {
                *dst = co + la / rho;
            }
        }
        let znorm = state.z.norm();
        if znorm > delta {
            state.z *= delta / znorm;
        }

        // q step: positive root of the barrier optimality condition
        update_q(&mut state.q, &degrees, &state.lambda2, rho, alpha);

        // S step: proximal-linearized objective, then projection
        c.mul_to(&state.z, &mut cz);
        state.z.mul_to(c, &mut zc);
        c.mul_to(&state.lambda, &mut clam);
        state.lambda.mul_to(c, &mut lamc);
        c2.mul_to(&state.s, &mut c2s);
        state.s.mul_to(c2, &mut sc2);
        cs.mul_to(c, &mut csc);
        {
            let gs = grad.as_mut_slice();
            for idx in 0..gs.len() {
                let i = idx % m;
                gs[idx] = 1.0 + clam.as_slice()[idx] - lamc.as_slice()[idx]
                    - state.lambda2[i]
                    + 2.0 * cfg.ridge * state.s.as_slice()[idx]
                    + rho
                        * (c2s.as_slice()[idx] + sc2.as_slice()[idx] - 2.0 * csc.as_slice()[idx]
                            + zc.as_slice()[idx]
                            - cz.as_slice()[idx]
                            + (degrees[i] - state.q[i]));
            }
        }
        let step = 1.0 / (rho * tau);
        for i in 0..m {
            s_new[(i, i)] = 0.0;
            for j in (i + 1)..m {
                let tij = state.s[(i, j)] - step * grad[(i, j)];
                let tji = state.s[(j, i)] - step * grad[(j, i)];
                let v = f64::max(0.0, 0.5 * (tij + tji));
                s_new[(i, j)] = v;
                s_new[(j, i)] = v;
            }
        }

        // dual ascent
        c.mul_to(&s_new, &mut cs_new);
        s_new.mul_to(c, &mut sc_new);
        {
            let cm = comm_new.as_mut_slice();
            for (dst, (a, b)) in cm
                .iter_mut()
                .zip(cs_new.as_slice().iter().zip(sc_new.as_slice()))
            {
                *dst = a - b;
            }
        }
        let degrees_new = s_new.column_sum();
        {
            let ls = state.lambda.as_mut_slice();
            for (dst, (co, zi)) in ls
                .iter_mut()
                .zip(comm_new.as_slice().iter().zip(state.z.as_slice()))
            {
                *dst += rho * (co - zi);
            }
        }
        for i in 0..m {
            state.lambda2[i] += rho * (state.q[i] - degrees_new[i]);
        }

        // residuals: primal feasibility of the two splits, dual movement of
        // the constraint image of S
        p_res = (frob_dist(&state.z, &comm_new).powi(2)
            + vec_dist(&state.q, &degrees_new).powi(2))
        .sqrt();
        d_res = rho
            * (frob_dist(&comm_new, &comm).powi(2) + vec_dist(&degrees_new, &degrees).powi(2))
                .sqrt();

        std::mem::swap(&mut state.s, &mut s_new);
        std::mem::swap(&mut cs, &mut cs_new);
        std::mem::swap(&mut sc, &mut sc_new);
        std::mem::swap(&mut comm, &mut comm_new);
        degrees = degrees_new;
        state.iteration = k + 1;
        state.residuals.push((p_res, d_res));
        objective_history.push(barrier_objective_from_degrees(&degrees, alpha));

        if !p_res.is_finite() || !d_res.is_finite() {
            return Err(divergence_error(&state, p_res, d_res));
        }
        observe(&state);

        if p_res < cfg.eps_primal && d_res < cfg.eps_dual {
            converged = true;
            break;
        }
        if cfg.rho_adapt && k < RHO_ADAPT_WINDOW {
            if p_res > 5.0 * d_res {
                state.rho = (state.rho * 2.0).min(RHO_MAX);
            } else if d_res > 5.0 * p_res {
                state.rho = (state.rho / 2.0).max(RHO_MIN);
            }
        }
    }

    let s_hat = AdjacencyMatrix::from_dense(&state.s)?;
    Ok(SolveResult {
        objective: barrier_objective(&s_hat, alpha),
        s_hat,
        iterations: state.iteration,
        converged,
        primal_residual: p_res,
        dual_residual: d_res,
        objective_history,
        residual_history: state.residuals,
    })
}

/// Solve the ideal log-barrier model with the exact commutation constraint:
/// the robust solver with the ball collapsed to {0}, which is the same code
/// path with Z pinned at zero. The covariance must be exact. Commuting with
/// C is the same as commuting with any injective function of C, so the
/// constraint is posed on the rank-flattened spectrum, which conditions the
/// dual problem without changing the feasible set.
pub fn solve_logspect(cov: &CovarianceEstimate, alpha: f64) -> Result<SolveResult> {
    solve_logspect_with(cov, alpha, &SolverConfig::default())
}

pub fn solve_logspect_with(
    cov: &CovarianceEstimate,
    alpha: f64,
    base: &SolverConfig,
) -> Result<SolveResult> {
    if !cov.is_exact() {
        return Err(Error::Parameter(
            "the ideal model needs an exact covariance; use solve_rlogspect for samples".into(),
        ));
    }
    let flattened = spectral_rank_normalize(cov)?;
    let cfg = SolverConfig {
        alpha,
        delta: 0.0,
        ..*base
    };
    solve_rlogspect(&flattened, &cfg)
}

/// Solve the classical row-sum-normalized model
///
/// ```text
/// min  ||S||_{1,1}
/// s.t. S valid adjacency, (S 1)_1 = 1, ||C S - S C||_F <= delta
/// ```
///
/// after checking `delta` against the smallest feasible radius; an
/// infeasible radius is reported as an error carrying that certificate.
/// `objective` in the result is ||S_hat||_{1,1}.
pub fn solve_rspect(
    cov: &CovarianceEstimate,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let dm = delta_min(cov, 1e-10)?;
    solve_rspect_gated(cov, delta, cfg, Some(dm))
}

/// [`solve_rspect`] without the feasibility gate, for callers that already
/// know the radius is feasible (for instance the ideal-model driver, whose
/// exact covariance commutes with the true graph).
pub fn solve_rspect_unchecked(
    cov: &CovarianceEstimate,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    solve_rspect_gated(cov, delta, cfg, None)
}

/// Ideal-model driver: the classical model with exact covariance and the
/// exact commutation constraint (degenerate ball), posed on the
/// rank-flattened spectrum as in [`solve_logspect`].
pub fn solve_spect_ideal(cov: &CovarianceEstimate, cfg: &SolverConfig) -> Result<SolveResult> {
    if !cov.is_exact() {
        return Err(Error::Parameter(
            "the ideal model needs an exact covariance".into(),
        ));
    }
    solve_rspect_unchecked(&spectral_rank_normalize(cov)?, 0.0, cfg)
}

fn solve_rspect_gated(
    cov: &CovarianceEstimate,
    delta: f64,
    cfg: &SolverConfig,
    gate: Option<DeltaMinResult>,
) -> Result<SolveResult> {
    cfg.validate()?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    if let Some(dm) = gate {
        if delta < dm.value {
            return Err(Error::Infeasible {
                delta,
                delta_min: dm.value,
            });
        }
    }
    let m = cov.node_count();
    if m < 2 {
        return Err(Error::Parameter(format!("need at least 2 nodes, got {m}")));
    }
    // same unit-norm change of variables as the log-barrier solver
    let scale = if cov.operator_norm() > 0.0 {
        cov.operator_norm()
    } else {
        1.0
    };
    let op = CommutatorOp::from_matrix(cov.matrix() / scale)?;
    let delta = delta / scale;
    let tau = cfg
        .tau
        .unwrap_or_else(|| (1.05 * op.operator_norm().powi(2)).max(1.0));
    let c = op.matrix();
    let c2 = op.matrix_squared();
    // Residual balancing limit-cycles on this splitting (the penalty keeps
    // crossing the 5x band), so the penalty stays at rho0 here.
    let rho = cfg.rho0;

    // start from the uniform feasible first row
    let mut s = DMatrix::zeros(m, m);
    for j in 1..m {
        s[(0, j)] = 1.0 / (m as f64 - 1.0);
        s[(j, 0)] = 1.0 / (m as f64 - 1.0);
    }
    let mut z = DMatrix::zeros(m, m);
    let mut lambda = DMatrix::zeros(m, m);

    let mut cs = c * &s;
    let mut sc = &s * c;
    let mut comm = &cs - &sc;
    let mut s_new = DMatrix::zeros(m, m);
    let mut grad = DMatrix::zeros(m, m);
    let mut csc = DMatrix::zeros(m, m);
    let mut c2s = DMatrix::zeros(m, m);
    let mut sc2 = DMatrix::zeros(m, m);
    let mut cz = DMatrix::zeros(m, m);
    let mut zc = DMatrix::zeros(m, m);
    let mut clam = DMatrix::zeros(m, m);
    let mut lamc = DMatrix::zeros(m, m);
    let mut cs_new = DMatrix::zeros(m, m);
    let mut sc_new = DMatrix::zeros(m, m);
    let mut comm_new = DMatrix::zeros(m, m);
    let mut upper = vec![0.0; m * (m - 1) / 2];

    let mut residual_history: Vec<(f64, f64)> = Vec::new();
    let mut objective_history = Vec::new();
    let mut converged = false;
    let (mut p_res, mut d_res) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;

    for k in 0..cfg.max_iters {
        // Z step
        {
            let zs = z.as_mut_slice();
            for (dst, (co, la)) in zs
                .iter_mut()
                .zip(comm.as_slice().iter().zip(lambda.as_slice()))
            {
                *dst = co + la / rho;
            }
        }
        let znorm = z.norm();
        if znorm > delta {
            z *= delta / znorm;
        }

        // S step
        c.mul_to(&z, &mut cz);
        z.mul_to(c, &mut zc);
        c.mul_to(&lambda, &mut clam);
        lambda.mul_to(c, &mut lamc);
        c2.mul_to(&s, &mut c2s);
        s.mul_to(c2, &mut sc2);
        cs.mul_to(c, &mut csc);
        {
            let gs = grad.as_mut_slice();
            for idx in 0..gs.len() {
                gs[idx] = 1.0 + clam.as_slice()[idx] - lamc.as_slice()[idx]
                    + 2.0 * cfg.ridge * s.as_slice()[idx]
                    + rho
                        * (c2s.as_slice()[idx] + sc2.as_slice()[idx]
                            - 2.0 * csc.as_slice()[idx]
                            + zc.as_slice()[idx]
                            - cz.as_slice()[idx]);
            }
        }
        let step = 1.0 / (rho * tau);
        let mut idx = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                let tij = s[(i, j)] - step * grad[(i, j)];
                let tji = s[(j, i)] - step * grad[(j, i)];
                upper[idx] = 0.5 * (tij + tji);
                idx += 1;
            }
        }
        // first-row block onto the simplex, everything else clamped
        project_simplex_orthant(&mut upper, m - 1);
        idx = 0;
        for i in 0..m {
            s_new[(i, i)] = 0.0;
            for j in (i + 1)..m {
                s_new[(i, j)] = upper[idx];
                s_new[(j, i)] = upper[idx];
                idx += 1;
            }
        }

        c.mul_to(&s_new, &mut cs_new);
        s_new.mul_to(c, &mut sc_new);
        {
            let cm = comm_new.as_mut_slice();
            for (dst, (a, b)) in cm
                .iter_mut()
                .zip(cs_new.as_slice().iter().zip(sc_new.as_slice()))
            {
                *dst = a - b;
            }
        }
        {
            let ls = lambda.as_mut_slice();
            for (dst, (co, zi)) in ls
                .iter_mut()
                .zip(comm_new.as_slice().iter().zip(z.as_slice()))
            {
                *dst += rho * (co - zi);
            }
        }

        p_res = frob_dist(&z, &comm_new);
        d_res = rho * frob_dist(&comm_new, &comm);

        std::mem::swap(&mut s, &mut s_new);
        std::mem::swap(&mut cs, &mut cs_new);
        std::mem::swap(&mut sc, &mut sc_new);
        std::mem::swap(&mut comm, &mut comm_new);
        iterations = k + 1;
        residual_history.push((p_res, d_res));
        objective_history.push(s.as_slice().iter().map(|v| v.abs()).sum::<f64>());

        if !p_res.is_finite() || !d_res.is_finite() {
            let tail = residual_history.len().saturating_sub(50);
            return Err(Error::Divergence {
                iteration: iterations,
                p_res,
                d_res,
                trace: residual_history[tail..].to_vec(),
            });
        }
        if p_res < cfg.eps_primal && d_res < cfg.eps_dual {
            converged = true;
            break;
        }
    }

    let s_hat = AdjacencyMatrix::from_dense(&s)?;
    Ok(SolveResult {
        objective: s_hat.l11_norm(),
        s_hat,
        iterations,
        converged,
        primal_residual: p_res,
        dual_residual: d_res,
        objective_history,
        residual_history,
    })
}

/// Thresholded-correlation baseline: an edge wherever
/// |C_ij| / sqrt(C_ii C_jj) meets the threshold.
pub fn correlation_baseline(
    cov: &CovarianceEstimate,
    threshold: f64,
) -> Result<AdjacencyMatrix> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::Parameter(format!(
            "correlation threshold must be nonnegative, got {threshold}"
        )));
    }
    let c = cov.matrix();
    let m = cov.node_count();
    for i in 0..m {
        if c[(i, i)] <= 0.0 {
            return Err(Error::Validation(format!(
                "node {i} has non-positive variance {}",
                c[(i, i)]
            )));
        }
    }
    let mut upper = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            let corr = c[(i, j)].abs() / (c[(i, i)] * c[(j, j)]).sqrt();
            upper.push(if corr >= threshold { 1.0 } else { 0.0 });
        }
    }
    AdjacencyMatrix::from_upper(m, upper)
}

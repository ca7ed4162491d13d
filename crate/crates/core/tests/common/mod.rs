//! Shared reference implementations for integration tests.
//!
//! Everything here is deliberately independent of the solver code paths it
//! is used to check: projections, commutators, and objectives are recomputed
//! from scratch with the most literal formulas available.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

/// Literal projection onto { symmetric, zero diagonal, nonnegative }.
pub fn project_valid_reference(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                out[(i, j)] = f64::max(0.0, 0.5 * (x[(i, j)] + x[(j, i)]));
            }
        }
    }
    out
}

/// Sort-based projection onto { x >= 0, sum x = 1 }.
fn project_simplex_reference(x: &mut [f64]) {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Projection onto valid adjacency matrices with first row summing to one.
pub fn project_normalized_reference(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows();
    let mut upper = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            upper.push(0.5 * (x[(i, j)] + x[(j, i)]));
        }
    }
    project_simplex_reference(&mut upper[..m - 1]);
    for v in upper.iter_mut().skip(m - 1) {
        *v = v.max(0.0);
    }
    let mut out = DMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        for j in (i + 1)..m {
            out[(i, j)] = upper[k];
            out[(j, i)] = upper[k];
            k += 1;
        }
    }
    out
}

fn commutator(c: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    c * s - s * c
}

fn commutator_adjoint(c: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    c * y - y * c
}

/// Penalized objective of the robust log-barrier model:
/// sum S + barrier + mu * max(0, ||CS - SC||_F - delta).
fn rlogspect_penalized_value(
    c: &DMatrix<f64>,
    s: &DMatrix<f64>,
    alpha: f64,
    delta: f64,
    mu: f64,
) -> f64 {
    let m = s.nrows();
    let mut total = 0.0;
    let mut barrier = 0.0;
    for i in 0..m {
        let mut d = 0.0;
        for j in 0..m {
            total += s[(i, j)];
            d += s[(i, j)];
        }
        if d <= 1e-12 {
            return f64::INFINITY;
        }
        barrier += d.ln();
    }
    let violation = (commutator(c, s).norm() - delta).max(0.0);
    total - alpha * barrier + mu * violation
}

/// Long-run projected subgradient on the exactly-penalized ball-projected
/// formulation of the robust log-barrier model. Returns the best penalized
/// value seen, which at convergence equals the constrained optimum.
///
/// The penalty weight 2 alpha m / delta + 10 exceeds the optimal multiplier
/// of the ball constraint (which is at most alpha m / delta), so the penalty
/// is exact. The covariance and radius are rescaled to unit spectral norm
/// first, which changes nothing about the problem but keeps subgradient
/// magnitudes comparable across instances.
pub fn rlogspect_subgradient_reference(
    c: &DMatrix<f64>,
    alpha: f64,
    delta: f64,
    iters: usize,
    step_scale: f64,
) -> f64 {
    let m = c.nrows();
    let scale = c
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1e-300);
    let c = c / scale;
    let delta = delta / scale;
    let mu = 2.0 * alpha * m as f64 / delta + 10.0;
    let w0 = alpha / (m as f64 - 1.0);
    let mut s = DMatrix::from_fn(m, m, |i, j| if i == j { 0.0 } else { w0 });
    let mut best = rlogspect_penalized_value(&c, &s, alpha, delta, mu);

    for k in 0..iters {
        let mut grad = DMatrix::zeros(m, m);
        for i in 0..m {
            let d: f64 = s.row(i).sum();
            // surrogate slope where the true barrier is infinite
            let g = 1.0 - alpha / d.max(1e-6);
            for j in 0..m {
                grad[(i, j)] = g;
            }
        }
        let r = commutator(&c, &s);
        let rnorm = r.norm();
        if rnorm > delta && rnorm > 0.0 {
            grad += commutator_adjoint(&c, &(r / rnorm)) * mu;
        }
        let step = step_scale / ((k + 1) as f64).sqrt();
        s = project_valid_reference(&(&s - grad * step));
        let value = rlogspect_penalized_value(&c, &s, alpha, delta, mu);
        if value < best {
            best = value;
        }
    }
    best
}

/// Long-run projected subgradient for the classical row-sum-normalized
/// model with an exact penalty on the commutator ball. The penalty weight
/// is doubled until the best iterate is feasible to within `feas_tol`.
pub fn rspect_subgradient_reference(
    c: &DMatrix<f64>,
    delta: f64,
    iters: usize,
    step_scale: f64,
    feas_tol: f64,
) -> f64 {
    let m = c.nrows();
    let scale = c
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
        .max(1e-300);
    let c = &(c / scale);
    let delta = delta / scale;
    let mut mu = 10.0 * m as f64;
    for _ in 0..8 {
        let mut s = {
            let w = 1.0 / (m as f64 - 1.0);
            let mut s = DMatrix::zeros(m, m);
            for j in 1..m {
                s[(0, j)] = w;
                s[(j, 0)] = w;
            }
            s
        };
        let value_of = |s: &DMatrix<f64>| -> (f64, f64) {
            let total: f64 = s.iter().sum();
            let violation = (commutator(c, s).norm() - delta).max(0.0);
            (total + mu * violation, violation)
        };
        let mut best = value_of(&s);
        for k in 0..iters {
            let mut grad = DMatrix::from_element(m, m, 1.0);
            let r = commutator(c, &s);
            let rnorm = r.norm();
            if rnorm > delta && rnorm > 0.0 {
                grad += commutator_adjoint(c, &(r / rnorm)) * mu;
            }
            let step = step_scale / ((k + 1) as f64).sqrt();
            s = project_normalized_reference(&(&s - grad * step));
            let value = value_of(&s);
            if value.0 < best.0 {
                best = value;
            }
        }
        if best.1 <= feas_tol {
            return best.0;
        }
        mu *= 2.0;
    }
    f64::NAN
}

/// Random symmetric matrix with entries of the given half-width.
pub fn random_symmetric<R: Rng>(m: usize, half_width: f64, rng: &mut R) -> DMatrix<f64> {
    let x = DMatrix::from_fn(m, m, |_, _| (rng.random::<f64>() * 2.0 - 1.0) * half_width);
    0.5 * (&x + x.transpose())
}

//! Graph filters, stationary signal synthesis, covariance estimation, and
//! the commutator-radius schedules used by the robust solvers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::AdjacencyMatrix;

/// A graph filter h(S), applied through the eigendecomposition of S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    /// exp(t S) with t > 0; the named low-pass filter is exp(S/2).
    LowpassExp { t: f64 },
    /// exp(-t S) with t > 0; the named high-pass filter is exp(-S).
    HighpassExp { t: f64 },
    /// S^2 + S + I, neither low- nor high-pass.
    Quadratic,
    /// sum_i coeffs[i] S^i, constant term first.
    Polynomial { coeffs: Vec<f64> },
}

impl FilterSpec {
    /// The named low-pass filter exp(S/2).
    pub fn lowpass() -> Self {
        FilterSpec::LowpassExp { t: 0.5 }
    }

    /// The named high-pass filter exp(-S).
    pub fn highpass() -> Self {
        FilterSpec::HighpassExp { t: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FilterSpec::LowpassExp { t } | FilterSpec::HighpassExp { t } => {
                if !t.is_finite() {
                    return Err(Error::Parameter(format!("filter parameter t = {t}")));
                }
            }
            FilterSpec::Quadratic => {}
            FilterSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::Parameter(
                        "polynomial filter needs at least one coefficient".into(),
                    ));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Parameter("non-finite polynomial coefficient".into()));
                }
            }
        }
        Ok(())
    }

    /// Scalar action on an eigenvalue.
    fn response(&self, lambda: f64) -> f64 {
        match self {
            FilterSpec::LowpassExp { t } => (t * lambda).exp(),
            FilterSpec::HighpassExp { t } => (-t * lambda).exp(),
            FilterSpec::Quadratic => lambda * lambda + lambda + 1.0,
            FilterSpec::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, &c| acc * lambda + c),
        }
    }

    /// Compact label used in file headers and result rows.
    pub fn label(&self) -> String {
        match self {
            FilterSpec::LowpassExp { t } => format!("lowpass-exp(t={t})"),
            FilterSpec::HighpassExp { t } => format!("highpass-exp(t={t})"),
            FilterSpec::Quadratic => "quadratic".to_string(),
            FilterSpec::Polynomial { coeffs } => format!("poly{coeffs:?}"),
        }
    }
}

/// How a covariance estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// The exact covariance h(S)^2 of the generative model.
    Exact,
    /// A sample covariance from n i.i.d. signals.
    Sample { n: usize },
}

/// A symmetric positive-semidefinite covariance matrix with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    c: DMatrix<f64>,
    provenance: Provenance,
    op_norm: f64,
}

impl CovarianceEstimate {
    /// Validate symmetry and approximate positive semidefiniteness, then
    /// store the symmetrized matrix. The spectral check tolerates a smallest
    /// eigenvalue down to -1e-8 on the scale of the largest.
    pub fn new(c: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::Shape(format!(
                "covariance must be square, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        let scale = c.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
        let asym = (&c - c.transpose()).iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if asym > 1e-9 * scale {
            return Err(Error::Validation(format!(
                "covariance is asymmetric: max |C - C^T| = {asym:.3e}"
            )));
        }
        let sym = 0.5 * (&c + c.transpose());
        let eigvals = symmetric_eigenvalues(&sym)?;
        let lambda_min = eigvals.min();
        let lambda_max = eigvals.max();
        if lambda_min < -1e-8 * lambda_max.abs().max(1.0) {
            return Err(Error::Validation(format!(
                "covariance is not positive semidefinite: smallest eigenvalue {lambda_min:.3e}"
            )));
        }
        let op_norm = lambda_min.abs().max(lambda_max.abs());
        Ok(Self {
            c: sym,
            provenance,
            op_norm,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_exact(&self) -> bool {
        self.provenance == Provenance::Exact
    }

    pub fn node_count(&self) -> usize {
        self.c.nrows()
    }

    /// Spectral norm max |eigenvalue|, cached at construction.
    pub fn operator_norm(&self) -> f64 {
        self.op_norm
    }
}

fn symmetric_eigen(x: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(x.clone(), f64::EPSILON, 0).ok_or_else(|| {
        Error::Numerical(format!(
            "symmetric eigendecomposition failed on a {0}x{0} matrix with max |entry| {1:.3e}",
            x.nrows(),
            x.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
        ))
    })
}

pub(crate) fn symmetric_eigenvalues(x: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(symmetric_eigen(x)?.eigenvalues)
}

/// Apply a graph filter: S = U diag(lambda) U^T gives
/// h(S) = U diag(h(lambda)) U^T, symmetrized after reconstruction.
pub fn apply_filter(filter: &FilterSpec, g: &AdjacencyMatrix) -> Result<DMatrix<f64>> {
    filter.validate()?;
    let eig = symmetric_eigen(&g.to_dense())?;
    let responses = eig.eigenvalues.map(|l| filter.response(l));
    Ok(reconstruct_symmetric(&eig.eigenvectors, &responses))
}

fn reconstruct_symmetric(u: &DMatrix<f64>, diag: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = u.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= diag[j];
    }
    let h = &scaled * u.transpose();
    0.5 * (&h + h.transpose())
}

/// Exact covariance C = h(S)^2 of signals x = h(S) w with white w. Shares
/// eigenvectors with S, so it commutes with S by construction.
pub fn true_covariance(filter: &FilterSpec, g: &AdjacencyMatrix) -> Result<CovarianceEstimate> {
    filter.validate()?;
    let eig = symmetric_eigen(&g.to_dense())?;
    let squared = eig.eigenvalues.map(|l| {
        let r = filter.response(l);
        r * r
    });
    CovarianceEstimate::new(
        reconstruct_symmetric(&eig.eigenvectors, &squared),
        Provenance::Exact,
    )
}

/// Filter given innovations: columns of the result are h(S) times the
/// corresponding columns of `w`.
pub fn signals_from_innovations(
    filter: &FilterSpec,
    g: &AdjacencyMatrix,
    w: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if w.nrows() != g.node_count() {
        return Err(Error::Shape(format!(
            "innovations have {} rows, graph has {} nodes",
            w.nrows(),
            g.node_count()
        )));
    }
    Ok(apply_filter(filter, g)? * w)
}

/// Draw n stationary signals x = h(S) w with w ~ N(0, I).
pub fn sample_signals<R: Rng>(
    filter: &FilterSpec,
    g: &AdjacencyMatrix,
    n: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if n < 1 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let m = g.node_count();
    let w = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(rng));
    signals_from_innovations(filter, g, &w)
}

/// Sample covariance C_n = (1/n) X X^T. The generative model has zero mean,
/// so no centering is applied; see [`sample_covariance_centered`].
pub fn sample_covariance(signals: &DMatrix<f64>) -> Result<CovarianceEstimate> {
    sample_covariance_centered(signals, false)
}

/// Sample covariance with optional empirical mean removal (still the 1/n
/// convention).
pub fn sample_covariance_centered(
    signals: &DMatrix<f64>,
    center: bool,
) -> Result<CovarianceEstimate> {
    let n = signals.ncols();
    if n == 0 || signals.nrows() == 0 {
        return Err(Error::Parameter("signal matrix is empty".into()));
    }
    let x = if center {
        let mean = signals.column_mean();
        let mut x = signals.clone();
        for mut col in x.column_iter_mut() {
            col -= &mean;
        }
        x
    } else {
        signals.clone()
    };
    let c = (&x * x.transpose()) / n as f64;
    CovarianceEstimate::new(c, Provenance::Sample { n })
}

/// Rule for the commutator radius delta_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaSchedule {
    /// c * sqrt(log n / n), the sub-Gaussian concentration rate.
    SqrtLogN { c: f64 },
    /// multiplier * ||C_n - C_inf||, for experiments where the true
    /// covariance is known.
    CovGap { multiplier: f64 },
}

impl DeltaSchedule {
    /// Evaluate the schedule at sample count `n`. `cov_gap` must be supplied
    /// for the [`DeltaSchedule::CovGap`] rule.
    pub fn evaluate(&self, n: f64, cov_gap: Option<f64>) -> Result<f64> {
        match *self {
            DeltaSchedule::SqrtLogN { c } => {
                if c < 0.0 || !c.is_finite() {
                    return Err(Error::Parameter(format!("schedule constant c = {c}")));
                }
                if !(n >= 2.0) {
                    return Err(Error::Parameter(format!(
                        "sqrt(log n / n) needs n >= 2, got n = {n}"
                    )));
                }
                Ok(c * (n.ln() / n).sqrt())
            }
            DeltaSchedule::CovGap { multiplier } => {
                if multiplier < 0.0 || !multiplier.is_finite() {
                    return Err(Error::Parameter(format!("multiplier = {multiplier}")));
                }
                let gap = cov_gap.ok_or_else(|| {
                    Error::Parameter("cov_gap schedule needs the covariance gap".into())
                })?;
                Ok(multiplier * gap)
            }
        }
    }
}

/// Replace the eigenvalues of an exact covariance by their (tie-preserving)
/// ranks, spread uniformly over [0, 1].
///
/// A matrix commutes with C exactly when it commutes with any injective
/// function of C, so this transform leaves the commutation constraint of
/// the ideal models unchanged while giving the commutator operator an
/// evenly spread spectrum. Sharp filters such as exp(-S) otherwise produce
/// exponentially clustered eigenvalues whose constraint directions are
/// numerically invisible. Eigenvalues closer than 1e-9 relative are treated
/// as one group, which keeps genuinely repeated eigenvalues together.
pub fn spectral_rank_normalize(cov: &CovarianceEstimate) -> Result<CovarianceEstimate> {
    let eig = symmetric_eigen(cov.matrix())?;
    let m = cov.node_count();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let tie_tol = 1e-9 * cov.operator_norm().max(1.0);
    let mut group = vec![0usize; m];
    let mut current = 0;
    for w in 1..m {
        if eig.eigenvalues[order[w]] - eig.eigenvalues[order[w - 1]] > tie_tol {
            current += 1;
        }
        group[order[w]] = current;
    }
    let groups = current + 1;
    let spread = if groups > 1 {
        1.0 / (groups - 1) as f64
    } else {
        0.0
    };
    let flattened = DVector::from_fn(m, |i, _| group[i] as f64 * spread);
    CovarianceEstimate::new(
        reconstruct_symmetric(&eig.eigenvectors, &flattened),
        cov.provenance(),
    )
}

/// Spectral-norm distance between two symmetric matrices.
pub fn covariance_gap(sample: &CovarianceEstimate, exact: &CovarianceEstimate) -> Result<f64> {
    if sample.node_count() != exact.node_count() {
        return Err(Error::Shape(format!(
            "covariances have {} and {} nodes",
            sample.node_count(),
            exact.node_count()
        )));
    }
    let diff = sample.matrix() - exact.matrix();
    let eigvals = symmetric_eigenvalues(&diff)?;
    Ok(eigvals.iter().fold(0.0f64, |a, &v| a.max(v.abs())))
}

/// Persist signals as dense CSV, one row per node, with a header recording
/// the dimensions, seed, and filter.
pub fn write_signals_csv<P: AsRef<Path>>(
    signals: &DMatrix<f64>,
    path: P,
    seed: u64,
    filter_label: &str,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# m={} n={} seed={} filter={}",
        signals.nrows(),
        signals.ncols(),
        seed,
        filter_label
    );
    for i in 0..signals.nrows() {
        let row: Vec<String> = (0..signals.ncols())
            .map(|j| format!("{}", signals[(i, j)]))
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read signals written by [`write_signals_csv`].
pub fn read_signals_csv<P: AsRef<Path>>(path: P) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = trimmed
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| err(line_no, format!("bad entry '{}': {e}", f.trim())))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(err(
                    line_no,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(1, "no data rows".to_string()));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

//! Binarization of weighted outputs, edge-recovery metrics, threshold
//! selection, and aggregation of trial statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::AdjacencyMatrix;

/// How weighted solver outputs are turned into binary graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinarizationStrategy {
    /// A fixed normalized threshold in [0, 1].
    Fixed { eps: f64 },
    /// Per-graph search for the threshold with the best F-measure.
    SearchingBased { grid_size: usize },
    /// One threshold fitted on training graphs, then applied unchanged.
    TrainingBased {
        train_set_size: usize,
        grid_size: usize,
    },
}

impl BinarizationStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BinarizationStrategy::Fixed { eps } => {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::Parameter(format!(
                        "threshold must lie in [0, 1], got {eps}"
                    )));
                }
            }
            BinarizationStrategy::SearchingBased { grid_size } => {
                if grid_size < 2 {
                    return Err(Error::Parameter(format!(
                        "grid needs at least 2 points, got {grid_size}"
                    )));
                }
            }
            BinarizationStrategy::TrainingBased {
                train_set_size,
                grid_size,
            } => {
                if grid_size < 2 {
                    return Err(Error::Parameter(format!(
                        "grid needs at least 2 points, got {grid_size}"
                    )));
                }
                if train_set_size == 0 {
                    return Err(Error::Parameter("training set cannot be empty".into()));
                }
            }
        }
        Ok(())
    }
}

/// Output of [`binarize`]; `input_was_zero` flags the degenerate all-zero
/// input, which maps to the empty graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Binarized {
    pub graph: AdjacencyMatrix,
    pub input_was_zero: bool,
}

/// Threshold rule: an edge wherever W_ij / max W >= eps. An all-zero input
/// returns the empty graph with a flag.
pub fn binarize(w: &AdjacencyMatrix, eps: f64) -> Result<Binarized> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!(
            "threshold must lie in [0, 1], got {eps}"
        )));
    }
    let max = w.max_weight();
    if max == 0.0 {
        return Ok(Binarized {
            graph: AdjacencyMatrix::zeros(w.node_count()),
            input_was_zero: true,
        });
    }
    let upper = w
        .upper()
        .iter()
        .map(|&v| if v / max >= eps { 1.0 } else { 0.0 })
        .collect();
    Ok(Binarized {
        graph: AdjacencyMatrix::from_upper(w.node_count(), upper)?,
        input_was_zero: false,
    })
}

/// Edge-recovery counts and rates over the strict upper triangle, so each
/// undirected edge is a single decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    pub f_measure: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Compare a learned graph against the truth; any nonzero weight counts as
/// an edge. F-measure, precision, and recall are zero when their
/// denominators vanish.
pub fn recovery_metrics(
    learned: &AdjacencyMatrix,
    truth: &AdjacencyMatrix,
) -> Result<RecoveryMetrics> {
    if learned.node_count() != truth.node_count() {
        return Err(Error::Shape(format!(
            "learned graph has {} nodes, truth has {}",
            learned.node_count(),
            truth.node_count()
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&l, &t) in learned.upper().iter().zip(truth.upper()) {
        match (l != 0.0, t != 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |num: usize, den: usize| if den > 0 { num as f64 / den as f64 } else { 0.0 };
    Ok(RecoveryMetrics {
        f_measure: ratio(2 * tp, 2 * tp + fn_ + fp),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        tp,
        fp,
        fn_,
    })
}

fn threshold_grid(grid_size: usize) -> impl Iterator<Item = f64> {
    (0..grid_size).map(move |g| g as f64 / (grid_size - 1) as f64)
}

/// Scan a uniform threshold grid on [0, 1] and return the threshold with
/// the best F-measure against the truth, ties broken toward the larger
/// (sparser) threshold.
pub fn search_threshold(
    w: &AdjacencyMatrix,
    truth: &AdjacencyMatrix,
    grid_size: usize,
) -> Result<(f64, RecoveryMetrics)> {
    if grid_size < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points, got {grid_size}"
        )));
    }
    let mut best: Option<(f64, RecoveryMetrics)> = None;
    for eps in threshold_grid(grid_size) {
        let b = binarize(w, eps)?;
        let metrics = recovery_metrics(&b.graph, truth)?;
        let better = match &best {
            None => true,
            Some((_, cur)) => metrics.f_measure >= cur.f_measure,
        };
        if better {
            best = Some((eps, metrics));
        }
    }
    Ok(best.expect("grid has at least two points"))
}

/// Fit one threshold on (weighted, truth) training pairs by maximizing the
/// mean F-measure over the grid, ties toward the larger threshold.
pub fn train_threshold(
    training_pairs: &[(AdjacencyMatrix, AdjacencyMatrix)],
    grid_size: usize,
) -> Result<f64> {
    if training_pairs.is_empty() {
        return Err(Error::Parameter("training set cannot be empty".into()));
    }
    if grid_size < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points, got {grid_size}"
        )));
    }
    let mut best = (0.0, f64::NEG_INFINITY);
    for eps in threshold_grid(grid_size) {
        let mut sum = 0.0;
        for (w, truth) in training_pairs {
            let b = binarize(w, eps)?;
            sum += recovery_metrics(&b.graph, truth)?.f_measure;
        }
        let mean = sum / training_pairs.len() as f64;
        if mean >= best.1 {
            best = (eps, mean);
        }
    }
    Ok(best.0)
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub f_measure: f64,
    pub precision: f64,
    pub recall: f64,
    pub objective: f64,
    /// |f_n - f*| / |f*| against an ideal-model reference, when available.
    pub objective_gap: Option<f64>,
    /// Spectral-norm covariance estimation error, when the truth is known.
    pub cov_gap: Option<f64>,
    pub delta: f64,
    pub converged: bool,
}

/// Interpolated quantiles and mean of one quantity across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Linear-interpolation quantile of an unsorted sample (errors on empty
/// input at the call sites).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

fn summarize(values: &[f64]) -> SummaryStats {
    SummaryStats {
        mean: values.iter().sum::<f64>() / values.len() as f64,
        median: quantile(values, 0.5),
        q1: quantile(values, 0.25),
        q3: quantile(values, 0.75),
    }
}

/// Per-configuration summary over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub trials: usize,
    pub f_measure: SummaryStats,
    pub precision: SummaryStats,
    pub recall: SummaryStats,
    pub objective: SummaryStats,
    pub objective_gap: Option<SummaryStats>,
    pub cov_gap: Option<SummaryStats>,
}

/// Mean, median, and quartiles of the recovery quantities across trials.
pub fn aggregate(reports: &[RecoveryReport]) -> Result<AggregateSummary> {
    if reports.is_empty() {
        return Err(Error::Parameter("cannot aggregate zero reports".into()));
    }
    let collect = |f: fn(&RecoveryReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    let gaps: Vec<f64> = reports.iter().filter_map(|r| r.objective_gap).collect();
    let cov_gaps: Vec<f64> = reports.iter().filter_map(|r| r.cov_gap).collect();
    Ok(AggregateSummary {
        trials: reports.len(),
        f_measure: summarize(&collect(|r| r.f_measure)),
        precision: summarize(&collect(|r| r.precision)),
        recall: summarize(&collect(|r| r.recall)),
        objective: summarize(&collect(|r| r.objective)),
        objective_gap: (!gaps.is_empty()).then(|| summarize(&gaps)),
        cov_gap: (!cov_gaps.is_empty()).then(|| summarize(&cov_gaps)),
    })
}

//! Graph data types, random-graph ensembles, the projection onto valid
//! adjacency matrices, and graph file I/O.
//!
//! The set of valid adjacency matrices is
//! `{ S : S = S^T, diag(S) = 0, S >= 0 }`. [`AdjacencyMatrix`] stores the
//! strict upper triangle only, so symmetry and the zero diagonal are
//! representation invariants rather than runtime checks; the dense matrix is
//! materialized on demand.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of unordered node pairs, m(m-1)/2.
pub fn pair_count(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Index of the pair (i, j) with `i < j` in the canonical layout
/// (0,1), (0,2), ..., (0,m-1), (1,2), ...
///
/// This row-major walk of the strict upper triangle coincides with the
/// column-major walk of the strict lower triangle, so the first `m - 1`
/// coordinates are exactly the edges incident to node 0.
pub fn edge_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

/// Symmetric nonnegative zero-diagonal weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    m: usize,
    upper: Vec<f64>,
}

impl AdjacencyMatrix {
    /// The empty graph on `m` nodes.
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            upper: vec![0.0; pair_count(m)],
        }
    }

    /// Build from the strict upper triangle in canonical pair order.
    pub fn from_upper(m: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != pair_count(m) {
            return Err(Error::Shape(format!(
                "upper triangle of an {m}-node graph has {} entries, got {}",
                pair_count(m),
                upper.len()
            )));
        }
        for (k, &w) in upper.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite weight {w} at pair index {k}"
                )));
            }
            if w < 0.0 {
                return Err(Error::Validation(format!(
                    "negative weight {w} at pair index {k}"
                )));
            }
        }
        Ok(Self { m, upper })
    }

    /// Build from a dense matrix, requiring exact symmetry and a zero
    /// diagonal. Use [`AdjacencyMatrix::from_dense_symmetrized`] for data
    /// that is only symmetric up to noise.
    pub fn from_dense(x: &DMatrix<f64>) -> Result<Self> {
        let m = square_dim(x)?;
        for i in 0..m {
            if x[(i, i)] != 0.0 {
                return Err(Error::Validation(format!(
                    "nonzero diagonal entry {} at ({i}, {i})",
                    x[(i, i)]
                )));
            }
            for j in (i + 1)..m {
                if x[(i, j)] != x[(j, i)] {
                    return Err(Error::Validation(format!(
                        "asymmetric entries at ({i}, {j}): {} vs {}",
                        x[(i, j)],
                        x[(j, i)]
                    )));
                }
            }
        }
        let mut upper = Vec::with_capacity(pair_count(m));
        for i in 0..m {
            for j in (i + 1)..m {
                upper.push(x[(i, j)]);
            }
        }
        Self::from_upper(m, upper)
    }

    /// Build from a dense matrix after averaging `X` with its transpose and
    /// dropping the diagonal. Negative averaged weights are still refused.
    pub fn from_dense_symmetrized(x: &DMatrix<f64>) -> Result<Self> {
        let m = square_dim(x)?;
        let mut upper = Vec::with_capacity(pair_count(m));
        for i in 0..m {
            for j in (i + 1)..m {
                upper.push(0.5 * (x[(i, j)] + x[(j, i)]));
            }
        }
        Self::from_upper(m, upper)
    }

    pub fn node_count(&self) -> usize {
        self.m
    }

    /// Strict upper triangle in canonical pair order.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn into_upper(self) -> Vec<f64> {
        self.upper
    }

    /// Weight of the (i, j) pair; zero on the diagonal.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            self.upper[edge_index(self.m, a, b)]
        }
    }

    /// Materialize the full symmetric matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.m, self.m);
        let mut k = 0;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                x[(i, j)] = self.upper[k];
                x[(j, i)] = self.upper[k];
                k += 1;
            }
        }
        x
    }

    /// Node degrees d = S 1.
    pub fn degrees(&self) -> DVector<f64> {
        let mut d = DVector::zeros(self.m);
        let mut k = 0;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                d[i] += self.upper[k];
                d[j] += self.upper[k];
                k += 1;
            }
        }
        d
    }

    /// Entrywise l1 norm; equals twice the upper-triangle weight sum.
    pub fn l11_norm(&self) -> f64 {
        2.0 * self.upper.iter().sum::<f64>()
    }

    /// Number of pairs with nonzero weight.
    pub fn edge_count(&self) -> usize {
        self.upper.iter().filter(|&&w| w != 0.0).count()
    }

    /// Largest edge weight (zero for the empty graph).
    pub fn max_weight(&self) -> f64 {
        self.upper.iter().cloned().fold(0.0, f64::max)
    }

    /// Iterate over nonzero edges as (i, j, w) with i < j.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.m;
        (0..m)
            .flat_map(move |i| ((i + 1)..m).map(move |j| (i, j)))
            .zip(self.upper.iter())
            .filter(|(_, &w)| w != 0.0)
            .map(|((i, j), &w)| (i, j, w))
    }

    pub fn is_binary(&self) -> bool {
        self.upper.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// True when the learned and this graph put edges on the same pairs.
    pub fn same_support(&self, other: &AdjacencyMatrix) -> bool {
        self.m == other.m
            && self
                .upper
                .iter()
                .zip(other.upper.iter())
                .all(|(&a, &b)| (a != 0.0) == (b != 0.0))
    }

    /// Multiply every weight by a nonnegative scalar.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Parameter(format!(
                "scale factor must be finite and nonnegative, got {c}"
            )));
        }
        Self::from_upper(self.m, self.upper.iter().map(|w| c * w).collect())
    }

    /// BFS connectivity over the nonzero support.
    pub fn is_connected(&self) -> bool {
        if self.m <= 1 {
            return true;
        }
        let mut seen = vec![false; self.m];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..self.m {
                if i != j && !seen[j] && self.weight(i, j) != 0.0 {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.m
    }
}

fn square_dim(x: &DMatrix<f64>) -> Result<usize> {
    if x.nrows() != x.ncols() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(x.nrows())
}

/// Euclidean projection onto the set of valid adjacency matrices:
/// off-diagonal entries become max(0, (X_ij + X_ji)/2), the diagonal is
/// dropped. Idempotent, and exact on inputs already in the set.
pub fn project_valid(x: &DMatrix<f64>) -> Result<AdjacencyMatrix> {
    let m = square_dim(x)?;
    let mut upper = Vec::with_capacity(pair_count(m));
    for i in 0..m {
        for j in (i + 1)..m {
            upper.push(f64::max(0.0, 0.5 * (x[(i, j)] + x[(j, i)])));
        }
    }
    AdjacencyMatrix::from_upper(m, upper)
}

/// Random-graph family of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GraphFamily {
    /// Independent edge between each pair with probability `p`, weight 1.
    Er { p: f64 },
    /// Preferential-attachment tree: new nodes attach to one prior node
    /// with probability proportional to its current degree.
    Ba,
}

/// A reproducible random-graph ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEnsembleSpec {
    #[serde(flatten)]
    pub family: GraphFamily,
    pub m: usize,
    pub seed: u64,
}

impl GraphEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Parameter(format!(
                "ensembles need at least 2 nodes, got m = {}",
                self.m
            )));
        }
        if let GraphFamily::Er { p } = self.family {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::Parameter(format!(
                    "edge probability must lie in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Draw the graph determined by the embedded seed.
    pub fn generate(&self) -> Result<AdjacencyMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.generate_with(&mut rng)
    }

    /// Draw a graph from an explicit RNG (pure given the RNG state).
    pub fn generate_with<R: Rng>(&self, rng: &mut R) -> Result<AdjacencyMatrix> {
        self.validate()?;
        match self.family {
            GraphFamily::Er { p } => generate_er(self.m, p, rng),
            GraphFamily::Ba => generate_ba(self.m, rng),
        }
    }
}

/// Erdos-Renyi draw: each pair gets an edge of weight 1 independently with
/// probability `p`.
pub fn generate_er<R: Rng>(m: usize, p: f64, rng: &mut R) -> Result<AdjacencyMatrix> {
    if m < 2 {
        return Err(Error::Parameter(format!("need m >= 2 nodes, got {m}")));
    }
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::Parameter(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let upper = (0..pair_count(m))
        .map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
        .collect();
    AdjacencyMatrix::from_upper(m, upper)
}

/// Preferential-attachment draw: two connected seed nodes, then each new
/// node attaches to exactly one existing node sampled proportionally to its
/// degree in the partial graph. The result is always a tree with m-1 edges.
pub fn generate_ba<R: Rng>(m: usize, rng: &mut R) -> Result<AdjacencyMatrix> {
    if m < 2 {
        return Err(Error::Parameter(format!("need m >= 2 nodes, got {m}")));
    }
    let mut g = AdjacencyMatrix::zeros(m);
    let mut degrees = vec![0u64; m];
    g.upper[edge_index(m, 0, 1)] = 1.0;
    degrees[0] = 1;
    degrees[1] = 1;
    for k in 2..m {
        // total degree of the partial tree on k nodes is 2(k-1)
        let total = 2 * (k as u64 - 1);
        let mut r = rng.random_range(0..total);
        let mut target = 0;
        for (node, &d) in degrees.iter().enumerate().take(k) {
            if r < d {
                target = node;
                break;
            }
            r -= d;
        }
        let (a, b) = (target.min(k), target.max(k));
        g.upper[edge_index(m, a, b)] = 1.0;
        degrees[target] += 1;
        degrees[k] = 1;
    }
    Ok(g)
}

/// Write the graph as a plain-text edge list: header `# m=<nodes>`, then one
/// `i j w` line per nonzero upper-triangle entry (0-based indices).
pub fn write_edge_list<P: AsRef<Path>>(g: &AdjacencyMatrix, path: P) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# m={}", g.node_count());
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "{i} {j} {w}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read an edge-list file written by [`write_edge_list`].
pub fn read_edge_list<P: AsRef<Path>>(path: P) -> Result<AdjacencyMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    let m: usize = header
        .trim()
        .strip_prefix("# m=")
        .ok_or_else(|| err(1, format!("expected header '# m=<nodes>', got '{header}'")))?
        .parse()
        .map_err(|e| err(1, format!("bad node count: {e}")))?;
    let mut upper = vec![0.0; pair_count(m)];
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(
                line_no,
                format!("expected 'i j w', got {} fields", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| err(line_no, format!("bad node index '{}': {e}", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| err(line_no, format!("bad node index '{}': {e}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|e| err(line_no, format!("bad weight '{}': {e}", fields[2])))?;
        if i >= j || j >= m {
            return Err(err(
                line_no,
                format!("edge ({i}, {j}) is not a strict upper-triangle pair of an {m}-node graph"),
            ));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(err(line_no, format!("invalid weight {w}")));
        }
        upper[edge_index(m, i, j)] = w;
    }
    AdjacencyMatrix::from_upper(m, upper)
}

/// Write the dense matrix as CSV (one row per line) for interop.
pub fn write_csv_matrix<P: AsRef<Path>>(g: &AdjacencyMatrix, path: P) -> Result<()> {
    let x = g.to_dense();
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    for i in 0..x.nrows() {
        let row: Vec<String> = (0..x.ncols()).map(|j| format!("{}", x[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Read a dense CSV matrix. Asymmetric input is accepted only when
/// `symmetrize` is set, in which case X is averaged with its transpose;
/// negative weights are refused either way.
pub fn read_csv_matrix<P: AsRef<Path>>(path: P, symmetrize: bool) -> Result<AdjacencyMatrix> {
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
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
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
        return Err(err(1, "empty file".to_string()));
    }
    let m = rows.len();
    if rows[0].len() != m {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {m}x{}",
            rows[0].len()
        )));
    }
    let x = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
    if symmetrize {
        AdjacencyMatrix::from_dense_symmetrized(&x)
    } else {
        AdjacencyMatrix::from_dense(&x)
    }
}

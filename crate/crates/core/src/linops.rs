//! The commutator operator S -> CS - SC, the bijection between nonnegative
//! pair vectors and adjacency matrices, and explicit operator assembly for
//! feasibility analysis.
//!
//! Solver-path computations never form Kronecker products: the commutator
//! operator norm equals the eigenvalue spread of C, and the commutator
//! itself is two matrix products. Explicit assembly exists solely so the
//! feasibility module (and test oracles) can inspect the operator as a
//! matrix acting on edge vectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graphs::{edge_index, pair_count, AdjacencyMatrix};
use crate::signals::{symmetric_eigenvalues, CovarianceEstimate};

/// Largest node count for which explicit operator assembly is permitted.
pub const ASSEMBLY_NODE_LIMIT: usize = 200;

/// The linear map S -> CS - SC for a fixed symmetric C, with the
/// eigendecomposition-derived quantities the solvers reuse every iteration.
#[derive(Debug, Clone)]
pub struct CommutatorOp {
    c: DMatrix<f64>,
    c_squared: DMatrix<f64>,
    op_norm: f64,
    cov_norm: f64,
}

impl CommutatorOp {
    pub fn new(cov: &CovarianceEstimate) -> Result<Self> {
        Self::from_matrix(cov.matrix().clone())
    }

    /// Build from a raw symmetric matrix.
    pub fn from_matrix(c: DMatrix<f64>) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::Shape(format!(
                "commutator operator needs a square matrix, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        let asym = (&c - c.transpose())
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        let scale = c.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);
        if asym > 1e-9 * scale {
            return Err(Error::Validation(format!(
                "commutator operator needs a symmetric matrix: max |C - C^T| = {asym:.3e}"
            )));
        }
        let eigvals = symmetric_eigenvalues(&c)?;
        let op_norm = eigvals.max() - eigvals.min();
        let cov_norm = eigvals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let c_squared = &c * &c;
        Ok(Self {
            c,
            c_squared,
            op_norm,
            cov_norm,
        })
    }

    pub fn node_count(&self) -> usize {
        self.c.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn matrix_squared(&self) -> &DMatrix<f64> {
        &self.c_squared
    }

    /// CS - SC, without forming any m^2 x m^2 matrix.
    pub fn apply(&self, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_shape(s)?;
        Ok(&self.c * s - s * &self.c)
    }

    /// Adjoint of [`CommutatorOp::apply`] under the trace inner product;
    /// for symmetric C this is the same formula, CY - YC.
    pub fn adjoint_apply(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_shape(y)
    }

    fn check_shape(&self, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let m = self.node_count();
        if s.nrows() != m || s.ncols() != m {
            return Err(Error::Shape(format!(
                "operand is {}x{}, operator acts on {m}x{m}",
                s.nrows(),
                s.ncols()
            )));
        }
        Ok(&self.c * s - s * &self.c)
    }

    /// Spectral norm of the commutator map: lambda_max(C) - lambda_min(C).
    pub fn operator_norm(&self) -> f64 {
        self.op_norm
    }

    /// Spectral norm of C itself.
    pub fn covariance_norm(&self) -> f64 {
        self.cov_norm
    }
}

/// A nonnegative vector of length m(m-1)/2 indexing the strict upper
/// triangle in canonical pair order; the coordinate image of an adjacency
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangleVector {
    m: usize,
    values: DVector<f64>,
}

impl UpperTriangleVector {
    pub fn new(m: usize, values: DVector<f64>) -> Result<Self> {
        if values.len() != pair_count(m) {
            return Err(Error::Shape(format!(
                "vector of length {} cannot index the {} pairs of an {m}-node graph",
                values.len(),
                pair_count(m)
            )));
        }
        Ok(Self { m, values })
    }

    /// Coordinate image of an adjacency matrix (inverse of
    /// [`UpperTriangleVector::to_adjacency`]).
    pub fn from_adjacency(g: &AdjacencyMatrix) -> Self {
        Self {
            m: g.node_count(),
            values: DVector::from_column_slice(g.upper()),
        }
    }

    /// Rebuild the adjacency matrix; negative entries are refused.
    pub fn to_adjacency(&self) -> Result<AdjacencyMatrix> {
        AdjacencyMatrix::from_upper(self.m, self.values.iter().cloned().collect())
    }

    pub fn node_count(&self) -> usize {
        self.m
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.values
    }
}

/// Column-major vectorization.
pub fn vectorize(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

/// Explicit m^2 x m(m-1)/2 matrix whose k-th column is vec(C E_k - E_k C)
/// for the symmetric pair basis E_k = e_i e_j^T + e_j e_i^T. Composing it
/// with the coordinate image of S gives vec(CS - SC).
pub fn assemble_commutator_edge_matrix(op: &CommutatorOp) -> Result<DMatrix<f64>> {
    let m = op.node_count();
    if m > ASSEMBLY_NODE_LIMIT {
        return Err(Error::MemoryGuard {
            m,
            limit: ASSEMBLY_NODE_LIMIT,
        });
    }
    let c = op.matrix();
    let mut out = DMatrix::zeros(m * m, pair_count(m));
    for i in 0..m {
        for j in (i + 1)..m {
            let k = edge_index(m, i, j);
            // (C E - E C)_{r,col}: C E has column j equal to C[:, i] and
            // column i equal to C[:, j]; E C has row i equal to C[j, :] and
            // row j equal to C[i, :].
            for r in 0..m {
                out[(j * m + r, k)] += c[(r, i)];
                out[(i * m + r, k)] += c[(r, j)];
            }
            for col in 0..m {
                out[(col * m + i, k)] -= c[(j, col)];
                out[(col * m + j, k)] -= c[(i, col)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_er, project_valid};
    use crate::signals::{true_covariance, FilterSpec, Provenance};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let x = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        0.5 * (&x + x.transpose())
    }

    fn op_from(c: DMatrix<f64>) -> CommutatorOp {
        CommutatorOp::from_matrix(c).unwrap()
    }

    /// I (x) C - C (x) I, assembled directly for oracles.
    fn kron_commutator(c: &DMatrix<f64>) -> DMatrix<f64> {
        let m = c.nrows();
        let id = DMatrix::<f64>::identity(m, m);
        id.kronecker(c) - c.kronecker(&id)
    }

    #[test]
    fn identity_commutes_with_everything() {
        let op = op_from(DMatrix::identity(4, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_symmetric(4, &mut rng);
        assert_eq!(op.apply(&s).unwrap().norm(), 0.0);
        assert_eq!(op.operator_norm(), 0.0);
    }

    #[test]
    fn matrix_commutes_with_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_symmetric(4, &mut rng);
        let op = op_from(c.clone());
        assert!(op.apply(&c).unwrap().norm() < 1e-14);
    }

    #[test]
    fn apply_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let c = random_symmetric(4, &mut rng);
            let s = random_symmetric(4, &mut rng);
            let op = op_from(c.clone());
            let direct = op.apply(&s).unwrap();
            let via_kron = kron_commutator(&c) * vectorize(&s);
            assert_relative_eq!(direct.norm(), via_kron.norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn adjoint_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let c = random_symmetric(5, &mut rng);
            let s = DMatrix::from_fn(5, 5, |_, _| rng.random::<f64>() - 0.5);
            let y = DMatrix::from_fn(5, 5, |_, _| rng.random::<f64>() - 0.5);
            let op = op_from(c);
            let lhs = (op.apply(&s).unwrap().transpose() * &y).trace();
            let rhs = (s.transpose() * op.adjoint_apply(&y).unwrap()).trace();
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn commutator_has_zero_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_symmetric(6, &mut rng);
        let y = random_symmetric(6, &mut rng);
        let op = op_from(c);
        assert!(op.apply(&y).unwrap().trace().abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_diagonal_gap() {
        let op = op_from(DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]));
        assert_relative_eq!(op.operator_norm(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn operator_norm_matches_kronecker_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let c = random_symmetric(5, &mut rng);
            let op = op_from(c.clone());
            let sv = kron_commutator(&c)
                .svd(false, false)
                .singular_values
                .max();
            assert_relative_eq!(op.operator_norm(), sv, epsilon = 1e-8);
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let op = op_from(DMatrix::identity(3, 3));
        assert!(matches!(
            op.apply(&DMatrix::zeros(2, 2)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn pair_vector_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = project_valid(&DMatrix::from_fn(6, 6, |_, _| rng.random::<f64>())).unwrap();
        let y = UpperTriangleVector::from_adjacency(&g);
        assert_eq!(y.to_adjacency().unwrap(), g);
    }

    #[test]
    fn pair_vector_ordering_at_m3() {
        let y = UpperTriangleVector::new(3, DVector::from_column_slice(&[10.0, 20.0, 30.0]))
            .unwrap();
        let s = y.to_adjacency().unwrap().to_dense();
        assert_eq!(s[(1, 0)], 10.0);
        assert_eq!(s[(2, 0)], 20.0);
        assert_eq!(s[(2, 1)], 30.0);
    }

    #[test]
    fn single_edge_graph_from_unit_vector() {
        let y = UpperTriangleVector::new(2, DVector::from_column_slice(&[1.0])).unwrap();
        let s = y.to_adjacency().unwrap().to_dense();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]));
    }

    #[test]
    fn negative_pair_vector_is_rejected() {
        let y = UpperTriangleVector::new(2, DVector::from_column_slice(&[-0.5])).unwrap();
        assert!(matches!(y.to_adjacency(), Err(Error::Validation(_))));
    }

    #[test]
    fn assembled_column_at_m2_matches_hand_expansion() {
        // C = [[h11, h12], [h12, h22]] acting on the single edge basis gives
        // vec = [0, h22 - h11, h11 - h22, 0]; the h12 contributions cancel
        // in the commutator of a symmetric S.
        let (h11, h12, h22) = (1.8, -0.6, 0.3);
        let c = DMatrix::from_row_slice(2, 2, &[h11, h12, h12, h22]);
        let a = assemble_commutator_edge_matrix(&op_from(c)).unwrap();
        let expected = DVector::from_column_slice(&[0.0, h22 - h11, h11 - h22, 0.0]);
        assert_relative_eq!(a.column(0).into_owned(), expected, epsilon = 1e-14);
    }

    #[test]
    fn assembled_columns_match_basis_commutators() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_symmetric(4, &mut rng);
        let op = op_from(c);
        let a = assemble_commutator_edge_matrix(&op).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut e = DMatrix::zeros(4, 4);
                e[(i, j)] = 1.0;
                e[(j, i)] = 1.0;
                let col = vectorize(&op.apply(&e).unwrap());
                let k = edge_index(4, i, j);
                assert_relative_eq!(a.column(k).into_owned(), col, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn assembly_of_identity_is_zero() {
        let a = assemble_commutator_edge_matrix(&op_from(DMatrix::identity(3, 3))).unwrap();
        assert_eq!(a.norm(), 0.0);
    }

    #[test]
    fn assembly_respects_memory_guard() {
        let c = DMatrix::identity(201, 201);
        let op = op_from(c);
        assert!(matches!(
            assemble_commutator_edge_matrix(&op),
            Err(Error::MemoryGuard { .. })
        ));
    }

    #[test]
    fn assembly_composed_with_pair_image_equals_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in [3usize, 5, 6] {
            let g = generate_er(m, 0.5, &mut rng).unwrap();
            let cov = true_covariance(&FilterSpec::Quadratic, &g).unwrap();
            let op = CommutatorOp::new(&cov).unwrap();
            let a = assemble_commutator_edge_matrix(&op).unwrap();
            let s = project_valid(&DMatrix::from_fn(m, m, |_, _| rng.random::<f64>())).unwrap();
            let via_matrix = &a * UpperTriangleVector::from_adjacency(&s).as_vector();
            let direct = vectorize(&op.apply(&s.to_dense()).unwrap());
            assert_relative_eq!(via_matrix, direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn operator_norm_bounds_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let c = random_symmetric(6, &mut rng);
            let s = random_symmetric(6, &mut rng);
            let op = op_from(c);
            let lhs = op.apply(&s).unwrap().norm();
            assert!(lhs <= op.operator_norm() * s.norm() + 1e-12);
        }
    }

    #[test]
    fn op_from_covariance_estimate() {
        let cov = CovarianceEstimate::new(DMatrix::identity(3, 3), Provenance::Exact).unwrap();
        let op = CommutatorOp::new(&cov).unwrap();
        assert_eq!(op.covariance_norm(), 1.0);
    }
}

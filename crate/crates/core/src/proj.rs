//! Euclidean projections onto the probability simplex and the nonnegative
//! orthant, used by the delta_min solver and the row-sum-normalized ADMM.

/// Project onto the standard simplex { x >= 0, sum x = 1 } in place.
///
/// Sort-based threshold rule: with u the coordinates sorted descending and
/// k the largest index with u_k > (sum_{r<=k} u_r - 1)/k, the projection is
/// max(x - theta, 0) for theta = (sum_{r<=k} u_r - 1)/k.
pub fn project_simplex(x: &mut [f64]) {
    if x.is_empty() {
        return;
    }
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

/// Clamp onto the nonnegative orthant in place.
pub fn project_nonneg(x: &mut [f64]) {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Project the first `split` coordinates onto the simplex and the rest onto
/// the nonnegative orthant.
pub fn project_simplex_orthant(x: &mut [f64], split: usize) {
    let (head, tail) = x.split_at_mut(split.min(x.len()));
    project_simplex(head);
    project_nonneg(tail);
}

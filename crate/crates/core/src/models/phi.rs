//! Map from swap variables to a symmetric second-stage assignment.

use crate::error::{check_len, CoreError};
use crate::subproblems::edges;

const TOL: f64 = 1e-9;

/// `y_ij = y_ji = z_ij` for `i < j` and `y_ii = 1 − Σ_{j>i} z_ij − Σ_{j<i} z_ji`.
///
/// `z` is indexed like [`edges`]. The input must satisfy `z ≥ 0`, the degree
/// rows `Σ_{e∋i} z_e ≤ 1` and `Σ z ≤ Δ`; the first violated row is reported.
/// The first-stage and dual blocks carry over unchanged.
pub fn matching_to_assignment_map(n: usize, z: &[f64], delta: usize) -> Result<Vec<Vec<f64>>, CoreError> {
    let es = edges(n);
    check_len(es.len(), z.len())?;
    if let Some(k) = z.iter().position(|&v| v < -TOL) {
        let (i, j) = es[k];
        return Err(CoreError::InfeasibleInput { row: format!("z[{i}][{j}] >= 0"), amount: -z[k] });
    }
    let mut y = vec![vec![0.0; n]; n];
    let mut degree = vec![0.0; n];
    for (&(i, j), &v) in es.iter().zip(z) {
        y[i][j] = v;
        y[j][i] = v;
        degree[i] += v;
        degree[j] += v;
    }
    for i in 0..n {
        if degree[i] > 1.0 + TOL {
            return Err(CoreError::InfeasibleInput { row: format!("degree of job {i}"), amount: degree[i] - 1.0 });
        }
        y[i][i] = 1.0 - degree[i];
    }
    let total: f64 = z.iter().sum();
    if total > delta as f64 + TOL {
        return Err(CoreError::InfeasibleInput { row: "swap budget".into(), amount: total - delta as f64 });
    }
    Ok(y)
}

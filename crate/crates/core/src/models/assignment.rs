//! Symmetric-assignment model.

use rrs_lp::{MixedIntegerProgram, Relation};

use super::Builder;
use crate::uncertainty::PolyhedralUncertainty;

/// Columns: `x[i][l]` binary, `y[i][j] ∈ [0,1]`, `w[i][j][l] ≥ 0` standing for
/// `y[i][j]·x[j][l]`, and `q[m] ≥ 0`.
pub(super) fn build(n: usize, u: &PolyhedralUncertainty, delta: usize) -> MixedIntegerProgram {
    let mut b = Builder::new();
    let x = b.first_stage(n);
    let y: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| b.var(format!("y[{i}][{j}]"), 1.0)).collect()).collect();
    let w: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|l| b.var(format!("w[{i}][{j}][{l}]"), f64::INFINITY)).collect()).collect())
        .collect();
    let q = b.duals(u);

    for i in 0..n {
        b.row((0..n).map(|j| (y[i][j], 1.0)).collect(), Relation::Eq, 1.0);
    }
    for j in 0..n {
        b.row((0..n).map(|i| (y[i][j], 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..n {
        for j in i + 1..n {
            b.row(vec![(y[i][j], 1.0), (y[j][i], -1.0)], Relation::Eq, 0.0);
        }
    }
    b.row((0..n).map(|i| (y[i][i], 1.0)).collect(), Relation::Ge, n as f64 - 2.0 * delta as f64);

    // Σ_m a_mi q_m − Σ_j ((n+1) y_ij − Σ_l l·w_ijl) ≥ 0, with 1-based l
    for i in 0..n {
        let mut row = Builder::dual_terms(u, &q, i);
        for j in 0..n {
            row.push((y[i][j], -((n + 1) as f64)));
            for l in 0..n {
                row.push((w[i][j][l], (l + 1) as f64));
            }
        }
        b.row(row, Relation::Ge, 0.0);
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                b.mccormick(w[i][j][l], x[j][l], y[i][j]);
            }
        }
    }
    b.finish()
}

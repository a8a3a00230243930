//! Swap-matching model.

use rrs_lp::{MixedIntegerProgram, Relation};

use super::Builder;
use crate::subproblems::edges;
use crate::uncertainty::PolyhedralUncertainty;

/// Columns: `x[i][l]` binary, `z[i][j] ≥ 0` for `i < j`, `u[i][j][l]` and
/// `v[i][j][l]` standing for `z[i][j]·x[i][l]` and `z[i][j]·x[j][l]`, and `q[m] ≥ 0`.
pub(super) fn build(n: usize, unc: &PolyhedralUncertainty, delta: usize) -> MixedIntegerProgram {
    let mut b = Builder::new();
    let x = b.first_stage(n);
    let es = edges(n);
    let mut z = vec![vec![usize::MAX; n]; n];
    let mut u = vec![vec![Vec::new(); n]; n];
    let mut v = vec![vec![Vec::new(); n]; n];
    for &(i, j) in &es {
        z[i][j] = b.var(format!("z[{i}][{j}]"), f64::INFINITY);
    }
    for &(i, j) in &es {
        u[i][j] = (0..n).map(|l| b.var(format!("u[{i}][{j}][{l}]"), f64::INFINITY)).collect();
    }
    for &(i, j) in &es {
        v[i][j] = (0..n).map(|l| b.var(format!("v[{i}][{j}][{l}]"), f64::INFINITY)).collect();
    }
    let q = b.duals(unc);

    for k in 0..n {
        let row = es.iter().filter(|&&(i, j)| i == k || j == k).map(|&(i, j)| (z[i][j], 1.0)).collect();
        b.row(row, Relation::Le, 1.0);
    }
    b.row(es.iter().map(|&(i, j)| (z[i][j], 1.0)).collect(), Relation::Le, delta as f64);

    // Σ_m a_mi q_m + Σ_{j>i} Σ_l l (v_ijl − u_ijl) − Σ_{j<i} Σ_l l (v_jil − u_jil) + Σ_l l x_il ≥ n+1
    for i in 0..n {
        let mut row = Builder::dual_terms(unc, &q, i);
        for l in 0..n {
            let lw = (l + 1) as f64;
            row.push((x[i][l], lw));
            for j in i + 1..n {
                row.push((v[i][j][l], lw));
                row.push((u[i][j][l], -lw));
            }
            for j in 0..i {
                row.push((v[j][i][l], -lw));
                row.push((u[j][i][l], lw));
            }
        }
        b.row(row, Relation::Ge, (n + 1) as f64);
    }
    for &(i, j) in &es {
        for l in 0..n {
            b.mccormick(u[i][j][l], x[i][l], z[i][j]);
        }
    }
    for &(i, j) in &es {
        for l in 0..n {
            b.mccormick(v[i][j][l], x[j][l], z[i][j]);
        }
    }
    b.finish()
}

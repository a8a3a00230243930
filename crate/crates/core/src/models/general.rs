//! Candidate-recovery model.

use rrs_lp::{MixedIntegerProgram, Relation};

use super::Builder;
use crate::uncertainty::PolyhedralUncertainty;

/// Columns, for candidates `k < K`:
/// `x[i][l]` binary, `mu[k] ≥ 0`, `z[k][i][i']` binary (job `i` takes the
/// position of job `i'`), `w[k][i][i'][l] ∈ [0,1]` for `z·x[i'][l]`,
/// `h[k][i][i'][l] ≥ 0` for `w·mu[k]`, and `q[m] ≥ 0`.
///
/// `w` is continuous: with `z` and `x` binary its McCormick rows pin it to 0 or 1.
pub(super) fn build(n: usize, u: &PolyhedralUncertainty, delta: usize, k: usize) -> MixedIntegerProgram {
    let mut b = Builder::new();
    let x = b.first_stage(n);
    let mu: Vec<usize> = (0..k).map(|kk| b.var(format!("mu[{kk}]"), f64::INFINITY)).collect();
    let cube = |b: &mut Builder, name: &str, kk: usize, upper: f64| -> Vec<Vec<Vec<usize>>> {
        (0..n)
            .map(|i| (0..n).map(|i2| (0..n).map(|l| b.var(format!("{name}[{kk}][{i}][{i2}][{l}]"), upper)).collect()).collect())
            .collect()
    };
    let z: Vec<Vec<Vec<usize>>> = (0..k)
        .map(|kk| (0..n).map(|i| (0..n).map(|i2| b.bin(format!("z[{kk}][{i}][{i2}]"))).collect()).collect())
        .collect();
    let w: Vec<_> = (0..k).map(|kk| cube(&mut b, "w", kk, 1.0)).collect();
    let h: Vec<_> = (0..k).map(|kk| cube(&mut b, "h", kk, f64::INFINITY)).collect();
    let q = b.duals(u);

    b.row(mu.iter().map(|&c| (c, 1.0)).collect(), Relation::Eq, 1.0);
    // Σ_m a_mi q_m ≥ Σ_k Σ_l (n+1−l) Σ_i' h_{k i i' l}, with 1-based l
    for i in 0..n {
        let mut row = Builder::dual_terms(u, &q, i);
        for hk in &h {
            for i2 in 0..n {
                for l in 0..n {
                    row.push((hk[i][i2][l], -((n - l) as f64)));
                }
            }
        }
        b.row(row, Relation::Ge, 0.0);
    }
    for zk in &z {
        for i in 0..n {
            b.row((0..n).map(|i2| (zk[i][i2], 1.0)).collect(), Relation::Eq, 1.0);
        }
        for i2 in 0..n {
            b.row((0..n).map(|i| (zk[i][i2], 1.0)).collect(), Relation::Eq, 1.0);
        }
        for i in 0..n {
            for i2 in i + 1..n {
                b.row(vec![(zk[i][i2], 1.0), (zk[i2][i], -1.0)], Relation::Eq, 0.0);
            }
        }
        b.row((0..n).map(|i| (zk[i][i], 1.0)).collect(), Relation::Ge, n as f64 - 2.0 * delta as f64);
    }
    for kk in 0..k {
        for i in 0..n {
            for i2 in 0..n {
                for l in 0..n {
                    b.mccormick(w[kk][i][i2][l], z[kk][i][i2], x[i2][l]);
                }
            }
        }
    }
    for kk in 0..k {
        for i in 0..n {
            for i2 in 0..n {
                for l in 0..n {
                    b.mccormick(h[kk][i][i2][l], w[kk][i][i2][l], mu[kk]);
                }
            }
        }
    }
    b.finish()
}

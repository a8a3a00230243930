//! Polyhedral scenario sets `U = {p ≥ 0 : Ap ≤ b}`.

use std::fmt;

use rrs_lp::{solve_lp, LinearProgram, LpStatus, LpTolerances, Relation, Sense};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{check_len, CoreError};
use crate::instance::Instance;

/// Default relative membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyRow {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralUncertainty {
    n: usize,
    rows: Vec<UncertaintyRow>,
}

/// Outcome of [`PolyhedralUncertainty::validate_compact`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compactness {
    Ok,
    NonemptyFail,
    /// Coordinate `job` (0-based) is unbounded above.
    Unbounded { job: usize },
}

impl fmt::Display for Compactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Compactness::Ok => f.write_str("ok"),
            Compactness::NonemptyFail => f.write_str("NONEMPTY_FAIL"),
            Compactness::Unbounded { job } => write!(f, "UNBOUNDED({})", job + 1),
        }
    }
}

/// Budget `Γ` of the budgeted set built from an instance's `p̂, p̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetedParams {
    pub gamma: f64,
}

impl PolyhedralUncertainty {
    pub fn new(n: usize, rows: Vec<UncertaintyRow>) -> Result<Self, CoreError> {
        for (m, row) in rows.iter().enumerate() {
            check_len(n, row.a.len())?;
            if !row.b.is_finite() || row.a.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::InvalidUncertainty(format!("row {m} has non-finite data")));
            }
        }
        Ok(Self { n, rows })
    }

    /// Convenience constructor from `(a, b)` pairs.
    pub fn from_rows(n: usize, rows: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self, CoreError> {
        Self::new(n, rows.into_iter().map(|(a, b)| UncertaintyRow { a, b }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[UncertaintyRow] {
        &self.rows
    }

    /// `a_{mi}`
    pub fn coeff(&self, m: usize, i: usize) -> f64 {
        self.rows[m].a[i]
    }

    pub fn rhs(&self, m: usize) -> f64 {
        self.rows[m].b
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool, CoreError> {
        check_len(self.n, p.len())?;
        if p.iter().any(|&v| v < -tol) {
            return Ok(false);
        }
        Ok(self.rows.iter().all(|r| {
            let lhs: f64 = r.a.iter().zip(p).map(|(a, v)| a * v).sum();
            lhs <= r.b + tol * (1.0 + r.b.abs())
        }))
    }

    /// Adds `n` scenario columns `{prefix}[i] ≥ 0` with objective `obj` and the rows `Ap ≤ b`.
    pub fn add_to_lp(&self, lp: &mut LinearProgram, prefix: &str, obj: &[f64]) -> Vec<usize> {
        let cols: Vec<usize> = (0..self.n).map(|i| lp.add_var(format!("{prefix}[{i}]"), 0.0, f64::INFINITY, obj[i])).collect();
        for row in &self.rows {
            let coeffs = cols.iter().zip(&row.a).filter(|(_, a)| **a != 0.0).map(|(&c, &a)| (c, a)).collect();
            lp.add_constraint(coeffs, Relation::Le, row.b);
        }
        cols
    }

    /// Maximizes the linear function `c·p` over `U`.
    pub fn maximize(&self, c: &[f64]) -> Result<(LpStatus, f64, Vec<f64>), CoreError> {
        check_len(self.n, c.len())?;
        let mut lp = LinearProgram::new(Sense::Maximize);
        self.add_to_lp(&mut lp, "p", c);
        let sol = solve_lp(&lp, &LpTolerances::default())?;
        Ok((sol.status, sol.objective, sol.x))
    }

    /// Checks that `U` is nonempty and bounded by solving one LP per coordinate.
    pub fn validate_compact(&self) -> Result<Compactness, CoreError> {
        let (status, _, _) = self.maximize(&vec![0.0; self.n])?;
        if status == LpStatus::Infeasible {
            return Ok(Compactness::NonemptyFail);
        }
        for i in 0..self.n {
            let mut c = vec![0.0; self.n];
            c[i] = 1.0;
            if self.maximize(&c)?.0 == LpStatus::Unbounded {
                return Ok(Compactness::Unbounded { job: i });
            }
        }
        Ok(Compactness::Ok)
    }

    /// Requires `validate_compact() == Ok`, mapping failures to an error.
    pub fn require_compact(&self) -> Result<(), CoreError> {
        match self.validate_compact()? {
            Compactness::Ok => Ok(()),
            other => Err(CoreError::InvalidUncertainty(other.to_string())),
        }
    }

    /// Largest value of each `p_i` over `U`.
    pub fn coordinate_max(&self) -> Result<Vec<f64>, CoreError> {
        (0..self.n)
            .map(|i| {
                let mut c = vec![0.0; self.n];
                c[i] = 1.0;
                match self.maximize(&c)? {
                    (LpStatus::Optimal, v, _) => Ok(v),
                    (status, _, _) => Err(CoreError::LpStatus {
                        status: status_name(status),
                        context: format!("maximizing p[{}] over U", i + 1),
                    }),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polyhedron serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CoreError> {
        let raw: Self = serde_json::from_str(s)?;
        Self::new(raw.n, raw.rows)
    }
}

pub(crate) fn status_name(s: LpStatus) -> &'static str {
    match s {
        LpStatus::Optimal => "optimal",
        LpStatus::Infeasible => "infeasible",
        LpStatus::Unbounded => "unbounded",
    }
}

/// Budgeted set: box `[p̂, p̂+p̄]` plus `Σ_{p̄_i>0} p_i/p̄_i ≤ Γ + Σ_{p̄_i>0} p̂_i/p̄_i`.
pub fn budgeted_to_polyhedral(inst: &Instance, bp: BudgetedParams) -> Result<PolyhedralUncertainty, CoreError> {
    let n = inst.n();
    if !(bp.gamma.is_finite() && bp.gamma >= 0.0) {
        return Err(CoreError::InvalidUncertainty(format!("budget {} must be a nonnegative number", bp.gamma)));
    }
    let (ph, pb) = (inst.nominal(), inst.deviation());
    let unit = |i: usize, s: f64| {
        let mut a = vec![0.0; n];
        a[i] = s;
        a
    };
    let mut rows = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        rows.push((unit(i, 1.0), ph[i] + pb[i]));
    }
    for i in 0..n {
        rows.push((unit(i, -1.0), -ph[i]));
    }
    let a: Vec<f64> = pb.iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect();
    let shift: f64 = (0..n).filter(|&i| pb[i] > 0.0).map(|i| ph[i] / pb[i]).sum();
    rows.push((a, bp.gamma + shift));
    PolyhedralUncertainty::from_rows(n, rows)
}

/// File form of an uncertainty set: `{"type":"budgeted","gamma":..}` or `{"n":..,"rows":[..]}`.
#[derive(Clone, Debug, PartialEq)]
pub enum UncertaintySpec {
    Budgeted(BudgetedParams),
    Polyhedral(PolyhedralUncertainty),
}

impl UncertaintySpec {
    pub fn from_json(s: &str) -> Result<Self, CoreError> {
        let v: Value = serde_json::from_str(s)?;
        match v.get("type").and_then(Value::as_str) {
            Some("budgeted") => Ok(Self::Budgeted(serde_json::from_value(v)?)),
            Some(other) => Err(CoreError::InvalidUncertainty(format!("unknown set type {other:?}"))),
            None => Ok(Self::Polyhedral(PolyhedralUncertainty::from_json(s)?)),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Self::Budgeted(bp) => serde_json::json!({"type": "budgeted", "gamma": bp.gamma}).to_string(),
            Self::Polyhedral(u) => u.to_json(),
        }
    }

    pub fn resolve(&self, inst: &Instance) -> Result<PolyhedralUncertainty, CoreError> {
        match self {
            Self::Budgeted(bp) => budgeted_to_polyhedral(inst, *bp),
            Self::Polyhedral(u) => {
                check_len(inst.n(), u.n())?;
                Ok(u.clone())
            }
        }
    }
}

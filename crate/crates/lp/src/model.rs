//! Linear program container.

use std::collections::HashMap;
use std::fmt;

use crate::LpError;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Relation between a row activity and its right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// A single linear row `sum coeffs[k].1 * x[coeffs[k].0]  (relation)  rhs`.
///
/// Coefficients are stored sparsely; repeated indices are summed.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A linear program over continuous variables with simple bounds.
///
/// Lower bounds may be finite or `-inf`; upper bounds may be finite or `+inf`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    names: Vec<String>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            names: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Adds a variable and returns its column index.
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, obj: f64) -> usize {
        self.objective.push(obj);
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(name.into());
        self.objective.len() - 1
    }

    /// Adds a row and returns its index.
    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective_coeff(&mut self, var: usize, value: f64) {
        self.objective[var] = value;
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Map from variable name to column, for block extraction.
    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.names.iter().enumerate().map(|(j, s)| (s.as_str(), j)).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks dimensions, bound ordering and finiteness of the data.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
                return Err(LpError::InvalidBounds { var: j, lower: lo, upper: hi });
            }
            if !self.objective[j].is_finite() {
                return Err(LpError::NonFinite(format!("objective coefficient of variable {j}")));
            }
        }
        for (r, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::NonFinite(format!("rhs of row {r}")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::Dimension(format!("row {r} references variable {j} but the program has {n}")));
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(format!("coefficient of variable {j} in row {r}")));
                }
            }
        }
        Ok(())
    }

    /// Largest row or bound violation of `x`, scaled by `1 + |rhs|`, with the row index
    /// (`None` for a bound violation).
    pub fn max_violation(&self, x: &[f64]) -> (Option<usize>, f64) {
        let mut worst = (None, 0.0);
        for (j, &v) in x.iter().enumerate() {
            let viol = (self.lower[j] - v).max(v - self.upper[j]).max(0.0);
            let scaled = viol / (1.0 + v.abs().min(1e12));
            if scaled > worst.1 {
                worst = (None, scaled);
            }
        }
        for (r, row) in self.constraints.iter().enumerate() {
            let scaled = row.violation(x) / (1.0 + row.rhs.abs());
            if scaled > worst.1 {
                worst = (Some(r), scaled);
            }
        }
        worst
    }
}

//! Jobs, schedules and the disjoint-swap recourse.
//!
//! Jobs and positions are 0-based in memory. Text formats (JSON schedules,
//! CSV job columns, `Display`) use 1-based numbering.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, CoreError};

/// Largest processing time accepted, so that every cost stays an exact `f64`.
pub const MAX_TIME: f64 = 1e6;

/// A scheduling instance with nominal times `p̂` and maximal delays `p̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    nominal: Vec<f64>,
    deviation: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    id: String,
    n: usize,
    p_hat: Vec<u64>,
    p_bar: Vec<u64>,
}

#[derive(Deserialize)]
struct JobRow {
    job: usize,
    p_hat: f64,
    p_bar: f64,
}

impl Instance {
    pub fn new(id: impl Into<String>, nominal: Vec<f64>, deviation: Vec<f64>) -> Result<Self, CoreError> {
        let n = nominal.len();
        if n == 0 {
            return Err(CoreError::InvalidInstance("an instance needs at least one job".into()));
        }
        check_len(n, deviation.len())?;
        for (what, v) in [("p_hat", &nominal), ("p_bar", &deviation)] {
            for (i, &t) in v.iter().enumerate() {
                if !(t.is_finite() && (0.0..=MAX_TIME).contains(&t) && t.fract() == 0.0) {
                    return Err(CoreError::InvalidInstance(format!(
                        "{what}[{}] = {t} is not an integer in [0, {MAX_TIME}]",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { id: id.into(), nominal, deviation })
    }

    pub fn n(&self) -> usize {
        self.nominal.len()
    }

    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }

    pub fn deviation(&self) -> &[f64] {
        &self.deviation
    }

    /// Parses `{"id": .., "n": .., "p_hat": [..], "p_bar": [..]}`.
    pub fn from_json(s: &str) -> Result<Self, CoreError> {
        let raw: InstanceJson = serde_json::from_str(s)?;
        check_len(raw.n, raw.p_hat.len())?;
        let to_f = |v: Vec<u64>| v.into_iter().map(|t| t as f64).collect();
        Self::new(raw.id, to_f(raw.p_hat), to_f(raw.p_bar))
    }

    pub fn to_json(&self) -> String {
        let to_u = |v: &[f64]| v.iter().map(|&t| t as u64).collect();
        let raw = InstanceJson { id: self.id.clone(), n: self.n(), p_hat: to_u(&self.nominal), p_bar: to_u(&self.deviation) };
        serde_json::to_string(&raw).expect("instance serializes")
    }

    /// Reads a `job,p_hat,p_bar` table. Jobs are numbered from 1 and may come in any order.
    pub fn from_csv<R: Read>(id: impl Into<String>, reader: R) -> Result<Self, CoreError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<JobRow> = rdr.deserialize().collect::<Result<_, _>>()?;
        rows.sort_by_key(|r| r.job);
        for (k, r) in rows.iter().enumerate() {
            if r.job != k + 1 {
                return Err(CoreError::InvalidInstance(format!("job column must list 1..={}", rows.len())));
            }
        }
        Self::new(id, rows.iter().map(|r| r.p_hat).collect(), rows.iter().map(|r| r.p_bar).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("job,p_hat,p_bar\n");
        for i in 0..self.n() {
            out.push_str(&format!("{},{},{}\n", i + 1, self.nominal[i], self.deviation[i]));
        }
        out
    }
}

/// A permutation of jobs: `perm()[l]` is the job in position `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    perm: Vec<usize>,
}

impl Schedule {
    pub fn new(perm: Vec<usize>) -> Result<Self, CoreError> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in &perm {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(CoreError::InvalidSchedule(format!("{perm:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self { perm })
    }

    /// Builds a schedule from 1-based job labels.
    pub fn from_one_based(jobs: &[usize]) -> Result<Self, CoreError> {
        if jobs.contains(&0) {
            return Err(CoreError::InvalidSchedule("1-based job labels cannot contain 0".into()));
        }
        Self::new(jobs.iter().map(|&j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|&j| j + 1).collect()
    }

    /// `positions()[i]` is the 0-based position of job `i`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        for (l, &j) in self.perm.iter().enumerate() {
            pos[j] = l;
        }
        pos
    }

    /// Row-major 0/1 assignment matrix `x[i][l]`.
    pub fn assignment_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut x = vec![vec![0.0; n]; n];
        for (l, &j) in self.perm.iter().enumerate() {
            x[j][l] = 1.0;
        }
        x
    }

    /// Recovers a schedule from an (almost) integral assignment matrix.
    pub fn from_assignment(x: &[Vec<f64>], tol: f64) -> Result<Self, CoreError> {
        let n = x.len();
        let mut perm = vec![usize::MAX; n];
        for (i, row) in x.iter().enumerate() {
            check_len(n, row.len())?;
            for (l, &v) in row.iter().enumerate() {
                if (v - 1.0).abs() <= tol {
                    perm[l] = i;
                } else if v.abs() > tol {
                    return Err(CoreError::InvalidSchedule(format!("x[{i}][{l}] = {v} is fractional")));
                }
            }
        }
        Self::new(perm)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.one_based().iter().map(|j| j.to_string()).collect();
        write!(f, "({})", labels.join(","))
    }
}

/// A set of disjoint job swaps, stored as sorted pairs `(i, j)` with `i < j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RecoveryMatching {
    swaps: Vec<(usize, usize)>,
}

impl RecoveryMatching {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, CoreError> {
        let mut swaps: Vec<(usize, usize)> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(CoreError::InvalidSchedule(format!("job {} cannot swap with itself", a + 1)));
            }
            swaps.push((a.min(b), a.max(b)));
        }
        swaps.sort_unstable();
        let mut used: Vec<usize> = swaps.iter().flat_map(|&(a, b)| [a, b]).collect();
        used.sort_unstable();
        if let Some(w) = used.windows(2).find(|w| w[0] == w[1]) {
            return Err(CoreError::OverlappingSwaps { job: w[0] + 1 });
        }
        Ok(Self { swaps })
    }

    pub fn from_one_based(pairs: &[(usize, usize)]) -> Result<Self, CoreError> {
        if pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(CoreError::InvalidSchedule("1-based job labels cannot contain 0".into()));
        }
        Self::new(pairs.iter().map(|&(a, b)| (a - 1, b - 1)))
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    pub fn swaps(&self) -> &[(usize, usize)] {
        &self.swaps
    }
}

/// Result of [`swap_distance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapDistance {
    Finite(usize),
    Infeasible,
}

/// Total flow time `Σ_l p[perm[l]] · (n − l)` (weight `n+1−j` for 1-based position `j`).
pub fn schedule_cost(s: &Schedule, p: &[f64]) -> Result<f64, CoreError> {
    check_len(s.n(), p.len())?;
    let n = s.n();
    Ok(s.perm.iter().enumerate().map(|(l, &j)| p[j] * (n - l) as f64).sum())
}

/// Shortest processing time order, ties by job index.
pub fn spt_schedule(p: &[f64]) -> Schedule {
    let mut perm: Vec<usize> = (0..p.len()).collect();
    perm.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    Schedule { perm }
}

/// Number of disjoint transpositions turning `x` into `y`.
///
/// The union of the two assignment graphs splits into cycles; 2-cycles are
/// shared edges and 4-cycles are swaps. Any longer cycle makes `y` unreachable.
pub fn swap_distance(x: &Schedule, y: &Schedule) -> Result<SwapDistance, CoreError> {
    check_len(x.n(), y.n())?;
    let pos_x = x.positions();
    // next[i]: job that y puts where x had job i
    let next: Vec<usize> = (0..x.n()).map(|i| y.perm[pos_x[i]]).collect();
    let mut seen = vec![false; x.n()];
    let mut swaps = 0;
    for start in 0..x.n() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = next[i];
            len += 1;
        }
        match len {
            1 => {}
            2 => swaps += 1,
            _ => return Ok(SwapDistance::Infeasible),
        }
    }
    Ok(SwapDistance::Finite(swaps))
}

/// Exchanges the positions of every swapped pair.
pub fn apply_swaps(x: &Schedule, m: &RecoveryMatching) -> Result<Schedule, CoreError> {
    let n = x.n();
    if let Some(&(_, b)) = m.swaps.iter().find(|&&(_, b)| b >= n) {
        return Err(CoreError::InvalidSchedule(format!("job {} does not exist for n = {n}", b + 1)));
    }
    let pos = x.positions();
    let mut perm = x.perm.clone();
    for &(a, b) in &m.swaps {
        perm.swap(pos[a], pos[b]);
    }
    Ok(Schedule { perm })
}

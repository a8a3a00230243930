//! Performance profiles over solve times.
//!
//! For problem `i` and model `m` with time `t_im`, the ratio is
//! `r_im = t_im / min_m t_im` over the models that solved `i`. Unsolved runs
//! get the cap `P = 2 · max finite ratio`, so they count only once `τ ≥ P`.
//! `ρ_m(τ)` is the share of problems with `r_im ≤ τ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::experiment::{ResultRecord, Status};

/// Times below this are treated as equal to it, so ratios stay finite.
const MIN_TIME: f64 = 1e-6;

/// Solve time per problem and model; `None` marks an unsolved run.
pub type TimeTable = BTreeMap<String, BTreeMap<String, Option<f64>>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub model: String,
    pub tau: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceProfile {
    /// Breakpoints sorted by `(τ, model)`.
    pub points: Vec<ProfilePoint>,
    /// Ratio assigned to unsolved runs.
    pub cap: f64,
    pub models: Vec<String>,
    pub problems: usize,
}

impl PerformanceProfile {
    /// `ρ_model(τ)`; 0 below the first breakpoint.
    pub fn rho(&self, model: &str, tau: f64) -> f64 {
        self.points.iter().filter(|p| p.model == model && p.tau <= tau).map(|p| p.rho).fold(0.0, f64::max)
    }

    /// Whether `ρ` is non-decreasing in `τ` and inside `[0, 1]` for every model.
    pub fn is_monotone(&self) -> bool {
        self.models.iter().all(|m| {
            let mut last = 0.0;
            self.points.iter().filter(|p| &p.model == m).all(|p| {
                let ok = p.rho >= last && (0.0..=1.0).contains(&p.rho);
                last = p.rho;
                ok
            })
        })
    }
}

/// Builds the profile from per-problem times, `None` marking an unsolved run.
///
/// Every problem must list a time (or `None`) for every model.
pub fn profile_from_times(times: &TimeTable) -> Result<PerformanceProfile, BenchError> {
    let models: Vec<String> = times.values().flat_map(|row| row.keys().cloned()).collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if times.is_empty() || models.is_empty() {
        return Err(BenchError::Profile("no runs".into()));
    }
    let mut ratios: BTreeMap<&str, Vec<Option<f64>>> = BTreeMap::new();
    for (problem, row) in times {
        if let Some(m) = models.iter().find(|m| !row.contains_key(*m)) {
            return Err(BenchError::Profile(format!("problem {problem} has no run of {m}")));
        }
        let best = row.values().flatten().map(|&t| t.max(MIN_TIME)).fold(f64::INFINITY, f64::min);
        for (m, t) in row {
            ratios.entry(m.as_str()).or_default().push(t.map(|t| t.max(MIN_TIME) / best));
        }
    }
    let max_ratio = ratios.values().flatten().flatten().fold(1.0f64, |a, &b| a.max(b));
    let cap = 2.0 * max_ratio;
    let problems = times.len();
    let mut points = Vec::new();
    for (m, rs) in &ratios {
        let mut r: Vec<f64> = rs.iter().map(|r| r.unwrap_or(cap)).collect();
        r.sort_by(f64::total_cmp);
        let mut k = 0;
        while k < r.len() {
            let tau = r[k];
            while k < r.len() && r[k] <= tau {
                k += 1;
            }
            points.push(ProfilePoint { model: m.to_string(), tau, rho: k as f64 / problems as f64 });
        }
    }
    points.sort_by(|a, b| a.tau.total_cmp(&b.tau).then_with(|| a.model.cmp(&b.model)));
    Ok(PerformanceProfile { points, cap, models, problems })
}

/// Profile of the solver runs in `records` (heuristic runs are ignored).
///
/// Problems are `(instance, Γ, Δ)` triples; models are `model` plus `+ws` for
/// warm-started runs. A run counts as solved when its status is optimal.
pub fn performance_profile(records: &[ResultRecord]) -> Result<PerformanceProfile, BenchError> {
    let mut times = TimeTable::new();
    for r in records.iter().filter(|r| r.status != Status::Heuristic) {
        let problem = format!("{}|{}|{}", r.instance, r.gamma, r.delta);
        let model = format!("{}{}", r.model, if r.warm_start { "+ws" } else { "" });
        let t = r.solved().then_some(r.time_s);
        if times.entry(problem.clone()).or_default().insert(model.clone(), t).is_some() {
            return Err(BenchError::Profile(format!("problem {problem} has two runs of {model}")));
        }
    }
    profile_from_times(&times)
}

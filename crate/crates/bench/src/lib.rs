//! Benchmark harness: seeded instance generation, sweeps over `(n, Γ, Δ)`,
//! per-cell summaries, performance profiles and CSV/Markdown/JSON output.
//!
//! # Instance generator
//!
//! Instance `k` (0-based) of size `n` under seed `s` draws from
//! `rand_pcg::Pcg64::new(s, (n << 64) | k)`: the seed is the PCG state and
//! each `(n, k)` pair gets its own stream, so instances never share draws and
//! adding sizes or counts leaves existing instances unchanged. All `n` nominal
//! times are drawn first, then all `n` deviations, each uniform on
//! `{1, …, 100}` via `rand::distr::Uniform` (Lemire's widening multiply with
//! rejection on 32-bit outputs, so no modulo bias).

pub mod emit;
pub mod error;
pub mod experiment;
pub mod profile;
pub mod rng;

pub use error::BenchError;
pub use experiment::{
    aggregate, best_known_table, run_experiment, run_on_instances, BestRow, CellSummary, ExperimentConfig, ModelSpec,
    ResultRecord, Status,
};
pub use profile::{performance_profile, profile_from_times, PerformanceProfile, ProfilePoint, TimeTable};
pub use rng::{generate_instances, instance_rng, TIME_RANGE};

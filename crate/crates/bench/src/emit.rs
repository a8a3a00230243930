//! CSV, Markdown and JSON renderings of sweep results and profiles.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::BenchError;
use crate::experiment::{aggregate, best_known_table, BestRow, CellSummary, ResultRecord};
use crate::profile::PerformanceProfile;

/// Column order of [`write_records`] in CSV form.
pub const RECORD_COLUMNS: [&str; 13] = [
    "instance", "model", "warm_start", "n", "gamma", "delta", "status", "time_s", "ub", "lb", "lbgap_pct", "ubgap_pct",
    "best_known",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Md,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (csv, md, json)")),
        }
    }
}

/// CSV: one row per run. Markdown: the per-cell table and the best-known table.
/// JSON: the runs as an array.
pub fn write_records<W: Write>(records: &[ResultRecord], format: Format, mut w: W) -> Result<(), BenchError> {
    match format {
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(w);
            if records.is_empty() {
                wr.write_record(RECORD_COLUMNS)?;
            }
            for r in records {
                wr.serialize(r)?;
            }
            wr.flush()?;
        }
        Format::Md => {
            w.write_all(cells_markdown(&aggregate(records)).as_bytes())?;
            w.write_all(b"\n")?;
            w.write_all(best_markdown(&best_known_table(records)).as_bytes())?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, records)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Reads runs written by [`write_records`] in CSV form.
pub fn read_records<R: Read>(r: R) -> Result<Vec<ResultRecord>, BenchError> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_COLUMNS {
        return Err(BenchError::Config(format!("unexpected result columns {header:?}")));
    }
    Ok(rd.deserialize().collect::<Result<_, _>>()?)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

/// Per-cell table: `n | Γ | Δ | model | time | LBgap | UBgap | #solv`.
pub fn cells_markdown(cells: &[CellSummary]) -> String {
    let mut s = String::from("| n | Γ | Δ | model | time | LBgap | UBgap | #solv |\n|---|---|---|---|---:|---:|---:|---:|\n");
    for c in cells {
        let model = format!("{}{}", c.model, if c.warm_start { " + warm-start" } else { "" });
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            c.n,
            c.gamma,
            c.delta,
            model,
            opt(c.time, 2),
            opt(c.lbgap, 1),
            opt(c.ubgap, 1),
            c.solved
        );
    }
    s
}

/// `n | Γ | Δ | avg. best | %diff.`
pub fn best_markdown(rows: &[BestRow]) -> String {
    let mut s = String::from("| n | Γ | Δ | avg. best | %diff. |\n|---|---|---|---:|---:|\n");
    for r in rows {
        let _ = writeln!(s, "| {} | {} | {} | {:.1} | {:.1} |", r.n, r.gamma, r.delta, r.avg_best, r.pct_diff);
    }
    s
}

/// CSV and JSON: `model, tau, rho` rows. Markdown: one table with a `ρ` column per model.
pub fn write_profile<W: Write>(p: &PerformanceProfile, format: Format, mut w: W) -> Result<(), BenchError> {
    match format {
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(w);
            for pt in &p.points {
                wr.serialize(pt)?;
            }
            wr.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &p.points)?;
            w.write_all(b"\n")?;
        }
        Format::Md => {
            let mut s = format!("| τ | {} |\n|---:|{}\n", p.models.join(" | "), "---:|".repeat(p.models.len()));
            let mut taus: Vec<f64> = p.points.iter().map(|pt| pt.tau).collect();
            taus.dedup();
            for tau in taus {
                let cols: Vec<String> = p.models.iter().map(|m| format!("{:.3}", p.rho(m, tau))).collect();
                let _ = writeln!(s, "| {tau:.3} | {} |", cols.join(" | "));
            }
            w.write_all(s.as_bytes())?;
        }
    }
    Ok(())
}

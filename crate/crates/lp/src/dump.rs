//! Plain-text LP dump for cross-checking with external solvers.
//!
//! ```text
//! lp min 2 1
//! names x y
//! obj 1 2
//! lo 0 0
//! hi inf 1
//! row 1 1 >= 1
//! ```
//!
//! Every row line carries one dense coefficient per variable, then the
//! relation (`<=`, `=`, `>=`) and the right-hand side. Numbers use Rust's
//! shortest round-trip formatting, so a dump parses back to the same program.

use std::fmt::Write as _;

use crate::{LinearProgram, LpError, Relation, Sense};

pub fn write_dump(lp: &LinearProgram) -> String {
    let n = lp.num_vars();
    let mut out = String::new();
    let sense = match lp.sense() {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let _ = writeln!(out, "lp {sense} {n} {}", lp.num_constraints());
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "names {}", lp.names().join(" "));
    let _ = writeln!(out, "obj {}", join(lp.objective()));
    let _ = writeln!(out, "lo {}", join(lp.lower()));
    let _ = writeln!(out, "hi {}", join(lp.upper()));
    let mut dense = vec![0.0; n];
    for row in lp.constraints() {
        dense.iter_mut().for_each(|v| *v = 0.0);
        for &(j, a) in &row.coeffs {
            dense[j] += a;
        }
        let _ = writeln!(out, "row {} {} {}", join(&dense), row.relation, row.rhs);
    }
    out
}

pub fn parse_dump(text: &str) -> Result<LinearProgram, LpError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let err = |line: usize, msg: &str| LpError::Parse { line: line + 1, msg: msg.to_string() };
    let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| err(line, &format!("bad number {s:?}")));

    let (ln, header) = lines.next().ok_or_else(|| err(0, "empty dump"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 || head[0] != "lp" {
        return Err(err(ln, "expected `lp <min|max> <vars> <rows>`"));
    }
    let sense = match head[1] {
        "min" => Sense::Minimize,
        "max" => Sense::Maximize,
        _ => return Err(err(ln, "unknown sense")),
    };
    let n: usize = head[2].parse().map_err(|_| err(ln, "bad variable count"))?;
    let m: usize = head[3].parse().map_err(|_| err(ln, "bad row count"))?;

    let mut section = |tag: &str| -> Result<(usize, Vec<String>), LpError> {
        let (ln, line) = lines.next().ok_or_else(|| err(usize::MAX - 1, "truncated dump"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(tag) {
            return Err(err(ln, &format!("expected `{tag}` line")));
        }
        Ok((ln, parts.map(str::to_string).collect()))
    };
    let (ln_names, names) = section("names")?;
    if names.len() != n {
        return Err(err(ln_names, "wrong number of names"));
    }
    let mut vec_line = |tag: &str| -> Result<Vec<f64>, LpError> {
        let (ln, parts) = section(tag)?;
        if parts.len() != n {
            return Err(err(ln, &format!("`{tag}` needs {n} entries")));
        }
        parts.iter().map(|s| num(ln, s)).collect()
    };
    let obj = vec_line("obj")?;
    let lo = vec_line("lo")?;
    let hi = vec_line("hi")?;
    let mut lp = LinearProgram::new(sense);
    for j in 0..n {
        lp.add_var(names[j].clone(), lo[j], hi[j], obj[j]);
    }
    for _ in 0..m {
        let (ln, parts) = section("row")?;
        if parts.len() != n + 2 {
            return Err(err(ln, "row needs one coefficient per variable, a relation and a rhs"));
        }
        let mut coeffs = Vec::new();
        for (j, s) in parts[..n].iter().enumerate() {
            let a = num(ln, s)?;
            if a != 0.0 {
                coeffs.push((j, a));
            }
        }
        let relation = match parts[n].as_str() {
            "<=" => Relation::Le,
            "=" => Relation::Eq,
            ">=" => Relation::Ge,
            other => return Err(err(ln, &format!("unknown relation {other:?}"))),
        };
        let rhs = num(ln, &parts[n + 1])?;
        lp.add_constraint(coeffs, relation, rhs);
    }
    Ok(lp)
}

//! Rendering classification records as markdown, csv or json.

use super::{golden, PairRecord, QuadPoints, Status};
use crate::modsym::invariant_genus;
use crate::error::{Error, Result};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn detail(r: &PairRecord) -> String {
    match &r.status {
        Status::BiellipticConfirmed { witness } => {
            let mut s = format!("{} over {}", witness.involution, witness.field);
            if witness.level != r.n {
                write!(s, " at level {} {}", witness.level, witness.w).unwrap();
            }
            s
        }
        Status::Adjudicated { verdict, source } => format!("{verdict} [{source}]"),
        Status::Excluded | Status::Hyperelliptic => {
            r.trace.last().map(|s| format!("{} [{}]", s.id, s.citation)).unwrap_or_default()
        }
        _ => String::new(),
    }
}

fn quad(q: &QuadPoints) -> String {
    match q {
        QuadPoints::Infinite(why) => format!("infinite ({why})"),
        QuadPoints::Finite => "finite".into(),
        QuadPoints::NotApplicable => "-".into(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders records; with `trace` set, markdown and csv include every rule step.
pub fn emit(records: &[PairRecord], format: Format, trace: bool) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(records).map_err(|e| Error::Integrity(e.to_string()))?;
            out.push('\n');
        }
        Format::Markdown => {
            out.push_str("| N | W | genus | status | detail | quadratic points |\n");
            out.push_str("|---|---|---|---|---|---|\n");
            for r in records {
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    r.n,
                    r.w,
                    r.genus,
                    r.status.name(),
                    detail(r),
                    quad(&r.quadratic_points)
                )
                .unwrap();
                if trace {
                    for s in &r.trace {
                        writeln!(out, "|  |  |  |  | {s} |  |").unwrap();
                    }
                }
            }
        }
        Format::Csv => {
            out.push_str(if trace { "n,w,genus,status,detail,quadratic_points,trace\n" } else { "n,w,genus,status,detail,quadratic_points\n" });
            for r in records {
                let mut fields = vec![
                    r.n.to_string(),
                    r.w.to_string(),
                    r.genus.to_string(),
                    r.status.name().to_string(),
                    detail(r),
                    quad(&r.quadratic_points),
                ];
                if trace {
                    fields.push(r.trace.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ; "));
                }
                let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
                writeln!(out, "{}", line.join(",")).unwrap();
            }
        }
    }
    Ok(out)
}

/// Genus table: one row per level, one column per subgroup
/// row label. A new header starts whenever the row shape changes.
pub fn genus_matrix(levels: &[u64], format: Format) -> Result<String> {
    let mut rows: Vec<(u64, &'static [&'static str], Vec<u64>)> = Vec::new();
    for &n in levels {
        let labels = golden::row_labels(n);
        let mut genera = Vec::new();
        for l in labels {
            genera.push(invariant_genus(n, &golden::row_subgroup(n, l)?)?);
        }
        rows.push((n, labels, genera));
    }
    let mut out = String::new();
    let mut shape: Option<usize> = None;
    match format {
        Format::Json => {
            let v: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, labels, g)| {
                    let cells: serde_json::Map<String, serde_json::Value> =
                        labels.iter().zip(g).map(|(l, g)| (l.to_string(), (*g).into())).collect();
                    serde_json::json!({ "n": n, "genus": cells })
                })
                .collect();
            out = serde_json::to_string_pretty(&v).map_err(|e| Error::Integrity(e.to_string()))?;
            out.push('\n');
        }
        Format::Csv => {
            for (n, labels, g) in &rows {
                if shape != Some(labels.len()) {
                    shape = Some(labels.len());
                    writeln!(out, "n,{}", labels.join(",")).unwrap();
                }
                let vals: Vec<String> = g.iter().map(u64::to_string).collect();
                writeln!(out, "{n},{}", vals.join(",")).unwrap();
            }
        }
        Format::Markdown => {
            for (n, labels, g) in &rows {
                if shape != Some(labels.len()) {
                    shape = Some(labels.len());
                    let heads: Vec<String> = labels.iter().map(|l| l.replace('v', "ϖ")).collect();
                    writeln!(out, "| N | {} |", heads.join(" | ")).unwrap();
                    writeln!(out, "|---|{}", "---|".repeat(labels.len())).unwrap();
                }
                let vals: Vec<String> = g.iter().map(u64::to_string).collect();
                writeln!(out, "| {n} | {} |", vals.join(" | ")).unwrap();
            }
        }
    }
    Ok(out)
}

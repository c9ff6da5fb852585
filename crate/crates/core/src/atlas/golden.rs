//! Reference genus tables, embedded from `data/appendix_a.txt`.

use crate::error::{Error, Result};
use crate::ntheory::factor;
use crate::subgroup::AlSubgroup;
use std::collections::{BTreeMap, BTreeSet};

pub const APPENDIX_A: &str = include_str!("../../data/appendix_a.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusCell {
    pub n: u64,
    pub row: usize,
    pub label: &'static str,
    pub subgroup: AlSubgroup,
    pub genus: u64,
    pub hyperelliptic: bool,
}

pub const TWO_PRIME_ROWS: [&str; 4] = ["id", "<v1>", "<v2>", "<v1v2>"];

pub const THREE_PRIME_ROWS: [&str; 16] = [
    "id", "<v1>", "<v2>", "<v3>", "<v1v2>", "<v1v3>", "<v2v3>", "<v1v2v3>",
    "<v1,v2>", "<v1,v3>", "<v2,v3>", "<v1,v2v3>", "<v2,v1v3>", "<v3,v1v2>",
    "<v1v2,v1v3>", "B(N)",
];

/// Subgroup named by a row label such as "<v1,v2v3>", where vi is the i-th
/// prime-power part of N.
pub fn row_subgroup(n: u64, label: &str) -> Result<AlSubgroup> {
    let parts = factor(n)?.prime_powers();
    if label == "id" {
        return Ok(AlSubgroup::trivial(n));
    }
    if label == "B(N)" {
        return Ok(AlSubgroup::full(n));
    }
    let inner = label.trim_start_matches('<').trim_end_matches('>');
    let mut gens = Vec::new();
    for g in inner.split(',') {
        let mut d = 1;
        for idx in g.split('v').filter(|s| !s.is_empty()) {
            let i: usize = idx
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad row label {label}")))?;
            d *= parts
                .get(i - 1)
                .ok_or_else(|| Error::InvalidArgument(format!("{label} at N={n}")))?;
        }
        gens.push(d);
    }
    AlSubgroup::generated(n, &gens)
}

pub fn row_labels(n: u64) -> &'static [&'static str] {
    match crate::ntheory::omega(n) {
        2 => &TWO_PRIME_ROWS,
        _ => &THREE_PRIME_ROWS,
    }
}

pub fn parse_appendix_a(text: &str) -> Result<Vec<GenusCell>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |msg: &str| Error::Parse { line: lineno + 1, msg: msg.to_string() };
        let (n, cells) = line.split_once(':').ok_or_else(|| perr("missing ':'"))?;
        let n: u64 = n.trim().parse().map_err(|_| perr("bad level"))?;
        let cells: Vec<&str> = cells.split_whitespace().collect();
        let labels = row_labels(n);
        if cells.len() != labels.len() {
            return Err(perr("wrong number of cells"));
        }
        for (row, (cell, label)) in cells.iter().zip(labels).enumerate() {
            let hyperelliptic = cell.ends_with('*');
            let genus = cell.trim_end_matches('*').parse().map_err(|_| perr("bad cell"))?;
            out.push(GenusCell {
                n,
                row,
                label,
                subgroup: row_subgroup(n, label)?,
                genus,
                hyperelliptic,
            });
        }
    }
    Ok(out)
}

pub fn appendix_a() -> Vec<GenusCell> {
    parse_appendix_a(APPENDIX_A).expect("embedded table parses")
}

pub fn appendix_a_levels() -> Vec<u64> {
    let mut v: Vec<u64> = appendix_a().iter().map(|c| c.n).collect();
    v.dedup();
    v
}

/// Printed cells inside an order-4 relation g(X) + 2g(X/V) = g(X/a) + g(X/b) + g(X/ab)
/// that the printed column for `n` itself violates.
pub fn inconsistent_cells(cells: &[GenusCell], n: u64) -> BTreeSet<AlSubgroup> {
    let column: BTreeMap<&AlSubgroup, u64> =
        cells.iter().filter(|c| c.n == n).map(|c| (&c.subgroup, c.genus)).collect();
    let mut bad = BTreeSet::new();
    let Some(&g0) = column.get(&AlSubgroup::trivial(n)) else { return bad };
    for (v, &gv) in column.iter().filter(|(v, _)| v.order() == 4) {
        let lines: Vec<AlSubgroup> = v
            .elements
            .iter()
            .filter(|&&d| d != 1)
            .filter_map(|&d| AlSubgroup::generated(n, &[d]).ok())
            .collect();
        let Some(rhs) = lines.iter().map(|l| column.get(l).copied()).sum::<Option<u64>>() else { continue };
        if g0 + 2 * gv != rhs {
            bad.insert((*v).clone());
            bad.extend(lines);
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCheck {
    pub cell: GenusCell,
    pub computed: u64,
    /// The printed value sits in a relation its own column violates.
    pub misprint: bool,
}

/// Recomputes every embedded cell; returns the number verified and the
/// mismatching cells.
pub fn check_appendix_a() -> Result<(usize, Vec<CellCheck>)> {
    let cells = appendix_a();
    let mut bad = Vec::new();
    let mut ok = 0;
    let mut suspects: BTreeMap<u64, BTreeSet<AlSubgroup>> = BTreeMap::new();
    for c in &cells {
        let g = crate::modsym::invariant_genus(c.n, &c.subgroup)?;
        if g == c.genus {
            ok += 1;
            continue;
        }
        let s = suspects.entry(c.n).or_insert_with(|| inconsistent_cells(&cells, c.n));
        bad.push(CellCheck { cell: c.clone(), computed: g, misprint: s.contains(&c.subgroup) });
    }
    Ok((ok, bad))
}

//! Embedded datasets and their text formats.

use crate::error::{Error, Result};
use crate::subgroup::AlSubgroup;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::Path;

pub const BIELLIPTIC_PAIRS: &str = include_str!("../../data/bielliptic_pairs.txt");
pub const HYPERELLIPTIC_PAIRS: &str = include_str!("../../data/hyperelliptic_pairs.txt");
pub const ELLIPTIC_QUOTIENTS: &str = include_str!("../../data/elliptic_quotients.txt");
pub const EC_TABLE: &str = include_str!("../../data/ec_table.txt");
pub const ADJUDICATIONS: &str = include_str!("../../data/adjudications.txt");

/// File names looked up when datasets are loaded from a directory.
pub const FILE_NAMES: [&str; 5] = [
    "bielliptic_pairs.txt",
    "hyperelliptic_pairs.txt",
    "elliptic_quotients.txt",
    "ec_table.txt",
    "adjudications.txt",
];

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num(line: usize, s: &str) -> Result<u64> {
    s.parse().map_err(|_| perr(line, format!("bad number {s}")))
}

fn subgroup(line: usize, n: u64, gens: &str) -> Result<AlSubgroup> {
    AlSubgroup::parse(n, gens).map_err(|e| perr(line, e.to_string()))
}

/// A pair (N, W) together with a genus read from a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListedPair {
    pub n: u64,
    pub w: AlSubgroup,
    pub genus: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiellipticList {
    /// (order of W, levels) for the families mapping onto X0*(N) of genus 1.
    pub families: Vec<(usize, Vec<u64>)>,
    pub pairs: Vec<ListedPair>,
}

pub fn parse_bielliptic_list(text: &str) -> Result<BiellipticList> {
    let mut out = BiellipticList { families: vec![], pairs: vec![] };
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["family", order, rest @ ..] => {
                let order = num(ln, order.trim_end_matches(':'))? as usize;
                let levels = rest.iter().map(|t| num(ln, t)).collect::<Result<Vec<_>>>()?;
                out.families.push((order, levels));
            }
            ["pair", g, n, gens] => {
                let n = num(ln, n)?;
                out.pairs.push(ListedPair { n, w: subgroup(ln, n, gens)?, genus: num(ln, g)? });
            }
            _ => return Err(perr(ln, "expected 'family' or 'pair'")),
        }
    }
    Ok(out)
}

pub fn parse_hyperelliptic_list(text: &str) -> Result<Vec<ListedPair>> {
    content_lines(text)
        .map(|(ln, line)| {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [g, n, gens] = toks.as_slice() else {
                return Err(perr(ln, "expected GENUS N GENERATORS"));
            };
            let n = num(ln, n)?;
            Ok(ListedPair { n, w: subgroup(ln, n, gens)?, genus: num(ln, g)? })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Field {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Q(sqrt-3)")]
    Eisenstein,
}

impl Field {
    pub fn parse(s: &str) -> Option<Field> {
        match s {
            "Q" => Some(Field::Rationals),
            "Q(sqrt-3)" => Some(Field::Eisenstein),
            _ => None,
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Rationals => "Q",
            Field::Eisenstein => "Q(sqrt-3)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientEntry {
    pub n: u64,
    pub w: AlSubgroup,
    pub involution: String,
    pub label: String,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientData {
    /// Isogeny class of X0*(N) for the levels where it is elliptic.
    pub star: Vec<(u64, String)>,
    pub entries: Vec<QuotientEntry>,
}

impl QuotientData {
    pub fn star_label(&self, n: u64) -> Option<&str> {
        self.star.iter().find(|s| s.0 == n).map(|s| s.1.as_str())
    }

    pub fn entries_for<'a>(&'a self, n: u64, w: &'a AlSubgroup) -> impl Iterator<Item = &'a QuotientEntry> {
        self.entries.iter().filter(move |e| e.n == n && &e.w == w)
    }
}

pub fn parse_quotients(text: &str) -> Result<QuotientData> {
    let mut out = QuotientData { star: vec![], entries: vec![] };
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["star", n, label] => out.star.push((num(ln, n)?, label.to_string())),
            ["quotient", n, gens, inv, label, field] => {
                let n = num(ln, n)?;
                out.entries.push(QuotientEntry {
                    n,
                    w: subgroup(ln, n, gens)?,
                    involution: inv.to_string(),
                    label: label.to_string(),
                    field: Field::parse(field).ok_or_else(|| perr(ln, format!("bad field {field}")))?,
                });
            }
            _ => return Err(perr(ln, "expected 'star' or 'quotient'")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ECRecord {
    pub label: String,
    pub conductor: u64,
    pub rank: Option<u64>,
    pub modular_degree: Option<u64>,
}

/// Parses "label conductor rank degree" lines; '-' marks an absent field.
pub fn ingest_ec_table(text: &str) -> Result<Vec<ECRecord>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [label, cond, rank, deg] = toks.as_slice() else {
            return Err(perr(ln, "expected: label conductor rank degree"));
        };
        let opt = |s: &str| -> Result<Option<u64>> {
            if s == "-" {
                Ok(None)
            } else {
                num(ln, s).map(Some)
            }
        };
        let conductor = num(ln, cond)?;
        if conductor < 11 {
            return Err(perr(ln, format!("conductor {conductor} below 11")));
        }
        let modular_degree = opt(deg)?;
        if modular_degree == Some(0) {
            return Err(perr(ln, "modular degree must be positive"));
        }
        if !seen.insert(label.to_string()) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        out.push(ECRecord { label: label.to_string(), conductor, rank: opt(rank)?, modular_degree });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjudicatedKind {
    NotBielliptic,
    BiellipticOver(Field),
}

impl std::fmt::Display for AdjudicatedKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdjudicatedKind::NotBielliptic => f.write_str("not-bielliptic"),
            AdjudicatedKind::BiellipticOver(k) => write!(f, "bielliptic-over({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjudicatedVerdict {
    pub n: u64,
    pub w: AlSubgroup,
    pub verdict: AdjudicatedKind,
    pub citation: String,
}

/// Lines "N;W-generators;verdict;citation" with verdict "not-bielliptic" or
/// "bielliptic-over(FIELD)".
pub fn parse_adjudications(text: &str) -> Result<Vec<AdjudicatedVerdict>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (ln, line) in content_lines(text) {
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        let [n, gens, verdict, citation] = parts.as_slice() else {
            return Err(perr(ln, "expected N;W;verdict;citation"));
        };
        let n = num(ln, n)?;
        let w = subgroup(ln, n, gens)?;
        let verdict = if *verdict == "not-bielliptic" {
            AdjudicatedKind::NotBielliptic
        } else if let Some(f) = verdict.strip_prefix("bielliptic-over(").and_then(|s| s.strip_suffix(')')) {
            AdjudicatedKind::BiellipticOver(Field::parse(f).ok_or_else(|| perr(ln, format!("bad field {f}")))?)
        } else {
            return Err(perr(ln, format!("bad verdict {verdict}")));
        };
        if citation.is_empty() {
            return Err(perr(ln, "missing citation"));
        }
        if !seen.insert((n, w.elements.clone())) {
            return Err(perr(ln, format!("duplicate adjudication for ({n}, {w})")));
        }
        out.push(AdjudicatedVerdict { n, w, verdict, citation: citation.to_string() });
    }
    Ok(out)
}

/// All datasets the classification consults. Immutable after load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Datasets {
    pub bielliptic: BiellipticList,
    pub hyperelliptic: Vec<ListedPair>,
    pub quotients: QuotientData,
    pub ec: Vec<ECRecord>,
    pub adjudications: Vec<AdjudicatedVerdict>,
}

impl Datasets {
    pub fn embedded() -> Result<Self> {
        Self::from_texts([BIELLIPTIC_PAIRS, HYPERELLIPTIC_PAIRS, ELLIPTIC_QUOTIENTS, EC_TABLE, ADJUDICATIONS])
    }

    pub fn from_texts(t: [&str; 5]) -> Result<Self> {
        Ok(Datasets {
            bielliptic: parse_bielliptic_list(t[0])?,
            hyperelliptic: parse_hyperelliptic_list(t[1])?,
            quotients: parse_quotients(t[2])?,
            ec: ingest_ec_table(t[3])?,
            adjudications: parse_adjudications(t[4])?,
        })
    }

    /// Loads every file named in [`FILE_NAMES`] from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut texts = Vec::new();
        for name in FILE_NAMES {
            let p = dir.join(name);
            let t = std::fs::read_to_string(&p).map_err(|e| Error::MissingData(format!("{}: {e}", p.display())))?;
            texts.push(t);
        }
        Self::from_texts([&texts[0], &texts[1], &texts[2], &texts[3], &texts[4]])
    }

    pub fn is_listed_hyperelliptic(&self, n: u64, w: &AlSubgroup) -> bool {
        self.hyperelliptic.iter().any(|p| p.n == n && &p.w == w)
    }

    pub fn ec(&self, label: &str) -> Option<&ECRecord> {
        self.ec.iter().find(|r| r.label == label)
    }

    pub fn adjudication(&self, n: u64, w: &AlSubgroup) -> Option<&AdjudicatedVerdict> {
        self.adjudications.iter().find(|a| a.n == n && &a.w == w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ec_examples() {
        let r = ingest_ec_table("99a 99 1 4\n380a1 380 - 24\n").unwrap();
        assert_eq!(r[0], ECRecord { label: "99a".into(), conductor: 99, rank: Some(1), modular_degree: Some(4) });
        assert_eq!(r[1].modular_degree, Some(24));
        assert_eq!(r[1].rank, None);
        assert!(matches!(ingest_ec_table("# c\n11a 11 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ingest_ec_table("11a 11 0 1\n11a 11 0 1\n"), Err(Error::DuplicateLabel(_))));
        assert!(ingest_ec_table("x 7 0 1\n").is_err());
    }

    #[test]
    fn embedded_parse() {
        let d = Datasets::embedded().unwrap();
        assert_eq!(d.bielliptic.pairs.len(), 29);
        assert_eq!(d.bielliptic.families.iter().map(|f| f.1.len()).sum::<usize>(), 25);
        assert_eq!(d.hyperelliptic.len(), 39);
        assert_eq!(d.quotients.star.len(), 25);
    }

    #[test]
    fn adjudication_format() {
        let a = parse_adjudications("84;w3;not-bielliptic;lem7.6\n126;w63;bielliptic-over(Q(sqrt-3));lem7.3\n").unwrap();
        assert_eq!(a[0].verdict, AdjudicatedKind::NotBielliptic);
        assert_eq!(a[1].verdict, AdjudicatedKind::BiellipticOver(Field::Eisenstein));
        assert!(parse_adjudications("84;w3;maybe;x\n").is_err());
        assert!(parse_adjudications("84;w3;not-bielliptic;\n").is_err());
    }
}

//! Exclusion, confirmation and reduction rules for bielliptic quotients
//! X0(N)/W. Every rule is a pure predicate; callers assemble traces from
//! [`RuleStep`] values.

use crate::error::{Error, Result};
use crate::ntheory::{factor, hall_mul, is_prime, is_squarefree, psi};
use crate::subgroup::AlSubgroup;
use once_cell::sync::Lazy;
use serde::Serialize;
use std::fmt;

pub const STAR_TABLES: &str = include_str!("../data/star_tables.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Excludes,
    Reduces,
    Confirms,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Excludes => "excludes",
            Verdict::Reduces => "reduces",
            Verdict::Confirms => "confirms",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A rule identifier together with the label of the statement it mechanizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub id: &'static str,
    pub citation: &'static str,
}

pub const STAR_GATE: Rule = Rule { id: "star-gate", citation: "lemab3.1,levelstudy2" };
pub const CASTELNUOVO: Rule = Rule { id: "castelnuovo", citation: "4.4" };
pub const MANY_FIXED_POINTS: Rule = Rule { id: "many-fixed-points", citation: "4.1" };
pub const UNRAMIFIED_COVER: Rule = Rule { id: "unramified-cover", citation: "unramifiedcovering(b)" };
pub const HYPERELLIPTIC_LIFT: Rule = Rule { id: "hyperelliptic-lift", citation: "unramifiedcovering(a)" };
pub const TWO_GROUP: Rule = Rule { id: "two-group", citation: "prop3.1" };
pub const OGG_BOUND: Rule = Rule { id: "ogg-bound", citation: "lemadisca" };
pub const MODULAR_DEGREE: Rule = Rule { id: "modular-degree", citation: "lemadegree" };
pub const FIXED_POINT_CLOSURE: Rule = Rule { id: "fixed-point-closure", citation: "lemab3.1,unramifiedcovering(b)" };
pub const ISO_REDUCE_W4: Rule = Rule { id: "iso-reduce-w4", citation: "4.10" };
pub const ISO_REDUCE_V3: Rule = Rule { id: "iso-reduce-v3", citation: "4.12" };
pub const HURWITZ_CONFIRM: Rule = Rule { id: "hurwitz-confirm", citation: "4.13" };

/// One entry of a rule trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleStep {
    pub id: &'static str,
    pub citation: &'static str,
    pub inputs: String,
    /// Numeric arguments of the predicate, in parameter order.
    pub args: Vec<u64>,
    pub verdict: Verdict,
}

impl RuleStep {
    pub fn new(rule: Rule, inputs: impl Into<String>, args: Vec<u64>, verdict: Verdict) -> Self {
        RuleStep { id: rule.id, citation: rule.citation, inputs: inputs.into(), args, verdict }
    }
}

impl fmt::Display for RuleStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {} -> {}", self.id, self.citation, self.inputs, self.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarGateTables {
    pub genus0: Vec<u64>,
    pub genus1: Vec<u64>,
    pub genus2: Vec<u64>,
    /// (N, genus of X0*(N)) with X0*(N) hyperelliptic of genus > 2.
    pub hyperelliptic: Vec<(u64, u64)>,
    pub bielliptic: Vec<(u64, u64)>,
}

impl StarGateTables {
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = StarGateTables {
            genus0: vec![],
            genus1: vec![],
            genus2: vec![],
            hyperelliptic: vec![],
            bielliptic: vec![],
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let (key, rest) = line.split_once(':').ok_or_else(|| perr("missing ':'"))?;
            let num = |s: &str| s.parse::<u64>().map_err(|_| perr(&format!("bad number {s}")));
            let plain = || rest.split_whitespace().map(num).collect::<Result<Vec<_>>>();
            let paired = || {
                rest.split_whitespace()
                    .map(|tok| {
                        let (n, g) = tok.split_once(':').ok_or_else(|| perr(&format!("bad entry {tok}")))?;
                        Ok((num(n)?, num(g)?))
                    })
                    .collect::<Result<Vec<_>>>()
            };
            match key.trim() {
                "genus0" => t.genus0 = plain()?,
                "genus1" => t.genus1 = plain()?,
                "genus2" => t.genus2 = plain()?,
                "hyperelliptic" => t.hyperelliptic = paired()?,
                "bielliptic" => t.bielliptic = paired()?,
                other => return Err(perr(&format!("unknown list {other}"))),
            }
        }
        Ok(t)
    }

    /// Every level appearing in any list, ascending.
    pub fn levels(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .genus0
            .iter()
            .chain(&self.genus1)
            .chain(&self.genus2)
            .copied()
            .chain(self.hyperelliptic.iter().map(|p| p.0))
            .chain(self.bielliptic.iter().map(|p| p.0))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub static TABLES: Lazy<StarGateTables> =
    Lazy::new(|| StarGateTables::parse(STAR_TABLES).expect("embedded star tables parse"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateClass {
    Genus0,
    Genus1,
    Hyperelliptic(u64),
    Bielliptic(u64),
    FailsGate,
}

impl GateClass {
    pub fn star_genus(&self) -> Option<u64> {
        match self {
            GateClass::Genus0 => Some(0),
            GateClass::Genus1 => Some(1),
            GateClass::Hyperelliptic(g) | GateClass::Bielliptic(g) => Some(*g),
            GateClass::FailsGate => None,
        }
    }

    pub fn is_subhyperelliptic(&self) -> bool {
        matches!(self, GateClass::Genus0 | GateClass::Genus1 | GateClass::Hyperelliptic(_))
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateClass::Genus0 => write!(f, "genus0"),
            GateClass::Genus1 => write!(f, "genus1"),
            GateClass::Hyperelliptic(g) => write!(f, "hyperelliptic({g})"),
            GateClass::Bielliptic(g) => write!(f, "bielliptic({g})"),
            GateClass::FailsGate => write!(f, "fails-gate"),
        }
    }
}

fn is_prime_power(n: u64) -> bool {
    n > 1 && factor(n).map(|f| f.factors.len() == 1).unwrap_or(false)
}

/// Classifies X0*(N). Hyperelliptic takes precedence for the levels that
/// are listed as both hyperelliptic and bielliptic.
pub fn star_gate(n: u64) -> Result<GateClass> {
    if n < 2 || is_squarefree(n) || is_prime_power(n) {
        return Err(Error::InvalidArgument(format!(
            "{n} must be neither squarefree nor a prime power"
        )));
    }
    let t = &*TABLES;
    Ok(if t.genus0.contains(&n) {
        GateClass::Genus0
    } else if t.genus1.contains(&n) {
        GateClass::Genus1
    } else if t.genus2.contains(&n) {
        GateClass::Hyperelliptic(2)
    } else if let Some(&(_, g)) = t.hyperelliptic.iter().find(|p| p.0 == n) {
        GateClass::Hyperelliptic(g)
    } else if let Some(&(_, g)) = t.bielliptic.iter().find(|p| p.0 == n) {
        GateClass::Bielliptic(g)
    } else {
        GateClass::FailsGate
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Castelnuovo {
    Consistent,
    /// A bielliptic involution would have to factor through the map.
    MustFactor,
}

pub fn rule_castelnuovo(gx: u64, d: u64, gy: u64) -> Castelnuovo {
    if gx > d * gy + d + 1 {
        Castelnuovo::MustFactor
    } else {
        Castelnuovo::Consistent
    }
}

pub fn rule_many_fixed_points(fix_count: u64, quotient_is_elliptic: bool) -> Verdict {
    if fix_count > 8 && !quotient_is_elliptic {
        Verdict::Excludes
    } else {
        Verdict::Inconclusive
    }
}

/// X of genus g covers Y = X/G of genus h.
pub fn rule_unramified_cover(g: u64, group_order: u64, h: u64, y_hyperelliptic: bool) -> Verdict {
    if h < 2 || y_hyperelliptic {
        return Verdict::Inconclusive;
    }
    if g as i64 - 1 != group_order as i64 * (h as i64 - 1) {
        Verdict::Excludes
    } else {
        Verdict::Inconclusive
    }
}

/// Ramified cover X -> Y with Y hyperelliptic and g >= 6: a bielliptic
/// involution lifts the hyperelliptic involution of Y, so it lies among the
/// lifts supplied by the caller.
pub fn rule_hyperelliptic_lift(
    g: u64,
    group_order: u64,
    h: u64,
    y_hyperelliptic: bool,
    bielliptic_among_lifts: bool,
) -> Verdict {
    let ramified = g as i64 - 1 > group_order as i64 * (h as i64 - 1);
    if g >= 6 && h >= 2 && y_hyperelliptic && ramified && !bielliptic_among_lifts {
        Verdict::Excludes
    } else {
        Verdict::Inconclusive
    }
}

/// A subgroup of order 2^t acting on X with 2^t not dividing 2(g-1) must
/// contain the bielliptic involution when g >= 6.
pub fn rule_two_group(g: u64, subgroup_order: u64, bielliptic_in_subgroup: bool) -> Verdict {
    if g >= 6
        && subgroup_order.is_power_of_two()
        && (2 * (g - 1)) % subgroup_order != 0
        && !bielliptic_in_subgroup
    {
        Verdict::Excludes
    } else {
        Verdict::Inconclusive
    }
}

/// psi(N)/|W| <= 12 (2(p+1)^2 - 1)/(p-1) for quotients bielliptic over Q.
pub fn rule_ogg_bound(n: u64, w_order: u64, p: u64) -> Result<Verdict> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if n % p == 0 {
        return Err(Error::InvalidArgument(format!("{p} divides {n}")));
    }
    if w_order == 0 {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    // psi(N)/|W| > 12 (2(p+1)^2-1)/(p-1), cleared of denominators
    let lhs = psi(n) as u128 * (p as u128 - 1);
    let rhs = 12 * (2 * (p as u128 + 1).pow(2) - 1) * w_order as u128;
    Ok(if lhs > rhs { Verdict::Excludes } else { Verdict::Inconclusive })
}

/// The strong Weil degree D of the optimal curve of conductor N must divide 2|W|.
pub fn rule_modular_degree(w_order: u64, degree: Option<u64>) -> Result<Verdict> {
    let d = degree.ok_or_else(|| Error::MissingData("modular degree".into()))?;
    Ok(if (2 * w_order) % d != 0 { Verdict::Excludes } else { Verdict::Inconclusive })
}

/// For levels where X0*(N) is not subhyperelliptic: the cover X0(N)/W ->
/// X0*(N) must be unramified, so W holds every w_d with fixed points and
/// g(W) - 1 = [B(N):W](g* - 1). `fixed` lists the w_d with fixed points.
pub fn rule_fixed_point_closure(
    n: u64,
    w: &AlSubgroup,
    genus: u64,
    star_genus: u64,
    fixed: &[u64],
) -> Verdict {
    let index = (crate::ntheory::hall_divisors(n).len() / w.order()) as i64;
    if w.is_full() || star_genus < 2 {
        return Verdict::Inconclusive;
    }
    if fixed.iter().any(|&d| !w.contains(d)) {
        return Verdict::Excludes;
    }
    if genus as i64 - 1 != index * (star_genus as i64 - 1) {
        return Verdict::Excludes;
    }
    Verdict::Inconclusive
}

fn two_adic_exact(n: u64, k: u32) -> bool {
    n.trailing_zeros() == k
}

/// X0(N)/<w4, w_{m_i}> ~ X0(N/2)/<w_{m_i}> for 4 || N and odd m_i.
pub fn iso_reduce_w4(n: u64, w: &AlSubgroup) -> Result<(u64, AlSubgroup)> {
    if n != w.n || !two_adic_exact(n, 2) || !w.contains(4) {
        return Err(Error::NotApplicable(format!("iso_reduce_w4 on ({n}, {w})")));
    }
    let odd: Vec<u64> = w.elements.iter().copied().filter(|d| d % 2 == 1).collect();
    let m = n / 2;
    Ok((m, AlSubgroup::generated(m, &odd)?))
}

fn three_exponent(mut m: u64) -> u32 {
    let mut k = 0;
    while m % 3 == 0 {
        m /= 3;
        k += 1;
    }
    k
}

/// e(m) = 0 iff m = 1 mod 3, or 9 || m and m/9 = 1 mod 3.
fn v3_twist(m: u64) -> bool {
    let e3 = three_exponent(m);
    !(m % 3 == 1 || (e3 == 2 && (m / 9) % 3 == 1))
}

/// Image of W under conjugation by V3: w_m goes to w_m w9^{e(m)}.
pub fn iso_reduce_v3(n: u64, w: &AlSubgroup) -> Result<AlSubgroup> {
    if n != w.n || n % 9 != 0 || n % 27 == 0 {
        return Err(Error::InvalidArgument(format!("iso_reduce_v3 needs 9 || N, N={n}")));
    }
    let gens: Vec<u64> = w
        .generators()
        .into_iter()
        .map(|m| if v3_twist(m) { hall_mul(m, 9) } else { m })
        .collect();
    AlSubgroup::generated(n, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(n: u64, gens: &[u64]) -> AlSubgroup {
        AlSubgroup::generated(n, gens).unwrap()
    }

    #[test]
    fn gate_examples() {
        assert_eq!(star_gate(56).unwrap(), GateClass::Genus0);
        assert_eq!(star_gate(120).unwrap(), GateClass::Genus1);
        assert_eq!(star_gate(176).unwrap(), GateClass::Hyperelliptic(4));
        assert_eq!(star_gate(252).unwrap(), GateClass::Hyperelliptic(3));
        assert_eq!(star_gate(558).unwrap(), GateClass::Bielliptic(7));
        assert_eq!(star_gate(600).unwrap(), GateClass::FailsGate);
        assert!(star_gate(30).is_err());
        assert!(star_gate(64).is_err());
    }

    #[test]
    fn table_checksum() {
        let t = &*TABLES;
        let sum = |v: &[u64]| v.iter().sum::<u64>();
        assert_eq!((t.genus0.len(), sum(&t.genus0)), (13, 539));
        assert_eq!((t.genus1.len(), sum(&t.genus1)), (25, 2605));
        assert_eq!((t.genus2.len(), sum(&t.genus2)), (16, 2846));
        let hs: Vec<u64> = t.hyperelliptic.iter().map(|p| p.0).collect();
        assert_eq!((hs.len(), sum(&hs)), (7, 1536));
        assert_eq!(t.bielliptic.len(), 11 + 18 + 15 + 3 + 1);
        let bs: Vec<u64> = t.bielliptic.iter().map(|p| p.0).collect();
        assert_eq!(sum(&bs), 12334);
        assert_eq!(t.levels().len(), 13 + 25 + 16 + 7 + 48 - 11 - 3);
    }

    #[test]
    fn castelnuovo_examples() {
        assert_eq!(rule_castelnuovo(5, 2, 0), Castelnuovo::MustFactor);
        assert_eq!(rule_castelnuovo(11, 4, 1), Castelnuovo::MustFactor);
        assert_eq!(rule_castelnuovo(9, 4, 1), Castelnuovo::Consistent);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(rule_many_fixed_points(16, false), Verdict::Excludes);
        assert_eq!(rule_many_fixed_points(8, false), Verdict::Inconclusive);
        assert_eq!(rule_many_fixed_points(24, true), Verdict::Inconclusive);
    }

    #[test]
    fn unramified_examples() {
        assert_eq!(rule_unramified_cover(6, 2, 2, false), Verdict::Excludes);
        assert_eq!(rule_unramified_cover(9, 4, 3, false), Verdict::Inconclusive);
        assert_eq!(rule_unramified_cover(7, 2, 3, true), Verdict::Inconclusive);
    }

    #[test]
    fn two_group_examples() {
        assert_eq!(rule_two_group(14, 4, false), Verdict::Excludes);
        assert_eq!(rule_two_group(14, 4, true), Verdict::Inconclusive);
        assert_eq!(rule_two_group(5, 4, false), Verdict::Inconclusive);
        assert_eq!(rule_two_group(9, 4, false), Verdict::Inconclusive);
    }

    #[test]
    fn ogg_examples() {
        assert_eq!(rule_ogg_bound(284, 2, 3).unwrap(), Verdict::Excludes);
        assert_eq!(rule_ogg_bound(220, 2, 3).unwrap(), Verdict::Excludes);
        assert_eq!(rule_ogg_bound(40, 2, 3).unwrap(), Verdict::Inconclusive);
        assert!(rule_ogg_bound(120, 2, 3).is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(rule_modular_degree(2, Some(24)).unwrap(), Verdict::Excludes);
        assert_eq!(rule_modular_degree(2, Some(4)).unwrap(), Verdict::Inconclusive);
        assert_eq!(rule_modular_degree(4, Some(12)).unwrap(), Verdict::Excludes);
        assert!(matches!(rule_modular_degree(2, None), Err(Error::MissingData(_))));
    }

    #[test]
    fn w4_examples() {
        assert_eq!(iso_reduce_w4(44, &sg(44, &[4])).unwrap(), (22, AlSubgroup::trivial(22)));
        assert_eq!(iso_reduce_w4(60, &sg(60, &[4, 3])).unwrap(), (30, sg(30, &[3])));
        assert_eq!(iso_reduce_w4(180, &sg(180, &[4, 9])).unwrap(), (90, sg(90, &[9])));
        assert!(iso_reduce_w4(60, &sg(60, &[3])).is_err());
        assert!(iso_reduce_w4(88, &sg(88, &[8])).is_err());
    }

    #[test]
    fn v3_examples() {
        assert_eq!(iso_reduce_v3(126, &sg(126, &[14])).unwrap(), sg(126, &[126]));
        assert_eq!(iso_reduce_v3(153, &sg(153, &[17])).unwrap(), sg(153, &[153]));
        assert_eq!(iso_reduce_v3(90, &sg(90, &[5])).unwrap(), sg(90, &[45]));
        assert_eq!(iso_reduce_v3(90, &sg(90, &[9])).unwrap(), sg(90, &[9]));
        assert!(iso_reduce_v3(54, &sg(54, &[2])).is_err());
        assert!(iso_reduce_v3(60, &sg(60, &[3])).is_err());
    }
}

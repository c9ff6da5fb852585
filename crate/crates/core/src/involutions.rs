//! Fixed points of Atkin-Lehner involutions and of the extra involutions
//! S2, V2 = S2 w_{2^a} S2 and V3 = S3 w9 S3^2, their composition rules, and
//! quotient genera by elementary abelian 2-groups of them.

use crate::error::{Error, Result};
use crate::modsym::invariant_genus;
use crate::ntheory::{class_number, hall_divisors, hall_mul, is_hall, is_squarefree};
use crate::subgroup::AlSubgroup;
use crate::x0invariants::genus_x0;
use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    Al,
    S2,
    /// w_{2^a} S2 w_{2^a}
    S2C,
    V2,
    V3,
}

/// The element kind * w_d at level n; `Kind::Al` with d = 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExtInvolution {
    pub n: u64,
    pub kind: Kind,
    pub d: u64,
}

fn two_part(n: u64) -> u64 {
    1 << n.trailing_zeros()
}

fn two_exponent(n: u64) -> u32 {
    n.trailing_zeros()
}

fn three_free(d: u64) -> u64 {
    let mut d = d;
    while d % 3 == 0 {
        d /= 3;
    }
    d
}

fn violation<T>(msg: String) -> Result<T> {
    Err(Error::OrderViolation(msg))
}

impl ExtInvolution {
    pub fn identity(n: u64) -> Self {
        ExtInvolution { n, kind: Kind::Al, d: 1 }
    }

    pub fn al(n: u64, d: u64) -> Result<Self> {
        Self::new(n, Kind::Al, d)
    }

    pub fn new(n: u64, kind: Kind, d: u64) -> Result<Self> {
        if !is_hall(d, n) {
            return Err(Error::NotHall(d, n));
        }
        let e = ExtInvolution { n, kind, d };
        match kind {
            Kind::Al => {}
            Kind::S2 | Kind::S2C => {
                if n % 4 != 0 {
                    return Err(Error::InvalidArgument(format!("S2 needs 4 | N, N={n}")));
                }
                if d % 2 == 0 {
                    return violation(format!("{e}: S2 commutes only with odd w_r"));
                }
            }
            Kind::V2 => {
                if n % 4 != 0 {
                    return Err(Error::InvalidArgument(format!("V2 needs 4 | N, N={n}")));
                }
                if d % 2 == 0 && two_exponent(n) < 3 {
                    return violation(format!("{e} has order 4 when 4 || N"));
                }
            }
            Kind::V3 => {
                if n % 9 != 0 || n % 27 == 0 {
                    return Err(Error::InvalidArgument(format!("V3 needs 9 || N, N={n}")));
                }
                if three_free(d) % 3 != 1 {
                    return violation(format!("{e} has order 4: w_r with r = 2 mod 3"));
                }
            }
        }
        Ok(e)
    }

    pub fn is_identity(&self) -> bool {
        self.kind == Kind::Al && self.d == 1
    }

    pub fn is_al(&self) -> bool {
        self.kind == Kind::Al
    }

    /// Whether this element commutes with w_e under the implemented rules.
    fn commutes_with_al(&self, e: u64) -> bool {
        match self.kind {
            Kind::Al => true,
            Kind::S2 | Kind::S2C => e % 2 == 1,
            Kind::V2 => e % 2 == 1 || two_exponent(self.n) >= 3,
            Kind::V3 => three_free(e) % 3 == 1,
        }
    }

    pub fn parse(n: u64, text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad involution {text}"));
        let text = text.trim();
        if text == "1" || text == "id" {
            return Ok(Self::identity(n));
        }
        // conjugate notation w_{2^a}*S2*w_{2^a}
        if let [a, "S2", b] = text.split('*').collect::<Vec<_>>().as_slice() {
            if a == b && *a == format!("w{}", two_part(n)) {
                return Self::new(n, Kind::S2C, 1);
            }
            return Err(bad());
        }
        let (head, tail) = match text.split_once('*') {
            Some((h, t)) => (h, Some(t)),
            None => (text, None),
        };
        let parse_w = |s: &str| -> Result<u64> {
            s.strip_prefix('w').ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let (kind, d) = match head {
            "S2" => (Kind::S2, tail.map(parse_w).transpose()?.unwrap_or(1)),
            "S2C" => (Kind::S2C, tail.map(parse_w).transpose()?.unwrap_or(1)),
            "V2" => (Kind::V2, tail.map(parse_w).transpose()?.unwrap_or(1)),
            "V3" => (Kind::V3, tail.map(parse_w).transpose()?.unwrap_or(1)),
            _ if tail.is_none() => (Kind::Al, parse_w(head)?),
            _ => return Err(bad()),
        };
        Self::new(n, kind, d)
    }
}

impl fmt::Display for ExtInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            Kind::Al => return if self.d == 1 { write!(f, "1") } else { write!(f, "w{}", self.d) },
            Kind::S2 => "S2",
            Kind::S2C => "S2C",
            Kind::V2 => "V2",
            Kind::V3 => "V3",
        };
        if self.d == 1 {
            write!(f, "{prefix}")
        } else {
            write!(f, "{prefix}*w{}", self.d)
        }
    }
}

/// Product of two commuting involutions, in canonical form.
pub fn compose(a: &ExtInvolution, b: &ExtInvolution) -> Result<ExtInvolution> {
    if a.n != b.n {
        return Err(Error::InvalidArgument("elements at different levels".into()));
    }
    let n = a.n;
    match (a.kind, b.kind) {
        (Kind::Al, Kind::Al) => ExtInvolution::new(n, Kind::Al, hall_mul(a.d, b.d)),
        (k, Kind::Al) | (Kind::Al, k) => {
            let (x, e) = if a.kind == Kind::Al { (b, a.d) } else { (a, b.d) };
            if !x.commutes_with_al(e) {
                return violation(format!("{x} and w{e} do not commute"));
            }
            ExtInvolution::new(n, k, hall_mul(x.d, e))
        }
        (ka, kb) if ka == kb => ExtInvolution::new(n, Kind::Al, hall_mul(a.d, b.d)),
        _ => violation(format!("no commutation rule for {a} and {b}")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvolutionGroup {
    pub n: u64,
    /// Canonical elements, identity first.
    pub elements: Vec<ExtInvolution>,
}

impl InvolutionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: &ExtInvolution) -> bool {
        self.elements.contains(e)
    }

    /// The Atkin-Lehner part of the group.
    pub fn al_part(&self) -> AlSubgroup {
        let ds: Vec<u64> = self.elements.iter().filter(|e| e.is_al()).map(|e| e.d).collect();
        AlSubgroup::generated(self.n, &ds).expect("Hall divisors")
    }

    pub fn from_al(w: &AlSubgroup) -> Self {
        InvolutionGroup {
            n: w.n,
            elements: w.elements.iter().map(|&d| ExtInvolution { n: w.n, kind: Kind::Al, d }).collect(),
        }
    }
}

impl fmt::Display for InvolutionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", v.join(", "))
    }
}

pub fn group_closure(n: u64, gens: &[ExtInvolution]) -> Result<InvolutionGroup> {
    let mut set: BTreeSet<ExtInvolution> = BTreeSet::from([ExtInvolution::identity(n)]);
    let mut frontier = vec![ExtInvolution::identity(n)];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(&x, g)?;
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<ExtInvolution> = set.into_iter().collect();
    elements.sort_by_key(|e| (!e.is_identity(), *e));
    // every pair must commute for the group to be elementary abelian
    for a in &elements {
        for b in &elements {
            compose(a, b)?;
        }
    }
    if !elements.len().is_power_of_two() {
        return Err(Error::Integrity(format!("group of order {}", elements.len())));
    }
    Ok(InvolutionGroup { n, elements })
}

fn two_g_minus_two(n: u64) -> i64 {
    2 * genus_x0(n) as i64 - 2
}

pub fn fix_al(n: u64, qd: u64) -> Result<u64> {
    if !is_hall(qd, n) {
        return Err(Error::NotHall(qd, n));
    }
    if qd == 1 {
        return Err(Error::InvalidArgument("the identity has no fixed-point count".into()));
    }
    let h = invariant_genus(n, &AlSubgroup::generated(n, &[qd])?)?;
    let c = 2 * genus_x0(n) as i64 + 2 - 4 * h as i64;
    if c < 0 {
        return Err(Error::Integrity(format!("negative fixed count for w{qd} at N={n}")));
    }
    Ok(c as u64)
}

/// h(-4N) + h(-N)[N = 3 mod 4], the fixed-point count of w_N for squarefree N > 3.
pub fn fix_al_classnumber_crosscheck(n: u64) -> Result<u64> {
    if n <= 3 || !is_squarefree(n) {
        return Err(Error::InvalidArgument(format!("{n} is not a squarefree level above 3")));
    }
    let d = n as i64;
    let mut c = class_number(-4 * d)?;
    if n % 4 == 3 {
        c += class_number(-d)?;
    }
    Ok(c)
}

fn nonneg(v: i64, what: &str) -> Result<u64> {
    if v < 0 {
        return Err(Error::Integrity(format!("negative count {v} for {what}")));
    }
    Ok(v as u64)
}

pub fn fix_s2(n: u64) -> Result<u64> {
    if n % 4 != 0 {
        return Err(Error::InvalidArgument(format!("4 does not divide {n}")));
    }
    nonneg(two_g_minus_two(n) - 2 * two_g_minus_two(n / 2), &format!("S2 at N={n}"))
}

fn check_odd_hall(n: u64, r: u64) -> Result<()> {
    if !is_hall(r, n) {
        return Err(Error::NotHall(r, n));
    }
    if r % 2 == 0 {
        return Err(Error::InvalidArgument(format!("r={r} must be odd")));
    }
    Ok(())
}

/// #(S2 w_r, X0(N)) = 2#(w_r, X0(N/2)) - #(w_r, X0(N)); r = 1 gives fix_s2.
pub fn fix_s2_wr(n: u64, r: u64) -> Result<u64> {
    if n % 4 != 0 {
        return Err(Error::InvalidArgument(format!("4 does not divide {n}")));
    }
    check_odd_hall(n, r)?;
    if r == 1 {
        return fix_s2(n);
    }
    let v = 2 * fix_al(n / 2, r)? as i64 - fix_al(n, r)? as i64;
    nonneg(v, &format!("S2*w{r} at N={n}"))
}

/// #(V2 w_r, X0(N)) = #(w_{2^a} w_r, X0(N)) for odd r.
pub fn fix_v2(n: u64, r: u64) -> Result<u64> {
    if n % 4 != 0 {
        return Err(Error::InvalidArgument(format!("4 does not divide {n}")));
    }
    check_odd_hall(n, r)?;
    fix_al(n, two_part(n) * r)
}

/// #(V2 w_{2^a} w_r, X0(N)) = 2#(S2 w_r, X0(N/2)) - #(S2 w_r, X0(N)), a >= 3.
pub fn fix_v2_w2a(n: u64, r: u64) -> Result<u64> {
    if n % 8 != 0 {
        return Err(Error::OrderViolation(format!(
            "V2*w_(2^a) has order 4 unless 8 | N; N={n}"
        )));
    }
    check_odd_hall(n, r)?;
    let v = 2 * fix_s2_wr(n / 2, r)? as i64 - fix_s2_wr(n, r)? as i64;
    nonneg(v, &format!("V2*w{} at N={n}", two_part(n) * r))
}

/// #(V3 w_r, X0(N)) = #(w9 w_r, X0(N)); multiplying by w9 does not change it.
pub fn fix_v3(n: u64, r: u64) -> Result<u64> {
    if n % 9 != 0 || n % 27 == 0 {
        return Err(Error::InvalidArgument(format!("9 does not exactly divide {n}")));
    }
    if !is_hall(r, n) {
        return Err(Error::NotHall(r, n));
    }
    let r3 = three_free(r);
    if r3 % 3 != 1 {
        return Err(Error::OrderViolation(format!("V3*w{r} has order 4 at N={n}")));
    }
    fix_al(n, 9 * r3)
}

static FIX_CACHE: Lazy<Mutex<HashMap<ExtInvolution, u64>>> = Lazy::new(Default::default);

pub fn fix_count(e: &ExtInvolution) -> Result<u64> {
    if let Some(&c) = FIX_CACHE.lock().get(e) {
        return Ok(c);
    }
    let c = fix_count_uncached(e)?;
    FIX_CACHE.lock().insert(*e, c);
    Ok(c)
}

fn fix_count_uncached(e: &ExtInvolution) -> Result<u64> {
    let (n, d) = (e.n, e.d);
    match e.kind {
        Kind::Al => fix_al(n, d),
        Kind::S2 | Kind::S2C => fix_s2_wr(n, d),
        Kind::V2 if d % 2 == 1 => fix_v2(n, d),
        Kind::V2 => fix_v2_w2a(n, d / two_part(n)),
        Kind::V3 => fix_v3(n, d),
    }
}

/// Genus of X0(N)/G from |G|(2h-2) + sum #(w) = 2g-2.
pub fn quotient_genus_hurwitz(n: u64, g: &InvolutionGroup) -> Result<u64> {
    let mut total = 0i64;
    for e in g.elements.iter().filter(|e| !e.is_identity()) {
        total += fix_count(e)? as i64;
    }
    let rhs = two_g_minus_two(n) - total;
    let order = g.order() as i64;
    if rhs % order != 0 || (rhs / order) % 2 != 0 || rhs / order < -2 {
        return Err(Error::Integrity(format!(
            "no integral quotient genus for {g} at N={n}: 2g-2-sum = {rhs}"
        )));
    }
    Ok((rhs / order / 2 + 1) as u64)
}

/// All involutions of the implemented families at level N, canonical order.
pub fn all_involutions(n: u64) -> Vec<ExtInvolution> {
    let mut out = Vec::new();
    for kind in [Kind::Al, Kind::S2, Kind::S2C, Kind::V2, Kind::V3] {
        for &d in &hall_divisors(n) {
            if kind == Kind::Al && d == 1 {
                continue;
            }
            if let Ok(e) = ExtInvolution::new(n, kind, d) {
                out.push(e);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixTable {
    pub n: u64,
    pub entries: Vec<(ExtInvolution, u64)>,
}

impl FixTable {
    pub fn get(&self, e: &ExtInvolution) -> Option<u64> {
        self.entries.iter().find(|(x, _)| x == e).map(|(_, c)| *c)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("element\tcount\n");
        for (e, c) in &self.entries {
            s.push_str(&format!("{e}\t{c}\n"));
        }
        s
    }
}

pub fn fix_table(n: u64) -> Result<FixTable> {
    let entries = all_involutions(n)
        .into_iter()
        .map(|e| Ok((e, fix_count(&e)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FixTable { n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(n: u64, s: &str) -> ExtInvolution {
        ExtInvolution::parse(n, s).unwrap()
    }

    #[test]
    fn al_counts() {
        assert_eq!(fix_al(120, 15).unwrap(), 16);
        assert_eq!(fix_al(252, 63).unwrap(), 24);
        assert_eq!(fix_al(176, 176).unwrap(), 12);
        assert_eq!(fix_al(126, 9).unwrap(), 0);
        assert!(fix_al(120, 2).is_err());
    }

    #[test]
    fn class_number_route() {
        assert_eq!(fix_al_classnumber_crosscheck(15).unwrap(), 4);
        assert_eq!(fix_al_classnumber_crosscheck(11).unwrap(), 4);
        assert_eq!(fix_al_classnumber_crosscheck(21).unwrap(), fix_al(21, 21).unwrap());
        assert!(fix_al_classnumber_crosscheck(12).is_err());
    }

    #[test]
    fn s2_counts() {
        assert_eq!(fix_s2(120).unwrap(), 8);
        assert_eq!(fix_s2(44).unwrap(), 2);
        assert_eq!(fix_s2(60).unwrap(), 4);
        assert!(fix_s2(30).is_err());
        assert_eq!(fix_s2_wr(120, 15).unwrap(), 8);
        assert_eq!(
            fix_s2_wr(120, 5).unwrap() as i64,
            2 * fix_al(60, 5).unwrap() as i64 - fix_al(120, 5).unwrap() as i64
        );
        assert!(fix_s2_wr(120, 8).is_err());
    }

    #[test]
    fn v2_counts() {
        assert_eq!(fix_v2(120, 1).unwrap(), 0);
        assert_eq!(fix_v2(120, 3).unwrap(), 8);
        assert_eq!(fix_v2(176, 11).unwrap(), 12);
        assert_eq!(fix_v2_w2a(120, 5).unwrap(), 16);
        assert_eq!(fix_v2_w2a(120, 1).unwrap(), 0);
        assert_eq!(fix_v2_w2a(176, 1).unwrap(), 4);
        assert!(matches!(fix_v2_w2a(60, 1), Err(Error::OrderViolation(_))));
    }

    #[test]
    fn v3_counts() {
        assert_eq!(fix_v3(252, 7).unwrap(), 24);
        assert_eq!(fix_v3(252, 4).unwrap(), 0);
        assert_eq!(fix_v3(126, 7).unwrap(), 16);
        assert_eq!(fix_v3(252, 63).unwrap(), fix_v3(252, 7).unwrap());
        assert!(matches!(fix_v3(90, 2), Err(Error::OrderViolation(_))));
    }

    #[test]
    fn composition() {
        assert_eq!(compose(&inv(60, "w4"), &inv(60, "w12")).unwrap(), inv(60, "w3"));
        assert_eq!(compose(&inv(90, "V3"), &inv(90, "w9")).unwrap(), inv(90, "V3*w9"));
        assert!(matches!(compose(&inv(60, "V2"), &inv(60, "w4")), Err(Error::OrderViolation(_))));
        assert!(matches!(compose(&inv(60, "S2"), &inv(60, "w4")), Err(Error::OrderViolation(_))));
        assert!(matches!(compose(&inv(90, "V3"), &inv(90, "w2")), Err(Error::OrderViolation(_))));
        assert_eq!(compose(&inv(120, "V2"), &inv(120, "w8")).unwrap(), inv(120, "V2*w8"));
    }

    #[test]
    fn closures_and_hurwitz() {
        let g = group_closure(126, &[inv(126, "w9"), inv(126, "V3*w7")]).unwrap();
        let names: Vec<String> = g.elements.iter().map(|e| e.to_string()).collect();
        assert_eq!(names, vec!["1", "w9", "V3*w7", "V3*w63"]);
        assert_eq!(quotient_genus_hurwitz(126, &g).unwrap(), 1);

        let g = group_closure(120, &[inv(120, "w15"), inv(120, "S2")]).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(quotient_genus_hurwitz(120, &g).unwrap(), 1);

        let g = group_closure(252, &[inv(252, "w4"), inv(252, "w63"), inv(252, "V3")]).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(quotient_genus_hurwitz(252, &g).unwrap(), 1);
    }

    #[test]
    fn display_roundtrip() {
        for s in ["w63", "S2", "S2*w15", "S2C*w3", "V2*w40", "V3*w7", "V3"] {
            let n = if s.starts_with("V3") || s == "w63" { 252 } else { 120 };
            assert_eq!(inv(n, s).to_string(), s);
        }
        assert!(ExtInvolution::parse(120, "X2").is_err());
    }
}

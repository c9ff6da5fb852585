//! Classification driver: enumerates the pairs (N, W) in scope, runs the
//! screening rules, confirms bielliptic pairs with explicit witness groups,
//! merges adjudicated verdicts and decides infinitude of quadratic points.

pub mod data;
pub mod golden;
pub mod report;

use crate::error::{Error, Result};
use crate::involutions::{
    all_involutions, compose, group_closure, quotient_genus_hurwitz, ExtInvolution, InvolutionGroup, Kind,
};
use crate::modsym::invariant_genus;
use crate::ntheory::{hall_divisors, is_prime};
use crate::screening::{self as sc, Castelnuovo, GateClass, RuleStep, Verdict};
use crate::subgroup::AlSubgroup;
use crate::x0invariants::genus_x0;
use data::{AdjudicatedKind, Datasets, Field};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;

/// Levels of the star-gate lists with g(X0(N)) >= 2, except N = 420 (no
/// proper W survives the fixed-point closure there).
pub fn levels_in_scope() -> Vec<u64> {
    sc::TABLES
        .levels()
        .into_iter()
        .filter(|&n| n != 420 && genus_x0(n) >= 2)
        .collect()
}

/// Nontrivial W < B(N), W != <wN>, with genus >= 2, ordered by (N, mask).
pub fn enumerate_pairs() -> Result<Vec<(u64, AlSubgroup)>> {
    let per_level: Vec<Result<Vec<(u64, AlSubgroup)>>> =
        levels_in_scope().into_par_iter().map(pairs_at_level).collect();
    let mut out = Vec::new();
    for r in per_level {
        out.extend(r?);
    }
    Ok(out)
}

pub fn pairs_at_level(n: u64) -> Result<Vec<(u64, AlSubgroup)>> {
    let fricke = AlSubgroup::generated(n, &[n])?;
    let mut out = Vec::new();
    for w in AlSubgroup::all(n) {
        if w.is_trivial() || w.is_full() || w == fricke {
            continue;
        }
        if invariant_genus(n, &w)? >= 2 {
            out.push((n, w));
        }
    }
    Ok(out)
}

/// A witness that X0(n)/w is bielliptic: the group <w, involution> has a
/// genus-1 quotient. `chain` lists the isomorphisms used to reach (level, w).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: u64,
    pub w: AlSubgroup,
    pub involution: ExtInvolution,
    pub group: InvolutionGroup,
    pub quotient_genus: u64,
    pub field: Field,
    pub chain: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Status {
    GenusTooSmall,
    /// Listed hyperelliptic, with no bielliptic verdict from the rules or
    /// the adjudications.
    Hyperelliptic,
    BiellipticConfirmed { witness: Witness },
    Excluded,
    Adjudicated { verdict: AdjudicatedKind, source: String },
    /// No rule and no adjudication decides the pair.
    Unresolved,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::GenusTooSmall => "genus-too-small",
            Status::Hyperelliptic => "hyperelliptic",
            Status::BiellipticConfirmed { .. } => "bielliptic-confirmed",
            Status::Excluded => "excluded",
            Status::Adjudicated { .. } => "adjudicated",
            Status::Unresolved => "unresolved",
        }
    }

    pub fn is_bielliptic(&self) -> bool {
        matches!(
            self,
            Status::BiellipticConfirmed { .. } | Status::Adjudicated { verdict: AdjudicatedKind::BiellipticOver(_), .. }
        )
    }

    pub fn bielliptic_field(&self) -> Option<Field> {
        match self {
            Status::BiellipticConfirmed { witness } => Some(witness.field),
            Status::Adjudicated { verdict: AdjudicatedKind::BiellipticOver(f), .. } => Some(*f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "kebab-case")]
pub enum QuadPoints {
    Infinite(String),
    Finite,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub n: u64,
    pub w: AlSubgroup,
    pub genus: u64,
    pub status: Status,
    pub trace: Vec<RuleStep>,
    pub quadratic_points: QuadPoints,
}

fn al_gens(w: &AlSubgroup) -> Vec<ExtInvolution> {
    w.generators()
        .into_iter()
        .map(|d| ExtInvolution::al(w.n, d).expect("Hall divisor"))
        .collect()
}

/// Closure of W together with extra elements, if they generate an
/// elementary abelian group in the implemented families.
fn extend(w: &AlSubgroup, extra: &[ExtInvolution]) -> Option<InvolutionGroup> {
    let mut gens = al_gens(w);
    gens.extend_from_slice(extra);
    group_closure(w.n, &gens).ok()
}

fn group_genus(g: &InvolutionGroup) -> Result<u64> {
    if g.elements.iter().all(|e| e.is_al()) {
        invariant_genus(g.n, &g.al_part())
    } else {
        quotient_genus_hurwitz(g.n, g)
    }
}

/// Field of definition of the involution induced by v on X0(N)/W.
fn field_of(v: &ExtInvolution, w: &AlSubgroup) -> Field {
    if v.kind == Kind::V3 && !w.contains(9) {
        Field::Eisenstein
    } else {
        Field::Rationals
    }
}

/// Candidate involutions in search order: Atkin-Lehner, S2 family, V2
/// family, then the V3 family.
fn candidates(n: u64) -> Vec<ExtInvolution> {
    let mut c: Vec<ExtInvolution> = all_involutions(n);
    c.sort_by_key(|e| (e.kind, e.d));
    c
}

/// Searches the implemented families for an involution v with X0(N)/<W, v>
/// of genus 1. Involutions over Q are preferred.
pub fn confirm_bielliptic(n: u64, w: &AlSubgroup) -> Result<Option<Witness>> {
    let genus = invariant_genus(n, w)?;
    if genus < 2 {
        return Ok(None);
    }
    let mut found: Option<Witness> = None;
    for v in candidates(n) {
        if v.is_al() && w.contains(v.d) {
            continue;
        }
        let Some(group) = extend(w, &[v]) else { continue };
        if group.order() != 2 * w.order() {
            continue;
        }
        let h = quotient_genus_hurwitz(n, &group)?;
        if v.is_al() {
            let direct = invariant_genus(n, &group.al_part())?;
            if direct != h {
                return Err(Error::Integrity(format!(
                    "Hurwitz genus {h} and modular symbols genus {direct} differ for {group} at N={n}"
                )));
            }
        }
        if h != 1 {
            continue;
        }
        let wit = Witness {
            level: n,
            w: w.clone(),
            involution: v,
            group,
            quotient_genus: h,
            field: field_of(&v, w),
            chain: vec![],
        };
        if wit.field == Field::Rationals {
            return Ok(Some(wit));
        }
        found.get_or_insert(wit);
    }
    Ok(found)
}

fn valid_level(n: u64) -> bool {
    sc::star_gate(n).is_ok()
}

/// Whether X0(N)/W is known to be hyperelliptic, from the star-gate lists
/// and the embedded table of hyperelliptic quotients.
fn hyperelliptic_known(data: &Datasets, n: u64, w: &AlSubgroup) -> Result<Option<bool>> {
    if !valid_level(n) || w.is_trivial() {
        return Ok(None);
    }
    let g = invariant_genus(n, w)?;
    if g < 2 {
        return Ok(None);
    }
    if g == 2 {
        return Ok(Some(true));
    }
    if w.is_full() {
        return Ok(Some(matches!(sc::star_gate(n)?, GateClass::Hyperelliptic(_))));
    }
    if data.is_listed_hyperelliptic(n, w) {
        return Ok(Some(true));
    }
    if w.order() == 1 || w.elements == [1, n] {
        return Ok(None);
    }
    Ok(Some(false))
}

fn fmt_pair(n: u64, w: &AlSubgroup) -> String {
    format!("({n},{w})")
}

fn b(x: bool) -> u64 {
    x as u64
}

/// Whether some element s of `sup` outside W gives a genus-1 quotient <W, s>.
fn bielliptic_in(w: &AlSubgroup, sup: &InvolutionGroup) -> Result<bool> {
    for s in &sup.elements {
        if s.is_al() && w.contains(s.d) {
            continue;
        }
        if let Some(g) = extend(w, &[*s]) {
            if group_genus(&g)? == 1 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn smallest_prime_not_dividing(n: u64) -> u64 {
    (2..).find(|&p| is_prime(p) && n % p != 0).expect("some prime does not divide n")
}

/// The first exclusion found by the structural rules, if any.
fn exclusions(data: &Datasets, n: u64, w: &AlSubgroup, g: u64) -> Result<Option<RuleStep>> {
    let pair = fmt_pair(n, w);
    let hyp = hyperelliptic_known(data, n, w)?;

    // hyperelliptic of genus >= 4: the bielliptic map would factor through P^1
    if hyp == Some(true) && sc::rule_castelnuovo(g, 2, 0) == Castelnuovo::MustFactor {
        return Ok(Some(RuleStep::new(
            sc::CASTELNUOVO,
            format!("{pair} hyperelliptic: g={g} d=2 gY=0"),
            vec![g, 2, 0],
            Verdict::Excludes,
        )));
    }

    // ogg bound; the bielliptic involution is defined over Q once g >= 6
    if g >= 6 {
        let p = smallest_prime_not_dividing(n);
        if sc::rule_ogg_bound(n, w.order() as u64, p)? == Verdict::Excludes {
            return Ok(Some(RuleStep::new(
                sc::OGG_BOUND,
                format!("{pair} psi(N)/|W| with p={p}"),
                vec![n, w.order() as u64, p],
                Verdict::Excludes,
            )));
        }
    }

    let extended: Vec<ExtInvolution> = candidates(n).into_iter().filter(|e| !e.is_al()).collect();
    let supers: Vec<AlSubgroup> =
        AlSubgroup::all(n).into_iter().filter(|s| w.is_subgroup_of(s) && s != w).collect();

    // an involution with many fixed points must itself be bielliptic
    for x in candidates(n) {
        if x.is_al() && w.contains(x.d) {
            continue;
        }
        let Some(grp) = extend(w, &[x]) else { continue };
        let h = group_genus(&grp)?;
        let fix = 2 * g as i64 + 2 - 4 * h as i64;
        if fix < 0 {
            return Err(Error::Integrity(format!("negative fixed count for {x} on {pair}")));
        }
        if sc::rule_many_fixed_points(fix as u64, h == 1) == Verdict::Excludes {
            return Ok(Some(RuleStep::new(
                sc::MANY_FIXED_POINTS,
                format!("{pair} involution {x}: {fix} fixed points, quotient genus {h}"),
                vec![fix as u64, b(h == 1)],
                Verdict::Excludes,
            )));
        }
    }

    // unramified covering criterion over non-hyperelliptic Atkin-Lehner quotients
    for s in &supers {
        let h = invariant_genus(n, s)?;
        if hyperelliptic_known(data, n, s)? != Some(false) {
            continue;
        }
        let order = (s.order() / w.order()) as u64;
        if sc::rule_unramified_cover(g, order, h, false) == Verdict::Excludes {
            return Ok(Some(RuleStep::new(
                sc::UNRAMIFIED_COVER,
                format!("{pair} over {}: g={g} |G|={order} h={h}, Y not hyperelliptic", fmt_pair(n, s)),
                vec![g, order, h, 0],
                Verdict::Excludes,
            )));
        }
    }

    // Castelnuovo: a bielliptic involution would lie in the deck group
    let mut groups: Vec<InvolutionGroup> = supers.iter().map(InvolutionGroup::from_al).collect();
    for base in std::iter::once(w).chain(supers.iter()) {
        for x in &extended {
            if let Some(grp) = extend(base, &[*x]) {
                if !groups.contains(&grp) {
                    groups.push(grp);
                }
            }
        }
    }
    for grp in &groups {
        let d = (grp.order() / w.order()) as u64;
        let gy = group_genus(grp)?;
        if sc::rule_castelnuovo(g, d, gy) == Castelnuovo::MustFactor && !bielliptic_in(w, grp)? {
            return Ok(Some(RuleStep::new(
                sc::CASTELNUOVO,
                format!("{pair} -> X0({n})/{grp}: g={g} d={d} gY={gy}, no deck involution has elliptic quotient"),
                vec![g, d, gy],
                Verdict::Excludes,
            )));
        }
    }

    // 2-subgroups of Aut(X) whose order does not divide 2(g-1)
    if g >= 6 {
        for grp in groups.iter().filter(|grp| grp.al_part().is_full()) {
            let order = (grp.order() / w.order()) as u64;
            let inside = bielliptic_in(w, grp)?;
            if sc::rule_two_group(g, order, inside) == Verdict::Excludes {
                return Ok(Some(RuleStep::new(
                    sc::TWO_GROUP,
                    format!("{pair} acted on by {grp}/W of order {order}, g={g}"),
                    vec![g, order, 0],
                    Verdict::Excludes,
                )));
            }
        }
    }

    // ramified cover of a hyperelliptic quotient whose hyperelliptic
    // involution is visible in the implemented families
    if g >= 6 {
        for s in &supers {
            if hyperelliptic_known(data, n, s)? != Some(true) {
                continue;
            }
            let h = invariant_genus(n, s)?;
            let order = (s.order() / w.order()) as u64;
            let Some(u) = hyperelliptic_involution(s, &extended)? else { continue };
            let mut lifts = Vec::new();
            for &d in &s.elements {
                lifts.push(compose(&u, &ExtInvolution::al(n, d)?)?);
            }
            let mut inside = false;
            for l in &lifts {
                if let Some(grp) = extend(w, &[*l]) {
                    if group_genus(&grp)? == 1 {
                        inside = true;
                    }
                }
            }
            if sc::rule_hyperelliptic_lift(g, order, h, true, inside) == Verdict::Excludes {
                return Ok(Some(RuleStep::new(
                    sc::HYPERELLIPTIC_LIFT,
                    format!(
                        "{pair} over {}: g={g} |G|={order} h={h}, hyperelliptic involution {u}",
                        fmt_pair(n, s)
                    ),
                    vec![g, order, h, 1, 0],
                    Verdict::Excludes,
                )));
            }
        }
    }

    // levels where X0*(N) is not subhyperelliptic
    if let Ok(GateClass::Bielliptic(gs)) = sc::star_gate(n) {
        let fixed = fixed_al(n)?;
        if sc::rule_fixed_point_closure(n, w, g, gs, &fixed) == Verdict::Excludes {
            return Ok(Some(RuleStep::new(
                sc::FIXED_POINT_CLOSURE,
                format!("{pair}: g={g} g*={gs}, w_d with fixed points {fixed:?}"),
                vec![n, w.mask() as u64, g, gs],
                Verdict::Excludes,
            )));
        }
    }
    Ok(None)
}

/// Hall divisors d > 1 for which w_d has fixed points on X0(N).
pub fn fixed_al(n: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for d in hall_divisors(n).into_iter().skip(1) {
        if crate::involutions::fix_al(n, d)? > 0 {
            out.push(d);
        }
    }
    Ok(out)
}

/// An involution u with X0(N)/<S, u> of genus 0, which then induces the
/// hyperelliptic involution of X0(N)/S.
fn hyperelliptic_involution(s: &AlSubgroup, extended: &[ExtInvolution]) -> Result<Option<ExtInvolution>> {
    for u in extended {
        if let Some(grp) = extend(s, &[*u]) {
            if grp.order() == 2 * s.order() && group_genus(&grp)? == 0 {
                return Ok(Some(*u));
            }
        }
    }
    Ok(None)
}

/// Pairs isomorphic to (N, W) through iso_reduce_w4 and iso_reduce_v3,
/// with the reduction steps that reach each.
fn reduction_images(n: u64, w: &AlSubgroup) -> Vec<(u64, AlSubgroup, Vec<RuleStep>)> {
    let mut seen: BTreeSet<(u64, Vec<u64>)> = BTreeSet::from([(n, w.elements.clone())]);
    let mut out: Vec<(u64, AlSubgroup, Vec<RuleStep>)> = Vec::new();
    let mut frontier = vec![(n, w.clone(), Vec::new())];
    while let Some((m, x, steps)) = frontier.pop() {
        let mut next = Vec::new();
        if let Ok((m2, x2)) = sc::iso_reduce_w4(m, &x) {
            next.push((m2, x2, sc::ISO_REDUCE_W4));
        }
        if m % 9 == 0 && m % 27 != 0 {
            if let Ok(x2) = sc::iso_reduce_v3(m, &x) {
                next.push((m, x2, sc::ISO_REDUCE_V3));
            }
        }
        for (m2, x2, rule) in next {
            if !seen.insert((m2, x2.elements.clone())) {
                continue;
            }
            let mut s = steps.clone();
            s.push(RuleStep::new(
                rule,
                format!("{} ~ {}", fmt_pair(m, &x), fmt_pair(m2, &x2)),
                vec![m, x.mask() as u64, m2, x2.mask() as u64],
                Verdict::Reduces,
            ));
            out.push((m2, x2.clone(), s.clone()));
            frontier.push((m2, x2, s));
        }
    }
    out.sort_by_key(|(m, x, s)| (s.len(), std::cmp::Reverse(*m), x.mask()));
    out
}

fn chain_text(steps: &[RuleStep]) -> Vec<String> {
    steps.iter().map(|s| format!("{} [{}]", s.inputs, s.citation)).collect()
}

fn in_scope(n: u64, w: &AlSubgroup) -> bool {
    levels_in_scope().contains(&n) && !w.is_trivial() && !w.is_full() && w.elements != [1, n]
}

/// Runs the full pipeline on one pair.
pub fn classify_pair(data: &Datasets, n: u64, w: &AlSubgroup) -> Result<PairRecord> {
    let genus = invariant_genus(n, w)?;
    let mut trace = Vec::new();
    let gate = sc::star_gate(n)?;
    let gate_verdict = if gate == GateClass::FailsGate { Verdict::Excludes } else { Verdict::Inconclusive };
    trace.push(RuleStep::new(sc::STAR_GATE, format!("N={n}: X0*(N) {gate}"), vec![n], gate_verdict));
    let record = PairRecord {
        n,
        w: w.clone(),
        genus,
        status: Status::Unresolved,
        trace: vec![],
        quadratic_points: QuadPoints::NotApplicable,
    };
    let finish = |mut rec: PairRecord, trace: Vec<RuleStep>, status: Status| -> Result<PairRecord> {
        rec.trace = trace;
        rec.status = status;
        rec.quadratic_points = quadratic_points(&rec, data)?;
        Ok(rec)
    };
    if gate == GateClass::FailsGate {
        return finish(record, trace, Status::Excluded);
    }
    if genus < 2 {
        return finish(record, trace, Status::GenusTooSmall);
    }

    let images = reduction_images(n, w);

    if let Some(wit) = confirm_bielliptic(n, w)? {
        trace.push(confirm_step(n, w, &wit));
        return finish(record, trace, Status::BiellipticConfirmed { witness: wit });
    }
    for (m, x, steps) in &images {
        if let Some(mut wit) = confirm_bielliptic(*m, x)? {
            if steps.iter().any(|s| s.id == sc::ISO_REDUCE_V3.id) && !w.contains(9) {
                wit.field = Field::Eisenstein;
            }
            wit.chain = chain_text(steps);
            trace.extend(steps.iter().cloned());
            trace.push(confirm_step(*m, x, &wit));
            return finish(record, trace, Status::BiellipticConfirmed { witness: wit });
        }
    }

    if let Some(step) = exclusions(data, n, w, genus)? {
        trace.push(step);
        return finish(record, trace, Status::Excluded);
    }
    for (m, x, steps) in &images {
        let g2 = invariant_genus(*m, x)?;
        if let Some(step) = exclusions(data, *m, x, g2)? {
            trace.extend(steps.iter().cloned());
            trace.push(step);
            return finish(record, trace, Status::Excluded);
        }
    }

    if let Some(a) = data.adjudication(n, w) {
        let status = Status::Adjudicated { verdict: a.verdict, source: a.citation.clone() };
        return finish(record, trace, status);
    }
    for (m, x, steps) in &images {
        if !in_scope(*m, x) {
            continue;
        }
        if let Some(a) = data.adjudication(*m, x) {
            trace.extend(steps.iter().cloned());
            let via: Vec<&str> = steps.iter().map(|s| s.citation).collect();
            let source = format!("{} via {} at {}", a.citation, via.join("+"), fmt_pair(*m, x));
            return finish(record, trace, Status::Adjudicated { verdict: a.verdict, source });
        }
    }
    let last = if data.is_listed_hyperelliptic(n, w) { Status::Hyperelliptic } else { Status::Unresolved };
    finish(record, trace, last)
}

fn confirm_step(n: u64, w: &AlSubgroup, wit: &Witness) -> RuleStep {
    RuleStep::new(
        sc::HURWITZ_CONFIRM,
        format!(
            "{}: X0({n})/<W,{}> has genus {} (over {})",
            fmt_pair(n, w),
            wit.involution,
            wit.quotient_genus,
            wit.field
        ),
        vec![n, w.mask() as u64, wit.quotient_genus],
        Verdict::Confirms,
    )
}

/// Classifies every pair in scope; the output is sorted by (N, mask).
pub fn classify_all(data: &Datasets) -> Result<Vec<PairRecord>> {
    let levels = levels_in_scope();
    let per_level: Vec<Result<Vec<PairRecord>>> = levels
        .into_par_iter()
        .map(|n| {
            pairs_at_level(n)?
                .into_iter()
                .map(|(n, w)| classify_pair(data, n, &w))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for r in per_level {
        out.extend(r?);
    }
    out.sort_by_key(|r| (r.n, r.w.mask()));
    check_adjudications(data, &out)?;
    Ok(out)
}

/// Adjudicated verdicts may only decide pairs the rules leave open, and a
/// listed bielliptic pair must never end excluded.
fn check_adjudications(data: &Datasets, records: &[PairRecord]) -> Result<()> {
    for a in &data.adjudications {
        let Some(r) = records.iter().find(|r| r.n == a.n && r.w == a.w) else {
            return Err(Error::Integrity(format!("adjudication for ({},{}) is out of scope", a.n, a.w)));
        };
        if !matches!(r.status, Status::Adjudicated { .. }) {
            return Err(Error::Integrity(format!(
                "adjudication for ({},{}) but the rules decide it: {}",
                a.n,
                a.w,
                r.status.name()
            )));
        }
    }
    let listed = listed_bielliptic(data)?;
    for r in records {
        let is_listed = listed.iter().any(|(n, w, _)| *n == r.n && *w == r.w);
        if is_listed && matches!(r.status, Status::Excluded | Status::Hyperelliptic) {
            return Err(Error::Integrity(format!("listed bielliptic pair ({},{}) was excluded", r.n, r.w)));
        }
    }
    Ok(())
}

/// The listed bielliptic pairs with their genera: the families expanded
/// over every W of the given order with genus >= 2, then the explicit pairs.
pub fn listed_bielliptic(data: &Datasets) -> Result<Vec<(u64, AlSubgroup, u64)>> {
    let mut out = Vec::new();
    for (order, levels) in &data.bielliptic.families {
        for &n in levels {
            for (_, w) in pairs_at_level(n)? {
                if w.order() == *order {
                    out.push((n, w.clone(), invariant_genus(n, &w)?));
                }
            }
        }
    }
    for p in &data.bielliptic.pairs {
        out.push((p.n, p.w.clone(), p.genus));
    }
    out.sort_by_key(|(n, w, _)| (*n, w.mask()));
    Ok(out)
}

/// Infinitude of quadratic points: hyperelliptic, or bielliptic over Q onto
/// an elliptic curve of positive rank.
pub fn quadratic_points(record: &PairRecord, data: &Datasets) -> Result<QuadPoints> {
    if matches!(record.status, Status::GenusTooSmall) {
        return Ok(QuadPoints::NotApplicable);
    }
    let (n, w) = (record.n, &record.w);
    if data.is_listed_hyperelliptic(n, w) {
        return Ok(QuadPoints::Infinite("hyperelliptic".into()));
    }
    if record.status.bielliptic_field() != Some(Field::Rationals) {
        return Ok(QuadPoints::Finite);
    }
    let mut labels: Vec<&str> = data
        .quotients
        .entries_for(n, w)
        .filter(|e| e.field == Field::Rationals)
        .map(|e| e.label.as_str())
        .collect();
    let index = hall_divisors(n).len() / w.order();
    if index == 2 {
        if let Some(l) = data.quotients.star_label(n) {
            labels.push(l);
        }
    }
    if labels.is_empty() {
        return Err(Error::MissingData(format!("elliptic quotient of {}", fmt_pair(n, w))));
    }
    labels.sort_unstable();
    labels.dedup();
    for label in labels {
        let ec = data.ec(label).ok_or_else(|| Error::MissingData(format!("curve {label}")))?;
        let rank = ec.rank.ok_or_else(|| Error::MissingData(format!("rank of {label}")))?;
        if rank == 0 {
            continue;
        }
        if ec.conductor == n {
            if let Some(deg) = ec.modular_degree {
                if sc::rule_modular_degree(w.order() as u64, Some(deg))? == Verdict::Excludes {
                    continue;
                }
            }
        }
        return Ok(QuadPoints::Infinite(format!("bielliptic over Q onto {label} of rank {rank}")));
    }
    Ok(QuadPoints::Finite)
}

/// Summary counts of a classification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pairs: usize,
    pub confirmed: usize,
    pub excluded: usize,
    pub hyperelliptic: usize,
    pub adjudicated: usize,
    pub unresolved: usize,
}

pub fn summarize(records: &[PairRecord]) -> Summary {
    let count = |f: &dyn Fn(&Status) -> bool| records.iter().filter(|r| f(&r.status)).count();
    Summary {
        pairs: records.len(),
        confirmed: count(&|s| matches!(s, Status::BiellipticConfirmed { .. })),
        excluded: count(&|s| matches!(s, Status::Excluded)),
        hyperelliptic: count(&|s| matches!(s, Status::Hyperelliptic)),
        adjudicated: count(&|s| matches!(s, Status::Adjudicated { .. })),
        unresolved: count(&|s| matches!(s, Status::Unresolved)),
    }
}

/// Re-verifies a witness: genus 1 by the Hurwitz count and, for purely
/// Atkin-Lehner groups, by modular symbols.
pub fn verify_witness(wit: &Witness) -> Result<bool> {
    let h = quotient_genus_hurwitz(wit.level, &wit.group)?;
    if h != 1 {
        return Ok(false);
    }
    if wit.group.elements.iter().all(|e| e.is_al()) {
        return Ok(invariant_genus(wit.level, &wit.group.al_part())? == 1);
    }
    Ok(true)
}

fn audit_step(step: &RuleStep) -> Result<bool> {
    let a = &step.args;
    let arity = |k: usize| -> Result<()> {
        if a.len() == k {
            Ok(())
        } else {
            Err(Error::Integrity(format!("{}: expected {k} args, got {}", step.id, a.len())))
        }
    };
    let excl = |v: Verdict| v == step.verdict;
    let ok = match step.id {
        "star-gate" => {
            arity(1)?;
            let fails = sc::star_gate(a[0])? == GateClass::FailsGate;
            excl(if fails { Verdict::Excludes } else { Verdict::Inconclusive })
        }
        "castelnuovo" => {
            arity(3)?;
            step.verdict == Verdict::Excludes && sc::rule_castelnuovo(a[0], a[1], a[2]) == Castelnuovo::MustFactor
        }
        "many-fixed-points" => {
            arity(2)?;
            excl(sc::rule_many_fixed_points(a[0], a[1] == 1))
        }
        "unramified-cover" => {
            arity(4)?;
            excl(sc::rule_unramified_cover(a[0], a[1], a[2], a[3] == 1))
        }
        "hyperelliptic-lift" => {
            arity(5)?;
            excl(sc::rule_hyperelliptic_lift(a[0], a[1], a[2], a[3] == 1, a[4] == 1))
        }
        "two-group" => {
            arity(3)?;
            excl(sc::rule_two_group(a[0], a[1], a[2] == 1))
        }
        "ogg-bound" => {
            arity(3)?;
            excl(sc::rule_ogg_bound(a[0], a[1], a[2])?)
        }
        "fixed-point-closure" => {
            arity(4)?;
            let w = AlSubgroup::from_mask(a[0], a[1] as u32)?;
            excl(sc::rule_fixed_point_closure(a[0], &w, a[2], a[3], &fixed_al(a[0])?))
        }
        "iso-reduce-w4" => {
            arity(4)?;
            let w = AlSubgroup::from_mask(a[0], a[1] as u32)?;
            let (m, x) = sc::iso_reduce_w4(a[0], &w)?;
            m == a[2] && x.mask() as u64 == a[3]
        }
        "iso-reduce-v3" => {
            arity(4)?;
            let w = AlSubgroup::from_mask(a[0], a[1] as u32)?;
            a[0] == a[2] && sc::iso_reduce_v3(a[0], &w)?.mask() as u64 == a[3]
        }
        "hurwitz-confirm" => {
            arity(3)?;
            step.verdict == Verdict::Confirms && a[2] == 1
        }
        other => return Err(Error::Integrity(format!("unknown rule {other}"))),
    };
    Ok(ok)
}

/// Re-derives every step of a record's trace from its stored arguments and
/// re-verifies the witness. Returns the offending step on failure.
pub fn audit(record: &PairRecord) -> Result<()> {
    for step in &record.trace {
        if !audit_step(step)? {
            return Err(Error::Integrity(format!("({},{}) step does not re-derive: {step}", record.n, record.w)));
        }
    }
    if let Status::BiellipticConfirmed { witness } = &record.status {
        if !verify_witness(witness)? {
            return Err(Error::Integrity(format!("({},{}) witness fails re-verification", record.n, record.w)));
        }
    }
    Ok(())
}

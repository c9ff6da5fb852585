//! Weight-2 modular symbols for Gamma0(N) over Q.
//!
//! Manin symbols are indexed by P^1(Z/N). The space is the quotient by the
//! relations x + x*sigma = 0 and x + x*tau + x*tau^2 = 0, with
//! (c:d)sigma = (d:-c) and (c:d)tau = (d:-c-d). A symbol (c:d) stands for
//! {g0, g(oo)} where g in SL2(Z) has bottom row (c, d).

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, from_terms, get, q, rref, Matrix, SparseVec, Q};
use crate::ntheory::{hall_divisors, is_hall, mod_inverse, psi};
use crate::subgroup::AlSubgroup;
use crate::x0invariants::{cusp_count, genus_x0};
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::{Lazy, OnceCell};
use parking_lot::Mutex;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P1Element {
    pub c: u64,
    pub d: u64,
}

/// P^1(Z/N) with canonical representatives: the lexicographically smallest
/// (c, d) in each orbit under scaling by units.
#[derive(Debug, Clone)]
pub struct P1List {
    pub n: u64,
    pub elems: Vec<P1Element>,
    index: Vec<u32>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        let nn = n as usize;
        let units: Vec<u64> = (0..n).filter(|u| u.gcd(&n) == 1).collect();
        let mut index = vec![u32::MAX; nn * nn];
        let mut elems = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if index[(c * n + d) as usize] != u32::MAX || c.gcd(&d).gcd(&n) != 1 {
                    continue;
                }
                let id = elems.len() as u32;
                elems.push(P1Element { c, d });
                for &u in &units {
                    index[((u * c % n) * n + u * d % n) as usize] = id;
                }
            }
        }
        P1List { n, elems, index }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
        match self.index[(c * n + d) as usize] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }
}

pub fn p1_enumerate(n: u64) -> Vec<P1Element> {
    P1List::new(n).elems
}

/// A matrix [a, b; c, d] in SL2(Z) whose bottom row reduces to (c, d) mod N.
pub fn lift_to_sl2z(c: u64, d: u64, n: u64) -> [i64; 4] {
    if n == 1 {
        return [1, 0, 0, 1];
    }
    let nn = n as i64;
    let c = if c == 0 { nn } else { c as i64 };
    let mut d = d as i64;
    while c.gcd(&d) != 1 {
        d += nn;
    }
    let e = d.extended_gcd(&c);
    [e.x, -e.y, c, d]
}

/// Gamma0(N)-class invariant of the cusp a/c: (gcd(c,N), a*(c/gcd(c,N)) mod gcd(d, N/d)).
pub fn cusp_key(a: i64, c: i64, n: u64) -> (u64, u64) {
    let g = a.gcd(&c).max(1);
    let (a, c) = (a / g, c / g);
    let nn = n as i64;
    let d = c.gcd(&nn);
    let e = d.gcd(&(nn / d));
    let x = if c == 0 { 0 } else { (a * (c / d)).rem_euclid(e) };
    (d as u64, x as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cusp {
    pub d: u64,
    pub x: u64,
    /// A representative a/c as (a, c).
    pub representative: (i64, i64),
}

#[derive(Debug, Clone)]
pub struct CuspClasses {
    pub n: u64,
    pub classes: Vec<Cusp>,
    index: HashMap<(u64, u64), usize>,
}

impl CuspClasses {
    pub fn class_of(&self, a: i64, c: i64) -> usize {
        self.index[&cusp_key(a, c, self.n)]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

pub fn cusp_classes(n: u64) -> CuspClasses {
    let mut classes = Vec::new();
    for d in crate::ntheory::divisors(n) {
        let e = d.gcd(&(n / d));
        for x in (0..e).filter(|x| x.gcd(&e) == 1) {
            let a = (0..).map(|k| x + k * e).find(|a| a.gcd(&d) == 1).expect("representative");
            let rep = if d == n { (1, 0) } else { (a as i64, d as i64) };
            debug_assert_eq!(cusp_key(rep.0, rep.1, n), (d, x));
            classes.push(Cusp { d, x, representative: rep });
        }
    }
    let index = classes.iter().enumerate().map(|(i, c)| ((c.d, c.x), i)).collect();
    CuspClasses { n, classes, index }
}

#[derive(Debug, Clone)]
pub struct AlOperator {
    pub q: u64,
    /// Witness [Q*a, b; N*c, Q*d] with determinant Q, row-major.
    pub witness: [i64; 4],
    /// Image of each basis symbol of the full space, in full-space coordinates.
    pub on_full: Vec<SparseVec>,
    /// Action on the cuspidal basis (columns are images).
    pub on_cuspidal: Matrix,
}

/// Witness for w_Q: among matrices [Q*a, b; N*c, Q*d] of determinant Q,
/// the one with smallest |b|, then smallest |c|, preferring negative values.
pub fn al_witness(n: u64, qd: u64) -> Result<[i64; 4]> {
    if !is_hall(qd, n) {
        return Err(Error::NotHall(qd, n));
    }
    if qd == 1 {
        return Ok([1, 0, 0, 1]);
    }
    let (nn, qq, m) = (n as i64, qd as i64, (n / qd) as i64);
    let minv = mod_inverse(m, qq).expect("Hall divisor");
    // Need Q | 1 + M*b*c with b = +-1, i.e. c = -b * M^{-1} mod Q.
    let mut best: Option<(i64, i64, i64, i64)> = None;
    for b in [-1i64, 1] {
        let base = (-b * minv).rem_euclid(qq);
        for c in [base - qq, base] {
            let key = (b.abs(), c.abs(), b, c);
            if best.map_or(true, |k| key < k) {
                best = Some(key);
            }
        }
    }
    let (_, _, b, c) = best.expect("candidate");
    let t = (1 + m * b * c) / qq;
    let (a, d) = if t == 0 { (0, 0) } else { (t, 1) };
    let w = [qq * a, b, nn * c, qq * d];
    debug_assert_eq!(w[0] * w[3] - w[1] * w[2], qq);
    Ok(w)
}

#[derive(Debug)]
pub struct ModSymSpace {
    pub n: u64,
    pub p1: P1List,
    /// Coordinates of every Manin generator in the basis of the full space.
    pub coords: Vec<SparseVec>,
    /// Manin generator underlying each basis element.
    pub basis_gens: Vec<usize>,
    pub cusps: CuspClasses,
    /// Boundary of each basis element, indexed by cusp class.
    pub boundary: Vec<SparseVec>,
    pub boundary_rank: usize,
    /// Cuspidal basis in full-space coordinates.
    pub cuspidal_basis: Vec<SparseVec>,
    /// Full-space position that carries each cuspidal coordinate.
    cusp_positions: Vec<usize>,
    hall: Vec<u64>,
    al: Vec<OnceCell<std::result::Result<Arc<AlOperator>, Error>>>,
}

impl ModSymSpace {
    pub fn full_dim(&self) -> usize {
        self.basis_gens.len()
    }

    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal_basis.len()
    }

    pub fn genus(&self) -> usize {
        self.cuspidal_dim() / 2
    }

    fn lift(&self, gen: usize) -> [i64; 4] {
        let P1Element { c, d } = self.p1.elems[gen];
        lift_to_sl2z(c, d, self.n)
    }

    fn manin(&self, c: i64, d: i64) -> usize {
        self.p1.index_of(c, d).expect("primitive bottom row")
    }

    /// Manin symbols (with coefficient +1) summing to {0, p/q}; q = 0 means oo.
    fn zero_to(&self, p: i64, qd: i64) -> Vec<usize> {
        if qd == 0 {
            return vec![self.manin(0, 1)];
        }
        let (p, qd) = if qd < 0 { (-p, -qd) } else { (p, qd) };
        let g = p.gcd(&qd);
        let (mut num, mut den) = (p / g, qd / g);
        let mut out = vec![self.manin(0, 1)];
        let (mut q_prev2, mut q_prev1) = (1i64, 0i64);
        let mut k = 0;
        loop {
            let a = Integer::div_floor(&num, &den);
            let qk = a * q_prev1 + q_prev2;
            let sign = if k % 2 == 0 { -1 } else { 1 };
            out.push(self.manin(sign * qk, q_prev1));
            q_prev2 = q_prev1;
            q_prev1 = qk;
            let rem = num - a * den;
            if rem == 0 {
                break;
            }
            num = den;
            den = rem;
            k += 1;
        }
        out
    }

    /// Coordinates of the modular symbol {alpha, beta}, endpoints as (p, q).
    pub fn symbol_coords(&self, alpha: (i64, i64), beta: (i64, i64)) -> Result<SparseVec> {
        let mut terms = Vec::new();
        for g in self.zero_to(beta.0, beta.1) {
            terms.extend(self.coords[g].iter().cloned());
        }
        for g in self.zero_to(alpha.0, alpha.1) {
            terms.extend(self.coords[g].iter().map(|(i, v)| (*i, -v)));
        }
        from_terms(terms)
    }

    /// Cuspidal coordinates of a cuspidal element given in full coordinates.
    pub fn cuspidal_coords(&self, v: &[(usize, Q)]) -> SparseVec {
        self.cusp_positions
            .iter()
            .enumerate()
            .filter_map(|(j, &p)| {
                let x = get(v, p);
                (!x.is_zero()).then_some((j, x))
            })
            .collect()
    }

    pub fn boundary_of(&self, v: &[(usize, Q)]) -> Result<SparseVec> {
        let mut acc = Vec::new();
        for (i, x) in v {
            acc = axpy(&acc, x, &self.boundary[*i])?;
        }
        Ok(acc)
    }

    /// Applies a matrix given by full-space column images.
    pub fn apply_full(cols: &[SparseVec], v: &[(usize, Q)]) -> Result<SparseVec> {
        let mut acc = Vec::new();
        for (i, x) in v {
            acc = axpy(&acc, x, &cols[*i])?;
        }
        Ok(acc)
    }

    pub fn hall_divisors(&self) -> &[u64] {
        &self.hall
    }

    pub fn al_operator(&self, qd: u64) -> Result<Arc<AlOperator>> {
        let pos = self
            .hall
            .binary_search(&qd)
            .map_err(|_| Error::NotHall(qd, self.n))?;
        self.al[pos]
            .get_or_init(|| self.compute_al(qd).map(Arc::new))
            .clone()
    }

    fn compute_al(&self, qd: u64) -> Result<AlOperator> {
        let w = al_witness(self.n, qd)?;
        let mut on_full = Vec::with_capacity(self.full_dim());
        for &gen in &self.basis_gens {
            let [a, b, c, d] = self.lift(gen);
            let m = [
                w[0] * a + w[1] * c,
                w[0] * b + w[1] * d,
                w[2] * a + w[3] * c,
                w[2] * b + w[3] * d,
            ];
            // {m(0), m(oo)} = {m01/m11, m00/m10}
            on_full.push(self.symbol_coords((m[1], m[3]), (m[0], m[2]))?);
        }
        let mut cols = Vec::with_capacity(self.cuspidal_dim());
        for v in &self.cuspidal_basis {
            let image = Self::apply_full(&on_full, v)?;
            cols.push(self.cuspidal_coords(&image));
        }
        Ok(AlOperator { q: qd, witness: w, on_full, on_cuspidal: Matrix::from_columns(&cols) })
    }

    /// Trace of w_Q on the cuspidal space.
    pub fn al_trace(&self, qd: u64) -> Result<Q> {
        self.al_operator(qd)?.on_cuspidal.trace()
    }

    /// Dimension of the subspace fixed by every element of W, computed as the
    /// rank of the idempotent prod (1 + w_i)/2 over generators, i.e. its trace.
    pub fn invariant_dim(&self, w: &AlSubgroup) -> Result<usize> {
        let mut total = Q::zero();
        for &d in &w.elements {
            total = linalg::add(&total, &self.al_trace(d)?)?;
        }
        let dim = linalg::div(&total, &q(w.order() as i64))?;
        if !dim.is_integer() || dim < Q::zero() {
            return Err(Error::Integrity(format!(
                "non-integral invariant dimension {dim} at N={}",
                self.n
            )));
        }
        Ok(dim.to_integer() as usize)
    }

    /// Same dimension by explicit elimination: kernel of the stacked w_i - 1
    /// over a generating set.
    pub fn invariant_dim_by_elimination(&self, gens: &[u64]) -> Result<usize> {
        let mut rows = Vec::new();
        for &d in gens {
            rows.extend(self.al_operator(d)?.on_cuspidal.minus_identity_rows()?);
        }
        let r = rref(rows, self.cuspidal_dim())?;
        Ok(self.cuspidal_dim() - r.rank())
    }

    /// Stable key=value report.
    pub fn debug_dump(&self) -> Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "level={}", self.n);
        let _ = writeln!(s, "manin_generators={}", self.p1.len());
        let _ = writeln!(s, "full_dim={}", self.full_dim());
        let _ = writeln!(s, "cusp_classes={}", self.cusps.len());
        let _ = writeln!(s, "boundary_rank={}", self.boundary_rank);
        let _ = writeln!(s, "cuspidal_dim={}", self.cuspidal_dim());
        let _ = writeln!(s, "genus={}", self.genus());
        for &d in &self.hall {
            let _ = writeln!(s, "trace_w{}={}", d, self.al_trace(d)?);
        }
        Ok(s)
    }
}

pub fn build_space(n: u64) -> Result<ModSymSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    let p1 = P1List::new(n);
    let ng = p1.len();
    debug_assert_eq!(ng as u64, psi(n));
    let sigma: Vec<usize> = p1
        .elems
        .iter()
        .map(|e| p1.index_of(e.d as i64, -(e.c as i64)).expect("sigma"))
        .collect();
    let tau: Vec<usize> = p1
        .elems
        .iter()
        .map(|e| p1.index_of(e.d as i64, -(e.c as i64) - e.d as i64).expect("tau"))
        .collect();

    // Two-term relations: each generator is +-(a variable) or zero.
    let mut var_of: Vec<Option<(usize, i64)>> = vec![None; ng];
    let mut var_gen = Vec::new();
    for i in 0..ng {
        let j = sigma[i];
        if j == i || var_of[i].is_some() {
            continue;
        }
        let v = var_gen.len();
        var_gen.push(i);
        var_of[i] = Some((v, 1));
        var_of[j] = Some((v, -1));
    }
    let nvars = var_gen.len();

    // Three-term relations, one per tau-orbit.
    let mut rows = Vec::new();
    let mut done = vec![false; ng];
    for i in 0..ng {
        if done[i] {
            continue;
        }
        let orbit = [i, tau[i], tau[tau[i]]];
        let mut terms = Vec::new();
        for &g in &orbit {
            done[g] = true;
            if let Some((v, s)) = var_of[g] {
                terms.push((v, q(s)));
            }
        }
        if orbit[1] == i {
            // fixed by tau: the relation reads 3x = 0
            terms.truncate(1);
        }
        let row = from_terms(terms)?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let rel = rref(rows, nvars)?;
    let free = rel.free_columns();
    let mut basis_pos = vec![usize::MAX; nvars];
    for (k, &f) in free.iter().enumerate() {
        basis_pos[f] = k;
    }
    let mut var_coords: Vec<SparseVec> = vec![Vec::new(); nvars];
    for &f in &free {
        var_coords[f] = vec![(basis_pos[f], Q::one())];
    }
    for (row, &p) in rel.rows.iter().zip(&rel.pivots) {
        var_coords[p] = row
            .iter()
            .filter(|(c, _)| *c != p)
            .map(|(c, v)| (basis_pos[*c], -v))
            .collect();
    }
    let coords: Vec<SparseVec> = var_of
        .iter()
        .map(|vs| match vs {
            None => Vec::new(),
            Some((v, s)) => linalg::scale(&var_coords[*v], &q(*s)).expect("unit scale"),
        })
        .collect();
    let basis_gens: Vec<usize> = free.iter().map(|&f| var_gen[f]).collect();

    let cusps = cusp_classes(n);
    let mut boundary = Vec::with_capacity(basis_gens.len());
    for &g in &basis_gens {
        let P1Element { c, d } = p1.elems[g];
        let [a, b, c, d] = lift_to_sl2z(c, d, n);
        let terms = vec![(cusps.class_of(a, c), Q::one()), (cusps.class_of(b, d), -Q::one())];
        boundary.push(from_terms(terms)?);
    }
    // Boundary matrix: rows are cusp classes, columns basis elements.
    let mut brows: Vec<Vec<(usize, Q)>> = vec![Vec::new(); cusps.len()];
    for (j, col) in boundary.iter().enumerate() {
        for (i, v) in col {
            brows[*i].push((j, *v));
        }
    }
    let bref = rref(brows, basis_gens.len())?;
    let cuspidal_basis = bref.kernel_basis();
    let cusp_positions = bref.free_columns();

    let hall = hall_divisors(n);
    let space = ModSymSpace {
        n,
        al: hall.iter().map(|_| OnceCell::new()).collect(),
        hall,
        p1,
        coords,
        basis_gens,
        cusps,
        boundary,
        boundary_rank: bref.rank(),
        cuspidal_basis,
        cusp_positions,
    };
    let g = genus_x0(n) as usize;
    if space.cuspidal_dim() != 2 * g {
        return Err(Error::Integrity(format!(
            "N={n}: cuspidal dimension {} but 2g = {}",
            space.cuspidal_dim(),
            2 * g
        )));
    }
    if space.full_dim() != 2 * g + cusp_count(n) as usize - 1 {
        return Err(Error::Integrity(format!(
            "N={n}: full dimension {} inconsistent with cusp count",
            space.full_dim()
        )));
    }
    Ok(space)
}

type Slot = Arc<OnceCell<std::result::Result<Arc<ModSymSpace>, Error>>>;

static SPACES: Lazy<Mutex<HashMap<u64, Slot>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached space for level N; concurrent callers for the same level share one build.
pub fn space(n: u64) -> Result<Arc<ModSymSpace>> {
    let slot = SPACES.lock().entry(n).or_default().clone();
    slot.get_or_init(|| build_space(n).map(Arc::new)).clone()
}

pub fn al_operator(space: &ModSymSpace, qd: u64) -> Result<Arc<AlOperator>> {
    space.al_operator(qd)
}

/// Genus of X0(N)/W.
pub fn invariant_genus(n: u64, w: &AlSubgroup) -> Result<u64> {
    if w.n != n {
        return Err(Error::InvalidArgument(format!("subgroup belongs to level {}", w.n)));
    }
    let dim = space(n)?.invariant_dim(w)?;
    if dim % 2 != 0 {
        return Err(Error::Integrity(format!("odd invariant dimension {dim} at N={n}")));
    }
    Ok(dim as u64 / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_sizes() {
        assert_eq!(p1_enumerate(1).len(), 1);
        assert_eq!(p1_enumerate(6).len(), 12);
        assert_eq!(p1_enumerate(558).len(), 1152);
    }

    #[test]
    fn lifts_are_unimodular() {
        for n in [1u64, 2, 12, 60, 99] {
            for e in p1_enumerate(n) {
                let [a, b, c, d] = lift_to_sl2z(e.c, e.d, n);
                assert_eq!(a * d - b * c, 1);
                let l = P1List::new(n);
                assert_eq!(l.index_of(c, d), l.index_of(e.c as i64, e.d as i64));
            }
        }
    }

    #[test]
    fn cusp_class_counts() {
        assert_eq!(cusp_classes(1).len(), 1);
        assert_eq!(cusp_classes(4).len(), 3);
        assert_eq!(cusp_classes(126).len() as u64, cusp_count(126));
    }

    #[test]
    fn cuspidal_dimensions() {
        assert_eq!(build_space(11).unwrap().cuspidal_dim(), 2);
        assert_eq!(build_space(60).unwrap().cuspidal_dim(), 14);
        assert_eq!(build_space(120).unwrap().cuspidal_dim(), 34);
        assert_eq!(build_space(1).unwrap().cuspidal_dim(), 0);
    }

    #[test]
    fn witnesses() {
        assert_eq!(al_witness(11, 11).unwrap(), [0, -1, 11, 0]);
        assert_eq!(al_witness(11, 1).unwrap(), [1, 0, 0, 1]);
        for &qd in &hall_divisors(120) {
            let w = al_witness(120, qd).unwrap();
            assert_eq!(w[0] * w[3] - w[1] * w[2], qd as i64);
            assert_eq!(w[0] % qd as i64, 0);
            assert_eq!(w[3] % qd as i64, 0);
            assert_eq!(w[2] % 120, 0);
        }
        assert!(al_witness(120, 2).is_err());
    }

    #[test]
    fn identity_and_fricke_11() {
        let s = build_space(11).unwrap();
        assert_eq!(s.al_operator(1).unwrap().on_cuspidal, Matrix::identity(2));
        assert_eq!(s.invariant_dim(&AlSubgroup::full(11)).unwrap(), 0);
    }

    #[test]
    fn eigenspace_120_w15() {
        let s = space(120).unwrap();
        assert_eq!(s.invariant_dim(&AlSubgroup::generated(120, &[15]).unwrap()).unwrap(), 10);
        assert_eq!(s.invariant_dim_by_elimination(&[15]).unwrap(), 10);
    }

    #[test]
    fn invariant_genus_examples() {
        let g = |n, gens: &[u64]| invariant_genus(n, &AlSubgroup::generated(n, gens).unwrap()).unwrap();
        assert_eq!(g(60, &[4]), 3);
        assert_eq!(g(120, &[15]), 5);
        assert_eq!(g(40, &[40]), 1);
        assert_eq!(g(60, &[]), 7);
    }
}

//! Subgroups of the Atkin-Lehner group B(N), identified with subspaces of
//! (Z/2)^omega(N) via Hall divisors.

use crate::error::{Error, Result};
use crate::ntheory::{hall_divisors, hall_mul, is_hall};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlSubgroup {
    pub n: u64,
    /// All elements as Hall divisors, ascending; always contains 1.
    pub elements: Vec<u64>,
}

impl AlSubgroup {
    pub fn trivial(n: u64) -> Self {
        AlSubgroup { n, elements: vec![1] }
    }

    pub fn full(n: u64) -> Self {
        AlSubgroup { n, elements: hall_divisors(n) }
    }

    pub fn generated(n: u64, gens: &[u64]) -> Result<Self> {
        let mut set = BTreeSet::from([1u64]);
        for &g in gens {
            if !is_hall(g, n) {
                return Err(Error::NotHall(g, n));
            }
            let new: Vec<u64> = set.iter().map(|&e| hall_mul(e, g)).collect();
            set.extend(new);
        }
        Ok(AlSubgroup { n, elements: set.into_iter().collect() })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, d: u64) -> bool {
        self.elements.binary_search(&d).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_full(&self) -> bool {
        self.elements.len() == hall_divisors(self.n).len()
    }

    /// Bitmask over the ascending list of Hall divisors of N.
    pub fn mask(&self) -> u32 {
        hall_divisors(self.n)
            .iter()
            .enumerate()
            .filter(|(_, d)| self.contains(**d))
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Inverse of [`AlSubgroup::mask`]; fails if the bits do not form a subgroup.
    pub fn from_mask(n: u64, mask: u32) -> Result<Self> {
        let elements: Vec<u64> = hall_divisors(n)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, d)| d)
            .collect();
        let w = AlSubgroup::generated(n, &elements)?;
        if w.elements.len() != elements.len() {
            return Err(Error::InvalidArgument(format!("mask {mask:#b} is not a subgroup of B({n})")));
        }
        Ok(w)
    }

    /// Greedy generating set: smallest elements first, each outside the span
    /// of the previous ones.
    pub fn generators(&self) -> Vec<u64> {
        let mut gens = Vec::new();
        let mut span = AlSubgroup::trivial(self.n);
        for &e in &self.elements {
            if !span.contains(e) {
                gens.push(e);
                span = AlSubgroup::generated(self.n, &gens).expect("elements are Hall");
            }
        }
        gens
    }

    pub fn join(&self, d: u64) -> Result<Self> {
        let mut gens = self.generators();
        gens.push(d);
        AlSubgroup::generated(self.n, &gens)
    }

    pub fn is_subgroup_of(&self, other: &AlSubgroup) -> bool {
        self.n == other.n && self.elements.iter().all(|&e| other.contains(e))
    }

    /// All subgroups of B(N), ordered by mask.
    pub fn all(n: u64) -> Vec<AlSubgroup> {
        let hd = hall_divisors(n);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = vec![AlSubgroup::trivial(n)];
        while let Some(g) = queue.pop() {
            if !seen.insert(g.elements.clone()) {
                continue;
            }
            for &d in &hd {
                if !g.contains(d) {
                    queue.push(g.join(d).expect("Hall divisor"));
                }
            }
            out.push(g);
        }
        out.sort_by_key(|g| g.mask());
        out
    }

    /// Parses "w8,w3" (or "8,3"); an empty string gives the trivial group.
    pub fn parse(n: u64, text: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let digits = tok.strip_prefix('w').unwrap_or(tok);
            let d: u64 = digits
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad generator {tok}")))?;
            gens.push(d);
        }
        AlSubgroup::generated(n, &gens)
    }
}

impl fmt::Display for AlSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|d| format!("w{d}")).collect();
        write!(f, "<{}>", gens.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_generators() {
        let g = AlSubgroup::generated(252, &[4, 63]).unwrap();
        assert_eq!(g.elements, vec![1, 4, 63, 252]);
        assert_eq!(g.generators(), vec![4, 63]);
        assert_eq!(g.to_string(), "<w4,w63>");
        assert!(AlSubgroup::generated(120, &[7]).is_err());
    }

    #[test]
    fn counts() {
        // subspaces of F_2^3: 1 + 7 + 7 + 1
        assert_eq!(AlSubgroup::all(60).len(), 16);
        assert_eq!(AlSubgroup::all(40).len(), 5);
        assert_eq!(AlSubgroup::parse(60, "w4,w3").unwrap().elements, vec![1, 3, 4, 12]);
    }
}

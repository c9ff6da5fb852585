//! Elliptic points, cusps and genus of X0(N).

use crate::ntheory::{euler_phi, factor, kronecker, psi};
use num_integer::Integer;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelInvariants {
    pub n: u64,
    pub index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

pub fn nu2(n: u64) -> u64 {
    if n % 4 == 0 {
        return 0;
    }
    char_product(n, -4)
}

pub fn nu3(n: u64) -> u64 {
    if n % 9 == 0 {
        return 0;
    }
    char_product(n, -3)
}

fn char_product(n: u64, d: i64) -> u64 {
    let f = factor(n).expect("positive level");
    f.primes()
        .map(|p| (1 + kronecker(d, p) as i64) as u64)
        .product()
}

pub fn cusp_count(n: u64) -> u64 {
    crate::ntheory::divisors(n)
        .into_iter()
        .map(|d| euler_phi(d.gcd(&(n / d))))
        .sum()
}

pub fn invariants(n: u64) -> LevelInvariants {
    let index = psi(n);
    let (v2, v3, vi) = (nu2(n), nu3(n), cusp_count(n));
    let twelve_g = 12 + index as i64 - 3 * v2 as i64 - 4 * v3 as i64 - 6 * vi as i64;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    LevelInvariants {
        n,
        index,
        nu2: v2,
        nu3: v3,
        nu_inf: vi,
        genus: (twelve_g / 12) as u64,
    }
}

pub fn genus_x0(n: u64) -> u64 {
    invariants(n).genus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(cusp_count(1), 1);
        assert_eq!(cusp_count(4), 3);
        assert_eq!(cusp_count(60), 12);
        assert_eq!(nu2(1), 1);
        assert_eq!(nu2(44), 0);
        assert_eq!(nu3(63), 0);
        for (n, g) in [(1, 0), (11, 1), (15, 1), (60, 7), (88, 9), (120, 17), (176, 19), (252, 37), (558, 89)] {
            assert_eq!(genus_x0(n), g, "N={n}");
        }
    }

    #[test]
    fn genus_formula_is_integral() {
        for n in 1..=600u64 {
            let inv = invariants(n);
            let lhs = 12 * (inv.genus as i64 - 1) + 3 * inv.nu2 as i64 + 4 * inv.nu3 as i64 + 6 * inv.nu_inf as i64;
            assert_eq!(lhs, inv.index as i64, "N={n}");
        }
    }
}

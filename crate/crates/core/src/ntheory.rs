//! Integer kernel: factorization, unitary divisors, Kronecker symbols and
//! class numbers of imaginary quadratic orders.

use crate::error::{invalid, Result};
use num_integer::Integer;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exact power of `p` dividing n.
    pub fn exponent(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The prime-power parts p^e, in order of increasing p.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }
}

pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("cannot factor 0");
    }
    let mut m = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

fn factor_pos(n: u64) -> Factorization {
    factor(n).expect("positive argument")
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor_pos(n).factors == [(n, 1)]
}

pub fn psi(n: u64) -> u64 {
    let f = factor_pos(n);
    f.factors
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p + 1))
}

pub fn omega(n: u64) -> usize {
    factor_pos(n).factors.len()
}

pub fn euler_phi(n: u64) -> u64 {
    let f = factor_pos(n);
    f.factors.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    factor_pos(n).factors.iter().all(|&(_, e)| e == 1)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..)
        .take_while(|d| d * d <= n)
        .filter(|d| n % d == 0)
        .flat_map(|d| if d * d == n { vec![d] } else { vec![d, n / d] })
        .collect();
    out.sort_unstable();
    out
}

/// Unitary divisors d of n (gcd(d, n/d) = 1), ascending.
pub fn hall_divisors(n: u64) -> Vec<u64> {
    let parts = factor_pos(n).prime_powers();
    let mut out = vec![1u64];
    for q in parts {
        let extra: Vec<u64> = out.iter().map(|d| d * q).collect();
        out.extend(extra);
    }
    out.sort_unstable();
    out
}

pub fn is_hall(d: u64, n: u64) -> bool {
    d >= 1 && n % d == 0 && (n / d).gcd(&d) == 1
}

/// Product in the group of Hall divisors: d*e/gcd(d,e)^2.
pub fn hall_mul(d: u64, e: u64) -> u64 {
    let g = d.gcd(&e);
    (d / g) * (e / g)
}

/// Kronecker symbol (D/p) for a prime p.
pub fn kronecker(d: i64, p: u64) -> i8 {
    if p == 2 {
        return match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => 0,
            1 | 7 => 1,
            _ => -1,
        };
    }
    let pm = p as i128;
    let a = (d as i128).rem_euclid(pm);
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (pm - 1) / 2, pm) {
        1 => 1,
        _ => -1,
    }
}

fn pow_mod(mut base: i128, mut exp: i128, m: i128) -> i128 {
    let mut acc = 1i128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of a modulo m, if it exists. Result in [0, m).
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

pub fn is_discriminant(d: i64) -> bool {
    d < 0 && matches!(d.rem_euclid(4), 0 | 1)
}

/// Number of reduced primitive forms of discriminant D < 0.
pub fn class_number(d: i64) -> Result<u64> {
    if !is_discriminant(d) {
        return invalid(format!("{d} is not a negative discriminant"));
    }
    let n = -d;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert!(factor(1).unwrap().factors.is_empty());
        assert_eq!(factor(252).unwrap().factors, vec![(2, 2), (3, 2), (7, 1)]);
        assert_eq!(factor(558).unwrap().factors, vec![(2, 1), (3, 2), (31, 1)]);
        assert!(factor(0).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1), 1);
        assert_eq!(psi(120), 288);
        assert_eq!(psi(284), 432);
        assert_eq!(psi(220), 432);
    }

    #[test]
    fn hall_examples() {
        assert_eq!(hall_divisors(60), vec![1, 3, 4, 5, 12, 15, 20, 60]);
        assert_eq!(hall_divisors(252), vec![1, 4, 7, 9, 28, 36, 63, 252]);
        assert_eq!(hall_divisors(13), vec![1, 13]);
        assert_eq!(hall_mul(12, 20), 15);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(1, 5), 1);
        assert_eq!(kronecker(-4, 11), -1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number(-3).unwrap(), 1);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(-15).unwrap(), 2);
        assert_eq!(class_number(-60).unwrap(), 2);
        assert_eq!(class_number(-44).unwrap(), 3);
        assert_eq!(class_number(-11).unwrap(), 1);
        assert!(class_number(0).is_err());
        assert!(class_number(5).is_err());
        assert!(class_number(-6).is_err());
        assert!(class_number(-5).is_err());
    }

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(-3, 7), Some(2));
        assert_eq!(mod_inverse(2, 4), None);
    }
}

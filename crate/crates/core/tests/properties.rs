use proptest::prelude::*;
use proptest::sample::select;
use std::collections::BTreeSet;
use x0quot::atlas::{self, data::Datasets};
use x0quot::involutions::{
    all_involutions, compose, fix_al, fix_al_classnumber_crosscheck, fix_count, group_closure,
    quotient_genus_hurwitz, ExtInvolution, Kind,
};
use x0quot::modsym::{invariant_genus, space};
use x0quot::ntheory::{class_number, hall_divisors, hall_mul, is_hall, is_prime, is_squarefree, kronecker, omega, psi};
use x0quot::screening::{iso_reduce_v3, iso_reduce_w4, star_gate, TABLES};
use x0quot::x0invariants::genus_x0;
use x0quot::AlSubgroup;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..400, 1u64..400).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1)
}

fn in_scope_level() -> impl Strategy<Value = u64> {
    select(atlas::levels_in_scope())
}

fn level_and_subgroup(levels: Vec<u64>) -> impl Strategy<Value = (u64, AlSubgroup)> {
    select(levels).prop_flat_map(|n| (Just(n), select(AlSubgroup::all(n))))
}

/// Reduced-form count by repeated reduction of every small primitive form.
fn class_number_by_reduction(d: i64) -> u64 {
    fn reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
        loop {
            if b > a || b <= -a {
                let k = (a - b).div_euclid(2 * a);
                c += k * b + k * k * a;
                b += 2 * k * a;
            } else if a > c || (a == c && b < 0) {
                std::mem::swap(&mut a, &mut c);
                b = -b;
            } else {
                return (a, b, c);
            }
        }
    }
    let g = |a: i64, b: i64| -> i64 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut seen = BTreeSet::new();
    let bound = ((-d) as f64).sqrt() as i64 + 2;
    for a in 1..=bound {
        for b in -a..=a {
            if (b * b - d) % (4 * a) == 0 {
                let c = (b * b - d) / (4 * a);
                if g(g(a, b), c) == 1 {
                    seen.insert(reduce(a, b, c));
                }
            }
        }
    }
    seen.len() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_multiplicative((a, b) in coprime_pair()) {
        prop_assert_eq!(psi(a * b), psi(a) * psi(b));
    }

    #[test]
    fn hall_divisors_count(n in 1u64..5000) {
        let h = hall_divisors(n);
        prop_assert_eq!(h.len(), 1usize << omega(n));
        prop_assert!(h.iter().all(|&d| is_hall(d, n)));
    }

    #[test]
    fn kronecker_is_multiplicative(d1 in -2000i64..2000, d2 in -2000i64..2000, p in (2u64..300).prop_filter("prime", |p| is_prime(*p))) {
        prop_assert_eq!(kronecker(d1 * d2, p), kronecker(d1, p) * kronecker(d2, p));
    }

    #[test]
    fn class_number_matches_reduction(d in (-5000i64..=-3).prop_filter("discriminant", |d| d.rem_euclid(4) <= 1)) {
        prop_assert_eq!(class_number(d).unwrap(), class_number_by_reduction(d));
    }

    #[test]
    fn fricke_class_number_route(n in (5u64..=200).prop_filter("squarefree", |n| is_squarefree(*n))) {
        prop_assert_eq!(fix_al_classnumber_crosscheck(n).unwrap(), fix_al(n, n).unwrap());
    }

    #[test]
    fn atkin_lehner_square_and_commute(n in in_scope_level(), i in 0usize..64, j in 0usize..64) {
        let h = hall_divisors(n);
        let (d, e) = (h[i % h.len()], h[j % h.len()]);
        let wd = ExtInvolution::al(n, d).unwrap();
        let we = ExtInvolution::al(n, e).unwrap();
        prop_assert!(compose(&wd, &wd).unwrap().is_identity());
        prop_assert_eq!(compose(&wd, &we).unwrap(), compose(&we, &wd).unwrap());
        prop_assert_eq!(compose(&wd, &we).unwrap(), ExtInvolution::al(n, hall_mul(d, e)).unwrap());
    }

    #[test]
    fn hurwitz_integral_on_valid_groups((n, w) in level_and_subgroup(atlas::levels_in_scope()), k in 0usize..64) {
        let extras: Vec<ExtInvolution> = all_involutions(n).into_iter().filter(|x| x.kind != Kind::Al).collect();
        let mut gens: Vec<ExtInvolution> = w.generators().iter().map(|&d| ExtInvolution::al(n, d).unwrap()).collect();
        if !extras.is_empty() {
            gens.push(extras[k % extras.len()]);
        }
        if let Ok(g) = group_closure(n, &gens) {
            let h = quotient_genus_hurwitz(n, &g);
            prop_assert!(h.is_ok(), "{:?}", h);
            if g.elements.iter().all(|e| e.is_al()) {
                prop_assert_eq!(h.unwrap(), invariant_genus(n, &g.al_part()).unwrap());
            }
        }
    }

    #[test]
    fn fixed_points_match_quotient_genus(n in in_scope_level(), k in 0usize..64) {
        let all = all_involutions(n);
        let x = all[k % all.len()];
        let g = group_closure(n, &[x]).unwrap();
        let h = quotient_genus_hurwitz(n, &g).unwrap() as i64;
        prop_assert_eq!(fix_count(&x).unwrap() as i64, 2 * genus_x0(n) as i64 + 2 - 4 * h);
    }

    #[test]
    fn s2_with_w4_rejected(n in in_scope_level()) {
        prop_assume!(n % 4 == 0 && n % 8 != 0);
        let s2 = ExtInvolution::new(n, Kind::S2, 1).unwrap();
        prop_assert!(group_closure(n, &[s2, ExtInvolution::al(n, 4).unwrap()]).is_err());
    }

    #[test]
    fn v3_with_r_2_mod_3_rejected(n in in_scope_level(), k in 0usize..16) {
        prop_assume!(n % 9 == 0 && n % 27 != 0);
        let bad: Vec<u64> = hall_divisors(n).into_iter().filter(|r| r % 3 == 2).collect();
        prop_assume!(!bad.is_empty());
        let r = bad[k % bad.len()];
        let v3 = ExtInvolution::new(n, Kind::V3, 1).unwrap();
        prop_assert!(group_closure(n, &[v3, ExtInvolution::al(n, r).unwrap()]).is_err());
    }

    #[test]
    fn reductions_preserve_genus((n, w) in level_and_subgroup(atlas::levels_in_scope())) {
        let g = invariant_genus(n, &w).unwrap();
        if let Ok((m, x)) = iso_reduce_w4(n, &w) {
            prop_assert_eq!(invariant_genus(m, &x).unwrap(), g);
        }
        if let Ok(x) = iso_reduce_v3(n, &w) {
            prop_assert_eq!(invariant_genus(n, &x).unwrap(), g);
            prop_assert_eq!(iso_reduce_v3(n, &x).unwrap(), w);
        }
    }

    #[test]
    fn trace_formula_matches_elimination((n, w) in level_and_subgroup((2u64..=150).collect())) {
        let s = space(n).unwrap();
        prop_assert_eq!(s.invariant_dim(&w).unwrap(), s.invariant_dim_by_elimination(&w.generators()).unwrap());
        prop_assert_eq!(s.invariant_dim(&w).unwrap() as u64, 2 * invariant_genus(n, &w).unwrap());
    }

    #[test]
    fn mask_round_trip((n, w) in level_and_subgroup(atlas::levels_in_scope())) {
        prop_assert_eq!(AlSubgroup::from_mask(n, w.mask()).unwrap(), w);
    }
}

#[test]
fn genus_two_pairs_are_listed_hyperelliptic() {
    let data = Datasets::embedded().unwrap();
    for (n, w) in atlas::enumerate_pairs().unwrap() {
        if invariant_genus(n, &w).unwrap() == 2 {
            assert!(data.is_listed_hyperelliptic(n, &w), "({n},{w})");
        }
    }
}

#[test]
fn star_quotient_genus_matches_tables() {
    for n in TABLES.levels() {
        let expected = star_gate(n).unwrap().star_genus().unwrap();
        assert_eq!(invariant_genus(n, &AlSubgroup::full(n)).unwrap(), expected, "N={n}");
    }
}

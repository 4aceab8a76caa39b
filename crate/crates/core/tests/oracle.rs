use std::collections::BTreeSet;

use multifrac::factorizer::{
    apply_step, enumerate_factorizations, evaluate, hub_normalize, is_max_length, min_length_factorization,
    rewrite_chain, replay_chain, solve_hub,
};
use multifrac::lengths::{aap_check, gaps, improper_divisor_pairs, length_set, length_set_proper};
use multifrac::{Caps, Direction, Factorization, GeneratorSet, Rational, RewriteStep};
use num_integer::Integer;
use proptest::prelude::*;

/// Pairwise coprime denominators and a numerator coprime to each.
fn canonical_set(proper_only: bool) -> impl Strategy<Value = GeneratorSet> {
    let dens = prop::sample::subsequence(vec![3u64, 4, 5, 7, 9, 11, 13], 1..=3);
    dens.prop_flat_map(move |ds| {
        let nums: Vec<_> = ds
            .iter()
            .map(|&d| {
                let hi = if proper_only { d } else { 2 * d };
                (2..hi).prop_filter("coprime non-integer", move |n| n.gcd(&d) == 1)
            })
            .collect();
        (Just(ds), nums)
    })
    .prop_filter_map("needs pairwise coprime", |(ds, ns)| {
        for (i, a) in ds.iter().enumerate() {
            if ds[i + 1..].iter().any(|b| a.gcd(b) != 1) {
                return None;
            }
        }
        let bases = ds.iter().zip(&ns).map(|(&d, &n)| Rational::new(n, d).unwrap());
        GeneratorSet::new(bases).ok()
    })
}

fn random_factorization(b: &GeneratorSet, coeffs: &[u64], c0: u64) -> Factorization {
    let mut z = Factorization::unit(c0);
    for (j, &c) in coeffs.iter().enumerate() {
        let i = j % b.len();
        z.add(i, 1 + (j / b.len()) as u32, c);
    }
    z
}

fn oracle_lengths(x: &Rational, b: &GeneratorSet, e_max: u32, len_max: u64) -> BTreeSet<u64> {
    enumerate_factorizations(x, b, Caps { e_max, len_max, cap: 0 })
        .unwrap()
        .iter()
        .map(Factorization::length)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hub_is_the_normal_form(b in canonical_set(false), coeffs in prop::collection::vec(0u64..6, 0..7), c0 in 0u64..4) {
        let z = random_factorization(&b, &coeffs, c0);
        let x = evaluate(&z, &b).unwrap();
        let (h, steps) = hub_normalize(&z, &b).unwrap();
        prop_assert!(h.is_hub_shaped(&b).unwrap());
        prop_assert_eq!(evaluate(&h, &b).unwrap(), x.clone());
        prop_assert_eq!(solve_hub(&x, &b).unwrap(), Some(h.clone()));
        let seq = replay_chain(&z, &steps, &b).unwrap();
        prop_assert_eq!(seq.last(), Some(&h));
    }

    #[test]
    fn random_walks_return_to_the_hub(b in canonical_set(true), coeffs in prop::collection::vec(0u64..4, 1..5), walk in prop::collection::vec((0usize..3, 0u32..3), 0..6)) {
        let z = random_factorization(&b, &coeffs, 0);
        let (h, _) = hub_normalize(&z, &b).unwrap();
        let mut w = h.clone();
        for (i, e) in walk {
            let i = i % b.len();
            let base = b.base(i).unwrap();
            let n = base.numer().to_string().parse::<u64>().unwrap();
            let have = if e == 0 { w.c0() } else { w.coeff(i, e) };
            if have >= n {
                let step = RewriteStep { base: i, exp: e, direction: Direction::Up, multiplicity: 1 };
                w = apply_step(&w, &step, &b).unwrap();
            }
        }
        prop_assert_eq!(hub_normalize(&w, &b).unwrap().0, h.clone());
        let chain = rewrite_chain(&w, &h, &b).unwrap();
        let seq = replay_chain(&w, &chain, &b).unwrap();
        prop_assert_eq!(seq.last(), Some(&h));
        prop_assert_eq!(min_length_factorization(&evaluate(&h, &b).unwrap(), &b).unwrap(), Some(h.clone()));
        prop_assert!(is_max_length(&h, &b).is_ok());
    }

    /// Over proper bases every factorization is reached from the hub by
    /// up-steps, each adding at least one to the length and at most one to
    /// the largest exponent, so `e_max = E_h + (len_max - |z_h|)` makes the
    /// enumeration complete below `len_max`.
    #[test]
    fn proper_length_sets_match_the_oracle(b in canonical_set(true), coeffs in prop::collection::vec(0u64..4, 1..4), c0 in 0u64..4) {
        let z = random_factorization(&b, &coeffs, c0);
        let x = evaluate(&z, &b).unwrap();
        let h = solve_hub(&x, &b).unwrap().unwrap();
        let len_max = h.length() + 4;
        let e_max = h.max_exp() + 4;
        let symbolic = length_set_proper(&x, &b).unwrap().truncate(len_max);
        prop_assert_eq!(symbolic, oracle_lengths(&x, &b, e_max, len_max));
    }

    #[test]
    fn general_length_sets_contain_the_oracle(b in canonical_set(false), coeffs in prop::collection::vec(0u64..3, 1..4), c0 in 0u64..3) {
        let z = random_factorization(&b, &coeffs, c0);
        let x = evaluate(&z, &b).unwrap();
        let l = length_set(&x, &b).unwrap();
        prop_assert!(l.contains(z.length()));
        let found = oracle_lengths(&x, &b, 3, 8);
        let lengths = l.truncate(8);
        prop_assert!(found.is_subset(&lengths), "{:?} vs {:?}", found, lengths);
    }

    #[test]
    fn non_members_have_no_factorizations(b in canonical_set(true), p in 1u64..30, q in 2u64..30) {
        let x = Rational::new(p, q).unwrap();
        if solve_hub(&x, &b).unwrap().is_none() {
            prop_assert!(oracle_lengths(&x, &b, 3, 8).is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn delta_is_stable_past_the_truncation(b in canonical_set(false), coeffs in prop::collection::vec(0u64..5, 1..5), c0 in 0u64..5) {
        let z = random_factorization(&b, &coeffs, c0);
        let x = evaluate(&z, &b).unwrap();
        prop_assume!(!x.is_zero());
        let l = length_set(&x, &b).unwrap();
        let r = l.deltas();
        prop_assert_eq!(gaps(&l.truncate(2 * r.truncation + 7)), r.deltas);
    }

    #[test]
    fn aap_witnesses_reconstruct(set in prop::collection::btree_set(-20i64..40, 1..25), d in 1u64..4, n in 0u64..12) {
        if let Some(w) = aap_check(&set, d, n) {
            prop_assert!(w.is_valid());
            prop_assert_eq!(w.reconstruct(), set.clone());
            prop_assert!(set.iter().all(|v| (v - w.y).rem_euclid(d as i64) == 0));
        }
        // a plain progression is always accepted
        let lo = *set.iter().next().unwrap();
        let prog: BTreeSet<i64> = (0..5).map(|i| lo + i * d as i64).collect();
        prop_assert!(aap_check(&prog, d, 0).is_some());
    }
}

#[test]
fn length_sets_with_improper_bases_match_deep_enumeration() {
    let b = GeneratorSet::parse("2/3,5/2").unwrap();
    for x in ["2", "5/2", "7/2", "9/2", "25/4"] {
        let x: Rational = x.parse().unwrap();
        let l = length_set(&x, &b).unwrap();
        assert_eq!(l.truncate(9), oracle_lengths(&x, &b, 10, 9), "x = {x}");
    }
}

/// The fixture grid at an exponent cap derived from the hub, which makes the
/// enumeration complete up to length 20.
#[test]
fn fixture_grid_agrees_at_derived_caps() {
    for b in ["2/3", "2/5", "2/3,4/5"] {
        let b = GeneratorSet::parse(b).unwrap();
        for x in ["2", "4", "10/3", "2/3"] {
            let x: Rational = x.parse().unwrap();
            let Some(h) = solve_hub(&x, &b).unwrap() else {
                assert!(oracle_lengths(&x, &b, 6, 12).is_empty());
                continue;
            };
            let len_max = 12;
            let e_max = h.max_exp() + (len_max - h.length()) as u32;
            let symbolic = length_set_proper(&x, &b).unwrap().truncate(len_max);
            assert_eq!(symbolic, oracle_lengths(&x, &b, e_max, len_max), "x = {x}, B = {:?}", b.bases());
        }
    }
}

/// Every element of the improper part below `x`: sums of powers `b^e <= x`
/// plus any integer that still fits.
fn improper_elements_below(x: &Rational, imp: &[Rational]) -> BTreeSet<Rational> {
    fn go(atoms: &[Rational], from: usize, acc: Rational, x: &Rational, out: &mut BTreeSet<Rational>) {
        let mut j = 0u64;
        while let Some(v) = Some(&acc + &Rational::integer(j)).filter(|v| v <= x) {
            out.insert(v);
            j += 1;
        }
        for (i, a) in atoms.iter().enumerate().skip(from) {
            let next = &acc + a;
            if next <= *x {
                go(atoms, i, next, x, out);
            }
        }
    }
    let mut atoms = Vec::new();
    for b in imp {
        let mut e = 1;
        while b.pow(e) <= *x {
            atoms.push(b.pow(e));
            e += 1;
        }
    }
    let mut out = BTreeSet::new();
    go(&atoms, 0, Rational::zero(), x, &mut out);
    out
}

#[test]
fn divisor_pairs_match_exhaustive_search() {
    for bases in ["2/3,5/2", "4/5,7/3", "3/4,5/3,7/5"] {
        let b = GeneratorSet::parse(bases).unwrap();
        let imp: Vec<Rational> = b.bases().iter().filter(|r| r.numer() > r.denom()).cloned().collect();
        let prop = b.subset(&b.proper_part());
        let mut checked = 0;
        for p in 1u64..14 {
            for q in [1u64, 2, 3, 4, 5, 6, 9, 12, 15] {
                let x = Rational::new(p, q).unwrap();
                if solve_hub(&x, &b).unwrap().is_none() {
                    continue;
                }
                let expect: Vec<(Rational, Rational)> = improper_elements_below(&x, &imp)
                    .into_iter()
                    .map(|y| {
                        let rest = x.checked_sub(&y).unwrap();
                        (y, rest)
                    })
                    .filter(|(_, rest)| solve_hub(rest, &prop).unwrap().is_some())
                    .collect();
                assert_eq!(improper_divisor_pairs(&x, &b).unwrap().pairs, expect, "x = {x} over {bases}");
                checked += 1;
            }
        }
        assert!(checked > 5);
    }
}

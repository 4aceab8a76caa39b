//! Explicit generator families: non-atomic multicyclic monoids with a
//! prescribed number of proper primitive generators, and truncated canonical
//! sets whose delta sets contain `{d, 2d, ...}`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorizer::{evaluate, solve_hub, Factorization, FactorizationDoc};
use crate::lengths::{length_set_proper, DeltaReport, MapUnion};
use crate::monoid::{is_hereditarily_atomic, GeneratorSet};
use crate::qcore::{is_prime, next_prime, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedTag {
    /// `p0 < p1 < p0*p1 + 1 < p2 < ... < pn`
    ThmNonatomic,
    /// `p_n > d*n + 1` and `p_n - d*n` strictly increasing
    DeltaRealization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeSeed {
    pub primes: Vec<u64>,
    pub tag: SeedTag,
}

impl PrimeSeed {
    pub fn nonatomic(primes: Vec<u64>) -> Self {
        PrimeSeed { primes, tag: SeedTag::ThmNonatomic }
    }

    /// Checks the non-atomic chain and returns the inequalities verified.
    fn check_nonatomic(&self) -> Result<Vec<String>> {
        let p = &self.primes;
        if let Some(&q) = p.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::BadSeed(format!("{q} is not prime")));
        }
        if p.len() < 3 {
            return Err(Error::BadSeed("need at least three primes".into()));
        }
        let bridge = p[0] * p[1] + 1;
        let mut chain = vec![p[0], p[1], bridge];
        chain.extend_from_slice(&p[2..]);
        let mut verified = Vec::new();
        for w in chain.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadSeed(format!("chain broken: {} >= {}", w[0], w[1])));
            }
            verified.push(format!("{} < {}", w[0], w[1]));
        }
        Ok(verified)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonatomicFamily {
    pub n: usize,
    pub seed: PrimeSeed,
    pub bases: GeneratorSet,
    pub verified: Vec<String>,
}

/// `{p0/p2, p1/p2, p0p1/p3, ..., p0p1/pn}`
pub fn nonatomic_family(n: usize, seed: &PrimeSeed) -> Result<NonatomicFamily> {
    if n < 2 {
        return Err(Error::BadSeed(format!("family size {n} is below 2")));
    }
    if seed.primes.len() != n + 1 {
        return Err(Error::BadSeed(format!("expected {} primes, got {}", n + 1, seed.primes.len())));
    }
    let verified = seed.check_nonatomic()?;
    let p = &seed.primes;
    let mut bases = vec![Rational::new(p[0], p[2])?, Rational::new(p[1], p[2])?];
    for &q in &p[3..] {
        bases.push(Rational::new(p[0] * p[1], q)?);
    }
    let bases = GeneratorSet::new(bases)?;
    debug_assert!(!is_hereditarily_atomic(&bases));
    Ok(NonatomicFamily { n, seed: seed.clone(), bases, verified })
}

/// `α (p0/p2)^N + β (p1/p2)^N = (p0/p2)^m`, so `(p0/p2)^m` is not an atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonatomicWitness {
    pub m: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    #[serde(serialize_with = "as_decimal")]
    pub alpha: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub beta: BigUint,
}

fn as_decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

impl NonatomicWitness {
    pub fn verify(&self, family: &NonatomicFamily) -> bool {
        let b0 = &family.bases.bases()[0];
        let b1 = &family.bases.bases()[1];
        let (b0, b1) = if b0.numer() == &BigUint::from(family.seed.primes[0]) { (b0, b1) } else { (b1, b0) };
        let lhs = &(b0.pow(self.big_n) * Rational::integer(self.alpha.clone()))
            + &(b1.pow(self.big_n) * Rational::integer(self.beta.clone()));
        !self.alpha.is_zero() && !self.beta.is_zero() && lhs == b0.pow(self.m)
    }
}

/// Searches `N` in `(m, n_max]` for `α, β >= 1` with
/// `α p0^N + β p1^N = p0^m p2^(N-m)`.
///
/// For each `N` the least admissible `β` is the residue of
/// `p0^m p2^(N-m) / p1^N` modulo `p0^N`, so one congruence per `N` replaces
/// the scan over `β`.
pub fn nonatomic_witness(family: &NonatomicFamily, m: u32, n_max: u32) -> Option<NonatomicWitness> {
    let p = &family.seed.primes;
    let (p0, p1, p2) = (BigInt::from(p[0]), BigInt::from(p[1]), BigInt::from(p[2]));
    for big_n in m + 1..=n_max {
        let target = p0.pow(m) * p2.pow(big_n - m);
        let a = p0.pow(big_n);
        let c = p1.pow(big_n);
        let inv = mod_inverse(&c, &a)?;
        let beta = (&target * inv).mod_floor(&a);
        if beta.is_zero() {
            continue;
        }
        let rest = &target - &beta * &c;
        if rest <= BigInt::zero() {
            continue;
        }
        let alpha = rest / &a;
        let w = NonatomicWitness {
            m,
            big_n,
            alpha: alpha.to_biguint()?,
            beta: beta.to_biguint()?,
        };
        if w.verify(family) {
            return Some(w);
        }
    }
    None
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// The two generators of level `k`:
/// `(p_{2k} - 2dk)/p_{2k}` and `(p_{2k+1} - 2dk + d)/p_{2k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaLevel {
    pub k: u32,
    pub even: Rational,
    pub odd: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaFamily {
    pub d: u64,
    #[serde(rename = "K")]
    pub big_k: u32,
    pub seed: PrimeSeed,
    pub levels: Vec<DeltaLevel>,
    pub bases: GeneratorSet,
    pub verified: Vec<String>,
}

fn level_numerator(d: u64, n: u64, p: u64) -> u64 {
    if n.is_multiple_of(2) {
        p - d * n
    } else {
        p - d * n + 2 * d
    }
}

/// Greedy smallest primes `p_2 < p_3 < ...` with `p_n > dn + 1`,
/// `p_n - dn` strictly increasing and numerators strictly increasing.
fn delta_primes(d: u64, count: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let (mut last_p, mut last_gap, mut last_num) = (0u64, 0u64, 0u64);
    for n in 2..2 + count {
        let mut p = next_prime(last_p.max(d * n + 1));
        loop {
            let gap = p - d * n;
            if primes.is_empty() || (gap > last_gap && level_numerator(d, n, p) > last_num) {
                last_gap = gap;
                break;
            }
            p = next_prime(p);
        }
        last_num = level_numerator(d, n, p);
        last_p = p;
        primes.push(p);
    }
    primes
}

pub fn delta_realization_generators(d: u64, big_k: u32) -> Result<DeltaFamily> {
    if d == 0 || big_k == 0 {
        return Err(Error::BadLevel(big_k));
    }
    let primes = delta_primes(d, 2 * big_k as u64);
    let mut levels = Vec::new();
    let mut verified = Vec::new();
    for k in 1..=big_k {
        let n = 2 * k as u64;
        let (pe, po) = (primes[n as usize - 2], primes[n as usize - 1]);
        let even = Rational::new(level_numerator(d, n, pe), pe)?;
        let odd = Rational::new(level_numerator(d, n + 1, po), po)?;
        verified.push(format!("{} - {} < {} - {}", pe, d * n, po, d * (n + 1)));
        levels.push(DeltaLevel { k, even, odd });
    }
    let bases = GeneratorSet::new(levels.iter().flat_map(|l| [l.even.clone(), l.odd.clone()]))?;
    debug_assert!(bases.is_canonical());
    Ok(DeltaFamily {
        d,
        big_k,
        seed: PrimeSeed { primes, tag: SeedTag::DeltaRealization },
        levels,
        bases,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaCheck {
    pub d: u64,
    pub k: u32,
    #[serde(rename = "K")]
    pub big_k: u32,
    pub bases: GeneratorSet,
    /// `n(b) b^2 + n(b') b'^2` for the two level-`k` generators.
    pub x: Rational,
    pub hub: FactorizationDoc,
    pub hub_length: u64,
    pub lengths: MapUnion,
    pub delta: DeltaReport,
    /// `{d, 2d, ..., (2k-1)d}`
    pub required: BTreeSet<u64>,
    pub contains_required: bool,
    pub divisible_by_d: bool,
    /// Numerator of the first generator left out of the truncation.
    pub next_numerator: u64,
    /// Set when `next_numerator > x`. A generator `b` occurs in a
    /// factorization of `x` only if its numerator is at most `x`, so this
    /// makes the truncated computation exact for the full family.
    pub localized: bool,
}

pub fn delta_realization_check(d: u64, k: u32, big_k: u32) -> Result<DeltaCheck> {
    if k == 0 || k > big_k {
        return Err(Error::BadLevel(k));
    }
    let family = delta_realization_generators(d, big_k)?;
    let b = &family.bases;
    let level = &family.levels[k as usize - 1];
    let mut z = Factorization::new();
    for base in [&level.even, &level.odd] {
        let i = b.index_of(base).ok_or_else(|| Error::NotAGenerator(base.clone()))?;
        z.add(i, 2, crate::qcore::to_u64(base.numer())?);
    }
    let x = evaluate(&z, b)?;
    let hub = solve_hub(&x, b)?.ok_or_else(|| Error::NotMember(x.clone()))?;
    debug_assert_eq!(hub, z);
    let lengths = length_set_proper(&x, b)?;
    let delta = lengths.deltas();
    let required: BTreeSet<u64> = (1..2 * k as u64).map(|m| m * d).collect();
    let next = delta_primes(d, 2 * big_k as u64 + 1);
    let next_numerator = level_numerator(d, 2 * big_k as u64 + 2, *next.last().unwrap());
    Ok(DeltaCheck {
        d,
        k,
        big_k,
        bases: b.clone(),
        hub_length: hub.length(),
        contains_required: required.is_subset(&delta.deltas),
        divisible_by_d: delta.deltas.iter().all(|g| g % d == 0),
        localized: Rational::integer(next_numerator) > x,
        next_numerator,
        x,
        hub: hub.to_doc(b)?,
        lengths,
        delta,
        required,
    })
}

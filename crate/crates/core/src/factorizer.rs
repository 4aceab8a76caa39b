//! Factorizations over a generator set: evaluation, the hub normal form,
//! membership, rewrite chains and a brute-force enumerator.
//!
//! A factorization is a formal sum `c0 * 1 + sum c * b^e` over exponents
//! `e >= 1`; the atom `1 = b^0` is shared by every base. All rewriting is by
//! the identity `n(b) * b^e = d(b) * b^(e+1)`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::GeneratorSet;
use crate::qcore::{p_adic_valuation, prime_factors, to_u64, Rational};
use crate::Caps;

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factorization {
    c0: u64,
    /// `(base index, exponent >= 1) -> coefficient > 0`
    terms: BTreeMap<(usize, u32), u64>,
}

impl Factorization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(c0: u64) -> Self {
        Factorization { c0, terms: BTreeMap::new() }
    }

    /// Builder form of [`Factorization::add`].
    pub fn with(mut self, base: usize, exp: u32, coeff: u64) -> Self {
        self.add(base, exp, coeff);
        self
    }

    /// Adds `coeff` copies of `b^exp`; exponent zero adds to the unit atom.
    pub fn add(&mut self, base: usize, exp: u32, coeff: u64) {
        if coeff == 0 {
            return;
        }
        if exp == 0 {
            self.c0 += coeff;
        } else {
            *self.terms.entry((base, exp)).or_insert(0) += coeff;
        }
    }

    fn remove(&mut self, base: usize, exp: u32, coeff: u64) -> Result<()> {
        let have = self.coeff(base, exp);
        if have < coeff {
            return Err(Error::InvalidStep(format!(
                "need {coeff} copies at ({base}, {exp}), have {have}"
            )));
        }
        if exp == 0 {
            self.c0 -= coeff;
        } else if have == coeff {
            self.terms.remove(&(base, exp));
        } else {
            self.terms.insert((base, exp), have - coeff);
        }
        Ok(())
    }

    pub fn c0(&self) -> u64 {
        self.c0
    }

    pub fn coeff(&self, base: usize, exp: u32) -> u64 {
        if exp == 0 {
            self.c0
        } else {
            self.terms.get(&(base, exp)).copied().unwrap_or(0)
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, u32, u64)> + '_ {
        self.terms.iter().map(|(&(b, e), &c)| (b, e, c))
    }

    pub fn length(&self) -> u64 {
        self.c0 + self.terms.values().sum::<u64>()
    }

    pub fn is_empty(&self) -> bool {
        self.length() == 0
    }

    pub fn max_exp(&self) -> u32 {
        self.terms.keys().map(|&(_, e)| e).max().unwrap_or(0)
    }

    pub fn max_exp_of(&self, base: usize) -> u32 {
        self.terms.keys().filter(|k| k.0 == base).map(|&(_, e)| e).max().unwrap_or(0)
    }

    pub fn is_hub_shaped(&self, b: &GeneratorSet) -> Result<bool> {
        for (i, _, c) in self.terms() {
            if BigUint::from(c) >= *b.base(i)?.denom() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_doc(&self, b: &GeneratorSet) -> Result<FactorizationDoc> {
        let terms = self
            .terms()
            .map(|(i, exp, coeff)| Ok(TermDoc { base: b.base(i)?.clone(), exp, coeff }))
            .collect::<Result<_>>()?;
        Ok(FactorizationDoc { c0: self.c0, terms })
    }

    pub fn from_doc(doc: &FactorizationDoc, b: &GeneratorSet) -> Result<Self> {
        let mut z = Factorization::unit(doc.c0);
        for t in &doc.terms {
            let i = b.index_of(&t.base).ok_or_else(|| Error::NotAGenerator(t.base.clone()))?;
            z.add(i, t.exp, t.coeff);
        }
        Ok(z)
    }
}

/// Serialized form: `{"c0": 2, "terms": [{"base":"2/3","exp":1,"coeff":2}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationDoc {
    pub c0: u64,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub base: Rational,
    pub exp: u32,
    pub coeff: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `q*d(b)` copies of `b^(e+1)` become `q*n(b)` copies of `b^e`.
    Down,
    /// `q*n(b)` copies of `b^e` become `q*d(b)` copies of `b^(e+1)`.
    Up,
}

/// `multiplicity` applications of `n(b) * b^exp = d(b) * b^(exp+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RewriteStep {
    pub base: usize,
    pub exp: u32,
    pub direction: Direction,
    pub multiplicity: u64,
}

impl RewriteStep {
    pub fn reversed(self) -> Self {
        let direction = match self.direction {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        };
        RewriteStep { direction, ..self }
    }

    /// Signed change in length caused by the step.
    pub fn length_change(&self, b: &GeneratorSet) -> Result<i128> {
        let (n, d) = num_den(b, self.base)?;
        let per = d as i128 - n as i128;
        let q = self.multiplicity as i128;
        Ok(match self.direction {
            Direction::Up => q * per,
            Direction::Down => -q * per,
        })
    }
}

fn num_den(b: &GeneratorSet, i: usize) -> Result<(u64, u64)> {
    let base = b.base(i)?;
    Ok((to_u64(base.numer())?, to_u64(base.denom())?))
}

fn check_indices(z: &Factorization, b: &GeneratorSet) -> Result<()> {
    match z.terms().find(|&(i, _, _)| i >= b.len()) {
        Some((i, _, _)) => Err(Error::BadIndex(i)),
        None if z.c0 > 0 && b.is_empty() => Err(Error::BadIndex(0)),
        None => Ok(()),
    }
}

pub fn apply_step(z: &Factorization, step: &RewriteStep, b: &GeneratorSet) -> Result<Factorization> {
    let (n, d) = num_den(b, step.base)?;
    let q = step.multiplicity;
    let low = q.checked_mul(n).ok_or(Error::Overflow)?;
    let high = q.checked_mul(d).ok_or(Error::Overflow)?;
    let mut out = z.clone();
    match step.direction {
        Direction::Up => {
            out.remove(step.base, step.exp, low)?;
            out.add(step.base, step.exp + 1, high);
        }
        Direction::Down => {
            out.remove(step.base, step.exp + 1, high)?;
            out.add(step.base, step.exp, low);
        }
    }
    Ok(out)
}

pub fn evaluate(z: &Factorization, b: &GeneratorSet) -> Result<Rational> {
    check_indices(z, b)?;
    let mut sum = Rational::integer(z.c0);
    for (i, e, c) in z.terms() {
        sum = sum + b.base(i)?.pow(e).mul_u64(c);
    }
    Ok(sum)
}

/// Carries every coefficient `c >= d(b)` down one exponent, top-down per
/// base, until the hub shape is reached. Returns the hub and the steps taken.
pub fn hub_normalize(z: &Factorization, b: &GeneratorSet) -> Result<(Factorization, Vec<RewriteStep>)> {
    b.require_canonical()?;
    check_indices(z, b)?;
    let mut cur = z.clone();
    let mut steps = Vec::new();
    for i in 0..b.len() {
        let (_, d) = num_den(b, i)?;
        for e in (1..=cur.max_exp_of(i)).rev() {
            let c = cur.coeff(i, e);
            if c >= d {
                let step = RewriteStep {
                    base: i,
                    exp: e - 1,
                    direction: Direction::Down,
                    multiplicity: c / d,
                };
                cur = apply_step(&cur, &step, b)?;
                steps.push(step);
            }
        }
    }
    Ok((cur, steps))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

/// Writes `x` in hub form, or returns `None` when `x` is not in the monoid.
///
/// Coprime denominators split `x mod 1` into one component per base
/// (Chinese remainder). Each component has a unique expansion
/// `sum c_e b^e`, `0 <= c_e < d(b)`, whose digits are read off top-down by
/// solving `c_e * n(b)^e = D^e t (mod D)`. What is left of `x` must be a
/// nonnegative integer, the coefficient of the unit atom.
pub fn solve_hub(x: &Rational, b: &GeneratorSet) -> Result<Option<Factorization>> {
    b.require_canonical()?;
    if x.is_zero() {
        return Ok(Some(Factorization::new()));
    }
    if b.is_empty() {
        return Ok(None);
    }
    let m = x.denom().clone();
    let mut covered = BigUint::one();
    // (base index, exponent bound, denominator part owned by this base)
    let mut parts = Vec::new();
    for (i, base) in b.bases().iter().enumerate() {
        let mut e_cap = 0u32;
        let mut part = BigUint::one();
        for (p, k) in prime_factors(base.denom()) {
            let v = match p.to_u64() {
                Some(p) => p_adic_valuation(&m, p)?,
                None => large_valuation(&m, &p),
            };
            e_cap = e_cap.max(v.div_ceil(k));
            part *= num_traits::pow(p, v as usize);
        }
        covered *= &part;
        parts.push((i, e_cap, part));
    }
    if covered != m {
        return Ok(None);
    }

    let xs = x.to_signed();
    let a = xs.numer().clone();
    let mi = BigInt::from(m.clone());
    let mut z = Factorization::new();
    let mut rest = xs.clone();
    for (i, e_cap, part) in parts {
        if part.is_one() {
            continue;
        }
        let part = BigInt::from(part);
        let cof = &mi / &part;
        let r = (&a * mod_inverse(&(&cof % &part), &part)).mod_floor(&part);
        let mut t = Ratio::new(r, part);
        let base = b.base(i)?.to_signed();
        let dd = BigInt::from(b.base(i)?.denom().clone());
        let nn = BigInt::from(b.base(i)?.numer().clone());
        for e in (1..=e_cap).rev() {
            let scaled = &t * Ratio::from_integer(num_traits::pow(dd.clone(), e as usize));
            debug_assert!(scaled.is_integer());
            let top = scaled.to_integer().mod_floor(&dd);
            let inv = mod_inverse(&num_traits::pow(nn.clone(), e as usize).mod_floor(&dd), &dd);
            let c = (top * inv).mod_floor(&dd);
            if c.is_zero() {
                continue;
            }
            let term = num_traits::pow(base.clone(), e as usize) * Ratio::from_integer(c.clone());
            t -= &term;
            rest -= &term;
            z.add(i, e, c.to_u64().ok_or(Error::Overflow)?);
        }
        debug_assert!(t.is_integer());
    }
    debug_assert!(rest.is_integer());
    if rest.is_negative() {
        return Ok(None);
    }
    z.c0 = rest.to_integer().to_u64().ok_or(Error::Overflow)?;
    Ok(Some(z))
}

fn large_valuation(n: &BigUint, p: &BigUint) -> u32 {
    let mut n = n.clone();
    let mut e = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        e += 1;
    }
    e
}

/// The unique minimum-length factorization when every base is proper; it is
/// the hub factorization.
pub fn min_length_factorization(x: &Rational, b: &GeneratorSet) -> Result<Option<Factorization>> {
    b.require_canonical()?;
    if let Some(i) = b.improper_part().first() {
        return Err(Error::ImproperBase(b.base(*i)?.clone()));
    }
    let z = solve_hub(x, b)?;
    if let Some(z) = &z {
        assert!(z.is_hub_shaped(b)?, "hub solver returned a non-hub factorization");
    }
    Ok(z)
}

/// Every factorization of `x` with exponents at most `caps.e_max` and
/// length at most `caps.len_max`, for any generator set.
///
/// Depth-first over the slots `(base, exponent)` with exponents descending.
/// Everything is scaled to integers by a common denominator. Before slot `k`
/// the remainder must be an integer combination of the remaining slot values,
/// so it has to be divisible by `scale / lcm(remaining denominators)`.
/// Output is sorted by length, then by coefficients in `(base, exponent)`
/// order, then by `c0`.
pub fn enumerate_factorizations(x: &Rational, b: &GeneratorSet, caps: Caps) -> Result<Vec<Factorization>> {
    if b.is_empty() {
        return Ok(if x.is_zero() { vec![Factorization::new()] } else { Vec::new() });
    }
    let mut slots: Vec<(usize, u32, Rational)> = Vec::new();
    for (i, base) in b.bases().iter().enumerate() {
        for e in (1..=caps.e_max).rev() {
            slots.push((i, e, base.pow(e)));
        }
    }
    let mut scale = x.denom().clone();
    for (_, _, v) in &slots {
        scale = scale.lcm(v.denom());
    }
    let values: Vec<BigUint> = slots.iter().map(|(_, _, v)| v.numer() * (&scale / v.denom())).collect();
    let k = slots.len();
    let mut moduli = vec![BigUint::one(); k + 1];
    let mut max_after = vec![scale.clone(); k + 1];
    moduli[k] = scale.clone();
    let mut l = BigUint::one();
    for j in (0..k).rev() {
        l = l.lcm(slots[j].2.denom());
        moduli[j] = &scale / &l;
        max_after[j] = max_after[j + 1].clone().max(values[j].clone());
    }
    let ctx = Enum { values: &values, moduli: &moduli, max_after: &max_after, scale: &scale, len_max: caps.len_max };
    let target = x.numer() * (&scale / x.denom());
    let mut found = Vec::new();
    let mut coeffs = vec![0u64; k];
    ctx.dfs(0, target, 0, &mut coeffs, &mut found);

    let mut out: Vec<(Vec<u64>, Factorization)> = found
        .into_iter()
        .map(|(cs, c0)| {
            let mut z = Factorization::unit(c0);
            for (j, &c) in cs.iter().enumerate() {
                z.add(slots[j].0, slots[j].1, c);
            }
            // slot order within a base is descending in the exponent
            let mut key: Vec<u64> = Vec::with_capacity(k + 2);
            key.push(z.length());
            for i in 0..b.len() {
                key.extend((1..=caps.e_max).map(|e| z.coeff(i, e)));
            }
            key.push(c0);
            (key, z)
        })
        .collect();
    out.sort();
    Ok(out.into_iter().map(|(_, z)| z).collect())
}

struct Enum<'a> {
    values: &'a [BigUint],
    moduli: &'a [BigUint],
    max_after: &'a [BigUint],
    scale: &'a BigUint,
    len_max: u64,
}

impl Enum<'_> {
    fn dfs(&self, j: usize, rem: BigUint, used: u64, coeffs: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, u64)>) {
        if !(&rem % &self.moduli[j]).is_zero() {
            return;
        }
        let left = self.len_max - used;
        if rem > &self.max_after[j] * BigUint::from(left) {
            return;
        }
        if j == self.values.len() {
            let (c0, r) = rem.div_rem(self.scale);
            if r.is_zero() {
                if let Some(c0) = c0.to_u64().filter(|&c| c <= left) {
                    out.push((coeffs.clone(), c0));
                }
            }
            return;
        }
        let v = &self.values[j];
        let mut rem = rem;
        let mut c = 0u64;
        loop {
            coeffs[j] = c;
            self.dfs(j + 1, rem.clone(), used + c, coeffs, out);
            if c == left || rem < *v {
                break;
            }
            rem -= v;
            c += 1;
        }
        coeffs[j] = 0;
    }
}

/// Single-identity steps from `z` to `target`, routed through the hub.
pub fn rewrite_chain(z: &Factorization, target: &Factorization, b: &GeneratorSet) -> Result<Vec<RewriteStep>> {
    b.require_canonical()?;
    let (vz, vt) = (evaluate(z, b)?, evaluate(target, b)?);
    if vz != vt {
        return Err(Error::ValueMismatch(vz, vt));
    }
    if z == target {
        return Ok(Vec::new());
    }
    let (h1, mut steps) = hub_normalize(z, b)?;
    let (h2, back) = hub_normalize(target, b)?;
    debug_assert_eq!(h1, h2);
    steps.extend(back.into_iter().rev().map(RewriteStep::reversed));
    Ok(steps)
}

/// Applies a chain, checking every step.
pub fn replay_chain(z: &Factorization, steps: &[RewriteStep], b: &GeneratorSet) -> Result<Vec<Factorization>> {
    let mut seq = vec![z.clone()];
    for s in steps {
        let next = apply_step(seq.last().expect("nonempty"), s, b)?;
        seq.push(next);
    }
    Ok(seq)
}

/// Whether the hub `z` is certified to be the longest factorization of its
/// value: `c < min(n(b), d(b))` at every exponent `>= 1` and `c0 < n(b)` for
/// every proper base. `false` means only "not certified".
pub fn is_max_length(z: &Factorization, b: &GeneratorSet) -> Result<bool> {
    b.require_canonical()?;
    check_indices(z, b)?;
    if !z.is_hub_shaped(b)? {
        return Err(Error::NotHub);
    }
    for (i, _, c) in z.terms() {
        let (n, d) = num_den(b, i)?;
        if c >= n.min(d) {
            return Ok(false);
        }
    }
    for i in b.proper_part() {
        let (n, _) = num_den(b, i)?;
        if z.c0 >= n {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Sets of lengths as finite unions of multidimensional arithmetic
//! progressions, together with the invariants computed from them: delta
//! sets, unions of sets of lengths and almost-arithmetic-progression shape.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factorizer::{enumerate_factorizations, solve_hub, Factorization};
use crate::monoid::{canonical_atoms, GeneratorSet};
use crate::qcore::{to_u64, Rational};
use crate::Caps;

/// A progression length `l` in `P_l(d) = dZ ∩ [0, l*d]`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extent {
    Finite(u64),
    Infinite,
}

impl Extent {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extent::Infinite)
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(n) => write!(f, "{n}"),
            Extent::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(n) => s.serialize_u64(*n),
            Extent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Extent::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Extent::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad extent {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dim {
    pub d: u64,
    pub l: Extent,
}

/// `offset + P_{l_1}(d_1) + ... + P_{l_r}(d_r)`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Component {
    pub offset: u64,
    pub diffs: Vec<Dim>,
}

impl Component {
    pub fn singleton(n: u64) -> Self {
        Component { offset: n, diffs: Vec::new() }
    }

    pub fn is_infinite(&self) -> bool {
        self.diffs.iter().any(|d| d.l.is_infinite())
    }

    fn finite_extent(&self) -> u64 {
        self.diffs
            .iter()
            .filter_map(|dim| match dim.l {
                Extent::Finite(l) => Some(l * dim.d),
                Extent::Infinite => None,
            })
            .sum()
    }

    /// Elements `<= upper`.
    pub fn values_upto(&self, upper: u64) -> Vec<u64> {
        if upper < self.offset {
            return Vec::new();
        }
        let span = (upper - self.offset) as usize;
        let mut reach = vec![false; span + 1];
        reach[0] = true;
        for dim in &self.diffs {
            let d = dim.d as usize;
            if d == 0 || d > span {
                continue;
            }
            match dim.l {
                Extent::Infinite => {
                    for i in d..=span {
                        if reach[i - d] {
                            reach[i] = true;
                        }
                    }
                }
                Extent::Finite(l) => {
                    let copies = l.min((span / d) as u64);
                    for _ in 0..copies {
                        for i in (d..=span).rev() {
                            if reach[i - d] {
                                reach[i] = true;
                            }
                        }
                    }
                }
            }
        }
        reach
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| self.offset + i as u64)
            .collect()
    }

    /// Beyond the returned threshold membership depends only on the residue
    /// modulo the returned period. Uses the bound `(a-1)(b-1)` on the
    /// Frobenius number of a numerical semigroup with least generator `a` and
    /// largest `b`.
    fn periodicity(&self) -> (u64, Option<u64>) {
        let inf: Vec<u64> = self.diffs.iter().filter(|d| d.l.is_infinite()).map(|d| d.d).collect();
        let base = self.offset + self.finite_extent();
        if inf.is_empty() {
            return (base, None);
        }
        let g = inf.iter().fold(0u64, |g, &d| g.gcd(&d));
        let lo = inf.iter().min().unwrap() / g;
        let hi = inf.iter().max().unwrap() / g;
        (base + g * (lo - 1) * (hi - 1), Some(g))
    }
}

/// A finite union of multidimensional arithmetic progressions; the symbolic
/// form of a set of lengths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapUnion {
    pub components: Vec<Component>,
}

impl MapUnion {
    pub fn singleton(n: u64) -> Self {
        MapUnion { components: vec![Component::singleton(n)] }
    }

    /// Appends a component unless an identical one is already present.
    pub fn push(&mut self, c: Component) {
        if !self.components.contains(&c) {
            self.components.push(c);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        self.components.iter().any(Component::is_infinite)
    }

    pub fn min(&self) -> Option<u64> {
        self.components.iter().map(|c| c.offset).min()
    }

    pub fn max(&self) -> Option<Extent> {
        if self.is_infinite() {
            return Some(Extent::Infinite);
        }
        self.components.iter().map(|c| c.offset + c.finite_extent()).max().map(Extent::Finite)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.components.iter().any(|c| c.values_upto(n).last() == Some(&n))
    }

    /// The elements `<= upper`, materialized.
    pub fn truncate(&self, upper: u64) -> BTreeSet<u64> {
        self.components.iter().flat_map(|c| c.values_upto(upper)).collect()
    }

    pub fn shifted(&self, by: u64) -> MapUnion {
        let components = self
            .components
            .iter()
            .map(|c| Component { offset: c.offset + by, diffs: c.diffs.clone() })
            .collect();
        MapUnion { components }
    }

    /// Successive gaps of the whole (possibly infinite) set.
    ///
    /// Finite components end at their maximum. Each infinite one is periodic
    /// beyond a Frobenius-type threshold, so the union is periodic with
    /// period `P = lcm` of the component periods beyond the largest
    /// threshold `T0`; every gap then shows up below `T0 + 2P`.
    pub fn deltas(&self) -> DeltaReport {
        let mut threshold = 0;
        let mut period = 1u64;
        for c in &self.components {
            let (t, p) = c.periodicity();
            threshold = threshold.max(t);
            if let Some(p) = p {
                period = period.lcm(&p);
            }
        }
        let truncation = if self.is_infinite() { threshold + 2 * period } else { threshold };
        DeltaReport {
            deltas: gaps(&self.truncate(truncation)),
            truncation,
            threshold,
            period,
        }
    }
}

impl fmt::Display for MapUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            if c.diffs.is_empty() {
                write!(f, "{{{}}}", c.offset)?;
            } else {
                write!(f, "({}", c.offset)?;
                for d in &c.diffs {
                    write!(f, " + P_{}({})", d.l, d.d)?;
                }
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

pub fn gaps(set: &BTreeSet<u64>) -> BTreeSet<u64> {
    set.iter().zip(set.iter().skip(1)).map(|(a, b)| b - a).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub deltas: BTreeSet<u64>,
    /// Lengths up to this bound were materialized.
    pub truncation: u64,
    /// Beyond this the set of lengths is periodic with `period`.
    pub threshold: u64,
    pub period: u64,
}

/// The sets `V`, `U` and `W = {V ∪ U}` read off a hub factorization over
/// proper bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubWitnessSets {
    /// Bases with some hub coefficient `c >= n(b)` at an exponent `>= 1`.
    pub v: BTreeSet<usize>,
    /// Subsets `U` of the bases with `sum n(b) <= c0`; always contains `∅`.
    pub u_family: Vec<BTreeSet<usize>>,
    pub w_family: Vec<BTreeSet<usize>>,
}

pub fn hub_witness_sets(hub: &Factorization, b: &GeneratorSet) -> Result<HubWitnessSets> {
    let nums: Vec<u64> = b.bases().iter().map(|x| to_u64(x.numer())).collect::<Result<_>>()?;
    let v: BTreeSet<usize> = hub
        .terms()
        .filter(|&(i, _, c)| c >= nums[i])
        .map(|(i, _, _)| i)
        .collect();
    let mut u_family = Vec::new();
    let mut current = BTreeSet::new();
    subsets_within(&nums, 0, hub.c0(), &mut current, &mut u_family);
    let mut w_family: Vec<BTreeSet<usize>> = Vec::new();
    for u in &u_family {
        let w: BTreeSet<usize> = v.union(u).copied().collect();
        if !w_family.contains(&w) {
            w_family.push(w);
        }
    }
    Ok(HubWitnessSets { v, u_family, w_family })
}

fn subsets_within(nums: &[u64], from: usize, budget: u64, cur: &mut BTreeSet<usize>, out: &mut Vec<BTreeSet<usize>>) {
    out.push(cur.clone());
    for i in from..nums.len() {
        if nums[i] <= budget {
            cur.insert(i);
            subsets_within(nums, i + 1, budget - nums[i], cur, out);
            cur.remove(&i);
        }
    }
}

fn hub_of_member(x: &Rational, b: &GeneratorSet) -> Result<Factorization> {
    solve_hub(x, b)?.ok_or_else(|| Error::NotMember(x.clone()))
}

/// `L(x)` over proper canonical bases: the union over `W` of
/// `|z_h| + sum_{b in W} P_inf(d(b) - n(b))`.
pub fn length_set_proper(x: &Rational, b: &GeneratorSet) -> Result<MapUnion> {
    b.require_canonical()?;
    if let Some(&i) = b.improper_part().first() {
        return Err(Error::ImproperBase(b.base(i)?.clone()));
    }
    let hub = hub_of_member(x, b)?;
    let sets = hub_witness_sets(&hub, b)?;
    let mut out = MapUnion::default();
    for w in &sets.w_family {
        let diffs = w
            .iter()
            .map(|&i| {
                let base = b.base(i)?;
                Ok(Dim { d: to_u64(&(base.denom() - base.numer()))?, l: Extent::Infinite })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Component { offset: hub.length(), diffs });
    }
    Ok(out)
}

/// The pairs `(y, y')` with `y` in the monoid over the bases above one,
/// `y'` in the monoid over the bases below one, and `x = y + y'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorPairs {
    pub pairs: Vec<(Rational, Rational)>,
    /// Largest exponent with `b^e <= x`, per improper base.
    pub exponent_bounds: Vec<(Rational, u32)>,
    /// No factorization in the improper part of an element `<= x` is longer.
    pub length_bound: u64,
}

pub fn improper_divisor_pairs(x: &Rational, b: &GeneratorSet) -> Result<DivisorPairs> {
    b.require_canonical()?;
    hub_of_member(x, b)?;
    let imp = b.subset(&b.improper_part());
    let prop = b.subset(&b.proper_part());
    let exponent_bounds: Vec<(Rational, u32)> = imp
        .bases()
        .iter()
        .map(|base| {
            let mut e = 0;
            while base.pow(e + 1) <= *x {
                e += 1;
            }
            (base.clone(), e)
        })
        .collect();
    let length_bound = to_u64(&x.floor())?;
    if imp.is_empty() {
        return Ok(DivisorPairs { pairs: vec![(Rational::zero(), x.clone())], exponent_bounds, length_bound });
    }
    let frac = improper_fraction(x, &imp);
    let room = match x.checked_sub(&frac) {
        Some(r) => to_u64(&r.floor())?,
        None => 0,
    };
    let mut pairs = Vec::new();
    for j in 0..=room {
        let y = &frac + &Rational::integer(j);
        let Some(rest) = x.checked_sub(&y) else { break };
        if solve_hub(&y, &imp)?.is_none() {
            continue;
        }
        let ok = if prop.is_empty() { rest.is_zero() } else { solve_hub(&rest, &prop)?.is_some() };
        if ok {
            pairs.push((y, rest));
        }
    }
    Ok(DivisorPairs { pairs, exponent_bounds, length_bound })
}

/// The part of `x mod 1` whose denominator is built from primes of the
/// improper denominators. The parts have coprime denominators, so every `y`
/// of a divisor pair is congruent to it modulo 1.
fn improper_fraction(x: &Rational, imp: &GeneratorSet) -> Rational {
    let primes = imp.bases().iter().fold(BigUint::one(), |acc, b| acc * b.denom());
    let (mut d1, mut d2) = (BigUint::one(), x.denom().clone());
    loop {
        let g = d2.gcd(&primes);
        if g.is_one() {
            break;
        }
        d2 /= &g;
        d1 *= g;
    }
    if d1.is_one() {
        return Rational::zero();
    }
    // a / (d1 d2) = u / d1 + v / d2 (mod 1) with u = a d2^-1 (mod d1)
    let m = BigInt::from(d1.clone());
    let inv = BigInt::from(d2).extended_gcd(&m).x.mod_floor(&m);
    let u = (BigInt::from(x.numer().clone()) * inv).mod_floor(&m);
    Rational::from_parts(u.to_biguint().expect("reduced residue"), d1).expect("nonzero denominator")
}

/// Lengths of `y` over bases that all exceed one. Every atom is at least one,
/// so `floor(y)` bounds the length and `b^e <= y` bounds each exponent; the
/// enumeration is therefore complete.
fn improper_lengths(y: &Rational, imp: &GeneratorSet) -> Result<BTreeSet<u64>> {
    let mut e_max = 0;
    for base in imp.bases() {
        while base.pow(e_max + 1) <= *y {
            e_max += 1;
        }
    }
    let caps = Caps { e_max, len_max: to_u64(&y.floor())?, cap: 0 };
    Ok(enumerate_factorizations(y, imp, caps)?.iter().map(Factorization::length).collect())
}

/// `L(x)` for any canonical generator set, as the union over divisor pairs
/// `(y, y')` of `L(y) + L(y')`.
pub fn length_set(x: &Rational, b: &GeneratorSet) -> Result<MapUnion> {
    b.require_canonical()?;
    if b.improper_part().is_empty() {
        return length_set_proper(x, b);
    }
    if b.proper_part().is_empty() {
        hub_of_member(x, b)?;
        let lengths = improper_lengths(x, b)?;
        return Ok(MapUnion { components: lengths.into_iter().map(Component::singleton).collect() });
    }
    let imp = b.subset(&b.improper_part());
    let prop = b.subset(&b.proper_part());
    let pairs = improper_divisor_pairs(x, b)?;
    let mut out = MapUnion::default();
    for (y, rest) in &pairs.pairs {
        let head = if y.is_zero() { BTreeSet::from([0]) } else { improper_lengths(y, &imp)? };
        let tail = if rest.is_zero() { MapUnion::singleton(0) } else { length_set_proper(rest, &prop)? };
        for l in head {
            for c in tail.shifted(l).components {
                out.push(c);
            }
        }
    }
    Ok(out)
}

pub fn is_length_set_infinite(x: &Rational, b: &GeneratorSet) -> Result<bool> {
    Ok(length_set(x, b)?.is_infinite())
}

/// The common value of `|n(b) - d(b)|`, if all bases share it.
pub fn is_single_difference(b: &GeneratorSet) -> Option<u64> {
    let mut diffs = b.bases().iter().map(|x| {
        let (n, d) = (x.numer(), x.denom());
        if n > d { n - d } else { d - n }
    });
    let first = diffs.next()?;
    if diffs.all(|d| d == first) {
        first.to_u64()
    } else {
        None
    }
}

pub fn delta_of_element(x: &Rational, b: &GeneratorSet) -> Result<DeltaReport> {
    Ok(length_set(x, b)?.deltas())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaSample {
    /// Union of `Δ(x)` over the sampled members; a lower bound for `Δ(M)`.
    pub lower_bound: BTreeSet<u64>,
    /// `Δ(M) ⊆ {d}` when all bases share the difference `d`.
    pub upper_bound: Option<BTreeSet<u64>>,
    /// Set when the bounds meet.
    pub exact: Option<BTreeSet<u64>>,
    /// Sampled values that are zero or not in the monoid.
    pub skipped: Vec<Rational>,
}

pub fn delta_sample(b: &GeneratorSet, sample: &[Rational]) -> Result<DeltaSample> {
    b.require_canonical()?;
    let mut lower = BTreeSet::new();
    let mut skipped = Vec::new();
    for x in sample {
        if x.is_zero() || solve_hub(x, b)?.is_none() {
            skipped.push(x.clone());
            continue;
        }
        lower.extend(delta_of_element(x, b)?.deltas);
    }
    let upper_bound = is_single_difference(b).map(|d| BTreeSet::from([d]));
    let exact = upper_bound.clone().filter(|u| *u == lower);
    Ok(DeltaSample { lower_bound: lower, upper_bound, exact, skipped })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionReport {
    pub k: u64,
    /// `U_k ∩ [1, truncation]` over the sums of `k` atoms with exponent `<= e_max`.
    pub values: BTreeSet<u64>,
    pub truncation: u64,
    pub e_max: u32,
    pub complete: bool,
    /// `ρ_k`; infinite as soon as one contributing set of lengths is.
    pub elasticity: Extent,
    /// Distinct values of `k`-atom sums examined.
    pub contributing: usize,
}

pub fn union_of_lengths(k: u64, b: &GeneratorSet, caps: Caps) -> Result<UnionReport> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    b.require_canonical()?;
    let atoms: BTreeSet<Rational> = canonical_atoms(b, caps.e_max)?
        .iter()
        .map(|a| a.value(b))
        .collect::<Result<_>>()?;
    let mut sums: BTreeSet<Rational> = BTreeSet::from([Rational::zero()]);
    for _ in 0..k {
        sums = sums.iter().flat_map(|s| atoms.iter().map(move |a| s + a)).collect();
    }
    let mut values = BTreeSet::new();
    let mut elasticity = Extent::Finite(0);
    for x in &sums {
        let l = length_set(x, b)?;
        debug_assert!(l.contains(k));
        values.extend(l.truncate(caps.cap).into_iter().filter(|&n| n >= 1));
        elasticity = elasticity.max(l.max().unwrap_or(Extent::Finite(0)));
    }
    Ok(UnionReport {
        k,
        values,
        truncation: caps.cap,
        e_max: caps.e_max,
        complete: b.is_empty(),
        elasticity,
        contributing: sums.len(),
    })
}

/// `y + (S' ∪ S* ∪ S'')` with `S* = {0, d, ..., len*d}` (or unbounded),
/// `S' ⊆ [-N, -1]` and `S''` within `N` above the top of `S*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AapDecomposition {
    pub y: i64,
    pub d: u64,
    pub n: u64,
    pub s_prime: BTreeSet<i64>,
    /// Number of steps of `S*`; ignored when `s_star_infinite`.
    pub s_star_len: u64,
    pub s_star_infinite: bool,
    pub s_dprime: BTreeSet<i64>,
}

impl AapDecomposition {
    pub fn s_star(&self) -> impl Iterator<Item = i64> + '_ {
        (0..=self.s_star_len as i64).map(move |i| i * self.d as i64)
    }

    /// The finite set described, with an infinite `S*` cut at its recorded length.
    pub fn reconstruct(&self) -> BTreeSet<i64> {
        self.s_prime
            .iter()
            .copied()
            .chain(self.s_star())
            .chain(self.s_dprime.iter().copied())
            .map(|v| self.y + v)
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        let d = self.d as i64;
        let n = self.n as i64;
        let top = self.s_star_len as i64 * d;
        self.s_prime.iter().all(|&v| (-n..=-1).contains(&v) && v % d == 0)
            && self.s_dprime.iter().all(|&v| v > top && v <= top + n && v % d == 0)
            && !(self.s_star_infinite && !self.s_dprime.is_empty())
    }
}

/// Looks for a decomposition of the finite set `s` as an AAP with
/// difference `d` and bound `n`, trying anchors in increasing order and
/// taking the longest progression from each anchor.
pub fn aap_check(s: &BTreeSet<i64>, d: u64, n: u64) -> Option<AapDecomposition> {
    let min = *s.first()?;
    if d == 0 {
        return None;
    }
    let di = d as i64;
    let ni = n as i64;
    if s.iter().any(|&v| (v - min).rem_euclid(di) != 0) {
        return None;
    }
    for &y in s.range(min..=min + ni) {
        let mut len = 0u64;
        while s.contains(&(y + (len as i64 + 1) * di)) {
            len += 1;
        }
        let top = y + len as i64 * di;
        let s_prime: BTreeSet<i64> = s.range(..y).map(|v| v - y).collect();
        let s_dprime: BTreeSet<i64> = s.range(top + 1..).map(|v| v - y).collect();
        if s_dprime.iter().all(|&v| v - (top - y) <= ni) {
            return Some(AapDecomposition {
                y,
                d,
                n,
                s_prime,
                s_star_len: len,
                s_star_infinite: false,
                s_dprime,
            });
        }
    }
    None
}

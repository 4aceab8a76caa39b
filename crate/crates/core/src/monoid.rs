//! Generator sets, the cyclic trichotomy and the atomicity predicates for
//! monoids generated by the nonnegative powers of finitely many rationals.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qcore::{classify_fraction, FractionClass, Rational};

/// Minimality of a generator set, which is only decided in the canonical case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Minimality {
    Yes,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// Set when some base is a unit fraction; such monoids are not atomic.
    pub has_unit_fraction: bool,
    pub has_integer: bool,
    pub is_canonical: bool,
    pub is_hereditarily_atomic: bool,
    pub accp_obstructed: bool,
    pub minimal: Minimality,
}

/// A finite set of positive rational bases, sorted ascending by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    bases: Vec<Rational>,
    flags: Flags,
}

impl GeneratorSet {
    pub fn new(bases: impl IntoIterator<Item = Rational>) -> Result<Self> {
        build_generator_set(bases.into_iter().collect())
    }

    /// Parses a comma separated list such as `"2/3,4/5"`; the empty string
    /// gives the trivial monoid.
    pub fn parse(list: &str) -> Result<Self> {
        let bases = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Rational>>>()?;
        build_generator_set(bases)
    }

    pub fn bases(&self) -> &[Rational] {
        &self.bases
    }

    pub fn base(&self, i: usize) -> Result<&Rational> {
        self.bases.get(i).ok_or(Error::BadIndex(i))
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn flags(&self) -> &Flags {
        &self.flags
    }

    pub fn is_canonical(&self) -> bool {
        self.flags.is_canonical
    }

    pub fn index_of(&self, b: &Rational) -> Option<usize> {
        self.bases.binary_search(b).ok()
    }

    /// Indices of the bases below one.
    pub fn proper_part(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bases[i] < Rational::one()).collect()
    }

    /// Indices of the bases above one.
    pub fn improper_part(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bases[i] > Rational::one()).collect()
    }

    pub fn all_proper(&self) -> bool {
        self.bases.iter().all(|b| *b < Rational::one())
    }

    pub fn subset(&self, indices: &[usize]) -> GeneratorSet {
        let bases = indices.iter().map(|&i| self.bases[i].clone()).collect();
        build_generator_set(bases).expect("a subset of distinct bases is valid")
    }

    pub(crate) fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::NotCanonical)
        }
    }
}

impl Serialize for GeneratorSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            bases: &'a [Rational],
            flags: &'a Flags,
        }
        Doc { bases: &self.bases, flags: &self.flags }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeneratorSet {
    /// Only `bases` is read; flags are always recomputed.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            bases: Vec<Rational>,
        }
        let doc = Doc::deserialize(d)?;
        build_generator_set(doc.bases).map_err(serde::de::Error::custom)
    }
}

pub fn build_generator_set(mut bases: Vec<Rational>) -> Result<GeneratorSet> {
    if bases.iter().any(Rational::is_zero) {
        return Err(Error::ZeroGenerator);
    }
    bases.sort();
    if let Some(w) = bases.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateBase(w[0].clone()));
    }
    let has_unit_fraction =
        bases.iter().any(|b| classify_fraction(b) == FractionClass::UnitFraction);
    let has_integer = bases.iter().any(Rational::is_integer);
    let coprime = bases.iter().enumerate().all(|(i, a)| {
        bases[i + 1..].iter().all(|b| a.denom().gcd(b.denom()).is_one())
    });
    let is_canonical = !has_integer && coprime;
    let is_hereditarily_atomic = bases.iter().all(|b| b.numer() >= b.denom());
    let minimal = if bases.is_empty() || (is_canonical && !has_unit_fraction) {
        Minimality::Yes
    } else {
        Minimality::Unknown
    };
    let flags = Flags {
        has_unit_fraction,
        has_integer,
        is_canonical,
        is_hereditarily_atomic,
        accp_obstructed: !is_hereditarily_atomic,
        minimal,
    };
    Ok(GeneratorSet { bases, flags })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclicCase {
    IntegerBase,
    UnitFractionBase,
    Generic,
}

/// Symbolic atom set of a cyclic monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AtomDescription {
    /// `{1}`
    One,
    /// no atoms
    Empty,
    /// `{r^n : n >= 0}`
    PowersOf { base: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicClassification {
    pub case: CyclicCase,
    pub atomic: bool,
    pub atoms: AtomDescription,
}

pub fn classify_cyclic(r: &Rational) -> Result<CyclicClassification> {
    if r.is_zero() {
        return Err(Error::ZeroGenerator);
    }
    let c = if r.denom().is_one() {
        CyclicClassification {
            case: CyclicCase::IntegerBase,
            atomic: true,
            atoms: AtomDescription::One,
        }
    } else if r.numer().is_one() {
        CyclicClassification {
            case: CyclicCase::UnitFractionBase,
            atomic: false,
            atoms: AtomDescription::Empty,
        }
    } else {
        CyclicClassification {
            case: CyclicCase::Generic,
            atomic: true,
            atoms: AtomDescription::PowersOf { base: r.clone() },
        }
    };
    Ok(c)
}

/// `n(b) >= d(b)` for every base.
pub fn is_hereditarily_atomic(b: &GeneratorSet) -> bool {
    b.flags.is_hereditarily_atomic
}

/// A base with `n(b) < d(b)`, whose presence rules out the ACCP.
pub fn accp_obstruction(b: &GeneratorSet) -> Option<Rational> {
    b.bases.iter().find(|b| b.numer() < b.denom()).cloned()
}

/// Whether the sufficient condition for every positive power of `b0` being an
/// atom holds: all bases are non-integers with numerator other than one, and
/// `d(b0)` is coprime to every other denominator.
pub fn atom_certificate(b0: &Rational, b: &GeneratorSet) -> Result<bool> {
    if b.index_of(b0).is_none() {
        return Err(Error::NotAGenerator(b0.clone()));
    }
    let shape_ok = b.bases.iter().all(|x| !x.is_integer() && !x.numer().is_one());
    let coprime = b
        .bases
        .iter()
        .filter(|x| *x != b0)
        .all(|x| x.denom().gcd(b0.denom()).is_one());
    Ok(shape_ok && coprime)
}

/// One atom `b^e` of a canonical monoid; `base == None` is the shared atom 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AtomRef {
    pub base: Option<usize>,
    pub exp: u32,
}

impl AtomRef {
    pub const UNIT: AtomRef = AtomRef { base: None, exp: 0 };

    pub fn value(&self, b: &GeneratorSet) -> Result<Rational> {
        match self.base {
            None => Ok(Rational::one()),
            Some(i) => Ok(b.base(i)?.pow(self.exp)),
        }
    }
}

pub fn canonical_atoms(b: &GeneratorSet, e_max: u32) -> Result<Vec<AtomRef>> {
    b.require_canonical()?;
    if b.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![AtomRef::UNIT];
    for i in 0..b.len() {
        out.extend((1..=e_max).map(|exp| AtomRef { base: Some(i), exp }));
    }
    Ok(out)
}

/// The bases below one. `M_B` is atomic exactly when the monoid over this
/// subset is.
pub fn proper_reduction(b: &GeneratorSet) -> GeneratorSet {
    b.subset(&b.proper_part())
}

/// Distinct values among a set of atoms, in ascending order.
pub fn atom_values(b: &GeneratorSet, atoms: &[AtomRef]) -> Result<BTreeSet<Rational>> {
    atoms.iter().map(|a| a.value(b)).collect()
}

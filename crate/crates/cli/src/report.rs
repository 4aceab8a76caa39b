use std::collections::BTreeSet;
use std::fmt::Write;

use multifrac::constructs::{
    delta_realization_check, delta_realization_generators, nonatomic_family, nonatomic_witness, DeltaCheck,
    DeltaFamily, NonatomicFamily, NonatomicWitness, PrimeSeed,
};
use multifrac::factorizer::{enumerate_factorizations, min_length_factorization, solve_hub, FactorizationDoc};
use multifrac::lengths::{
    aap_check, delta_of_element, delta_sample, gaps, length_set, DeltaReport, DeltaSample, UnionReport,
};
use multifrac::monoid::{
    accp_obstruction, atom_certificate, canonical_atoms, classify_cyclic, is_hereditarily_atomic,
    proper_reduction, CyclicClassification,
};
use multifrac::{AapDecomposition, Caps, Error, Factorization, GeneratorSet, MapUnion, Rational};
use serde::Serialize;

/// A rendered result: one JSON document and a plain-text rendering.
pub struct Report {
    json: String,
    text: String,
}

impl Report {
    pub fn new<T: Serialize>(doc: &T, text: String) -> Report {
        let json = serde_json::to_string(doc).expect("reports serialize");
        Report { json, text }
    }

    pub fn render(&self, json: bool) -> String {
        let mut out = if json { self.json.clone() } else { self.text.clone() };
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }
}

pub fn error_json(e: &Error) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        error: Inner<'a>,
    }
    #[derive(Serialize)]
    struct Inner<'a> {
        kind: &'a str,
        message: String,
    }
    serde_json::to_string(&Doc { error: Inner { kind: e.kind(), message: e.to_string() } }).expect("serializes")
}

fn list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

fn set_text(s: &BTreeSet<u64>) -> String {
    format!("{{{}}}", list(s))
}

#[derive(Serialize)]
struct CyclicEntry {
    base: Rational,
    #[serde(flatten)]
    class: CyclicClassification,
    atom_certificate: bool,
}

#[derive(Serialize)]
struct ClassifyDoc {
    bases: GeneratorSet,
    cyclic: Vec<CyclicEntry>,
    hereditarily_atomic: bool,
    accp_obstruction: Option<Rational>,
    proper_reduction: GeneratorSet,
}

pub fn classify(b: &GeneratorSet) -> Result<Report, Error> {
    let mut cyclic = Vec::new();
    for base in b.bases() {
        cyclic.push(CyclicEntry {
            base: base.clone(),
            class: classify_cyclic(base)?,
            atom_certificate: atom_certificate(base, b)?,
        });
    }
    let doc = ClassifyDoc {
        bases: b.clone(),
        cyclic,
        hereditarily_atomic: is_hereditarily_atomic(b),
        accp_obstruction: accp_obstruction(b),
        proper_reduction: proper_reduction(b),
    };
    let f = b.flags();
    let mut text = format!("bases: {}\n", list(b.bases()));
    writeln!(text, "canonical: {}", f.is_canonical).unwrap();
    writeln!(text, "unit fraction: {}  integer: {}", f.has_unit_fraction, f.has_integer).unwrap();
    writeln!(text, "hereditarily atomic: {}", doc.hereditarily_atomic).unwrap();
    if let Some(o) = &doc.accp_obstruction {
        writeln!(text, "ACCP fails: {o} is below one").unwrap();
    }
    for c in &doc.cyclic {
        writeln!(text, "  {}: {:?}, atomic {}, atom certificate {}", c.base, c.class.case, c.class.atomic, c.atom_certificate)
            .unwrap();
    }
    Ok(Report::new(&doc, text))
}

#[derive(Serialize)]
struct AtomEntry {
    base: Option<Rational>,
    exp: u32,
    value: Rational,
}

#[derive(Serialize)]
struct AtomsDoc {
    atoms: Vec<AtomEntry>,
    caps: Caps,
    complete: bool,
}

pub fn atoms(b: &GeneratorSet, caps: Caps) -> Result<Report, Error> {
    let mut atoms = Vec::new();
    for a in canonical_atoms(b, caps.e_max)? {
        let base = a.base.map(|i| b.base(i).cloned()).transpose()?;
        atoms.push(AtomEntry { base, exp: a.exp, value: a.value(b)? });
    }
    let doc = AtomsDoc { complete: b.is_empty(), atoms, caps };
    let mut text = String::new();
    for a in &doc.atoms {
        match &a.base {
            Some(base) => writeln!(text, "({base})^{} = {}", a.exp, a.value).unwrap(),
            None => writeln!(text, "1").unwrap(),
        }
    }
    if !doc.complete {
        writeln!(text, "(exponents up to {}; every higher power is also an atom)", caps.e_max).unwrap();
    }
    Ok(Report::new(&doc, text))
}

fn factorization_text(z: &Factorization, b: &GeneratorSet) -> String {
    let mut parts = Vec::new();
    if z.c0() > 0 || z.is_empty() {
        parts.push(z.c0().to_string());
    }
    for (i, e, c) in z.terms() {
        let base = &b.bases()[i];
        parts.push(format!("{c}*({base})^{e}"));
    }
    parts.join(" + ")
}

pub fn member(b: &GeneratorSet, x: &Rational) -> Result<Report, Error> {
    #[derive(Serialize)]
    struct Doc {
        member: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        hub: Option<FactorizationDoc>,
    }
    let hub = solve_hub(x, b)?;
    let text = match &hub {
        Some(h) => format!("{x} is a member; hub factorization {}", factorization_text(h, b)),
        None => format!("{x} is not a member"),
    };
    let doc = Doc { member: hub.is_some(), hub: hub.map(|h| h.to_doc(b)).transpose()? };
    Ok(Report::new(&doc, text))
}

#[derive(Serialize)]
struct Enumerated {
    length: u64,
    factorization: FactorizationDoc,
}

#[derive(Serialize)]
struct FactorizeDoc {
    x: Rational,
    hub: Option<FactorizationDoc>,
    min_length: Option<FactorizationDoc>,
    factorizations: Vec<Enumerated>,
    caps: Caps,
    complete: bool,
}

pub fn factorize(b: &GeneratorSet, x: &Rational, caps: Caps) -> Result<Report, Error> {
    let (hub, min) = if b.is_canonical() {
        let hub = solve_hub(x, b)?;
        let min = if b.all_proper() { min_length_factorization(x, b)? } else { None };
        (hub, min)
    } else {
        (None, None)
    };
    let all = enumerate_factorizations(x, b, caps)?;
    let mut text = String::new();
    if let Some(h) = &hub {
        writeln!(text, "hub: {}", factorization_text(h, b)).unwrap();
    }
    if let Some(m) = &min {
        writeln!(text, "minimum length {}: {}", m.length(), factorization_text(m, b)).unwrap();
    }
    writeln!(text, "{} factorizations with exponent <= {} and length <= {}:", all.len(), caps.e_max, caps.len_max).unwrap();
    for z in &all {
        writeln!(text, "  [{}] {}", z.length(), factorization_text(z, b)).unwrap();
    }
    let doc = FactorizeDoc {
        x: x.clone(),
        hub: hub.map(|h| h.to_doc(b)).transpose()?,
        min_length: min.map(|m| m.to_doc(b)).transpose()?,
        factorizations: all
            .iter()
            .map(|z| Ok(Enumerated { length: z.length(), factorization: z.to_doc(b)? }))
            .collect::<Result<_, Error>>()?,
        caps,
        complete: x.is_zero(),
    };
    Ok(Report::new(&doc, text))
}

pub fn lengths(b: &GeneratorSet, x: &Rational, caps: Caps) -> Result<Report, Error> {
    if b.is_canonical() {
        let l: MapUnion = length_set(x, b)?;
        let preview = l.truncate(caps.cap);
        let text = format!("L({x}) = {l}\nelements up to {}: {}", caps.cap, set_text(&preview));
        return Ok(Report::new(&l, text));
    }
    #[derive(Serialize)]
    struct Doc {
        lengths: BTreeSet<u64>,
        caps: Caps,
        complete: bool,
    }
    let lengths: BTreeSet<u64> = enumerate_factorizations(x, b, caps)?.iter().map(Factorization::length).collect();
    let text = format!(
        "lengths found with exponent <= {} and length <= {}: {} (not canonical, enumeration only)",
        caps.e_max,
        caps.len_max,
        set_text(&lengths)
    );
    Ok(Report::new(&Doc { lengths, caps, complete: false }, text))
}

pub fn delta(b: &GeneratorSet, x: Option<&Rational>, sample: &[Rational]) -> Result<Report, Error> {
    if let Some(x) = x {
        #[derive(Serialize)]
        struct Doc {
            x: Rational,
            #[serde(flatten)]
            report: DeltaReport,
        }
        let report = delta_of_element(x, b)?;
        let text = format!(
            "Δ({x}) = {}\n(lengths materialized up to {}; periodic with period {} beyond {})",
            set_text(&report.deltas),
            report.truncation,
            report.period,
            report.threshold
        );
        return Ok(Report::new(&Doc { x: x.clone(), report }, text));
    }
    let r: DeltaSample = delta_sample(b, sample)?;
    let mut text = format!("lower bound from {} members: {}\n", sample.len() - r.skipped.len(), set_text(&r.lower_bound));
    if let Some(u) = &r.upper_bound {
        writeln!(text, "upper bound: {}", set_text(u)).unwrap();
    }
    if let Some(e) = &r.exact {
        writeln!(text, "Δ(M) = {}", set_text(e)).unwrap();
    }
    if !r.skipped.is_empty() {
        writeln!(text, "skipped: {}", list(&r.skipped)).unwrap();
    }
    Ok(Report::new(&r, text))
}

pub fn unions(b: &GeneratorSet, k: u64, caps: Caps) -> Result<Report, Error> {
    #[derive(Serialize)]
    struct Doc {
        #[serde(flatten)]
        report: UnionReport,
        caps: Caps,
        aap: Option<AapDecomposition>,
    }
    let report = multifrac::lengths::union_of_lengths(k, b, caps)?;
    let d = gaps(&report.values).into_iter().min().unwrap_or(1);
    let values: BTreeSet<i64> = report.values.iter().map(|&v| v as i64).collect();
    let aap = (0..=caps.cap).find_map(|n| aap_check(&values, d, n));
    let mut text = format!(
        "U_{k} ∩ [1, {}] = {}\nρ_{k} = {}\n",
        report.truncation,
        set_text(&report.values),
        report.elasticity
    );
    match &aap {
        Some(a) => writeln!(
            text,
            "AAP with difference {} and bound {}: y = {}, S' = {:?}, S* = {{0..{}}}, S'' = {:?}",
            a.d,
            a.n,
            a.y,
            a.s_prime,
            a.s_star_len * a.d,
            a.s_dprime
        )
        .unwrap(),
        None => writeln!(text, "no AAP decomposition with difference {d}").unwrap(),
    }
    Ok(Report::new(&Doc { report, caps, aap }, text))
}

pub fn construct_nonatomic(n: Option<usize>, primes: &[u64], m: Option<u32>, n_max: u32) -> Result<Report, Error> {
    #[derive(Serialize)]
    struct Doc {
        family: NonatomicFamily,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness_search: Option<Search>,
    }
    #[derive(Serialize)]
    struct Search {
        m: u32,
        n_max: u32,
        witness: Option<NonatomicWitness>,
    }
    let primes = if primes.is_empty() { vec![2, 3, 11] } else { primes.to_vec() };
    let n = n.unwrap_or(primes.len().saturating_sub(1));
    let family = nonatomic_family(n, &PrimeSeed::nonatomic(primes))?;
    let mut text = format!("B = {{{}}}\nverified: {}\n", list(family.bases.bases()), family.verified.join(", "));
    let search = m.map(|m| Search { m, n_max, witness: nonatomic_witness(&family, m, n_max) });
    if let Some(s) = &search {
        match &s.witness {
            Some(w) => writeln!(
                text,
                "{} (b0)^{} + {} (b1)^{} = (b0)^{}, so (b0)^{} is not an atom",
                w.alpha, w.big_n, w.beta, w.big_n, w.m, w.m
            )
            .unwrap(),
            None => writeln!(text, "no witness for m = {} with N <= {}", s.m, s.n_max).unwrap(),
        }
    }
    Ok(Report::new(&Doc { family, witness_search: search }, text))
}

pub fn construct_delta(d: u64, big_k: u32, k: Option<u32>) -> Result<Report, Error> {
    #[derive(Serialize)]
    struct Doc {
        family: DeltaFamily,
        #[serde(skip_serializing_if = "Option::is_none")]
        check: Option<DeltaCheck>,
    }
    let family = delta_realization_generators(d, big_k)?;
    let check = k.map(|k| delta_realization_check(d, k, big_k)).transpose()?;
    let mut text = format!("B_{big_k} = {{{}}}\nprimes {}\n", list(family.bases.bases()), list(&family.seed.primes));
    if let Some(c) = &check {
        writeln!(text, "x_{} = {}, hub length {}", 2 * c.k, c.x, c.hub_length).unwrap();
        writeln!(text, "Δ = {} ⊇ {}: {}", set_text(&c.delta.deltas), set_text(&c.required), c.contains_required).unwrap();
        writeln!(text, "all divisible by {d}: {}", c.divisible_by_d).unwrap();
        writeln!(text, "localized (next numerator {} > x): {}", c.next_numerator, c.localized).unwrap();
    }
    Ok(Report::new(&Doc { family, check }, text))
}

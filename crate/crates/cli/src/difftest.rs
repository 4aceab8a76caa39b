//! Seeded differential test of the structural algorithms against the
//! brute-force enumerator.
//!
//! Each trial draws a random factorization `z`, walks randomly along the
//! rewrite identity to `w`, and checks that
//! - `z`, `w` and the congruence solver agree on the hub,
//! - the rewrite chain from `z` to `w` replays step by step,
//! - the symbolic set of lengths matches the enumerated one: equal below a
//!   window over proper bases (where the exponent cap is derived so that the
//!   enumeration is complete), and containing it otherwise.

use std::collections::BTreeSet;

use multifrac::factorizer::{
    apply_step, enumerate_factorizations, evaluate, hub_normalize, replay_chain, rewrite_chain, solve_hub,
    FactorizationDoc,
};
use multifrac::lengths::length_set;
use multifrac::{Caps, Direction, Error, Factorization, GeneratorSet, RewriteStep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::report::Report;

/// Lengths above the hub length checked for equality in each trial.
const WINDOW: u64 = 3;
const WALK: usize = 6;

#[derive(Serialize, Default)]
struct Checks {
    hub_uniqueness: u64,
    chains: u64,
    oracle_equal: u64,
    oracle_subset: u64,
}

#[derive(Serialize)]
struct Counterexample {
    trial: u64,
    check: &'static str,
    factorization: FactorizationDoc,
    walked_to: FactorizationDoc,
    detail: String,
}

#[derive(Serialize)]
struct Doc {
    bases: GeneratorSet,
    trials: u64,
    seed: u64,
    caps: Caps,
    checks: Checks,
    pass: bool,
    counterexample: Option<Counterexample>,
}

fn random_factorization(rng: &mut ChaCha8Rng, b: &GeneratorSet, e_max: u32) -> Factorization {
    let mut z = Factorization::unit(rng.gen_range(0..=3));
    for i in 0..b.len() {
        for e in 1..=e_max.min(3) {
            if rng.gen_bool(0.5) {
                z.add(i, e, rng.gen_range(1..=3));
            }
        }
    }
    z
}

fn random_walk(rng: &mut ChaCha8Rng, z: &Factorization, b: &GeneratorSet) -> Factorization {
    let mut w = z.clone();
    for _ in 0..WALK {
        let step = RewriteStep {
            base: rng.gen_range(0..b.len()),
            exp: rng.gen_range(0..=w.max_exp() + 1),
            direction: if rng.gen_bool(0.5) { Direction::Up } else { Direction::Down },
            multiplicity: 1,
        };
        if let Ok(next) = apply_step(&w, &step, b) {
            w = next;
        }
    }
    w
}

fn lengths_of(all: &[Factorization]) -> BTreeSet<u64> {
    all.iter().map(Factorization::length).collect()
}

/// One trial; `Err` carries the failing check and a description.
fn trial(z: &Factorization, w: &Factorization, b: &GeneratorSet, caps: Caps, checks: &mut Checks) -> Result<(), (&'static str, String)> {
    let fail = |check: &'static str| move |e: Error| (check, e.to_string());
    let x = evaluate(z, b).map_err(fail("evaluate"))?;
    let (hz, _) = hub_normalize(z, b).map_err(fail("hub_uniqueness"))?;
    let (hw, _) = hub_normalize(w, b).map_err(fail("hub_uniqueness"))?;
    let solved = solve_hub(&x, b).map_err(fail("hub_uniqueness"))?;
    if hz != hw || solved.as_ref() != Some(&hz) {
        return Err(("hub_uniqueness", format!("x = {x}: {hz:?} / {hw:?} / {solved:?}")));
    }
    checks.hub_uniqueness += 1;

    let chain = rewrite_chain(z, w, b).map_err(fail("chains"))?;
    let seq = replay_chain(z, &chain, b).map_err(fail("chains"))?;
    if seq.last() != Some(w) {
        return Err(("chains", format!("chain of {} steps ends elsewhere", chain.len())));
    }
    checks.chains += 1;

    let symbolic = length_set(&x, b).map_err(fail("oracle"))?;
    if b.all_proper() {
        let len_max = hz.length() + WINDOW;
        let e_max = hz.max_exp() + WINDOW as u32;
        let found = lengths_of(&enumerate_factorizations(&x, b, Caps { e_max, len_max, cap: 0 }).map_err(fail("oracle"))?);
        let expected = symbolic.truncate(len_max);
        if found != expected {
            return Err(("oracle", format!("x = {x}: symbolic {expected:?}, enumerated {found:?}")));
        }
        checks.oracle_equal += 1;
    } else {
        let bounded = Caps { e_max: caps.e_max.min(3), len_max: caps.len_max.min(hz.length() + WINDOW), cap: 0 };
        let found = lengths_of(&enumerate_factorizations(&x, b, bounded).map_err(fail("oracle"))?);
        let sym = symbolic.truncate(bounded.len_max);
        if !found.is_subset(&sym) {
            return Err(("oracle", format!("x = {x}: enumerated {found:?} not within {sym:?}")));
        }
        checks.oracle_subset += 1;
    }
    Ok(())
}

/// Runs the trials; the flag is false when a counterexample was found.
pub fn run(b: &GeneratorSet, trials: u64, seed: u64, caps: Caps) -> Result<(Report, bool), Error> {
    if !b.is_canonical() {
        return Err(Error::NotCanonical);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Checks::default();
    let mut counterexample = None;
    if !b.is_empty() {
        for t in 0..trials {
            let z = random_factorization(&mut rng, b, caps.e_max);
            let w = random_walk(&mut rng, &z, b);
            if let Err((check, detail)) = trial(&z, &w, b, caps, &mut checks) {
                counterexample = Some(Counterexample {
                    trial: t,
                    check,
                    factorization: z.to_doc(b)?,
                    walked_to: w.to_doc(b)?,
                    detail,
                });
                break;
            }
        }
    }
    let pass = counterexample.is_none();
    let text = match &counterexample {
        None => format!(
            "pass: {trials} trials (seed {seed}); hub {}, chains {}, oracle equal {}, oracle subset {}",
            checks.hub_uniqueness, checks.chains, checks.oracle_equal, checks.oracle_subset
        ),
        Some(c) => format!(
            "FAIL at trial {} ({}): {}\n{}",
            c.trial,
            c.check,
            c.detail,
            serde_json::to_string(&c.factorization).expect("serializes")
        ),
    };
    let doc = Doc { bases: b.clone(), trials, seed, caps, checks, pass, counterexample };
    Ok((Report::new(&doc, text), pass))
}

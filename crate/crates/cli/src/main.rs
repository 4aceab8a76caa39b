use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multifrac::{Caps, Error, GeneratorSet, Rational};

mod cache;
mod difftest;
mod report;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "multifrac", version, about = "Factorization invariants of rational multicyclic monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit exactly one JSON document on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Result cache directory; overrides MULTIFRAC_CACHE.
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Target {
    /// Comma separated bases, e.g. `2/3,4/5`.
    #[arg(long, allow_hyphen_values = true)]
    bases: Option<String>,
    /// File with a comma separated list or a GeneratorSet JSON document.
    #[arg(long, value_name = "FILE", conflicts_with = "bases")]
    bases_file: Option<PathBuf>,
}

impl Target {
    fn load(&self) -> Result<GeneratorSet, Error> {
        match (&self.bases, &self.bases_file) {
            (Some(list), _) => GeneratorSet::parse(list),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                let text = text.trim();
                if text.starts_with('{') {
                    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
                } else {
                    GeneratorSet::parse(text)
                }
            }
            (None, None) => Err(Error::Parse("missing --bases".into())),
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct CapArgs {
    /// Largest exponent of an atom considered.
    #[arg(long, default_value_t = Caps::default().e_max)]
    emax: u32,
    /// Largest factorization length considered.
    #[arg(long, default_value_t = Caps::default().len_max)]
    lenmax: u64,
    /// Upper end of truncated integer sets.
    #[arg(long, default_value_t = Caps::default().cap)]
    cap: u64,
}

impl From<CapArgs> for Caps {
    fn from(c: CapArgs) -> Self {
        Caps { e_max: c.emax, len_max: c.lenmax, cap: c.cap }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kind {
    Nonatomic,
    Delta,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flags, cyclic trichotomy per base and atomicity predicates.
    Classify {
        #[command(flatten)]
        target: Target,
    },
    /// Atoms of a canonical monoid up to an exponent cap.
    Atoms {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Membership test with the hub factorization as certificate.
    Member {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
    },
    /// Hub, minimum-length and enumerated factorizations.
    Factorize {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// The set of lengths of an element.
    Lengths {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        x: Rational,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Delta set of an element, or bounds on the delta set of the monoid.
    Delta {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sample")]
        x: Option<Rational>,
        /// Comma separated members to sample.
        #[arg(long, value_delimiter = ',')]
        sample: Vec<Rational>,
    },
    /// Truncated union of sets of lengths `U_k` with its AAP shape.
    Unions {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Explicit families and their witnesses.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of generators of a non-atomic family.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seed_primes: Vec<u64>,
        /// Exponent whose power is shown not to be an atom.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 8)]
        nmax: u32,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long = "K", default_value_t = 1)]
        big_k: u32,
        /// Level to check in a delta family.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Randomized differential test against the brute-force enumerator.
    Difftest {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        caps: CapArgs,
    },
}

enum Failure {
    Domain(Error),
    Discrepancy(Report),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn dispatch(cmd: &Command) -> Result<Report, Failure> {
    let r = match cmd {
        Command::Classify { target } => report::classify(&target.load()?)?,
        Command::Atoms { target, caps } => report::atoms(&target.load()?, (*caps).into())?,
        Command::Member { target, x } => report::member(&target.load()?, x)?,
        Command::Factorize { target, x, caps } => report::factorize(&target.load()?, x, (*caps).into())?,
        Command::Lengths { target, x, caps } => report::lengths(&target.load()?, x, (*caps).into())?,
        Command::Delta { target, x, sample } => report::delta(&target.load()?, x.as_ref(), sample)?,
        Command::Unions { target, k, caps } => report::unions(&target.load()?, *k, (*caps).into())?,
        Command::Construct { kind: Kind::Nonatomic, n, seed_primes, m, nmax, .. } => {
            report::construct_nonatomic(*n, seed_primes, *m, *nmax)?
        }
        Command::Construct { kind: Kind::Delta, d, big_k, k, .. } => report::construct_delta(*d, *big_k, *k)?,
        Command::Difftest { target, trials, seed, caps } => {
            let (r, pass) = difftest::run(&target.load()?, *trials, *seed, (*caps).into())?;
            if !pass {
                return Err(Failure::Discrepancy(r));
            }
            r
        }
    };
    Ok(r)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 1,
        _ => 2,
    }
}

/// Everything one invocation writes, so that runs can be checked in-process.
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

pub fn execute(argv: &[String], env_cache: Option<PathBuf>) -> Execution {
    let done = |stdout: String, stderr: String, code: u8| Execution { stdout, stderr, code };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { done(String::new(), text, 1) } else { done(text, String::new(), 0) };
        }
    };
    let store = cache::Store::open(cli.cache.clone().or(env_cache));
    let key = cache::key(&argv[1..]);
    if let Some(out) = store.as_ref().and_then(|s| s.get(&key)) {
        return done(out, String::new(), 0);
    }
    match dispatch(&cli.command) {
        Ok(r) => {
            let out = r.render(cli.json);
            if let Some(s) = &store {
                s.put(&key, &argv[1..], &out);
            }
            done(out, String::new(), 0)
        }
        Err(Failure::Discrepancy(r)) => done(r.render(cli.json), String::new(), 2),
        Err(Failure::Domain(e)) => {
            let code = exit_code(&e);
            if cli.json {
                done(report::error_json(&e) + "\n", String::new(), code)
            } else {
                done(String::new(), format!("error: {e}\n"), code)
            }
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let env_cache = std::env::var_os(cache::ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from);
    let run = execute(&argv, env_cache);
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    ExitCode::from(run.code)
}

#[cfg(test)]
mod tests;

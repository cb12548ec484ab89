//! The `apportion` command line. [`dispatch`] parses arguments, runs one
//! library operation and renders it, entirely in-process; the binary only
//! forwards its streams and exit code.
//!
//! Exit codes: 0 success or a true verdict, 1 a checked-false verdict, 2 a
//! usage or input error, 3 a numeric or domain error.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use apportion::search::SearchOptions;
use apportion::C64;

pub use commands::Outcome;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "apportion", version, about = "Uniform similarity transforms and the constructions around them")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Tolerance override; each subcommand documents its default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = SearchOptions::default().seed)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = SearchOptions::default().restarts)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = SearchOptions::default().iters)]
    pub iters: usize,
    /// Worker threads for restarts and enumeration; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

/// Input paths accept `-` for stdin.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Max, Frobenius, spectral and nuclear norms, plus bounds on u(A) [tol 1e-9: uniformity].
    Norms { matrix: PathBuf },
    /// Whether every entry has the same magnitude [tol 1e-9].
    UniformCheck { matrix: PathBuf },
    /// Closed-form unitary apportionment of a rank-one matrix [tol 1e-9 relative to 1 + κ].
    #[command(name = "apportion-rank1")]
    ApportionRank1 { matrix: PathBuf },
    /// Search for a shift certifying that no unitary apportions the matrix [tol 1e-9: margin].
    Certify { matrix: PathBuf },
    /// Rank test for positive semidefinite matrices [tol 1e-10: relative eigenvalue cutoff].
    PsdCheck { matrix: PathBuf },
    /// Whether a vertex labeling is a ρ-labeling of a loop-graph (exact; tol unused).
    RhoCheck { graph: PathBuf, labels: PathBuf },
    /// Whether the identity labeling of a loop-graph is graceful (exact; tol unused).
    GracefulCheck { graph: PathBuf },
    /// Non-increasing function to graceful loop-graph, or back with --inverse (exact).
    Nif {
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Composition iteration of a contracting function down to zero, or one step with --step (exact).
    Compose {
        function: PathBuf,
        #[arg(long)]
        step: bool,
    },
    /// Cyclic blowup matrix of a loop-graph (tol unused).
    Blowup { graph: PathBuf },
    /// Apportion a blowup from a labeling, or search the restricted group without one [tol 1e-9].
    BlowupApportion { graph: PathBuf, labels: Option<PathBuf> },
    /// The blowup matrix of a function (tol unused).
    Tf { function: PathBuf },
    /// Minimize the max-norm over the permutation group acting on a blowup [tol 1e-9: bound attained].
    FrakMin {
        input: PathBuf,
        /// Read a function and use its blowup matrix.
        #[arg(long)]
        function: bool,
        /// Sample this many seeded permutations instead of enumerating all.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Masked family of a Hermitian matrix, sum identity and interlacing bounds [tol 1e-12 relative].
    Interlace { matrix: PathBuf, graph: PathBuf },
    /// Recover the loop-graph and function from the edge-labeling factors (exact).
    Recover {
        /// A function file, or a factor list with --factors.
        input: PathBuf,
        #[arg(long)]
        factors: bool,
        /// Vertex to use as the fixed point when orienting the recovered tree.
        #[arg(long, default_value_t = 0)]
        fixed_point: usize,
    },
    /// Numerical unitary apportionment [tol 1e-6].
    SearchU { matrix: PathBuf },
    /// Numerical similarity apportionment with det M = 1 [tol 1e-6].
    SearchGl { matrix: PathBuf },
    /// Spectra of uniform matrices.
    Spectra {
        #[command(subcommand)]
        which: Spectra,
    },
    /// Estimate the smallest ratio of largest to smallest entry magnitude under unitary similarity.
    Uar { matrix: PathBuf },
}

/// Complex arguments are written `re` or `re,im`.
#[derive(Subcommand, Debug)]
pub enum Spectra {
    /// Eigenvalue multiplicities of the DFT matrix, numeric against closed form [tol 1e-8: snapping].
    Dft { n: usize },
    /// Whether {1, r} is the spectrum of a uniform 2×2 matrix.
    Pair {
        #[arg(allow_hyphen_values = true)]
        r: f64,
    },
    /// Whether {λ, λ} is the spectrum of a uniform 2×2 matrix.
    Constant {
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: C64,
    },
    /// M diag(1, c) M⁻¹ for M = [[x, y], [z, (1 + yz)/x]].
    Similarity {
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        c: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        x: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        y: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
    },
    /// The one-parameter family apportioning diag(2, 0) [tol 1e-10].
    Example {
        #[arg(allow_hyphen_values = true)]
        a: f64,
        theta: f64,
    },
    /// Uniform matrix with the spectrum of B plus zeros.
    Pad { matrix: PathBuf, r: usize },
    /// Kronecker product of two uniform matrices.
    Kron { left: PathBuf, right: PathBuf },
    /// Whether M apportions A, via the DFT of the entrywise squared magnitudes.
    Additive { matrix: PathBuf, transform: PathBuf },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    match s.split_once(',') {
        Some((re, im)) => Ok(C64::new(parse(re)?, parse(im)?)),
        None => Ok(C64::new(parse(s)?, 0.0)),
    }
}

/// Everything a finished invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Meta {
    seed: u64,
    tol: Option<f64>,
    version: &'static str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    verdict: Option<bool>,
    result: &'a serde_json::value::RawValue,
    meta: Meta,
}

fn exit_code(err: &apportion::Error) -> u8 {
    match err {
        apportion::Error::Parse(_) | apportion::Error::Io(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn failure(code: u8, msg: String) -> Dispatch {
    Dispatch { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn dispatch<I, T>(argv: I) -> Dispatch
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Dispatch { code, stdout: text, stderr: String::new() }
            } else {
                Dispatch { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let g = &cli.global;
    if let Some(t) = g.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return failure(EXIT_USAGE, format!("--tol must be a finite nonnegative number, got {t}"));
        }
    }
    let run = || commands::run(&cli.command, g);
    let result = if g.jobs > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build() {
            Ok(pool) => pool.install(run),
            Err(e) => return failure(EXIT_NUMERIC, e.to_string()),
        }
    } else {
        run()
    };
    let (name, tol, outcome) = match result {
        Ok(r) => r,
        Err(e) => return failure(exit_code(&e), e.to_string()),
    };
    let text = match g.format {
        Format::Human => outcome.human.clone(),
        Format::Structured => {
            let env = Envelope {
                command: name,
                verdict: outcome.verdict,
                result: &outcome.data,
                meta: Meta { seed: g.seed, tol, version: env!("CARGO_PKG_VERSION") },
            };
            match serde_json::to_string(&env) {
                Ok(s) => s + "\n",
                Err(e) => return failure(EXIT_NUMERIC, e.to_string()),
            }
        }
    };
    let code = if outcome.verdict == Some(false) { EXIT_FALSE } else { EXIT_OK };
    match &g.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Dispatch { code, stdout: String::new(), stderr: String::new() },
            Err(e) => failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display())),
        },
        None => Dispatch { code, stdout: text, stderr: String::new() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.75").unwrap(), C64::new(0.75, 0.0));
        assert_eq!(parse_complex("-1, 2.5").unwrap(), C64::new(-1.0, 2.5));
        assert!(parse_complex("1+2i").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(dispatch(["apportion"]).code, EXIT_USAGE);
        assert_eq!(dispatch(["apportion", "norms", "x", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(dispatch(["apportion", "nope"]).code, EXIT_USAGE);
        assert_eq!(dispatch(["apportion", "--tol", "-1", "spectra", "dft", "4"]).code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let d = dispatch(["apportion", "--help"]);
        assert_eq!(d.code, EXIT_OK);
        assert!(d.stdout.contains("search-gl"));
    }
}

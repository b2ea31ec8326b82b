//! Command-line front end for `tchol`.
//!
//! Exit codes: 0 success, 1 failed check or numeric failure, 2 pivot failure
//! during `decompose`, 64 usage error, 74 unreadable or unwritable file.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tchol::decomposition::{decompose, RootPolicy};
use tchol::format::{read_tensor, write_tensor};
use tchol::generators::{
    cauchy3, hilbert3, is_psd, lehmer3, random_cp, random_hermitian3, random_lower_sub_hermitian, Definiteness,
};
use tchol::multilinear::{cp_tensor, cubic_power};
use tchol::spectra::{triangular_eigenpairs, BRANCH_CAP};
use tchol::{CubicTensor, Error, HermitianTensor3, TensorClass, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PIVOT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "tchol", version, about = "Triangular decomposition of third-order Hermitian tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generator tensor
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        /// Cauchy parameters, comma separated
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of CP vectors (default n + 2)
        #[arg(long)]
        r: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Test structural and definiteness properties
    Check {
        file: PathBuf,
        #[arg(long)]
        hermitian: bool,
        #[arg(long)]
        psd: bool,
        #[arg(long = "lower-tri")]
        lower_tri: bool,
        #[arg(long = "sub-herm")]
        sub_herm: bool,
        #[arg(long, env = "TCHOL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Factor S = g(L)
    Decompose {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, env = "TCHOL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = "classical")]
        policy: RootPolicy,
    },
    /// Write the cubic power g(L)
    Power {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Print maxabs(S − g(L))
    Residual { s: PathBuf, l: PathBuf },
    /// Print verified eigenpairs of a lower triangular tensor as JSON lines
    Eig {
        file: PathBuf,
        /// Diagonal index, 1-based (default: all)
        #[arg(long)]
        index: Option<usize>,
        #[arg(long = "branch-cap", default_value_t = BRANCH_CAP)]
        branch_cap: usize,
        #[arg(long, env = "TCHOL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Print the number of independent entries of a tensor class
    Count {
        #[arg(long)]
        class: TensorClass,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Hilbert,
    Lehmer,
    Cauchy,
    Cp,
    RandomHerm,
    RandomTri,
}

/// Outcome of a command that did not succeed.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn load(path: &Path) -> std::result::Result<CubicTensor, Failure> {
    read_tensor(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn store(path: &Path, t: &CubicTensor) -> std::result::Result<(), Failure> {
    write_tensor(path, t).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn numeric(e: Error) -> Failure {
    Failure::new(EXIT_FAIL, e.to_string())
}

/// Runs the CLI on `argv` (including the program name), writing to the
/// process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let outcome = match cli.command {
        Command::Gen { kind, n, c, seed, r, output } => gen(kind, n, c, seed, r, &output, out),
        Command::Check { file, hermitian, psd, lower_tri, sub_herm, tol } => {
            check(&file, Checks { hermitian, psd, lower_tri, sub_herm }, tol, out)
        }
        Command::Decompose { file, output, report, tol, policy } => {
            run_decompose(&file, &output, report.as_deref(), tol, policy, out)
        }
        Command::Power { file, output } => power(&file, &output, out),
        Command::Residual { s, l } => residual(&s, &l, out),
        Command::Eig { file, index, branch_cap, tol } => eig(&file, index, branch_cap, tol, out, err),
        Command::Count { class, m, n } => count(class, m, n, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "tchol: {}", f.message);
            f.code
        }
    }
}

fn gen(kind: Kind, n: usize, c: Option<Vec<f64>>, seed: u64, r: Option<usize>, output: &Path, out: &mut dyn Write) -> Outcome {
    if n == 0 {
        return Err(Failure::new(EXIT_USAGE, "--n must be at least 1"));
    }
    let t = match kind {
        Kind::Hilbert => hilbert3(n).map_err(numeric)?.into_tensor(),
        Kind::Lehmer => lehmer3(n).map_err(numeric)?.into_tensor(),
        Kind::Cauchy => {
            let c = c.ok_or_else(|| Failure::new(EXIT_USAGE, "--kind cauchy needs --c"))?;
            if c.len() != n {
                return Err(Failure::new(EXIT_USAGE, format!("--c has {} values, expected {n}", c.len())));
            }
            cauchy3(&c).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?.into_tensor()
        }
        Kind::Cp => {
            let r = r.unwrap_or(n + 2);
            if r == 0 {
                return Err(Failure::new(EXIT_USAGE, "--r must be at least 1"));
            }
            cp_tensor(&random_cp(n, r, seed).map_err(numeric)?).into_tensor()
        }
        Kind::RandomHerm => random_hermitian3(n, seed).map_err(numeric)?.into_tensor(),
        Kind::RandomTri => random_lower_sub_hermitian(n, seed).map_err(numeric)?.into_tensor(),
    };
    store(output, &t)?;
    let _ = writeln!(out, "wrote {} (order 3, dim {n})", output.display());
    Ok(EXIT_OK)
}

struct Checks {
    hermitian: bool,
    psd: bool,
    lower_tri: bool,
    sub_herm: bool,
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn check(file: &Path, checks: Checks, tol: f64, out: &mut dyn Write) -> Outcome {
    if !(checks.hermitian || checks.psd || checks.lower_tri || checks.sub_herm) {
        return Err(Failure::new(EXIT_USAGE, "check needs at least one of --hermitian, --psd, --lower-tri, --sub-herm"));
    }
    let t = load(file)?;
    let bound = tol * t.maxabs();
    let mut all = true;
    if checks.hermitian {
        let dev = t.hermitian_deviation();
        let ok = t.is_hermitian3(bound);
        all &= ok;
        let _ = writeln!(out, "hermitian: {} (deviation {dev:e})", yes(ok));
    }
    if checks.sub_herm {
        let dev = t.sub_hermitian_deviation();
        let ok = t.is_sub_hermitian3(bound);
        all &= ok;
        let _ = writeln!(out, "sub-hermitian: {} (deviation {dev:e})", yes(ok));
    }
    if checks.lower_tri {
        let ok = t.is_lower_triangular();
        all &= ok;
        let _ = writeln!(out, "lower-triangular: {}", yes(ok));
    }
    if checks.psd {
        match HermitianTensor3::new(t, bound) {
            Ok(h) => {
                let v = is_psd(&h, tol).map_err(numeric)?;
                let ok = v.verdict != Definiteness::Indefinite;
                all &= ok;
                let _ = writeln!(
                    out,
                    "psd: {} ({}, min slice eigenvalue {:e} at mode {} index {})",
                    yes(ok),
                    v.verdict,
                    v.min_slice_eigenvalue,
                    v.witness_slice.0,
                    v.witness_slice.1
                );
            }
            Err(_) => {
                all = false;
                let _ = writeln!(out, "psd: no (not Hermitian)");
            }
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

fn run_decompose(
    file: &Path,
    output: &Path,
    report: Option<&Path>,
    tol: f64,
    policy: RootPolicy,
    out: &mut dyn Write,
) -> Outcome {
    let t = load(file)?;
    let bound = tol * t.maxabs();
    let s = HermitianTensor3::new(t, bound).map_err(numeric)?;
    let (l, rep) = decompose(&s, tol, policy).map_err(|e| match e {
        Error::PivotFailure { .. } => Failure::new(EXIT_PIVOT, e.to_string()),
        other => numeric(other),
    })?;
    store(output, l.as_tensor())?;
    if let Some(path) = report {
        std::fs::write(path, rep.to_json()).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    }
    let _ = writeln!(out, "residual {:e}", rep.residual_maxabs);
    Ok(EXIT_OK)
}

fn power(file: &Path, output: &Path, out: &mut dyn Write) -> Outcome {
    let l = load(file)?;
    let g = cubic_power(&l).map_err(numeric)?;
    store(output, g.as_tensor())?;
    let _ = writeln!(out, "wrote {}", output.display());
    Ok(EXIT_OK)
}

fn residual(s: &Path, l: &Path, out: &mut dyn Write) -> Outcome {
    let s = load(s)?;
    let l = load(l)?;
    let g = cubic_power(&l).map_err(numeric)?;
    let r = g.max_abs_diff(&s).map_err(numeric)?;
    let _ = writeln!(out, "{r:e}");
    Ok(EXIT_OK)
}

fn c2(z: tchol::C64) -> [f64; 2] {
    [z.re, z.im]
}

fn eig(file: &Path, index: Option<usize>, cap: usize, tol: f64, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let t = load(file)?;
    if !t.is_lower_triangular() {
        return Err(numeric(Error::NotLowerTriangular));
    }
    let n = t.dim();
    let indices: Vec<usize> = match index {
        Some(i) if i == 0 || i > n => return Err(Failure::new(EXIT_USAGE, format!("--index must be in 1..={n}"))),
        Some(i) => vec![i - 1],
        None => (0..n).collect(),
    };
    let mut code = EXIT_OK;
    for i in indices {
        match triangular_eigenpairs(&t, i, tol, cap) {
            Ok(pairs) => {
                if pairs.is_empty() {
                    code = EXIT_FAIL;
                    let _ = writeln!(err, "tchol: index {}: no verified eigenpair", i + 1);
                }
                for p in pairs {
                    let line = json!({
                        "index": i + 1,
                        "lambda": c2(p.lambda),
                        "x": p.x.iter().map(|&z| c2(z)).collect::<Vec<_>>(),
                        "residual": p.residual,
                        "free": p.free,
                    });
                    let _ = writeln!(out, "{line}");
                }
            }
            Err(e) => {
                code = EXIT_FAIL;
                let _ = writeln!(err, "tchol: index {}: {e}", i + 1);
            }
        }
    }
    Ok(code)
}

fn count(class: TensorClass, m: usize, n: usize, out: &mut dyn Write) -> Outcome {
    match tchol::counting::count_independent(class, m, n) {
        Ok(v) => {
            let _ = writeln!(out, "{v}");
            Ok(EXIT_OK)
        }
        Err(e @ Error::InvalidShape { .. }) => Err(Failure::new(EXIT_USAGE, e.to_string())),
        Err(e) => Err(numeric(e)),
    }
}

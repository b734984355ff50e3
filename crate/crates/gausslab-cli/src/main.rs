//! `gausslab`: command-line front end for the experiments in the `gausslab`
//! library. Output is CSV (header row first) or JSON lines.
//!
//! Exit codes: 0 success, 1 domain error (including a failed self-check),
//! 2 resource or I/O error, 3 parse error, 64 unknown subcommand.

mod commands;
mod output;

use clap::{error::ErrorKind as ClapKind, Args, Parser, Subcommand};
use gausslab::error::{Error, ErrorKind};
use gausslab::exponents::{parse_rational, Rational};
use gausslab::GaussianInt;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

pub const DEFAULT_SEED: u64 = 20240611;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Seed for every randomized experiment; each experiment draws from its own
    /// named ChaCha8 stream derived from it.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Series cutoff norm for zagier and szmidt [default: 100000, or the
    /// smallest admissible one when --smoothing is set].
    #[arg(long, global = true)]
    pub cutoff: Option<u64>,
    /// Smoothing scale X: weights exp(−N(n)/X) and a Richardson step 2S(2X) − S(X).
    #[arg(long, global = true)]
    pub smoothing: Option<f64>,
    /// Tail tolerance of the series.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    /// Pin κ in the main term κ·x²/2 of Ψ [default: the library's calibrated value, 1].
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Pin ν in the bilinear main term ν·π·A·C/ζ_{Q(i)}(2) [default: the calibrated value, π].
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; 1 runs every sweep sequentially [default: all cores].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "gausslab", version, about = "Experiments on Gaussian integers, Kloosterman sums and prime geodesics of PSL2(Z[i])")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

pub fn gaussian(s: &str) -> Result<GaussianInt, String> {
    s.parse::<GaussianInt>().map_err(|e| e.to_string())
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor z = unit·Π pᵉ over Z[i], primes in canonical first-quadrant form.
    Factor {
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        z: GaussianInt,
    },
    /// Quadratic residue symbol (d/n) for odd n, via Euler's criterion at each prime of n.
    Symbol {
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        d: GaussianInt,
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        n: GaussianInt,
    },
    /// Kloosterman sum S(m,n;c) = Σ_{a mod c, (a,c)=1} ě_c(ma + n·a⁻¹), ě_c(z) = e(Re(z/c)),
    /// with its ratio to the Weil–Gundlach bound |(m,n,c)|·τ(c)·N(c)^(1/2).
    Kloosterman {
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        m: GaussianInt,
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        n: GaussianInt,
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        c: GaussianInt,
    },
    /// Exact identities among S(n,n;c), ρ(c,a), ρ_c(δ) and λ_c(δ) over all moduli
    /// up to a norm bound; exits 1 if any fails.
    Identities {
        #[arg(long, default_value_t = 200)]
        max_norm: u64,
    },
    /// Zagier series L(s,δ) = Σ_{c ≠ 0} λ_c(δ)/N(c)^s over elements, Re s > 1, for δ a
    /// nonsquare that is a square modulo 4.
    Zagier {
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        delta: GaussianInt,
        /// Real part of s.
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        /// Imaginary part of s.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// Relative deviation in the factorization L(s,δ)/4 = T_ℓ(s)·L(s,χ_D) for δ ∼ D·ℓ².
    Szmidt {
        #[arg(value_parser = gaussian, allow_hyphen_values = true)]
        delta: GaussianInt,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// Ψ_Γ(x) = (1/π)·Σ_{N(n) ≤ x} N(n)·L(1, n²−4) against κ·x²/2.
    Psi {
        #[arg(long)]
        x: f64,
    },
    /// Ψ_Γ(x+y) − Ψ_Γ(x) against κ·(xy + y²/2), for x^(1/3) ≤ y ≤ x.
    ShortInterval {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// 𝓕(A,B,C) = Σ_{B < N(a) ≤ A+B} Σ_{N(c) ≤ C} ρ(c,a) against ν·π·A·C/ζ_{Q(i)}(2).
    Bilinear {
        #[arg(long)]
        a: f64,
        /// [default: A²]
        #[arg(long)]
        b: Option<f64>,
        /// [default: A^(1/2)]
        #[arg(long)]
        c: Option<f64>,
    },
    /// Σ_{N(n) ≤ Z} ρ_c(n²−4) against π·Z·φ(c)/N(c).
    BesselSum {
        #[arg(long, value_parser = gaussian, allow_hyphen_values = true)]
        c: GaussianInt,
        #[arg(long)]
        z: f64,
    },
    /// Σ_m |Σ_n a_n·(n/m)|² / ((M+N)·Σ|a_n|²) over odd squarefree m, n, for seeded ±1 vectors a.
    LargeSieve {
        #[arg(long, default_value_t = 2000)]
        m: u64,
        #[arg(long, default_value_t = 2000)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Σ_{t_j ≤ T} X^(i·t_j) for spectral parameters from a file (one per line, '#' comments)
    /// or an arithmetic progression t0 + j·h, which is also compared to its closed form.
    SpectralSum {
        #[arg(long, conflicts_with = "progression")]
        file: Option<PathBuf>,
        /// t0,h,count
        #[arg(long, value_delimiter = ',')]
        progression: Option<Vec<f64>>,
        #[arg(long = "T")]
        big_t: f64,
        #[arg(long = "X")]
        big_x: f64,
    },
    /// sup over t of |sinh((π+2iβ)t)/sinh(πt) − X^(it)·e^(−t/T)|·e^(πt), with 2β = log X + i/T.
    HeckesCheck {
        #[arg(long, default_value_t = 1.0)]
        t_min: f64,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2901)]
        points: usize,
        /// Values of T.
        #[arg(long = "T", value_delimiter = ',', default_values_t = [2.0, 10.0, 100.0])]
        big_t: Vec<f64>,
        /// Values of X.
        #[arg(long = "X", value_delimiter = ',', default_values_t = [2.0, 10.0, 100.0])]
        big_x: Vec<f64>,
    },
    /// Exact exponents at θ: δ₀, δ₁, δ₂, the exponent pair, σ, Q, the endgame terms and the
    /// fixed point for δ (reported as absent when none exists in [5/4, 3/2]).
    Exponents {
        #[arg(long, value_parser = rational, default_value = "0")]
        theta: Rational,
        #[arg(long, value_parser = rational, default_value = "0")]
        theta_prime: Rational,
        /// If set, also the second-moment mean-to-max exponent at this η ≤ min(1/4, 2θ).
        #[arg(long, value_parser = rational)]
        eta: Option<Rational>,
    },
    /// The nine known exponents for the prime geodesic theorem on PSL2(Z[i]), exact and as printed.
    Table,
    /// Exponent curves: δ₀, δ₁, δ₂ over θ ∈ [0, 1/4), or the prior and new zero-density
    /// exponents over σ ∈ [1/2, 1].
    Curves {
        #[arg(long, value_enum, default_value_t = CurveKind::Theta)]
        kind: CurveKind,
        #[arg(long, default_value_t = 24)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveKind {
    Theta,
    Sigma,
}

/// Why a run failed, already mapped to its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Domain => 1,
            ErrorKind::Resource => 2,
            ErrorKind::Parse => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: format!("i/o error: {e}") }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => 0,
                ClapKind::InvalidSubcommand | ClapKind::DisplayHelpOnMissingArgumentOrSubcommand => 64,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gausslab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

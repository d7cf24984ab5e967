use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "spart-lab", version, about = "Exact S-part experiments for polynomials and forms")]
pub struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Split an integer into its S-part and cofactor.
    Spart(SpartArgs),
    /// Root counts modulo p^k and their stabilization.
    Hensel(HenselArgs),
    /// Exact lattice point counts in V_F(B, M).
    Lattice(LatticeArgs),
    /// Counts of points with large S-part against the model law.
    Density(DensityArgs),
    /// Explicit towers of points with large S-part.
    Extremal(ExtremalArgs),
    /// Decomposable form invariants.
    Decomp(DecompArgs),
    /// Explicit exponents and prime factor inequalities.
    Effective(EffectiveArgs),
}

/// A polynomial or binary form given inline or as a JSON file.
#[derive(Debug, Args, Serialize)]
pub struct FormArgs {
    /// Integer coefficients, comma separated, in the stored order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "form")]
    pub coeffs: Option<Vec<String>>,
    /// JSON form file `{"type": "polynomial"|"binary", "coeffs": [...]}`.
    #[arg(long)]
    pub form: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpartArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct HenselArgs {
    #[command(flatten)]
    pub form: FormArgs,
    /// Read inline coefficients as a binary form.
    #[arg(long)]
    pub binary: bool,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct LatticeArgs {
    /// Binary form coefficients.
    #[command(flatten)]
    pub form: FormArgs,
    /// Primitive anchor `x0,y0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [1, 0])]
    pub anchor: Vec<i64>,
    #[arg(long, default_value_t = 1)]
    pub h: i64,
    /// Box bounds.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<f64>,
    /// Value bounds.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<f64>,
    /// Count primitive points only.
    #[arg(long)]
    pub prim: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Maximum candidate points per count.
    #[arg(long, default_value_t = 1 << 34)]
    pub budget: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Poly,
    Binary,
    Decomp,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(value_enum)]
    pub kind: DensityKind,
    #[command(flatten)]
    pub form: FormArgs,
    /// Decomposable form JSON (for `decomp`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
    /// Rational exponent `u/w`.
    #[arg(long)]
    pub eps: String,
    #[arg(long)]
    pub bmax: u64,
    /// `geometric:k` (k points per doubling from --b0) or a comma list; default is `bmax` alone.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub b0: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtremalArgs {
    #[command(subcommand)]
    pub verb: ExtremalVerb,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    HasRoot,
    SplitsCompletely,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremalVerb {
    /// Search primes with a root or complete splitting modulo p.
    Primes {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        binary: bool,
        #[arg(long, value_enum, default_value = "has-root")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1000)]
        search_bound: u64,
    },
    /// Hensel tower for a polynomial.
    Hensel {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
    /// Reduction tower for a binary form.
    Minkowski {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        kmax: u32,
    },
    /// Two-prime tower for a binary form with two rational roots.
    Split {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 8)]
        count: u32,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct DecompArgs {
    #[command(subcommand)]
    pub verb: DecompVerb,
}

#[derive(Debug, Args, Serialize)]
pub struct DecompInput {
    /// Decomposable form JSON.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SubspaceChoice {
    /// Index into the input's `subspaces`; the whole space when absent.
    #[arg(long)]
    pub subspace: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompVerb {
    /// Validate the form and report its basic data.
    Check(DecompInput),
    /// Factor graph and its components.
    Graph(DecompInput),
    /// Effective conditions, nonvanishing and the finiteness criterion.
    Conditions(DecompInput),
    /// q-values of every subset on a subspace.
    Qvalues {
        #[command(flatten)]
        input: DecompInput,
        #[command(flatten)]
        subspace: SubspaceChoice,
    },
    /// Lower bound for c(F) over a subspace pool.
    Cf(DecompInput),
    /// Dependence graph and a rank chain.
    Chain {
        #[command(flatten)]
        input: DecompInput,
        #[command(flatten)]
        subspace: SubspaceChoice,
        #[arg(long, default_value_t = 0)]
        seed: usize,
    },
    /// Discriminant form from embeddings of a basis.
    Discform(DecompInput),
}

#[derive(Debug, Args, Serialize)]
pub struct EffectiveArgs {
    #[command(subcommand)]
    pub verb: EffectiveVerb,
}

#[derive(Debug, Args, Serialize)]
pub struct FactorArgs {
    #[arg(long, default_value_t = 1 << 16)]
    pub trial_bound: u64,
    #[arg(long, default_value_t = 1 << 22)]
    pub rho_iterations: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectiveVerb {
    /// Explicit exponent in product and simplified form.
    Kappa {
        #[arg(long)]
        c: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        d: u32,
    },
    /// Smallest constant in `[v]_S <= K |v|^(1 - kappa)` over a sample.
    Fit {
        /// Pairs `|v|:[v]_S`, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        /// JSON output of `extremal` whose tower supplies the sample.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        kappa: f64,
    },
    /// Greatest prime factor inequalities for one integer.
    Cor2 {
        #[arg(long, allow_hyphen_values = true)]
        f0: String,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        c5: f64,
        #[command(flatten)]
        factor: FactorArgs,
    },
    /// Radical of f(x) over a range of x.
    Radical {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[command(flatten)]
        factor: FactorArgs,
    },
}

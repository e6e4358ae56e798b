use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "dropkit", version, about = "Liquid drop model with Riesz repulsion")]
pub struct Cli {
    /// Output format; JSON for single results and CSV for scans by default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Radial,
    Mc,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Critical mass and unit-ball constants.
    Mstar(MstarArgs),
    /// Scan g(α,·) ≥ 0 and the shape of h over a grid of α.
    LemmaG(LemmaGArgs),
    /// Binding-deficit lower bound over a mass grid.
    BindingScan(BindingScanArgs),
    /// Pattern search for a planar minimizer.
    Optimize(OptimizeArgs),
    /// Best equal split into k balls over a mass grid.
    Split(SplitArgs),
    /// Distance-moment test a minimizer must pass.
    Necessary(NecessaryArgs),
    /// Largest mass a minimizer can have, for λ ≤ 1.
    NonexistenceBound(NonexistenceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mstar(_) => "mstar",
            Command::LemmaG(_) => "lemma-g",
            Command::BindingScan(_) => "binding-scan",
            Command::Optimize(_) => "optimize",
            Command::Split(_) => "split",
            Command::Necessary(_) => "necessary",
            Command::NonexistenceBound(_) => "nonexistence-bound",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Mstar(a) => Some(a.seed),
            Command::Optimize(a) => Some(a.seed),
            Command::NonexistenceBound(a) => Some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Problem {
    /// Ambient dimension N ≥ 2.
    #[arg(long)]
    pub dim: usize,
    /// Riesz exponent λ in (0,N).
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MstarArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// How D(B_1) is computed.
    #[arg(long, value_enum, default_value = "radial")]
    pub method: Method,
    /// Quadrature nodes (radial, default 400) or sampled pairs (mc, default 1e6).
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct LemmaGArgs {
    /// Number of α values on the open grid 2i/(A+1); odd A includes α = 1.
    #[arg(long, default_value_t = 199)]
    pub alpha_grid: usize,
    /// Number of s values on the open grid i/(G+1).
    #[arg(long, default_value_t = 100_000)]
    pub s_grid: usize,
    /// Also write g and h for α = 0.5 and 1.5 to this CSV file.
    #[arg(long)]
    pub dump_curve: Option<PathBuf>,
    /// Points per curve in the dump.
    #[arg(long, default_value_t = 999)]
    pub curve_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BindingScanArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Masses as `lo:hi:step` (inclusive) or a single value.
    #[arg(long)]
    pub mass_grid: String,
    /// Number of split fractions s on the open grid.
    #[arg(long, default_value_t = 1000)]
    pub s_grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    /// Only N = 2 is supported.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mass: f64,
    /// Fourier modes optimized.
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    /// Cell size relative to the base radius.
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `disk` or a Fourier shape JSON file.
    #[arg(long, default_value = "disk")]
    pub start: String,
    /// Budget of energy evaluations.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step_init: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub step_min: f64,
    /// Perimeter quadrature nodes.
    #[arg(long, default_value_t = 1024)]
    pub nodes: usize,
    /// Write the final boundary as `theta,r` CSV to this file.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long, default_value_t = 720)]
    pub boundary_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Masses as `lo:hi:step` (inclusive) or a single value.
    #[arg(long)]
    pub mass_grid: String,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct NecessaryArgs {
    /// Grid run-length file, or a Fourier shape JSON list (N = 2).
    #[arg(long)]
    pub shape_file: PathBuf,
    #[command(flatten)]
    pub problem: Problem,
    /// Cell size relative to the base radius when rasterizing a Fourier shape.
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct NonexistenceArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// How the unit-ball distance moment is computed (λ < 1 only).
    #[arg(long, value_enum, default_value = "radial")]
    pub moment: Method,
    /// Quadrature nodes (radial, default 400) or sampled pairs (mc, default 1e6).
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

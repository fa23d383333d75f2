//! Command-line grammar and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pompeiu_core::Result;

use crate::parse::{parse_index_range, parse_real_list, parse_wavenumber, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One experiment and its grid parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Indicator transform over `dirs` equispaced real directions.
    Ft { dirs: usize },
    /// Motion integral over `motions` deterministic rigid motions.
    Pompeiu { motions: usize, beta_angle: f64 },
    /// Boundary moments `I_j`.
    Moments { js: Vec<usize> },
    /// Moments `I_0..=I_{j_max}` recovered from the weighted integral.
    /// Missing grid bounds default from the weight threshold `A_0`.
    Extract {
        j_max: usize,
        a_min: Option<f64>,
        a_max: Option<f64>,
        a_count: Option<usize>,
    },
    /// Direct `I_{2m}` against the Laplace predictions.
    Asympt { ms: Vec<usize> },
    /// Trefftz fit of the overdetermined problem at one wavenumber.
    Bvp { order: usize, colloc: Option<usize> },
    /// Trefftz Neumann defect over a list of wavenumbers.
    Scan {
        ks: Vec<f64>,
        order: usize,
        colloc: Option<usize>,
    },
    /// Direction-defect minimisation over shapes of order `order`, or over
    /// `k` alone.
    Search {
        order: usize,
        budget: usize,
        k_only: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ft { .. } => "ft",
            Command::Pompeiu { .. } => "pompeiu",
            Command::Moments { .. } => "moments",
            Command::Extract { .. } => "extract",
            Command::Asympt { .. } => "asympt",
            Command::Bvp { .. } => "bvp",
            Command::Scan { .. } => "scan",
            Command::Search { .. } => "search",
        }
    }
}

/// Everything a run needs. The report goes to stdout when `output` is
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub shape_path: PathBuf,
    pub k: Wavenumber,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "pompeiu", version, about = "Pompeiu problem experiments on star-shaped domains")]
pub struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Common {
    /// Shape file: {"mean_radius": r, "cos": [...], "sin": [...]}
    #[arg(long)]
    shape: PathBuf,
    /// Wavenumber, or "auto" for the first J1 zero over the mean radius
    #[arg(long, default_value = "auto", value_parser = parse_wavenumber, allow_negative_numbers = true)]
    k: Wavenumber,
    /// Relative quadrature tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Report file; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Indicator transform over real directions
    Ft {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        dirs: usize,
    },
    /// Integral of exp(i k beta.x) over moved copies of the domain
    Pompeiu {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        motions: usize,
        /// Angle of the unit vector beta
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta_angle: f64,
    },
    /// Boundary moments I_j
    Moments {
        #[command(flatten)]
        common: Common,
        /// Indices, e.g. "0..20" or "0,5,10"
        #[arg(long, default_value = "0..20")]
        j: String,
    },
    /// Moments recovered from the weighted integral W(A)
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        j_max: usize,
        #[arg(long)]
        a_min: Option<f64>,
        #[arg(long)]
        a_max: Option<f64>,
        #[arg(long)]
        a_count: Option<usize>,
    },
    /// Direct I_2m against the Laplace predictions
    Asympt {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "25,50,100,200")]
        m: String,
    },
    /// Trefftz fit at one wavenumber
    Bvp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 32)]
        order: usize,
        #[arg(long)]
        colloc: Option<usize>,
    },
    /// Trefftz Neumann defect over wavenumbers
    Scan {
        #[command(flatten)]
        common: Common,
        /// Wavenumbers, e.g. "3.5,3.6,3.7"
        #[arg(long)]
        ks: String,
        #[arg(long, default_value_t = 32)]
        order: usize,
        #[arg(long)]
        colloc: Option<usize>,
    },
    /// Minimise the direction defect
    Search {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        /// Keep the shape fixed and search k alone
        #[arg(long)]
        k_only: bool,
    },
}

impl Cli {
    /// Resolves list arguments; malformed lists are validation errors.
    pub fn into_config(self) -> Result<RunConfig> {
        let (common, command) = match self.command {
            Sub::Ft { common, dirs } => (common, Command::Ft { dirs }),
            Sub::Pompeiu {
                common,
                motions,
                beta_angle,
            } => (common, Command::Pompeiu { motions, beta_angle }),
            Sub::Moments { common, j } => (common, Command::Moments { js: parse_index_range(&j)? }),
            Sub::Extract {
                common,
                j_max,
                a_min,
                a_max,
                a_count,
            } => (
                common,
                Command::Extract {
                    j_max,
                    a_min,
                    a_max,
                    a_count,
                },
            ),
            Sub::Asympt { common, m } => (common, Command::Asympt { ms: parse_index_range(&m)? }),
            Sub::Bvp {
                common,
                order,
                colloc,
            } => (common, Command::Bvp { order, colloc }),
            Sub::Scan {
                common,
                ks,
                order,
                colloc,
            } => (
                common,
                Command::Scan {
                    ks: parse_real_list(&ks)?,
                    order,
                    colloc,
                },
            ),
            Sub::Search {
                common,
                order,
                budget,
                k_only,
            } => (
                common,
                Command::Search {
                    order,
                    budget,
                    k_only,
                },
            ),
        };
        Ok(RunConfig {
            command,
            shape_path: common.shape,
            k: common.k,
            tol: common.tol,
            output: common.output,
            format: common.format,
        })
    }
}

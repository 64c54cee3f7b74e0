use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Dynamics of mapping classes on the cubic surfaces
/// x² + y² + z² + xyz = Ax + By + Cz + D.
#[derive(Debug, Parser)]
#[command(name = "chardyn", version)]
pub struct Cli {
    /// JSON run config: {"command", "params", "outputs", "seed", "workers"}. Flags given on
    /// the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 = all cores). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Seed for randomized seeding.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Isometry type, λ and stability of a word.
    Classify(ClassifyArgs),
    /// Orbit of one point, or escape times of random real seeds.
    Orbit(OrbitArgs),
    /// Green function estimate at a point.
    Green(GreenArgs),
    /// Escape-time raster on a complex conic slice z = z0.
    RenderSlice(RenderSliceArgs),
    /// Escape-time raster on one sheet of the real surface.
    RenderReal(RenderRealArgs),
    /// Periodic points of a given period.
    Periodic(PeriodicArgs),
    /// Exact periodic points on the Cayley cubic.
    CayleyCensus(CensusArgs),
    /// Spectrum of a substitution Schrödinger operator from trace-map escape.
    Spectrum(SpectrumArgs),
    /// Lyapunov exponents of the transfer-matrix cocycle.
    Lyapunov(LyapunovArgs),
    /// Box-counting dimension of an estimated spectrum.
    Dimension(DimensionArgs),
    /// Painlevé VI monodromy report.
    Painleve(PainleveArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Orbit(_) => "orbit",
            Command::Green(_) => "green",
            Command::RenderSlice(_) => "render-slice",
            Command::RenderReal(_) => "render-real",
            Command::Periodic(_) => "periodic",
            Command::CayleyCensus(_) => "cayley-census",
            Command::Spectrum(_) => "spectrum",
            Command::Lyapunov(_) => "lyapunov",
            Command::Dimension(_) => "dimension",
            Command::Painleve(_) => "painleve",
        }
    }
}

pub const COMMANDS: [&str; 11] = [
    "classify",
    "orbit",
    "green",
    "render-slice",
    "render-real",
    "periodic",
    "cayley-census",
    "spectrum",
    "lyapunov",
    "dimension",
    "painleve",
];

#[derive(Debug, Clone, Args, Serialize)]
pub struct Outputs {
    /// Main table or raster (CSV or PGM); a JSON sidecar is written next to it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// JSON report; printed to stdout when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Pt,
    Fam,
}

/// Surface parameters. With only D given the PT surface x²+y²+z² = xyz + D is used.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long = "A", default_value = "0", allow_hyphen_values = true)]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long = "B", default_value = "0", allow_hyphen_values = true)]
    #[serde(rename = "B")]
    pub b: String,
    #[arg(long = "C", default_value = "0", allow_hyphen_values = true)]
    #[serde(rename = "C")]
    pub c: String,
    #[arg(long = "D", default_value = "0", allow_hyphen_values = true)]
    #[serde(rename = "D")]
    pub d: String,
    /// Defaults to pt when A = B = C = 0, fam otherwise.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<ConventionArg>,
    /// Boundary traces a,b,c,d; replaces A..D by the Fam parameters they determine.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifyArgs {
    #[arg(long)]
    pub word: String,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OrbitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "xyz")]
    pub word: String,
    /// Starting point x,y,z (complex entries allowed, e.g. 1+2i).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    /// Instead of one point, draw this many random real points on the surface.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    /// Half-width of the (x, y) square for --random.
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e4)]
    pub escape_radius: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GreenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "xyz")]
    pub word: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, default_value_t = 60)]
    pub n_max: usize,
    /// G⁻ (backward iteration) instead of G⁺.
    #[arg(long)]
    pub minus: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RasterArgs {
    /// lo:hi for a square, or x0:x1,y0:y1.
    #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
    pub window: String,
    /// N or WxH pixels.
    #[arg(long, default_value = "400")]
    pub grid: String,
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long, default_value_t = 1e4)]
    pub escape_radius: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RenderSliceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "xyz")]
    pub word: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z0: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub raster: RasterArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SheetArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RenderRealArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "xyz")]
    pub word: String,
    #[arg(long, value_enum, default_value_t = SheetArg::Upper)]
    pub sheet: SheetArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub raster: RasterArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SeedArgs {
    #[arg(long, default_value_t = 3.0)]
    pub half_width: f64,
    /// Real seeds per axis on each sheet.
    #[arg(long, default_value_t = 60)]
    pub real_grid: usize,
    /// Random complex seeds.
    #[arg(long, default_value_t = 2000)]
    pub complex: usize,
    #[arg(long, default_value_t = 1.0)]
    pub complex_spread: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PeriodicArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value = "xyz")]
    pub word: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
    /// Probe real saddles for one-sidedness.
    #[arg(long)]
    pub probe: bool,
    /// Report confinement for every period up to n.
    #[arg(long)]
    pub confinement: bool,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CensusArgs {
    #[arg(long, default_value = "xyz")]
    pub word: String,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectrumArgs {
    /// `fib`, or the rules as A,B for a→A, b→B.
    #[arg(long, default_value = "fib")]
    pub sub: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1e4)]
    pub escape_radius: f64,
    /// Add a Lyapunov column computed over this many letters (0 = none).
    #[arg(long, default_value_t = 0)]
    pub lyapunov: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LyapunovArgs {
    #[arg(long, default_value = "fib")]
    pub sub: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub kappa: f64,
    /// A single energy; otherwise the window is sampled.
    #[arg(long = "E", allow_hyphen_values = true)]
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 601)]
    pub grid: usize,
    /// Letters of the fixed word.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DimensionArgs {
    #[arg(long, default_value = "fib")]
    pub sub: String,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1e4)]
    pub escape_radius: f64,
    /// Smallest box, in grid steps.
    #[arg(long, default_value_t = 8.0)]
    pub min_steps: f64,
    /// Largest box as a fraction of the window width.
    #[arg(long, default_value_t = 0.125)]
    pub max_fraction: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PainleveArgs {
    /// θ_α,θ_β,θ_γ,θ_δ, complex entries allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    /// Word in l0, l1, linf, e.g. l0l1.
    #[arg(long = "loop")]
    #[serde(rename = "loop")]
    pub loops: String,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Raster side for the dimension estimate.
    #[arg(long, default_value_t = 256)]
    pub raster: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub outputs: Outputs,
}

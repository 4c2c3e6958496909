use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "latticewave", version, about = "Dispersive decay experiments for the discrete wave equation on Z^d")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat `key = value` file of flag values; command-line flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as a config file and exit.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub dump_config: bool,
    /// Write a JSON manifest (config echo, timing, output checksums) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Primary output file (CSV or JSON); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// G(x,t) or the cosine kernel by quadrature, along a lattice ray or at given points.
    Green(GreenArgs),
    /// I(v,t) with its split at the origin.
    Oscint(OscintArgs),
    /// J(t,S,ψ) for a polynomial phase, or the model-phase decay suite.
    Jphase(JphaseArgs),
    /// Critical points for a velocity, or the stratum of a wave number.
    Critical(CriticalArgs),
    /// sup |∇ω| over the degenerate strata.
    B0(B0Args),
    /// Newton polyhedron, distance d_S and multiplicity k_S of a polynomial.
    Newton(NewtonArgs),
    /// Conjugated phase at (π/2,…,π/2) for odd d, with an optional decay fit.
    Conj(ConjArgs),
    /// Linear evolution on a periodic box.
    Evolve(EvolveArgs),
    /// l^p → l^q decay columns of e^{itD} on a periodic box.
    Lplq(LplqArgs),
    /// Mixed space-time norm ratios over random small-support data.
    Strichartz(StrichartzArgs),
    /// Small-data run of u_tt − Δu = |u|^{k−1}u against the linear flow.
    Nonlinear(NonlinearArgs),
    /// Fit C t^β log^p t to a CSV of samples.
    DecayFit(DecayFitArgs),
    /// Decay fits at stratum velocities.
    Table1(Table1Args),
    /// Newton distances of the reference polynomials against their exact values.
    Table2(Table2Args),
    /// Envelope of |J| under random linear perturbations.
    Probe(ProbeArgs),
}

pub fn subcommand_names() -> Vec<&'static str> {
    vec![
        "green", "oscint", "jphase", "critical", "b0", "newton", "conj", "evolve", "lplq", "strichartz", "nonlinear", "decay-fit", "table1", "table2",
        "probe",
    ]
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Green(_) => "green",
            Command::Oscint(_) => "oscint",
            Command::Jphase(_) => "jphase",
            Command::Critical(_) => "critical",
            Command::B0(_) => "b0",
            Command::Newton(_) => "newton",
            Command::Conj(_) => "conj",
            Command::Evolve(_) => "evolve",
            Command::Lplq(_) => "lplq",
            Command::Strichartz(_) => "strichartz",
            Command::Nonlinear(_) => "nonlinear",
            Command::DecayFit(_) => "decay-fit",
            Command::Table1(_) => "table1",
            Command::Table2(_) => "table2",
            Command::Probe(_) => "probe",
        }
    }

    pub fn args_json(&self) -> serde_json::Value {
        let v = match self {
            Command::Green(a) => serde_json::to_value(a),
            Command::Oscint(a) => serde_json::to_value(a),
            Command::Jphase(a) => serde_json::to_value(a),
            Command::Critical(a) => serde_json::to_value(a),
            Command::B0(a) => serde_json::to_value(a),
            Command::Newton(a) => serde_json::to_value(a),
            Command::Conj(a) => serde_json::to_value(a),
            Command::Evolve(a) => serde_json::to_value(a),
            Command::Lplq(a) => serde_json::to_value(a),
            Command::Strichartz(a) => serde_json::to_value(a),
            Command::Nonlinear(a) => serde_json::to_value(a),
            Command::DecayFit(a) => serde_json::to_value(a),
            Command::Table1(a) => serde_json::to_value(a),
            Command::Table2(a) => serde_json::to_value(a),
            Command::Probe(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

impl Cli {
    pub fn dump_config(&self) -> String {
        let global = serde_json::to_value(&self.global).expect("global args serialize");
        crate::config::dump(self.command.name(), &[&global, &self.command.args_json()])
    }
}

/// Time samples: an explicit list, or a geometric schedule t_min·ratio^k ≤ t_max.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Schedule {
    /// Explicit times (overrides the schedule).
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
    /// Geometric ratio between consecutive times.
    #[arg(long, default_value_t = 1.1)]
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// sin(tω)/ω.
    Green,
    /// cos(tω).
    Cos,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.0)]
    pub mass: f64,
    #[arg(long, value_enum, default_value_t = Kernel::Green)]
    pub kernel: Kernel,
    /// Lattice direction w; samples x = m·w at t = m|w|/speed.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub ray: Option<Vec<i64>>,
    /// |v| along the ray (1/√2 is the speed of the all-(π/2) critical velocity).
    #[arg(long, default_value_t = FRAC_1_SQRT_2)]
    pub speed: f64,
    #[arg(long, default_value_t = 1)]
    pub mmin: u64,
    #[arg(long, default_value_t = 10)]
    pub mmax: u64,
    /// A single lattice point (instead of a ray), evaluated at every --t.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
    #[arg(long, default_value_t = 2e9)]
    pub budget: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OscintArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub velocity: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: Schedule,
    /// Radius r0 of the origin cutoff in ω.
    #[arg(long, default_value_t = 1.0)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
    #[arg(long, default_value_t = 2e9)]
    pub budget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Amplitude {
    Separable,
    Radial,
}

#[derive(Debug, Args, Serialize)]
pub struct JphaseArgs {
    /// Phase polynomial in x1, x2, … (e.g. "x1^2*x2 - x2^3").
    #[arg(long)]
    pub poly: Option<String>,
    /// Catalog phase names (A1, A2, A3, D4-, x1x2x3, x1^2x2, …).
    #[arg(long, value_delimiter = ',')]
    pub model: Option<Vec<String>>,
    /// Fit every selected catalog phase and compare with its decay law.
    #[arg(long)]
    pub suite: bool,
    #[arg(long, value_enum, default_value_t = Amplitude::Separable)]
    pub amplitude: Amplitude,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: Schedule,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CriticalArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub velocity: Option<Vec<f64>>,
    /// Classify this wave number instead.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct B0Args {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Grid points per unit interval on the strata slices (doubled once for the convergence check).
    #[arg(long, default_value_t = 64)]
    pub grid_density: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct NewtonArgs {
    #[arg(long)]
    pub poly: String,
    /// Also sample the compact face parts for R-nondegeneracy.
    #[arg(long)]
    pub nondegeneracy: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ConjArgs {
    /// Odd dimension d ≥ 3.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    /// Skip the decay fit of |I(v0,t)|.
    #[arg(long)]
    pub no_fit: bool,
    /// Largest t of the fit (every lattice point m(1,…,1) up to it is sampled).
    #[arg(long, default_value_t = 120.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Box side L (periodic).
    #[arg(long, default_value_t = 64)]
    pub side: usize,
    #[arg(long, default_value_t = 0.0)]
    pub mass: f64,
    /// Initial velocity f: "delta" or a field file written by --save.
    #[arg(long, default_value = "delta")]
    pub f: String,
    /// Initial displacement g: "zero", "delta" or a field file.
    #[arg(long, default_value = "zero")]
    pub g: String,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    pub t: Vec<f64>,
    /// Save u at the last time as a binary field.
    #[arg(long)]
    pub save: Option<PathBuf>,
    /// Accept boxes too small to be free of wrap-around at the last time.
    #[arg(long)]
    pub periodic: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LplqArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 64)]
    pub side: usize,
    /// Exponent pairs p:q (fractions and inf allowed).
    #[arg(long, value_delimiter = ',', default_values_t = ["1:inf".to_string(), "4/3:4".to_string(), "2:2".to_string()])]
    pub pairs: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 40.0)]
    pub t_max: f64,
    /// Number of equally spaced times.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct StrichartzArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 32)]
    pub side: usize,
    #[arg(long, default_value_t = 4.0)]
    pub q: f64,
    #[arg(long, default_value_t = 4.0)]
    pub r: f64,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Side of the cube holding the random data.
    #[arg(long, default_value_t = 3)]
    pub support: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub dt: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct NonlinearArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 32)]
    pub side: usize,
    #[arg(long, default_value_t = 4)]
    pub k: u32,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// ‖f‖₁ of the data f = a·δ₀.
    #[arg(long, default_value_t = 1e-3)]
    pub l1: f64,
    #[arg(long, default_value_t = 10)]
    pub observe_every: usize,
    #[arg(long, default_value_t = 1e6)]
    pub cap: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DecayFitArgs {
    /// CSV with columns t,magnitude[,tag].
    #[arg(long)]
    pub input: PathBuf,
    /// Running-max window applied before fitting.
    #[arg(long)]
    pub envelope: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    pub t_min: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1, 2])]
    pub p: Vec<u32>,
    /// A log power is claimed only if its residual is this many times smaller than p = 0.
    #[arg(long, default_value_t = 2.0)]
    pub dominance: f64,
    #[arg(long)]
    pub target_p: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct Table1Args {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Stratum names to run (all for the dimension when absent).
    #[arg(long, value_delimiter = ',')]
    pub names: Option<Vec<String>>,
    /// Override the largest t of every case.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    /// Write the sampled magnitudes of every case to this CSV.
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Table2Args {}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long, default_value = "x1*x2*x3 + x4^2")]
    pub poly: String,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05])]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1.1)]
    pub ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Running-max window for the envelope fit.
    #[arg(long, default_value_t = 5)]
    pub window: usize,
}

//! `emitter`: command-line front end to emitter-core.
//!
//! Exit codes: 0 success, 1 invalid request, 2 numerical failure (including
//! a failed acceptance criterion under `reproduce`).

mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use emitter_core::constants::{PhysicalConstants, UnitSystem};
use emitter_core::error::Error;
use emitter_core::friction::{FrictionModel, PhononData};
use emitter_core::io;
use emitter_core::kinetics::{
    solve_dispersion_ode, DensityField, DispersionMode, DispersionOptions, KleinKramers, PhaseGrid, PhaseSpaceField,
    Smoluchowski, Spacing, UniformGrid,
};
use emitter_core::moments::{diffusion_constants, position_dispersion_log, universal_constants, velocity_dispersion};
use emitter_core::params::{make_params, parse_config, EmitterParams, ParamSpec};
use emitter_core::potential::Potential;
use emitter_core::quadrature::QuadratureSpec;
use emitter_core::reproduce::run_all;
use emitter_core::spectra::{frequency_grid, GridKind, SpectrumKind, SpectrumSamples};
use emitter_core::stochastic::{
    burn_in_steps, estimate_psd, integrate_langevin_classical, synthesize_trajectory, TrajectoryKind, Window,
};

use output::{OutputDir, RunManifest, MANIFEST_NAME};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "emitter", version, about = "Brownian emitter: spectra, moments, simulation and kinetics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Unit system: si, natural or reduced.
    #[arg(long, global = true)]
    units: Option<String>,
    /// Replace ħω coth(ħω/2kT) by 2kT everywhere.
    #[arg(long, global = true)]
    classical: bool,
    #[arg(long, global = true, env = "EMITTER_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `key = value` parameter file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    gamma0: Option<f64>,
    #[arg(long, global = true)]
    omega0: Option<f64>,
    #[arg(long, global = true)]
    tau0: Option<f64>,
    #[arg(long, global = true)]
    charge: Option<f64>,
    #[arg(long, global = true)]
    temperature: Option<f64>,
    #[arg(long, global = true)]
    cutoff: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Universal constants of the vacuum emitter.
    Constants,
    /// Sample a spectral density on a frequency grid.
    Spectrum(SpectrumArgs),
    /// Gaussian trajectory with a prescribed spectral density.
    Synthesize(SynthesizeArgs),
    /// Classical Langevin trajectory with white plus violet force noise.
    Simulate(SimulateArgs),
    /// Welch spectral estimate of a trajectory CSV.
    EstimatePsd(EstimateArgs),
    /// Moment integrals and diffusion constants.
    Moments(MomentsArgs),
    /// Klein–Kramers, Smoluchowski and dispersion-equation solvers.
    #[command(subcommand)]
    Kinetics(KineticsCommand),
    /// Run the acceptance battery and print a pass/fail table.
    Reproduce,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// radiative, ohmic, white, sinh-twin, sech-twin or phonon.
    #[arg(long, default_value = "radiative")]
    model: String,
    /// Substrate atom mass for the phonon model.
    #[arg(long)]
    substrate_mass: Option<f64>,
    /// Debye frequency for the phonon model.
    #[arg(long)]
    debye_frequency: Option<f64>,
}

impl ModelArgs {
    fn build(&self, params: &EmitterParams) -> Result<FrictionModel, CliError> {
        let phonon = match (self.substrate_mass, self.debye_frequency) {
            (Some(substrate_mass), Some(debye_frequency)) => Some(PhononData { substrate_mass, debye_frequency }),
            _ => None,
        };
        Ok(FrictionModel::from_name(&self.model, params, phonon)?)
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// xx, vv, ff, xx-lorentzian or ff-integrated.
    #[arg(long, default_value = "xx")]
    kind: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.0)]
    omega_min: f64,
    #[arg(long)]
    omega_max: f64,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Grid::Linear)]
    grid: Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Grid {
    Linear,
    Log,
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Target density: xx gives a position series, vv a velocity series.
    #[arg(long, default_value = "xx")]
    kind: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dt: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// harmonic[:omega0=W], poly:c0,c1,..., doublewell:a,b or free.
    #[arg(long, default_value = "harmonic")]
    potential: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    v0: f64,
    /// Steps dropped from the start; defaults to ten relaxation times.
    #[arg(long)]
    burn_in: Option<usize>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Trajectory CSV (`t,x` or `t,v`); a `.meta.json` sidecar is used when present.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 512)]
    segment: usize,
    /// hann or rectangular.
    #[arg(long, default_value = "hann")]
    window: String,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Times for log-msd, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Quantity {
    VelocityDispersion,
    LogMsd,
    Diffusion,
    Constants,
}

#[derive(Subcommand, Debug)]
enum KineticsCommand {
    /// Phase-space (Klein–Kramers) evolution.
    Kk(FieldArgs),
    /// Position-space (Smoluchowski) evolution.
    Smoluchowski(FieldArgs),
    /// Position-dispersion moment equation.
    DispersionOde(DispersionArgs),
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long, default_value = "harmonic")]
    potential: String,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 200)]
    x_cells: usize,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    v_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    v_max: f64,
    #[arg(long, default_value_t = 64)]
    v_cells: usize,
    /// Gaussian start.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_mean: f64,
    #[arg(long, default_value_t = 0.1)]
    x_var: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    v_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    v_var: f64,
    /// Snapshot times, comma separated and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    times: Vec<f64>,
    /// Time step; chosen automatically when omitted.
    #[arg(long)]
    dt: Option<f64>,
    /// Snapshot file name inside --out-dir.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct DispersionArgs {
    /// full19, classical or reduced-vacuum.
    #[arg(long, default_value = "reduced-vacuum")]
    mode: String,
    /// Initial σ², σ²′, σ²″.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    y0: Vec<f64>,
    #[arg(long)]
    t0: f64,
    #[arg(long)]
    t1: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Grid::Linear)]
    spacing: Grid,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Config file first, then flags on top.
fn parameter_map(g: &Global) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => BTreeMap::new(),
    };
    if let Some(u) = &g.units {
        map.insert("units".into(), u.clone());
    }
    if g.classical {
        map.insert("classical".into(), "true".into());
    }
    for (key, value) in [
        ("m", g.m),
        ("gamma0", g.gamma0),
        ("omega0", g.omega0),
        ("tau0", g.tau0),
        ("charge", g.charge),
        ("temperature", g.temperature),
        ("cutoff", g.cutoff),
    ] {
        if let Some(v) = value {
            map.insert(key.into(), v.to_string());
        }
    }
    if let Some(t) = map.remove("T") {
        map.entry("temperature".into()).or_insert(t);
    }
    Ok(map)
}

/// Without tau0 or charge the emitter carries one elementary charge.
fn build_params(map: &BTreeMap<String, String>) -> Result<EmitterParams, CliError> {
    let mut spec = ParamSpec { units: Some(UnitSystem::natural()), ..Default::default() };
    spec.apply_map(map)?;
    if spec.tau0.is_none() && spec.charge.is_none() {
        let units = spec.units.clone().unwrap_or_else(UnitSystem::natural);
        spec.charge = Some(units.constants().elementary_charge);
    }
    Ok(make_params(&spec)?)
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    let start = Instant::now();
    let g = &cli.global;
    let config = parameter_map(g)?;
    let mut out = OutputDir::create(&g.out_dir)?;
    let mut seeds = Vec::new();
    let mut failure = None;

    match &cli.command {
        Command::Constants => constants(&config, &mut out)?,
        Command::Spectrum(a) => spectrum(a, &build_params(&config)?, g.format, &mut out)?,
        Command::Synthesize(a) => {
            seeds.push(g.seed);
            synthesize(a, &build_params(&config)?, g.seed, g.format, &mut out)?
        }
        Command::Simulate(a) => {
            seeds.push(g.seed);
            simulate(a, &build_params(&config)?, g.seed, g.format, &mut out)?
        }
        Command::EstimatePsd(a) => estimate(a, g.format, &mut out)?,
        Command::Moments(a) => moments(a, &build_params(&config)?, g.format, &mut out)?,
        Command::Kinetics(k) => kinetics(k, &build_params(&config)?, g.format, &mut out)?,
        Command::Reproduce => failure = reproduce(&mut out)?,
    }

    let manifest = RunManifest {
        command_line: argv.join(" "),
        config,
        seeds,
        artifacts: out.artifacts().clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Usage(e.to_string()))? + "\n";
    out.write(MANIFEST_NAME, text.as_bytes())?;
    match failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    Ok(io::to_json(value)?.into_bytes())
}

fn constants(config: &BTreeMap<String, String>, out: &mut OutputDir) -> Result<(), CliError> {
    // dimensionless numbers do not depend on units; lengths are quoted in SI
    let si = universal_constants(&PhysicalConstants::si());
    let units = match config.get("units") {
        Some(name) => UnitSystem::from_name(name)?,
        None => UnitSystem::natural(),
    };
    let native = universal_constants(&units.constants());
    println!("cutoff * tau0           = {:.6e} = 1/{:.2} (about 1/103)", si.cutoff_times_tau0, 1.0 / si.cutoff_times_tau0);
    println!("velocity dispersion/c^2 = {:.6e}", si.velocity_dispersion_over_c2);
    println!("rms velocity            = {:.6} c = c/{:.2} (about c/18)", si.rms_velocity_over_c, 1.0 / si.rms_velocity_over_c);
    println!("mean free path          = {:.3} fm (about 21 fm)", si.electron_mean_free_path * 1e15);
    println!("electron diameter       = {:.3} fm", si.electron_diameter * 1e15);
    println!("mean free path/diameter = {:.4}", si.electron_mean_free_path / si.electron_diameter);
    println!("collision frequency     = {:.6e} s^-1", si.compton_collision_frequency);
    let doc = json!({ "si": si, "units": units.name(), "in_units": native });
    out.write("constants.json", &json_bytes(&doc)?)?;
    Ok(())
}

fn spectrum(a: &SpectrumArgs, params: &EmitterParams, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    let kind = SpectrumKind::from_name(&a.kind)?;
    let model = a.model.build(params)?;
    let grid = match a.grid {
        Grid::Linear => GridKind::Linear,
        Grid::Log => GridKind::Log,
    };
    let omegas = frequency_grid(a.omega_min, a.omega_max, a.points, grid)?;
    let s = SpectrumSamples::evaluate(kind, params, &model, omegas)?;
    match format {
        Format::Csv => {
            out.write("spectrum.csv", io::spectrum_csv(&s).as_bytes())?;
            let sidecar = json!({ "kind": s.kind, "model": s.model, "params": s.params });
            out.write("spectrum.params.json", &json_bytes(&sidecar)?)?;
        }
        Format::Json => {
            out.write("spectrum.json", &json_bytes(&s)?)?;
        }
    }
    Ok(())
}

fn write_trajectory(
    stem: &str,
    t: &emitter_core::stochastic::Trajectory,
    format: Format,
    out: &mut OutputDir,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            out.write(&format!("{stem}.csv"), io::trajectory_csv(t).as_bytes())?;
            out.write(&format!("{stem}.meta.json"), &json_bytes(&io::TrajectoryMeta::of(t))?)?;
        }
        Format::Json => {
            out.write(&format!("{stem}.json"), &json_bytes(t)?)?;
        }
    }
    Ok(())
}

fn synthesize(a: &SynthesizeArgs, params: &EmitterParams, seed: u64, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    let (kind, traj_kind) = match a.kind.as_str() {
        "xx" => (SpectrumKind::Xx, TrajectoryKind::Position),
        "vv" => (SpectrumKind::Vv, TrajectoryKind::Velocity),
        other => return Err(CliError::Usage(format!("--kind must be xx or vv, got `{other}`"))),
    };
    let model = a.model.build(params)?;
    // surface domain errors before synthesis swallows them
    kind.evaluate(params, &model, std::f64::consts::PI / a.dt)?;
    let target = |w: f64| kind.evaluate(params, &model, w).unwrap_or(f64::NAN);
    let mut t = synthesize_trajectory(target, a.n, a.dt, seed, traj_kind)?;
    t.params = Some(params.clone());
    write_trajectory("trajectory", &t, format, out)
}

fn simulate(a: &SimulateArgs, params: &EmitterParams, seed: u64, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    let potential = Potential::parse(&a.potential, params.m, params.omega0)?;
    let burn = a.burn_in.unwrap_or_else(|| burn_in_steps(params, a.dt));
    let (x, v) = integrate_langevin_classical(&potential, params, a.n + burn, a.dt, seed, a.x0, a.v0)?;
    let (mut x, mut v) = (x.discard(burn), v.discard(burn));
    x.params = Some(params.clone());
    v.params = Some(params.clone());
    write_trajectory("position", &x, format, out)?;
    write_trajectory("velocity", &v, format, out)
}

fn estimate(a: &EstimateArgs, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.input.display())))?;
    let meta_path = a.input.with_extension("meta.json");
    let meta: Option<io::TrajectoryMeta> = match std::fs::read_to_string(&meta_path) {
        Ok(m) => Some(serde_json::from_str(&m).map_err(|e| CliError::Usage(format!("bad sidecar: {e}")))?),
        Err(_) => None,
    };
    let traj = io::parse_trajectory_csv(&text, meta.as_ref())?;
    let est = estimate_psd(&traj, a.segment, Window::from_name(&a.window)?)?;
    match format {
        Format::Csv => out.write("psd.csv", io::psd_csv(&est).as_bytes())?,
        Format::Json => out.write("psd.json", &json_bytes(&est)?)?,
    };
    Ok(())
}

/// quantity, t, value, error, closed form
type MomentRow = (String, Option<f64>, f64, f64, Option<f64>);

fn moments(a: &MomentsArgs, params: &EmitterParams, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    let quad = QuadratureSpec { rel_tol: a.rel_tol, ..Default::default() };
    let mut rows: Vec<MomentRow> = Vec::new();
    match a.quantity {
        Quantity::VelocityDispersion => {
            let r = velocity_dispersion(params, &quad)?;
            rows.push(("velocity-dispersion".into(), None, r.value, r.estimated_error, r.closed_form));
        }
        Quantity::LogMsd => {
            if a.t.is_empty() {
                return Err(CliError::Usage("log-msd needs --t".into()));
            }
            for &t in &a.t {
                let r = position_dispersion_log(params, t, &quad)?;
                rows.push(("log-msd".into(), Some(t), r.value, r.estimated_error, r.closed_form));
            }
        }
        Quantity::Diffusion => {
            let d = diffusion_constants(params);
            rows.push(("einstein-diffusion".into(), None, d.d.unwrap_or(f64::NAN), 0.0, d.d));
            rows.push(("vacuum-diffusion".into(), None, d.d0.unwrap_or(f64::NAN), 0.0, d.d0));
        }
        Quantity::Constants => {
            let u = universal_constants(&params.consts);
            for (name, v) in [
                ("cutoff-times-tau0", u.cutoff_times_tau0),
                ("velocity-dispersion-over-c2", u.velocity_dispersion_over_c2),
                ("rms-velocity-over-c", u.rms_velocity_over_c),
                ("mean-free-path-factor", u.mean_free_path_factor),
                ("electron-mean-free-path", u.electron_mean_free_path),
                ("electron-diameter", u.electron_diameter),
                ("compton-collision-frequency", u.compton_collision_frequency),
            ] {
                rows.push((name.into(), None, v, 0.0, Some(v)));
            }
        }
    }
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (q, t, v, e, c) in &rows {
        println!("{q}{} = {v:.10e} (error {e:.1e}{})", t.map_or(String::new(), |t| format!("(t={t})")), c.map_or(String::new(), |c| format!(", closed form {c:.10e}")));
    }
    match format {
        Format::Csv => {
            let mut csv = String::from("quantity,t,value,error,closed_form\n");
            for (q, t, v, e, c) in &rows {
                csv.push_str(&format!("{q},{},{v},{e},{}\n", opt(*t), opt(*c)));
            }
            out.write("moments.csv", csv.as_bytes())?;
        }
        Format::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|(q, t, v, e, c)| json!({ "quantity": q, "t": t, "value": v, "error": e, "closed_form": c }))
                .collect();
            out.write("moments.json", &json_bytes(&doc)?)?;
        }
    }
    Ok(())
}

fn snapshot_times(times: &[f64]) -> Result<(), CliError> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("--times must be finite, >= 0 and increasing".into()));
    }
    Ok(())
}

fn kinetics(k: &KineticsCommand, params: &EmitterParams, format: Format, out: &mut OutputDir) -> Result<(), CliError> {
    match k {
        KineticsCommand::Kk(a) => {
            snapshot_times(&a.times)?;
            let potential = Potential::parse(&a.potential, params.m, params.omega0)?;
            let grid = PhaseGrid {
                x: UniformGrid::new(a.x_min, a.x_max, a.x_cells)?,
                v: UniformGrid::new(a.v_min, a.v_max, a.v_cells)?,
            };
            let start = PhaseSpaceField::gaussian(grid, a.x_mean, a.x_var, a.v_mean, a.v_var)?;
            let mut solver = KleinKramers::new(&potential, params, start, a.dt)?;
            let mut snaps = Vec::new();
            for &t in &a.times {
                solver.advance_to(t)?;
                snaps.push(solver.field().clone());
            }
            let name = a.out.clone();
            match format {
                Format::Csv => out.write(&name.unwrap_or("kk.csv".into()), io::phase_snapshots_csv(&snaps).as_bytes())?,
                Format::Json => out.write(&name.unwrap_or("kk.json".into()), &json_bytes(&snaps)?)?,
            };
        }
        KineticsCommand::Smoluchowski(a) => {
            snapshot_times(&a.times)?;
            let potential = Potential::parse(&a.potential, params.m, params.omega0)?;
            let grid = UniformGrid::new(a.x_min, a.x_max, a.x_cells)?;
            let horizon = a.times.last().copied().unwrap_or(1.0);
            let dt = a.dt.unwrap_or_else(|| Smoluchowski::default_dt(&potential, params, &grid, horizon));
            let start = DensityField::gaussian(grid, a.x_mean, a.x_var)?;
            let mut solver = Smoluchowski::new(&potential, params, start, dt)?;
            let mut snaps = Vec::new();
            for &t in &a.times {
                solver.advance_to(t)?;
                snaps.push(solver.field().clone());
            }
            let name = a.out.clone();
            match format {
                Format::Csv => out.write(&name.unwrap_or("smoluchowski.csv".into()), io::density_snapshots_csv(&snaps).as_bytes())?,
                Format::Json => out.write(&name.unwrap_or("smoluchowski.json".into()), &json_bytes(&snaps)?)?,
            };
        }
        KineticsCommand::DispersionOde(a) => {
            let mode = DispersionMode::from_name(&a.mode)?;
            let mut y0 = [0.0; 3];
            if a.y0.len() > 3 {
                return Err(CliError::Usage("--y0 takes at most three values".into()));
            }
            y0[..a.y0.len()].copy_from_slice(&a.y0);
            let spacing = match a.spacing {
                Grid::Linear => Spacing::Linear,
                Grid::Log => Spacing::Log,
            };
            let opts = DispersionOptions { points: a.points, spacing, ..Default::default() };
            let s = solve_dispersion_ode(params, y0, (a.t0, a.t1), mode, &opts)?;
            if let Some(w) = &s.branch_warning {
                eprintln!("warning: {w}");
            }
            if let Some(r) = &s.stopped {
                eprintln!("stopped: {r}");
            }
            let name = a.out.clone();
            match format {
                Format::Csv => out.write(&name.unwrap_or("dispersion.csv".into()), io::dispersion_csv(&s).as_bytes())?,
                Format::Json => out.write(&name.unwrap_or("dispersion.json".into()), &json_bytes(&s)?)?,
            };
        }
    }
    Ok(())
}

/// Returns the failure summary, if any, so the manifest is still written.
fn reproduce(out: &mut OutputDir) -> Result<Option<String>, CliError> {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    out.write("reproduce.json", &json_bytes(&outcomes)?)?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    Ok((!failed.is_empty()).then(|| format!("criteria failed: {}", failed.join(", "))))
}

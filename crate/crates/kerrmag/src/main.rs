//! `kerrmag`: steady states, bistability, hysteresis sweeps, and cavity
//! transmission of a Kerr-nonlinear cavity-magnon system.
//!
//! Exit codes: 0 success, 2 config parse, 3 validation, 4 numerical
//! failure, 5 output I/O. On failure a machine-readable JSON error record
//! goes to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use kerrmag::config::{Resolved, RunConfig};
use kerrmag::error::Error;
use kerrmag::{oracle, output, response, steady, sweep};

#[derive(Parser)]
#[command(name = "kerrmag", version, about = "Kerr cavity-magnonics simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output].dir).
    #[arg(long)]
    out_dir: Option<String>,
    /// Output file prefix (overrides [output].prefix).
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Derived magnon parameters (g_m, K, ω_m, D_i) from the material.
    Params {
        #[command(flatten)]
        common: Common,
    },
    /// Steady-state roots, amplitudes, and stability for one configuration.
    Steady {
        #[command(flatten)]
        common: Common,
        /// Override the drive power (mW).
        #[arg(long)]
        drive_power: Option<f64>,
    },
    /// Bistable condition, switching points, and critical powers.
    Bistability {
        #[command(flatten)]
        common: Common,
    },
    /// Hysteresis sweep over power or magnon frequency.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Transmission map |S21|(ω_p, ω_m) along the sweep direction(s).
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Threshold detuning and critical powers versus Δ = ω_c − ω_m.
    Critical {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized solver-vs-integrator verification report.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Number of randomized configurations.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for the randomized suite.
        #[arg(long)]
        seed: Option<u64>,
        /// Also dump the relax-from-vacuum trajectory to this CSV path.
        #[arg(long)]
        dump_trajectory: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Validation(m)
            | CliError::Numerical(m)
            | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    // KERRMAG_THREADS caps the worker pool for grid computations
    if let Ok(n) = std::env::var("KERRMAG_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": e.kind(),
                    "message": e.message(),
                    "exit_code": e.code(),
                })
            );
            ExitCode::from(e.code())
        }
    }
}

struct Context {
    config: RunConfig,
    resolved: Resolved,
    dir: PathBuf,
    prefix: String,
}

impl Context {
    fn load(common: &Common) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(&common.config)
            .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
        let config = RunConfig::from_toml(&text).map_err(CliError::Config)?;
        let resolved = config.resolve()?;
        for notice in &resolved.notices {
            eprintln!("notice: {notice}");
        }
        for warning in &resolved.warnings {
            eprintln!("warning: {warning}");
        }
        let dir = PathBuf::from(common.out_dir.clone().unwrap_or(config.output.dir.clone()));
        let prefix = common
            .prefix
            .clone()
            .or(config.output.prefix.clone())
            .map(|p| format!("{p}_"))
            .unwrap_or_default();
        Ok(Self {
            config,
            resolved,
            dir,
            prefix,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{}{name}", self.prefix))
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Params { common } => cmd_params(&Context::load(common)?),
        Command::Steady {
            common,
            drive_power,
        } => {
            let mut ctx = Context::load(common)?;
            if let Some(p) = drive_power {
                ctx.resolved.drive.power = *p;
                ctx.config.drive.power_mw = *p;
            }
            cmd_steady(&ctx)
        }
        Command::Bistability { common } => cmd_bistability(&Context::load(common)?),
        Command::Sweep { common } => cmd_sweep(&Context::load(common)?),
        Command::Spectrum { common } => cmd_spectrum(&Context::load(common)?),
        Command::Critical { common } => cmd_critical(&Context::load(common)?),
        Command::Oracle {
            common,
            samples,
            seed,
            dump_trajectory,
        } => cmd_oracle(
            &Context::load(common)?,
            *samples,
            *seed,
            dump_trajectory.as_deref(),
        ),
    }
}

const MHZ: f64 = 1e6;

fn cmd_params(ctx: &Context) -> Result<(), CliError> {
    let derived = ctx.resolved.derived.as_ref().ok_or_else(|| {
        CliError::Validation("params needs a [material] section to derive from".into())
    })?;
    println!("derived magnon parameters");
    println!("  macrospin S          {:.6e}", derived.macrospin);
    println!("  sphere volume        {:.6e} m^3", derived.volume);
    println!("  coupling g_m         {:.6} MHz", derived.coupling / MHZ);
    println!("  Kerr coefficient K   {:.6e} nHz", derived.kerr * 1e9);
    println!(
        "  magnon frequency     {:.6} MHz",
        derived.magnon_frequency / MHZ
    );
    println!(
        "  anisotropy D_x,y,z   {:.6e}, {:.6e}, {:.6e} nHz",
        derived.anisotropy[0] * 1e9,
        derived.anisotropy[1] * 1e9,
        derived.anisotropy[2] * 1e9
    );
    let path = ctx.path("params.json");
    output::write_json(&path, "params", &ctx.config, derived)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct SteadyDocument<'a> {
    roots: &'a steady::SteadyRoots,
    /// sqrt(2 κ_o) A0 per root: the drive-tone component of the output
    /// field, which rides at ω_d and is excluded from S21.
    drive_tone_output: Vec<num_complex::Complex64>,
}

fn cmd_steady(ctx: &Context) -> Result<(), CliError> {
    let roots = steady::solve_steady(&ctx.resolved.sys, &ctx.resolved.drive)?;
    let drive_tone: Vec<_> = roots
        .solutions
        .iter()
        .map(|s| response::drive_tone_output(&ctx.resolved.sys, s.cavity_amp))
        .collect();
    if roots.low_excitation_warning {
        eprintln!("warning: |B0|^2/(2S) > 0.01, the low-excitation expansion is strained");
    }
    println!(
        "eta = {:.6}  delta_m_eff = {:.6} MHz  gamma_m_eff = {:.6} MHz  rabi = {:.6e} MHz",
        roots.eff.eta,
        roots.eff.delta_m_eff / MHZ,
        roots.eff.gamma_m_eff / MHZ,
        roots.rabi / MHZ
    );
    println!("branch  delta_m_mhz      |B0|           |A0|          stable");
    for s in &roots.solutions {
        println!(
            "{:<7} {:<16.9} {:<14.6e} {:<13.6e} {}",
            s.branch.to_string(),
            s.shift / MHZ,
            s.magnon_amp.norm(),
            s.cavity_amp.norm(),
            s.stable
        );
    }
    if roots.near_fold {
        println!("note: configuration sits at a fold boundary (double root)");
    }
    let path = ctx.path("steady.json");
    output::write_json(
        &path,
        "steady",
        &ctx.config,
        &SteadyDocument {
            roots: &roots,
            drive_tone_output: drive_tone,
        },
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct BistabilityDocument {
    eff: steady::EffectiveParams,
    report: steady::BistabilityReport,
    critical_power_yig: Option<f64>,
    critical_power_cavity: Option<f64>,
}

fn cmd_bistability(ctx: &Context) -> Result<(), CliError> {
    let sys = &ctx.resolved.sys;
    let drive = &ctx.resolved.drive;
    let eff = steady::effective_params(sys, drive);
    let report = steady::bistability_analysis(&eff, sys, drive);
    let yig = steady::bistability_analysis(
        &eff,
        sys,
        &steady::DriveConfig {
            target: steady::DriveTarget::Yig,
            ..drive.clone()
        },
    );
    let cavity = steady::bistability_analysis(
        &eff,
        sys,
        &steady::DriveConfig {
            target: steady::DriveTarget::Cavity,
            ..drive.clone()
        },
    );
    println!(
        "delta_m_eff = {:.6} MHz, gamma_m_eff = {:.6} MHz, eta = {:.6}",
        eff.delta_m_eff / MHZ,
        eff.gamma_m_eff / MHZ,
        eff.eta
    );
    println!("bistable: {}", report.bistable);
    if let Some((s1, s2)) = report.switching_shifts {
        println!(
            "switching shifts: {:.6} MHz, {:.6} MHz",
            s1 / MHZ,
            s2 / MHZ
        );
    }
    if let Some(p) = yig.critical_power {
        println!("critical power P_m (pump sphere): {p:.4} mW");
    }
    if let Some(p) = cavity.critical_power {
        println!("critical power P_c (pump cavity): {p:.4} mW");
    }
    let doc = BistabilityDocument {
        eff,
        report,
        critical_power_yig: yig.critical_power,
        critical_power_cavity: cavity.critical_power,
    };
    let path = ctx.path("bistability.json");
    output::write_json(&path, "bistability", &ctx.config, &doc)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    up: Option<TraceSummary<'a>>,
    down: Option<TraceSummary<'a>>,
    hysteresis_area: Option<f64>,
}

#[derive(Serialize)]
struct TraceSummary<'a> {
    switchings: &'a [sweep::SwitchingRecord],
    under_resolved: bool,
    samples: usize,
}

fn sweep_plan(ctx: &Context) -> Result<sweep::SweepPlan, CliError> {
    let (axis, values, direction) = ctx
        .resolved
        .sweep
        .clone()
        .ok_or_else(|| CliError::Validation("this command needs a [sweep] section".into()))?;
    Ok(sweep::SweepPlan {
        axis,
        values,
        direction,
        sys: ctx.resolved.sys.clone(),
        drive: ctx.resolved.drive.clone(),
    })
}

fn cmd_sweep(ctx: &Context) -> Result<(), CliError> {
    let plan = sweep_plan(ctx)?;
    let result = sweep::hysteresis_sweep(&plan)?;
    let area = match (&result.up, &result.down) {
        (Some(u), Some(d)) => Some(sweep::hysteresis_area(u, d)),
        _ => None,
    };
    for (trace, name) in [(&result.up, "sweep_up.csv"), (&result.down, "sweep_down.csv")] {
        if let Some(t) = trace {
            let path = ctx.path(name);
            output::write_trace_csv(&path, "sweep", &ctx.config, t)?;
            println!(
                "wrote {} ({} samples, {} switchings{})",
                path.display(),
                t.samples.len(),
                t.switchings.len(),
                if t.under_resolved {
                    ", under-resolved"
                } else {
                    ""
                }
            );
        }
    }
    if let Some(a) = area {
        println!("hysteresis area: {:.6e} MHz^2-equivalent", a / MHZ / MHZ);
    }
    let doc = SweepDocument {
        up: result.up.as_ref().map(|t| TraceSummary {
            switchings: &t.switchings,
            under_resolved: t.under_resolved,
            samples: t.samples.len(),
        }),
        down: result.down.as_ref().map(|t| TraceSummary {
            switchings: &t.switchings,
            under_resolved: t.under_resolved,
            samples: t.samples.len(),
        }),
        hysteresis_area: area,
    };
    let path = ctx.path("sweep.json");
    output::write_json(&path, "sweep", &ctx.config, &doc)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_spectrum(ctx: &Context) -> Result<(), CliError> {
    let plan = sweep_plan(ctx)?;
    if plan.axis != sweep::SweepAxis::MagnonFrequency {
        return Err(CliError::Validation(
            "spectrum needs [sweep] axis = \"omega_m\"".into(),
        ));
    }
    let directions: &[bool] = match plan.direction {
        sweep::SweepDirection::Up => &[true],
        sweep::SweepDirection::Down => &[false],
        sweep::SweepDirection::Both => &[true, false],
    };
    for &ascending in directions {
        let grid = response::spectrum_map(
            &ctx.resolved.sys,
            &ctx.resolved.drive,
            &ctx.resolved.probe_grid,
            &plan.values,
            ascending,
        )?;
        let tag = if ascending { "up" } else { "down" };
        let csv_path = ctx.path(&format!("spectrum_{tag}.csv"));
        output::write_spectrum_csv(&csv_path, "spectrum", &ctx.config, &grid)?;
        let json_path = ctx.path(&format!("spectrum_{tag}.json"));
        output::write_json(&json_path, "spectrum", &ctx.config, &grid)?;
        println!(
            "wrote {} and {} ({} x {})",
            csv_path.display(),
            json_path.display(),
            grid.omega_m.len(),
            grid.omega_p.len()
        );
    }
    Ok(())
}

fn cmd_critical(ctx: &Context) -> Result<(), CliError> {
    let sys = &ctx.resolved.sys;
    let c = ctx.resolved.drive.power_coupling;
    let mut rows = Vec::with_capacity(ctx.resolved.critical_grid.len());
    for &delta in &ctx.resolved.critical_grid {
        match steady::threshold_detuning(sys, delta, c) {
            Ok(t) => rows.push((delta, Some(t))),
            Err(Error::NoThreshold { .. }) => rows.push((delta, None)),
            Err(e) => return Err(e.into()),
        }
    }
    let found = rows.iter().filter(|(_, t)| t.is_some()).count();
    println!(
        "threshold found at {found}/{} detunings",
        rows.len()
    );
    let path = ctx.path("critical.csv");
    output::write_critical_csv(&path, "critical", &ctx.config, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_oracle(
    ctx: &Context,
    samples: Option<usize>,
    seed: Option<u64>,
    dump_trajectory: Option<&Path>,
) -> Result<(), CliError> {
    let samples = samples.unwrap_or(ctx.config.oracle.samples);
    let seed = seed.unwrap_or(ctx.config.oracle.seed);
    let report = oracle::equivalence_suite(&ctx.resolved.sys, &ctx.resolved.drive, samples, seed)?;
    println!(
        "oracle: {}/{} stable roots reproduced (max rel err {:.3e}), \
         {}/{} middle roots unstable, {} escaped",
        report.stable_roots_checked - report.failures.len().min(report.stable_roots_checked),
        report.stable_roots_checked,
        report.max_relative_error,
        report.middle_unstable,
        report.middle_roots_checked,
        report.middle_escaped
    );
    for f in &report.failures {
        eprintln!("oracle failure: {f}");
    }
    let path = ctx.path("oracle.json");
    output::write_json(&path, "oracle", &ctx.config, &report)?;
    println!("wrote {}", path.display());

    if let Some(traj_path) = dump_trajectory {
        let cfg = oracle::IntegrationConfig::auto(&ctx.resolved.sys, &ctx.resolved.drive);
        let (_, points) = oracle::relax_traced(
            oracle::MeanFieldState::ZERO,
            &ctx.resolved.sys,
            &ctx.resolved.drive,
            &cfg,
            64,
        )?;
        output::write_trajectory_csv(traj_path, "oracle", &ctx.config, &points)?;
        println!("wrote {} ({} points)", traj_path.display(), points.len());
    }
    if !report.all_passed() {
        return Err(CliError::Numerical(format!(
            "{} oracle checks failed",
            report.failures.len()
        )));
    }
    Ok(())
}

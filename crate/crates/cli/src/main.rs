//! `superdir`: synthesis, sweeps, tables and composite patterns from a TOML design.

mod config;
mod svg;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use superdirective::composite::{composite_metrics, CompositeArray, CompositePattern};
use superdirective::fmt::sig6;
use superdirective::geometry::{make_uca, CarrierContext, SensorArray};
use superdirective::metrics::{
    sample_azimuth_cut, DirectivityMatrices, PatternGrid, PatternSource, WeightedArray,
};
use superdirective::par::{map_slice, Execution};
use superdirective::sweep::{run_sweep, SweepPoint};
use superdirective::synthesis::{
    radius_for_rein, region_grid, synthesize, SynthesisResult, SynthesisStatus,
};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(#[from] superdirective::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use superdirective::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Core(e) => match e {
                E::InvalidGeometry(_)
                | E::InvalidCarrier(_)
                | E::InvalidDirection(_)
                | E::InvalidConfig(_)
                | E::LengthMismatch { .. } => 2,
                E::InfeasibleBall { .. }
                | E::OverConstrained { .. }
                | E::BracketFailure(_)
                | E::EmptySidelobeRegion => 3,
                _ => 4,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "superdir",
    version,
    about = "Super-directive circular array synthesis"
)]
struct Cli {
    /// TOML design file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Starting quadrature, e.g. 64x128.
    #[arg(long, global = true, value_name = "NTHETAxNPHI")]
    quadrature: Option<String>,
    /// Pattern grid step in degrees.
    #[arg(long, global = true, value_name = "DEG")]
    grid: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one design: result.json, pattern.csv, pattern.svg.
    Synth {
        /// Carrier in MHz; the first configured frequency by default.
        #[arg(long)]
        f_mhz: Option<f64>,
        /// Also dump A and B to matrices.json.
        #[arg(long)]
        matrices: bool,
    },
    /// Maximum directivity and REIN over the [sweep] grid: sweep.csv.
    Sweep,
    /// Synthesize every configured frequency: table2.csv.
    Table2,
    /// Tile the synthesized sub-array along a line: composite_pattern.csv and a polar SVG.
    Compose {
        #[arg(long)]
        f_mhz: Option<f64>,
    },
    /// Radius at which the maximum-directivity weight reaches a REIN floor.
    RadiusForRein {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        f_mhz: Option<f64>,
        /// Floor in dB; the configured floor for the frequency by default.
        #[arg(long, allow_negative_numbers = true)]
        epsilon_db: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(q) = &cli.quadrature {
        cfg.override_quadrature(q)?;
    }
    if let Some(g) = cli.grid {
        cfg.grid_deg = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = load(&cli)?;
    fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Synth { f_mhz, matrices } => cmd_synth(&cfg, &cli.out, f_mhz, matrices),
        Command::Sweep => cmd_sweep(&cfg, &cli.out),
        Command::Table2 => cmd_table2(&cfg, &cli.out),
        Command::Compose { f_mhz } => cmd_compose(&cfg, &cli.out, f_mhz),
        Command::RadiusForRein {
            n,
            f_mhz,
            epsilon_db,
        } => cmd_radius(&cfg, &cli.out, n, f_mhz, epsilon_db),
    }
}

fn design_array(cfg: &RunConfig) -> Result<SensorArray, CliError> {
    Ok(make_uca(
        cfg.n,
        cfg.radius_m,
        cfg.rotation_deg.to_radians(),
    )?)
}

fn carrier(f_mhz: f64) -> Result<CarrierContext, CliError> {
    CarrierContext::from_mhz(f_mhz).map_err(|e| CliError::Config(format!("f_mhz: {e}")))
}

fn status_code(status: SynthesisStatus) -> u8 {
    if status == SynthesisStatus::Converged {
        0
    } else {
        3
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_grid(
    dir: &Path,
    name: &str,
    grid: &PatternGrid,
    reference: num_complex::Complex64,
) -> Result<(), CliError> {
    let mut out = BufWriter::new(fs::File::create(dir.join(name))?);
    grid.write_csv(&mut out, reference)?;
    out.flush()?;
    Ok(())
}

fn synth_one(
    cfg: &RunConfig,
    f_mhz: f64,
) -> Result<(SensorArray, CarrierContext, SynthesisResult), CliError> {
    let array = design_array(cfg)?;
    let ctx = carrier(f_mhz)?;
    let result = synthesize(&array, &ctx, &cfg.synthesis(f_mhz)?)?;
    Ok((array, ctx, result))
}

fn cmd_synth(
    cfg: &RunConfig,
    out: &Path,
    f_mhz: Option<f64>,
    matrices: bool,
) -> Result<u8, CliError> {
    let f = f_mhz.unwrap_or(cfg.f_mhz[0]);
    let (array, ctx, r) = synth_one(cfg, f)?;
    let look = cfg.look()?;
    write_file(out, "result.json", &r.to_json())?;

    let src = WeightedArray {
        array: &array,
        ctx: &ctx,
        weights: &r.weights,
    };
    let main = src.response(&look);
    let grid = region_grid(
        &array,
        &ctx,
        &r.weights,
        &look,
        cfg.region,
        cfg.grid(),
        Execution::Parallel,
    );
    write_grid(out, "pattern.csv", &grid, main)?;
    let cut = sample_azimuth_cut(&src, look.theta(), cfg.grid().phi_step, Execution::Parallel);
    let title = format!(
        "N = {}, r = {} m, {} MHz",
        cfg.n,
        sig6(cfg.radius_m),
        sig6(f)
    );
    write_file(
        out,
        "pattern.svg",
        &svg::polar_svg(&cut, main.norm(), look.phi(), &title),
    )?;
    if matrices {
        let mats = DirectivityMatrices::build(&array, &ctx, &look, &cfg.quadrature_spec()?)?;
        write_file(out, "matrices.json", &mats.to_json())?;
    }

    println!(
        "status {}  f {} MHz  D {} dB  gamma {} dB  eps_final {} dB  worst sidelobe {} dB",
        r.status.as_str(),
        sig6(f),
        sig6(r.directivity_db),
        sig6(r.gamma_db),
        sig6(r.epsilon_final_db),
        r.worst_sidelobe_db.map_or("none".into(), sig6)
    );
    if r.status != SynthesisStatus::Converged {
        eprintln!("synthesis ended with status {}", r.status.as_str());
    }
    Ok(status_code(r.status))
}

fn cmd_table2(cfg: &RunConfig, out: &Path) -> Result<u8, CliError> {
    let runs = map_slice(Execution::Parallel, &cfg.f_mhz, |&f| synth_one(cfg, f));
    let mut csv = String::from("f_MHz,D_dB,gamma_dB\n");
    let mut code = 0;
    for (f, run) in cfg.f_mhz.iter().zip(runs) {
        let (_, _, r) = run?;
        csv.push_str(&format!(
            "{},{},{}\n",
            sig6(*f),
            sig6(r.directivity_db),
            sig6(r.gamma_db)
        ));
        println!(
            "{} MHz  {}  D {} dB  gamma {} dB",
            sig6(*f),
            r.status.as_str(),
            sig6(r.directivity_db),
            sig6(r.gamma_db)
        );
        code = code.max(status_code(r.status));
    }
    write_file(out, "table2.csv", &csv)?;
    Ok(code)
}

fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<u8, CliError> {
    let ns = cfg.sweep.n.clone().unwrap_or_else(|| vec![cfg.n]);
    let freqs = cfg
        .sweep
        .f_mhz
        .clone()
        .unwrap_or_else(|| vec![cfg.f_mhz[0]]);
    let mut points = Vec::new();
    for &n in &ns {
        for &f in &freqs {
            let lambda = carrier(f)?.wavelength();
            let radii: Vec<f64> = match (&cfg.sweep.radius_m, &cfg.sweep.r_over_lambda) {
                (Some(r), _) => r.clone(),
                (None, Some(x)) => x.iter().map(|x| x * lambda).collect(),
                (None, None) => vec![cfg.radius_m],
            };
            points.extend(radii.into_iter().map(|radius_m| SweepPoint {
                n,
                radius_m,
                f_mhz: f,
            }));
        }
    }
    let rows = run_sweep(
        &points,
        &cfg.look()?,
        &cfg.quadrature_spec()?,
        Execution::Parallel,
    );
    let mut csv = String::from("n,radius_m,r_over_lambda,f_MHz,Dmax_dB,gamma_dB,status\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            sig6(r.radius_m),
            sig6(r.r_over_lambda),
            sig6(r.f_mhz),
            sig6(r.dmax_db),
            sig6(r.gamma_db),
            r.status
        ));
    }
    write_file(out, "sweep.csv", &csv)?;
    let bad = rows.iter().filter(|r| r.status != "ok").count();
    println!("{} points, {} not ok", rows.len(), bad);
    Ok(0)
}

fn cmd_compose(cfg: &RunConfig, out: &Path, f_mhz: Option<f64>) -> Result<u8, CliError> {
    let f = f_mhz.unwrap_or(cfg.f_mhz[0]);
    let (array, ctx, sub) = synth_one(cfg, f)?;
    let look = cfg.look()?;
    let mut comp = CompositeArray::new(
        array,
        sub.weights.clone(),
        cfg.composite.count,
        cfg.composite.spacing_m,
        cfg.composite.axis,
    )?;
    if let Some(e) = cfg.composite.excitation_weights() {
        comp = comp.with_excitations(e)?;
    }
    let total = CompositePattern::new(&comp, &ctx);
    let main = total.response(&look);
    let grid = region_grid(
        &total.array,
        &ctx,
        &total.weights,
        &look,
        cfg.region,
        cfg.grid(),
        Execution::Parallel,
    );
    write_grid(out, "composite_pattern.csv", &grid, main)?;
    let cut = sample_azimuth_cut(
        &total,
        look.theta(),
        cfg.grid().phi_step,
        Execution::Parallel,
    );
    let title = format!(
        "{} x {} sensors, {} m spacing, {} MHz",
        comp.count(),
        cfg.n,
        sig6(comp.spacing()),
        sig6(f)
    );
    write_file(
        out,
        "composite_pattern_polar.svg",
        &svg::polar_svg(&cut, main.norm(), look.phi(), &title),
    )?;
    let m = composite_metrics(
        &comp,
        &ctx,
        &look,
        &cfg.quadrature_spec()?,
        Execution::Parallel,
    )?;
    write_file(
        out,
        "composite.json",
        &serde_json::to_string_pretty(&comp).expect("layout serializes"),
    )?;
    println!(
        "sub-array {}  composite D {} dB  gamma {} dB  ({} sensors)",
        sub.status.as_str(),
        sig6(m.directivity_db),
        sig6(m.gamma_db),
        total.array.len()
    );
    Ok(status_code(sub.status))
}

fn cmd_radius(
    cfg: &RunConfig,
    out: &Path,
    n: Option<usize>,
    f_mhz: Option<f64>,
    epsilon_db: Option<f64>,
) -> Result<u8, CliError> {
    let n = n.unwrap_or(cfg.n);
    let f = f_mhz.unwrap_or(cfg.f_mhz[0]);
    let eps = match epsilon_db {
        Some(e) => e,
        None => cfg.epsilon_for(f)?,
    };
    let ctx = carrier(f)?;
    let sol = radius_for_rein(n, &ctx, eps, &cfg.look()?, &cfg.radius_search()?)?;
    write_file(
        out,
        "radius_for_rein.json",
        &serde_json::to_string_pretty(&sol).expect("solution serializes"),
    )?;
    println!(
        "N {}  f {} MHz  eps {} dB  r {} m ({} lambda)  gamma {} dB  Dmax {} dB",
        n,
        sig6(f),
        sig6(eps),
        sig6(sol.radius_m),
        sig6(sol.r_over_lambda),
        sig6(sol.gamma_db),
        sig6(sol.dmax_db)
    );
    Ok(0)
}

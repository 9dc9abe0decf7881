//! `spd`: near-field SPD pipelines from the command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error,
//! 3 convergence failure, 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spd_core::experiments::{
    run_fig1, run_fig2, run_fig3, run_scf, run_spd, write_figure, ExperimentConfig, FigureOutput,
    Model,
};
use spd_core::jellium::ScfSolution;
use spd_core::units::UNITS;
use spd_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "spd",
    version,
    about = "Thermal near-field spectral power density of metal surfaces and films"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Frequencies, comma separated: fractions of ω_p with a `wp` suffix
    /// (0.1wp) or plain values in rad/s.
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Log-spaced heights "min:max:count" in nm, or a comma separated list.
    #[arg(long = "h-range", global = true, value_name = "RANGE")]
    h_range: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Solution file written by `spd scf`.
    #[arg(long = "scf-file", global = true, value_name = "PATH")]
    scf_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the jellium slab and write scf.json.
    Scf,
    /// Hydrodynamic and local SPD above a half-space.
    Fig1,
    /// Bulk versus vacuum SPD relative to the black-body density.
    Fig2,
    /// Film SPD with box states, RPA screening and the local baseline.
    Fig3,
    /// Single-model SPD over the sweep.
    Spd {
        #[arg(long, value_parser = ["local", "hydro", "bulk", "film-ibm", "film-rpa"])]
        model: String,
    },
}

fn parse_omegas(text: &str) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let mut fractions = Vec::new();
    let mut rad = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Config(format!("cannot parse frequency {item:?}"));
        if let Some(f) = item.strip_suffix("wp") {
            fractions.push(f.trim().parse::<f64>().map_err(|_| bad())?);
        } else {
            rad.push(item.parse::<f64>().map_err(|_| bad())?);
        }
    }
    if fractions.is_empty() == rad.is_empty() {
        return Err(Error::Config(
            "--omega takes either ω_p fractions (0.1wp) or rad/s values, not both or neither"
                .into(),
        ));
    }
    Ok((fractions, rad))
}

fn apply_overrides(cfg: &mut ExperimentConfig, common: &Common) -> Result<(), Error> {
    if let Some(dir) = &common.out {
        cfg.output.directory = dir.clone();
    }
    if let Some(text) = &common.omega {
        let (f, r) = parse_omegas(text)?;
        cfg.sweep.omega_fractions = (!f.is_empty()).then_some(f);
        cfg.sweep.omega_rad_per_s = (!r.is_empty()).then_some(r);
    }
    if let Some(text) = &common.h_range {
        let bad = || Error::Config(format!("cannot parse --h-range {text:?}"));
        let parts: Vec<&str> = text.split(':').collect();
        cfg.sweep.h_nm = None;
        cfg.sweep.h_min_nm = None;
        cfg.sweep.h_max_nm = None;
        cfg.sweep.h_count = None;
        match parts.as_slice() {
            [a, b, n] => {
                cfg.sweep.h_min_nm = Some(a.trim().parse().map_err(|_| bad())?);
                cfg.sweep.h_max_nm = Some(b.trim().parse().map_err(|_| bad())?);
                cfg.sweep.h_count = Some(n.trim().parse().map_err(|_| bad())?);
            }
            [list] => {
                let hs = list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                cfg.sweep.h_nm = Some(hs);
            }
            _ => return Err(bad()),
        }
    }
    cfg.validate()
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) => 2,
        Error::NotConverged { .. } | Error::Quadrature { .. } => 3,
        Error::Io { .. } | Error::Format { .. } => 4,
        _ => 1,
    }
}

fn report(out: &FigureOutput, dir: &Path) -> Result<(), Error> {
    for p in write_figure(dir, out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let mut cfg = match &cli.common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.common)?;
    let dir = cfg.output.directory.clone();
    let scf = match &cli.common.scf_file {
        Some(p) => Some(ScfSolution::load(p)?),
        None => None,
    };
    match cli.command {
        Command::Scf => {
            let sol = run_scf(&cfg)?;
            std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            let path = dir.join("scf.json");
            sol.save(&path)?;
            println!("wrote {}", path.display());
            println!(
                "chemical potential  {:.6} eV",
                UNITS.hartree_to_ev(sol.chemical_potential)
            );
            println!("occupied subbands   {}", sol.occupied_count());
            println!("neutrality residual {:.3e}", sol.neutrality_residual);
            println!("iterations          {}", sol.iterations);
            sol.ensure_converged()
        }
        Command::Fig1 => report(&run_fig1(&cfg)?, &dir),
        Command::Fig2 => report(&run_fig2(&cfg)?, &dir),
        Command::Fig3 => report(&run_fig3(&cfg, scf.as_ref())?, &dir),
        Command::Spd { model } => {
            let m: Model = model.parse()?;
            report(&run_spd(&cfg, m, scf.as_ref())?, &dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

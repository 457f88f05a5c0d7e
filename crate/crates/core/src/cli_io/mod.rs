//! Configuration, persistence and the command-line entry point.
//!
//! Exit codes: 0 success, 1 invalid input or a failed check, 2 blow-up.

pub mod config;
pub mod records;
pub mod snapshot;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{load_config, parse_config, RunConfig};
pub use records::{format_records, parse_records, read_records, write_records};
pub use snapshot::Snapshot;

use crate::constitutive::{jacobian_fd_sweep, margin_sweep};
use crate::diagnostics::{uniqueness_experiment, GrowthRecord, Perturbation};
use crate::error::{Error, Result};
use crate::grid::make_grid;
use crate::oracle::{oracle_suite, MAX_ORACLE_N};
use crate::stepper::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;

const MARGIN_TOLERANCE: f64 = 1e-12;
const FD_TOLERANCE: f64 = 1e-6;
const ORACLE_TOLERANCE: f64 = 1e-11;
const HALVING_TOLERANCE: f64 = 0.01;

#[derive(Parser, Debug)]
#[command(
    name = "gsgf",
    version,
    about = "Spectral solver for shear-dependent second-grade fluids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a configuration, writing records and snapshots to its output_dir.
    Run { config: PathBuf },
    /// Sample the stress-law inequalities and check the Jacobian against finite differences.
    VerifyConstitutive {
        config: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1_000)]
        fd_samples: usize,
        /// Tensor entries are drawn from [-bound, bound].
        #[arg(long, default_value_t = 10.0)]
        bound: f64,
    },
    /// Twin runs at delta and delta/2 from perturbed initial data.
    Uniqueness {
        config: PathBuf,
        #[arg(long)]
        delta: f64,
    },
    /// Compare the spectral pipeline with brute-force oracles on a small grid.
    Check {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        fields: usize,
    },
}

/// Parses `args` (program name first) and runs the chosen command; returns the exit code.
pub fn main_run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILED } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::VerifyConstitutive {
            config,
            samples,
            fd_samples,
            bound,
        } => cmd_verify_constitutive(&config, samples, fd_samples, bound),
        Command::Uniqueness { config, delta } => cmd_uniqueness(&config, delta),
        Command::Check { config, fields } => cmd_check(&config, fields),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOWUP,
        _ => EXIT_FAILED,
    }
}

fn load(path: &Path) -> Result<RunConfig> {
    let cfg = load_config(path)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_run(path: &Path) -> Result<i32> {
    // the simulation repeats the configuration warnings in its own output
    let cfg = load_config(path)?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let (out, failure) = match run(&grid, &params) {
        Ok(out) => (out, None),
        Err(aborted) => match aborted.partial {
            Some(partial) => (partial, Some(aborted.error)),
            None => return Err(aborted.error),
        },
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    write_records(&out.records, &cfg.records_path())?;
    for (step, snap) in &out.snapshots {
        snap.write(cfg.output_dir.join(format!("snapshot_{step:08}.bin")))?;
    }
    if let Some(e) = failure {
        eprintln!("error: {e}");
        eprintln!("partial records written to {}", cfg.records_path().display());
        return Ok(exit_code(&e));
    }
    let last = out.records.last();
    println!(
        "t = {:.6}  dt = {:.3e}  steps recorded = {}  snapshots = {}",
        out.state.t,
        out.dt,
        out.records.len(),
        out.snapshots.len()
    );
    if let Some(rec) = last {
        println!("E = {:.10e}  energy residual = {:.3e}", rec.energy, rec.energy_residual);
    }
    Ok(EXIT_OK)
}

fn cmd_verify_constitutive(path: &Path, samples: usize, fd_samples: usize, bound: f64) -> Result<i32> {
    let cfg = load(path)?;
    let law = cfg.law()?;
    let c = law.derived_constants();
    println!("mu0 = {}  mu1 = {}  r = {}  dim = {}", law.mu0, law.mu1, law.r, cfg.dim);
    println!(
        "c0 = {:.6e}  c1 = {:.6e}  c2 = {:.6e}  c3 = {:.6e}  c4 = {:.6e}  c3' = {:.6e}",
        c.c0, c.c1, c.c2, c.c3, c.c4, c.c3_monotone
    );
    let rep = margin_sweep(&law, cfg.dim, samples, bound, cfg.seed);
    let fd = jacobian_fd_sweep(&law, cfg.dim, fd_samples, bound, 1e-6, cfg.seed.wrapping_add(1));
    let rows = [
        ("jacobian lower", rep.jacobian_lower),
        ("jacobian upper", rep.jacobian_upper),
        ("coercivity", rep.coercivity),
        ("growth", rep.growth),
        ("monotonicity", rep.monotonicity),
    ];
    for (name, m) in rows {
        println!(
            "{:<16} min normalized margin {:+.3e}  {}",
            name,
            m,
            verdict(m >= -MARGIN_TOLERANCE)
        );
    }
    println!(
        "monotone ratio   min {:.6e} vs c3' {:.6e}",
        rep.min_monotonicity_ratio, c.c3_monotone
    );
    let fd_ok = fd < FD_TOLERANCE;
    println!("jacobian fd      max rel error {fd:.3e}  {}", verdict(fd_ok));
    let ok = rep.all_hold(MARGIN_TOLERANCE) && fd_ok;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn write_growth(g: &GrowthRecord, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "t,W,F,int_F")?;
    for i in 0..g.t.len() {
        writeln!(
            f,
            "{:?},{:?},{:?},{:?}",
            g.t[i], g.w[i], g.factor[i], g.factor_integral[i]
        )?;
    }
    f.flush()?;
    Ok(())
}

fn cmd_uniqueness(path: &Path, delta: f64) -> Result<i32> {
    let cfg = load(path)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::param(format!("--delta must be positive, got {delta}")));
    }
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let dir = Perturbation::Random {
        seed: cfg.seed.wrapping_add(0x5eed),
    };
    let full = uniqueness_experiment(&grid, &params, delta, &dir)?;
    let half = uniqueness_experiment(&grid, &params, delta / 2.0, &dir)?;
    let c = full
        .gronwall_constant()
        .ok_or_else(|| Error::param("W(0) = 0; nothing to calibrate"))?;
    let excess = half.envelope_excess(c);
    let ratio = full.final_amplitude() / half.final_amplitude();
    std::fs::create_dir_all(&cfg.output_dir)?;
    let out = cfg.output_dir.join("growth.csv");
    write_growth(&full, &out)?;

    println!("delta = {delta:e}  steps = {}", full.t.len() - 1);
    println!("calibrated c = {c:.6e}");
    println!("W(0) = {:.6e}  W(T) = {:.6e}", full.w[0], full.w.last().unwrap());
    let env_ok = excess <= HALVING_TOLERANCE;
    println!("envelope excess at delta/2 {excess:+.3e}  {}", verdict(env_ok));
    let halving_ok = (ratio / 2.0 - 1.0).abs() <= HALVING_TOLERANCE;
    println!("sqrt W(T) ratio delta : delta/2 = {ratio:.6}  {}", verdict(halving_ok));
    println!("growth history written to {}", out.display());
    Ok(if env_ok && halving_ok { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_check(path: &Path, fields: usize) -> Result<i32> {
    let cfg = load(path)?;
    let n = cfg.n.min(if cfg.dim == 2 { MAX_ORACLE_N } else { 8 });
    let grid = make_grid(cfg.dim, n)?;
    let rep = oracle_suite(&grid, fields, cfg.seed)?;
    println!("oracle suite on {n}^{} with {fields} fields", cfg.dim);
    for (name, e) in [
        ("convect", rep.convect),
        ("stretch", rep.stretch),
        ("gradient", rep.gradient),
        ("divergence", rep.divergence),
        ("leray", rep.leray),
    ] {
        println!("{name:<10} {e:.3e}  {}", verdict(e < ORACLE_TOLERANCE));
    }
    Ok(if rep.worst() < ORACLE_TOLERANCE {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

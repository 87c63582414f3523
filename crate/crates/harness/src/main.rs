use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqg_core::criteria::{Outcome, TheoremId};
use sqg_harness::config::{RunConfig, OUTPUT_ROOT_VAR};
use sqg_harness::{plots, run, selfcheck};

#[derive(Parser)]
#[command(name = "sqg", version, about = "Dissipative SQG experiments and frequency-sparseness criteria")]
struct Cli {
    /// Root directory for runs whose config names no output.
    #[arg(long, global = true, env = OUTPUT_ROOT_VAR)]
    output_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured data and write a run directory.
    Simulate { config: PathBuf },
    /// Integrate a perturbed pair and evaluate both uniqueness criteria.
    Twin { config: PathBuf },
    /// Evaluate one criterion on a run directory.
    Criteria {
        run_dir: PathBuf,
        #[arg(long, value_parser = parse_theorem)]
        theorem: TheoremId,
    },
    /// Estimate C0 on the configured family.
    Calibrate { config: PathBuf },
    /// Render SVG plots from a run directory.
    Plot { run_dir: PathBuf },
    /// Run the acceptance checks.
    Check {
        /// Only these criteria (1-10); all when omitted.
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    TheoremId::parse(s).ok_or_else(|| format!("'{s}' is not one of 1, 2, 3, 4, 5, prop"))
}

fn load(config: &Path, root: Option<&Path>) -> sqg_harness::Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(config)?;
    let dir = cfg.output_dir(Some(config), root);
    Ok((cfg, dir))
}

fn outcome_code(outcome: Outcome) -> u8 {
    if outcome == Outcome::Vacuous {
        4
    } else {
        0
    }
}

fn execute(cli: Cli) -> sqg_harness::Result<u8> {
    let root = cli.output_root.as_deref();
    match cli.command {
        Command::Simulate { config } => {
            let (cfg, dir) = load(&config, root)?;
            let out = run::simulate(&cfg, &dir)?;
            println!("wrote {} ({} probes, {} steps)", dir.display(), out.record.entries.len(), out.record.steps);
            if let Some(flag) = out.record.blowup {
                println!("blow-up flag at t = {} ({:?})", flag.time, flag.reason);
            }
            for r in &out.reports {
                println!("criterion {}: {:?}", r.theorem.label(), r.outcome);
            }
            if let Some(f) = out.record.failure {
                eprintln!(
                    "integrator failure at t = {} (step {}); last good probe at t = {}",
                    f.time, f.step, f.last_good_time
                );
                return Ok(3);
            }
            Ok(0)
        }
        Command::Twin { config } => {
            let (cfg, dir) = load(&config, root)?;
            let out = run::twin(&cfg, &dir)?;
            println!("wrote {} ({} probes, {} steps)", dir.display(), out.record.rows.len(), out.record.steps);
            for r in &out.reports {
                println!("criterion {}: {:?}", r.theorem.label(), r.outcome);
            }
            if let Some((member, f)) = out.record.diverged {
                eprintln!("{member:?} member diverged at t = {} (step {})", f.time, f.step);
                return Ok(3);
            }
            Ok(0)
        }
        Command::Criteria { run_dir, theorem } => {
            let report = run::evaluate(&run_dir, theorem)?;
            println!("{}", report.to_json());
            Ok(outcome_code(report.outcome))
        }
        Command::Calibrate { config } => {
            let (cfg, dir) = load(&config, root)?;
            let out = run::calibrate(&cfg, &dir)?;
            let c = &out.calibration;
            println!("C0 = {} (run {})", c.c0, out.run_id);
            match c.fitted_slope {
                Some(f) => println!("doubling-time slope {f} against predicted {}", c.predicted_slope),
                None => println!("fewer than two members doubled within the cap; slope not fitted"),
            }
            Ok(0)
        }
        Command::Plot { run_dir } => {
            let summary = plots::emit_plots(&run_dir)?;
            if let Some(msg) = &summary.message {
                println!("{msg}");
            }
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            Ok(0)
        }
        Command::Check { only } => {
            let scratch = root.map_or_else(
                || std::env::var_os(OUTPUT_ROOT_VAR).map_or_else(|| PathBuf::from("runs"), PathBuf::from),
                Path::to_path_buf,
            );
            let scratch = scratch.join("check");
            let ids: Vec<u32> = if only.is_empty() {
                selfcheck::CRITERIA.iter().map(|c| c.0).collect()
            } else {
                only
            };
            let results: Vec<_> = ids
                .into_iter()
                .map(|id| {
                    let r = selfcheck::run_criterion(id, &scratch);
                    println!("{r}");
                    r
                })
                .collect();
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `rtbp`: build generating-orbit tables of the planar restricted
//! three-body problem, continue them to positive mass ratios, dump
//! trajectories and run the verification suite.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rtbp_cli::commands::{self, DumpRequest};
use rtbp_cli::config::{Mode, RunConfig, Scan};
use rtbp_cli::verify;
use rtbp_core::dynamics::Frame;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rtbp", version, about = "Generating orbits of the planar restricted three-body problem and their continuation to positive mass ratios", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a table of generating arcs (closed-form side only).
    GenTable(TableArgs),
    /// Continue a family of generating arcs to positive mass ratios.
    Continue(ContinueArgs),
    /// Dump one orbit as plot-ready CSV plus a metadata sidecar.
    OrbitDump(DumpArgs),
    /// Run the acceptance suite and report one line per criterion.
    Verify,
}

#[derive(Args)]
struct TableArgs {
    /// Family selector: fixed-theta-scan | fixed-theta | fixed-b | fixed-energy.
    #[arg(long)]
    mode: Option<Mode>,
    /// Collision angle in degrees: a value or a start:stop:step scan.
    #[arg(long = "theta-deg")]
    theta_deg: Option<Scan>,
    /// Revolution count of the secondary: a value or a start:stop range.
    #[arg(long = "I")]
    revs: Option<Scan>,
    /// Semi-minor axis (fixed-b mode).
    #[arg(long)]
    b: Option<f64>,
    /// Target rotating-frame energy (fixed-energy mode).
    #[arg(long)]
    c0: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Load a flat key = value configuration file instead of flags.
    #[arg(long, conflicts_with_all = ["mode", "theta_deg", "revs", "b", "c0"])]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ContinueArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Mass ratios, comma separated (e.g. 0.000953,0.012143).
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    /// Rotating-frame convention: m1 | barycentric.
    #[arg(long, default_value = "barycentric")]
    frame: String,
    /// Integrator relative tolerance.
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    /// Integrator absolute tolerance.
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Write per-cell certificates (winding data, gaps) as JSON here.
    #[arg(long)]
    details: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    /// Collision angle in degrees.
    #[arg(long = "theta-deg")]
    theta_deg: f64,
    /// Revolution count of the secondary.
    #[arg(long = "I", default_value_t = 1)]
    revs: u32,
    /// Mass ratio; 0 dumps the generating orbit itself.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Rotating-frame convention: m1 | barycentric.
    #[arg(long, default_value = "barycentric")]
    frame: String,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Samples per half period.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Output prefix: writes <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out: PathBuf,
}

fn parse_frame(s: &str) -> Result<Frame> {
    match s {
        "m1" => Ok(Frame::M1Centered),
        "barycentric" => Ok(Frame::Barycentric),
        other => bail!("unknown frame '{other}' (expected m1 or barycentric)"),
    }
}

fn config_from_table_args(args: &TableArgs) -> Result<RunConfig> {
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = RunConfig::from_flat(&text)?;
        if let Some(out) = &args.out {
            cfg.out = Some(out.display().to_string());
        }
        return Ok(cfg);
    }
    let Some(mode) = args.mode else {
        bail!("either --mode or --config is required");
    };
    let cfg = RunConfig {
        mode,
        theta_deg: args.theta_deg,
        revs: args.revs.unwrap_or(Scan::scalar(1.0)),
        b: args.b,
        c0: args.c0,
        out: args.out.as_ref().map(|p| p.display().to_string()),
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(table: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, table).with_context(|| format!("writing {path}"))?,
        None => print!("{table}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenTable(args) => {
            let cfg = config_from_table_args(&args)?;
            let table = commands::gen_table(&cfg)?;
            emit(&table, cfg.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Continue(args) => {
            let mut cfg = config_from_table_args(&args.table)?;
            if !args.mu.is_empty() {
                cfg.mu = args.mu.clone();
            }
            cfg.frame = parse_frame(&args.frame)?;
            cfg.rtol = args.rtol;
            cfg.atol = args.atol;
            cfg.validate()?;
            let output = commands::continue_table(&cfg)?;
            emit(&output.table, cfg.out.as_deref())?;
            if let Some(path) = &args.details {
                fs::write(path, serde_json::to_string_pretty(&output.details)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OrbitDump(args) => {
            let req = DumpRequest {
                theta_deg: args.theta_deg,
                revs: args.revs,
                mu: args.mu,
                frame: parse_frame(&args.frame)?,
                rtol: args.rtol,
                atol: args.atol,
                samples: args.samples.max(8),
            };
            let out = commands::orbit_dump(&req)?;
            let csv_path = args.out.with_extension("csv");
            let json_path = args.out.with_extension("json");
            fs::write(&csv_path, &out.csv)
                .with_context(|| format!("writing {}", csv_path.display()))?;
            fs::write(&json_path, serde_json::to_string_pretty(&out.metadata)?)
                .with_context(|| format!("writing {}", json_path.display()))?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let criteria = verify::run_all();
            for c in &criteria {
                println!("{}", c.report_line());
            }
            if verify::all_passed(&criteria) {
                println!("all {} criteria passed", criteria.len());
                Ok(ExitCode::SUCCESS)
            } else {
                let failed = criteria.iter().filter(|c| !c.passed).count();
                println!("{failed} criteria FAILED");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            // Configuration and usage problems exit 2, like flag errors.
            ExitCode::from(2)
        }
    }
}

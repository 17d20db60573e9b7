use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freeboundary::reports::{run, Operation, RunConfig, OUT_ENV};

#[derive(Parser)]
#[command(
    name = "freeboundary",
    version,
    about = "Reflect, extend and verify free boundary minimal surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflect a surface across one free boundary
    Reflect(Flags),
    /// Reflect repeatedly, alternating the two free boundaries
    Extend(Flags),
    /// Run the full check suite; exits non-zero if any check fails
    Verify(Flags),
    /// Write the curvature report without asserting
    Report(Flags),
    /// Write an OBJ mesh and a CSV grid of the (extended) surface
    ExportMesh(Flags),
}

#[derive(Args)]
struct Flags {
    /// Catalog selector (critical-catenoid, noncritical-catenoid:0.9, equatorial-disk, file:PATH, ...)
    #[arg(long)]
    surface: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// Grid resolution as NXxNY
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tol_steklov: Option<f64>,
    #[arg(long)]
    match_tol: Option<f64>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Close the periodic direction of exported meshes
    #[arg(long)]
    wrap: bool,
    /// Comma-separated export formats: obj, csv
    #[arg(long)]
    export: Option<String>,
    /// Edge used by `reflect` (gamma1 or gamma2)
    #[arg(long)]
    edge: Option<String>,
    /// `key = value` config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build(op: Operation, f: Flags) -> freeboundary::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &f.config {
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
    }
    cfg.operation = op;
    let overrides = [
        ("surface", f.surface),
        ("steps", f.steps.map(|v| v.to_string())),
        ("grid", f.grid),
        ("steklov_tol", f.tol_steklov.map(|v| v.to_string())),
        ("match_tol", f.match_tol.map(|v| v.to_string())),
        ("quad_tol", f.quad_tol.map(|v| v.to_string())),
        ("threads", f.threads.map(|v| v.to_string())),
        ("seed", f.seed.map(|v| v.to_string())),
        ("export", f.export),
        ("edge", f.edge),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    if let Some(out) = f.out {
        cfg.out = out;
    }
    if f.wrap {
        cfg.wrap = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (op, flags) = match cli.command {
        Command::Reflect(f) => (Operation::Reflect, f),
        Command::Extend(f) => (Operation::Extend, f),
        Command::Verify(f) => (Operation::Verify, f),
        Command::Report(f) => (Operation::Report, f),
        Command::ExportMesh(f) => (Operation::ExportMesh, f),
    };
    let outcome = build(op, flags).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(o) => {
            for c in o
                .report
                .checks
                .iter()
                .filter(|c| c.status == freeboundary::reports::Status::Fail)
            {
                eprintln!("FAIL {} = {:e} ({})", c.name, c.value, c.note);
            }
            for p in &o.files {
                println!("{}", p.display());
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

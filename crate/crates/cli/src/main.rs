//! `cliffrac`: fractal hypersurfaces, Marcinkiewicz exponents and jump problems from the command line.

mod commands;
mod config;
mod exit;
mod plot;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Params;
use exit::{Failure, EXIT_PARAMS};

#[derive(Parser)]
#[command(name = "cliffrac", version, about = "Clifford analysis on fractal hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a surface spec and its voxelisation.
    GenSurface(Params),
    /// Box-counting dimension and Marcinkiewicz exponents, with CSV curves and SVG fits.
    Estimate(Params),
    /// Solve a jump problem and verify the boundary jumps.
    Solve(Params),
    /// Re-run the jump verification with the given probes, offset and tolerance.
    Verify(Params),
    /// Summarise the reports in `--out`.
    Report(Params),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, params) = match cli.command {
        Command::GenSurface(p) => ("gen-surface", p),
        Command::Estimate(p) => ("estimate", p),
        Command::Solve(p) => ("solve", p),
        Command::Verify(p) => ("verify", p),
        Command::Report(p) => ("report", p),
    };
    let p = params.resolve()?;
    if let Some(t) = p.threads {
        if t == 0 {
            return Err(Failure::Params("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Params(format!("thread pool: {e}")))?;
    }
    let outcome = match name {
        "gen-surface" => commands::gen_surface(&p)?,
        "estimate" => commands::estimate(&p)?,
        "solve" => commands::solve(&p)?,
        "verify" => commands::verify(&p)?,
        _ => commands::report(&p)?,
    };
    let dir = p.out_dir();
    let files = outcome.outputs.write(&dir)?;
    if p.json {
        let mut v = outcome.summary;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("command".into(), name.into());
            obj.insert("out".into(), dir.display().to_string().into());
            obj.insert("files".into(), files.into());
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("summary serialises"));
    } else {
        println!("{}", outcome.text);
        println!("wrote {} file(s) to {}", files.len(), dir.display());
    }
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARAMS as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code() as u8)
        }
    }
}

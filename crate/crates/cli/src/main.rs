use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use syz_cli::{run, threads_from_env, Command, RunConfig};

#[derive(Parser)]
#[command(name = "syz-skeleton", version, about = "Tropical, Morse-Bott, skeleton and ring-identity checks for z0...zp = 1 + u1 + ... + uq")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (JSON envelope, or SVG for `figure`); stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solver seed, overriding `solver.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the one-line summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Spine cells and chamber raster of the base plane.
    Spine,
    /// Amoeba and tailored-amoeba rasters with oracle cross-checks.
    Amoeba,
    /// Critical manifolds of the potential matched against the catalog.
    Critical,
    /// Homology of the glued skeleton and Mayer-Vietoris exactness.
    Skeleton,
    /// Exact coordinate-ring identities.
    Bside,
    /// SVG of the base plane with critical points (q = 2).
    Figure,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Spine => Command::Spine,
            Cmd::Amoeba => Command::Amoeba,
            Cmd::Critical => Command::Critical,
            Cmd::Skeleton => Command::Skeleton,
            Cmd::Bside => Command::Bside,
            Cmd::Figure => Command::Figure,
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.solver.seed = Some(seed);
        cfg.validate()?;
    }
    let threads = threads_from_env()?;
    if let Some(n) = threads {
        // Ignore failure: the global pool may already exist.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = run(cli.command.into(), &cfg, threads)?;
    let path = cli.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(&p, &out.text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", out.text),
    }
    if !cli.quiet {
        eprintln!("{}: {}", if out.passed { "ok" } else { "FAILED" }, out.summary);
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Driver for the `syz-skeleton` command-line tool: configuration, canonical
//! JSON result envelopes and SVG figures.

pub mod commands;
pub mod config;
pub mod envelope;
pub mod svg;

pub use commands::{run, Command, Output};
pub use config::RunConfig;
pub use envelope::ResultEnvelope;

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "SYZ_SKELETON_THREADS";

/// Thread cap from the environment; `None` when unset.
pub fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => anyhow::bail!("{THREADS_VAR} must be a positive integer, got {v:?}"),
        },
    }
}

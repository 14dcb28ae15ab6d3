//! Diagnostics go to stderr only, gated by `NBARRIER_LOG`; stdout stays
//! machine-readable.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Quiet,
    Info,
    Debug,
}

static LEVEL: OnceLock<Level> = OnceLock::new();

/// Read `NBARRIER_LOG` once. Unset means `info`; anything else must be one
/// of the three documented values.
pub fn init() -> Result<(), String> {
    let level = match std::env::var("NBARRIER_LOG") {
        Err(_) => Level::Info,
        Ok(v) => match v.as_str() {
            "quiet" => Level::Quiet,
            "info" => Level::Info,
            "debug" => Level::Debug,
            other => {
                return Err(format!(
                    "NBARRIER_LOG must be quiet, info, or debug (got {other:?})"
                ))
            }
        },
    };
    let _ = LEVEL.set(level);
    Ok(())
}

fn enabled(at: Level) -> bool {
    LEVEL.get().copied().unwrap_or(Level::Info) >= at
}

pub fn info(msg: impl AsRef<str>) {
    if enabled(Level::Info) {
        eprintln!("{}", msg.as_ref());
    }
}

pub fn debug(msg: impl AsRef<str>) {
    if enabled(Level::Debug) {
        eprintln!("{}", msg.as_ref());
    }
}

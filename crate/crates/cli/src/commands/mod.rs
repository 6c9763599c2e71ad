//! One module per subcommand. Each turns a parsed config into payload files.

pub mod decay;
pub mod extract;
pub mod fig4;
pub mod fitres;
pub mod synthesize;
pub mod twotone;

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::cli::RunArgs;
use crate::config::{self, Loaded};
use crate::envelope::{utc_now, Envelope, RowError, ENVELOPE_FILE, TOOL, VERSION};
use crate::error::{CliError, Result, EXIT_FIT, EXIT_OK, EXIT_PARTIAL};
use crate::output::{render_json, write_atomic};

/// What a command produced.
pub struct Outcome {
    pub payload: serde_json::Value,
    /// `(file name, contents)` written under the output directory.
    pub files: Vec<(&'static str, Vec<u8>)>,
    pub errors: Vec<RowError>,
    /// Seed actually used, for commands that draw noise.
    pub seed: Option<u64>,
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| CliError::Io(format!("json: {e}")))
}

/// Loads the config, runs `f`, writes the payload files and the envelope.
pub fn dispatch<T, F>(command: &str, args: &RunArgs, f: F) -> i32
where
    T: DeserializeOwned,
    F: FnOnce(&Loaded<T>, Option<u64>) -> Result<Outcome>,
{
    let loaded = match config::load::<T>(&args.config) {
        Ok(l) => l,
        Err(e) => return report(&e),
    };
    let result = f(&loaded, args.seed);
    let written = match &result {
        Ok(out) => write_outcome(command, &loaded, out, &args.out_dir),
        Err(e) if e.exit_code() == EXIT_FIT => {
            let failed = Outcome {
                payload: serde_json::Value::Null,
                files: Vec::new(),
                errors: vec![RowError {
                    row: None,
                    message: e.to_string(),
                }],
                seed: args.seed,
            };
            write_outcome(command, &loaded, &failed, &args.out_dir)
        }
        Err(_) => Ok(()),
    };
    if let Err(e) = written {
        return report(&e);
    }
    match result {
        Ok(out) if out.errors.is_empty() => EXIT_OK,
        Ok(out) => {
            for e in &out.errors {
                eprintln!("warning: row {}: {}", e.row.unwrap_or(0), e.message);
            }
            EXIT_PARTIAL
        }
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn write_outcome<T>(command: &str, loaded: &Loaded<T>, out: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (name, bytes) in &out.files {
        write_atomic(&dir.join(name), bytes)?;
    }
    let envelope = Envelope {
        tool: TOOL,
        version: VERSION,
        command,
        config: &loaded.raw,
        seed: out.seed,
        timestamp_utc: utc_now(),
        payload: (!out.payload.is_null()).then(|| out.payload.clone()),
        errors: out.errors.clone(),
    };
    write_atomic(&dir.join(ENVELOPE_FILE), &render_json(&envelope)?)
}

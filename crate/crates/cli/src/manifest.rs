//! Run manifests: the command line, its parameters and hashes of every file read or written.

use std::path::Path;
use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Cli, CliError};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_entry(path: &Path, bytes: &[u8]) -> Value {
    json!({ "path": path.display().to_string(), "sha256": sha256_hex(bytes) })
}

pub fn write(path: &Path, cli: &Cli, output: &str, wall: Duration) -> Result<(), CliError> {
    let inputs = cli
        .inputs
        .iter()
        .map(|p| Ok(file_entry(p, &std::fs::read(p)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let out_path = cli.out.as_deref().unwrap_or(Path::new("-"));
    let args: Vec<String> = std::env::args().skip(1).collect();
    let manifest = json!({
        "args": args,
        "command": cli.verb.name(),
        "cut": cli.deg,
        "inputs": inputs,
        "instance": { "g": cli.g, "n": cli.n },
        "kind": "manifest",
        "outputs": [file_entry(out_path, output.as_bytes())],
        "pivot": format!("{:?}", cli.pivot).to_lowercase(),
        "seed": cli.seed,
        "strategy": cli.strategy.to_string(),
        "wall_time_ms": wall.as_millis() as u64,
    });
    std::fs::write(path, kv_core::json::to_canonical_string(&manifest))?;
    Ok(())
}

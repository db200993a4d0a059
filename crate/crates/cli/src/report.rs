use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use spectra1d::tolerances as tol;

use crate::config::Format;
use crate::Failure;

pub const SCHEMA: &str = "v1";

/// What a subcommand produced, before it is wrapped and written.
pub struct Report {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub result: Value,
    pub csv: String,
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round12(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

pub fn tolerances() -> Value {
    json!({
        "relation": tol::RELATION_TOL,
        "orthonormality": tol::ORTHONORMALITY_TOL,
        "orbital_orthonormality": tol::ORBITAL_ORTHONORMALITY_TOL,
        "parity": tol::PARITY_TOL,
        "grid_energy": tol::GRID_ENERGY_TOL,
        "quadrature": tol::QUADRATURE_TOL,
        "energy_grouping": tol::ENERGY_GROUPING_TOL,
        "commutator": tol::COMMUTATOR_TOL,
        "solvable_block_size": tol::SOLVABLE_BLOCK_SIZE,
    })
}

pub fn config_hash(command: &str, config: &Map<String, Value>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    hasher.update(b"\n");
    hasher.update(serde_json::to_string(config).expect("config serializes").as_bytes());
    hex::encode(&hasher.finalize()[..8])
}

impl Report {
    pub fn render(self, format: Format) -> String {
        let mut config = Value::Object(self.config);
        round_numbers(&mut config);
        let Value::Object(config) = config else { unreachable!() };
        let hash = config_hash(self.command, &config);
        match format {
            Format::Json => {
                let mut doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "config": config,
                    "config_hash": hash,
                    "tolerances": tolerances(),
                    "result": self.result,
                });
                round_numbers(&mut doc);
                let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
                text.push('\n');
                text
            }
            Format::Csv => {
                let tolerances = tolerances()
                    .as_object()
                    .unwrap()
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                format!(
                    "# schema={SCHEMA} command={} config_hash={hash}\n# tolerances {tolerances}\n{}",
                    self.command, self.csv
                )
            }
        }
    }
}

pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

/// Quotes a CSV field when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn join_indices(items: &[usize]) -> String {
    items.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

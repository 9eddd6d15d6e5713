//! Run manifests and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use oscq::smallnorm::CutoffChi;
use serde::Serialize;
use serde_json::Value;

use crate::fail::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct Precision {
    /// `None` when chosen automatically.
    pub requested: Option<u32>,
    pub output_bits: u32,
    /// Bits of the accepted `P_n` construction.
    pub build_bits: Option<u32>,
    /// Bits of the final root-finder sweeps.
    pub root_bits: Option<u32>,
    pub cap: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub precision: Precision,
    pub delta: Option<f64>,
    pub epsilon: f64,
    pub rho: f64,
    pub chi_profile: &'static str,
    /// log2 of the tanh-sinh target used where quadrature enters.
    pub quadrature_tol_log2: f64,
    pub residuals: Value,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, precision: Precision) -> Self {
        let chi = CutoffChi::standard(64);
        RunManifest {
            tool: "oscq",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            args: std::env::args().skip(1).collect(),
            nu: None,
            n: None,
            n_list: None,
            quadrature_tol_log2: -0.3 * f64::from(precision.output_bits),
            precision,
            delta: None,
            epsilon: chi.eps.to_f64(),
            rho: chi.rho.to_f64(),
            chi_profile: CutoffChi::PROFILE_ID,
            residuals: Value::Null,
            outputs: Vec::new(),
            wall_seconds: 0.0,
        }
    }
}

/// Sidecar manifest path for a data file: `data.csv` → `data.csv.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::io(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::solver(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

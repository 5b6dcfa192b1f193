//! JSON run report.

use crate::config::ToleranceConfig;
use crate::error::{CliError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub verb: String,
    /// SHA-256 of the config file bytes.
    pub config_sha256: String,
}

impl Provenance {
    pub fn new(verb: &str, config_text: &str) -> Self {
        let digest = Sha256::digest(config_text.as_bytes());
        Self {
            tool: "wsdelay",
            version: env!("CARGO_PKG_VERSION"),
            verb: verb.to_string(),
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CascadeErrors {
    pub shared_modes: usize,
    pub err_s: f64,
    pub err_q: f64,
    pub maps_residual: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PointReport {
    pub freq_hz: f64,
    pub modes: usize,
    pub propagating: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ws_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitarity: Option<f64>,
    /// Relative Hermiticity residual of `Q_prop`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermiticity: Option<f64>,
    /// Analytic `S'` against the finite-difference oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_mismatch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_converged: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub delays_s: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shifts_m: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_diag_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_prime_diag_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cascade: Vec<CascadeErrors>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub pass: bool,
}

impl PointReport {
    /// Every residual present is finite and non-negative.
    pub fn check_finite(&self) -> Result<()> {
        let mut values: Vec<(&str, f64)> = Vec::new();
        for (name, v) in [
            ("ws_residual", self.ws_residual),
            ("unitarity", self.unitarity),
            ("hermiticity", self.hermiticity),
            ("fd_mismatch", self.fd_mismatch),
            ("gamma_residual", self.gamma_residual),
            ("s_diag_residual", self.s_diag_residual),
            ("s_prime_diag_residual", self.s_prime_diag_residual),
        ] {
            if let Some(v) = v {
                values.push((name, v));
            }
        }
        for c in &self.cascade {
            values.extend([("err_s", c.err_s), ("err_q", c.err_q), ("maps_residual", c.maps_residual)]);
        }
        match values.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            Some((name, v)) => Err(CliError::Matrix(format!(
                "{name} = {v} at {} Hz is not a finite non-negative number",
                self.freq_hz
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub thresholds: ToleranceConfig,
    pub points: Vec<PointReport>,
    pub pass: bool,
}

impl RunReport {
    pub fn new(provenance: Provenance, thresholds: ToleranceConfig, points: Vec<PointReport>) -> Result<Self> {
        for p in &points {
            p.check_finite()?;
        }
        let pass = points.iter().all(|p| p.pass);
        Ok(Self {
            provenance,
            thresholds,
            points,
            pass,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}

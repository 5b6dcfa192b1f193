//! Run configuration. Lengths carry their unit in the key (`_mm`),
//! frequencies in hertz (`_hz`).

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<SystemConfig>,
    pub cascade: Option<CascadeConfig>,
    pub frequency: FrequencyConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Te,
    Tm,
}

impl From<FamilyName> for wsdelay::modes::Family {
    fn from(f: FamilyName) -> Self {
        match f {
            FamilyName::Te => wsdelay::modes::Family::Te,
            FamilyName::Tm => wsdelay::modes::Family::Tm,
        }
    }
}

fn te() -> FamilyName {
    FamilyName::Te
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// Parallel-plate guide closed by a short `length_mm` behind the port.
    ShortedGuide {
        width_mm: f64,
        length_mm: f64,
        modes: usize,
        #[serde(default = "te")]
        family: FamilyName,
        #[serde(default = "one")]
        eps_r: f64,
    },
    Thru {
        width_mm: f64,
        length_mm: f64,
        modes: usize,
        #[serde(default = "te")]
        family: FamilyName,
        #[serde(default = "one")]
        eps_r: f64,
    },
    /// Dielectric slab in a doubly periodic cell, vacuum gaps either side.
    Slab {
        period_eta_mm: f64,
        period_zeta_mm: f64,
        gap_mm: f64,
        thickness_mm: f64,
        slab_eps_r: f64,
        modes: usize,
    },
    Step {
        wide_width_mm: f64,
        narrow_width_mm: f64,
        narrow_offset_mm: f64,
        wide_length_mm: f64,
        narrow_length_mm: f64,
        wide_modes: usize,
        narrow_modes: usize,
        wide_ports: Option<usize>,
        narrow_ports: Option<usize>,
    },
    DoubleStep {
        wide_width_mm: f64,
        narrow_width_mm: f64,
        narrow_offset_mm: f64,
        narrow_length_mm: f64,
        left_length_mm: f64,
        right_length_mm: f64,
        wide_modes: usize,
        narrow_modes: usize,
        ports: Option<usize>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CascadeConfig {
    ThruThru {
        width_mm: f64,
        first_length_mm: f64,
        second_length_mm: f64,
        modes: usize,
        #[serde(default = "te")]
        family: FamilyName,
    },
    ThruShort {
        width_mm: f64,
        thru_length_mm: f64,
        short_length_mm: f64,
        modes: usize,
        #[serde(default = "te")]
        family: FamilyName,
    },
    /// Two step junctions joined inside the narrow section, `split_mm`
    /// behind the first junction.
    DoubleStep {
        wide_width_mm: f64,
        narrow_width_mm: f64,
        narrow_offset_mm: f64,
        narrow_length_mm: f64,
        left_length_mm: f64,
        right_length_mm: f64,
        split_mm: f64,
        wide_modes: usize,
        narrow_modes: usize,
        ports: usize,
        /// Shared-port mode count for the `cascade` verb.
        shared_modes: Option<usize>,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyConfig {
    pub freq_hz: Option<Vec<f64>>,
    pub start_hz: Option<f64>,
    pub stop_hz: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Evanescent modes kept per port beyond the propagating ones.
    #[serde(default)]
    pub evanescent: Vec<usize>,
    /// Shared-port mode counts for cascade convergence.
    #[serde(default)]
    pub shared_modes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub residual: f64,
    pub unitarity: f64,
    pub hermiticity: f64,
    pub quadrature: f64,
    pub fd_mismatch: f64,
    pub cascade: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            unitarity: 1e-8,
            hermiticity: 1e-8,
            quadrature: 1e-10,
            fd_mismatch: 1e-5,
            cascade: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Port-plane samples per WS-mode profile; zero disables sampling.
    pub profile_samples: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            formats: vec![Format::Csv, Format::Json],
            profile_samples: 0,
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn count(field: &str, v: usize) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(invalid(field, "must be positive"))
    }
}

fn unit_interval(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in (0, 1), got {v}")))
    }
}

impl RunConfig {
    /// Parse and validate; TOML errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn frequencies(&self) -> Result<Vec<f64>> {
        let f = &self.frequency;
        let list = match (&f.freq_hz, f.start_hz, f.stop_hz, f.count) {
            (Some(list), None, None, None) => list.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                count("frequency.count", n)?;
                if n == 1 {
                    vec![a]
                } else {
                    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
                }
            }
            _ => {
                return Err(invalid(
                    "frequency",
                    "give either freq_hz = [...] or all of start_hz, stop_hz, count",
                ))
            }
        };
        if list.is_empty() {
            return Err(invalid("frequency.freq_hz", "empty list"));
        }
        for v in &list {
            positive("frequency", *v)?;
        }
        Ok(list)
    }

    pub fn validate(&self) -> Result<()> {
        self.frequencies()?;
        let t = &self.tolerances;
        unit_interval("tolerances.residual", t.residual)?;
        unit_interval("tolerances.unitarity", t.unitarity)?;
        unit_interval("tolerances.hermiticity", t.hermiticity)?;
        unit_interval("tolerances.quadrature", t.quadrature)?;
        unit_interval("tolerances.fd_mismatch", t.fd_mismatch)?;
        unit_interval("tolerances.cascade", t.cascade)?;
        if self.system.is_none() && self.cascade.is_none() {
            return Err(invalid("config", "needs a [system] or [cascade] table"));
        }
        if let Some(s) = &self.system {
            s.validate()?;
        }
        if let Some(c) = &self.cascade {
            c.validate()?;
        }
        for &m in &self.sweep.shared_modes {
            count("sweep.shared_modes", m)?;
        }
        Ok(())
    }
}

fn check_aperture(wide: f64, narrow: f64, offset: f64) -> Result<()> {
    positive("wide_width_mm", wide)?;
    positive("narrow_width_mm", narrow)?;
    non_negative("narrow_offset_mm", offset)?;
    if offset + narrow > wide {
        return Err(invalid("narrow_offset_mm", "narrow aperture extends past the wide guide"));
    }
    Ok(())
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SystemConfig::ShortedGuide {
                width_mm,
                length_mm,
                modes,
                eps_r,
                ..
            }
            | SystemConfig::Thru {
                width_mm,
                length_mm,
                modes,
                eps_r,
                ..
            } => {
                positive("system.width_mm", width_mm)?;
                positive("system.length_mm", length_mm)?;
                positive("system.eps_r", eps_r)?;
                count("system.modes", modes)
            }
            SystemConfig::Slab {
                period_eta_mm,
                period_zeta_mm,
                gap_mm,
                thickness_mm,
                slab_eps_r,
                modes,
            } => {
                positive("system.period_eta_mm", period_eta_mm)?;
                positive("system.period_zeta_mm", period_zeta_mm)?;
                non_negative("system.gap_mm", gap_mm)?;
                non_negative("system.thickness_mm", thickness_mm)?;
                positive("system.slab_eps_r", slab_eps_r)?;
                count("system.modes", modes)
            }
            SystemConfig::Step {
                wide_width_mm,
                narrow_width_mm,
                narrow_offset_mm,
                wide_length_mm,
                narrow_length_mm,
                wide_modes,
                narrow_modes,
                wide_ports,
                narrow_ports,
            } => {
                check_aperture(wide_width_mm, narrow_width_mm, narrow_offset_mm)?;
                non_negative("system.wide_length_mm", wide_length_mm)?;
                non_negative("system.narrow_length_mm", narrow_length_mm)?;
                count("system.wide_modes", wide_modes)?;
                count("system.narrow_modes", narrow_modes)?;
                ports_within("system.wide_ports", wide_ports, wide_modes)?;
                ports_within("system.narrow_ports", narrow_ports, narrow_modes)
            }
            SystemConfig::DoubleStep {
                wide_width_mm,
                narrow_width_mm,
                narrow_offset_mm,
                narrow_length_mm,
                left_length_mm,
                right_length_mm,
                wide_modes,
                narrow_modes,
                ports,
            } => {
                check_aperture(wide_width_mm, narrow_width_mm, narrow_offset_mm)?;
                positive("system.narrow_length_mm", narrow_length_mm)?;
                non_negative("system.left_length_mm", left_length_mm)?;
                non_negative("system.right_length_mm", right_length_mm)?;
                count("system.wide_modes", wide_modes)?;
                count("system.narrow_modes", narrow_modes)?;
                ports_within("system.ports", ports, wide_modes)
            }
        }
    }
}

fn ports_within(field: &str, ports: Option<usize>, modes: usize) -> Result<()> {
    match ports {
        Some(p) if p == 0 || p > modes => Err(invalid(field, format!("must lie in 1..={modes}"))),
        _ => Ok(()),
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CascadeConfig::ThruThru {
                width_mm,
                first_length_mm,
                second_length_mm,
                modes,
                ..
            } => {
                positive("cascade.width_mm", width_mm)?;
                positive("cascade.first_length_mm", first_length_mm)?;
                positive("cascade.second_length_mm", second_length_mm)?;
                count("cascade.modes", modes)
            }
            CascadeConfig::ThruShort {
                width_mm,
                thru_length_mm,
                short_length_mm,
                modes,
                ..
            } => {
                positive("cascade.width_mm", width_mm)?;
                positive("cascade.thru_length_mm", thru_length_mm)?;
                positive("cascade.short_length_mm", short_length_mm)?;
                count("cascade.modes", modes)
            }
            CascadeConfig::DoubleStep {
                wide_width_mm,
                narrow_width_mm,
                narrow_offset_mm,
                narrow_length_mm,
                left_length_mm,
                right_length_mm,
                split_mm,
                wide_modes,
                narrow_modes,
                ports,
                shared_modes,
            } => {
                check_aperture(wide_width_mm, narrow_width_mm, narrow_offset_mm)?;
                positive("cascade.narrow_length_mm", narrow_length_mm)?;
                non_negative("cascade.left_length_mm", left_length_mm)?;
                non_negative("cascade.right_length_mm", right_length_mm)?;
                if !(split_mm > 0.0 && split_mm < narrow_length_mm) {
                    return Err(invalid("cascade.split_mm", "must lie strictly inside the narrow section"));
                }
                count("cascade.wide_modes", wide_modes)?;
                count("cascade.narrow_modes", narrow_modes)?;
                ports_within("cascade.ports", Some(ports), wide_modes)?;
                ports_within("cascade.shared_modes", shared_modes, narrow_modes)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GUIDE: &str = r#"
[system]
kind = "shorted_guide"
width_mm = 10.0
length_mm = 20.0
modes = 12

[frequency]
freq_hz = [1.428e11]
"#;

    #[test]
    fn parses_a_minimal_config() {
        let cfg = RunConfig::from_toml(GUIDE).unwrap();
        assert_eq!(cfg.frequencies().unwrap(), vec![1.428e11]);
        assert!(matches!(
            cfg.system,
            Some(SystemConfig::ShortedGuide {
                family: FamilyName::Te,
                ..
            })
        ));
        assert_eq!(cfg.tolerances.residual, 1e-8);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = GUIDE.replace("length_mm", "length");
        let err = RunConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn sweep_expands_inclusive() {
        let text = GUIDE.replace("freq_hz = [1.428e11]", "start_hz = 1e9\nstop_hz = 3e9\ncount = 3");
        let cfg = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.frequencies().unwrap(), vec![1e9, 2e9, 3e9]);
    }

    #[test]
    fn rejects_bad_values_before_running() {
        for (from, to) in [
            ("modes = 12", "modes = 0"),
            ("freq_hz = [1.428e11]", "freq_hz = [-1.0]"),
            ("length_mm = 20.0", "length_mm = -2.0"),
        ] {
            assert!(RunConfig::from_toml(&GUIDE.replace(from, to)).is_err(), "{to}");
        }
        let text = format!("{GUIDE}\n[tolerances]\nresidual = 2.0\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn aperture_must_fit() {
        let text = r#"
[system]
kind = "step"
wide_width_mm = 10.0
narrow_width_mm = 5.0
narrow_offset_mm = 6.0
wide_length_mm = 1.0
narrow_length_mm = 1.0
wide_modes = 16
narrow_modes = 8

[frequency]
freq_hz = [5e10]
"#;
        let err = RunConfig::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("narrow_offset_mm"), "{err}");
    }
}

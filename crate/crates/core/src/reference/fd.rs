//! Central-difference oracle for `S'`.

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Relative step and whether to apply one Richardson refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub rel_step: f64,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            rel_step: 1e-6,
            richardson: true,
        }
    }
}

/// `(S(ω + δ) − S(ω − δ)) / 2δ`.
pub fn central_difference<F>(s_of: &F, omega: f64, delta: f64) -> Result<CMat>
where
    F: Fn(f64) -> Result<CMat>,
{
    let plus = s_of(omega + delta)?;
    let minus = s_of(omega - delta)?;
    if plus.shape() != minus.shape() {
        return Err(Error::FiniteDifference("S changed shape across the stencil".into()));
    }
    Ok((plus - minus) * C64::new(0.5 / delta, 0.0))
}

fn refined<F>(s_of: &F, omega: f64, delta: f64, richardson: bool) -> Result<CMat>
where
    F: Fn(f64) -> Result<CMat>,
{
    let coarse = central_difference(s_of, omega, delta)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = central_difference(s_of, omega, 0.5 * delta)?;
    Ok((fine * C64::new(4.0, 0.0) - coarse) * C64::new(1.0 / 3.0, 0.0))
}

/// Finite-difference `S'` at `omega`. If the system cannot be evaluated on
/// the stencil (e.g. a mode hits cutoff), the step is shrunk tenfold once.
pub fn fd_s_prime<F>(s_of: F, omega: f64, cfg: FdConfig) -> Result<CMat>
where
    F: Fn(f64) -> Result<CMat>,
{
    if !(cfg.rel_step > 0.0 && cfg.rel_step < 1.0) {
        return Err(Error::invalid("rel_step", format!("must lie in (0, 1), got {}", cfg.rel_step)));
    }
    let delta = cfg.rel_step * omega;
    match refined(&s_of, omega, delta, cfg.richardson) {
        Ok(d) => Ok(d),
        Err(first) => refined(&s_of, omega, 0.1 * delta, cfg.richardson)
            .map_err(|e| Error::FiniteDifference(format!("stencil rejected ({first}); after shrinking: {e}"))),
    }
}

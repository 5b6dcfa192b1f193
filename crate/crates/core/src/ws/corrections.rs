use crate::error::{Error, Result};
use crate::linalg::{diag, CMat, C64, J};
use crate::modes::{ModeClass, ModeSpec};

/// Diagonal entries `ν±,p` and `λ±,p` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCorrection {
    pub nu_plus: C64,
    pub nu_minus: C64,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
}

impl ModeCorrection {
    /// From the normalisation `n` and its frequency derivative `n'`.
    ///
    /// For propagating modes `n` is real and the entries collapse to
    /// `ν₊ = j`, `ν₋ = λ₊ = 0`, `λ₋ = −j n'/n`; those closed forms are
    /// returned directly so the zeros are exact.
    pub fn from_norm(norm: C64, norm_prime: C64, class: ModeClass) -> Result<Self> {
        if !(norm.re.is_finite() && norm.im.is_finite() && norm_prime.re.is_finite() && norm_prime.im.is_finite()) {
            return Err(Error::Missing("finite mode normalisation and derivative"));
        }
        if norm.norm() == 0.0 {
            return Err(Error::Missing("nonzero mode normalisation"));
        }
        let zero = C64::new(0.0, 0.0);
        if class == ModeClass::Propagating && norm.im == 0.0 {
            return Ok(Self {
                nu_plus: J,
                nu_minus: zero,
                lambda_plus: zero,
                lambda_minus: -J * norm_prime / norm,
            });
        }
        let half_j = J * 0.5;
        let ratio = norm.conj() / norm;
        let inv_ratio = norm / norm.conj();
        // (1/n)' = −n'/n²
        let inv_prime = -norm_prime / (norm * norm);
        let a = norm.conj() * inv_prime;
        let b = norm_prime / norm.conj();
        Ok(Self {
            nu_plus: half_j * (ratio + inv_ratio),
            nu_minus: half_j * (ratio - inv_ratio),
            lambda_plus: half_j * (a + b),
            lambda_minus: half_j * (a - b),
        })
    }
}

/// Diagonal correction matrices `N±`, `Λ±` stored by their diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionSet {
    pub entries: Vec<ModeCorrection>,
}

impl CorrectionSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_plus(&self) -> CMat {
        diag(&self.entries.iter().map(|e| e.nu_plus).collect::<Vec<_>>())
    }

    pub fn n_minus(&self) -> CMat {
        diag(&self.entries.iter().map(|e| e.nu_minus).collect::<Vec<_>>())
    }

    pub fn lambda_plus(&self) -> CMat {
        diag(&self.entries.iter().map(|e| e.lambda_plus).collect::<Vec<_>>())
    }

    pub fn lambda_minus(&self) -> CMat {
        diag(&self.entries.iter().map(|e| e.lambda_minus).collect::<Vec<_>>())
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            entries: idx.iter().map(|&i| self.entries[i]).collect(),
        }
    }
}

/// Corrections for a mode list, using each mode's analytic `n'`.
pub fn corrections(modes: &[ModeSpec]) -> Result<CorrectionSet> {
    let entries = modes
        .iter()
        .map(|m| ModeCorrection::from_norm(m.norm, m.derivatives().norm, m.class))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrectionSet { entries })
}

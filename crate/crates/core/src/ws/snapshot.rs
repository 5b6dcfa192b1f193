use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::modes::{ModeClass, ModeSpec};

/// Scattering data at one angular frequency.
#[derive(Debug, Clone)]
pub struct ScatteringSnapshot {
    pub omega: f64,
    pub modes: Vec<ModeSpec>,
    pub s: CMat,
    pub s_prime: Option<CMat>,
}

impl ScatteringSnapshot {
    pub fn new(omega: f64, modes: Vec<ModeSpec>, s: CMat, s_prime: Option<CMat>) -> Result<Self> {
        let m = modes.len();
        if s.nrows() != m || s.ncols() != m {
            return Err(Error::dim("scattering matrix", format!("{m}x{m}"), format!("{}x{}", s.nrows(), s.ncols())));
        }
        if let Some(sp) = &s_prime {
            if sp.nrows() != m || sp.ncols() != m {
                return Err(Error::dim("S'", format!("{m}x{m}"), format!("{}x{}", sp.nrows(), sp.ncols())));
            }
        }
        Ok(Self {
            omega,
            modes,
            s,
            s_prime,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn propagating_count(&self) -> usize {
        self.modes.iter().filter(|m| m.is_propagating()).count()
    }

    /// Whether every propagating mode precedes every evanescent mode.
    pub fn is_propagating_first(&self) -> bool {
        is_propagating_first(&self.modes)
    }

    /// Stable reordering that moves propagating modes to the front; also
    /// returns the permutation (`perm[new] = old`).
    pub fn propagating_first(&self) -> (Self, Vec<usize>) {
        let perm = propagating_first_permutation(&self.modes);
        (self.permuted(&perm), perm)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            omega: self.omega,
            modes: perm.iter().map(|&i| self.modes[i]).collect(),
            s: linalg::permute_symmetric(&self.s, perm),
            s_prime: self.s_prime.as_ref().map(|sp| linalg::permute_symmetric(sp, perm)),
        }
    }

    /// Keep only the modes at positions `keep` (in that order), as when a
    /// port expansion is truncated.
    pub fn restricted(&self, keep: &[usize]) -> Self {
        Self {
            omega: self.omega,
            modes: keep.iter().map(|&i| self.modes[i]).collect(),
            s: linalg::select(&self.s, keep, keep),
            s_prime: self.s_prime.as_ref().map(|sp| linalg::select(sp, keep, keep)),
        }
    }

    pub fn s_pp(&self) -> CMat {
        let mp = self.propagating_count();
        linalg::block(&self.s, 0, 0, mp, mp)
    }

    /// `‖S_PP†S_PP − I‖_F` (propagating-first ordering assumed).
    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.s_pp())
    }

    /// `‖S_PP − S_PPᵀ‖_F / ‖S_PP‖_F`, optionally after row permutation.
    pub fn symmetry_residual(&self, row_permutation: Option<&CMat>) -> f64 {
        let spp = self.s_pp();
        match row_permutation {
            Some(p) => linalg::symmetry_residual(&(p * spp)),
            None => linalg::symmetry_residual(&spp),
        }
    }
}

pub(crate) fn is_propagating_first(modes: &[ModeSpec]) -> bool {
    modes
        .windows(2)
        .all(|w| !(w[0].class == ModeClass::Evanescent && w[1].class == ModeClass::Propagating))
}

pub(crate) fn propagating_first_permutation(modes: &[ModeSpec]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..modes.len()).filter(|&i| modes[i].is_propagating()).collect();
    perm.extend((0..modes.len()).filter(|&i| !modes[i].is_propagating()));
    perm
}

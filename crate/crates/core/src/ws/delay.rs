//! Propagating block of `Q`, WS modes and delays.

use super::corrections::CorrectionSet;
use super::relation::{assemble_q, ws_rhs};
use super::snapshot::is_propagating_first;
use super::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, hermiticity_residual, hermitian_eigen, relative_difference, CMat, C64};
use crate::modes::{ModeIndex, ModeSpec, C0};

/// Partition of `Q` into propagating (P) and evanescent (E) blocks.
///
/// Because `Λ₊` vanishes on P and `Λ₋` vanishes on E, the P block reduces to
/// `Q̃_PP + S_PP†Λ_PP − Λ_PP S_PP − S_EP†Λ_EE S_EP`. The blocks are cut out of
/// the fully assembled `Q`, so no structural zero is assumed numerically.
#[derive(Debug, Clone)]
pub struct QBlocks {
    pub prop: CMat,
    pub pe: CMat,
    pub ep: CMat,
    pub ee: CMat,
    /// Set when no mode propagates and `prop` is empty.
    pub empty_prop: bool,
}

/// Relative mismatch of each block against `(N₋ + S†N₊)S'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockResiduals {
    pub pp: f64,
    pub pe: f64,
    pub ep: f64,
    pub ee: f64,
}

impl QBlocks {
    pub fn propagating_count(&self) -> usize {
        self.prop.nrows()
    }

    /// Compare every block with the matching block of the relation's
    /// right-hand side, e.g. `jS_PP†S'_PP` for the P block.
    pub fn rhs_residuals(&self, s: &CMat, s_prime: &CMat, corr: &CorrectionSet) -> Result<BlockResiduals> {
        let rhs = ws_rhs(s, s_prime, corr)?;
        let mp = self.propagating_count();
        let me = rhs.nrows() - mp;
        let rel = |a: &CMat, r0, c0, nr, nc| {
            let b = linalg::block(&rhs, r0, c0, nr, nc);
            if a.is_empty() {
                0.0
            } else {
                relative_difference(&b, a)
            }
        };
        Ok(BlockResiduals {
            pp: rel(&self.prop, 0, 0, mp, mp),
            pe: rel(&self.pe, 0, mp, mp, me),
            ep: rel(&self.ep, mp, 0, me, mp),
            ee: rel(&self.ee, mp, mp, me, me),
        })
    }
}

pub fn q_blocks(q_tilde: &CMat, s: &CMat, corr: &CorrectionSet, modes: &[ModeSpec]) -> Result<QBlocks> {
    if modes.len() != corr.len() {
        return Err(Error::dim("mode list", corr.len(), modes.len()));
    }
    if !is_propagating_first(modes) {
        return Err(Error::Ordering);
    }
    let q = assemble_q(q_tilde, s, corr)?;
    let m = modes.len();
    let mp = modes.iter().filter(|x| x.is_propagating()).count();
    let me = m - mp;
    Ok(QBlocks {
        prop: linalg::block(&q, 0, 0, mp, mp),
        pe: linalg::block(&q, 0, mp, mp, me),
        ep: linalg::block(&q, mp, 0, me, mp),
        ee: linalg::block(&q, mp, mp, me, me),
        empty_prop: mp == 0,
    })
}

/// Eigen-decomposition of `Q_prop` plus simultaneous-diagonalisation checks.
#[derive(Debug, Clone)]
pub struct WsModes {
    /// Columns are WS modes over the propagating port modes.
    pub w: CMat,
    /// Ascending delays (s).
    pub delays: Vec<f64>,
    /// Off-diagonal Frobenius mass of `Wᵀ(I_r)S_PP W`.
    pub s_diag_residual: f64,
    /// Same for `S'_PP`, relative to `‖S'_PP‖_F`.
    pub s_prime_diag_residual: Option<f64>,
    /// Some pair of delays coincides to `1e-9` relative; within such a
    /// block the eigenvectors are not rotated to diagonalise `S_PP`.
    pub degenerate: bool,
}

fn off_diagonal(m: &CMat) -> f64 {
    let mut sum = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

pub fn ws_modes(
    q_prop: &CMat,
    s_pp: &CMat,
    s_pp_prime: Option<&CMat>,
    permutation: Option<&CMat>,
    tol: Tolerances,
) -> Result<WsModes> {
    let mp = q_prop.nrows();
    if q_prop.ncols() != mp || s_pp.shape() != (mp, mp) {
        return Err(Error::dim("Q_prop / S_PP", format!("{mp}x{mp}"), format!("{:?}", s_pp.shape())));
    }
    let herm = hermiticity_residual(q_prop);
    if herm > tol.hermiticity {
        return Err(Error::NotHermitian {
            residual: herm,
            tolerance: tol.hermiticity,
        });
    }
    let (delays, w) = hermitian_eigen(q_prop);
    let apply = |m: &CMat| match permutation {
        Some(p) => p * m,
        None => m.clone(),
    };
    let s_diag_residual = off_diagonal(&(w.transpose() * apply(s_pp) * &w));
    let s_prime_diag_residual = s_pp_prime.map(|sp| {
        let scale = frobenius(sp);
        let off = off_diagonal(&(w.transpose() * apply(sp) * &w));
        if scale > 0.0 {
            off / scale
        } else {
            off
        }
    });
    let span = delays.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let degenerate = delays.windows(2).any(|p| (p[1] - p[0]).abs() <= 1e-9 * span);
    Ok(WsModes {
        w,
        delays,
        s_diag_residual,
        s_prime_diag_residual,
        degenerate,
    })
}

/// Row permutation pairing each mode with the mode whose profile is its
/// complex conjugate: Floquet `(m, n)` with `(−m, −n)` of the same family on
/// the same port; guide modes have real profiles and map to themselves.
pub fn i_r_permutation(modes: &[ModeSpec]) -> Result<CMat> {
    let m = modes.len();
    let mut p = CMat::zeros(m, m);
    for (i, a) in modes.iter().enumerate() {
        let partner = match a.index {
            ModeIndex::Guide(_) => Some(i),
            ModeIndex::Floquet { m: mi, n: ni } => modes.iter().position(|b| {
                b.port_id == a.port_id && b.family == a.family && b.index == ModeIndex::Floquet { m: -mi, n: -ni }
            }),
        };
        let j = partner.ok_or_else(|| Error::Unpaired(a.label()))?;
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

/// Delays times the vacuum speed of light.
pub fn spatial_shift(delays: &[f64]) -> Vec<f64> {
    delays.iter().map(|d| d * C0).collect()
}

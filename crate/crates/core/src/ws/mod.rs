//! Generalized Wigner-Smith relation: assembly, verification, inversion-free
//! `S'`, and WS-mode extraction.
//!
//! The time-delay matrix is
//! `Q = Q̃ + Λ₊ + S†Λ₋ − Λ₋S − S†Λ₊S`, and the relation it satisfies is
//! `Q = (N₋ + S†N₊) S'`, where `Q̃` is the Gram matrix of the total fields
//! under the energy inner product and `N±`, `Λ±` are diagonal corrections
//! built from the port-mode normalisations `n_p = √Z_p`.

mod corrections;
mod delay;
mod inverse;
mod qtilde;
mod relation;
mod snapshot;

pub use corrections::{corrections, CorrectionSet, ModeCorrection};
pub use delay::{i_r_permutation, q_blocks, spatial_shift, ws_modes, BlockResiduals, QBlocks, WsModes};
pub use inverse::{gamma, gamma_residual, s_prime_from_q};
pub use qtilde::{q_tilde, q_tilde_converged, FieldProvider, PointFields, QuadratureReport};
pub use relation::{assemble_q, ws_rhs, ws_residual, Residual};
pub use snapshot::ScatteringSnapshot;

/// Default relative tolerances for structural checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `‖S_PP†S_PP − I‖_F` bound before `S_PP` is declared non-unitary.
    pub unitarity: f64,
    /// `‖A − A†‖_F / ‖A‖_F` bound before `A` is declared non-Hermitian.
    pub hermiticity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-8,
            hermiticity: 1e-8,
        }
    }
}

/// Bundle of everything assembled at one frequency.
#[derive(Debug, Clone)]
pub struct WsBundle {
    pub q_tilde: crate::CMat,
    pub corrections: CorrectionSet,
    pub q: crate::CMat,
    pub q_prop: crate::CMat,
    pub w: crate::CMat,
    pub delays: Vec<f64>,
}

impl WsBundle {
    /// Assemble `Q`, `Q_prop` and the WS modes from a propagating-first
    /// snapshot and its volume-integral matrix.
    pub fn assemble(
        snapshot: &ScatteringSnapshot,
        q_tilde: crate::CMat,
        tol: Tolerances,
    ) -> crate::Result<Self> {
        let corr = corrections(&snapshot.modes)?;
        let q = assemble_q(&q_tilde, &snapshot.s, &corr)?;
        let blocks = q_blocks(&q_tilde, &snapshot.s, &corr, &snapshot.modes)?;
        let mp = snapshot.propagating_count();
        let (w, delays) = if mp == 0 {
            (crate::CMat::zeros(0, 0), Vec::new())
        } else {
            let s_pp = snapshot.s_pp();
            let s_pp_prime = snapshot
                .s_prime
                .as_ref()
                .map(|sp| crate::linalg::block(sp, 0, 0, mp, mp));
            let modes = ws_modes(&blocks.prop, &s_pp, s_pp_prime.as_ref(), None, tol)?;
            (modes.w, modes.delays)
        };
        Ok(Self {
            q_tilde,
            corrections: corr,
            q,
            q_prop: blocks.prop,
            w,
            delays,
        })
    }
}

/// Everything needed to judge the generalized relation on one snapshot.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// Snapshot reordered propagating-first.
    pub snapshot: ScatteringSnapshot,
    /// `perm[new] = old` relating the reordering to the input.
    pub permutation: Vec<usize>,
    pub q_tilde: crate::CMat,
    pub corrections: CorrectionSet,
    pub q: crate::CMat,
    /// `(N₋ + S†N₊)S'` when `S'` is known.
    pub rhs: Option<crate::CMat>,
    pub residual: Option<Residual>,
    /// `‖S_PP†S_PP − I‖_F`.
    pub unitarity: f64,
}

impl IdentityReport {
    /// `Q_prop`, the propagating block of `Q`.
    pub fn q_prop(&self) -> crate::CMat {
        let mp = self.snapshot.propagating_count();
        crate::linalg::block(&self.q, 0, 0, mp, mp)
    }
}

/// Reorder `snapshot` and `q_tilde` (both port-major) propagating-first,
/// assemble `Q` and, when `S'` is present, the residual of the relation.
pub fn identity_report(snapshot: &ScatteringSnapshot, q_tilde: &crate::CMat) -> crate::Result<IdentityReport> {
    if q_tilde.shape() != snapshot.s.shape() {
        return Err(crate::Error::dim(
            "Q-tilde",
            format!("{:?}", snapshot.s.shape()),
            format!("{:?}", q_tilde.shape()),
        ));
    }
    let (snap, perm) = snapshot.propagating_first();
    let qt = crate::linalg::permute_symmetric(q_tilde, &perm);
    let corr = corrections(&snap.modes)?;
    let q = assemble_q(&qt, &snap.s, &corr)?;
    let rhs = match &snap.s_prime {
        Some(sp) => Some(ws_rhs(&snap.s, sp, &corr)?),
        None => None,
    };
    let residual = match &rhs {
        Some(r) => Some(ws_residual(&q, r)?),
        None => None,
    };
    let unitarity = snap.unitarity_residual();
    Ok(IdentityReport {
        snapshot: snap,
        permutation: perm,
        q_tilde: qt,
        corrections: corr,
        q,
        rhs,
        residual,
        unitarity,
    })
}

//! Frequency derivative of `S` from `S` and `Q` without inverting `S`.

use super::corrections::{corrections, CorrectionSet};
use super::snapshot::is_propagating_first;
use super::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, CMat, C64, J};
use crate::modes::ModeSpec;

/// `Γ = (N₋ + S†N₊)⁻¹` in closed form.
///
/// With propagating-first ordering and `D_E = (N₋)_EE` (±1 per evanescent
/// mode, `+1` for TE):
///
/// ```text
/// Γ = [ −j S_PP            0     ]
///     [ −D_E⁻¹ S_PE† S_PP  D_E⁻¹ ]
/// ```
///
/// which relies on `S_PP` being unitary; that is checked against `tol`.
pub fn gamma(s: &CMat, modes: &[ModeSpec], tol: Tolerances) -> Result<CMat> {
    let m = modes.len();
    if s.nrows() != m || s.ncols() != m {
        return Err(Error::dim("S", format!("{m}x{m}"), format!("{}x{}", s.nrows(), s.ncols())));
    }
    if !is_propagating_first(modes) {
        return Err(Error::Ordering);
    }
    let mp = modes.iter().filter(|x| x.is_propagating()).count();
    let me = m - mp;
    let s_pp = linalg::block(s, 0, 0, mp, mp);
    let residual = linalg::unitarity_residual(&s_pp);
    if residual > tol.unitarity {
        return Err(Error::NotUnitary {
            residual,
            tolerance: tol.unitarity,
        });
    }
    let corr = corrections(modes)?;
    let d_inv: Vec<C64> = corr.entries[mp..].iter().map(|e| C64::new(1.0, 0.0) / e.nu_minus).collect();
    let s_pe = linalg::block(s, 0, mp, mp, me);
    let lower = s_pe.adjoint() * &s_pp;
    let mut g = CMat::zeros(m, m);
    g.view_mut((0, 0), (mp, mp)).copy_from(&(&s_pp * -J));
    for i in 0..me {
        for j in 0..mp {
            g[(mp + i, j)] = -d_inv[i] * lower[(i, j)];
        }
        g[(mp + i, mp + i)] = d_inv[i];
    }
    Ok(g)
}

/// `‖Γ(N₋ + S†N₊) − I‖_F`.
pub fn gamma_residual(gamma: &CMat, s: &CMat, corr: &CorrectionSet) -> f64 {
    let m = corr.len();
    let k = corr.n_minus() + s.adjoint() * corr.n_plus();
    frobenius(&(gamma * k - CMat::identity(m, m)))
}

/// `S' = Γ Q`.
pub fn s_prime_from_q(gamma: &CMat, q: &CMat) -> Result<CMat> {
    if gamma.ncols() != q.nrows() {
        return Err(Error::dim("Γ Q", gamma.ncols(), q.nrows()));
    }
    Ok(gamma * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{enumerate_guide_modes, Family, GuidePort, Medium, C0};
    use std::f64::consts::PI;

    fn guide_modes(family: Family, ka: f64, count: usize) -> Vec<ModeSpec> {
        let port = GuidePort::new(1.0, Medium::vacuum()).unwrap();
        enumerate_guide_modes(&port, ka * PI * C0, family, count).unwrap()
    }

    #[test]
    fn scalar_unitary_case() {
        let modes = guide_modes(Family::Te, 1.5, 1);
        let s = CMat::from_element(1, 1, C64::from_polar(1.0, 0.7));
        let g = gamma(&s, &modes, Tolerances::default()).unwrap();
        assert!((g[(0, 0)] - (-J * s[(0, 0)])).norm() < 1e-15);
        let prod = g[(0, 0)] * J * s[(0, 0)].conj();
        assert!((prod - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn all_te_evanescent_gives_identity() {
        let modes = guide_modes(Family::Te, 0.5, 3);
        let s = CMat::from_fn(3, 3, |i, j| C64::new(0.1 * i as f64, -0.05 * j as f64));
        let g = gamma(&s, &modes, Tolerances::default()).unwrap();
        assert!(frobenius(&(g - CMat::identity(3, 3))) < 1e-15);
    }

    #[test]
    fn non_unitary_and_misordered_rejected() {
        let modes = guide_modes(Family::Te, 1.5, 2);
        let s = CMat::from_element(2, 2, C64::new(0.5, 0.0));
        assert!(matches!(gamma(&s, &modes, Tolerances::default()), Err(Error::NotUnitary { .. })));
        let swapped = vec![modes[1], modes[0]];
        assert!(matches!(gamma(&s, &swapped, Tolerances::default()), Err(Error::Ordering)));
    }
}

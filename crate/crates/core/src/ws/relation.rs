use super::corrections::CorrectionSet;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMat};

fn check_square(context: &'static str, m: &CMat, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dim(context, format!("{n}x{n}"), format!("{}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// `Q = Q̃ + Λ₊ + S†Λ₋ − Λ₋S − S†Λ₊S`.
pub fn assemble_q(q_tilde: &CMat, s: &CMat, corr: &CorrectionSet) -> Result<CMat> {
    let m = corr.len();
    check_square("Q-tilde", q_tilde, m)?;
    check_square("S", s, m)?;
    let lp = corr.lambda_plus();
    let lm = corr.lambda_minus();
    let sh = s.adjoint();
    Ok(q_tilde + &lp + &sh * &lm - &lm * s - &sh * &lp * s)
}

/// `(N₋ + S†N₊) S'`.
pub fn ws_rhs(s: &CMat, s_prime: &CMat, corr: &CorrectionSet) -> Result<CMat> {
    let m = corr.len();
    check_square("S", s, m)?;
    check_square("S'", s_prime, m)?;
    let k = corr.n_minus() + s.adjoint() * corr.n_plus();
    Ok(k * s_prime)
}

/// Relative Frobenius residual of the generalized relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Set when `‖Q‖_F = 0` and `value` is the absolute norm instead.
    pub absolute: bool,
}

/// `‖Q − RHS‖_F / ‖Q‖_F`.
pub fn ws_residual(q: &CMat, rhs: &CMat) -> Result<Residual> {
    if q.shape() != rhs.shape() {
        return Err(Error::dim("WS residual", format!("{:?}", q.shape()), format!("{:?}", rhs.shape())));
    }
    let diff = frobenius(&(q - rhs));
    let scale = frobenius(q);
    Ok(if scale > 0.0 {
        Residual {
            value: diff / scale,
            absolute: false,
        }
    } else {
        Residual {
            value: diff,
            absolute: true,
        }
    })
}

//! Dense complex matrix helpers shared by the other modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const J: C64 = C64::new(0.0, 1.0);

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a - b‖_F / ‖b‖_F`, or the absolute difference when `b` vanishes.
pub fn relative_difference(a: &CMat, b: &CMat) -> f64 {
    let diff = frobenius(&(a - b));
    let scale = frobenius(b);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// `‖A - A†‖_F / ‖A‖_F` (absolute when `A = 0`).
pub fn hermiticity_residual(a: &CMat) -> f64 {
    let diff = frobenius(&(a - a.adjoint()));
    let scale = frobenius(a);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// `‖A† A - I‖_F`.
pub fn unitarity_residual(a: &CMat) -> f64 {
    let n = a.ncols();
    frobenius(&(a.adjoint() * a - CMat::identity(n, n)))
}

/// `‖A - Aᵀ‖_F / ‖A‖_F`.
pub fn symmetry_residual(a: &CMat) -> f64 {
    let diff = frobenius(&(a - a.transpose()));
    let scale = frobenius(a);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

pub fn diag(values: &[C64]) -> CMat {
    CMat::from_diagonal(&DVector::from_column_slice(values))
}

/// Copy of the sub-block `rows × cols` (given as index lists).
pub fn select(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Contiguous block copy.
pub fn block(m: &CMat, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
    m.view((r0, c0), (nr, nc)).into_owned()
}

/// Apply `P M Pᵀ` where `perm[i]` names the old index placed at new position `i`.
pub fn permute_symmetric(m: &CMat, perm: &[usize]) -> CMat {
    select(m, perm, perm)
}

/// Solve `A X = B` with partially pivoted LU; rejects exactly singular systems.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(Error::dim(
            "linear solve",
            format!("square {0}x{0} with rhs rows {0}", a.nrows()),
            format!("{}x{} / {}", a.nrows(), a.ncols(), b.nrows()),
        ));
    }
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singular("LU factorization hit a zero pivot".into()))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Spectral radius via the eigenvalues of a general complex matrix.
pub fn spectral_radius(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    match a.clone().try_schur(1e-14, 10_000) {
        Some(schur) => schur
            .eigenvalues()
            .map(|ev| ev.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending; ties are ordered by descending magnitude of
/// the eigenvector's first entry. Each eigenvector is scaled so its
/// largest-magnitude entry is real and positive.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    // symmetrise so tiny anti-Hermitian noise does not leak into the solver
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    let tie = 1e-12 * eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    order.sort_by(|&i, &j| {
        let (vi, vj) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        if (vi - vj).abs() <= tie {
            let fi = eig.eigenvectors[(0, i)].norm();
            let fj = eig.eigenvectors[(0, j)].norm();
            fj.partial_cmp(&fi).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            vi.partial_cmp(&vj).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let (mut best, mut mag) = (0, -1.0);
        for (r, z) in v.iter().enumerate() {
            if z.norm() > mag + 1e-12 {
                best = r;
                mag = z.norm();
            }
        }
        let phase = if mag > 0.0 { v[best].conj() / mag } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            vectors[(r, col)] = v[r] * phase;
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn solve_matches_known_solution() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0, 1.0), c(0.0, -1.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let x = CMat::from_row_slice(2, 1, &[c(1.0, -2.0), c(0.5, 0.25)]);
        let b = &a * &x;
        let got = solve(&a, &b).unwrap();
        assert!(relative_difference(&got, &x) < 1e-14);
    }

    #[test]
    fn singular_solve_is_rejected() {
        let a = CMat::zeros(2, 2);
        assert!(solve(&a, &CMat::identity(2, 2)).is_err());
    }

    #[test]
    fn hermitian_eigen_is_sorted_and_reconstructs() {
        let a = CMat::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.5, 0.5),
                c(0.0, 1.0),
                c(0.5, -0.5),
                c(-1.0, 0.0),
                c(0.25, 0.0),
                c(0.0, -1.0),
                c(0.25, 0.0),
                c(0.5, 0.0),
            ],
        );
        let (vals, w) = hermitian_eigen(&a);
        assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        let d = diag(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        let rebuilt = &w * d * w.adjoint();
        assert!(relative_difference(&rebuilt, &a) < 1e-13);
        assert!(unitarity_residual(&w) < 1e-13);
    }

    #[test]
    fn residual_helpers() {
        let u = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(unitarity_residual(&u) < 1e-15);
        assert!(symmetry_residual(&u) > 0.5);
        assert_eq!(hermiticity_residual(&CMat::zeros(2, 2)), 0.0);
        assert!((spectral_radius(&u) - 1.0).abs() < 1e-12);
    }
}

//! Volume-integral part of the time-delay matrix by tensor Gauss-Legendre
//! quadrature of the total fields.

use crate::error::{Error, Result};
use crate::linalg::{relative_difference, CMat, C64};
use crate::quadrature::Cell;

/// Total fields of every excitation at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFields {
    pub epsilon: f64,
    pub mu: f64,
    /// `e[p]` is the electric field excited by unit incoming mode `p`.
    pub e: Vec<[C64; 3]>,
    pub h: Vec<[C64; 3]>,
}

/// Evaluates the total fields of each port excitation inside the system.
pub trait FieldProvider: Sync {
    fn excitation_count(&self) -> usize;

    /// Cells whose union is the field region.
    fn region(&self) -> Vec<Cell>;

    /// Per-axis node counts for a base order; override to spend fewer nodes
    /// along axes where the fields are trivially smooth.
    fn quadrature_orders(&self, base: usize) -> [usize; 3] {
        [base; 3]
    }

    fn fields(&self, point: [f64; 3]) -> Result<PointFields>;
}

/// `Q̃_qp = ½ ∫ (ε E_q*·E_p + μ H_q*·H_p)` at a fixed base order.
///
/// Each quadrature node contributes six rows `√(wε/2) E`, `√(wμ/2) H` to a
/// sample matrix `F`, and `Q̃ = F†F`, which is Hermitian PSD by construction.
pub fn q_tilde(provider: &dyn FieldProvider, order: usize) -> Result<CMat> {
    if order == 0 {
        return Err(Error::invalid("quadrature_order", "must be positive"));
    }
    let m = provider.excitation_count();
    let orders = provider.quadrature_orders(order);
    let mut q = CMat::zeros(m, m);
    for cell in provider.region() {
        let points = cell.tensor_points(orders);
        let mut f = CMat::zeros(points.len() * 6, m);
        for (i, (point, w)) in points.iter().enumerate() {
            let pf = provider.fields(*point)?;
            if pf.e.len() != m || pf.h.len() != m {
                return Err(Error::dim("field samples", m, pf.e.len().min(pf.h.len())));
            }
            let se = (0.5 * w * pf.epsilon).sqrt();
            let sh = (0.5 * w * pf.mu).sqrt();
            for p in 0..m {
                for c in 0..3 {
                    f[(6 * i + c, p)] = pf.e[p][c] * se;
                    f[(6 * i + 3 + c, p)] = pf.h[p][c] * sh;
                }
            }
        }
        q += f.adjoint() * &f;
    }
    Ok((&q + q.adjoint()) * C64::new(0.5, 0.0))
}

/// Outcome of the order-doubling loop.
#[derive(Debug, Clone)]
pub struct QuadratureReport {
    pub q: CMat,
    /// Base order of the last evaluation.
    pub order: usize,
    /// Relative Frobenius change between the last two orders.
    pub rel_change: f64,
    pub converged: bool,
}

/// Doubles the base order from `base` until the relative change drops below
/// `tol` or `max_order` is passed; non-convergence is flagged, not an error.
pub fn q_tilde_converged(
    provider: &dyn FieldProvider,
    base: usize,
    tol: f64,
    max_order: usize,
) -> Result<QuadratureReport> {
    let mut order = base.max(1);
    let mut prev = q_tilde(provider, order)?;
    loop {
        let next_order = order * 2;
        if next_order > max_order {
            return Ok(QuadratureReport {
                q: prev,
                order,
                rel_change: f64::INFINITY,
                converged: false,
            });
        }
        let next = q_tilde(provider, next_order)?;
        let rel_change = relative_difference(&prev, &next);
        order = next_order;
        if rel_change < tol {
            return Ok(QuadratureReport {
                q: next,
                order,
                rel_change,
                converged: true,
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_residual, hermitian_eigen};

    struct Polynomial;

    impl FieldProvider for Polynomial {
        fn excitation_count(&self) -> usize {
            3
        }
        fn region(&self) -> Vec<Cell> {
            vec![Cell::planar((0.0, 1.0), (0.0, 2.0)), Cell::planar((1.0, 1.5), (0.0, 2.0))]
        }
        fn fields(&self, p: [f64; 3]) -> Result<PointFields> {
            let (x, y) = (p[0], p[1]);
            let z = C64::new(0.0, 0.0);
            Ok(PointFields {
                epsilon: 2.0,
                mu: 3.0,
                e: vec![
                    [C64::new(x, y), z, z],
                    [z, C64::new(1.0, -x * y), z],
                    [C64::new(y * y, 0.0), C64::new(0.0, x), z],
                ],
                h: vec![[z, z, C64::new(1.0, 0.0)], [z, z, C64::new(0.0, x)], [C64::new(x, x), z, z]],
            })
        }
    }

    struct Dark;

    impl FieldProvider for Dark {
        fn excitation_count(&self) -> usize {
            2
        }
        fn region(&self) -> Vec<Cell> {
            vec![Cell::solid((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))]
        }
        fn fields(&self, _: [f64; 3]) -> Result<PointFields> {
            let z = [C64::new(0.0, 0.0); 3];
            Ok(PointFields {
                epsilon: 1.0,
                mu: 1.0,
                e: vec![z; 2],
                h: vec![z; 2],
            })
        }
    }

    #[test]
    fn hermitian_psd_and_exact_on_polynomials() {
        let q = q_tilde(&Polynomial, 8).unwrap();
        assert!(hermiticity_residual(&q) == 0.0);
        let (vals, _) = hermitian_eigen(&q);
        assert!(vals[0] >= -1e-12 * vals[2]);
        // ½∫∫ (ε|x+jy|² + μ) over [0,1.5]x[0,2]
        let exact = 0.5 * (2.0 * (1.5f64.powi(3) / 3.0 * 2.0 + 1.5 * 8.0 / 3.0) + 3.0 * 3.0);
        assert!((q[(0, 0)].re - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn zero_fields_give_zero() {
        let q = q_tilde(&Dark, 4).unwrap();
        assert!(q.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn doubling_converges_on_polynomials() {
        let rep = q_tilde_converged(&Polynomial, 4, 1e-12, 64).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.order, 8);
        let rep = q_tilde_converged(&Polynomial, 4, 1e-12, 6).unwrap();
        assert!(!rep.converged);
    }
}

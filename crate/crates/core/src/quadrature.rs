//! Gauss-Legendre rules and their tensor products over axis-aligned cells.

use std::f64::consts::PI;

/// One-dimensional Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guess; exact for polynomials of degree `2n - 1`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Axis-aligned integration cell. Only the first `dims` axes are integrated;
/// the remaining coordinates are held at `lo` (e.g. `z = 0` for systems that
/// are invariant along `z`, giving per-unit-length quantities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub dims: usize,
}

impl Cell {
    pub fn planar(x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            lo: [x.0, y.0, 0.0],
            hi: [x.1, y.1, 0.0],
            dims: 2,
        }
    }

    pub fn solid(x: (f64, f64), y: (f64, f64), z: (f64, f64)) -> Self {
        Self {
            lo: [x.0, y.0, z.0],
            hi: [x.1, y.1, z.1],
            dims: 3,
        }
    }

    pub fn measure(&self) -> f64 {
        (0..self.dims).map(|d| self.hi[d] - self.lo[d]).product()
    }

    pub fn contains(&self, p: [f64; 3], slack: f64) -> bool {
        (0..self.dims).all(|d| p[d] >= self.lo[d] - slack && p[d] <= self.hi[d] + slack)
    }

    /// Tensor-product points and weights with `orders[d]` nodes on axis `d`.
    pub fn tensor_points(&self, orders: [usize; 3]) -> Vec<([f64; 3], f64)> {
        let rules: Vec<GaussLegendre> = (0..self.dims).map(|d| GaussLegendre::new(orders[d])).collect();
        let mut out = vec![(self.lo, 1.0)];
        for (d, rule) in rules.iter().enumerate() {
            let mapped: Vec<(f64, f64)> = rule.mapped(self.lo[d], self.hi[d]).collect();
            let mut next = Vec::with_capacity(out.len() * mapped.len());
            for (p, w) in &out {
                for &(x, wx) in &mapped {
                    let mut q = *p;
                    q[d] = x;
                    next.push((q, w * wx));
                }
            }
            out = next;
        }
        out
    }
}

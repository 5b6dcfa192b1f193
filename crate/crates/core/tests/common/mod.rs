//! Shared geometries for the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;
use wsdelay::cascade::QuadratureSettings;
use wsdelay::linalg::{permute_symmetric, relative_difference};
use wsdelay::modes::{
    enumerate_floquet_modes, enumerate_guide_modes, Family, FloquetPort, GuidePort, Medium, ModeSpec, Port, C0,
};
use wsdelay::reference::{
    fd_s_prime, CrossSection, DoubleStep, Facing, FdConfig, LayeredSlab, Orientation, ReferenceSystem,
    ShortedGuide, SolvedSystem, StepJunction,
};
use wsdelay::ws::{identity_report, q_tilde_converged, IdentityReport};
use wsdelay::CMat;

/// Guide width (m); TE1..TE3 propagate at [`omega`].
pub const A: f64 = 0.01;
pub const NARROW_Y0: f64 = 0.003;
pub const NARROW_W: f64 = 0.005;

pub fn omega() -> f64 {
    3.5 * PI / A * C0
}

pub fn quad() -> QuadratureSettings {
    QuadratureSettings::default()
}

pub fn guide_modes(width: f64, omega: f64, family: Family, count: usize) -> Vec<ModeSpec> {
    let port = GuidePort::new(width, Medium::vacuum()).unwrap();
    enumerate_guide_modes(&port, omega, family, count).unwrap()
}

pub fn strip() -> CrossSection {
    CrossSection::Strip { y0: 0.0, width: A }
}

pub fn shorted(family: Family, count: usize, length: f64) -> ShortedGuide {
    ShortedGuide::new(strip(), guide_modes(A, omega(), family, count), length, 0.0, Facing::PlusX).unwrap()
}

pub fn thru(count: usize, x_left: f64, length: f64) -> LayeredSlab {
    LayeredSlab::thru(strip(), guide_modes(A, omega(), Family::Te, count), x_left, length).unwrap()
}

/// Square Floquet cell, 10 modes per port, `ε_r = 4` slab between vacuum gaps.
pub fn slab_omega() -> f64 {
    2.0 * PI * C0 / 0.015
}

pub fn slab() -> LayeredSlab {
    let port = FloquetPort::new(0.01, 0.01, Medium::vacuum()).unwrap();
    let modes = enumerate_floquet_modes(&port, slab_omega(), 10).unwrap();
    LayeredSlab::new(
        CrossSection::from_port(&Port::Floquet(port), 0.0),
        modes,
        0.0,
        0.004,
        0.003,
        Medium::relative(4.0, 1.0).unwrap(),
    )
    .unwrap()
}

pub fn step(
    x_junction: f64,
    wide_length: f64,
    narrow_length: f64,
    ports: (usize, usize),
    orientation: Orientation,
) -> StepJunction {
    StepJunction {
        medium: Medium::vacuum(),
        wide_y0: 0.0,
        wide_width: A,
        narrow_y0: NARROW_Y0,
        narrow_width: NARROW_W,
        x_junction,
        wide_length,
        narrow_length,
        wide_modes: 16,
        narrow_modes: 8,
        wide_ports: ports.0,
        narrow_ports: ports.1,
        orientation,
    }
}

pub fn double_step(ports: usize) -> DoubleStep {
    DoubleStep {
        medium: Medium::vacuum(),
        wide_y0: 0.0,
        wide_width: A,
        narrow_y0: NARROW_Y0,
        narrow_width: NARROW_W,
        x_junction: 0.0,
        narrow_length: 0.004,
        left_length: 0.003,
        right_length: 0.003,
        wide_modes: 16,
        narrow_modes: 8,
        left_ports: ports,
        right_ports: ports,
    }
}

/// Solve, integrate `Q̃` and build the identity report.
pub fn report<R: ReferenceSystem>(sys: &R, omega: f64) -> (R::Solved, IdentityReport) {
    let sol = sys.solve(omega).unwrap();
    let q = quad();
    let qt = q_tilde_converged(&sol, q.base, q.tol, q.max_order).unwrap();
    assert!(qt.converged, "quadrature did not converge: {:e}", qt.rel_change);
    let rep = identity_report(sol.snapshot(), &qt.q).unwrap();
    (sol, rep)
}

/// Finite-difference `S'` in the report's (propagating-first) ordering.
pub fn fd_prime<R: ReferenceSystem>(sys: &R, omega: f64, rep: &IdentityReport) -> CMat {
    let fd = fd_s_prime(|w| sys.s_matrix(w), omega, FdConfig::default()).unwrap();
    permute_symmetric(&fd, &rep.permutation)
}

pub fn rel(a: &CMat, b: &CMat) -> f64 {
    relative_difference(a, b)
}

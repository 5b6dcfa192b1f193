mod common;

use common::*;
use wsdelay::cascade::{compose_q_tilde, compose_snapshots};
use wsdelay::linalg::{hermitian_eigen, unitarity_residual};
use wsdelay::modes::{enumerate_floquet_modes, Family, FloquetPort, GuidePort, Medium, Port, C0};
use wsdelay::reference::{
    CrossSection, Facing, LayeredSlab, Orientation, ReferenceSystem, ShortedGuide, SolvedSystem,
};
use wsdelay::ws::{
    gamma, i_r_permutation, q_blocks, q_tilde_converged, s_prime_from_q, spatial_shift, ws_modes, ScatteringSnapshot,
    Tolerances, WsBundle,
};

#[test]
fn single_mode_short_has_delay_two_l_over_group_velocity() {
    // only TE1 propagates
    let w = 1.5 * std::f64::consts::PI / A * C0;
    let len = 0.013;
    let sys = ShortedGuide::new(strip(), guide_modes(A, w, Family::Te, 1), len, 0.0, Facing::PlusX).unwrap();
    let (_, rep) = report(&sys, w);
    let k = w / C0;
    let beta = (k * k - (std::f64::consts::PI / A).powi(2)).sqrt();
    let expect = 2.0 * len * k / (C0 * beta);
    assert!((rep.q[(0, 0)].re - expect).abs() < 1e-10 * expect);
    assert!(rep.q[(0, 0)].im.abs() < 1e-12 * expect);
}

#[test]
fn residual_is_small_for_every_reference_system() {
    let w = omega();
    let reps = [
        report(&shorted(Family::Tm, 8, 0.02), w).1,
        report(&thru(8, 0.0, 0.015), w).1,
        report(&slab(), slab_omega()).1,
        report(&step(0.0, 0.005, 0.004, (16, 8), Orientation::WideLeft), w).1,
    ];
    for rep in &reps {
        assert!(rep.residual.unwrap().value < 1e-10);
    }
}

#[test]
fn block_residuals_vanish_on_the_step() {
    let (_, rep) = report(&step(0.0, 0.002, 0.003, (16, 8), Orientation::WideLeft), omega());
    let snap = &rep.snapshot;
    let blocks = q_blocks(&rep.q_tilde, &snap.s, &rep.corrections, &snap.modes).unwrap();
    let r = blocks
        .rhs_residuals(&snap.s, snap.s_prime.as_ref().unwrap(), &rep.corrections)
        .unwrap();
    for v in [r.pp, r.pe, r.ep, r.ee] {
        assert!(v < 1e-10, "{r:?}");
    }
}

#[test]
fn gamma_reconstructs_the_analytic_derivative() {
    let (_, rep) = report(&double_step(16), omega());
    let g = gamma(&rep.snapshot.s, &rep.snapshot.modes, Tolerances::default()).unwrap();
    let sp = s_prime_from_q(&g, &rep.q).unwrap();
    assert!(rel(&sp, rep.snapshot.s_prime.as_ref().unwrap()) < 1e-10);
}

fn oblique_cell_slab() -> (LayeredSlab, f64) {
    // λ = 8 mm in a 10 mm cell: (±1,0) and (0,±1) propagate
    let w = 2.0 * std::f64::consts::PI * C0 / 0.008;
    let port = FloquetPort::new(0.01, 0.01, Medium::vacuum()).unwrap();
    let modes = enumerate_floquet_modes(&port, w, 18).unwrap();
    let sys = LayeredSlab::new(
        CrossSection::from_port(&Port::Floquet(port), 0.0),
        modes,
        0.0,
        0.002,
        0.0025,
        Medium::relative(2.5, 1.0).unwrap(),
    )
    .unwrap();
    (sys, w)
}

#[test]
fn floquet_pairs_keep_the_reversed_symmetry() {
    let (sys, w) = oblique_cell_slab();
    let (_, rep) = report(&sys, w);
    let mp = rep.snapshot.propagating_count();
    assert_eq!(mp, 20);
    assert!(rep.residual.unwrap().value < 1e-10);
    let ir = i_r_permutation(&rep.snapshot.modes[..mp]).unwrap();
    assert!(rep.snapshot.symmetry_residual(Some(&ir)) < 1e-10);
    assert!((&ir * &ir - wsdelay::CMat::identity(mp, mp)).norm() == 0.0);
}

#[test]
fn ws_modes_diagonalise_the_scattering_matrix() {
    let (sys, w) = oblique_cell_slab();
    let (_, rep) = report(&sys, w);
    let mp = rep.snapshot.propagating_count();
    let ir = i_r_permutation(&rep.snapshot.modes[..mp]).unwrap();
    let sp = rep.snapshot.s_prime.as_ref().unwrap();
    let sp_pp = wsdelay::linalg::block(sp, 0, 0, mp, mp);
    let modes = ws_modes(&rep.q_prop(), &rep.snapshot.s_pp(), Some(&sp_pp), Some(&ir), Tolerances::default()).unwrap();
    assert!(unitarity_residual(&modes.w) < 1e-10);
    if !modes.degenerate {
        assert!(modes.s_diag_residual < 1e-8);
    }
    assert!(modes.delays.iter().all(|&d| d > 0.0));
}

/// Step at distance `delta` from the wide port, narrow guide shorted 4 mm
/// behind the step.
fn stepped_short(delta: f64) -> Vec<f64> {
    let w = omega();
    let a = step(delta, delta, 0.002, (16, 8), Orientation::WideLeft).solve(w).unwrap();
    let narrow = GuidePort::new(NARROW_W, Medium::vacuum()).unwrap();
    let nm = wsdelay::modes::enumerate_guide_modes(&narrow, w, Family::Te, 8).unwrap();
    let short = ShortedGuide::new(
        CrossSection::Strip {
            y0: NARROW_Y0,
            width: NARROW_W,
        },
        nm,
        0.004,
        delta + 0.002,
        Facing::MinusX,
    )
    .unwrap()
    .solve(w)
    .unwrap();
    let (c, maps) = compose_snapshots(a.snapshot(), short.snapshot()).unwrap();
    let q = quad();
    let qa = q_tilde_converged(&a, q.base, q.tol, q.max_order).unwrap().q;
    let qb = q_tilde_converged(&short, q.base, q.tol, q.max_order).unwrap().q;
    let (c, perm): (ScatteringSnapshot, _) = c.propagating_first();
    let qc = wsdelay::linalg::permute_symmetric(&compose_q_tilde(&qa, &qb, &maps).unwrap(), &perm);
    let bundle = WsBundle::assemble(&c, qc, Tolerances::default()).unwrap();
    spatial_shift(&bundle.delays)
}

#[test]
fn stepped_short_delay_tracks_the_step_position() {
    let near = stepped_short(0.0003);
    let far = stepped_short(0.0013);
    // the fastest WS mode bounces off the step: moving the step 1 mm
    // further adds 2 mm of path, travelled at a group index between that of
    // the fastest and slowest propagating wide-guide mode
    let k = omega() / C0;
    let slowest = k / (k * k - (3.0 * std::f64::consts::PI / A).powi(2)).sqrt();
    let moved = far[0] - near[0];
    assert!(moved > 0.002 && moved < 0.002 * slowest, "moved {moved}");
    // the short lies much deeper and its mode is slower
    assert!(near[0] < 0.25 * near[near.len() - 1]);
}

#[test]
fn hermitian_delay_spectrum_is_positive_for_lossless_systems() {
    let (_, rep) = report(&double_step(16), omega());
    let (eig, _) = hermitian_eigen(&rep.q_prop());
    assert!(eig.iter().all(|&d| d > 0.0), "{eig:?}");
}

//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout; the
//! process exits non-zero if any criterion fails.

mod common;

use common::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};
use wsdelay::cascade::{cascade_against, cascade_full};
use wsdelay::linalg::{hermiticity_residual, hermitian_eigen, select, J};
use wsdelay::modes::{gram_residual, Family, FloquetPort, GuidePort, Medium, Port, C0};
use wsdelay::reference::{central_difference, Orientation, ReferenceSystem, SolvedSystem};
use wsdelay::ws::{
    corrections, gamma, gamma_residual, i_r_permutation, identity_report, q_tilde_converged, s_prime_from_q,
    spatial_shift, ws_rhs, Tolerances,
};
use wsdelay::C64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: &[(bool, String)]) -> Outcome {
    Outcome {
        pass: checks.iter().all(|c| c.0),
        detail: checks.iter().map(|c| c.1.as_str()).collect::<Vec<_>>().join("; "),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> (bool, String) {
    let t = elapsed.as_secs_f64();
    (t < limit_s, format!("runtime {t:.2} s (limit {limit_s} s)"))
}

fn below(name: &str, value: f64, limit: f64) -> (bool, String) {
    (value < limit, format!("{name} {value:.2e} < {limit:.0e}"))
}

fn shorted_guide_identity() -> Outcome {
    let t = Instant::now();
    let sys = shorted(Family::Te, 8, 0.02);
    let (_, rep) = report(&sys, omega());
    let res = rep.residual.unwrap().value;
    let p = rep.snapshot.propagating_count();
    outcome(&[
        (p == 3, format!("{p} propagating of {}", rep.snapshot.len())),
        below("residual", res, 1e-8),
        within(t.elapsed(), 1.0),
    ])
}

fn step_truncation_trend() -> Outcome {
    let t = Instant::now();
    let sys = step(0.0, 0.001, 0.001, (16, 8), Orientation::WideLeft);
    let sol = sys.solve(omega()).unwrap();
    let q = quad();
    let qt = q_tilde_converged(&sol, q.base, q.tol, q.max_order).unwrap().q;
    let snap = sol.snapshot();
    let (nw, nn) = (16, 8);
    let pw = snap.modes[..nw].iter().filter(|m| m.is_propagating()).count();
    let pn = snap.modes[nw..].iter().filter(|m| m.is_propagating()).count();
    let mut residuals = Vec::new();
    for extra in 0..=(nw - pw) {
        let keep: Vec<usize> = (0..(pw + extra).min(nw))
            .chain(nw..nw + (pn + extra).min(nn))
            .collect();
        let rep = identity_report(&snap.restricted(&keep), &select(&qt, &keep, &keep)).unwrap();
        residuals.push(rep.residual.unwrap().value);
    }
    let non_increasing = residuals.windows(2).all(|w| w[1] <= w[0]);
    let ratio = residuals.last().unwrap() / residuals[0];
    outcome(&[
        (residuals.len() >= 5, format!("{} truncation points", residuals.len())),
        (
            non_increasing,
            format!("non-increasing {:.1e} .. {:.1e}", residuals[0], residuals.last().unwrap()),
        ),
        below("final/initial", ratio, 1e-2),
        within(t.elapsed(), 10.0),
    ])
}

fn gamma_checks<R: ReferenceSystem>(name: &str, sys: &R, omega: f64) -> Vec<(bool, String)> {
    let (_, rep) = report(sys, omega);
    let g = gamma(&rep.snapshot.s, &rep.snapshot.modes, Tolerances::default()).unwrap();
    let g_res = gamma_residual(&g, &rep.snapshot.s, &rep.corrections);
    let fd = fd_prime(sys, omega, &rep);
    let sp = s_prime_from_q(&g, &rep.q).unwrap();
    vec![
        below(&format!("{name} gamma"), g_res, 1e-12),
        below(&format!("{name} S'"), rel(&sp, &fd), 1e-5),
    ]
}

fn inversion_free_derivative() -> Outcome {
    let t = Instant::now();
    let w = omega();
    let mut checks = Vec::new();
    checks.extend(gamma_checks("short TE", &shorted(Family::Te, 8, 0.02), w));
    checks.extend(gamma_checks("short TM", &shorted(Family::Tm, 8, 0.02), w));
    checks.extend(gamma_checks("thru", &thru(8, 0.0, 0.015), w));
    checks.extend(gamma_checks("slab", &slab(), slab_omega()));
    checks.extend(gamma_checks("step", &step(0.0, 0.005, 0.004, (16, 8), Orientation::WideLeft), w));
    checks.extend(gamma_checks("double step", &double_step(16), w));
    checks.push(within(t.elapsed(), 5.0));
    outcome(&checks)
}

/// `dβ/dω` of guide mode `n` from `β² = (ω/c)² − (nπ/a)²`.
fn guide_beta_prime(n: u32, omega: f64) -> f64 {
    let k = omega / C0;
    let kc = n as f64 * std::f64::consts::PI / A;
    k / (C0 * (k * k - kc * kc).sqrt())
}

fn delay_spectrum() -> Outcome {
    let mut checks = Vec::new();
    let len = 0.02;
    for family in [Family::Te, Family::Tm] {
        let (_, rep) = report(&shorted(family, 8, len), omega());
        let (delays, _) = hermitian_eigen(&rep.q_prop());
        let mut expect: Vec<f64> = rep
            .snapshot
            .modes
            .iter()
            .filter(|m| m.is_propagating())
            .map(|m| match m.index {
                wsdelay::modes::ModeIndex::Guide(n) => 2.0 * len * guide_beta_prime(n, omega()),
                _ => unreachable!(),
            })
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let worst = delays
            .iter()
            .zip(&expect)
            .map(|(d, e)| ((d - e) / e).abs())
            .fold(0.0, f64::max);
        checks.push(below(&format!("{family} eigenvalues vs 2L dβ/dω"), worst, 1e-8));

        let eig = rep.q_prop().schur().eigenvalues().unwrap();
        let max_im = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let max_abs = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        checks.push(below(&format!("{family} imaginary part"), max_im / max_abs, 1e-12));

        if family == Family::Tm {
            // TM0 is the TEM mode of the parallel-plate guide
            let shift = spatial_shift(&delays)[0];
            checks.push(below("TEM shift vs 2L", ((shift - 2.0 * len) / (2.0 * len)).abs(), 1e-6));
        }
    }
    // TE1 shift approaches 2L from above as the frequency grows
    let mut shifts = Vec::new();
    for factor in [1.5, 3.5, 7.5, 15.5] {
        let w = factor * std::f64::consts::PI / A * C0;
        let port = GuidePort::new(A, Medium::vacuum()).unwrap();
        let count = port.propagating_count(w, Family::Te) + 3;
        let sys = wsdelay::reference::ShortedGuide::new(
            strip(),
            guide_modes(A, w, Family::Te, count),
            len,
            0.0,
            wsdelay::reference::Facing::PlusX,
        )
        .unwrap();
        let (_, rep) = report(&sys, w);
        let (delays, _) = hermitian_eigen(&rep.q_prop());
        shifts.push(spatial_shift(&delays)[0] / (2.0 * len));
    }
    let approaching = shifts.windows(2).all(|w| w[1] < w[0]) && shifts.iter().all(|&s| s > 1.0);
    checks.push((approaching, format!("TE1 shift/2L {shifts:.4?}")));
    outcome(&checks)
}

fn periodic_identity() -> Outcome {
    let (_, rep) = report(&slab(), slab_omega());
    let res = rep.residual.unwrap().value;
    let mp = rep.snapshot.propagating_count();
    let ir = i_r_permutation(&rep.snapshot.modes[..mp]).unwrap();
    let asym = rep.snapshot.symmetry_residual(Some(&ir));
    let headline = 2.7e-6;
    outcome(&[
        below("residual", res, 1e-8),
        below("I_r S_PP asymmetry", asym, 1e-10),
        (
            res <= 10.0 * headline,
            format!(
                "residual order 1e{} at or below the reported 2.7e-6 (no discretisation error in the analytic slab)",
                res.log10().floor()
            ),
        ),
    ])
}

fn cascade_correctness() -> Outcome {
    let t = Instant::now();
    let w = omega();
    let q = quad();
    let mut checks = Vec::new();

    let t1 = thru(6, 0.0, 0.01).solve(w).unwrap();
    let t2 = thru(6, 0.01, 0.007).solve(w).unwrap();
    let tm = thru(6, 0.0, 0.017).solve(w).unwrap();
    let r = cascade_full((t1.snapshot(), &t1), (t2.snapshot(), &t2), (tm.snapshot(), &tm), q).unwrap();
    checks.push(below("thru∘thru S", r.err_s, 1e-12));
    checks.push(below("thru∘thru Q", r.err_q, 1e-12));

    let modes = guide_modes(A, w, Family::Te, 6);
    let sh = wsdelay::reference::ShortedGuide::new(strip(), modes.clone(), 0.006, 0.01, wsdelay::reference::Facing::MinusX)
        .unwrap()
        .solve(w)
        .unwrap();
    let shm = wsdelay::reference::ShortedGuide::new(strip(), modes, 0.016, 0.0, wsdelay::reference::Facing::MinusX)
        .unwrap()
        .solve(w)
        .unwrap();
    let r = cascade_full((t1.snapshot(), &t1), (sh.snapshot(), &sh), (shm.snapshot(), &shm), q).unwrap();
    checks.push(below("thru∘short S", r.err_s, 1e-8));
    checks.push(below("thru∘short Q", r.err_q, 1e-8));

    let ln = 0.004;
    let split = 0.002;
    let mono = double_step(6).solve(w).unwrap();
    let mono_q = q_tilde_converged(&mono, q.base, q.tol, q.max_order).unwrap().q;
    let mut err_s = Vec::new();
    let mut err_q = Vec::new();
    for shared in 1..=8 {
        let a = step(0.0, 0.003, split, (6, shared), Orientation::WideLeft).solve(w).unwrap();
        let b = step(ln, 0.003, ln - split, (6, shared), Orientation::NarrowLeft).solve(w).unwrap();
        let r = cascade_against((a.snapshot(), &a), (b.snapshot(), &b), mono.snapshot(), &mono_q, q).unwrap();
        err_s.push(r.err_s);
        err_q.push(r.err_q);
    }
    let monotone = |e: &[f64]| e.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    checks.push((monotone(&err_s), format!("err(S) monotone {:.1e} .. {:.1e}", err_s[0], err_s[7])));
    checks.push((monotone(&err_q), format!("err(Q) monotone {:.1e} .. {:.1e}", err_q[0], err_q[7])));
    checks.push(below("double step err(S)", err_s[7], 1e-6));
    checks.push(below("double step err(Q)", err_q[7], 1e-6));
    checks.push(within(t.elapsed(), 30.0));
    outcome(&checks)
}

fn propagating_only() -> Outcome {
    let w = omega();
    let zero = C64::new(0.0, 0.0);
    let mut snaps = vec![
        ("thru", thru(3, 0.0, 0.015).solve(w).unwrap().snapshot().clone()),
        ("step", step(0.0, 0.002, 0.002, (3, 1), Orientation::WideLeft).solve(w).unwrap().snapshot().clone()),
    ];
    let port = FloquetPort::new(0.01, 0.01, Medium::vacuum()).unwrap();
    let fm = wsdelay::modes::enumerate_floquet_modes(&port, slab_omega(), 2).unwrap();
    let sl = wsdelay::reference::LayeredSlab::new(
        wsdelay::reference::CrossSection::from_port(&Port::Floquet(port), 0.0),
        fm,
        0.0,
        0.004,
        0.003,
        Medium::relative(4.0, 1.0).unwrap(),
    )
    .unwrap();
    snaps.push(("slab", sl.solve(slab_omega()).unwrap().snapshot().clone()));
    let mut checks = Vec::new();
    for (name, snap) in &mut snaps {
        let all_prop = snap.propagating_count() == snap.len();
        let corr = corrections(&snap.modes).unwrap();
        let sp = snap.s_prime.as_ref().unwrap();
        let general = ws_rhs(&snap.s, sp, &corr).unwrap();
        let classic = (snap.s.adjoint() * J) * sp;
        let exact = general == classic;
        let zeros = corr.entries.iter().all(|e| e.lambda_plus == zero && e.nu_minus == zero);
        checks.push((all_prop && exact && zeros, format!("{name}: RHS == jS†S' {exact}, Λ₊ = N₋ = 0 {zeros}")));
    }
    outcome(&checks)
}

fn structural<R: ReferenceSystem>(name: &str, sys: &R, omega: f64, checks: &mut Vec<(bool, String)>) {
    let q = quad();
    let sol = sys.solve(omega).unwrap();
    let qt = q_tilde_converged(&sol, q.base, q.tol, q.max_order).unwrap().q;
    let (eig, _) = hermitian_eigen(&qt);
    let norm2 = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let herm = hermiticity_residual(&qt);
    checks.push((
        herm < 1e-14 && min >= -1e-10 * norm2,
        format!("{name} Q̃ hermiticity {herm:.1e}, min eig/‖Q̃‖ {:.1e}", min / norm2),
    ));
    let (snap, _) = sol.snapshot().propagating_first();
    checks.push(below(&format!("{name} unitarity"), snap.unitarity_residual(), 1e-10));
}

fn structural_suites() -> Outcome {
    let w = omega();
    let mut checks = Vec::new();
    structural("short", &shorted(Family::Te, 8, 0.02), w, &mut checks);
    structural("thru", &thru(8, 0.0, 0.015), w, &mut checks);
    structural("slab", &slab(), slab_omega(), &mut checks);
    structural("step", &step(0.0, 0.005, 0.004, (16, 8), Orientation::WideLeft), w, &mut checks);
    structural("double step", &double_step(16), w, &mut checks);

    let guide = Port::Guide(GuidePort::new(A, Medium::vacuum()).unwrap());
    let fport = FloquetPort::new(0.01, 0.01, Medium::vacuum()).unwrap();
    let fm = wsdelay::modes::enumerate_floquet_modes(&fport, slab_omega(), 10).unwrap();
    let gram = [
        gram_residual(&guide, &guide_modes(A, w, Family::Te, 16), 64),
        gram_residual(&guide, &guide_modes(A, w, Family::Tm, 16), 64),
        gram_residual(&Port::Floquet(fport), &fm, 64),
    ];
    let worst = gram.iter().cloned().fold(0.0, f64::max);
    checks.push(below("gram", worst, 1e-10));

    // central difference on the shorted guide against its analytic S'
    let sys = shorted(Family::Te, 4, 0.02);
    let exact = sys.solve(w).unwrap().snapshot().s_prime.clone().unwrap();
    let f = |x: f64| sys.s_matrix(x);
    let err = |d: f64| rel(&central_difference(&f, w, d).unwrap(), &exact);
    let (e1, e2) = (err(2e-3 * w), err(1e-3 * w));
    let ratio = e1 / e2;
    checks.push(((3.6..4.4).contains(&ratio), format!("FD halving ratio {ratio:.3}")));
    outcome(&checks)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 generalized identity, shorted guide", shorted_guide_identity),
        ("2 convergence trend, step junction", step_truncation_trend),
        ("3 inversion-free S'", inversion_free_derivative),
        ("4 WS-mode delays", delay_spectrum),
        ("5 periodic identity, dielectric slab", periodic_identity),
        ("6 cascade correctness", cascade_correctness),
        ("7 propagating-only degeneration", propagating_only),
        ("8 structural suites", structural_suites),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Parallel-plate step junctions solved by Galerkin mode matching.
//!
//! Only TE modes (`E` along `z`) are involved; a step in `y` of a guide that
//! is uniform in `z` does not couple them to TM modes. At the junction plane
//! the wide-side transverse `E` is projected on the wide modes (the narrow
//! field extended by zero over the flange) and the transverse `H` on the
//! narrow modes, with the overlap matrix `X_ik = ∫ w_i u_k` over the aperture.

use std::f64::consts::PI;

use super::sections::{Section, SectionedSolution};
use super::{check_length, Dual, ReferenceSystem};
use crate::error::{Error, Result};
use crate::linalg::{self, condition_number, select, CMat, C64};
use crate::modes::{enumerate_guide_modes, Family, GuidePort, Medium, ModeSpec};
use crate::ws::ScatteringSnapshot;

/// Largest condition number accepted for the matching system.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Wide guide on the left (port 1), narrow guide on the right (port 2).
    WideLeft,
    /// Narrow guide on the left (port 1), wide guide on the right (port 2).
    NarrowLeft,
}

/// A wide strip `y ∈ [wide_y0, wide_y0 + wide_width]` meeting a narrow strip
/// `y ∈ [narrow_y0, narrow_y0 + narrow_width]` at `x = x_junction`.
///
/// `wide_modes`/`narrow_modes` are the modes kept in the matching; the
/// ports expose only the first `wide_ports`/`narrow_ports` of them. Ports
/// sit `wide_length` and `narrow_length` away from the junction.
#[derive(Debug, Clone)]
pub struct StepJunction {
    pub medium: Medium,
    pub wide_y0: f64,
    pub wide_width: f64,
    pub narrow_y0: f64,
    pub narrow_width: f64,
    pub x_junction: f64,
    pub wide_length: f64,
    pub narrow_length: f64,
    pub wide_modes: usize,
    pub narrow_modes: usize,
    pub wide_ports: usize,
    pub narrow_ports: usize,
    pub orientation: Orientation,
}

/// Mode counts in the ratio of the widths, as mode matching requires to
/// avoid relative-convergence artifacts.
pub fn balanced_wide_count(wide_width: f64, narrow_width: f64, narrow_modes: usize) -> usize {
    ((narrow_modes as f64) * wide_width / narrow_width).round().max(1.0) as usize
}

/// `∫ √(2/a) sin(iπ(y − y_a)/a) · √(2/b) sin(kπ(y − y_b)/b) dy` over the
/// narrow strip `[y_b, y_b + b]`.
pub fn overlap(y_a: f64, a: f64, y_b: f64, b: f64, i: u32, k: u32) -> f64 {
    let p = i as f64 * PI / a;
    let q = k as f64 * PI / b;
    let phi = p * (y_b - y_a);
    let cos_int = |s: f64| {
        if s.abs() <= 1e-12 * (p + q) {
            b * phi.cos()
        } else {
            ((s * b + phi).sin() - phi.sin()) / s
        }
    };
    (2.0 / a).sqrt() * (2.0 / b).sqrt() * 0.5 * (cos_int(p - q) - cos_int(p + q))
}

fn overlap_matrix(wide: (f64, f64), narrow: (f64, f64), nw: usize, nn: usize) -> Vec<Vec<f64>> {
    (0..nw)
        .map(|i| (0..nn).map(|k| overlap(wide.0, wide.1, narrow.0, narrow.1, i as u32 + 1, k as u32 + 1)).collect())
        .collect()
}

/// Value and derivative matrices filled entry by entry from duals.
struct DualMat {
    value: CMat,
    deriv: CMat,
}

impl DualMat {
    fn zeros(r: usize, c: usize) -> Self {
        Self {
            value: CMat::zeros(r, c),
            deriv: CMat::zeros(r, c),
        }
    }

    fn set(&mut self, r: usize, c: usize, d: Dual) {
        self.value[(r, c)] = d.value;
        self.deriv[(r, c)] = d.deriv;
    }
}

/// Solve `K U = R` and `K U' = R' − K'U`, rejecting ill-conditioned `K`.
fn solve_dual(k: &DualMat, r: &DualMat) -> Result<(CMat, CMat)> {
    let condition = condition_number(&k.value);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let u = linalg::solve(&k.value, &r.value)?;
    let up = linalg::solve(&k.value, &(&r.deriv - &k.deriv * &u))?;
    Ok((u, up))
}

/// `S = E S_J E` and its derivative for diagonal port-shift phases `E`.
fn shift(sj: &CMat, sjp: &CMat, e: &[Dual]) -> (CMat, CMat) {
    let n = e.len();
    let s = CMat::from_fn(n, n, |i, j| e[i].value * sj[(i, j)] * e[j].value);
    let sp = CMat::from_fn(n, n, |i, j| {
        e[i].deriv * sj[(i, j)] * e[j].value + e[i].value * sjp[(i, j)] * e[j].value + e[i].value * sj[(i, j)] * e[j].deriv
    });
    (s, sp)
}

fn guide_modes(medium: Medium, width: f64, omega: f64, count: usize) -> Result<Vec<ModeSpec>> {
    let port = GuidePort::new(width, medium)?;
    enumerate_guide_modes(&port, omega, Family::Te, count)
}

/// Excitation matrix: column `p` is port mode `ports[p]` with amplitude `e`.
fn incidence(e: &[Dual], ports: &[usize]) -> CMat {
    let mut inc = CMat::zeros(e.len(), ports.len());
    for (p, &i) in ports.iter().enumerate() {
        inc[(i, p)] = e[i].value;
    }
    inc
}

fn rows(m: &CMat, r0: usize, n: usize) -> CMat {
    linalg::block(m, r0, 0, n, m.ncols())
}

impl StepJunction {
    fn validate(&self) -> Result<()> {
        check_length("wide_width", self.wide_width, false)?;
        check_length("narrow_width", self.narrow_width, false)?;
        check_length("wide_length", self.wide_length, true)?;
        check_length("narrow_length", self.narrow_length, true)?;
        let slack = 1e-12 * self.wide_width;
        if self.narrow_y0 < self.wide_y0 - slack
            || self.narrow_y0 + self.narrow_width > self.wide_y0 + self.wide_width + slack
        {
            return Err(Error::invalid("offset", "narrow aperture must lie inside the wide cross-section"));
        }
        if self.wide_modes == 0 || self.narrow_modes == 0 {
            return Err(Error::invalid("count_m", "mode counts must be positive"));
        }
        if self.wide_ports > self.wide_modes || self.narrow_ports > self.narrow_modes {
            return Err(Error::invalid("count_m", "port mode counts cannot exceed the matched mode counts"));
        }
        if self.wide_ports == 0 || self.narrow_ports == 0 {
            return Err(Error::invalid("count_m", "each port needs at least one mode"));
        }
        Ok(())
    }

    /// Mode-matched junction at the junction plane: `[b; c] = S_J [a; d]`
    /// with `a`, `b` the wide-side waves towards/away from the junction and
    /// `c`, `d` the narrow-side waves away from/towards it.
    fn junction(&self, wide: &[ModeSpec], narrow: &[ModeSpec]) -> Result<(CMat, CMat)> {
        let (nw, nn) = (wide.len(), narrow.len());
        let x = overlap_matrix((self.wide_y0, self.wide_width), (self.narrow_y0, self.narrow_width), nw, nn);
        let n = nw + nn;
        let mut k = DualMat::zeros(n, n);
        let mut r = DualMat::zeros(n, n);
        let one = Dual::one();
        for (i, wm) in wide.iter().enumerate() {
            let w = Dual::norm(wm);
            k.set(i, i, w);
            r.set(i, i, -w);
            for (kk, nm) in narrow.iter().enumerate() {
                let u = Dual::norm(nm);
                let xik = C64::new(x[i][kk], 0.0);
                k.set(i, nw + kk, -u.scale(xik));
                r.set(i, nw + kk, u.scale(xik));
                k.set(nw + kk, i, (one / w).scale(xik));
                r.set(nw + kk, i, (one / w).scale(xik));
            }
        }
        for (kk, nm) in narrow.iter().enumerate() {
            let inv = one / Dual::norm(nm);
            k.set(nw + kk, nw + kk, inv);
            r.set(nw + kk, nw + kk, inv);
        }
        solve_dual(&k, &r)
    }
}

impl ReferenceSystem for StepJunction {
    type Solved = SectionedSolution;

    fn solve(&self, omega: f64) -> Result<SectionedSolution> {
        self.validate()?;
        let wide = guide_modes(self.medium, self.wide_width, omega, self.wide_modes)?;
        let narrow = guide_modes(self.medium, self.narrow_width, omega, self.narrow_modes)?;
        let (nw, nn) = (wide.len(), narrow.len());
        let (sj, sjp) = self.junction(&wide, &narrow)?;
        let e: Vec<Dual> = wide
            .iter()
            .map(|m| Dual::propagator(Dual::beta(m), self.wide_length))
            .chain(narrow.iter().map(|m| Dual::propagator(Dual::beta(m), self.narrow_length)))
            .collect();
        let (s_full, sp_full) = shift(&sj, &sjp, &e);
        let ports: Vec<usize> = (0..self.wide_ports).chain(nw..nw + self.narrow_ports).collect();
        let s = select(&s_full, &ports, &ports);
        let sp = select(&sp_full, &ports, &ports);
        let mut modes: Vec<ModeSpec> = wide[..self.wide_ports].to_vec();
        modes.extend(narrow[..self.narrow_ports].iter().map(|m| m.with_port(1)));

        let inc = incidence(&e, &ports);
        let out = &sj * &inc;
        let sections = vec![
            Section {
                x0: -self.wide_length,
                x1: 0.0,
                y0: self.wide_y0,
                width: self.wide_width,
                modes: wide,
                fwd: rows(&inc, 0, nw),
                x_fwd: 0.0,
                bwd: rows(&out, 0, nw),
                x_bwd: 0.0,
            },
            Section {
                x0: 0.0,
                x1: self.narrow_length,
                y0: self.narrow_y0,
                width: self.narrow_width,
                modes: narrow,
                fwd: rows(&out, nw, nn),
                x_fwd: 0.0,
                bwd: rows(&inc, nw, nn),
                x_bwd: 0.0,
            },
        ];
        let forward = ScatteringSnapshot::new(omega, modes, s, Some(sp))?;
        let (mw, mn) = (self.wide_ports, self.narrow_ports);
        let (order, snapshot, mirrored) = match self.orientation {
            Orientation::WideLeft => ((0..mw + mn).collect(), forward, false),
            Orientation::NarrowLeft => {
                let order: Vec<usize> = (mw..mw + mn).chain(0..mw).collect();
                let mut snap = forward.permuted(&order);
                for (i, m) in snap.modes.iter_mut().enumerate() {
                    *m = m.with_port(usize::from(i >= mn));
                }
                (order, snap, true)
            }
        };
        Ok(SectionedSolution {
            sections,
            origin: self.x_junction,
            mirrored,
            order,
            medium: self.medium,
            snapshot,
        })
    }
}

/// Wide → narrow → wide: two junctions `narrow_length` apart, solved as one
/// linear system (the monolithic reference for cascading). Both wide
/// sections share the same cross-section.
#[derive(Debug, Clone)]
pub struct DoubleStep {
    pub medium: Medium,
    pub wide_y0: f64,
    pub wide_width: f64,
    pub narrow_y0: f64,
    pub narrow_width: f64,
    /// Global `x` of the first junction.
    pub x_junction: f64,
    pub narrow_length: f64,
    pub left_length: f64,
    pub right_length: f64,
    pub wide_modes: usize,
    pub narrow_modes: usize,
    pub left_ports: usize,
    pub right_ports: usize,
}

impl DoubleStep {
    fn validate(&self) -> Result<()> {
        let probe = StepJunction {
            medium: self.medium,
            wide_y0: self.wide_y0,
            wide_width: self.wide_width,
            narrow_y0: self.narrow_y0,
            narrow_width: self.narrow_width,
            x_junction: self.x_junction,
            wide_length: self.left_length,
            narrow_length: self.narrow_length,
            wide_modes: self.wide_modes,
            narrow_modes: self.narrow_modes,
            wide_ports: self.left_ports.max(self.right_ports),
            narrow_ports: 1,
            orientation: Orientation::WideLeft,
        };
        probe.validate()?;
        check_length("right_length", self.right_length, true)?;
        if self.left_ports == 0 || self.right_ports == 0 {
            return Err(Error::invalid("count_m", "each port needs at least one mode"));
        }
        Ok(())
    }
}

impl ReferenceSystem for DoubleStep {
    type Solved = SectionedSolution;

    /// Unknowns `[b; c; d; f]`: reflected wide waves, right- and left-going
    /// narrow waves (referenced at the first and second junction), and
    /// transmitted wide waves; inputs `[a; g]` are the incoming wide waves.
    fn solve(&self, omega: f64) -> Result<SectionedSolution> {
        self.validate()?;
        let wide = guide_modes(self.medium, self.wide_width, omega, self.wide_modes)?;
        let narrow = guide_modes(self.medium, self.narrow_width, omega, self.narrow_modes)?;
        let (nw, nn) = (wide.len(), narrow.len());
        let x = overlap_matrix((self.wide_y0, self.wide_width), (self.narrow_y0, self.narrow_width), nw, nn);
        let (cb, cc, cd, cf) = (0, nw, nw + nn, nw + 2 * nn);
        let (r1, r2, r3, r4) = (0, nw, nw + nn, 2 * nw + nn);
        let n = 2 * nw + 2 * nn;
        let mut k = DualMat::zeros(n, n);
        let mut r = DualMat::zeros(n, 2 * nw);
        let one = Dual::one();
        let nwd: Vec<Dual> = wide.iter().map(Dual::norm).collect();
        let nnd: Vec<Dual> = narrow.iter().map(Dual::norm).collect();
        let p: Vec<Dual> = narrow
            .iter()
            .map(|m| Dual::propagator(Dual::beta(m), self.narrow_length))
            .collect();
        for i in 0..nw {
            k.set(r1 + i, cb + i, nwd[i]);
            r.set(r1 + i, i, -nwd[i]);
            k.set(r3 + i, cf + i, nwd[i]);
            r.set(r3 + i, nw + i, -nwd[i]);
            for kk in 0..nn {
                let xik = C64::new(x[i][kk], 0.0);
                let xn = nnd[kk].scale(xik);
                let xw = (one / nwd[i]).scale(xik);
                k.set(r1 + i, cc + kk, -xn);
                k.set(r1 + i, cd + kk, -(xn * p[kk]));
                k.set(r3 + i, cc + kk, -(xn * p[kk]));
                k.set(r3 + i, cd + kk, -xn);
                k.set(r2 + kk, cb + i, xw);
                r.set(r2 + kk, i, xw);
                k.set(r4 + kk, cf + i, -xw);
                r.set(r4 + kk, nw + i, -xw);
            }
        }
        for kk in 0..nn {
            let inv = one / nnd[kk];
            k.set(r2 + kk, cc + kk, inv);
            k.set(r2 + kk, cd + kk, -(inv * p[kk]));
            k.set(r4 + kk, cc + kk, inv * p[kk]);
            k.set(r4 + kk, cd + kk, -inv);
        }
        let (u, up) = solve_dual(&k, &r)?;
        let pick = |m: &CMat| {
            let mut out = CMat::zeros(2 * nw, 2 * nw);
            out.view_mut((0, 0), (nw, 2 * nw)).copy_from(&m.view((cb, 0), (nw, 2 * nw)));
            out.view_mut((nw, 0), (nw, 2 * nw)).copy_from(&m.view((cf, 0), (nw, 2 * nw)));
            out
        };
        let (sj, sjp) = (pick(&u), pick(&up));
        let e: Vec<Dual> = wide
            .iter()
            .map(|m| Dual::propagator(Dual::beta(m), self.left_length))
            .chain(wide.iter().map(|m| Dual::propagator(Dual::beta(m), self.right_length)))
            .collect();
        let (s_full, sp_full) = shift(&sj, &sjp, &e);
        let ports: Vec<usize> = (0..self.left_ports).chain(nw..nw + self.right_ports).collect();
        let s = select(&s_full, &ports, &ports);
        let sp = select(&sp_full, &ports, &ports);
        let mut modes: Vec<ModeSpec> = wide[..self.left_ports].to_vec();
        modes.extend(wide[..self.right_ports].iter().map(|m| m.with_port(1)));

        let inc = incidence(&e, &ports);
        let sol = &u * &inc;
        let ln = self.narrow_length;
        let sections = vec![
            Section {
                x0: -self.left_length,
                x1: 0.0,
                y0: self.wide_y0,
                width: self.wide_width,
                modes: wide.clone(),
                fwd: rows(&inc, 0, nw),
                x_fwd: 0.0,
                bwd: rows(&sol, cb, nw),
                x_bwd: 0.0,
            },
            Section {
                x0: 0.0,
                x1: ln,
                y0: self.narrow_y0,
                width: self.narrow_width,
                modes: narrow,
                fwd: rows(&sol, cc, nn),
                x_fwd: 0.0,
                bwd: rows(&sol, cd, nn),
                x_bwd: ln,
            },
            Section {
                x0: ln,
                x1: ln + self.right_length,
                y0: self.wide_y0,
                width: self.wide_width,
                modes: wide,
                fwd: rows(&sol, cf, nw),
                x_fwd: ln,
                bwd: rows(&inc, nw, nw),
                x_bwd: ln,
            },
        ];
        let order = (0..ports.len()).collect();
        Ok(SectionedSolution {
            sections,
            origin: self.x_junction,
            mirrored: false,
            order,
            medium: self.medium,
            snapshot: ScatteringSnapshot::new(omega, modes, s, Some(sp))?,
        })
    }
}

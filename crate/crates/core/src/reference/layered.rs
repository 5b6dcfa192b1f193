//! Uniform sections whose port modes never couple: a shorted guide and a
//! two-port stack (thru line or dielectric slab between two gaps).

use super::{
    add3, check_length, graded_breaks, grading_levels, max_decay, modal_fields, modes_at, outside, CrossSection, Dual,
    Facing, ReferenceSystem, SolvedSystem,
};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, J};
use crate::modes::{Medium, ModeSpec};
use crate::quadrature::Cell;
use crate::ws::{FieldProvider, PointFields, ScatteringSnapshot};

/// Uniform section of length `length` closed by a flat PEC wall, with its
/// single port at `x = port_x` facing `facing`.
#[derive(Debug, Clone)]
pub struct ShortedGuide {
    pub section: CrossSection,
    pub modes: Vec<ModeSpec>,
    pub length: f64,
    pub port_x: f64,
    pub facing: Facing,
}

impl ShortedGuide {
    pub fn new(section: CrossSection, modes: Vec<ModeSpec>, length: f64, port_x: f64, facing: Facing) -> Result<Self> {
        check_length("length_l", length, true)?;
        if modes.is_empty() {
            return Err(Error::invalid("modes", "need at least one port mode"));
        }
        Ok(Self {
            section,
            modes,
            length,
            port_x,
            facing,
        })
    }

    /// `x`-extent of the section.
    pub fn span(&self) -> (f64, f64) {
        match self.facing {
            Facing::PlusX => (self.port_x - self.length, self.port_x),
            Facing::MinusX => (self.port_x, self.port_x + self.length),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShortedSolution {
    system: ShortedGuide,
    reflection: Vec<C64>,
    snapshot: ScatteringSnapshot,
}

impl ReferenceSystem for ShortedGuide {
    type Solved = ShortedSolution;

    /// Per mode `S = −e^{−2jβL}` and `S' = −2jLβ'S`.
    fn solve(&self, omega: f64) -> Result<ShortedSolution> {
        let modes = modes_at(&self.modes, omega, 0)?;
        let m = modes.len();
        let mut s = CMat::zeros(m, m);
        let mut sp = CMat::zeros(m, m);
        let mut reflection = Vec::with_capacity(m);
        for (i, mode) in modes.iter().enumerate() {
            let r = -Dual::propagator(Dual::beta(mode), 2.0 * self.length);
            s[(i, i)] = r.value;
            sp[(i, i)] = r.deriv;
            reflection.push(r.value);
        }
        Ok(ShortedSolution {
            system: self.clone(),
            reflection,
            snapshot: ScatteringSnapshot::new(omega, modes, s, Some(sp))?,
        })
    }
}

impl SolvedSystem for ShortedSolution {
    fn snapshot(&self) -> &ScatteringSnapshot {
        &self.snapshot
    }
}

impl FieldProvider for ShortedSolution {
    fn excitation_count(&self) -> usize {
        self.snapshot.len()
    }

    fn region(&self) -> Vec<Cell> {
        let (lo, hi) = self.system.span();
        if hi <= lo {
            return Vec::new();
        }
        let levels = grading_levels(hi - lo, max_decay(&self.snapshot.modes));
        graded_breaks(lo, hi, levels)
            .windows(2)
            .map(|w| self.system.section.cell(w[0], w[1]))
            .collect()
    }

    fn quadrature_orders(&self, base: usize) -> [usize; 3] {
        self.system.section.orders(base, &self.snapshot.modes)
    }

    /// Incoming plus reflected wave of each mode, written in the port
    /// coordinate `u ∈ [−L, 0]`:
    /// `V = n(e^{jβu} + S e^{−jβu})`, `I_u = (−e^{jβu} + S e^{−jβu})/n`.
    fn fields(&self, point: [f64; 3]) -> Result<PointFields> {
        let sys = &self.system;
        let slack = 1e-12 * sys.length.max(1e-300);
        let (lo, hi) = sys.span();
        if point[0] < lo - slack || point[0] > hi + slack || !sys.section.contains(point, slack) {
            return Err(outside(point));
        }
        let sign = sys.facing.sign();
        let u = sign * (point[0] - sys.port_x);
        let (eta, zeta) = sys.section.local(point);
        let zero = [C64::new(0.0, 0.0); 3];
        let m = self.snapshot.len();
        let mut out = PointFields {
            epsilon: 0.0,
            mu: 0.0,
            e: vec![zero; m],
            h: vec![zero; m],
        };
        for (p, mode) in self.snapshot.modes.iter().enumerate() {
            let inc = (J * mode.beta * u).exp();
            let refl = self.reflection[p] * (-J * mode.beta * u).exp();
            let v = mode.norm * (inc + refl);
            let i = (refl - inc) / mode.norm * sign;
            let (e, h) = modal_fields(mode.omega, &mode.medium, v, i, &mode.profile_sample(eta, zeta));
            add3(&mut out.e[p], e);
            add3(&mut out.h[p], h);
            out.epsilon = mode.medium.epsilon;
            out.mu = mode.medium.mu;
        }
        Ok(out)
    }
}

/// Two-port stack on `[x_left, x_left + 2·gap + thickness]`: a gap, a
/// homogeneous layer of `slab` medium, and a second gap. Port 1 sits at the
/// left end facing `−x`, port 2 at the right end facing `+x`. With zero
/// thickness this is a thru line of length `2·gap`.
#[derive(Debug, Clone)]
pub struct LayeredSlab {
    pub section: CrossSection,
    pub modes: Vec<ModeSpec>,
    pub x_left: f64,
    pub gap: f64,
    pub thickness: f64,
    pub slab: Medium,
}

impl LayeredSlab {
    pub fn new(
        section: CrossSection,
        modes: Vec<ModeSpec>,
        x_left: f64,
        gap: f64,
        thickness: f64,
        slab: Medium,
    ) -> Result<Self> {
        check_length("gap", gap, true)?;
        check_length("thickness_d", thickness, true)?;
        if modes.is_empty() {
            return Err(Error::invalid("modes", "need at least one port mode"));
        }
        Ok(Self {
            section,
            modes,
            x_left,
            gap,
            thickness,
            slab,
        })
    }

    /// Uniform line of length `length` in the port medium.
    pub fn thru(section: CrossSection, modes: Vec<ModeSpec>, x_left: f64, length: f64) -> Result<Self> {
        check_length("length_l", length, true)?;
        let medium = modes
            .first()
            .map(|m| m.medium)
            .ok_or_else(|| Error::invalid("modes", "need at least one port mode"))?;
        Self::new(section, modes, x_left, 0.5 * length, 0.0, medium)
    }

    pub fn total_length(&self) -> f64 {
        2.0 * self.gap + self.thickness
    }
}

/// Per transverse mode data of a solved stack.
#[derive(Debug, Clone, Copy)]
struct StackMode {
    reflection: C64,
    transmission: C64,
    inner: Option<ModeSpec>,
}

#[derive(Debug, Clone)]
pub struct LayeredSolution {
    system: LayeredSlab,
    stack: Vec<StackMode>,
    snapshot: ScatteringSnapshot,
}

impl ReferenceSystem for LayeredSlab {
    type Solved = LayeredSolution;

    /// Per transverse mode:
    /// `Γ = (Z₂ − Z₁)/(Z₂ + Z₁)`, `P = e^{−jβ₂d}`,
    /// `r = Γ(1 − P²)/(1 − Γ²P²)·e^{−2jβg}`, `t = (1 − Γ²)P/(1 − Γ²P²)·e^{−2jβg}`.
    fn solve(&self, omega: f64) -> Result<LayeredSolution> {
        let outer = modes_at(&self.modes, omega, 0)?;
        let t = outer.len();
        let mut s = CMat::zeros(2 * t, 2 * t);
        let mut sp = CMat::zeros(2 * t, 2 * t);
        let mut stack = Vec::with_capacity(t);
        for (i, mode) in outer.iter().enumerate() {
            let gap = Dual::propagator(Dual::beta(mode), 2.0 * self.gap);
            let (rs, ts, inner) = if self.thickness > 0.0 {
                let inner = mode.in_medium(self.slab)?;
                let z1 = Dual::impedance(mode);
                let z2 = Dual::impedance(&inner);
                let g = (z2 - z1) / (z2 + z1);
                let p = Dual::propagator(Dual::beta(&inner), self.thickness);
                let one = Dual::one();
                let den = one - g * g * p * p;
                (g * (one - p * p) / den, (one - g * g) * p / den, Some(inner))
            } else {
                (Dual::constant(C64::new(0.0, 0.0)), Dual::one(), None)
            };
            let r = rs * gap;
            let tr = ts * gap;
            for (a, b, v) in [(i, i, r), (t + i, t + i, r), (i, t + i, tr), (t + i, i, tr)] {
                s[(a, b)] = v.value;
                sp[(a, b)] = v.deriv;
            }
            stack.push(StackMode {
                reflection: r.value,
                transmission: tr.value,
                inner,
            });
        }
        let mut modes = outer.clone();
        modes.extend(outer.iter().map(|m| m.with_port(1)));
        Ok(LayeredSolution {
            system: self.clone(),
            stack,
            snapshot: ScatteringSnapshot::new(omega, modes, s, Some(sp))?,
        })
    }
}

impl SolvedSystem for LayeredSolution {
    fn snapshot(&self) -> &ScatteringSnapshot {
        &self.snapshot
    }
}

impl LayeredSolution {
    /// `(V, I, medium)` of mode `k` excited from port 1, at `u = x − x_left`.
    fn port1_line(&self, k: usize, u: f64) -> (C64, C64, Medium) {
        let sys = &self.system;
        let mode = &self.snapshot.modes[k];
        let sm = &self.stack[k];
        let (n, b) = (mode.norm, mode.beta);
        let w = sys.total_length();
        let left = |u: f64| {
            let f = (-J * b * u).exp();
            let r = sm.reflection * (J * b * u).exp();
            (n * (f + r), (f - r) / n)
        };
        let right = |u: f64| {
            let f = sm.transmission * (-J * b * (u - w)).exp();
            (n * f, f / n)
        };
        let (g, d) = (sys.gap, sys.thickness);
        if u <= g {
            let (v, i) = left(u);
            return (v, i, mode.medium);
        }
        if u >= g + d {
            let (v, i) = right(u);
            return (v, i, mode.medium);
        }
        let inner = sm.inner.expect("layer present when thickness > 0");
        let (z2, b2) = (inner.impedance, inner.beta);
        let (vg, ig) = left(g);
        let (vr, ir) = right(g + d);
        let a = 0.5 * (vg + z2 * ig);
        let bb = 0.5 * (vr - z2 * ir);
        let f = a * (-J * b2 * (u - g)).exp();
        let r = bb * (J * b2 * (u - g - d)).exp();
        (f + r, (f - r) / z2, self.system.slab)
    }
}

impl FieldProvider for LayeredSolution {
    fn excitation_count(&self) -> usize {
        self.snapshot.len()
    }

    fn region(&self) -> Vec<Cell> {
        let sys = &self.system;
        let x = sys.x_left;
        let marks = [x, x + sys.gap, x + sys.gap + sys.thickness, x + sys.total_length()];
        let decay = max_decay(self.snapshot.modes.iter().chain(self.stack.iter().filter_map(|s| s.inner.as_ref())));
        let mut cells = Vec::new();
        for seg in marks.windows(2) {
            if seg[1] > seg[0] {
                let levels = grading_levels(seg[1] - seg[0], decay);
                for w in graded_breaks(seg[0], seg[1], levels).windows(2) {
                    cells.push(sys.section.cell(w[0], w[1]));
                }
            }
        }
        cells
    }

    fn quadrature_orders(&self, base: usize) -> [usize; 3] {
        self.system.section.orders(base, &self.snapshot.modes)
    }

    /// Port 2 excitations are the mirror image `u → W − u` of port 1
    /// excitations, with the current reversed.
    fn fields(&self, point: [f64; 3]) -> Result<PointFields> {
        let sys = &self.system;
        let w = sys.total_length();
        let slack = 1e-12 * w.max(1e-300);
        let u = point[0] - sys.x_left;
        if u < -slack || u > w + slack || !sys.section.contains(point, slack) {
            return Err(outside(point));
        }
        let u = u.clamp(0.0, w);
        let (eta, zeta) = sys.section.local(point);
        let t = self.stack.len();
        let zero = [C64::new(0.0, 0.0); 3];
        let mut out = PointFields {
            epsilon: 0.0,
            mu: 0.0,
            e: vec![zero; 2 * t],
            h: vec![zero; 2 * t],
        };
        for k in 0..t {
            let mode = &self.snapshot.modes[k];
            let sample = mode.profile_sample(eta, zeta);
            let (v, i, medium) = self.port1_line(k, u);
            let (e, h) = modal_fields(mode.omega, &medium, v, i, &sample);
            out.e[k] = e;
            out.h[k] = h;
            let (v, i, medium) = self.port1_line(k, w - u);
            let (e, h) = modal_fields(mode.omega, &medium, v, -i, &sample);
            out.e[t + k] = e;
            out.h[t + k] = h;
            out.epsilon = medium.epsilon;
            out.mu = medium.mu;
        }
        Ok(out)
    }
}

//! Piecewise-uniform strip guides described by modal amplitudes per section.

use super::{graded_breaks, grading_levels, max_decay, modal_fields, outside, strip_order, SolvedSystem};
use crate::error::Result;
use crate::linalg::{CMat, C64, J};
use crate::modes::{Medium, ModeSpec};
use crate::quadrature::Cell;
use crate::ws::{FieldProvider, PointFields, ScatteringSnapshot};

/// One uniform strip section on local `x ∈ [x0, x1]`, `y ∈ [y0, y0 + width]`.
///
/// Mode `i` under excitation `p` has
/// `V = n_i (F_ip e^{−jβ_i(x − x_fwd)} + B_ip e^{jβ_i(x − x_bwd)})` and
/// `I = (F_ip e^{…} − B_ip e^{…}) / n_i`.
#[derive(Debug, Clone)]
pub(crate) struct Section {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub width: f64,
    pub modes: Vec<ModeSpec>,
    pub fwd: CMat,
    pub x_fwd: f64,
    pub bwd: CMat,
    pub x_bwd: f64,
}

impl Section {
    fn contains(&self, x: f64, y: f64, slack: f64) -> bool {
        x >= self.x0 - slack && x <= self.x1 + slack && y >= self.y0 - slack && y <= self.y0 + self.width + slack
    }
}

/// Solution of a strip-guide system made of [`Section`]s, optionally mirrored
/// about `x = origin` and with the excitations reordered.
#[derive(Debug, Clone)]
pub struct SectionedSolution {
    pub(crate) sections: Vec<Section>,
    pub(crate) origin: f64,
    pub(crate) mirrored: bool,
    /// `order[p]` is the internal excitation column of external excitation `p`.
    pub(crate) order: Vec<usize>,
    pub(crate) medium: Medium,
    pub(crate) snapshot: ScatteringSnapshot,
}

impl SectionedSolution {
    fn to_local(&self, x: f64) -> f64 {
        if self.mirrored {
            self.origin - x
        } else {
            x - self.origin
        }
    }

    fn to_global(&self, x: f64) -> f64 {
        if self.mirrored {
            self.origin - x
        } else {
            self.origin + x
        }
    }
}

impl SolvedSystem for SectionedSolution {
    fn snapshot(&self) -> &ScatteringSnapshot {
        &self.snapshot
    }
}

impl FieldProvider for SectionedSolution {
    fn excitation_count(&self) -> usize {
        self.order.len()
    }

    fn region(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for s in &self.sections {
            let levels = grading_levels(s.x1 - s.x0, max_decay(&s.modes));
            for w in graded_breaks(s.x0, s.x1, levels).windows(2) {
                let (a, b) = (self.to_global(w[0]), self.to_global(w[1]));
                cells.push(Cell::planar((a.min(b), a.max(b)), (s.y0, s.y0 + s.width)));
            }
        }
        cells
    }

    fn quadrature_orders(&self, base: usize) -> [usize; 3] {
        let top = self.sections.iter().map(|s| strip_order(&s.modes)).max().unwrap_or(1);
        [base, top, 1]
    }

    fn fields(&self, point: [f64; 3]) -> Result<PointFields> {
        let x = self.to_local(point[0]);
        let y = point[1];
        let span = self.sections.iter().map(|s| s.x1 - s.x0).fold(0.0, f64::max);
        let slack = 1e-12 * span.max(1e-300);
        let section = self
            .sections
            .iter()
            .find(|s| s.contains(x, y, slack))
            .ok_or_else(|| outside(point))?;
        let sign = if self.mirrored { -1.0 } else { 1.0 };
        let zero = [C64::new(0.0, 0.0); 3];
        let m = self.order.len();
        let mut out = PointFields {
            epsilon: self.medium.epsilon,
            mu: self.medium.mu,
            e: vec![zero; m],
            h: vec![zero; m],
        };
        for (i, mode) in section.modes.iter().enumerate() {
            let sample = mode.profile_sample(y - section.y0, 0.0);
            let ef = (-J * mode.beta * (x - section.x_fwd)).exp();
            let eb = (J * mode.beta * (x - section.x_bwd)).exp();
            for (p, &col) in self.order.iter().enumerate() {
                let f = section.fwd[(i, col)] * ef;
                let b = section.bwd[(i, col)] * eb;
                if f == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
                    continue;
                }
                let v = mode.norm * (f + b);
                let cur = (f - b) / mode.norm * sign;
                let (e, h) = modal_fields(mode.omega, &mode.medium, v, cur, &sample);
                for c in 0..3 {
                    out.e[p][c] += e[c];
                    out.h[p][c] += h[c];
                }
            }
        }
        Ok(out)
    }
}

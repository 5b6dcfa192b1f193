//! Analytically solvable scattering systems with fields, `S(ω)` and exact
//! `S'(ω)`, used to exercise the time-delay identities at desk scale.
//!
//! All systems share one convention. Each port mode carries a global
//! transverse profile `X(η, ζ)` with `η = y − y₀`, and the fields of a single
//! modal component are written through a voltage `V(x)` and current `I(x)`:
//!
//! ```text
//! E = (I·div X/(jωε), V·X_η, V·X_ζ)
//! H = (−V·curl X/(jωμ), −I·X_ζ, I·X_η)
//! ```
//!
//! A wave travelling towards `+x` has `I = V/Z`, one towards `−x` has
//! `I = −V/Z`. Ports facing `+x` and `−x` use the same profiles, so two
//! systems sharing a port plane share one modal basis.
//!
//! Snapshots are ordered port-major (all modes of the first port, then the
//! second); use [`crate::ws::ScatteringSnapshot::propagating_first`] before
//! assembling time-delay matrices.

mod dual;
mod fd;
mod layered;
mod sections;
mod step;

pub use dual::Dual;
pub use fd::{central_difference, fd_s_prime, FdConfig};
pub use layered::{LayeredSlab, LayeredSolution, ShortedGuide, ShortedSolution};
pub use sections::SectionedSolution;
pub use step::{balanced_wide_count, overlap, DoubleStep, Orientation, StepJunction, MAX_CONDITION};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, J};
use crate::modes::{Medium, ModeIndex, ModeSpec, Port, ProfileSample};
use crate::quadrature::Cell;
use crate::ws::{FieldProvider, ScatteringSnapshot};

/// Direction of a port's outward normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facing {
    PlusX,
    MinusX,
}

impl Facing {
    pub fn sign(self) -> f64 {
        match self {
            Facing::PlusX => 1.0,
            Facing::MinusX => -1.0,
        }
    }
}

/// Transverse extent of a uniform section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossSection {
    /// Parallel-plate strip `y ∈ [y0, y0 + width]`, invariant along `z`.
    Strip { y0: f64, width: f64 },
    /// One period `[0, period_eta] × [0, period_zeta]` of a Floquet cell.
    Periodic { period_eta: f64, period_zeta: f64 },
}

impl CrossSection {
    pub fn from_port(port: &Port, y0: f64) -> Self {
        match port {
            Port::Guide(g) => CrossSection::Strip { y0, width: g.width },
            Port::Floquet(f) => CrossSection::Periodic {
                period_eta: f.period_eta,
                period_zeta: f.period_zeta,
            },
        }
    }

    pub(crate) fn cell(&self, x0: f64, x1: f64) -> Cell {
        match *self {
            CrossSection::Strip { y0, width } => Cell::planar((x0, x1), (y0, y0 + width)),
            CrossSection::Periodic {
                period_eta,
                period_zeta,
            } => Cell::solid((x0, x1), (0.0, period_eta), (0.0, period_zeta)),
        }
    }

    /// Transverse coordinates `(η, ζ)` of a point.
    pub(crate) fn local(&self, p: [f64; 3]) -> (f64, f64) {
        match *self {
            CrossSection::Strip { y0, .. } => (p[1] - y0, 0.0),
            CrossSection::Periodic { .. } => (p[1], p[2]),
        }
    }

    pub(crate) fn contains(&self, p: [f64; 3], slack: f64) -> bool {
        match *self {
            CrossSection::Strip { y0, width } => p[1] >= y0 - slack && p[1] <= y0 + width + slack,
            CrossSection::Periodic {
                period_eta,
                period_zeta,
            } => p[1] >= -slack && p[1] <= period_eta + slack && p[2] >= -slack && p[2] <= period_zeta + slack,
        }
    }

    /// Node counts per axis: `base` along `x`, and along the transverse axes
    /// enough nodes for the highest profile harmonic in `modes`.
    pub(crate) fn orders(&self, base: usize, modes: &[ModeSpec]) -> [usize; 3] {
        match self {
            CrossSection::Strip { .. } => [base, strip_order(modes), 1],
            CrossSection::Periodic { .. } => {
                let (mut sm, mut sn) = (0, 0);
                for m in modes {
                    if let ModeIndex::Floquet { m, n } = m.index {
                        sm = sm.max(m.unsigned_abs() as usize);
                        sn = sn.max(n.unsigned_abs() as usize);
                    }
                }
                [base, harmonic_order(2 * sm), harmonic_order(2 * sn)]
            }
        }
    }
}

/// A reference system that can be solved at any angular frequency.
pub trait ReferenceSystem: Sync {
    type Solved: SolvedSystem;

    fn solve(&self, omega: f64) -> Result<Self::Solved>;

    /// `S(ω)` alone, for finite-difference oracles.
    fn s_matrix(&self, omega: f64) -> Result<CMat> {
        Ok(self.solve(omega)?.snapshot().s.clone())
    }
}

/// Solution at one frequency: port-major snapshot with analytic `S'`, plus
/// the total fields of every port excitation.
pub trait SolvedSystem: FieldProvider {
    fn snapshot(&self) -> &ScatteringSnapshot;
}

/// Fields of one modal component with voltage `v` and current `i`.
pub(crate) fn modal_fields(
    omega: f64,
    medium: &Medium,
    v: C64,
    i: C64,
    s: &ProfileSample,
) -> ([C64; 3], [C64; 3]) {
    let jw = J * omega;
    let e = [i * s.divergence() / (jw * medium.epsilon), v * s.value[0], v * s.value[1]];
    let h = [-v * s.curl() / (jw * medium.mu), -i * s.value[1], i * s.value[0]];
    (e, h)
}

pub(crate) fn add3(acc: &mut [C64; 3], v: [C64; 3]) {
    for c in 0..3 {
        acc[c] += v[c];
    }
}

/// Gauss-Legendre nodes that integrate `e^{jπ h t}` on `t ∈ [0, 2]`
/// (i.e. `h` half-periods over the cell) to double precision.
pub(crate) fn harmonic_order(h: usize) -> usize {
    (std::f64::consts::PI * h as f64 * 0.5).ceil() as usize + 12
}

/// Transverse order for products of strip profiles up to the highest index.
pub(crate) fn strip_order(modes: &[ModeSpec]) -> usize {
    let top = modes
        .iter()
        .map(|m| match m.index {
            ModeIndex::Guide(n) => n as usize,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    harmonic_order(2 * top)
}

/// Grading depth so that the finest cell spans about two decay lengths of
/// the fastest evanescent component.
pub(crate) fn grading_levels(length: f64, decay: f64) -> u32 {
    let ratio = decay * length / 4.0;
    if ratio <= 1.0 {
        0
    } else {
        ratio.log2().ceil().min(30.0) as u32
    }
}

pub(crate) fn max_decay<'a>(modes: impl IntoIterator<Item = &'a ModeSpec>) -> f64 {
    modes.into_iter().map(|m| m.beta.im.abs()).fold(0.0, f64::max)
}

/// Breakpoints on `[lo, hi]` refined geometrically towards both ends, so
/// that fields decaying like `e^{−α|x − end|}` are resolved at any `α`.
pub(crate) fn graded_breaks(lo: f64, hi: f64, levels: u32) -> Vec<f64> {
    if hi <= lo {
        return vec![lo, hi];
    }
    let mid = 0.5 * (lo + hi);
    let half = mid - lo;
    let mut out = vec![lo];
    for k in (1..=levels).rev() {
        out.push(lo + half / 2f64.powi(k as i32));
    }
    out.push(mid);
    for k in 1..=levels {
        out.push(hi - half / 2f64.powi(k as i32));
    }
    out.push(hi);
    out
}

pub(crate) fn outside(point: [f64; 3]) -> Error {
    Error::OutsideRegion { point }
}

/// Re-evaluate mode templates at `omega` and tag them with a port.
pub(crate) fn modes_at(templates: &[ModeSpec], omega: f64, port_id: usize) -> Result<Vec<ModeSpec>> {
    templates.iter().map(|m| Ok(m.at_omega(omega)?.with_port(port_id))).collect()
}

pub(crate) fn check_length(name: &'static str, v: f64, allow_zero: bool) -> Result<()> {
    let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be {}, got {v}", if allow_zero { "nonnegative" } else { "positive" })))
    }
}

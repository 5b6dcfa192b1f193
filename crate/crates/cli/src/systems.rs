//! Turns configuration tables into reference systems at one frequency.

use crate::config::{CascadeConfig, SystemConfig};
use crate::error::Result;
use wsdelay::modes::{enumerate_floquet_modes, enumerate_guide_modes, Family, FloquetPort, GuidePort, Medium, ModeSpec, Port};
use wsdelay::reference::{
    CrossSection, DoubleStep, Facing, LayeredSlab, LayeredSolution, Orientation, ReferenceSystem, SectionedSolution,
    ShortedGuide, ShortedSolution, SolvedSystem, StepJunction,
};
use wsdelay::ws::{FieldProvider, ScatteringSnapshot};
use wsdelay::CMat;

const MM: f64 = 1e-3;

#[derive(Debug, Clone)]
pub enum Built {
    Short(ShortedGuide),
    Layered(LayeredSlab),
    Step(StepJunction),
    Double(DoubleStep),
}

pub enum Solved {
    Short(ShortedSolution),
    Layered(LayeredSolution),
    Sectioned(SectionedSolution),
}

impl Solved {
    pub fn snapshot(&self) -> &ScatteringSnapshot {
        match self {
            Solved::Short(s) => s.snapshot(),
            Solved::Layered(s) => s.snapshot(),
            Solved::Sectioned(s) => s.snapshot(),
        }
    }

    pub fn provider(&self) -> &dyn FieldProvider {
        match self {
            Solved::Short(s) => s,
            Solved::Layered(s) => s,
            Solved::Sectioned(s) => s,
        }
    }
}

impl Built {
    pub fn solve(&self, omega: f64) -> Result<Solved> {
        Ok(match self {
            Built::Short(s) => Solved::Short(s.solve(omega)?),
            Built::Layered(s) => Solved::Layered(s.solve(omega)?),
            Built::Step(s) => Solved::Sectioned(s.solve(omega)?),
            Built::Double(s) => Solved::Sectioned(s.solve(omega)?),
        })
    }

    pub fn s_matrix(&self, omega: f64) -> wsdelay::Result<CMat> {
        match self {
            Built::Short(s) => s.s_matrix(omega),
            Built::Layered(s) => s.s_matrix(omega),
            Built::Step(s) => s.s_matrix(omega),
            Built::Double(s) => s.s_matrix(omega),
        }
    }

    pub fn is_floquet(&self) -> bool {
        matches!(self, Built::Layered(s) if matches!(s.section, CrossSection::Periodic { .. }))
    }
}

fn guide_modes(width: f64, medium: Medium, omega: f64, family: Family, count: usize) -> Result<Vec<ModeSpec>> {
    let port = GuidePort::new(width, medium)?;
    Ok(enumerate_guide_modes(&port, omega, family, count)?)
}

fn strip(width: f64) -> CrossSection {
    CrossSection::Strip { y0: 0.0, width }
}

/// Propagating count of a guide family, for truncation sweeps.
pub fn propagating_guide_modes(width_mm: f64, eps_r: f64, omega: f64, family: Family) -> Result<usize> {
    let port = GuidePort::new(width_mm * MM, Medium::relative(eps_r, 1.0)?)?;
    Ok(port.propagating_count(omega, family))
}

pub fn build_system(cfg: &SystemConfig, omega: f64) -> Result<Built> {
    Ok(match *cfg {
        SystemConfig::ShortedGuide {
            width_mm,
            length_mm,
            modes,
            family,
            eps_r,
        } => {
            let medium = Medium::relative(eps_r, 1.0)?;
            let m = guide_modes(width_mm * MM, medium, omega, family.into(), modes)?;
            Built::Short(ShortedGuide::new(strip(width_mm * MM), m, length_mm * MM, 0.0, Facing::PlusX)?)
        }
        SystemConfig::Thru {
            width_mm,
            length_mm,
            modes,
            family,
            eps_r,
        } => {
            let medium = Medium::relative(eps_r, 1.0)?;
            let m = guide_modes(width_mm * MM, medium, omega, family.into(), modes)?;
            Built::Layered(LayeredSlab::thru(strip(width_mm * MM), m, 0.0, length_mm * MM)?)
        }
        SystemConfig::Slab {
            period_eta_mm,
            period_zeta_mm,
            gap_mm,
            thickness_mm,
            slab_eps_r,
            modes,
        } => {
            let port = FloquetPort::new(period_eta_mm * MM, period_zeta_mm * MM, Medium::vacuum())?;
            let m = enumerate_floquet_modes(&port, omega, modes)?;
            Built::Layered(LayeredSlab::new(
                CrossSection::from_port(&Port::Floquet(port), 0.0),
                m,
                0.0,
                gap_mm * MM,
                thickness_mm * MM,
                Medium::relative(slab_eps_r, 1.0)?,
            )?)
        }
        SystemConfig::Step {
            wide_width_mm,
            narrow_width_mm,
            narrow_offset_mm,
            wide_length_mm,
            narrow_length_mm,
            wide_modes,
            narrow_modes,
            wide_ports,
            narrow_ports,
        } => Built::Step(StepJunction {
            medium: Medium::vacuum(),
            wide_y0: 0.0,
            wide_width: wide_width_mm * MM,
            narrow_y0: narrow_offset_mm * MM,
            narrow_width: narrow_width_mm * MM,
            x_junction: wide_length_mm * MM,
            wide_length: wide_length_mm * MM,
            narrow_length: narrow_length_mm * MM,
            wide_modes,
            narrow_modes,
            wide_ports: wide_ports.unwrap_or(wide_modes),
            narrow_ports: narrow_ports.unwrap_or(narrow_modes),
            orientation: Orientation::WideLeft,
        }),
        SystemConfig::DoubleStep {
            wide_width_mm,
            narrow_width_mm,
            narrow_offset_mm,
            narrow_length_mm,
            left_length_mm,
            right_length_mm,
            wide_modes,
            narrow_modes,
            ports,
        } => Built::Double(DoubleStep {
            medium: Medium::vacuum(),
            wide_y0: 0.0,
            wide_width: wide_width_mm * MM,
            narrow_y0: narrow_offset_mm * MM,
            narrow_width: narrow_width_mm * MM,
            x_junction: 0.0,
            narrow_length: narrow_length_mm * MM,
            left_length: left_length_mm * MM,
            right_length: right_length_mm * MM,
            wide_modes,
            narrow_modes,
            left_ports: ports.unwrap_or(wide_modes),
            right_ports: ports.unwrap_or(wide_modes),
        }),
    })
}

/// Subsystems `A`, `B` and the monolithic reference of a cascade.
pub struct CascadeParts {
    pub a: Built,
    pub b: Built,
    pub mono: Built,
}

/// `shared` overrides the shared-port mode count (the guide mode count for
/// thru kinds, the narrow port count for the double step).
pub fn build_cascade(cfg: &CascadeConfig, omega: f64, shared: Option<usize>) -> Result<CascadeParts> {
    Ok(match *cfg {
        CascadeConfig::ThruThru {
            width_mm,
            first_length_mm,
            second_length_mm,
            modes,
            family,
        } => {
            let w = width_mm * MM;
            let m = guide_modes(w, Medium::vacuum(), omega, family.into(), shared.unwrap_or(modes))?;
            let (l1, l2) = (first_length_mm * MM, second_length_mm * MM);
            CascadeParts {
                a: Built::Layered(LayeredSlab::thru(strip(w), m.clone(), 0.0, l1)?),
                b: Built::Layered(LayeredSlab::thru(strip(w), m.clone(), l1, l2)?),
                mono: Built::Layered(LayeredSlab::thru(strip(w), m, 0.0, l1 + l2)?),
            }
        }
        CascadeConfig::ThruShort {
            width_mm,
            thru_length_mm,
            short_length_mm,
            modes,
            family,
        } => {
            let w = width_mm * MM;
            let m = guide_modes(w, Medium::vacuum(), omega, family.into(), shared.unwrap_or(modes))?;
            let (lt, ls) = (thru_length_mm * MM, short_length_mm * MM);
            CascadeParts {
                a: Built::Layered(LayeredSlab::thru(strip(w), m.clone(), 0.0, lt)?),
                b: Built::Short(ShortedGuide::new(strip(w), m.clone(), ls, lt, Facing::MinusX)?),
                mono: Built::Short(ShortedGuide::new(strip(w), m, lt + ls, 0.0, Facing::MinusX)?),
            }
        }
        CascadeConfig::DoubleStep {
            wide_width_mm,
            narrow_width_mm,
            narrow_offset_mm,
            narrow_length_mm,
            left_length_mm,
            right_length_mm,
            split_mm,
            wide_modes,
            narrow_modes,
            ports,
            shared_modes,
        } => {
            let shared = shared.or(shared_modes).unwrap_or(narrow_modes);
            let ln = narrow_length_mm * MM;
            let split = split_mm * MM;
            let junction = |x_junction, wide_length, narrow_length, orientation| StepJunction {
                medium: Medium::vacuum(),
                wide_y0: 0.0,
                wide_width: wide_width_mm * MM,
                narrow_y0: narrow_offset_mm * MM,
                narrow_width: narrow_width_mm * MM,
                x_junction,
                wide_length,
                narrow_length,
                wide_modes,
                narrow_modes,
                wide_ports: ports,
                narrow_ports: shared,
                orientation,
            };
            CascadeParts {
                a: Built::Step(junction(0.0, left_length_mm * MM, split, Orientation::WideLeft)),
                b: Built::Step(junction(ln, right_length_mm * MM, ln - split, Orientation::NarrowLeft)),
                mono: Built::Double(DoubleStep {
                    medium: Medium::vacuum(),
                    wide_y0: 0.0,
                    wide_width: wide_width_mm * MM,
                    narrow_y0: narrow_offset_mm * MM,
                    narrow_width: narrow_width_mm * MM,
                    x_junction: 0.0,
                    narrow_length: ln,
                    left_length: left_length_mm * MM,
                    right_length: right_length_mm * MM,
                    wide_modes,
                    narrow_modes,
                    left_ports: ports,
                    right_ports: ports,
                }),
            }
        }
    })
}

//! Port geometries and their modal catalogs.
//!
//! Two port kinds are supported: the 2-D parallel-plate guide (invariant along
//! the out-of-plane axis) and the doubly periodic Floquet port at normal
//! incidence. Every mode carries its propagation constant `β`, impedance `Z`
//! and normalisation `n = √Z` (principal branch) at one angular frequency.
//!
//! Coordinates: `ξ` is the port-normal coordinate, positive outside the
//! system; `(η, ζ)` are transverse. Profiles are returned as `[X_η, X_ζ]`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::quadrature::GaussLegendre;

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (F/m), tied to `MU0` so that `1/√(μ₀ε₀) = c₀`.
pub const EPS0: f64 = 1.0 / (MU0 * C0 * C0);

/// Modes with `|β| < CUTOFF_GUARD · k` are rejected.
pub const CUTOFF_GUARD: f64 = 1e-9;

/// Lossless, nondispersive, isotropic filling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub epsilon: f64,
    pub mu: f64,
}

impl Medium {
    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", format!("must be positive, got {mu}")));
        }
        Ok(Self { epsilon, mu })
    }

    pub fn vacuum() -> Self {
        Self {
            epsilon: EPS0,
            mu: MU0,
        }
    }

    pub fn relative(eps_r: f64, mu_r: f64) -> Result<Self> {
        Self::new(eps_r * EPS0, mu_r * MU0)
    }

    /// Wave impedance `√(μ/ε)`.
    pub fn impedance(&self) -> f64 {
        (self.mu / self.epsilon).sqrt()
    }

    pub fn speed(&self) -> f64 {
        1.0 / (self.mu * self.epsilon).sqrt()
    }

    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega * (self.mu * self.epsilon).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidePort {
    pub width: f64,
    pub medium: Medium,
}

impl GuidePort {
    pub fn new(width: f64, medium: Medium) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::invalid("width_a", format!("must be positive, got {width}")));
        }
        Ok(Self { width, medium })
    }

    /// Number of modes of `family` with cutoff below `k`.
    pub fn propagating_count(&self, omega: f64, family: Family) -> usize {
        let ka = self.medium.wavenumber(omega) * self.width / PI;
        let above = ka.ceil() as usize; // indices n < ka propagate
        match family {
            Family::Te => above.saturating_sub(1),
            Family::Tm => above,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetPort {
    pub period_eta: f64,
    pub period_zeta: f64,
    pub medium: Medium,
}

impl FloquetPort {
    pub fn new(period_eta: f64, period_zeta: f64, medium: Medium) -> Result<Self> {
        for (name, v) in [("period_eta", period_eta), ("period_zeta", period_zeta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            period_eta,
            period_zeta,
            medium,
        })
    }

    pub fn area(&self) -> f64 {
        self.period_eta * self.period_zeta
    }

    pub fn k_eta(&self, m: i32) -> f64 {
        -2.0 * PI * m as f64 / self.period_eta
    }

    pub fn k_zeta(&self, n: i32) -> f64 {
        -2.0 * PI * n as f64 / self.period_zeta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Port {
    Guide(GuidePort),
    Floquet(FloquetPort),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Te,
    Tm,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Te => write!(f, "TE"),
            Family::Tm => write!(f, "TM"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeClass {
    Propagating,
    Evanescent,
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeClass::Propagating => write!(f, "propagating"),
            ModeClass::Evanescent => write!(f, "evanescent"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeIndex {
    Guide(u32),
    Floquet { m: i32, n: i32 },
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeIndex::Guide(n) => write!(f, "{n}"),
            ModeIndex::Floquet { m, n } => write!(f, "({m},{n})"),
        }
    }
}

/// Transverse data that fixes the (frequency-independent) profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transverse {
    Guide {
        width: f64,
    },
    Floquet {
        period_eta: f64,
        period_zeta: f64,
        k_eta: f64,
        k_zeta: f64,
    },
}

/// One port mode evaluated at a single angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub port_id: usize,
    pub family: Family,
    pub index: ModeIndex,
    pub transverse: Transverse,
    pub medium: Medium,
    pub omega: f64,
    /// Magnitude of the transverse wavenumber (rad/m).
    pub cutoff: f64,
    pub beta: C64,
    pub impedance: C64,
    pub norm: C64,
    pub class: ModeClass,
}

/// Frequency derivatives `β'`, `Z'`, `n'` of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDerivatives {
    pub beta: C64,
    pub impedance: C64,
    pub norm: C64,
}

impl ModeSpec {
    pub fn new(
        port_id: usize,
        family: Family,
        index: ModeIndex,
        transverse: Transverse,
        medium: Medium,
        omega: f64,
    ) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", format!("must be positive, got {omega}")));
        }
        let cutoff = match transverse {
            Transverse::Guide { width } => match index {
                ModeIndex::Guide(n) => n as f64 * PI / width,
                _ => return Err(Error::invalid("index", "guide transverse data needs a guide index")),
            },
            Transverse::Floquet { k_eta, k_zeta, .. } => k_eta.hypot(k_zeta),
        };
        if family == Family::Te && index == ModeIndex::Guide(0) {
            return Err(Error::invalid("index", "TE_0 does not exist in a parallel-plate guide"));
        }
        let k = medium.wavenumber(omega);
        let beta = longitudinal_wavenumber(k * k - cutoff * cutoff);
        let class = if k > cutoff {
            ModeClass::Propagating
        } else {
            ModeClass::Evanescent
        };
        if beta.norm() < CUTOFF_GUARD * k {
            return Err(Error::AtCutoff {
                mode: format!("{family}{index}"),
                beta: beta.norm(),
                k,
            });
        }
        let z0 = medium.impedance();
        let impedance = match (family, class) {
            (Family::Te, ModeClass::Propagating) => C64::new(k * z0 / beta.re, 0.0),
            (Family::Te, ModeClass::Evanescent) => C64::new(0.0, -k * z0 / beta.im),
            (Family::Tm, ModeClass::Propagating) => C64::new(beta.re * z0 / k, 0.0),
            (Family::Tm, ModeClass::Evanescent) => C64::new(0.0, beta.im * z0 / k),
        };
        let norm = impedance.sqrt();
        Ok(Self {
            port_id,
            family,
            index,
            transverse,
            medium,
            omega,
            cutoff,
            beta,
            impedance,
            norm,
            class,
        })
    }

    pub fn with_port(mut self, port_id: usize) -> Self {
        self.port_id = port_id;
        self
    }

    /// Same transverse mode at another frequency.
    pub fn at_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.port_id, self.family, self.index, self.transverse, self.medium, omega)
    }

    /// Same transverse mode in another filling (e.g. inside a dielectric layer).
    pub fn in_medium(&self, medium: Medium) -> Result<Self> {
        Self::new(self.port_id, self.family, self.index, self.transverse, medium, self.omega)
    }

    pub fn wavenumber(&self) -> f64 {
        self.medium.wavenumber(self.omega)
    }

    pub fn is_propagating(&self) -> bool {
        self.class == ModeClass::Propagating
    }

    pub fn label(&self) -> String {
        format!("p{}:{}{}", self.port_id, self.family, self.index)
    }

    /// `β' = ω/(c²β)`, `Z'` from the TE/TM impedance law, `n' = n Z'/(2Z)`.
    pub fn derivatives(&self) -> ModeDerivatives {
        let c = self.medium.speed();
        let k = self.wavenumber();
        let dk = 1.0 / c;
        let beta_p = C64::new(self.omega / (c * c), 0.0) / self.beta;
        let log_z = match self.family {
            Family::Te => C64::new(dk / k, 0.0) - beta_p / self.beta,
            Family::Tm => beta_p / self.beta - dk / k,
        };
        let z_p = self.impedance * log_z;
        let n_p = self.norm * log_z * 0.5;
        ModeDerivatives {
            beta: beta_p,
            impedance: z_p,
            norm: n_p,
        }
    }

    /// Transverse profile value and its `η`/`ζ` derivatives.
    pub fn profile_sample(&self, eta: f64, zeta: f64) -> ProfileSample {
        let zero = C64::new(0.0, 0.0);
        match (self.transverse, self.index) {
            (Transverse::Guide { width }, ModeIndex::Guide(n)) => {
                let kc = n as f64 * PI / width;
                match self.family {
                    Family::Te => {
                        let amp = (2.0 / width).sqrt();
                        let (s, c) = (kc * eta).sin_cos();
                        ProfileSample {
                            value: [zero, C64::new(amp * s, 0.0)],
                            d_eta: [zero, C64::new(amp * kc * c, 0.0)],
                            d_zeta: [zero, zero],
                        }
                    }
                    Family::Tm => {
                        let amp = if n == 0 { (1.0 / width).sqrt() } else { (2.0 / width).sqrt() };
                        let (s, c) = (kc * eta).sin_cos();
                        ProfileSample {
                            value: [C64::new(amp * c, 0.0), zero],
                            d_eta: [C64::new(-amp * kc * s, 0.0), zero],
                            d_zeta: [zero, zero],
                        }
                    }
                }
            }
            (
                Transverse::Floquet {
                    period_eta,
                    period_zeta,
                    k_eta,
                    k_zeta,
                },
                _,
            ) => {
                let area = period_eta * period_zeta;
                let phase = C64::from_polar(1.0, -(k_eta * eta + k_zeta * zeta));
                let kt2 = k_eta * k_eta + k_zeta * k_zeta;
                let dir = if kt2 == 0.0 {
                    // normal-incidence pair: TE along ζ, TM along η
                    let a = 1.0 / area.sqrt();
                    match self.family {
                        Family::Te => [0.0, a],
                        Family::Tm => [a, 0.0],
                    }
                } else {
                    let s = 1.0 / (area * kt2).sqrt();
                    match self.family {
                        Family::Te => [-k_zeta * s, k_eta * s],
                        Family::Tm => [k_eta * s, k_zeta * s],
                    }
                };
                let value = [phase * dir[0], phase * dir[1]];
                let de = C64::new(0.0, -k_eta);
                let dz = C64::new(0.0, -k_zeta);
                ProfileSample {
                    value,
                    d_eta: [value[0] * de, value[1] * de],
                    d_zeta: [value[0] * dz, value[1] * dz],
                }
            }
            _ => unreachable!("guide transverse data always carries a guide index"),
        }
    }
}

/// `√(k² - k_c²)` on the propagating branch, `-j√(k_c² - k²)` below cutoff.
pub fn longitudinal_wavenumber(k2_minus_kc2: f64) -> C64 {
    if k2_minus_kc2 > 0.0 {
        C64::new(k2_minus_kc2.sqrt(), 0.0)
    } else {
        C64::new(0.0, -(-k2_minus_kc2).sqrt())
    }
}

/// Profile value `X = [X_η, X_ζ]` with first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub value: [C64; 2],
    pub d_eta: [C64; 2],
    pub d_zeta: [C64; 2],
}

impl ProfileSample {
    /// `∂_η X_η + ∂_ζ X_ζ`
    pub fn divergence(&self) -> C64 {
        self.d_eta[0] + self.d_zeta[1]
    }

    /// `∂_η X_ζ - ∂_ζ X_η`
    pub fn curl(&self) -> C64 {
        self.d_eta[1] - self.d_zeta[0]
    }
}

pub fn mode_profile(mode: &ModeSpec, eta: f64, zeta: f64) -> [C64; 2] {
    mode.profile_sample(eta, zeta).value
}

/// `dβ/dω`; the mode is re-evaluated at `omega` first.
pub fn beta_prime(mode: &ModeSpec, omega: f64) -> Result<C64> {
    Ok(mode.at_omega(omega)?.derivatives().beta)
}

/// Guide modes of one family, propagating first, ascending cutoff.
pub fn enumerate_guide_modes(
    port: &GuidePort,
    omega: f64,
    family: Family,
    count: usize,
) -> Result<Vec<ModeSpec>> {
    if count == 0 {
        return Err(Error::invalid("count_m", "must be positive"));
    }
    let propagating = port.propagating_count(omega, family);
    if count < propagating {
        return Err(Error::TooFewModes {
            requested: count,
            propagating,
        });
    }
    let first = match family {
        Family::Te => 1,
        Family::Tm => 0,
    };
    (0..count as u32)
        .map(|i| {
            ModeSpec::new(
                0,
                family,
                ModeIndex::Guide(first + i),
                Transverse::Guide { width: port.width },
                port.medium,
                omega,
            )
        })
        .collect()
}

fn floquet_candidate(port: &FloquetPort, omega: f64, family: Family, m: i32, n: i32) -> Result<ModeSpec> {
    ModeSpec::new(
        0,
        family,
        ModeIndex::Floquet { m, n },
        Transverse::Floquet {
            period_eta: port.period_eta,
            period_zeta: port.period_zeta,
            k_eta: port.k_eta(m),
            k_zeta: port.k_zeta(n),
        },
        port.medium,
        omega,
    )
}

fn floquet_order(a: &ModeSpec, b: &ModeSpec) -> Ordering {
    let key = |x: &ModeSpec| match x.index {
        ModeIndex::Floquet { m, n } => (m, n),
        _ => (0, 0),
    };
    a.class
        .cmp(&b.class)
        .then(a.cutoff.partial_cmp(&b.cutoff).unwrap_or(Ordering::Equal))
        .then(key(a).0.abs().cmp(&key(b).0.abs()))
        .then(key(a).1.abs().cmp(&key(b).1.abs()))
        .then(key(a).cmp(&key(b)))
        .then(a.family.cmp(&b.family))
}

/// The `count` lowest-cutoff Floquet modes (both families), propagating first.
pub fn enumerate_floquet_modes(port: &FloquetPort, omega: f64, count: usize) -> Result<Vec<ModeSpec>> {
    if count == 0 {
        return Err(Error::invalid("count_m", "must be positive"));
    }
    let k = port.medium.wavenumber(omega);
    let max_period = port.period_eta.max(port.period_zeta);
    let mut radius: i32 = 1;
    loop {
        let mut all = Vec::new();
        for m in -radius..=radius {
            for n in -radius..=radius {
                for family in [Family::Te, Family::Tm] {
                    all.push(floquet_candidate(port, omega, family, m, n)?);
                }
            }
        }
        all.sort_by(floquet_order);
        let propagating = all.iter().filter(|x| x.is_propagating()).count();
        // smallest cutoff any mode outside the current window can have
        let outside = 2.0 * PI * (radius + 1) as f64 / max_period;
        if all.len() >= count && all[count - 1].cutoff < outside && outside > k {
            if count < propagating {
                return Err(Error::TooFewModes {
                    requested: count,
                    propagating,
                });
            }
            all.truncate(count);
            return Ok(all);
        }
        radius += 1;
    }
}

/// Counts at which a Floquet enumeration closes a degenerate cutoff shell,
/// i.e. the counts for which every `(m, n)` comes with its `(-m, -n)` partner.
pub fn floquet_shell_counts(port: &FloquetPort, omega: f64, max_count: usize) -> Result<Vec<usize>> {
    let modes = enumerate_floquet_modes(port, omega, max_count)?;
    let mut out = Vec::new();
    for i in 1..=modes.len() {
        let closes = i == modes.len() || {
            let (a, b) = (&modes[i - 1], &modes[i]);
            a.class != b.class || a.cutoff != b.cutoff
        };
        if closes && i < modes.len() {
            out.push(i);
        }
    }
    // last entry is only a closed shell if the next enumeration agrees
    let longer = enumerate_floquet_modes(port, omega, max_count + 1)?;
    let last = &longer[max_count - 1];
    let next = &longer[max_count];
    if last.class != next.class || last.cutoff != next.cutoff {
        out.push(max_count);
    }
    Ok(out)
}

/// `‖G - I‖_F` with `G_pq = ∫ X_p^(*) · X_q`, conjugating only on Floquet ports.
pub fn gram_residual(port: &Port, modes: &[ModeSpec], order: usize) -> f64 {
    let m = modes.len();
    let mut gram = CMat::zeros(m, m);
    let rule = GaussLegendre::new(order.max(1));
    let mut accumulate = |eta: f64, zeta: f64, w: f64, conjugate: bool| {
        let vals: Vec<[C64; 2]> = modes.iter().map(|x| mode_profile(x, eta, zeta)).collect();
        for p in 0..m {
            for q in 0..m {
                let (a, b) = (vals[p], vals[q]);
                let dot = if conjugate {
                    a[0].conj() * b[0] + a[1].conj() * b[1]
                } else {
                    a[0] * b[0] + a[1] * b[1]
                };
                gram[(p, q)] += dot * w;
            }
        }
    };
    match port {
        Port::Guide(g) => {
            for (eta, w) in rule.mapped(0.0, g.width) {
                accumulate(eta, 0.0, w, false);
            }
        }
        Port::Floquet(f) => {
            let zs: Vec<(f64, f64)> = rule.mapped(0.0, f.period_zeta).collect();
            for (eta, we) in rule.mapped(0.0, f.period_eta) {
                for &(zeta, wz) in &zs {
                    accumulate(eta, zeta, we * wz, true);
                }
            }
        }
    }
    crate::linalg::frobenius(&(gram - CMat::identity(m, m)))
}

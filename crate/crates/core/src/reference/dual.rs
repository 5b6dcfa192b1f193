//! Complex numbers carrying a first frequency derivative.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::linalg::{C64, J};
use crate::modes::ModeSpec;

/// `value + ε·deriv` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: C64,
    pub deriv: C64,
}

impl Dual {
    pub fn new(value: C64, deriv: C64) -> Self {
        Self { value, deriv }
    }

    pub fn constant(value: C64) -> Self {
        Self::new(value, C64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.deriv)
    }

    pub fn scale(self, c: C64) -> Self {
        Self::new(self.value * c, self.deriv * c)
    }

    /// `e^{−jβℓ}` for a fixed length.
    pub fn propagator(beta: Dual, length: f64) -> Self {
        beta.scale(-J * length).exp()
    }

    pub fn beta(mode: &ModeSpec) -> Self {
        Self::new(mode.beta, mode.derivatives().beta)
    }

    pub fn impedance(mode: &ModeSpec) -> Self {
        Self::new(mode.impedance, mode.derivatives().impedance)
    }

    pub fn norm(mode: &ModeSpec) -> Self {
        Self::new(mode.norm, mode.derivatives().norm)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.value + o.value, self.deriv + o.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.value - o.value, self.deriv - o.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.value * o.value, self.deriv * o.value + self.value * o.deriv)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.value / o.value;
        Dual::new(q, (self.deriv - q * o.deriv) / o.value)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

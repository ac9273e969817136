use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// A complex number stored as `mantissa * exp(scale)`.
///
/// Hermite functions of large imaginary order have moduli of order
/// `exp(pi |nu| / 4)`, far outside the `f64` range, while the ratios the
/// dynamics needs are moderate. Products and quotients only touch the real
/// exponent; sums realign the smaller operand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    mantissa: Complex64,
    scale: f64,
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        mantissa: Complex64::new(0.0, 0.0),
        scale: 0.0,
    };

    pub fn new(mantissa: Complex64, scale: f64) -> Self {
        Self { mantissa, scale }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    /// Builds `exp(log)` without forming the possibly overflowing modulus.
    pub fn from_log(log: Complex64) -> Self {
        Self {
            mantissa: Complex64::from_polar(1.0, log.im),
            scale: log.re,
        }
    }

    fn normalized(self) -> Self {
        let m = self.mantissa.norm();
        if m == 0.0 || !m.is_finite() {
            return Self {
                mantissa: self.mantissa,
                scale: if m == 0.0 { 0.0 } else { self.scale },
            };
        }
        let shift = m.ln();
        Self {
            mantissa: self.mantissa / m,
            scale: self.scale + shift,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// Natural logarithm of the modulus.
    pub fn ln_norm(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.scale + self.mantissa.norm().ln()
        }
    }

    /// Argument of the represented number.
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Converts back to a plain complex number; may overflow to infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return self.mantissa;
        }
        self.mantissa * self.scale.exp()
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite() && self.scale.is_finite()
    }
}

impl Add for ScaledComplex {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.scale >= other.scale {
            (self, other)
        } else {
            (other, self)
        };
        let mantissa = big.mantissa + small.mantissa * (small.scale - big.scale).exp();
        Self::new(mantissa, big.scale)
    }
}

impl Sub for ScaledComplex {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            scale: self.scale,
        }
    }
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.mantissa * rhs.mantissa, self.scale + rhs.scale)
    }
}

impl Mul<Complex64> for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self::new(self.mantissa * rhs, self.scale)
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.scale - rhs.scale)
    }
}

//! The commutative four-dimensional algebra spanned by `1`, `i`, `ε` and `iε`
//! with `i² = −1` and `ε² = 0`.
//!
//! An element `a + b·i + c·ε + d·iε` is handled as a pair of complex numbers
//! `w + u·ε` with `w = a + b·i` and `u = c + d·i`. Then
//!
//! ```text
//! (w₁ + u₁ε)(w₂ + u₂ε) = w₁w₂ + (w₁u₂ + u₁w₂)ε
//! ```
//!
//! and the `ε²` term is never formed, so nilpotency holds structurally rather
//! than up to rounding. Complex numbers (`eps = im_eps = 0`) and dual numbers
//! (`im = im_eps = 0`) are closed subalgebras.
//!
//! There is no division: `ε` is a zero divisor.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_complex::Complex64;

/// Element `re + im·i + eps·ε + im_eps·iε` of the dual-complex algebra.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualComplex {
    pub re: f64,
    pub im: f64,
    pub eps: f64,
    pub im_eps: f64,
}

impl DualComplex {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    /// Imaginary unit, `i² = −1`.
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    /// Nilpotent unit, `ε² = 0`.
    pub const EPS: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    /// The product `iε`.
    pub const I_EPS: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(re: f64, im: f64, eps: f64, im_eps: f64) -> Self {
        Self {
            re,
            im,
            eps,
            im_eps,
        }
    }

    pub const fn real(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    pub fn complex(w: Complex64) -> Self {
        Self::new(w.re, w.im, 0.0, 0.0)
    }

    /// Builds `w + u·ε` from its complex and nilpotent parts.
    pub fn from_parts(w: Complex64, u: Complex64) -> Self {
        Self::new(w.re, w.im, u.re, u.im)
    }

    /// The complex part `re + im·i`.
    pub fn complex_part(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// The complex coefficient of `ε`, i.e. `eps + im_eps·i`.
    pub fn eps_part(self) -> Complex64 {
        Complex64::new(self.eps, self.im_eps)
    }

    pub fn components(self) -> [f64; 4] {
        [self.re, self.im, self.eps, self.im_eps]
    }

    /// Exact structural zero: all four components compare equal to `0.0`.
    pub fn is_zero(self) -> bool {
        self.components().iter().all(|&c| c == 0.0)
    }

    pub fn is_one(self) -> bool {
        self == Self::ONE
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.components()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k, self.eps * k, self.im_eps * k)
    }

    /// `exp(w + uε) = exp(w)·(1 + uε)`.
    pub fn exp(self) -> Self {
        let ew = self.complex_part().exp();
        Self::from_parts(ew, ew * self.eps_part())
    }

    /// `sin(w + uε) = sin w + u·cos w·ε`.
    pub fn sin(self) -> Self {
        let w = self.complex_part();
        Self::from_parts(w.sin(), self.eps_part() * w.cos())
    }

    /// `cos(w + uε) = cos w − u·sin w·ε`.
    pub fn cos(self) -> Self {
        let w = self.complex_part();
        Self::from_parts(w.cos(), -(self.eps_part() * w.sin()))
    }

    /// Integer power by repeated squaring; `z⁰ = 1`.
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// True iff the largest componentwise absolute difference is `≤ tol`.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self - other).max_abs() <= tol
    }
}

/// Free-function form of [`DualComplex::approx_eq`].
pub fn approx_eq(a: DualComplex, b: DualComplex, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

/// The multiplication rule of the algebra, exposed as a plain function so
/// checks can be run against an alternative rule.
pub fn mul(a: DualComplex, b: DualComplex) -> DualComplex {
    let (w1, u1) = (a.complex_part(), a.eps_part());
    let (w2, u2) = (b.complex_part(), b.eps_part());
    DualComplex::from_parts(w1 * w2, w1 * u2 + u1 * w2)
}

pub fn add(a: DualComplex, b: DualComplex) -> DualComplex {
    DualComplex::new(a.re + b.re, a.im + b.im, a.eps + b.eps, a.im_eps + b.im_eps)
}

impl Add for DualComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        add(self, rhs)
    }
}

impl AddAssign for DualComplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for DualComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.re - rhs.re,
            self.im - rhs.im,
            self.eps - rhs.eps,
            self.im_eps - rhs.im_eps,
        )
    }
}

impl Neg for DualComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im, -self.eps, -self.im_eps)
    }
}

impl Mul for DualComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        mul(self, rhs)
    }
}

impl MulAssign for DualComplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for DualComplex {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<DualComplex> for f64 {
    type Output = DualComplex;
    fn mul(self, rhs: DualComplex) -> DualComplex {
        rhs.scale(self)
    }
}

impl From<f64> for DualComplex {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl From<Complex64> for DualComplex {
    fn from(w: Complex64) -> Self {
        Self::complex(w)
    }
}

impl fmt::Display for DualComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [
            (self.re, ""),
            (self.im, "*i"),
            (self.eps, "*eps"),
            (self.im_eps, "*i*eps"),
        ];
        let mut wrote = false;
        for (value, unit) in parts {
            if value == 0.0 {
                continue;
            }
            if wrote {
                if value < 0.0 {
                    write!(f, " - {}{}", -value, unit)?;
                } else {
                    write!(f, " + {}{}", value, unit)?;
                }
            } else {
                write!(f, "{}{}", value, unit)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

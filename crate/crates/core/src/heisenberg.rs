//! The Heisenberg group `H¹` realised on `ℝ³`.
//!
//! `(s, x, y) ∗ (s′, x′, y′) = (s + s′ + ½ω(x, y; x′, y′), x + x′, y + y′)`
//! with the symplectic form `ω(x, y; x′, y′) = xy′ − x′y`. Points `(s, 0, 0)`
//! form the centre.

use std::ops::Mul;

/// Symplectic form `ω(x, y; x′, y′) = xy′ − x′y`.
pub fn symplectic(x: f64, y: f64, x2: f64, y2: f64) -> f64 {
    x * y2 - x2 * y
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupElement {
    /// Central coordinate.
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(s: f64, x: f64, y: f64) -> Self {
        Self { s, x, y }
    }

    pub const fn central(s: f64) -> Self {
        Self::new(s, 0.0, 0.0)
    }

    pub fn multiply(self, other: Self) -> Self {
        Self::new(
            self.s + other.s + 0.5 * symplectic(self.x, self.y, other.x, other.y),
            self.x + other.x,
            self.y + other.y,
        )
    }

    pub fn inverse(self) -> Self {
        Self::new(-self.s, -self.x, -self.y)
    }

    pub fn is_central(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.s - other.s)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
    }
}

impl Mul for GroupElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.multiply(rhs)
    }
}

pub fn multiply(g: GroupElement, g2: GroupElement) -> GroupElement {
    g.multiply(g2)
}

pub fn inverse(g: GroupElement) -> GroupElement {
    g.inverse()
}

pub fn is_central(g: GroupElement) -> bool {
    g.is_central()
}

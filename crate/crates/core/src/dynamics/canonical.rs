//! Polynomials in two operators `Q`, `P` obeying `[Q, P] = κ·Id`, kept in
//! normal order `Σ c_{ab} Q^a P^b`.
//!
//! Quadratic operators compose to quartic ones, which exceeds the order cap
//! of [`DiffOp`](crate::representation::DiffOp); commutators of quantized
//! quadratic observables are computed here instead, from the single scalar
//! `κ`. Reordering uses
//!
//! ```text
//! P^b Q^c = Σ_k C(b,k) C(c,k) k! (−κ)^k Q^{c−k} P^{b−k}
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Normal-ordered polynomial in `Q`, `P`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderedPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * f64::from(j))
}

impl OrderedPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · Q^a P^b`.
    pub fn monomial(a: u32, b: u32, c: Complex64) -> Self {
        let mut out = Self::zero();
        out.add_term(a, b, c);
        out
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        *self.terms.entry((a, b)).or_default() += c;
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.terms.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(a, b, -c);
        }
        out
    }

    /// Product in the algebra with `[Q, P] = kappa`.
    pub fn mul(&self, other: &Self, kappa: Complex64) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &x) in &self.terms {
            for (&(c, d), &y) in &other.terms {
                // Q^a (P^b Q^c) P^d
                for k in 0..=b.min(c) {
                    let w = binomial(b, k) * binomial(c, k) * factorial(k);
                    let coeff = x * y * (-kappa).powu(k) * w;
                    out.add_term(a + c - k, b - k + d, coeff);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self, kappa: Complex64) -> Self {
        self.mul(other, kappa).sub(&other.mul(self, kappa))
    }

    /// Largest coefficient magnitude among terms of total degree above `deg`.
    pub fn excess_above(&self, deg: u32) -> f64 {
        self.terms
            .iter()
            .filter(|((a, b), _)| a + b > deg)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

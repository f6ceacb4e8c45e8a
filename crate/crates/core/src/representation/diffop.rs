//! Differential operators `Σ c_{ab}(q, p) ∂_q^a ∂_p^b` of total order at most 2
//! with expression coefficients.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::DualComplex;
use crate::expr::{standard_points, Env, Expr, Var};

/// Largest total derivative order a [`DiffOp`] may carry.
pub const MAX_ORDER: u8 = 2;

/// Derivative multi-index `(a, b)` for `∂_q^a ∂_p^b`.
pub type MultiIndex = (u8, u8);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffOpError {
    #[error("operator order overflow: {left} + {right} exceeds the cap of {MAX_ORDER}")]
    OrderOverflow { left: u8, right: u8 },
    #[error("derivative ∂_q^{0} ∂_p^{1} exceeds the order cap of {MAX_ORDER}")]
    IndexTooLarge(u8, u8),
    #[error("top-order terms of a commutator failed to cancel (residual {residual:e})")]
    UncancelledTopOrder { residual: f64 },
}

#[derive(Clone, PartialEq, Default)]
pub struct DiffOp {
    terms: BTreeMap<MultiIndex, Expr>,
}

fn order_of((a, b): MultiIndex) -> u8 {
    a + b
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

fn derivative(f: &Expr, (a, b): MultiIndex) -> Expr {
    let mut out = f.clone();
    for _ in 0..a {
        out = out.diff(Var::Q);
    }
    for _ in 0..b {
        out = out.diff(Var::P);
    }
    out
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Multiplication by `coeff`.
    pub fn multiplication(coeff: Expr) -> Self {
        Self::zero()
            .with_term((0, 0), coeff)
            .expect("order 0 is in range")
    }

    pub fn identity() -> Self {
        Self::multiplication(Expr::one())
    }

    /// `c · Id` for a constant `c`.
    pub fn scalar(c: DualComplex) -> Self {
        Self::multiplication(Expr::constant(c))
    }

    /// `∂_q^a ∂_p^b`.
    pub fn partial(a: u8, b: u8) -> Result<Self, DiffOpError> {
        Self::zero().with_term((a, b), Expr::one())
    }

    /// Adds `coeff · ∂_q^a ∂_p^b` to the operator.
    pub fn with_term(mut self, index: MultiIndex, coeff: Expr) -> Result<Self, DiffOpError> {
        if order_of(index) > MAX_ORDER {
            return Err(DiffOpError::IndexTooLarge(index.0, index.1));
        }
        self.accumulate(index, coeff);
        Ok(self)
    }

    fn accumulate(&mut self, index: MultiIndex, coeff: Expr) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&index) {
            Some(existing) => existing + coeff,
            None => coeff,
        };
        if !merged.is_zero() {
            self.terms.insert(index, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &Expr)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient of `∂_q^a ∂_p^b` (zero when absent).
    pub fn coeff(&self, index: MultiIndex) -> Expr {
        self.terms.get(&index).cloned().unwrap_or_else(Expr::zero)
    }

    /// Highest total order carrying a nonzero coefficient.
    pub fn order(&self) -> u8 {
        self.terms.keys().map(|&k| order_of(k)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.accumulate(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            match out.terms.get(k) {
                // identical trees cancel exactly
                Some(existing) if existing == v => {
                    out.terms.remove(k);
                }
                _ => out.accumulate(*k, -v),
            }
        }
        out
    }

    pub fn scale(&self, c: DualComplex) -> DiffOp {
        let mut out = DiffOp::zero();
        for (k, v) in &self.terms {
            out.accumulate(*k, v.scale(c));
        }
        out
    }

    /// `Σ c_{ab} · ∂_q^a ∂_p^b f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.terms
            .iter()
            .fold(Expr::zero(), |acc, (k, c)| acc + c * derivative(f, *k))
    }

    /// Operator product `self ∘ other`, coefficients expanded by the Leibniz
    /// rule.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp, DiffOpError> {
        let (left, right) = (self.order(), other.order());
        if left + right > MAX_ORDER {
            return Err(DiffOpError::OrderOverflow { left, right });
        }
        let mut out = DiffOp::zero();
        for (&(a1, a2), outer) in &self.terms {
            for (&(b1, b2), inner) in &other.terms {
                // ∂^α (B ∂^β f) = Σ_{γ≤α} C(α,γ) (∂^γ B) ∂^{α−γ+β} f
                for g1 in 0..=a1 {
                    for g2 in 0..=a2 {
                        let weight = binomial(a1, g1) * binomial(a2, g2);
                        let dcoeff = derivative(inner, (g1, g2));
                        let coeff = outer * dcoeff.scale(DualComplex::real(weight));
                        out.accumulate((a1 - g1 + b1, a2 - g2 + b2), coeff);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[A, B] = A∘B − B∘A`. The top-order terms are checked to cancel on
    /// the standard sample set and are then dropped.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp, DiffOpError> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        let mut out = ab.sub(&ba);
        let top = self.order() + other.order();
        if top == 0 {
            return Ok(out);
        }
        let points = standard_points();
        let top_keys: Vec<MultiIndex> = out
            .terms
            .keys()
            .copied()
            .filter(|&k| order_of(k) == top)
            .collect();
        for key in top_keys {
            let diff = out.coeff(key);
            let (x, y) = (ab.coeff(key), ba.coeff(key));
            for env in &points {
                let residual = diff.eval(env).max_abs();
                let scale = 1.0 + x.eval(env).max_abs() + y.eval(env).max_abs();
                if residual > 1e-12 * scale {
                    return Err(DiffOpError::UncancelledTopOrder { residual });
                }
            }
            out.terms.remove(&key);
        }
        Ok(out)
    }

    /// Largest coefficient mismatch against `other` over `points`.
    pub fn max_residual(&self, other: &DiffOp, points: &[Env]) -> f64 {
        let mut keys: Vec<MultiIndex> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.sort_unstable();
        keys.dedup();
        let mut worst = 0.0_f64;
        for k in keys {
            let (a, b) = (self.coeff(k), other.coeff(k));
            for env in points {
                worst = worst.max((a.eval(env) - b.eval(env)).max_abs());
            }
        }
        worst
    }

    /// Coefficientwise semantic equality on `points`.
    pub fn approx_eq(&self, other: &DiffOp, points: &[Env], tol: f64) -> bool {
        self.max_residual(other, points) <= tol
    }

    /// Value of `self` as `c · Id`, if every coefficient other than the
    /// identity one vanishes within `tol` and the identity coefficient is
    /// constant within `tol` on `points`.
    pub fn as_scalar(&self, points: &[Env], tol: f64) -> Option<DualComplex> {
        let c = self.coeff((0, 0)).eval(points.first()?);
        let candidate = DiffOp::scalar(c);
        self.approx_eq(&candidate, points, tol).then_some(c)
    }
}

pub fn compose(a: &DiffOp, b: &DiffOp) -> Result<DiffOp, DiffOpError> {
    a.compose(b)
}

pub fn commutator(a: &DiffOp, b: &DiffOp) -> Result<DiffOp, DiffOpError> {
    a.commutator(b)
}

pub fn apply(a: &DiffOp, f: &Expr) -> Expr {
    a.apply(f)
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp[{self}]")
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((a, b), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            match (a, b) {
                (0, 0) => write!(f, "·Id")?,
                _ => {
                    for _ in 0..*a {
                        write!(f, "·∂q")?;
                    }
                    for _ in 0..*b {
                        write!(f, "·∂p")?;
                    }
                }
            }
        }
        Ok(())
    }
}

//! Symbolic expressions over the phase-space variables `q` and `p`.
//!
//! Expressions are immutable trees with shared subtrees. They evaluate over
//! [`DualComplex`], so evaluating at an ε-shifted point `q₀ + a·ε` returns
//! `f(q₀) + a·f′(q₀)·ε`: the nilpotent part of the result is the directional
//! derivative. [`Expr::diff`] computes the same derivative symbolically.
//!
//! Smart constructors fold constants, collect constant factors of products,
//! and apply `0·f → 0`, `1·f → f`, `f + 0 → f`. Nothing else is simplified;
//! equality of expressions is decided by sampling ([`expr_approx_eq`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::DualComplex;

/// Seed of the standard sample set used for semantic comparisons.
pub const SAMPLE_SEED: u64 = 0x4845_4953_454e_4245;
/// Number of points in the standard sample set.
pub const SAMPLE_COUNT: usize = 20;
/// Half-width of the square `[−2, 2]²` sample points are drawn from.
pub const SAMPLE_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    P,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => write!(f, "q"),
            Var::P => write!(f, "p"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(DualComplex),
    Var(Var),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Pow(Expr, u32),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
}

/// A phase-space expression. Cloning is cheap.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

/// Evaluation point `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Env {
    pub q: DualComplex,
    pub p: DualComplex,
}

impl Env {
    pub fn new(q: DualComplex, p: DualComplex) -> Self {
        Self { q, p }
    }

    pub fn real(q: f64, p: f64) -> Self {
        Self::new(DualComplex::real(q), DualComplex::real(p))
    }

    pub fn get(&self, v: Var) -> DualComplex {
        match v {
            Var::Q => self.q,
            Var::P => self.p,
        }
    }
}

impl Expr {
    fn wrap(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: DualComplex) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(DualComplex::real(x))
    }

    pub fn zero() -> Self {
        Self::constant(DualComplex::ZERO)
    }

    pub fn one() -> Self {
        Self::constant(DualComplex::ONE)
    }

    pub fn var(v: Var) -> Self {
        Self::wrap(Node::Var(v))
    }

    pub fn q() -> Self {
        Self::var(Var::Q)
    }

    pub fn p() -> Self {
        Self::var(Var::P)
    }

    pub fn as_const(&self) -> Option<DualComplex> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Structurally the constant zero.
    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(DualComplex::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(DualComplex::is_one)
    }

    /// Splits off the constant factor: `c·rest`, with `rest = None` for a
    /// pure constant.
    fn split_coeff(&self) -> (DualComplex, Option<Expr>) {
        match self.node() {
            Node::Const(c) => (*c, None),
            Node::Mul(a, b) => match a.as_const() {
                Some(c) => (c, Some(b.clone())),
                None => (DualComplex::ONE, Some(self.clone())),
            },
            Node::Neg(a) => {
                let (c, rest) = a.split_coeff();
                (-c, rest)
            }
            _ => (DualComplex::ONE, Some(self.clone())),
        }
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            _ if a.is_zero() => b.clone(),
            _ if b.is_zero() => a.clone(),
            _ => Self::wrap(Node::Add(a.clone(), b.clone())),
        }
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        let (ca, ra) = a.split_coeff();
        let (cb, rb) = b.split_coeff();
        let c = ca * cb;
        if c.is_zero() {
            return Expr::zero();
        }
        let rest = match (ra, rb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(Self::wrap(Node::Mul(x, y))),
        };
        match rest {
            None => Expr::constant(c),
            Some(r) if c.is_one() => r,
            Some(r) => Self::wrap(Node::Mul(Expr::constant(c), r)),
        }
    }

    pub fn neg(a: &Expr) -> Expr {
        match a.node() {
            Node::Const(c) => Expr::constant(-*c),
            Node::Neg(x) => x.clone(),
            Node::Mul(x, y) if x.as_const().is_some() => {
                Self::mul(&Expr::constant(-x.as_const().unwrap()), y)
            }
            _ => Self::wrap(Node::Neg(a.clone())),
        }
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        Self::add(a, &Self::neg(b))
    }

    /// Multiplies by a constant.
    pub fn scale(&self, c: DualComplex) -> Expr {
        Self::mul(&Expr::constant(c), self)
    }

    pub fn pow(&self, n: u32) -> Expr {
        match (n, self.node()) {
            (0, _) => Expr::one(),
            (1, _) => self.clone(),
            (_, Node::Const(c)) => Expr::constant(c.powi(n)),
            _ => Self::wrap(Node::Pow(self.clone(), n)),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.exp()),
            None => Self::wrap(Node::Exp(self.clone())),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Self::wrap(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Self::wrap(Node::Cos(self.clone())),
        }
    }

    pub fn eval(&self, env: &Env) -> DualComplex {
        match self.node() {
            Node::Const(c) => *c,
            Node::Var(v) => env.get(*v),
            Node::Add(a, b) => a.eval(env) + b.eval(env),
            Node::Mul(a, b) => a.eval(env) * b.eval(env),
            Node::Neg(a) => -a.eval(env),
            Node::Pow(a, n) => a.eval(env).powi(*n),
            Node::Exp(a) => a.eval(env).exp(),
            Node::Sin(a) => a.eval(env).sin(),
            Node::Cos(a) => a.eval(env).cos(),
        }
    }

    /// Exact symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(w) if *w == v => Expr::one(),
            Node::Var(_) => Expr::zero(),
            Node::Add(a, b) => Self::add(&a.diff(v), &b.diff(v)),
            Node::Mul(a, b) => Self::add(&Self::mul(&a.diff(v), b), &Self::mul(a, &b.diff(v))),
            Node::Neg(a) => Self::neg(&a.diff(v)),
            Node::Pow(a, n) => {
                let da = a.diff(v);
                Self::mul(&Self::mul(&Expr::real(f64::from(*n)), &a.pow(n - 1)), &da)
            }
            Node::Exp(a) => Self::mul(self, &a.diff(v)),
            Node::Sin(a) => Self::mul(&a.cos(), &a.diff(v)),
            Node::Cos(a) => Self::neg(&Self::mul(&a.sin(), &a.diff(v))),
        }
    }

    /// Simultaneous substitution `q ↦ q_new`, `p ↦ p_new`.
    pub fn substitute(&self, q_new: &Expr, p_new: &Expr) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(Var::Q) => q_new.clone(),
            Node::Var(Var::P) => p_new.clone(),
            Node::Add(a, b) => Self::add(&a.substitute(q_new, p_new), &b.substitute(q_new, p_new)),
            Node::Mul(a, b) => Self::mul(&a.substitute(q_new, p_new), &b.substitute(q_new, p_new)),
            Node::Neg(a) => Self::neg(&a.substitute(q_new, p_new)),
            Node::Pow(a, n) => a.substitute(q_new, p_new).pow(*n),
            Node::Exp(a) => a.substitute(q_new, p_new).exp(),
            Node::Sin(a) => a.substitute(q_new, p_new).sin(),
            Node::Cos(a) => a.substitute(q_new, p_new).cos(),
        }
    }

    /// Total degree if the expression is a polynomial in `q`, `p`.
    pub fn polynomial_degree(&self) -> Option<u32> {
        match self.node() {
            Node::Const(_) => Some(0),
            Node::Var(_) => Some(1),
            Node::Add(a, b) => Some(a.polynomial_degree()?.max(b.polynomial_degree()?)),
            Node::Mul(a, b) => Some(a.polynomial_degree()? + b.polynomial_degree()?),
            Node::Neg(a) => a.polynomial_degree(),
            Node::Pow(a, n) => Some(a.polynomial_degree()? * n),
            Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => match a.polynomial_degree() {
                Some(0) => Some(0),
                _ => None,
            },
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Add(a, b) | Node::Mul(a, b) => a.size() + b.size(),
            Node::Neg(a) | Node::Pow(a, _) | Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => a.size(),
        }
    }
}

/// Largest componentwise difference of `f` and `g` over `points`.
pub fn max_residual(f: &Expr, g: &Expr, points: &[Env]) -> f64 {
    points
        .iter()
        .map(|env| (f.eval(env) - g.eval(env)).max_abs())
        .fold(0.0, f64::max)
}

/// Semantic equality: `f` and `g` agree within `tol` at every point.
pub fn expr_approx_eq(f: &Expr, g: &Expr, points: &[Env], tol: f64) -> bool {
    assert!(
        !points.is_empty(),
        "expr_approx_eq needs at least one point"
    );
    points
        .iter()
        .all(|env| f.eval(env).approx_eq(g.eval(env), tol))
}

/// `n` real points drawn uniformly from `[−2, 2]²`.
pub fn sample_points(n: usize, seed: u64) -> Vec<Env> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Env::real(
                rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS),
                rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS),
            )
        })
        .collect()
}

/// The standard sample set: [`SAMPLE_COUNT`] points with [`SAMPLE_SEED`].
pub fn standard_points() -> Vec<Env> {
    sample_points(SAMPLE_COUNT, SAMPLE_SEED)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $ctor:path) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $ctor(&self, &rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $ctor(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $ctor(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $ctor(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, Expr::add);
forward_binop!(Sub, sub, Expr::sub);
forward_binop!(Mul, mul, Expr::mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::real(x)
    }
}

impl From<DualComplex> for Expr {
    fn from(c: DualComplex) -> Self {
        Expr::constant(c)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

// precedence: sum 1, product 2, unary minus 3, power 4, atom 5
impl Expr {
    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) => 1,
            Node::Mul(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if c.im == 0.0 && c.eps == 0.0 && c.im_eps == 0.0 && c.re >= 0.0 => 5,
            Node::Const(_) => 0,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            write!(f, "(")?;
        }
        match self.node() {
            Node::Const(c) => write!(f, "{c}")?,
            Node::Var(v) => write!(f, "{v}")?,
            Node::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " + ")?;
                b.fmt_at(f, 2)?;
            }
            Node::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)?;
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)?;
            }
            Node::Pow(a, n) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{n}")?;
            }
            Node::Exp(a) => write!(f, "exp({a})")?,
            Node::Sin(a) => write!(f, "sin({a})")?,
            Node::Cos(a) => write!(f, "cos({a})")?,
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Expr {
        Expr::q()
    }
    fn p() -> Expr {
        Expr::p()
    }

    #[test]
    fn eval_product() {
        let f = q() * p();
        assert_eq!(f.eval(&Env::real(2.0, 3.0)), DualComplex::real(6.0));
    }

    #[test]
    fn eval_at_dual_shift_gives_derivative() {
        let f = q().pow(2);
        let env = Env::new(DualComplex::new(1.0, 0.0, 1.0, 0.0), DualComplex::ZERO);
        assert!(f
            .eval(&env)
            .approx_eq(DualComplex::new(1.0, 0.0, 2.0, 0.0), 1e-15));

        let g = q().exp();
        let env = Env::new(DualComplex::EPS.scale(0.7), DualComplex::ZERO);
        assert!(g
            .eval(&env)
            .approx_eq(DualComplex::new(1.0, 0.0, 0.7, 0.0), 1e-15));
    }

    #[test]
    fn diff_examples() {
        let pts = standard_points();
        let f = q().pow(2) * p();
        assert!(expr_approx_eq(
            &f.diff(Var::Q),
            &(Expr::real(2.0) * q() * p()),
            &pts,
            1e-12
        ));
        assert!(expr_approx_eq(
            &q().sin().diff(Var::Q),
            &q().cos(),
            &pts,
            1e-12
        ));
        let c = Expr::constant(DualComplex::new(0.3, -1.2, 0.5, 0.0));
        let e = (&c * q()).exp();
        assert!(expr_approx_eq(&e.diff(Var::Q), &(&c * &e), &pts, 1e-12));
        assert!(expr_approx_eq(
            &q().pow(3).diff(Var::Q),
            &(Expr::real(3.0) * q().pow(2)),
            &pts,
            1e-12
        ));
    }

    #[test]
    fn substitute_examples() {
        let pts = standard_points();
        let f = q() * p();
        let g = f.substitute(&(q() + Expr::one()), &p());
        assert!(expr_approx_eq(
            &g,
            &((q() + Expr::one()) * p()),
            &pts,
            1e-12
        ));
        assert_eq!(q().substitute(&q(), &p()), q());
        let h = q().pow(2).substitute(&(q() - Expr::real(0.5)), &p());
        assert!(h
            .eval(&Env::real(2.0, 0.0))
            .approx_eq(DualComplex::real(2.25), 1e-15));
    }

    #[test]
    fn approx_eq_examples() {
        let pts = sample_points(20, 7);
        let lhs = (q() + p()).pow(2);
        let rhs = q().pow(2) + Expr::real(2.0) * q() * p() + p().pow(2);
        assert!(expr_approx_eq(&lhs, &rhs, &pts, 1e-12));
        assert!(!expr_approx_eq(&q(), &p(), &[Env::real(1.0, 2.0)], 1e-12));
    }

    #[test]
    fn local_rewrites() {
        assert!((Expr::zero() * q()).is_zero());
        assert_eq!(Expr::one() * q(), q());
        assert_eq!(q() + Expr::zero(), q());
        let folded = Expr::real(2.0) * Expr::real(3.0) + Expr::real(1.0);
        assert_eq!(folded.as_const(), Some(DualComplex::real(7.0)));
        // constant factors collect, so ε·ε vanishes structurally
        let a = Expr::constant(DualComplex::EPS) * q();
        let b = Expr::constant(DualComplex::EPS) * p().sin();
        assert!((a * b).is_zero());
    }

    #[test]
    fn real_expression_stays_real() {
        let f = (q() * p()).sin() + q().pow(3).exp() - p().cos();
        for env in standard_points() {
            let v = f.eval(&env);
            assert_eq!((v.im, v.eps, v.im_eps), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn polynomial_degree() {
        assert_eq!((q().pow(2) * p() + q()).polynomial_degree(), Some(3));
        assert_eq!(q().exp().polynomial_degree(), None);
        assert_eq!(Expr::real(4.0).polynomial_degree(), Some(0));
    }

    #[test]
    fn sample_points_are_reproducible_and_bounded() {
        let a = standard_points();
        let b = standard_points();
        assert_eq!(a, b);
        assert_eq!(a.len(), SAMPLE_COUNT);
        for env in a {
            assert!(env.q.re.abs() <= 2.0 && env.p.re.abs() <= 2.0);
        }
    }
}

//! Weyl quantization on both sides, the Poisson bracket, and time evolution
//! of quadratic observables.
//!
//! Observables are tracked by their coefficients over the fixed basis
//! `{1, q, p, q², qp, p²}` ([`CoeffState`]). On the classical side
//! `dk/dt = {H, k} = H_p k_q − H_q k_p`. On the quantum side the coefficients
//! refer to `{Id, Q̃, P̃, Q̃², sym(Q̃P̃), P̃²}` and `λ dk̃/dt = [H̃, k̃]`, where the
//! constant `λ` is chosen by a [`QuantumConvention`].

pub mod canonical;
pub mod integrate;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::DualComplex;
use crate::expr::{standard_points, Env, Expr, Var};
use crate::representation::{gen_quantum, DiffOp, DiffOpError, RepParams};

use canonical::OrderedPoly;
use integrate::{integrate, time_grid, Matrix, DIM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid time step: need 0 < dt <= t_end, got t_end={t_end}, dt={dt}")]
    InvalidStep { t_end: f64, dt: f64 },
    #[error("commutator left the quadratic span (stray coefficient of size {magnitude:e})")]
    ClosureViolation { magnitude: f64 },
    #[error("expression is not a polynomial of degree at most 2")]
    NotQuadratic,
    #[error("coefficient {index} is not real: {value}")]
    NotReal { index: usize, value: DualComplex },
    #[error("operator is not a scalar multiple of the identity")]
    NotScalar,
    #[error("commutator has derivative terms of size {residual:e}")]
    ResidualDerivativeTerms { residual: f64 },
    #[error(transparent)]
    Operator(#[from] DiffOpError),
}

/// Names of the basis monomials, in storage order.
pub const BASIS_NAMES: [&str; DIM] = ["1", "q", "p", "q^2", "qp", "p^2"];

/// Coefficients of `c₁ + c_q q + c_p p + c_qq q² + c_qp qp + c_pp p²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoeffState {
    pub c1: f64,
    pub cq: f64,
    pub cp: f64,
    pub cqq: f64,
    pub cqp: f64,
    pub cpp: f64,
}

impl CoeffState {
    pub fn from_array(a: [f64; DIM]) -> Self {
        Self {
            c1: a[0],
            cq: a[1],
            cp: a[2],
            cqq: a[3],
            cqp: a[4],
            cpp: a[5],
        }
    }

    pub fn to_array(self) -> [f64; DIM] {
        [self.c1, self.cq, self.cp, self.cqq, self.cqp, self.cpp]
    }

    /// The `j`-th basis monomial.
    pub fn unit(j: usize) -> Self {
        let mut a = [0.0; DIM];
        a[j] = 1.0;
        Self::from_array(a)
    }

    pub fn q() -> Self {
        Self::unit(1)
    }

    pub fn p() -> Self {
        Self::unit(2)
    }

    pub fn to_expr(self) -> Expr {
        let (q, p) = (Expr::q(), Expr::p());
        let monomials = [
            Expr::one(),
            q.clone(),
            p.clone(),
            q.pow(2),
            &q * &p,
            p.pow(2),
        ];
        self.to_array()
            .iter()
            .zip(monomials)
            .fold(Expr::zero(), |acc, (&c, m)| acc + Expr::real(c) * m)
    }

    /// Reads the coefficients of a real polynomial of degree at most 2.
    pub fn from_expr(e: &Expr) -> Result<Self, DynamicsError> {
        let coeffs = quadratic_coefficients(e)?;
        let mut out = [0.0; DIM];
        for (index, (value, slot)) in coeffs.iter().zip(out.iter_mut()).enumerate() {
            if value.im != 0.0 || value.eps != 0.0 || value.im_eps != 0.0 {
                return Err(DynamicsError::NotReal {
                    index,
                    value: *value,
                });
            }
            *slot = value.re;
        }
        Ok(Self::from_array(out))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Algebra-valued coefficients of a polynomial of degree at most 2, read
/// off from derivatives at the origin.
pub fn quadratic_coefficients(e: &Expr) -> Result<[DualComplex; DIM], DynamicsError> {
    match e.polynomial_degree() {
        Some(d) if d <= 2 => {}
        // structurally higher degree is fine if the excess cancels
        Some(_) if third_partials_vanish(e) => {}
        _ => return Err(DynamicsError::NotQuadratic),
    }
    let origin = Env::real(0.0, 0.0);
    let (eq, ep) = (e.diff(Var::Q), e.diff(Var::P));
    Ok([
        e.eval(&origin),
        eq.eval(&origin),
        ep.eval(&origin),
        eq.diff(Var::Q).eval(&origin).scale(0.5),
        eq.diff(Var::P).eval(&origin),
        ep.diff(Var::P).eval(&origin).scale(0.5),
    ])
}

fn third_partials_vanish(e: &Expr) -> bool {
    let points = standard_points();
    let scale = points
        .iter()
        .map(|env| e.eval(env).max_abs())
        .fold(1.0, f64::max);
    let (eqq, epp) = (e.diff(Var::Q).diff(Var::Q), e.diff(Var::P).diff(Var::P));
    let thirds = [
        eqq.diff(Var::Q),
        eqq.diff(Var::P),
        epp.diff(Var::Q),
        epp.diff(Var::P),
    ];
    thirds.iter().all(|d| {
        points
            .iter()
            .all(|env| d.eval(env).max_abs() <= 1e-12 * scale)
    })
}

/// A quadratic Hamiltonian `H(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadHamiltonian(pub CoeffState);

impl QuadHamiltonian {
    pub fn new(coeffs: CoeffState) -> Self {
        Self(coeffs)
    }

    /// `(q² + p²)/2`.
    pub fn harmonic() -> Self {
        Self(CoeffState {
            cqq: 0.5,
            cpp: 0.5,
            ..CoeffState::default()
        })
    }

    /// `p²/2`.
    pub fn free() -> Self {
        Self(CoeffState {
            cpp: 0.5,
            ..CoeffState::default()
        })
    }

    pub fn coeffs(&self) -> CoeffState {
        self.0
    }

    pub fn to_expr(&self) -> Expr {
        self.0.to_expr()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self(CoeffState::from_array(self.0.to_array().map(|c| c * k)))
    }
}

/// `{H, k} = H_p k_q − H_q k_p`.
pub fn poisson(h: &Expr, k: &Expr) -> Expr {
    h.diff(Var::P) * k.diff(Var::Q) - h.diff(Var::Q) * k.diff(Var::P)
}

/// `H̊ = H + (εh/2)(H_p ∂_q − H_q ∂_p)`.
pub fn weyl_classical(par: &RepParams, h: &Expr) -> DiffOp {
    let half_eps_h = DualComplex::EPS.scale(0.5 * par.h());
    DiffOp::multiplication(h.clone())
        .with_term((1, 0), h.diff(Var::P).scale(half_eps_h))
        .and_then(|op| op.with_term((0, 1), h.diff(Var::Q).scale(-half_eps_h)))
        .expect("first-order operator")
}

/// Multiplication symbol of `[H̊, k̊]`; the derivative coefficients are
/// checked to vanish on the standard sample set.
pub fn classical_commutator_check(
    par: &RepParams,
    h: &Expr,
    k: &Expr,
) -> Result<Expr, DynamicsError> {
    let comm = weyl_classical(par, h).commutator(&weyl_classical(par, k))?;
    let points = standard_points();
    let mut residual = 0.0_f64;
    for (index, coeff) in comm.terms() {
        if index == (0, 0) {
            continue;
        }
        for env in &points {
            residual = residual.max(coeff.eval(env).max_abs());
        }
    }
    if residual > 1e-10 {
        return Err(DynamicsError::ResidualDerivativeTerms { residual });
    }
    Ok(comm.coeff((0, 0)))
}

fn i_over_two_pi() -> DualComplex {
    DualComplex::new(0.0, 1.0 / (2.0 * PI), 0.0, 0.0)
}

/// `Q̃ = (i/2π)·X = q + (iℏ/4π)∂_p`.
pub fn quantum_position(par: &RepParams) -> DiffOp {
    gen_quantum(par).0.scale(i_over_two_pi())
}

/// `P̃ = (i/2π)·Y = p − (iℏ/4π)∂_q`.
pub fn quantum_momentum(par: &RepParams) -> DiffOp {
    gen_quantum(par).1.scale(i_over_two_pi())
}

/// Weyl quantization of a quadratic symbol by symmetrized products of
/// `Q̃`, `P̃`.
pub fn weyl_quantum_quadratic(par: &RepParams, h: &QuadHamiltonian) -> DiffOp {
    let (qt, pt) = (quantum_position(par), quantum_momentum(par));
    let compose = |a: &DiffOp, b: &DiffOp| a.compose(b).expect("order 2");
    let qq = compose(&qt, &qt);
    let pp = compose(&pt, &pt);
    let sym = compose(&qt, &pt)
        .add(&compose(&pt, &qt))
        .scale(DualComplex::real(0.5));
    let c = h.coeffs();
    let r = DualComplex::real;
    DiffOp::identity()
        .scale(r(c.c1))
        .add(&qt.scale(r(c.cq)))
        .add(&pt.scale(r(c.cp)))
        .add(&qq.scale(r(c.cqq)))
        .add(&sym.scale(r(c.cqp)))
        .add(&pp.scale(r(c.cpp)))
}

/// `κ` with `[Q̃, P̃] = κ·Id`, computed from the operators.
pub fn canonical_commutator(par: &RepParams) -> Result<Complex64, DynamicsError> {
    let comm = quantum_position(par).commutator(&quantum_momentum(par))?;
    let kappa = comm
        .as_scalar(&standard_points(), 1e-12)
        .ok_or(DynamicsError::NotScalar)?;
    if kappa.eps_part() != Complex64::new(0.0, 0.0) {
        return Err(DynamicsError::NotScalar);
    }
    Ok(kappa.complex_part())
}

/// `{q, p}` under [`poisson`], evaluated as a number.
pub fn poisson_unit() -> f64 {
    poisson(&Expr::q(), &Expr::p())
        .eval(&Env::real(0.0, 0.0))
        .re
}

/// Which constant multiplies `dk̃/dt` in the quantum evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuantumConvention {
    /// `ih`, as in `ih dk̃/dt = [H̃, k̃]`.
    Paper,
    /// `κ / {q, p}`, which makes the quantum coefficient flow equal the
    /// classical one for quadratic Hamiltonians.
    #[default]
    Egorov,
}

impl fmt::Display for QuantumConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumConvention::Paper => write!(f, "paper"),
            QuantumConvention::Egorov => write!(f, "egorov"),
        }
    }
}

impl FromStr for QuantumConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(QuantumConvention::Paper),
            "egorov" => Ok(QuantumConvention::Egorov),
            other => Err(format!(
                "unknown convention `{other}` (expected paper|egorov)"
            )),
        }
    }
}

/// The constant `λ` in `λ dk̃/dt = [H̃, k̃]`.
pub fn evolution_constant(
    par: &RepParams,
    convention: QuantumConvention,
) -> Result<Complex64, DynamicsError> {
    Ok(match convention {
        QuantumConvention::Paper => Complex64::new(0.0, par.h()),
        QuantumConvention::Egorov => canonical_commutator(par)? / poisson_unit(),
    })
}

/// Factor `α` such that the `paper` flow at time `t` is the `egorov` flow at
/// time `α·t`.
pub fn time_rescaling_factor(par: &RepParams) -> Result<f64, DynamicsError> {
    let ratio = evolution_constant(par, QuantumConvention::Egorov)?
        / evolution_constant(par, QuantumConvention::Paper)?;
    if ratio.im.abs() > 1e-12 * ratio.re.abs().max(1.0) {
        return Err(DynamicsError::NotReal {
            index: 0,
            value: DualComplex::complex(ratio),
        });
    }
    Ok(ratio.re)
}

/// Basis element `j` of `{Id, Q̃, P̃, Q̃², sym(Q̃P̃), P̃²}` in normal order.
fn quantum_basis(j: usize, kappa: Complex64) -> OrderedPoly {
    let one = Complex64::new(1.0, 0.0);
    match j {
        0 => OrderedPoly::monomial(0, 0, one),
        1 => OrderedPoly::monomial(1, 0, one),
        2 => OrderedPoly::monomial(0, 1, one),
        3 => OrderedPoly::monomial(2, 0, one),
        // (QP + PQ)/2 = QP − κ/2
        4 => OrderedPoly::monomial(1, 1, one).add(&OrderedPoly::monomial(0, 0, -kappa * 0.5)),
        5 => OrderedPoly::monomial(0, 2, one),
        _ => unreachable!("basis index out of range"),
    }
}

/// Normal-ordered form of the quantized quadratic observable.
pub fn ordered_from_coeffs(state: &CoeffState, kappa: Complex64) -> OrderedPoly {
    state
        .to_array()
        .iter()
        .enumerate()
        .fold(OrderedPoly::zero(), |acc, (j, &c)| {
            let mut term = OrderedPoly::zero();
            for ((a, b), v) in quantum_basis(j, kappa).terms() {
                term.add_term(a, b, v * c);
            }
            acc.add(&term)
        })
}

/// Coefficients over the symmetrized basis; fails if terms of degree above
/// two survive.
pub fn ordered_to_coeffs(
    poly: &OrderedPoly,
    kappa: Complex64,
) -> Result<[Complex64; DIM], DynamicsError> {
    let excess = poly.excess_above(2);
    if excess > 1e-12 * poly.max_norm().max(1.0) {
        return Err(DynamicsError::ClosureViolation { magnitude: excess });
    }
    let cqp = poly.coeff(1, 1);
    Ok([
        poly.coeff(0, 0) + cqp * kappa * 0.5,
        poly.coeff(1, 0),
        poly.coeff(0, 1),
        poly.coeff(2, 0),
        cqp,
        poly.coeff(0, 2),
    ])
}

/// Realizes a normal-ordered polynomial of degree at most 2 as a
/// differential operator built from `Q̃`, `P̃`.
pub fn ordered_to_diffop(par: &RepParams, poly: &OrderedPoly) -> Result<DiffOp, DynamicsError> {
    let (qt, pt) = (quantum_position(par), quantum_momentum(par));
    let mut out = DiffOp::zero();
    for ((a, b), c) in poly.terms() {
        let mut op = DiffOp::identity();
        for _ in 0..a {
            op = op.compose(&qt)?;
        }
        for _ in 0..b {
            op = op.compose(&pt)?;
        }
        out = out.add(&op.scale(DualComplex::complex(c)));
    }
    Ok(out)
}

/// Matrix of `k ↦ {H, k}` on the coefficient basis, built from [`poisson`].
#[allow(clippy::needless_range_loop)] // fills columns
pub fn classical_flow_matrix(h: &QuadHamiltonian) -> Result<Matrix<f64>, DynamicsError> {
    let h_expr = h.to_expr();
    let mut m = [[0.0; DIM]; DIM];
    for j in 0..DIM {
        let column = CoeffState::from_expr(&poisson(&h_expr, &CoeffState::unit(j).to_expr()))?;
        for (i, v) in column.to_array().into_iter().enumerate() {
            m[i][j] = v;
        }
    }
    Ok(m)
}

/// The same matrix read off from `[H̊, k̊] / (εh)`.
#[allow(clippy::needless_range_loop)] // fills columns
pub fn classical_flow_matrix_via_commutator(
    par: &RepParams,
    h: &QuadHamiltonian,
) -> Result<Matrix<f64>, DynamicsError> {
    let h_expr = h.to_expr();
    let mut m = [[0.0; DIM]; DIM];
    for j in 0..DIM {
        let symbol = classical_commutator_check(par, &h_expr, &CoeffState::unit(j).to_expr())?;
        let coeffs = quadratic_coefficients(&symbol)?;
        for (i, v) in coeffs.into_iter().enumerate() {
            let tol = 1e-12 * v.eps.abs().max(1.0);
            if v.re.abs() > tol || v.im.abs() > tol || v.im_eps.abs() > tol {
                return Err(DynamicsError::NotReal { index: i, value: v });
            }
            m[i][j] = v.eps / par.h();
        }
    }
    Ok(m)
}

/// Matrix of `k̃ ↦ [H̃, k̃] / λ` on the symmetrized quantum basis.
#[allow(clippy::needless_range_loop)] // fills columns
pub fn quantum_flow_matrix(
    par: &RepParams,
    h: &QuadHamiltonian,
    convention: QuantumConvention,
) -> Result<Matrix<Complex64>, DynamicsError> {
    let kappa = canonical_commutator(par)?;
    let lambda = evolution_constant(par, convention)?;
    let h_op = ordered_from_coeffs(&h.coeffs(), kappa);
    let mut m = [[Complex64::default(); DIM]; DIM];
    for j in 0..DIM {
        let comm = h_op.commutator(&quantum_basis(j, kappa), kappa);
        let column = ordered_to_coeffs(&comm, kappa)?;
        for (i, v) in column.into_iter().enumerate() {
            m[i][j] = v / lambda;
        }
    }
    Ok(m)
}

pub type Trajectory = Vec<(f64, CoeffState)>;

/// Hamilton flow `dk/dt = {H, k}` of a quadratic observable, RK4.
pub fn evolve_classical(
    h: &QuadHamiltonian,
    k0: &CoeffState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let times = time_grid(t_end, dt)?;
    let m = classical_flow_matrix(h)?;
    let states = integrate(&m, k0.to_array(), &times);
    Ok(times
        .into_iter()
        .zip(states)
        .map(|(t, y)| (t, CoeffState::from_array(y)))
        .collect())
}

/// Heisenberg flow `λ dk̃/dt = [H̃, k̃]` of a quantized quadratic
/// observable, RK4 on the symmetrized-basis coefficients.
pub fn evolve_quantum(
    par: &RepParams,
    h: &QuadHamiltonian,
    k0: &CoeffState,
    t_end: f64,
    dt: f64,
    convention: QuantumConvention,
) -> Result<Trajectory, DynamicsError> {
    let times = time_grid(t_end, dt)?;
    let m = quantum_flow_matrix(par, h, convention)?;
    let y0 = k0.to_array().map(|c| Complex64::new(c, 0.0));
    let states = integrate(&m, y0, &times);
    times
        .into_iter()
        .zip(states)
        .map(|(t, y)| {
            let mut re = [0.0; DIM];
            for (index, (v, slot)) in y.iter().zip(re.iter_mut()).enumerate() {
                if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
                    return Err(DynamicsError::NotReal {
                        index,
                        value: DualComplex::complex(*v),
                    });
                }
                *slot = v.re;
            }
            Ok((t, CoeffState::from_array(re)))
        })
        .collect()
}

/// What to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Classical,
    Quantum(QuantumConvention),
}

/// Runs one simulation. `par` only enters the quantum flows; the classical
/// equation carries neither `ℏ` nor `ε`.
pub fn simulate(
    mode: Mode,
    par: &RepParams,
    h: &QuadHamiltonian,
    k0: &CoeffState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    match mode {
        Mode::Classical => evolve_classical(h, k0, t_end, dt),
        Mode::Quantum(convention) => evolve_quantum(par, h, k0, t_end, dt, convention),
    }
}

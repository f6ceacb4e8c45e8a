//! The two induced representations of `H¹` on phase-space functions.
//!
//! * quantum, induced by a complex character of the centre:
//!   `f ↦ e^{−2πi(ℏs + qx + py)} f(q − ℏy/2, p + ℏx/2)`;
//! * classical, induced by a dual-number character of the centre:
//!   `f ↦ e^{−2πi(xq + yp)} (f + εh(s·f + y/(4πi)·f_q − x/(4πi)·f_p))`,
//!   with `h = 2πℏ`.
//!
//! The sign of the central term in each representation is a constant of this
//! module ([`QUANTUM_CENTRAL_SIGN`], [`CLASSICAL_CENTRAL_SIGN`]); it is the
//! unique sign for which `ρ(g)ρ(g′) = ρ(g∗g′)` holds, as checked by
//! [`calibrate_central_sign`]. See `CONVENTIONS.md` at the repository root.

pub mod diffop;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::DualComplex;
use crate::expr::{Env, Expr, Var};
use crate::heisenberg::GroupElement;

pub use diffop::{apply, commutator, compose, DiffOp, DiffOpError, MultiIndex, MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepParamsError {
    #[error("hbar must be a finite nonzero number, got {0}")]
    InvalidHbar(f64),
}

/// Planck constant `ℏ` (nonzero) together with `h = 2πℏ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepParams {
    hbar: f64,
}

impl RepParams {
    pub fn new(hbar: f64) -> Result<Self, RepParamsError> {
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(RepParamsError::InvalidHbar(hbar));
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `h = 2πℏ`.
    pub fn h(&self) -> f64 {
        2.0 * PI * self.hbar
    }
}

impl Default for RepParams {
    /// `ℏ = 1/(2π)`, so `h = 1`.
    fn default() -> Self {
        Self {
            hbar: 1.0 / (2.0 * PI),
        }
    }
}

/// Sign of the central term of a representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralSign {
    Minus,
    Plus,
}

impl CentralSign {
    pub fn factor(self) -> f64 {
        match self {
            CentralSign::Minus => -1.0,
            CentralSign::Plus => 1.0,
        }
    }

    pub fn both() -> [CentralSign; 2] {
        [CentralSign::Minus, CentralSign::Plus]
    }
}

/// Quantum central character `e^{−2πiℏs}`.
pub const QUANTUM_CENTRAL_SIGN: CentralSign = CentralSign::Minus;
/// Classical central character `1 + εhs`.
pub const CLASSICAL_CENTRAL_SIGN: CentralSign = CentralSign::Plus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepKind {
    Quantum,
    Classical,
}

fn c(re: f64, im: f64) -> DualComplex {
    DualComplex::new(re, im, 0.0, 0.0)
}

/// `εh · z` for complex `z`.
fn eps_h(par: &RepParams, z: Complex64) -> DualComplex {
    DualComplex::from_parts(Complex64::new(0.0, 0.0), z * par.h())
}

/// `1/(4πi) = −i/(4π)`.
fn inv_four_pi_i() -> Complex64 {
    Complex64::new(0.0, -1.0 / (4.0 * PI))
}

/// `exp(−2πi(xq + yp))` as an expression.
fn phase(x: f64, y: f64) -> Expr {
    let arg = Expr::q().scale(c(0.0, -2.0 * PI * x)) + Expr::p().scale(c(0.0, -2.0 * PI * y));
    arg.exp()
}

/// Quantum representation with an explicit central sign.
pub fn rep_quantum_signed(par: &RepParams, g: GroupElement, f: &Expr, sign: CentralSign) -> Expr {
    let hbar = par.hbar();
    let central = Expr::constant(c(0.0, sign.factor() * 2.0 * PI * hbar * g.s).exp());
    let q_new = Expr::q() - Expr::real(0.5 * hbar * g.y);
    let p_new = Expr::p() + Expr::real(0.5 * hbar * g.x);
    central * phase(g.x, g.y) * f.substitute(&q_new, &p_new)
}

/// `ρ_ℏ(g) f = e^{−2πi(ℏs + qx + py)} f(q − ℏy/2, p + ℏx/2)`.
pub fn rep_quantum(par: &RepParams, g: GroupElement, f: &Expr) -> Expr {
    rep_quantum_signed(par, g, f, QUANTUM_CENTRAL_SIGN)
}

/// Classical representation with an explicit central sign.
pub fn rep_classical_signed(par: &RepParams, g: GroupElement, f: &Expr, sign: CentralSign) -> Expr {
    let s_coeff = eps_h(par, Complex64::new(sign.factor() * g.s, 0.0));
    let q_coeff = eps_h(par, inv_four_pi_i() * g.y);
    let p_coeff = eps_h(par, -inv_four_pi_i() * g.x);
    let inner =
        f + f.scale(s_coeff) + f.diff(Var::Q).scale(q_coeff) + f.diff(Var::P).scale(p_coeff);
    phase(g.x, g.y) * inner
}

/// `ρ_εh(g) f = e^{−2πi(xq + yp)} (f + εh(s f + y/(4πi) f_q − x/(4πi) f_p))`.
pub fn rep_classical(par: &RepParams, g: GroupElement, f: &Expr) -> Expr {
    rep_classical_signed(par, g, f, CLASSICAL_CENTRAL_SIGN)
}

/// The classical representation evaluated at one point through ε-shifted
/// arguments: `e^{±εhs} e^{−2πi(qx + py)} f(q − (iℏ/2)εy, p + (iℏ/2)εx)`.
///
/// `env` must be a complex point (no ε components).
pub fn rep_classical_pointwise_signed(
    par: &RepParams,
    g: GroupElement,
    f: &Expr,
    env: &Env,
    sign: CentralSign,
) -> DualComplex {
    debug_assert!(
        env.q.eps_part() == Complex64::new(0.0, 0.0)
            && env.p.eps_part() == Complex64::new(0.0, 0.0),
        "pointwise evaluation expects a complex phase-space point"
    );
    let hbar = par.hbar();
    let central = DualComplex::EPS.scale(sign.factor() * par.h() * g.s).exp();
    let ph = (c(0.0, -2.0 * PI) * (env.q.scale(g.x) + env.p.scale(g.y))).exp();
    let shifted = Env::new(
        env.q - DualComplex::I_EPS.scale(0.5 * hbar * g.y),
        env.p + DualComplex::I_EPS.scale(0.5 * hbar * g.x),
    );
    central * ph * f.eval(&shifted)
}

pub fn rep_classical_pointwise(
    par: &RepParams,
    g: GroupElement,
    f: &Expr,
    env: &Env,
) -> DualComplex {
    rep_classical_pointwise_signed(par, g, f, env, CLASSICAL_CENTRAL_SIGN)
}

/// Representation of either kind with an explicit sign.
pub fn rep_signed(
    kind: RepKind,
    par: &RepParams,
    g: GroupElement,
    f: &Expr,
    sign: CentralSign,
) -> Expr {
    match kind {
        RepKind::Quantum => rep_quantum_signed(par, g, f, sign),
        RepKind::Classical => rep_classical_signed(par, g, f, sign),
    }
}

/// Infinitesimal generators of `ρ(0, x, 0)` and `ρ(0, 0, y)` in the quantum
/// representation: `X = (ℏ/2)∂_p − 2πiq`, `Y = −(ℏ/2)∂_q − 2πip`.
pub fn gen_quantum(par: &RepParams) -> (DiffOp, DiffOp) {
    let half = 0.5 * par.hbar();
    let x = DiffOp::zero()
        .with_term((0, 1), Expr::real(half))
        .and_then(|op| op.with_term((0, 0), Expr::q().scale(c(0.0, -2.0 * PI))))
        .expect("order 1");
    let y = DiffOp::zero()
        .with_term((1, 0), Expr::real(-half))
        .and_then(|op| op.with_term((0, 0), Expr::p().scale(c(0.0, -2.0 * PI))))
        .expect("order 1");
    (x, y)
}

/// Classical generators: `X = −2πiq − (εh/4πi)∂_p`, `Y = −2πip + (εh/4πi)∂_q`.
pub fn gen_classical(par: &RepParams) -> (DiffOp, DiffOp) {
    let k = eps_h(par, inv_four_pi_i());
    let x = DiffOp::zero()
        .with_term((0, 0), Expr::q().scale(c(0.0, -2.0 * PI)))
        .and_then(|op| op.with_term((0, 1), Expr::constant(-k)))
        .expect("order 1");
    let y = DiffOp::zero()
        .with_term((0, 0), Expr::p().scale(c(0.0, -2.0 * PI)))
        .and_then(|op| op.with_term((1, 0), Expr::constant(k)))
        .expect("order 1");
    (x, y)
}

/// Largest pointwise residual of `ρ(g)ρ(g′)f − ρ(g∗g′)f` over the given
/// pairs, functions and points.
pub fn representation_residual(
    kind: RepKind,
    par: &RepParams,
    sign: CentralSign,
    pairs: &[(GroupElement, GroupElement)],
    corpus: &[Expr],
    points: &[Env],
) -> f64 {
    let mut worst = 0.0_f64;
    for &(g1, g2) in pairs {
        let g12 = g1 * g2;
        for f in corpus {
            let nested = rep_signed(kind, par, g1, &rep_signed(kind, par, g2, f, sign), sign);
            let direct = rep_signed(kind, par, g12, f, sign);
            worst = worst.max(crate::expr::max_residual(&nested, &direct, points));
        }
    }
    worst
}

/// Outcome of running the representation property for both central signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub kind: RepKind,
    pub residual_minus: f64,
    pub residual_plus: f64,
    pub tolerance: f64,
}

impl Calibration {
    pub fn residual(&self, sign: CentralSign) -> f64 {
        match sign {
            CentralSign::Minus => self.residual_minus,
            CentralSign::Plus => self.residual_plus,
        }
    }

    /// The passing sign, when exactly one sign passes.
    pub fn selected(&self) -> Option<CentralSign> {
        let passing: Vec<CentralSign> = CentralSign::both()
            .into_iter()
            .filter(|&s| self.residual(s) <= self.tolerance)
            .collect();
        match passing.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

/// Runs the representation property for both signs of the central term.
pub fn calibrate_central_sign(
    kind: RepKind,
    par: &RepParams,
    pairs: &[(GroupElement, GroupElement)],
    corpus: &[Expr],
    points: &[Env],
    tolerance: f64,
) -> Calibration {
    Calibration {
        kind,
        residual_minus: representation_residual(
            kind,
            par,
            CentralSign::Minus,
            pairs,
            corpus,
            points,
        ),
        residual_plus: representation_residual(kind, par, CentralSign::Plus, pairs, corpus, points),
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expr_approx_eq, max_residual, standard_points};

    fn par() -> RepParams {
        RepParams::new(0.37).unwrap()
    }

    fn corpus() -> Vec<Expr> {
        let (q, p) = (Expr::q(), Expr::p());
        vec![
            Expr::one(),
            q.clone(),
            &q * &p,
            q.pow(2) - p.pow(3),
            (Expr::real(0.5) * &q - &p).exp(),
            (&q + Expr::real(2.0) * &p).sin() * &q,
        ]
    }

    #[test]
    fn zero_hbar_is_rejected() {
        assert!(RepParams::new(0.0).is_err());
        assert!(RepParams::new(f64::NAN).is_err());
        assert!((RepParams::default().h() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantum_identity_and_centre() {
        let par = par();
        let pts = standard_points();
        for f in corpus() {
            let id = rep_quantum(&par, GroupElement::IDENTITY, &f);
            assert!(expr_approx_eq(&id, &f, &pts, 1e-14));
            let s = 0.8;
            let got = rep_quantum(&par, GroupElement::central(s), &f);
            let factor = c(0.0, -2.0 * PI * par.hbar() * s).exp();
            assert!(expr_approx_eq(&got, &f.scale(factor), &pts, 1e-12));
        }
    }

    #[test]
    fn quantum_shift_of_q() {
        let par = par();
        let y = 0.6;
        let got = rep_quantum(&par, GroupElement::new(0.0, 0.0, y), &Expr::q());
        let want = (Expr::p().scale(c(0.0, -2.0 * PI * y))).exp()
            * (Expr::q() - Expr::real(0.5 * par.hbar() * y));
        assert!(expr_approx_eq(&got, &want, &standard_points(), 1e-13));
    }

    #[test]
    fn classical_identity_centre_and_shift() {
        let par = par();
        let pts = standard_points();
        for f in corpus() {
            assert_eq!(rep_classical(&par, GroupElement::IDENTITY, &f), f);
            let s = -1.3;
            let got = rep_classical(&par, GroupElement::central(s), &f);
            let factor = DualComplex::new(1.0, 0.0, par.h() * s, 0.0);
            assert!(expr_approx_eq(&got, &f.scale(factor), &pts, 1e-12));
        }
        // the x-shift acts through f_p, the y-shift through f_q
        let x = 0.45;
        let got = rep_classical(&par, GroupElement::new(0.0, x, 0.0), &Expr::p());
        let shift = eps_h(&par, inv_four_pi_i() * x);
        let want =
            Expr::q().scale(c(0.0, -2.0 * PI * x)).exp() * (Expr::p() - Expr::constant(shift));
        assert!(expr_approx_eq(&got, &want, &pts, 1e-13));
        let got = rep_classical(&par, GroupElement::new(0.0, x, 0.0), &Expr::q());
        let want = Expr::q().scale(c(0.0, -2.0 * PI * x)).exp() * Expr::q();
        assert!(expr_approx_eq(&got, &want, &pts, 1e-13));
        let y = -0.8;
        let got = rep_classical(&par, GroupElement::new(0.0, 0.0, y), &Expr::q());
        let shift = eps_h(&par, inv_four_pi_i() * y);
        let want =
            Expr::p().scale(c(0.0, -2.0 * PI * y)).exp() * (Expr::q() + Expr::constant(shift));
        assert!(expr_approx_eq(&got, &want, &pts, 1e-13));
    }

    #[test]
    fn pointwise_form_matches_expression_form() {
        let par = par();
        let pts = standard_points();
        let gs = [
            GroupElement::IDENTITY,
            GroupElement::new(0.3, -0.7, 0.2),
            GroupElement::new(-1.1, 0.4, 0.9),
        ];
        for f in corpus() {
            for g in gs {
                let expr = rep_classical(&par, g, &f);
                for env in &pts {
                    let a = expr.eval(env);
                    let b = rep_classical_pointwise(&par, g, &f, env);
                    assert!(a.approx_eq(b, 1e-10), "{g:?} {f}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn pointwise_central_and_derivative_terms() {
        let par = par();
        let env = Env::real(0.7, -0.2);
        let s = 0.25;
        let v = rep_classical_pointwise(&par, GroupElement::central(s), &Expr::one(), &env);
        assert!(v.approx_eq(DualComplex::new(1.0, 0.0, par.h() * s, 0.0), 1e-15));
        // f = q², g = (0,0,y): ε-part −(iℏ/2)·y·2q equals εh·y/(4πi)·2q
        let y = 0.9;
        let g = GroupElement::new(0.0, 0.0, y);
        let v = rep_classical_pointwise(&par, g, &Expr::q().pow(2), &env);
        let ph = c(0.0, -2.0 * PI * y * env.p.re).exp();
        let expected_eps = Complex64::new(0.0, -0.5 * par.hbar() * y * 2.0 * env.q.re);
        let closed_form = inv_four_pi_i() * par.h() * y * 2.0 * env.q.re;
        assert!((expected_eps - closed_form).norm() < 1e-15);
        let want = ph * DualComplex::from_parts(Complex64::new(0.49, 0.0), expected_eps);
        assert!(v.approx_eq(want, 1e-14));
    }

    #[test]
    fn generator_examples() {
        let par = par();
        let pts = standard_points();
        let (x, y) = gen_quantum(&par);
        let want = Expr::q().scale(c(0.0, -2.0 * PI));
        assert!(expr_approx_eq(&x.apply(&Expr::one()), &want, &pts, 1e-14));
        let want = Expr::real(-0.5 * par.hbar()) + (Expr::p() * Expr::q()).scale(c(0.0, -2.0 * PI));
        assert!(expr_approx_eq(&y.apply(&Expr::q()), &want, &pts, 1e-13));

        let (x, y) = gen_classical(&par);
        let want = Expr::q().scale(c(0.0, -2.0 * PI));
        assert!(expr_approx_eq(&x.apply(&Expr::one()), &want, &pts, 1e-14));
        let want = (Expr::p() * Expr::q()).scale(c(0.0, -2.0 * PI))
            + Expr::constant(eps_h(&par, inv_four_pi_i()));
        assert!(expr_approx_eq(&y.apply(&Expr::q()), &want, &pts, 1e-13));
    }

    /// Central finite difference of `t ↦ ρ(g(t)) f` at `t = 0`.
    fn finite_difference(
        rep: impl Fn(GroupElement) -> Expr,
        direction: fn(f64) -> GroupElement,
        env: &Env,
        step: f64,
    ) -> DualComplex {
        let plus = rep(direction(step)).eval(env);
        let minus = rep(direction(-step)).eval(env);
        (plus - minus).scale(0.5 / step)
    }

    type Subgroup = fn(f64) -> GroupElement;

    #[test]
    fn generators_match_one_parameter_subgroups() {
        let pts = standard_points();
        let step = 1e-6;
        for hbar in [0.1, 1.0, 7.0] {
            let par = RepParams::new(hbar).unwrap();
            let (qx, qy) = gen_quantum(&par);
            let (cx, cy) = gen_classical(&par);
            for f in corpus() {
                let cases: [(&DiffOp, RepKind, Subgroup); 4] = [
                    (&qx, RepKind::Quantum, |t| GroupElement::new(0.0, t, 0.0)),
                    (&qy, RepKind::Quantum, |t| GroupElement::new(0.0, 0.0, t)),
                    (&cx, RepKind::Classical, |t| GroupElement::new(0.0, t, 0.0)),
                    (&cy, RepKind::Classical, |t| GroupElement::new(0.0, 0.0, t)),
                ];
                for (gen, kind, dir) in cases {
                    let applied = gen.apply(&f);
                    for env in &pts {
                        let fd = finite_difference(
                            |g| rep_signed(kind, &par, g, &f, CentralSign::Plus),
                            dir,
                            env,
                            step,
                        );
                        let exact = applied.eval(env);
                        assert!(
                            fd.approx_eq(exact, 1e-4 * (1.0 + exact.max_abs())),
                            "{kind:?} hbar={hbar} f={f}: {fd} vs {exact}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn commutators_of_generators() {
        let pts = standard_points();
        for hbar in [0.1, 1.0, 7.0] {
            let par = RepParams::new(hbar).unwrap();
            let (x, y) = gen_quantum(&par);
            let comm = y.commutator(&x).unwrap();
            let want = DiffOp::scalar(c(0.0, par.h()));
            assert!(comm.max_residual(&want, &pts) <= 1e-12, "{comm}");

            let (x, y) = gen_classical(&par);
            let comm = x.commutator(&y).unwrap();
            let want = DiffOp::scalar(DualComplex::EPS.scale(par.h()));
            assert!(comm.max_residual(&want, &pts) <= 1e-12, "{comm}");
            assert!(
                x.commutator(&x)
                    .unwrap()
                    .max_residual(&DiffOp::zero(), &pts)
                    <= 1e-12
            );
        }
    }

    #[test]
    fn calibration_selects_frozen_signs() {
        let par = par();
        let pts = standard_points();
        let pairs = [
            (
                GroupElement::new(0.2, 0.5, -0.3),
                GroupElement::new(-0.4, 0.1, 0.8),
            ),
            (
                GroupElement::new(1.0, -0.6, 0.7),
                GroupElement::new(0.3, 0.9, -0.2),
            ),
        ];
        let fs = corpus();
        let quantum = calibrate_central_sign(RepKind::Quantum, &par, &pairs, &fs, &pts, 1e-9);
        assert_eq!(
            quantum.selected(),
            Some(QUANTUM_CENTRAL_SIGN),
            "{quantum:?}"
        );
        let classical = calibrate_central_sign(RepKind::Classical, &par, &pairs, &fs, &pts, 1e-9);
        assert_eq!(
            classical.selected(),
            Some(CLASSICAL_CENTRAL_SIGN),
            "{classical:?}"
        );
    }

    #[test]
    fn representation_property_single_pair() {
        let par = par();
        let f = Expr::q().pow(2) * Expr::p();
        let (g1, g2) = (
            GroupElement::new(0.3, 0.2, -0.5),
            GroupElement::new(-0.1, 0.7, 0.4),
        );
        let nested = rep_classical(&par, g1, &rep_classical(&par, g2, &f));
        let direct = rep_classical(&par, g1 * g2, &f);
        assert!(max_residual(&nested, &direct, &standard_points()) < 1e-12);
    }
}

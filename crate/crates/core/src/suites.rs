//! Self-check suites: every algebraic law and identity the library relies on,
//! evaluated on seeded random data. Each suite reports its worst residual
//! against a fixed tolerance.
//!
//! Residuals of floating-point identities are measured relative to the
//! magnitude of the compared values (floored at 1), so a tolerance of `1e-12`
//! means "equal up to rounding" regardless of operand size.

use std::f64::consts::PI;
use std::fmt;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, DualComplex};
use crate::dynamics::{
    classical_flow_matrix, classical_flow_matrix_via_commutator, evolve_classical, evolve_quantum,
    poisson, simulate, time_rescaling_factor, weyl_classical, CoeffState, Mode, QuadHamiltonian,
    QuantumConvention,
};
use crate::expr::{sample_points, standard_points, Env, Expr, Var};
use crate::heisenberg::GroupElement;
use crate::representation::{
    calibrate_central_sign, gen_classical, gen_quantum, rep_classical, rep_classical_pointwise,
    rep_quantum, DiffOp, RepKind, RepParams, CLASSICAL_CENTRAL_SIGN, QUANTUM_CENTRAL_SIGN,
};

/// Base seed; each suite offsets it.
pub const SUITE_SEED: u64 = 20_260_001;

/// Planck constants the `ℏ`-dependent suites sweep over.
pub const HBAR_SWEEP: [f64; 3] = [0.1, 1.0, 7.0];

/// Multiplication rule under test by the algebra suite.
pub type MulFn = fn(DualComplex, DualComplex) -> DualComplex;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteReport {
    fn within(name: &'static str, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<34} max_residual={:<10.3e} tol={:<8.1e} {}",
            self.name,
            self.max_residual,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

pub struct Suite {
    pub name: &'static str,
    run: Box<dyn Fn() -> SuiteReport + Send + Sync>,
}

impl Suite {
    pub fn new(name: &'static str, run: impl Fn() -> SuiteReport + Send + Sync + 'static) -> Self {
        Self {
            name,
            run: Box::new(run),
        }
    }

    pub fn run(&self) -> SuiteReport {
        (self.run)()
    }
}

/// Runs the suites concurrently; reports come back in input order.
pub fn run_suites(suites: &[Suite]) -> Vec<SuiteReport> {
    thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|s| scope.spawn(move || s.run()))
            .collect();
        handles
            .into_iter()
            .zip(suites)
            .map(|(h, s)| {
                h.join().unwrap_or(SuiteReport {
                    name: s.name,
                    max_residual: f64::INFINITY,
                    tolerance: 0.0,
                    passed: false,
                })
            })
            .collect()
    })
}

/// Every suite, with the library's own multiplication rule.
pub fn all_suites() -> Vec<Suite> {
    suites_with_mul(algebra::mul)
}

/// Every suite, with `mul` substituted in the algebra-law suite.
pub fn suites_with_mul(mul: MulFn) -> Vec<Suite> {
    vec![
        Suite::new("algebra.laws", move || algebra_laws(mul)),
        Suite::new("algebra.exp_additive", algebra_exp),
        Suite::new("expr.dual_lift", expr_dual_lift),
        Suite::new("expr.diff_linear", expr_diff_linear),
        Suite::new("expr.mixed_partials", expr_mixed_partials),
        Suite::new("heisenberg.group_law", heisenberg_group_law),
        Suite::new("representation.calibration", representation_calibration),
        Suite::new("representation.property", representation_property),
        Suite::new("representation.central_character", representation_central),
        Suite::new("representation.generators", representation_generators),
        Suite::new("representation.commutators", representation_commutators),
        Suite::new("representation.cross_form", representation_cross_form),
        Suite::new("dynamics.poisson_laws", dynamics_poisson_laws),
        Suite::new("dynamics.emergence", dynamics_emergence),
        Suite::new("dynamics.planck_cancellation", dynamics_planck),
        Suite::new("dynamics.hamilton_flows", dynamics_hamilton),
        Suite::new("dynamics.egorov", dynamics_egorov),
    ]
}

fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SUITE_SEED + offset)
}

/// `|a − b|` relative to the larger magnitude, floored at 1.
pub fn relative(a: DualComplex, b: DualComplex) -> f64 {
    (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(1.0)
}

fn worst_over_points(f: &Expr, g: &Expr, points: &[Env]) -> f64 {
    points
        .iter()
        .map(|env| relative(f.eval(env), g.eval(env)))
        .fold(0.0, f64::max)
}

pub fn random_element(rng: &mut impl Rng, radius: f64) -> DualComplex {
    let mut c = || rng.gen_range(-radius..=radius);
    DualComplex::new(c(), c(), c(), c())
}

pub fn random_group_element(rng: &mut impl Rng, radius: f64) -> GroupElement {
    GroupElement::new(
        rng.gen_range(-radius..=radius),
        rng.gen_range(-radius..=radius),
        rng.gen_range(-radius..=radius),
    )
}

/// Random polynomial of total degree at most `degree`, coefficients in
/// `[−1, 1]`.
pub fn random_polynomial(rng: &mut impl Rng, degree: u32) -> Expr {
    let mut out = Expr::zero();
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            let c = rng.gen_range(-1.0..=1.0);
            out = out + Expr::real(c) * Expr::q().pow(a) * Expr::p().pow(b);
        }
    }
    out
}

pub fn random_quadratic(rng: &mut impl Rng) -> QuadHamiltonian {
    let mut a = [0.0; 6];
    for c in &mut a {
        *c = rng.gen_range(-1.0..=1.0);
    }
    QuadHamiltonian(CoeffState::from_array(a))
}

/// Fixed test functions: polynomials up to degree 4, exp/sin/cos of linear
/// forms, and products of these.
pub fn corpus() -> Vec<Expr> {
    let (q, p) = (Expr::q(), Expr::p());
    let r = Expr::real;
    vec![
        Expr::one(),
        q.clone(),
        p.clone(),
        &q * &p,
        q.pow(2) - r(2.0) * p.pow(2),
        r(0.5) * q.pow(3) - &q * p.pow(2) + r(1.5),
        (&q + &p).pow(4),
        q.pow(2) * p.pow(2) - r(3.0) * &q,
        (r(0.5) * &q - r(0.3) * &p).exp(),
        (&q + r(2.0) * &p).sin(),
        (r(1.5) * &q - &p).cos(),
        &q * (r(0.7) * &p).sin(),
        (r(0.4) * &q).exp() * (&p - &q).cos(),
        p.pow(2) * (r(-0.6) * &q + r(0.2) * &p).exp(),
    ]
}

fn algebra_laws(mul: MulFn) -> SuiteReport {
    let mut rng = rng(1);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let (a, b, c) = (
            random_element(&mut rng, 10.0),
            random_element(&mut rng, 10.0),
            random_element(&mut rng, 10.0),
        );
        worst = worst
            .max(relative(mul(mul(a, b), c), mul(a, mul(b, c))))
            .max(relative(
                mul(a, algebra::add(b, c)),
                algebra::add(mul(a, b), mul(a, c)),
            ))
            .max(relative(mul(a, b), mul(b, a)));
        // the ε-plane squares to zero exactly
        let n = DualComplex::new(0.0, 0.0, a.eps, a.im_eps);
        if mul(n, n) != DualComplex::ZERO {
            worst = f64::INFINITY;
        }
    }
    let units = [
        (mul(DualComplex::I, DualComplex::I), -DualComplex::ONE),
        (mul(DualComplex::EPS, DualComplex::EPS), DualComplex::ZERO),
        (
            mul(DualComplex::I_EPS, DualComplex::I_EPS),
            DualComplex::ZERO,
        ),
        (mul(DualComplex::I, DualComplex::EPS), DualComplex::I_EPS),
        (mul(DualComplex::EPS, DualComplex::I), DualComplex::I_EPS),
    ];
    for (got, want) in units {
        // structural identities must hold bit for bit
        if got != want {
            worst = f64::INFINITY;
        }
    }
    SuiteReport::within("algebra.laws", worst, 1e-12)
}

fn algebra_exp() -> SuiteReport {
    let mut rng = rng(2);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = random_element(&mut rng, 2.0);
        let b = random_element(&mut rng, 2.0);
        worst = worst.max(relative((a + b).exp(), a.exp() * b.exp()));
    }
    SuiteReport::within("algebra.exp_additive", worst, 1e-10)
}

fn expr_dual_lift() -> SuiteReport {
    let mut rng = rng(3);
    let mut worst = 0.0_f64;
    for f in corpus() {
        let (fq, fp) = (f.diff(Var::Q), f.diff(Var::P));
        for _ in 0..100 {
            let q0 = rng.gen_range(-2.0..=2.0);
            let p0 = rng.gen_range(-2.0..=2.0);
            let base = Env::real(q0, p0);
            let shifted_q = Env::new(DualComplex::new(q0, 0.0, 1.0, 0.0), DualComplex::real(p0));
            let shifted_p = Env::new(DualComplex::real(q0), DualComplex::new(p0, 0.0, 1.0, 0.0));
            let lift_q = DualComplex::complex(f.eval(&shifted_q).eps_part());
            let lift_p = DualComplex::complex(f.eval(&shifted_p).eps_part());
            worst = worst
                .max(relative(lift_q, fq.eval(&base)))
                .max(relative(lift_p, fp.eval(&base)));
        }
    }
    SuiteReport::within("expr.dual_lift", worst, 1e-11)
}

fn expr_diff_linear() -> SuiteReport {
    let mut rng = rng(4);
    let points = standard_points();
    let fs = corpus();
    let mut worst = 0.0_f64;
    for _ in 0..30 {
        let f = &fs[rng.gen_range(0..fs.len())];
        let g = &fs[rng.gen_range(0..fs.len())];
        let a = Expr::real(rng.gen_range(-3.0..=3.0));
        let b = Expr::real(rng.gen_range(-3.0..=3.0));
        for v in [Var::Q, Var::P] {
            let lhs = (&a * f + &b * g).diff(v);
            let rhs = &a * f.diff(v) + &b * g.diff(v);
            worst = worst.max(worst_over_points(&lhs, &rhs, &points));
        }
    }
    SuiteReport::within("expr.diff_linear", worst, 1e-11)
}

fn expr_mixed_partials() -> SuiteReport {
    let points = standard_points();
    let worst = corpus()
        .iter()
        .map(|f| {
            worst_over_points(
                &f.diff(Var::Q).diff(Var::P),
                &f.diff(Var::P).diff(Var::Q),
                &points,
            )
        })
        .fold(0.0, f64::max);
    SuiteReport::within("expr.mixed_partials", worst, 1e-11)
}

fn heisenberg_group_law() -> SuiteReport {
    let mut rng = rng(5);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = random_group_element(&mut rng, 10.0);
        let b = random_group_element(&mut rng, 10.0);
        let c = random_group_element(&mut rng, 10.0);
        let lhs = (a * b) * c;
        let scale = lhs.s.abs().max(1.0);
        worst = worst.max(lhs.max_abs_diff(a * (b * c)) / scale);
        let centre = GroupElement::central(a.s);
        if centre * b != b * centre || b * b.inverse() != GroupElement::IDENTITY {
            worst = f64::INFINITY;
        }
    }
    let x = GroupElement::new(0.0, 1.0, 0.0);
    let y = GroupElement::new(0.0, 0.0, 1.0);
    if (x * y).s - (y * x).s != 1.0 {
        worst = f64::INFINITY;
    }
    SuiteReport::within("heisenberg.group_law", worst, 1e-12)
}

fn representation_pairs(offset: u64, n: usize) -> Vec<(GroupElement, GroupElement)> {
    let mut rng = rng(offset);
    (0..n)
        .map(|_| {
            (
                random_group_element(&mut rng, 1.0),
                random_group_element(&mut rng, 1.0),
            )
        })
        .collect()
}

fn representation_calibration() -> SuiteReport {
    let par = RepParams::default();
    let pairs = representation_pairs(6, 5);
    let fs = corpus();
    let points = standard_points();
    let mut worst = 0.0_f64;
    for (kind, frozen) in [
        (RepKind::Quantum, QUANTUM_CENTRAL_SIGN),
        (RepKind::Classical, CLASSICAL_CENTRAL_SIGN),
    ] {
        let cal = calibrate_central_sign(kind, &par, &pairs, &fs, &points, 1e-9);
        match cal.selected() {
            Some(sign) if sign == frozen => worst = worst.max(cal.residual(sign)),
            _ => worst = f64::INFINITY,
        }
    }
    SuiteReport::within("representation.calibration", worst, 1e-9)
}

fn representation_property() -> SuiteReport {
    let par = RepParams::default();
    let points = standard_points();
    let fs = corpus();
    let mut worst = 0.0_f64;
    for (g1, g2) in representation_pairs(7, 50) {
        let g12 = g1 * g2;
        for f in &fs {
            let nested = rep_quantum(&par, g1, &rep_quantum(&par, g2, f));
            let direct = rep_quantum(&par, g12, f);
            worst = worst.max(crate::expr::max_residual(&nested, &direct, &points));
            let nested = rep_classical(&par, g1, &rep_classical(&par, g2, f));
            let direct = rep_classical(&par, g12, f);
            worst = worst.max(crate::expr::max_residual(&nested, &direct, &points));
        }
    }
    SuiteReport::within("representation.property", worst, 1e-9)
}

fn representation_central() -> SuiteReport {
    let points = standard_points();
    let mut rng = rng(8);
    let mut worst = 0.0_f64;
    for hbar in HBAR_SWEEP {
        let par = RepParams::new(hbar).expect("nonzero");
        for f in corpus() {
            let s = rng.gen_range(-1.0..=1.0);
            let quantum = DualComplex::new(0.0, -2.0 * PI * hbar * s, 0.0, 0.0).exp();
            let classical = DualComplex::new(1.0, 0.0, par.h() * s, 0.0);
            let g = GroupElement::central(s);
            for env in &points {
                let v = f.eval(env);
                worst = worst
                    .max((rep_quantum(&par, g, &f).eval(env) - quantum * v).max_abs())
                    .max((rep_classical(&par, g, &f).eval(env) - classical * v).max_abs());
            }
        }
    }
    SuiteReport::within("representation.central_character", worst, 1e-10)
}

type Flow<'a> = Box<dyn Fn(f64) -> Expr + 'a>;

fn representation_generators() -> SuiteReport {
    let points = standard_points();
    let step = 1e-6;
    let mut worst = 0.0_f64;
    for hbar in HBAR_SWEEP {
        let par = RepParams::new(hbar).expect("nonzero");
        let (qx, qy) = gen_quantum(&par);
        let (cx, cy) = gen_classical(&par);
        for f in corpus() {
            let along_x = |t: f64| GroupElement::new(0.0, t, 0.0);
            let along_y = |t: f64| GroupElement::new(0.0, 0.0, t);
            let cases: [(&DiffOp, Flow); 4] = [
                (&qx, Box::new(|t| rep_quantum(&par, along_x(t), &f))),
                (&qy, Box::new(|t| rep_quantum(&par, along_y(t), &f))),
                (&cx, Box::new(|t| rep_classical(&par, along_x(t), &f))),
                (&cy, Box::new(|t| rep_classical(&par, along_y(t), &f))),
            ];
            for (generator, flow) in cases {
                let exact = generator.apply(&f);
                let (plus, minus) = (flow(step), flow(-step));
                for env in &points {
                    let fd = (plus.eval(env) - minus.eval(env)).scale(0.5 / step);
                    worst = worst.max(relative(fd, exact.eval(env)));
                }
            }
        }
    }
    SuiteReport::within("representation.generators", worst, 1e-4)
}

fn representation_commutators() -> SuiteReport {
    let points = standard_points();
    let mut worst = 0.0_f64;
    for hbar in HBAR_SWEEP {
        let par = RepParams::new(hbar).expect("nonzero");
        let h = par.h();
        let (x, y) = gen_quantum(&par);
        match y.commutator(&x) {
            Ok(c) => {
                worst = worst.max(
                    c.max_residual(&DiffOp::scalar(DualComplex::new(0.0, h, 0.0, 0.0)), &points),
                )
            }
            Err(_) => worst = f64::INFINITY,
        }
        let (x, y) = gen_classical(&par);
        match x.commutator(&y) {
            Ok(c) => {
                worst =
                    worst.max(c.max_residual(&DiffOp::scalar(DualComplex::EPS.scale(h)), &points))
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    SuiteReport::within("representation.commutators", worst, 1e-12)
}

fn representation_cross_form() -> SuiteReport {
    let par = RepParams::default();
    let points = standard_points();
    let mut rng = rng(9);
    let mut worst = 0.0_f64;
    for f in corpus() {
        for _ in 0..5 {
            let g = random_group_element(&mut rng, 1.0);
            let expr = rep_classical(&par, g, &f);
            for env in &points {
                worst = worst
                    .max((expr.eval(env) - rep_classical_pointwise(&par, g, &f, env)).max_abs());
            }
        }
    }
    SuiteReport::within("representation.cross_form", worst, 1e-10)
}

fn dynamics_poisson_laws() -> SuiteReport {
    let points = standard_points();
    let fs = corpus();
    let mut worst = 0.0_f64;
    for (i, h) in fs.iter().enumerate() {
        let k = &fs[(i + 3) % fs.len()];
        let m = &fs[(i + 7) % fs.len()];
        worst = worst
            .max(worst_over_points(&poisson(h, k), &-poisson(k, h), &points))
            .max(worst_over_points(
                &poisson(h, &(k * m)),
                &(poisson(h, k) * m + k * poisson(h, m)),
                &points,
            ));
    }
    SuiteReport::within("dynamics.poisson_laws", worst, 1e-11)
}

fn dynamics_emergence() -> SuiteReport {
    let par = RepParams::default();
    let eh = DualComplex::EPS.scale(par.h());
    let points = sample_points(100, SUITE_SEED + 10);
    let mut rng = rng(11);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let h = random_polynomial(&mut rng, 3);
        let k = random_polynomial(&mut rng, 3);
        let comm = match weyl_classical(&par, &h).commutator(&weyl_classical(&par, &k)) {
            Ok(c) => c,
            Err(_) => return SuiteReport::within("dynamics.emergence", f64::INFINITY, 1e-10),
        };
        let want = DiffOp::multiplication(poisson(&h, &k).scale(eh));
        worst = worst.max(comm.max_residual(&want, &points));
    }
    SuiteReport::within("dynamics.emergence", worst, 1e-10)
}

fn dynamics_planck() -> SuiteReport {
    let mut rng = rng(12);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let h = random_quadratic(&mut rng);
        let k0 = random_quadratic(&mut rng).coeffs();
        let poisson_route = match classical_flow_matrix(&h) {
            Ok(m) => m,
            Err(_) => {
                return SuiteReport::within("dynamics.planck_cancellation", f64::INFINITY, 1e-12)
            }
        };
        let mut reference = None;
        for hbar in HBAR_SWEEP {
            let par = RepParams::new(hbar).expect("nonzero");
            // h cancels from [H̊, k̊]/(εh) up to rounding
            match classical_flow_matrix_via_commutator(&par, &h) {
                Ok(m) => {
                    for (a, b) in m.iter().flatten().zip(poisson_route.iter().flatten()) {
                        worst = worst.max((a - b).abs());
                    }
                }
                Err(_) => worst = f64::INFINITY,
            }
            // and the simulated classical trajectory does not see ℏ at all
            let traj = simulate(Mode::Classical, &par, &h, &k0, 1.0, 1e-2).ok();
            match (&reference, traj) {
                (None, t) => reference = Some(t),
                (Some(r), t) if *r == t => {}
                _ => worst = f64::INFINITY,
            }
        }
    }
    SuiteReport::within("dynamics.planck_cancellation", worst, 1e-12)
}

fn dynamics_hamilton() -> SuiteReport {
    let mut worst = 0.0_f64;
    let harmonic = QuadHamiltonian::harmonic();
    let two_pi = 2.0 * PI;
    match evolve_classical(&harmonic, &CoeffState::q(), two_pi, 1e-3) {
        Ok(traj) => {
            for (t, k) in &traj {
                let want = CoeffState {
                    cq: t.cos(),
                    cp: t.sin(),
                    ..CoeffState::default()
                };
                worst = worst.max(k.max_abs_diff(&want));
            }
            worst = worst.max(
                traj.last()
                    .map_or(f64::INFINITY, |(_, k)| k.max_abs_diff(&CoeffState::q())),
            );
        }
        Err(_) => worst = f64::INFINITY,
    }
    let energy = harmonic.coeffs();
    match evolve_classical(&harmonic, &energy, two_pi, 1e-3) {
        Ok(traj) => {
            for (_, k) in traj {
                worst = worst.max(k.max_abs_diff(&energy));
            }
        }
        Err(_) => worst = f64::INFINITY,
    }
    match evolve_classical(&QuadHamiltonian::free(), &CoeffState::q(), two_pi, 1e-3) {
        Ok(traj) => {
            for (t, k) in traj {
                let want = CoeffState {
                    cq: 1.0,
                    cp: t,
                    ..CoeffState::default()
                };
                worst = worst.max(k.max_abs_diff(&want));
            }
        }
        Err(_) => worst = f64::INFINITY,
    }
    SuiteReport::within("dynamics.hamilton_flows", worst, 1e-8)
}

fn dynamics_egorov() -> SuiteReport {
    let par = RepParams::default();
    let mut rng = rng(13);
    let alpha = match time_rescaling_factor(&par) {
        Ok(a) => a,
        Err(_) => return SuiteReport::within("dynamics.egorov", f64::INFINITY, 1e-8),
    };
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let h = random_quadratic(&mut rng);
        let k0 = CoeffState {
            cq: rng.gen_range(-1.0..=1.0),
            cp: rng.gen_range(-1.0..=1.0),
            ..CoeffState::default()
        };
        let runs = (
            evolve_classical(&h, &k0, 2.0 * PI, 1e-3),
            evolve_quantum(&par, &h, &k0, 2.0 * PI, 1e-3, QuantumConvention::Egorov),
            evolve_classical(&h.scaled(alpha), &k0, 2.0 * PI, 1e-3),
            evolve_quantum(&par, &h, &k0, 2.0 * PI, 1e-3, QuantumConvention::Paper),
        );
        match runs {
            (Ok(c), Ok(q), Ok(cs), Ok(qp)) => {
                for ((_, a), (_, b)) in c.iter().zip(&q).chain(cs.iter().zip(&qp)) {
                    worst = worst.max(a.max_abs_diff(b));
                }
            }
            _ => worst = f64::INFINITY,
        }
    }
    SuiteReport::within("dynamics.egorov", worst, 1e-8)
}

//! Acceptance run: one PASS/FAIL line per criterion, each evaluated by its
//! own loop at its stated tolerance. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use heisenberg_dual::algebra::DualComplex;
use heisenberg_dual::dynamics::{
    evolve_classical, evolve_quantum, poisson, simulate, time_rescaling_factor, weyl_classical,
    CoeffState, Mode, QuadHamiltonian, QuantumConvention,
};
use heisenberg_dual::expr::{max_residual, sample_points, standard_points, Env, Var};
use heisenberg_dual::heisenberg::GroupElement;
use heisenberg_dual::representation::{
    calibrate_central_sign, gen_classical, gen_quantum, rep_classical, rep_quantum, DiffOp,
    RepKind, RepParams, CLASSICAL_CENTRAL_SIGN, QUANTUM_CENTRAL_SIGN,
};
use heisenberg_dual::suites::{
    corpus, random_element, random_group_element, random_polynomial, random_quadratic,
};
use heisenberg_dual_cli::read_trajectory;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x00ac_ce97;
const HBARS: [f64; 3] = [0.1, 1.0, 7.0];

struct Outcome {
    residual: f64,
    tolerance: f64,
    notes: Vec<String>,
}

impl Outcome {
    fn new(tolerance: f64) -> Self {
        Self {
            residual: 0.0,
            tolerance,
            notes: Vec::new(),
        }
    }

    fn observe(&mut self, r: f64) {
        // NaN counts as a failure
        if r.is_nan() {
            self.residual = f64::NAN;
        } else if !self.residual.is_nan() {
            self.residual = self.residual.max(r);
        }
    }

    /// A structural (exact) requirement.
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.notes.push(what.into());
        }
    }

    fn passed(&self) -> bool {
        self.residual <= self.tolerance && self.notes.is_empty()
    }
}

fn rel(a: DualComplex, b: DualComplex) -> f64 {
    (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(1.0)
}

fn rng(k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + k)
}

fn algebra_laws() -> Outcome {
    let mut o = Outcome::new(1e-12);
    let mut rng = rng(1);
    for _ in 0..1000 {
        let a = random_element(&mut rng, 10.0);
        let b = random_element(&mut rng, 10.0);
        let c = random_element(&mut rng, 10.0);
        o.observe(rel((a * b) * c, a * (b * c)));
        o.observe(rel(a * b, b * a));
        o.observe(rel(a * (b + c), a * b + a * c));
    }
    o.require(
        DualComplex::I * DualComplex::I == -DualComplex::ONE,
        "i^2 != -1",
    );
    o.require(
        DualComplex::EPS * DualComplex::EPS == DualComplex::ZERO,
        "eps^2 != 0",
    );
    o.require(
        DualComplex::I_EPS * DualComplex::I_EPS == DualComplex::ZERO,
        "(i eps)^2 != 0",
    );
    o
}

fn dual_lift() -> Outcome {
    let mut o = Outcome::new(1e-11);
    let mut rng = rng(2);
    for f in corpus() {
        let fq = f.diff(Var::Q);
        let fp = f.diff(Var::P);
        for _ in 0..100 {
            let (q, p) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
            let at = Env::real(q, p);
            let dq = f.eval(&Env::new(
                DualComplex::new(q, 0.0, 1.0, 0.0),
                DualComplex::real(p),
            ));
            let dp = f.eval(&Env::new(
                DualComplex::real(q),
                DualComplex::new(p, 0.0, 1.0, 0.0),
            ));
            o.observe(rel(DualComplex::complex(dq.eps_part()), fq.eval(&at)));
            o.observe(rel(DualComplex::complex(dp.eps_part()), fp.eval(&at)));
            o.observe(rel(DualComplex::complex(dq.complex_part()), f.eval(&at)));
        }
    }
    o
}

fn group_law() -> Outcome {
    let mut o = Outcome::new(1e-12);
    let mut rng = rng(3);
    for _ in 0..1000 {
        let a = random_group_element(&mut rng, 10.0);
        let b = random_group_element(&mut rng, 10.0);
        let c = random_group_element(&mut rng, 10.0);
        let lhs = (a * b) * c;
        o.observe(lhs.max_abs_diff(a * (b * c)) / lhs.s.abs().max(1.0));
        let z = GroupElement::central(a.s);
        if z * b != b * z {
            o.require(false, format!("centre does not commute with {b:?}"));
        }
    }
    let x = GroupElement::new(0.0, 1.0, 0.0);
    let y = GroupElement::new(0.0, 0.0, 1.0);
    o.require(
        (x * y).s - (y * x).s == 1.0,
        "noncommutativity witness != 1",
    );
    o
}

fn representation_property() -> Outcome {
    let mut o = Outcome::new(1e-9);
    let par = RepParams::default();
    let mut rng = rng(4);
    let pairs: Vec<_> = (0..50)
        .map(|_| {
            (
                random_group_element(&mut rng, 1.0),
                random_group_element(&mut rng, 1.0),
            )
        })
        .collect();
    let fs = corpus();
    let points = standard_points();
    for (kind, frozen) in [
        (RepKind::Quantum, QUANTUM_CENTRAL_SIGN),
        (RepKind::Classical, CLASSICAL_CENTRAL_SIGN),
    ] {
        let cal = calibrate_central_sign(kind, &par, &pairs, &fs, &points, 1e-9);
        o.require(
            cal.selected() == Some(frozen),
            format!(
                "{kind:?} calibration did not select {frozen:?} (minus {:.1e}, plus {:.1e})",
                cal.residual_minus, cal.residual_plus
            ),
        );
    }
    for (g1, g2) in &pairs {
        let g12 = *g1 * *g2;
        for f in &fs {
            let lhs = rep_quantum(&par, *g1, &rep_quantum(&par, *g2, f));
            o.observe(max_residual(&lhs, &rep_quantum(&par, g12, f), &points));
            let lhs = rep_classical(&par, *g1, &rep_classical(&par, *g2, f));
            o.observe(max_residual(&lhs, &rep_classical(&par, g12, f), &points));
        }
    }
    o
}

/// Largest value of every non-identity coefficient, and the distance of the
/// identity coefficient from `want`.
fn scalar_operator_residual(op: &DiffOp, want: DualComplex, points: &[Env]) -> f64 {
    let mut worst = 0.0_f64;
    for ((a, b), c) in op.terms() {
        for env in points {
            let v = c.eval(env);
            worst = worst.max(if (a, b) == (0, 0) {
                (v - want).max_abs()
            } else {
                v.max_abs()
            });
        }
    }
    if op.coeff((0, 0)).is_zero() {
        worst = worst.max(want.max_abs());
    }
    worst
}

fn commutators() -> Outcome {
    let mut o = Outcome::new(1e-12);
    let points = standard_points();
    for hbar in HBARS {
        let par = RepParams::new(hbar).unwrap();
        let h = 2.0 * PI * hbar;
        let (x, y) = gen_quantum(&par);
        match y.commutator(&x) {
            Ok(c) => o.observe(scalar_operator_residual(
                &c,
                DualComplex::new(0.0, h, 0.0, 0.0),
                &points,
            )),
            Err(e) => o.require(false, format!("quantum, hbar={hbar}: {e}")),
        }
        let (x, y) = gen_classical(&par);
        match x.commutator(&y) {
            Ok(c) => o.observe(scalar_operator_residual(
                &c,
                DualComplex::new(0.0, 0.0, h, 0.0),
                &points,
            )),
            Err(e) => o.require(false, format!("classical, hbar={hbar}: {e}")),
        }
    }
    o
}

fn poisson_emergence() -> Outcome {
    let mut o = Outcome::new(1e-10);
    let par = RepParams::default();
    let mut rng = rng(6);
    let points = sample_points(100, SEED + 60);
    for _ in 0..50 {
        let h = random_polynomial(&mut rng, 3);
        let k = random_polynomial(&mut rng, 3);
        match weyl_classical(&par, &h).commutator(&weyl_classical(&par, &k)) {
            Ok(c) => {
                let bracket = poisson(&h, &k);
                for ((a, b), coeff) in c.terms() {
                    for env in &points {
                        let got = coeff.eval(env);
                        let want = if (a, b) == (0, 0) {
                            DualComplex::EPS.scale(par.h()) * bracket.eval(env)
                        } else {
                            DualComplex::ZERO
                        };
                        o.observe(rel(got, want));
                    }
                }
                if c.coeff((0, 0)).is_zero() {
                    for env in &points {
                        o.observe(bracket.eval(env).max_abs());
                    }
                }
            }
            Err(e) => o.require(false, e.to_string()),
        }
    }
    o
}

fn hamilton_dynamics() -> Outcome {
    let mut o = Outcome::new(1e-8);
    let harmonic = QuadHamiltonian::harmonic();
    match evolve_classical(&harmonic, &CoeffState::q(), 2.0 * PI, 1e-3) {
        Ok(traj) => {
            let (t, last) = traj.last().unwrap();
            o.require(*t == 2.0 * PI, "trajectory does not end at 2π");
            o.observe(last.max_abs_diff(&CoeffState::q()));
        }
        Err(e) => o.require(false, e.to_string()),
    }
    let energy = harmonic.coeffs();
    match evolve_classical(&harmonic, &energy, 2.0 * PI, 1e-3) {
        Ok(traj) => traj
            .iter()
            .for_each(|(_, k)| o.observe(k.max_abs_diff(&energy))),
        Err(e) => o.require(false, e.to_string()),
    }
    match evolve_classical(&QuadHamiltonian::free(), &CoeffState::q(), 2.0 * PI, 1e-3) {
        Ok(traj) => {
            for (t, k) in &traj {
                let want = CoeffState::from_array([0.0, 1.0, *t, 0.0, 0.0, 0.0]);
                o.observe(k.max_abs_diff(&want));
            }
        }
        Err(e) => o.require(false, e.to_string()),
    }
    o
}

fn planck_cancellation() -> Outcome {
    let mut o = Outcome::new(0.0);
    let mut rng = rng(8);
    let mut cases = vec![(QuadHamiltonian::harmonic(), CoeffState::q())];
    cases.extend((0..5).map(|_| {
        (
            random_quadratic(&mut rng),
            random_quadratic(&mut rng).coeffs(),
        )
    }));
    for (h, k0) in &cases {
        let runs: Vec<_> = HBARS
            .iter()
            .map(|&hbar| {
                simulate(
                    Mode::Classical,
                    &RepParams::new(hbar).unwrap(),
                    h,
                    k0,
                    2.0 * PI,
                    1e-3,
                )
            })
            .collect();
        match &runs[0] {
            Ok(first) => {
                for run in &runs[1..] {
                    let same = run.as_ref().is_ok_and(|r| {
                        r.len() == first.len()
                            && r.iter().zip(first).all(|((t1, a), (t2, b))| {
                                t1.to_bits() == t2.to_bits()
                                    && a.to_array()
                                        .iter()
                                        .zip(b.to_array())
                                        .all(|(x, y)| x.to_bits() == y.to_bits())
                            })
                    });
                    o.require(same, "classical trajectory depends on hbar");
                }
            }
            Err(e) => o.require(false, e.to_string()),
        }
    }
    o
}

fn egorov() -> Outcome {
    let mut o = Outcome::new(1e-8);
    let par = RepParams::default();
    let alpha = time_rescaling_factor(&par).expect("real rescaling");
    let mut rng = rng(9);
    for _ in 0..20 {
        let h = random_quadratic(&mut rng);
        let k0 = CoeffState::from_array([
            0.0,
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            0.0,
            0.0,
            0.0,
        ]);
        let classical = evolve_classical(&h, &k0, 2.0 * PI, 1e-3);
        let quantum = evolve_quantum(&par, &h, &k0, 2.0 * PI, 1e-3, QuantumConvention::Egorov);
        let rescaled = evolve_classical(&h.scaled(alpha), &k0, 2.0 * PI, 1e-3);
        let paper = evolve_quantum(&par, &h, &k0, 2.0 * PI, 1e-3, QuantumConvention::Paper);
        match (classical, quantum, rescaled, paper) {
            (Ok(c), Ok(q), Ok(cr), Ok(qp)) => {
                for ((t1, a), (t2, b)) in c.iter().zip(&q).chain(cr.iter().zip(&qp)) {
                    o.require(t1 == t2, "time grids differ");
                    o.observe(a.max_abs_diff(b));
                }
            }
            _ => o.require(false, "integration failed"),
        }
    }
    o
}

fn hdual(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hdual"))
        .args(args)
        .output()
        .expect("run hdual")
}

fn cli_contract() -> Outcome {
    let mut o = Outcome::new(0.0);
    let dir = tempfile::tempdir().expect("temp dir");
    let check = hdual(&["check"]);
    o.require(check.status.code() == Some(0), "check did not exit 0");
    let default = hdual(&[]);
    o.require(
        default.status.code() == Some(0),
        "default subcommand did not exit 0",
    );
    o.require(
        default.stdout == check.stdout,
        "default subcommand differs from check",
    );

    let out = |name: &str| dir.path().join(name);
    let run = |path: &Path| {
        hdual(&[
            "simulate",
            "--mode",
            "quantum",
            "--hamiltonian",
            "harmonic",
            "--observable",
            "q",
            "--out",
            path.to_str().unwrap(),
        ])
    };
    let (a, b) = (out("a.csv"), out("b.csv"));
    o.require(
        run(&a).status.success() && run(&b).status.success(),
        "simulate failed",
    );
    let bytes_a = std::fs::read(&a).unwrap_or_default();
    o.require(
        !bytes_a.is_empty() && bytes_a == std::fs::read(&b).unwrap_or_default(),
        "output not deterministic",
    );
    match read_trajectory(bytes_a.as_slice()) {
        Ok(traj) => {
            let mut again = Vec::new();
            heisenberg_dual_cli::write_trajectory(&mut again, &traj).unwrap();
            o.require(again == bytes_a, "CSV does not round-trip");
            let direct = heisenberg_dual_cli::run_simulation(&heisenberg_dual_cli::SimConfig {
                mode: heisenberg_dual_cli::SimMode::Quantum,
                ..Default::default()
            })
            .unwrap();
            let exact = direct.len() == traj.len() && direct.iter().zip(&traj).all(|(x, y)| x == y);
            o.require(exact, "parsed CSV differs from the in-memory trajectory");
        }
        Err(e) => o.require(false, format!("cannot parse output: {e}")),
    }

    let cfg = out("bad.cfg");
    std::fs::write(&cfg, "mode=classical\nwarp_factor=9\n").unwrap();
    let bad = hdual(&["simulate", "--config", cfg.to_str().unwrap()]);
    o.require(bad.status.code() == Some(2), "unknown key did not exit 2");
    o.require(
        String::from_utf8_lossy(&bad.stderr).contains("warp_factor"),
        "unknown key not named",
    );
    let bad = hdual(&["simulate", "--dt", "-0.5"]);
    o.require(bad.status.code() == Some(2), "invalid dt did not exit 2");
    o.require(
        String::from_utf8_lossy(&bad.stderr).contains("dt"),
        "invalid dt not named",
    );
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("algebra laws", algebra_laws),
        ("dual-lift differentiation", dual_lift),
        ("group law", group_law),
        (
            "representation property (both, calibrated)",
            representation_property,
        ),
        ("generator commutators", commutators),
        ("Poisson bracket emergence", poisson_emergence),
        ("Hamilton dynamics", hamilton_dynamics),
        ("Planck-constant cancellation", planck_cancellation),
        ("quadratic Egorov correspondence", egorov),
        ("CLI contract", cli_contract),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {:<44} max_residual={:<10.3e} tol={:<8.1e} {:>6.2}s {verdict}",
            n + 1,
            name,
            o.residual,
            o.tolerance,
            t.elapsed().as_secs_f64()
        );
        for note in &o.notes {
            println!("             - {note}");
        }
        if !o.passed() {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} of 10 passed in {:.1}s",
        10 - failures,
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

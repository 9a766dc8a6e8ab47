//! EHBVM(s,s) against a stand-alone Gauss collocation solver whose tableau is
//! built from closed-form nodes and Lagrange cardinal polynomials.

mod support;

use hbvm_core::systems::{HarmonicOscillator, QuarticOscillator};
use hbvm_core::{HamiltonianProblem, Integrator, MethodConfig};
use support::{DirectGauss, SplitMix};

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn compare_on(problem: &dyn HamiltonianProblem, seed: u64) {
    let mut rng = SplitMix(seed);
    let dim = problem.dim();
    for trial in 0..100 {
        let s = 2 + trial % 3;
        let y0: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let h = rng.uniform(0.01, 0.2);
        let ours = Integrator::new(MethodConfig::ehbvm(s, s))
            .unwrap()
            .step(problem, &y0, h)
            .unwrap();
        assert!(
            ours.converged,
            "{} trial {trial} did not converge",
            problem.name()
        );
        assert!(ours.state.eta.iter().all(|&e| e == 1.0));
        let direct = DirectGauss::new(s).step(problem, &y0, h);
        let d = max_diff(&ours.y1, &direct);
        assert!(
            d <= 1e-12,
            "{} s={s} h={h} trial {trial}: diff {d:e}",
            problem.name()
        );
    }
}

#[test]
fn closed_form_tableau_is_gauss() {
    // two-stage Gauss coefficients as a check on the oracle itself
    let g = DirectGauss::new(2);
    let r = 3f64.sqrt() / 6.0;
    assert!((g.a[0][1] - (0.25 - r)).abs() < 1e-15);
    assert!((g.a[1][0] - (0.25 + r)).abs() < 1e-15);
    for s in 1..=4 {
        let g = DirectGauss::new(s);
        assert!((g.b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn matches_direct_solver_on_harmonic() {
    compare_on(&HarmonicOscillator::new(1.3).unwrap(), 0x5eed_0001);
}

#[test]
fn matches_direct_solver_on_quartic() {
    compare_on(&QuarticOscillator, 0x5eed_0002);
}

#[test]
fn gauss_and_ehbvm_square_coincide() {
    let p = QuarticOscillator;
    let y0 = QuarticOscillator::INITIAL_STATE;
    for s in 2..=4 {
        let a = Integrator::new(MethodConfig::gauss(s))
            .unwrap()
            .step(&p, &y0, 0.1)
            .unwrap();
        let b = Integrator::new(MethodConfig::ehbvm(s, s))
            .unwrap()
            .step(&p, &y0, 0.1)
            .unwrap();
        assert!(max_diff(&a.y1, &b.y1) <= 1e-14, "s = {s}");
        assert!(b.state.beta.iter().all(|&x| x == 0.0));
    }
}

//! Canonical Hamiltonian problems `y' = J grad H(y)` with extra first integrals.
//!
//! States are laid out as `y = (q_1..q_m, p_1..p_m)`, so the canonical matrix
//! `J = [[0, I], [-I, 0]]` acts by an index shuffle.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Below this `|q|` the Kepler potential refuses to evaluate.
pub const KEPLER_SINGULARITY_RADIUS: f64 = 1e-12;

/// Declared polynomial degrees of the energy and of the extra invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolynomialDegrees {
    pub energy: u32,
    /// Maximum degree over the invariant components.
    pub invariants: u32,
}

/// A Hamiltonian system with `nu >= 0` additional invariants.
///
/// Implementations must be pure: the integrator may call them from several
/// threads at once.
pub trait HamiltonianProblem: Send + Sync {
    /// Short identifier used in reports.
    fn name(&self) -> &str;

    /// Half the state dimension.
    fn half_dim(&self) -> usize;

    fn energy(&self, y: &[f64]) -> Result<f64>;

    /// Writes `grad H(y)` into `out` (length `2m`).
    fn energy_gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()>;

    fn invariant_count(&self) -> usize {
        0
    }

    /// Writes `L(y)` into `out` (length `nu`).
    fn invariants(&self, _y: &[f64], _out: &mut [f64]) -> Result<()> {
        Ok(())
    }

    /// Writes `grad L(y)`, a `2m x nu` matrix stored column by column:
    /// `out[c * 2m + i] = dL_c / dy_i`.
    fn invariant_jacobian(&self, _y: &[f64], _out: &mut [f64]) -> Result<()> {
        Ok(())
    }

    fn polynomial_degrees(&self) -> Option<PolynomialDegrees> {
        None
    }

    /// Exact flow `phi_t(y0)`, when known in closed form.
    fn reference_solution(&self, _t: f64, _y0: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// A representative initial state (used by the CLI and as the centre of
    /// validation samples).
    fn default_initial_state(&self) -> Vec<f64>;

    fn dim(&self) -> usize {
        2 * self.half_dim()
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `out = J v` for `J = [[0, I_m], [-I_m, 0]]`.
pub fn apply_j_into(v: &[f64], out: &mut [f64]) -> Result<()> {
    if !v.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: v.len() + 1,
            actual: v.len(),
        });
    }
    check_len(v.len(), out.len())?;
    let m = v.len() / 2;
    for i in 0..m {
        out[i] = v[m + i];
        out[m + i] = -v[i];
    }
    Ok(())
}

/// `J v` for a state of half-dimension `m`.
pub fn apply_j(m: usize, v: &[f64]) -> Result<Vec<f64>> {
    check_len(2 * m, v.len())?;
    let mut out = vec![0.0; 2 * m];
    apply_j_into(v, &mut out)?;
    Ok(out)
}

/// `H(q, p) = p.p / 2 + (q.q)^2` in the plane, with angular momentum
/// `L = q1 p2 - q2 p1` as an extra invariant.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticOscillator;

impl QuarticOscillator {
    pub const INITIAL_STATE: [f64; 4] = [1.0, 1.0, 0.1, 0.0];
}

impl HamiltonianProblem for QuarticOscillator {
    fn name(&self) -> &str {
        "quartic"
    }

    fn half_dim(&self) -> usize {
        2
    }

    fn energy(&self, y: &[f64]) -> Result<f64> {
        check_len(4, y.len())?;
        let qq = y[0] * y[0] + y[1] * y[1];
        Ok(0.5 * (y[2] * y[2] + y[3] * y[3]) + qq * qq)
    }

    fn energy_gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(4, out.len())?;
        let qq4 = 4.0 * (y[0] * y[0] + y[1] * y[1]);
        out[0] = qq4 * y[0];
        out[1] = qq4 * y[1];
        out[2] = y[2];
        out[3] = y[3];
        Ok(())
    }

    fn invariant_count(&self) -> usize {
        1
    }

    fn invariants(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(1, out.len())?;
        out[0] = angular_momentum(y);
        Ok(())
    }

    fn invariant_jacobian(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(4, out.len())?;
        angular_momentum_gradient(y, out);
        Ok(())
    }

    fn polynomial_degrees(&self) -> Option<PolynomialDegrees> {
        Some(PolynomialDegrees {
            energy: 4,
            invariants: 2,
        })
    }

    fn default_initial_state(&self) -> Vec<f64> {
        Self::INITIAL_STATE.to_vec()
    }
}

fn angular_momentum(y: &[f64]) -> f64 {
    y[0] * y[3] - y[1] * y[2]
}

fn angular_momentum_gradient(y: &[f64], out: &mut [f64]) {
    out[0] = y[3];
    out[1] = -y[2];
    out[2] = -y[1];
    out[3] = y[0];
}

/// `H = (p^2 + omega^2 q^2) / 2`, no extra invariants, exact solution known.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicOscillator {
    omega: f64,
}

impl HarmonicOscillator {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl HamiltonianProblem for HarmonicOscillator {
    fn name(&self) -> &str {
        "harmonic"
    }

    fn half_dim(&self) -> usize {
        1
    }

    fn energy(&self, y: &[f64]) -> Result<f64> {
        check_len(2, y.len())?;
        Ok(0.5 * (y[1] * y[1] + self.omega * self.omega * y[0] * y[0]))
    }

    fn energy_gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(2, y.len())?;
        check_len(2, out.len())?;
        out[0] = self.omega * self.omega * y[0];
        out[1] = y[1];
        Ok(())
    }

    fn polynomial_degrees(&self) -> Option<PolynomialDegrees> {
        Some(PolynomialDegrees {
            energy: 2,
            invariants: 0,
        })
    }

    fn reference_solution(&self, t: f64, y0: &[f64]) -> Option<Vec<f64>> {
        if y0.len() != 2 {
            return None;
        }
        let w = self.omega;
        let (s, c) = (libm::sin(w * t), libm::cos(w * t));
        Some(vec![c * y0[0] + s * y0[1] / w, -w * s * y0[0] + c * y0[1]])
    }

    fn default_initial_state(&self) -> Vec<f64> {
        vec![1.0, 0.0]
    }
}

/// Planar Kepler problem `H = p.p / 2 - 1 / |q|` with angular momentum, started
/// at pericentre of an orbit of the given eccentricity.
#[derive(Debug, Clone, Copy)]
pub struct KeplerProblem {
    eccentricity: f64,
}

impl KeplerProblem {
    pub fn new(eccentricity: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eccentricity) {
            return Err(Error::Domain {
                value: eccentricity,
                lower: 0.0,
                upper: 1.0,
            });
        }
        Ok(Self { eccentricity })
    }

    pub fn eccentricity(&self) -> f64 {
        self.eccentricity
    }

    fn radius(y: &[f64]) -> Result<f64> {
        let r = libm::hypot(y[0], y[1]);
        if !(r >= KEPLER_SINGULARITY_RADIUS) {
            return Err(Error::Evaluation(format!(
                "Kepler potential singular at |q| = {r:e}"
            )));
        }
        Ok(r)
    }
}

impl HamiltonianProblem for KeplerProblem {
    fn name(&self) -> &str {
        "kepler"
    }

    fn half_dim(&self) -> usize {
        2
    }

    fn energy(&self, y: &[f64]) -> Result<f64> {
        check_len(4, y.len())?;
        let r = Self::radius(y)?;
        Ok(0.5 * (y[2] * y[2] + y[3] * y[3]) - 1.0 / r)
    }

    fn energy_gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(4, out.len())?;
        let r = Self::radius(y)?;
        let r3 = r * r * r;
        out[0] = y[0] / r3;
        out[1] = y[1] / r3;
        out[2] = y[2];
        out[3] = y[3];
        Ok(())
    }

    fn invariant_count(&self) -> usize {
        1
    }

    fn invariants(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(1, out.len())?;
        out[0] = angular_momentum(y);
        Ok(())
    }

    fn invariant_jacobian(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(4, y.len())?;
        check_len(4, out.len())?;
        angular_momentum_gradient(y, out);
        Ok(())
    }

    fn reference_solution(&self, t: f64, y0: &[f64]) -> Option<Vec<f64>> {
        // only the circular orbit from the standard initial state has a
        // trivial closed form
        if self.eccentricity != 0.0 || y0 != self.default_initial_state().as_slice() {
            return None;
        }
        let (s, c) = (libm::sin(t), libm::cos(t));
        Some(vec![c, s, -s, c])
    }

    fn default_initial_state(&self) -> Vec<f64> {
        let e = self.eccentricity;
        vec![1.0 - e, 0.0, 0.0, libm::sqrt((1.0 + e) / (1.0 - e))]
    }
}

/// Looks up a built-in problem by its registry key.
///
/// `"kepler"` uses eccentricity 0.6 and `"harmonic"` uses `omega = 1`.
pub fn builtin(name: &str) -> Option<Box<dyn HamiltonianProblem>> {
    match name {
        "quartic" => Some(Box::new(QuarticOscillator)),
        "harmonic" => Some(Box::new(HarmonicOscillator { omega: 1.0 })),
        "kepler" => Some(Box::new(KeplerProblem { eccentricity: 0.6 })),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["quartic", "harmonic", "kepler"];

/// Worst observed deviations from the structural identities of a problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    /// Energy gradient vs central differences.
    pub gradient_error: f64,
    /// Invariant Jacobian vs central differences.
    pub jacobian_error: f64,
    /// `max |grad L^T J grad H|`.
    pub invariance_error: f64,
}

impl ValidationReport {
    pub const GRADIENT_TOL: f64 = 1e-6;
    pub const INVARIANCE_TOL: f64 = 1e-10;

    pub fn passed(&self) -> bool {
        self.gradient_error <= Self::GRADIENT_TOL
            && self.jacobian_error <= Self::GRADIENT_TOL
            && self.invariance_error <= Self::INVARIANCE_TOL
    }
}

/// Checks gradient consistency and `grad L^T J grad H = 0` at the given states.
///
/// Finite differences use the step `1e-6 (1 + |y|_inf)`.
pub fn validate_at(
    problem: &dyn HamiltonianProblem,
    states: &[Vec<f64>],
) -> Result<ValidationReport> {
    let n = problem.dim();
    let nu = problem.invariant_count();
    let mut report = ValidationReport {
        samples: states.len(),
        ..Default::default()
    };
    let mut grad = vec![0.0; n];
    let mut jac = vec![0.0; n * nu];
    let mut jgrad = vec![0.0; n];
    let mut lp = vec![0.0; nu];
    let mut lm = vec![0.0; nu];
    let mut shifted = vec![0.0; n];

    for y in states {
        check_len(n, y.len())?;
        problem.energy_gradient(y, &mut grad)?;
        problem.invariant_jacobian(y, &mut jac)?;
        let y_norm = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let step = 1e-6 * (1.0 + y_norm);

        for i in 0..n {
            shifted.copy_from_slice(y);
            shifted[i] = y[i] + step;
            let hp = problem.energy(&shifted)?;
            problem.invariants(&shifted, &mut lp)?;
            shifted[i] = y[i] - step;
            let hm = problem.energy(&shifted)?;
            problem.invariants(&shifted, &mut lm)?;

            let fd = (hp - hm) / (2.0 * step);
            report.gradient_error = report.gradient_error.max((fd - grad[i]).abs());
            for c in 0..nu {
                let fd = (lp[c] - lm[c]) / (2.0 * step);
                report.jacobian_error = report.jacobian_error.max((fd - jac[c * n + i]).abs());
            }
        }

        apply_j_into(&grad, &mut jgrad)?;
        for c in 0..nu {
            let dot: f64 = jac[c * n..(c + 1) * n]
                .iter()
                .zip(&jgrad)
                .map(|(a, b)| a * b)
                .sum();
            report.invariance_error = report.invariance_error.max(dot.abs());
        }
    }
    Ok(report)
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

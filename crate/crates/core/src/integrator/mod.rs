//! Gauss, HBVM(k, s) and EHBVM(k, s) one-step methods.
//!
//! A step looks for a degree-`s` polynomial `u` with `u(0) = y0` whose
//! derivative is expanded in the orthonormal Legendre basis,
//!
//! ```text
//! u'(ch) = sum_j P_j(c) gamma_j,        gamma_j = eta_j * gamma~_j,
//! gamma~_j = sum_l b_l P_j(c_l) J grad H(u(c_l h))
//! ```
//!
//! and sets `y1 = u(h) = y0 + h gamma_0`. HBVM uses `eta = 1`. EHBVM keeps
//! `eta_j = 1` for `j < s - nu` and chooses `eta_j = 1 - beta_j` for the top `nu`
//! coefficients so that the discrete line integral of `grad L` along `u`
//! vanishes:
//!
//! ```text
//! sum_{j >= s-nu} beta_j phi_j^T gamma~_j = sum_j phi_j^T gamma~_j,
//! phi_j = sum_l b_l P_j(c_l) grad L(u(c_l h))
//! ```
//!
//! The unknowns are `beta_j = h^(2(s-1-j)) alpha_j` rather than `alpha_j`, which
//! keeps the `nu x nu` system free of explicit powers of `h`. The system is
//! re-solved inside every fixed-point sweep.
//!
//! The right-hand side is O(h^(2s)) while its individual terms are O(1). Since
//! `grad L^T J grad H = 0` and the `k x k` matrix `(sqrt(b_l) P_j(c_l))` is
//! orthogonal, the sum over all `j < k` vanishes, and the right-hand side is
//! evaluated as `-sum_{s <= j < k} phi_j^T gamma~_j`, a sum of small terms.

mod config;
mod tableau;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use config::{MethodConfig, MethodKind};
pub use tableau::build_tableau;

use crate::diagnostics::{Trajectory, TrajectoryMeta};
use crate::legendre::LegendreTables;
use crate::linalg::{Lu, Matrix};
use crate::quadrature::GaussRule;
use crate::systems::{apply_j_into, max_abs, HamiltonianProblem};
use crate::{Error, Result};

/// Largest `|alpha_j|` accepted before recovery reports an overflow.
pub const ALPHA_OVERFLOW_BOUND: f64 = 1e12;

/// Sweeps without a new smallest increment before a stalled iteration stops.
pub const STALL_SWEEPS: usize = 5;

/// A stall only ends the iteration early when the best increment is within
/// this factor of the tolerance.
pub const STALL_CEILING: f64 = 1e3;

/// Unknowns of one step, as left by the last fixed-point sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StageState {
    /// `gamma_j = eta_j gamma~_j`, `s` vectors of length `2m`.
    pub gamma: Vec<Vec<f64>>,
    /// Unscaled coefficients `gamma~_j`.
    pub gamma_tilde: Vec<Vec<f64>>,
    /// `nu` rescaled multipliers, `eta_{s-nu+i} = 1 - beta_i`.
    pub beta: Vec<f64>,
    pub eta: Vec<f64>,
    /// Stage values `u_l = u(c_l h)`.
    pub stages: Vec<Vec<f64>>,
    /// `phi_j`, each a `2m x nu` matrix stored column by column.
    pub phi: Vec<Vec<f64>>,
}

impl StageState {
    fn new(k: usize, s: usize, n: usize, nu: usize) -> Self {
        Self {
            gamma: vec![vec![0.0; n]; s],
            gamma_tilde: vec![vec![0.0; n]; s],
            beta: vec![0.0; nu],
            eta: vec![1.0; s],
            stages: vec![vec![0.0; n]; k],
            phi: vec![vec![0.0; n * nu]; s],
        }
    }

    fn copy_from(&mut self, other: &StageState) {
        self.gamma.clone_from(&other.gamma);
        self.gamma_tilde.clone_from(&other.gamma_tilde);
        self.beta.clone_from(&other.beta);
        self.eta.clone_from(&other.eta);
        self.stages.clone_from(&other.stages);
        self.phi.clone_from(&other.phi);
    }

    /// `phi_j^T gamma~_j`, a `nu`-vector.
    pub fn projected_coefficient(&self, j: usize) -> Vec<f64> {
        let n = self.gamma_tilde[j].len();
        let nu = self.beta.len();
        (0..nu)
            .map(|c| {
                self.phi[j][c * n..(c + 1) * n]
                    .iter()
                    .zip(&self.gamma_tilde[j])
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub y1: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// The step was taken as plain HBVM, either because the conservation
    /// system was near-singular in the final sweep or because the rescaled
    /// iteration diverged.
    pub gamma_fallback: bool,
    /// The iteration stopped because the increment no longer decreased while
    /// already within `STALL_CEILING` times the tolerance.
    pub roundoff_limited: bool,
    /// `alpha_j = beta_j / h^(2(s-1-j))`; diagnostic only.
    pub alpha: Vec<f64>,
    pub alpha_overflow: bool,
    /// Final fixed-point increment (max norm over all coefficients).
    pub residual: f64,
    pub state: StageState,
}

impl StepResult {
    /// Converged, or stopped at the roundoff floor.
    pub fn accepted(&self) -> bool {
        self.converged || self.roundoff_limited
    }
}

/// `alpha_j = beta_j / h^(2(s-1-j))` for `j = s-nu, ..., s-1`.
pub fn recover_alpha(beta: &[f64], h: f64, s: usize) -> Result<Vec<f64>> {
    let nu = beta.len();
    if nu > s {
        return Err(Error::InvalidArgument(format!(
            "{nu} multipliers for s = {s}"
        )));
    }
    if !(h != 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid step size {h}")));
    }
    let alpha: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let j = s - nu + i;
            b / libm::pow(h, (2 * (s - 1 - j)) as f64)
        })
        .collect();
    if let Some((index, &value)) = alpha
        .iter()
        .enumerate()
        .find(|(_, a)| !(a.abs() <= ALPHA_OVERFLOW_BOUND))
    {
        return Err(Error::AlphaOverflow { index, value });
    }
    Ok(alpha)
}

/// A configured method: the quadrature rule and Legendre tables are built once
/// and shared by every step.
#[derive(Debug, Clone)]
pub struct Integrator {
    config: MethodConfig,
    rule: GaussRule,
    tables: LegendreTables,
    /// `P_j(c_l)` for all `j < k`, used for the conservation right-hand side.
    tail_values: Matrix,
}

impl Integrator {
    pub fn new(config: MethodConfig) -> Result<Self> {
        config.validate()?;
        let rule = GaussRule::new(config.k)?;
        let tables = LegendreTables::build(config.s, &rule)?;
        let tail_values = LegendreTables::build(config.k, &rule)?.values;
        Ok(Self {
            config,
            rule,
            tables,
            tail_values,
        })
    }

    pub fn config(&self) -> &MethodConfig {
        &self.config
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn tables(&self) -> &LegendreTables {
        &self.tables
    }

    /// Runge-Kutta tableau for the given scalings.
    pub fn tableau(&self, eta: &[f64]) -> Result<(Matrix, Vec<f64>)> {
        build_tableau(&self.config, eta, &self.rule, &self.tables)
    }

    /// One step of size `h` (negative `h` steps backwards in time).
    ///
    /// In ehbvm mode a step whose iteration diverges (as opposed to stalling
    /// at roundoff level) is redone as a plain HBVM step and reported with
    /// `gamma_fallback` set.
    pub fn step(&self, problem: &dyn HamiltonianProblem, y0: &[f64], h: f64) -> Result<StepResult> {
        let first = self.sweep(problem, y0, h, true)?;
        if first.accepted() || first.state.beta.is_empty() {
            return Ok(first);
        }
        let mut retry = self.sweep(problem, y0, h, false)?;
        if !retry.accepted() {
            return Ok(first);
        }
        retry.iterations += first.iterations;
        retry.gamma_fallback = true;
        Ok(retry)
    }

    fn sweep(
        &self,
        problem: &dyn HamiltonianProblem,
        y0: &[f64],
        h: f64,
        conserve: bool,
    ) -> Result<StepResult> {
        let cfg = &self.config;
        let nu_problem = problem.invariant_count();
        cfg.validate_for(nu_problem)?;
        let n = problem.dim();
        if y0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: y0.len(),
            });
        }
        if !(h != 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid step size {h}")));
        }

        let (k, s) = (cfg.k, cfg.s);
        let nu = cfg.rescaled_count(nu_problem);
        let weights = self.rule.weights();
        let values = &self.tables.values;
        let integrals = &self.tables.integrals;
        let tol = cfg.fp_tolerance * (1.0 + max_abs(y0));

        let mut st = StageState::new(k, s, n, nu);
        let mut grad = vec![0.0; n];
        let mut jac = vec![0.0; n * nu];
        let mut rhs_stage = vec![vec![0.0; n]; k];
        let tail = if nu > 0 { k - s } else { 0 };
        let mut tail_phi = vec![vec![0.0; n * nu]; tail];
        let mut tail_gamma = vec![vec![0.0; n]; tail];
        let tail_values = &self.tail_values;

        problem.energy_gradient(y0, &mut grad)?;
        apply_j_into(&grad, &mut st.gamma[0])?;
        st.gamma_tilde[0].copy_from_slice(&st.gamma[0]);

        let mut converged = false;
        let mut fallback = false;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;

        let mut best = st.clone();
        let mut best_residual = f64::INFINITY;
        let mut best_fallback = false;
        let mut sweeps_without_progress = 0;
        let mut roundoff_limited = false;

        while iterations < cfg.max_iterations {
            iterations += 1;

            for l in 0..k {
                let u = &mut st.stages[l];
                u.copy_from_slice(y0);
                for j in 0..s {
                    let w = h * integrals[(l, j)];
                    for (ui, gi) in u.iter_mut().zip(&st.gamma[j]) {
                        *ui += w * gi;
                    }
                }
                problem.energy_gradient(u, &mut grad)?;
                apply_j_into(&grad, &mut rhs_stage[l])?;
            }

            for j in 0..s {
                let gt = &mut st.gamma_tilde[j];
                gt.iter_mut().for_each(|v| *v = 0.0);
                for l in 0..k {
                    let w = weights[l] * values[(l, j)];
                    for (g, f) in gt.iter_mut().zip(&rhs_stage[l]) {
                        *g += w * f;
                    }
                }
            }

            fallback = !conserve;
            if nu > 0 && conserve {
                st.phi
                    .iter_mut()
                    .for_each(|p| p.iter_mut().for_each(|v| *v = 0.0));
                tail_phi
                    .iter_mut()
                    .for_each(|p| p.iter_mut().for_each(|v| *v = 0.0));
                tail_gamma
                    .iter_mut()
                    .for_each(|g| g.iter_mut().for_each(|v| *v = 0.0));
                for l in 0..k {
                    problem.invariant_jacobian(&st.stages[l], &mut jac)?;
                    for j in 0..s {
                        let w = weights[l] * tail_values[(l, j)];
                        for (p, d) in st.phi[j].iter_mut().zip(&jac) {
                            *p += w * d;
                        }
                    }
                    for j in s..k {
                        let w = weights[l] * tail_values[(l, j)];
                        for (p, d) in tail_phi[j - s].iter_mut().zip(&jac) {
                            *p += w * d;
                        }
                        for (g, f) in tail_gamma[j - s].iter_mut().zip(&rhs_stage[l]) {
                            *g += w * f;
                        }
                    }
                }

                let mut system = Matrix::zeros(nu, nu);
                for j in s - nu..s {
                    for (row, v) in st.projected_coefficient(j).iter().enumerate() {
                        system[(row, j - (s - nu))] = *v;
                    }
                }
                // sum_{j<s} phi_j^T gamma~_j = -sum_{s<=j<k} phi_j^T gamma~_j because
                // the full k-term sum is sum_l b_l grad L(u_l)^T J grad H(u_l) = 0.
                // The tail has no O(1) terms to cancel.
                let mut rhs = vec![0.0; nu];
                for (phi, gt) in tail_phi.iter().zip(&tail_gamma) {
                    for (c, r) in rhs.iter_mut().enumerate() {
                        *r -= phi[c * n..(c + 1) * n]
                            .iter()
                            .zip(gt)
                            .map(|(a, b)| a * b)
                            .sum::<f64>();
                    }
                }

                let lu = Lu::new(&system)?;
                let beta = if lu.rcond() < cfg.singular_gamma_threshold {
                    None
                } else {
                    lu.solve(&rhs)
                        .ok()
                        .filter(|b| b.iter().all(|v| v.is_finite()))
                };
                match beta {
                    Some(beta) => {
                        for (i, b) in beta.iter().enumerate() {
                            st.eta[s - nu + i] = 1.0 - b;
                        }
                        st.beta = beta;
                    }
                    None => {
                        fallback = true;
                        st.beta.iter_mut().for_each(|b| *b = 0.0);
                        st.eta.iter_mut().for_each(|e| *e = 1.0);
                    }
                }
            }

            let mut increment: f64 = 0.0;
            for j in 0..s {
                let eta = st.eta[j];
                for (g, gt) in st.gamma[j].iter_mut().zip(&st.gamma_tilde[j]) {
                    let new = eta * gt;
                    increment = increment.max((new - *g).abs());
                    *g = new;
                }
            }
            residual = increment;
            if !increment.is_finite() {
                break;
            }
            if increment <= tol {
                converged = true;
                break;
            }
            if increment < best_residual {
                best_residual = increment;
                best.copy_from(&st);
                best_fallback = fallback;
                sweeps_without_progress = 0;
            } else {
                sweeps_without_progress += 1;
                if sweeps_without_progress >= STALL_SWEEPS && best_residual <= STALL_CEILING * tol {
                    roundoff_limited = true;
                    break;
                }
            }
        }
        if !converged && best_residual < residual {
            core::mem::swap(&mut st, &mut best);
            residual = best_residual;
            fallback = best_fallback;
        }

        let y1: Vec<f64> = y0
            .iter()
            .zip(&st.gamma[0])
            .map(|(y, g)| y + h * g)
            .collect();
        let (alpha, alpha_overflow) = if nu == 0 {
            (Vec::new(), false)
        } else {
            match recover_alpha(&st.beta, h, s) {
                Ok(a) => (a, false),
                Err(_) => {
                    let raw = st
                        .beta
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| b / libm::pow(h, (2 * (nu - 1 - i)) as f64))
                        .collect();
                    (raw, true)
                }
            }
        };

        Ok(StepResult {
            y1,
            iterations,
            converged,
            gamma_fallback: fallback,
            roundoff_limited,
            alpha,
            alpha_overflow,
            residual,
            state: st,
        })
    }

    /// Fixed-step integration over `n_steps` steps of size `h > 0`.
    ///
    /// Steps that fail to converge are counted and the integration goes on;
    /// evaluation errors abort it.
    pub fn integrate(
        &self,
        problem: &dyn HamiltonianProblem,
        y0: &[f64],
        h: f64,
        n_steps: usize,
    ) -> Result<Trajectory> {
        if n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive, got {h}"
            )));
        }
        self.config.validate_for(problem.invariant_count())?;
        let n = problem.dim();
        if y0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: y0.len(),
            });
        }
        let nu = problem.invariant_count();

        let mut meta = TrajectoryMeta::new(&self.config, h);
        meta.warnings = self.conservation_warnings(problem);
        let mut traj = Trajectory::with_capacity(n_steps + 1, meta);

        let mut inv = vec![0.0; nu];
        problem.invariants(y0, &mut inv)?;
        traj.push(0.0, y0.to_vec(), problem.energy(y0)?, inv.clone());

        let mut y = y0.to_vec();
        for i in 1..=n_steps {
            let r = self.step(problem, &y, h)?;
            traj.meta.record_step(&r);
            traj.converged.push(r.accepted());
            y = r.y1;
            problem.invariants(&y, &mut inv)?;
            traj.push(i as f64 * h, y.clone(), problem.energy(&y)?, inv.clone());
        }
        Ok(traj)
    }

    /// Warnings about the exact-conservation degree condition `deg <= floor(2k/s)`.
    pub fn conservation_warnings(&self, problem: &dyn HamiltonianProblem) -> Vec<String> {
        let cfg = &self.config;
        let mut out = Vec::new();
        if cfg.kind == MethodKind::Gauss {
            return out;
        }
        let mu = cfg.exact_degree();
        match problem.polynomial_degrees() {
            None => out.push(format!(
                "polynomial degrees of '{}' not declared; conservation holds only to O(h^{})",
                problem.name(),
                2 * cfg.k + 1
            )),
            Some(d) => {
                if d.energy as usize > mu {
                    out.push(format!(
                        "energy degree {} exceeds floor(2k/s) = {mu}; energy conserved only to O(h^{})",
                        d.energy,
                        2 * cfg.k + 1
                    ));
                }
                if cfg.rescaled_count(problem.invariant_count()) > 0 && d.invariants as usize > mu {
                    out.push(format!(
                        "invariant degree {} exceeds floor(2k/s) = {mu}; invariants conserved only to O(h^{})",
                        d.invariants,
                        2 * cfg.k + 1
                    ));
                }
            }
        }
        out
    }
}

//! Drift and error measurement, high-accuracy reference solutions and
//! empirical convergence orders.
//!
//! The solution error `e_sol` is the maximum over the output grid of the
//! Euclidean norm of the state error. Drifts are measured against the initial
//! value: `e_H = max_n |H(y_n) - H(y_0)|`, and componentwise for the invariants.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::integrator::{Integrator, MethodConfig, MethodKind, StepResult};
use crate::systems::HamiltonianProblem;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub method: String,
    pub kind: MethodKind,
    pub k: usize,
    pub s: usize,
    pub h: f64,
    pub total_iterations: usize,
    pub max_step_iterations: usize,
    pub nonconverged_steps: usize,
    /// Steps that stopped because the increment stalled just above the
    /// tolerance at roundoff level.
    pub roundoff_limited_steps: usize,
    pub fallback_count: usize,
    pub alpha_overflow_count: usize,
    pub warnings: Vec<String>,
}

impl TrajectoryMeta {
    pub fn new(config: &MethodConfig, h: f64) -> Self {
        Self {
            method: config.label(),
            kind: config.kind,
            k: config.k,
            s: config.s,
            h,
            total_iterations: 0,
            max_step_iterations: 0,
            nonconverged_steps: 0,
            roundoff_limited_steps: 0,
            fallback_count: 0,
            alpha_overflow_count: 0,
            warnings: Vec::new(),
        }
    }

    pub(crate) fn record_step(&mut self, r: &StepResult) {
        self.total_iterations += r.iterations;
        self.max_step_iterations = self.max_step_iterations.max(r.iterations);
        self.nonconverged_steps += usize::from(!r.accepted());
        self.roundoff_limited_steps += usize::from(r.roundoff_limited);
        self.fallback_count += usize::from(r.gamma_fallback);
        self.alpha_overflow_count += usize::from(r.alpha_overflow);
    }
}

/// States and conserved-quantity series on a uniform grid `t_i = i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub energy_series: Vec<f64>,
    /// One `nu`-vector per grid point.
    pub invariant_series: Vec<Vec<f64>>,
    /// Per-step convergence flags (one shorter than the other series).
    pub converged: Vec<bool>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn with_capacity(points: usize, meta: TrajectoryMeta) -> Self {
        Self {
            times: Vec::with_capacity(points),
            states: Vec::with_capacity(points),
            energy_series: Vec::with_capacity(points),
            invariant_series: Vec::with_capacity(points),
            converged: Vec::with_capacity(points.saturating_sub(1)),
            meta,
        }
    }

    pub fn push(&mut self, t: f64, state: Vec<f64>, energy: f64, invariants: Vec<f64>) {
        self.times.push(t);
        self.states.push(state);
        self.energy_series.push(energy);
        self.invariant_series.push(invariants);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn invariant_count(&self) -> usize {
        self.invariant_series.first().map_or(0, Vec::len)
    }
}

/// What `e_sol` is measured against.
pub enum Reference<'a> {
    /// Another trajectory on the same grid.
    Trajectory(&'a Trajectory),
    /// Reference states, one per grid point.
    States(&'a [Vec<f64>]),
    /// A function of time.
    Function(&'a dyn Fn(f64) -> Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub e_h: f64,
    pub e_l: Vec<f64>,
    pub e_sol: Option<f64>,
    /// State error at the last grid point only.
    pub e_sol_final: Option<f64>,
    pub order_estimate: Option<f64>,
}

impl RunSummary {
    /// Largest invariant drift over all components (0 when there are none).
    pub fn e_l_max(&self) -> f64 {
        self.e_l.iter().fold(0.0, |a: f64, b| a.max(*b))
    }
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

pub fn summarize(traj: &Trajectory, reference: Option<Reference<'_>>) -> Result<RunSummary> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let h0 = traj.energy_series[0];
    let e_h = traj
        .energy_series
        .iter()
        .fold(0.0f64, |a, h| a.max((h - h0).abs()));
    let nu = traj.invariant_count();
    let l0 = &traj.invariant_series[0];
    let mut e_l = vec![0.0f64; nu];
    for l in &traj.invariant_series {
        for c in 0..nu {
            e_l[c] = e_l[c].max((l[c] - l0[c]).abs());
        }
    }

    let errors: Option<Vec<f64>> = match reference {
        None => None,
        Some(Reference::Trajectory(r)) => {
            let tol = 1e-12 * traj.t_end().abs().max(1.0);
            if r.len() != traj.len()
                || r.times
                    .iter()
                    .zip(&traj.times)
                    .any(|(a, b)| (a - b).abs() > tol)
            {
                return Err(Error::GridMismatch(format!(
                    "reference has {} points, trajectory {}",
                    r.len(),
                    traj.len()
                )));
            }
            Some(pointwise_errors(&traj.states, &r.states))
        }
        Some(Reference::States(states)) => {
            if states.len() != traj.len() {
                return Err(Error::GridMismatch(format!(
                    "reference has {} states, trajectory {}",
                    states.len(),
                    traj.len()
                )));
            }
            Some(pointwise_errors(&traj.states, states))
        }
        Some(Reference::Function(f)) => Some(
            traj.times
                .iter()
                .zip(&traj.states)
                .map(|(&t, y)| euclidean_distance(y, &f(t)))
                .collect(),
        ),
    };
    let e_sol = errors
        .as_ref()
        .map(|e| e.iter().copied().fold(0.0, f64::max));
    let e_sol_final = errors.as_ref().and_then(|e| e.last().copied());

    Ok(RunSummary {
        e_h,
        e_l,
        e_sol,
        e_sol_final,
        order_estimate: None,
    })
}

fn pointwise_errors(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| euclidean_distance(x, y))
        .collect()
}

/// High-accuracy integrator used when a problem has no closed-form flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOracle {
    pub config: MethodConfig,
    /// Largest substep.
    pub h_ref: f64,
    /// Required agreement at `t_end` between `h_ref` and `h_ref / 2`.
    pub consistency_tol: f64,
}

impl Default for ReferenceOracle {
    fn default() -> Self {
        Self {
            config: MethodConfig::hbvm(12, 6),
            h_ref: 1e-3,
            consistency_tol: 1e-10,
        }
    }
}

impl ReferenceOracle {
    /// States at every grid time, with a self-consistency check at `t_end`.
    ///
    /// Consecutive grid times are joined by equal substeps no longer than
    /// `h_ref`, so the grid need not be commensurate with `h_ref`.
    pub fn solve(
        &self,
        problem: &dyn HamiltonianProblem,
        y0: &[f64],
        t_end: f64,
        grid: &[f64],
    ) -> Result<Vec<Vec<f64>>> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be positive, got {t_end}"
            )));
        }
        if grid.is_empty() {
            return Ok(Vec::new());
        }
        let slack = 1e-12 * t_end;
        if grid.windows(2).any(|w| w[1] < w[0])
            || grid[0] < -slack
            || grid[grid.len() - 1] > t_end + slack
        {
            return Err(Error::GridMismatch(
                "grid must be sorted within [0, t_end]".into(),
            ));
        }

        let integ = Integrator::new(self.config)?;
        let mut targets = grid.to_vec();
        targets.push(t_end);

        let coarse = march(&integ, problem, y0, &targets, self.h_ref)?;
        let mut fine = march(&integ, problem, y0, &targets, 0.5 * self.h_ref)?;

        let a = coarse.last().expect("non-empty");
        let b = fine.last().expect("non-empty");
        let difference = a
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if !(difference <= self.consistency_tol) {
            return Err(Error::ReferenceInconsistent { difference });
        }
        fine.pop();
        Ok(fine)
    }
}

fn march(
    integ: &Integrator,
    problem: &dyn HamiltonianProblem,
    y0: &[f64],
    targets: &[f64],
    h_max: f64,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(targets.len());
    let mut t = 0.0;
    let mut y = y0.to_vec();
    for &target in targets {
        let span = target - t;
        if span > 0.0 {
            let n = libm::ceil(span / h_max - 1e-9).max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                let r = integ.step(problem, &y, h)?;
                if !r.accepted() {
                    return Err(Error::Evaluation(format!(
                        "reference step did not converge (residual {:e})",
                        r.residual
                    )));
                }
                y = r.y1;
            }
            t = target;
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Reference states at `grid`: the problem's closed-form flow when it has
/// one, otherwise [`ReferenceOracle::default`].
pub fn reference_solution(
    problem: &dyn HamiltonianProblem,
    y0: &[f64],
    t_end: f64,
    grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(exact) = grid
        .iter()
        .map(|&t| problem.reference_solution(t, y0))
        .collect::<Option<Vec<_>>>()
    {
        return Ok(exact);
    }
    ReferenceOracle::default().solve(problem, y0, t_end, grid)
}

/// Least-squares slope of `ln(err)` against `ln(h)`.
pub fn log_log_slope(hs: &[f64], errors: &[f64]) -> Result<f64> {
    if hs.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: hs.len(),
            actual: errors.len(),
        });
    }
    if hs.len() < 2 {
        return Err(Error::InvalidArgument(
            "at least two points are needed for a slope".into(),
        ));
    }
    if hs
        .iter()
        .chain(errors)
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "step sizes and errors must be positive".into(),
        ));
    }
    let xs: Vec<f64> = hs.iter().map(|&h| libm::log(h)).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| libm::log(e)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("step sizes must differ".into()));
    }
    Ok(sxy / sxx)
}

fn steps_for(t_end: f64, h: f64) -> Result<usize> {
    let n = libm::round(t_end / h);
    if !(n >= 1.0) || (n * h - t_end).abs() > 1e-9 * t_end {
        return Err(Error::InvalidArgument(format!(
            "step {h} does not divide t_end = {t_end}"
        )));
    }
    Ok(n as usize)
}

/// `e_sol` for each step size in `h_list` (strictly decreasing, each dividing
/// `t_end`). One reference solution is computed on the union of all grids.
pub fn convergence_errors(
    problem: &dyn HamiltonianProblem,
    config: &MethodConfig,
    y0: &[f64],
    t_end: f64,
    h_list: &[f64],
) -> Result<Vec<f64>> {
    if h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(
            "step sizes must be strictly decreasing".into(),
        ));
    }
    let steps: Vec<usize> = h_list
        .iter()
        .map(|&h| steps_for(t_end, h))
        .collect::<Result<_>>()?;

    let tol = 1e-9 * t_end;
    let mut grid: Vec<f64> = h_list
        .iter()
        .zip(&steps)
        .flat_map(|(&h, &n)| (0..=n).map(move |i| i as f64 * h))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let reference = reference_solution(problem, y0, t_end, &grid)?;

    let integ = Integrator::new(*config)?;
    let mut errors = Vec::with_capacity(h_list.len());
    for (&h, &n) in h_list.iter().zip(&steps) {
        let traj = integ.integrate(problem, y0, h, n)?;
        let mut cursor = 0;
        let mut worst: f64 = 0.0;
        for (t, y) in traj.times.iter().zip(&traj.states) {
            while cursor + 1 < grid.len() && grid[cursor] < t - tol {
                cursor += 1;
            }
            worst = worst.max(euclidean_distance(y, &reference[cursor]));
        }
        errors.push(worst);
    }
    Ok(errors)
}

/// Empirical order: slope of `ln(e_sol)` against `ln(h)` over at least three
/// step sizes.
pub fn estimate_order(
    problem: &dyn HamiltonianProblem,
    config: &MethodConfig,
    y0: &[f64],
    t_end: f64,
    h_list: &[f64],
) -> Result<f64> {
    if h_list.len() < 3 {
        return Err(Error::InvalidArgument(
            "at least three step sizes are required".into(),
        ));
    }
    let errors = convergence_errors(problem, config, y0, t_end, h_list)?;
    log_log_slope(h_list, &errors)
}

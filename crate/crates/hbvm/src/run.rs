use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use hbvm_core::diagnostics::{reference_solution, summarize, Reference, RunSummary, Trajectory};
use hbvm_core::{Error as CoreError, Integrator, MethodConfig};

use crate::error::{CliError, CliResult};
use crate::output::{format_real, write_summary, write_trajectory, SummaryRecord};
use crate::registry::ProblemRegistry;

/// How far `t_end / h` may sit from the nearest integer, in units of that
/// integer's spacing.
const GRID_ULPS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunDescriptor {
    pub problem: String,
    pub config: MethodConfig,
    pub h: f64,
    pub t_end: f64,
    /// Where to write CSV: the trajectory with `emit_trajectory`, otherwise
    /// a one-row summary.
    pub output_path: Option<PathBuf>,
    pub emit_trajectory: bool,
    pub strict: bool,
}

impl RunDescriptor {
    /// Number of steps, if `h` lands on `t_end`.
    pub fn step_count(&self) -> CliResult<usize> {
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(CliError::Config(format!(
                "h and t_end must be positive (h = {}, t_end = {})",
                self.h, self.t_end
            )));
        }
        let ratio = self.t_end / self.h;
        let n = ratio.round();
        let spacing = f64::EPSILON * n.max(1.0);
        if n < 1.0 || (ratio - n).abs() > GRID_ULPS * spacing {
            return Err(CliError::Config(format!(
                "t_end = {} is not a whole number of steps of h = {}",
                self.t_end, self.h
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
    /// Why `e_sol` is missing, when it is.
    pub reference_note: Option<String>,
}

impl RunOutcome {
    pub fn record(&self) -> SummaryRecord {
        let m = &self.trajectory.meta;
        SummaryRecord {
            method: m.kind.as_str().to_string(),
            k: m.k,
            s: m.s,
            h: m.h,
            summary: self.summary.clone(),
            fallbacks: m.fallback_count,
            published: None,
            ratio_flags: String::new(),
        }
    }

    pub fn summary_line(&self) -> String {
        let m = &self.trajectory.meta;
        let e_sol = self
            .summary
            .e_sol
            .map_or_else(|| "n/a".to_string(), format_real);
        format!(
            "method={} k={} s={} h={} e_H={} e_L={} e_sol={} fallbacks={}",
            m.kind,
            m.k,
            m.s,
            format_real(m.h),
            format_real(self.summary.e_h),
            format_real(self.summary.e_l_max()),
            e_sol,
            m.fallback_count
        )
    }
}

/// Integrates, measures drift and (when a reference can be produced) the
/// solution error, and writes the requested CSV.
pub fn cmd_run(desc: &RunDescriptor, registry: &ProblemRegistry) -> CliResult<RunOutcome> {
    if desc.emit_trajectory && desc.output_path.is_none() {
        return Err(CliError::Config("--trajectory needs --csv PATH".into()));
    }
    let problem = registry.get(&desc.problem)?;
    desc.config.validate_for(problem.invariant_count())?;
    let n = desc.step_count()?;
    let y0 = problem.default_initial_state();

    let trajectory = Integrator::new(desc.config)?.integrate(problem, &y0, desc.h, n)?;
    if desc.strict && trajectory.meta.nonconverged_steps > 0 {
        return Err(CliError::NonConvergence {
            steps: trajectory.meta.nonconverged_steps,
        });
    }

    let (summary, reference_note) =
        match reference_solution(problem, &y0, desc.t_end, &trajectory.times) {
            Ok(states) => (
                summarize(&trajectory, Some(Reference::States(&states)))?,
                None,
            ),
            Err(e @ (CoreError::ReferenceInconsistent { .. } | CoreError::Evaluation(_))) => (
                summarize(&trajectory, None)?,
                Some(format!("no reference solution: {e}")),
            ),
            Err(e) => return Err(e.into()),
        };
    let outcome = RunOutcome {
        trajectory,
        summary,
        reference_note,
    };

    if let Some(path) = &desc.output_path {
        let mut out = BufWriter::new(File::create(path)?);
        if desc.emit_trajectory {
            write_trajectory(&mut out, &outcome.trajectory)?;
        } else {
            write_summary(&mut out, &[outcome.record()])?;
        }
        out.flush()?;
    }
    Ok(outcome)
}

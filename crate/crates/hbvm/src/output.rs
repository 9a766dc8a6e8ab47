//! CSV formats: a header row, comma separated, LF line endings, and every
//! real number in scientific notation with 17 significant digits.

use std::io::{Read, Write};

use hbvm_core::diagnostics::{RunSummary, Trajectory};

use crate::error::CliResult;
use crate::table1::PublishedCell;

/// `{:.16e}`: one leading digit plus 16 decimals, enough to round-trip any
/// finite `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn trajectory_header(half_dim: usize, invariant_count: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=2 * half_dim).map(|i| format!("y_{i}")));
    header.push("H".to_string());
    header.extend((1..=invariant_count).map(|i| format!("L_{i}")));
    header
}

/// Columns `t, y_1..y_2m, H, L_1..L_nu`, one row per grid point.
pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> CliResult<()> {
    let dim = traj.states.first().map_or(0, Vec::len);
    let mut w = writer(out);
    w.write_record(trajectory_header(dim / 2, traj.invariant_count()))?;
    for i in 0..traj.len() {
        let mut row = Vec::with_capacity(dim + 2 + traj.invariant_count());
        row.push(format_real(traj.times[i]));
        row.extend(traj.states[i].iter().map(|&v| format_real(v)));
        row.push(format_real(traj.energy_series[i]));
        row.extend(traj.invariant_series[i].iter().map(|&v| format_real(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 12] = [
    "method",
    "k",
    "s",
    "h",
    "e_H",
    "e_L_max",
    "e_sol",
    "fallbacks",
    "paper_e_H",
    "paper_e_L",
    "paper_e_sol",
    "ratio_flags",
];

/// One summary row. Without a published comparison the last four fields stay
/// empty; a missing `e_sol` is written as an empty field too.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub method: String,
    pub k: usize,
    pub s: usize,
    pub h: f64,
    pub summary: RunSummary,
    pub fallbacks: usize,
    pub published: Option<PublishedCell>,
    pub ratio_flags: String,
}

fn optional(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

pub fn write_summary<W: Write>(out: W, records: &[SummaryRecord]) -> CliResult<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in records {
        w.write_record([
            r.method.clone(),
            r.k.to_string(),
            r.s.to_string(),
            format_real(r.h),
            format_real(r.summary.e_h),
            format_real(r.summary.e_l_max()),
            optional(r.summary.e_sol),
            r.fallbacks.to_string(),
            optional(r.published.map(|p| p.e_h)),
            optional(r.published.map(|p| p.e_l)),
            optional(r.published.map(|p| p.e_sol)),
            r.ratio_flags.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Header and raw string fields of any CSV written by this module.
pub fn read_table<R: Read>(input: R) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

//! Output writers: CSV for machine consumption, JSON with embedded config
//! for provenance, and human-readable tables.
//!
//! Floats are printed with Rust's shortest round-trip formatting, which is
//! deterministic, so identical configs produce byte-identical output.

use std::io::{self, Write};

use mca_core::integrator::Trajectory;
use mca_core::linear_approx::PiecewiseLinearSolution;
use mca_core::reference::ErrorReport;
use serde_json::json;

use crate::config::RunConfig;

pub fn write_trajectory_csv(w: &mut impl Write, names: &[String], traj: &Trajectory) -> io::Result<()> {
    write!(w, "t")?;
    for name in names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        write!(w, "{t}")?;
        for x in state {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_trajectory_table(w: &mut impl Write, names: &[String], traj: &Trajectory) -> io::Result<()> {
    write!(w, "{:>16}", "t")?;
    for name in names {
        write!(w, "  {name:>20}")?;
    }
    writeln!(w)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        write!(w, "{:>16}", format!("{t:.6}"))?;
        for x in state {
            write!(w, "  {:>20}", format!("{x:.12}"))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn trajectory_json(config: &RunConfig, names: &[String], traj: &Trajectory) -> serde_json::Value {
    json!({
        "config": config,
        "names": names,
        "times": traj.times,
        "states": traj.states,
    })
}

/// Clip formatting noise: values are snapped to a 10⁻⁹ grid before being
/// rendered as closed-form coefficients.
fn snap(x: f64) -> f64 {
    if !x.is_finite() || x.abs() >= 1e15 {
        return x;
    }
    let snapped = (x * 1e9).round() / 1e9;
    if snapped == 0.0 {
        0.0
    } else {
        snapped
    }
}

/// Canonical linear expression in t, slope first: `0`, `3`, `t`, `-t+3`,
/// `2t-1`, `0.25t+1.5`.
pub fn linear_expression(slope: f64, intercept: f64) -> String {
    let s = snap(slope);
    let c = snap(intercept);
    if s == 0.0 {
        return format!("{c}");
    }
    let mut out = match s {
        1.0 => "t".to_string(),
        -1.0 => "-t".to_string(),
        _ => format!("{s}t"),
    };
    if c > 0.0 {
        out.push_str(&format!("+{c}"));
    } else if c < 0.0 {
        out.push_str(&format!("{c}"));
    }
    out
}

pub fn write_segments_csv(
    w: &mut impl Write,
    names: &[String],
    sol: &PiecewiseLinearSolution,
) -> io::Result<()> {
    write!(w, "t_start,t_end")?;
    for name in names {
        write!(w, ",intercept_{name}")?;
    }
    for name in names {
        write!(w, ",slope_{name}")?;
    }
    writeln!(w)?;
    for seg in &sol.segments {
        write!(w, "{},{}", seg.t_start, seg.t_end)?;
        for c in &seg.intercept {
            write!(w, ",{c}")?;
        }
        for s in &seg.slope {
            write!(w, ",{s}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_segments_table(
    w: &mut impl Write,
    names: &[String],
    sol: &PiecewiseLinearSolution,
) -> io::Result<()> {
    write!(w, "{:<24}", "interval")?;
    for name in names {
        write!(w, "  {name:>16}")?;
    }
    writeln!(w)?;
    for seg in &sol.segments {
        let interval = format!("[{}, {}]", snap(seg.t_start), snap(seg.t_end));
        write!(w, "{interval:<24}")?;
        for i in 0..names.len() {
            write!(w, "  {:>16}", linear_expression(seg.slope[i], seg.intercept[i]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn segments_json(
    config: &RunConfig,
    names: &[String],
    sol: &PiecewiseLinearSolution,
) -> serde_json::Value {
    json!({
        "config": config,
        "names": names,
        "segments": sol
            .segments
            .iter()
            .map(|s| {
                json!({
                    "t_start": s.t_start,
                    "t_end": s.t_end,
                    "intercept": s.intercept,
                    "slope": s.slope,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn write_report_csv(w: &mut impl Write, report: &ErrorReport) -> io::Result<()> {
    writeln!(w, "max_abs,l2,argmax_step")?;
    writeln!(w, "{},{},{}", report.max_abs, report.l2, report.argmax_step)
}

pub fn write_report_table(w: &mut impl Write, report: &ErrorReport) -> io::Result<()> {
    writeln!(w, "max_abs     = {:e}", report.max_abs)?;
    writeln!(w, "l2          = {:e}", report.l2)?;
    writeln!(w, "argmax_step = {}", report.argmax_step)
}

pub fn report_json(config: &RunConfig, report: &ErrorReport) -> serde_json::Value {
    json!({
        "config": config,
        "report": {
            "max_abs": report.max_abs,
            "l2": report.l2,
            "argmax_step": report.argmax_step,
        }
    })
}

/// Uniformity summary of an extracted coefficient sequence.
pub struct RandomnessSummary {
    pub samples: usize,
    pub coeff_index: usize,
    pub bins: usize,
    pub chi_square: f64,
    pub chi_square_p_value: f64,
    pub ks_distance: f64,
    pub degenerate: bool,
}

pub fn write_summary_table(w: &mut impl Write, s: &RandomnessSummary) -> io::Result<()> {
    writeln!(w, "samples            = {}", s.samples)?;
    writeln!(w, "coeff_index        = {}", s.coeff_index)?;
    writeln!(w, "chi_square         = {:.4} ({} bins)", s.chi_square, s.bins)?;
    writeln!(w, "chi_square_p_value = {:.6}", s.chi_square_p_value)?;
    writeln!(w, "ks_distance        = {:.6}", s.ks_distance)?;
    if s.degenerate {
        writeln!(w, "note: the sequence is degenerate (all samples identical)")?;
    }
    Ok(())
}

pub fn write_samples_csv(w: &mut impl Write, samples: &[f64]) -> io::Result<()> {
    writeln!(w, "sample")?;
    for x in samples {
        writeln!(w, "{x}")?;
    }
    Ok(())
}

pub fn randomness_json(
    config: &RunConfig,
    s: &RandomnessSummary,
    samples: &[f64],
) -> serde_json::Value {
    json!({
        "config": config,
        "summary": {
            "samples": s.samples,
            "coeff_index": s.coeff_index,
            "bins": s.bins,
            "chi_square": s.chi_square,
            "chi_square_p_value": s.chi_square_p_value,
            "ks_distance": s.ks_distance,
            "degenerate": s.degenerate,
        },
        "samples": samples,
    })
}

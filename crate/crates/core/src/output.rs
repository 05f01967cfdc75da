//! CSV time series and text reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::TimeSeriesRecord;
use crate::error::{Error, Result};
use crate::experiments::ExperimentReport;

pub const TIMESERIES_HEADER: &str = "t,norm_g_sq,sync_L,sync_dist_sq,h1_u,weighted_norm";

/// Writes one CSV row per record with 17 significant digits.
pub fn write_timeseries_to(out: &mut impl Write, series: &[TimeSeriesRecord]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    writeln!(out, "{TIMESERIES_HEADER}")?;
    for r in series {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.norm_g_sq, r.sync_l, r.sync_dist_sq, r.h1_u, r.weighted_norm
        )?;
    }
    Ok(())
}

pub fn write_timeseries(path: &Path, series: &[TimeSeriesRecord]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    write_timeseries_to(&mut file, series)?;
    file.flush()?;
    Ok(())
}

/// Parses a file written by [`write_timeseries`].
pub fn read_timeseries(text: &str) -> Result<Vec<TimeSeriesRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TIMESERIES_HEADER => {}
        _ => return Err(Error::Io("missing time-series header".into())),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(format!("row {}: {e}", i + 1)))?;
            let [t, norm_g_sq, sync_l, sync_dist_sq, h1_u, weighted_norm] = vals[..] else {
                return Err(Error::Io(format!("row {}: expected 6 columns", i + 1)));
            };
            Ok(TimeSeriesRecord {
                t,
                norm_g_sq,
                sync_l,
                sync_dist_sq,
                h1_u,
                weighted_norm,
            })
        })
        .collect()
}

/// Human-readable summary followed by a `key=value` block.
pub fn format_report(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("experiment: {}\n", report.name));
    out.push_str(&format!(
        "overall: {}\n\n",
        if report.all_passed() { "PASS" } else { "FAIL" }
    ));
    if !report.scalars.is_empty() {
        out.push_str("results:\n");
        for (name, value) in &report.scalars {
            out.push_str(&format!("  {name:<34} {value:.10e}\n"));
        }
        out.push('\n');
    }
    if !report.bounds.is_empty() || !report.checks.is_empty() {
        out.push_str("checks:\n");
        for b in &report.bounds {
            out.push_str(&format!(
                "  [{}] {:<28} fraction {:.6}, worst margin {:.6e} at t = {}, {} samples\n",
                pass_fail(b.passed()),
                b.name,
                b.fraction,
                b.worst_margin,
                b.worst_time,
                b.samples
            ));
        }
        for (name, ok) in &report.checks {
            out.push_str(&format!("  [{}] {name}\n", pass_fail(*ok)));
        }
        out.push('\n');
    }
    if !report.notes.is_empty() {
        out.push_str("notes:\n");
        for n in &report.notes {
            out.push_str(&format!("  - {n}\n"));
        }
        out.push('\n');
    }
    out.push_str("# key=value\n");
    for b in &report.bounds {
        out.push_str(&format!(
            "{}={}\n",
            b.name,
            pass_fail(b.passed()).to_lowercase()
        ));
        out.push_str(&format!("{}_fraction={:?}\n", b.name, b.fraction));
        out.push_str(&format!("{}_worst_margin={:?}\n", b.name, b.worst_margin));
        out.push_str(&format!("{}_worst_time={:?}\n", b.name, b.worst_time));
    }
    for (name, ok) in &report.checks {
        out.push_str(&format!("{name}={}\n", pass_fail(*ok).to_lowercase()));
    }
    for (name, value) in &report.scalars {
        out.push_str(&format!("{name}={value:?}\n"));
    }
    out.push_str("\n# config\n");
    out.push_str(&report.config_echo);
    out
}

/// Extracts the `key=value` block of a formatted report.
pub fn parse_report_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .skip_while(|l| l.trim() != "# key=value")
        .skip(1)
        .take_while(|l| !l.starts_with("# config"))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

pub fn write_report(path: &Path, report: &ExperimentReport) -> Result<()> {
    fs::write(path, format_report(report))?;
    Ok(())
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

//! CSV rendering of sweep tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{rel_dev, SweepRow};
use crate::error::Result;

pub const CSV_HEADER: [&str; 13] = [
    "swept",
    "system",
    "discipline",
    "decision",
    "analytic_aud",
    "sim_aud",
    "sim_aud_stderr",
    "analytic_pmis",
    "sim_pmis",
    "sim_pmis_stderr",
    "rel_dev_aud",
    "rel_dev_pmis",
    "pass",
];

// `{}` on f64 is the shortest string that parses back to the same value
fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn record(row: &SweepRow) -> [String; 13] {
    let sim = row.sim.as_ref();
    let aud = row.analytic_aud.map(|a| a.value);
    let pmis = row.analytic_pmis.map(|a| a.value);
    let dev = |a: Option<f64>, s: Option<f64>| match (a, s) {
        (Some(a), Some(s)) => Some(rel_dev(a, s)),
        _ => None,
    };
    [
        row.swept.to_string(),
        row.system.clone(),
        row.discipline.name().to_string(),
        row.decision.name().to_string(),
        num(aud),
        num(sim.map(|s| s.avg_aud)),
        num(sim.map(|s| s.aud_stderr)),
        num(pmis),
        num(sim.map(|s| s.missing_prob)),
        num(sim.map(|s| s.pmis_stderr)),
        num(dev(aud, sim.map(|s| s.avg_aud))),
        num(dev(pmis, sim.map(|s| s.missing_prob))),
        row.pass.map_or_else(String::new, |p| p.to_string()),
    ]
}

/// Header plus one record per row.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_csv(rows, file)
}

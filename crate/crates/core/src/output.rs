//! CSV results and whitespace-separated plot data.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{Cell, Outcome};

pub const METRICS_HEADER: [&str; 7] = ["seed", "t", "r", "e", "V", "h", "is_comm_round"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_metrics(path: &Path, cell: &Cell) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRICS_HEADER)?;
    for run in &cell.runs {
        for rec in &run.metrics.records {
            w.write_record([
                run.seed.to_string(),
                rec.t.to_string(),
                opt(rec.r),
                rec.e.to_string(),
                rec.v.to_string(),
                rec.h.to_string(),
                u8::from(rec.is_comm).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_convergence(path: &Path, cells: &[&Cell]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["strategy", "t", "mean_r", "stderr_r", "mean_e", "stderr_e", "mean_V", "stderr_V", "mean_h", "stderr_h"])?;
    for cell in cells {
        for rec in &cell.aggregate.records {
            w.write_record([
                cell.label.clone(),
                rec.t.to_string(),
                opt(rec.r.map(|s| s.mean)),
                opt(rec.r.map(|s| s.se)),
                rec.e.mean.to_string(),
                rec.e.se.to_string(),
                rec.v.mean.to_string(),
                rec.v.se.to_string(),
                rec.h.mean.to_string(),
                rec.h.se.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes every results file for `outcome` into `dir` and returns the
/// paths written. Single-cell experiments write `metrics.csv`; experiments
/// with several cells write one `metrics-<cell>.csv` per cell.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let cells = outcome.cells();
    if let [only] = cells.as_slice() {
        let p = dir.join("metrics.csv");
        write_metrics(&p, only)?;
        written.push(p);
    } else {
        for cell in &cells {
            let p = dir.join(format!("metrics-{}.csv", cell.label));
            write_metrics(&p, cell)?;
            written.push(p);
        }
    }

    match outcome {
        Outcome::Bounds(o) => {
            let p = dir.join("bounds.csv");
            let mut w = csv::Writer::from_path(&p)?;
            let theorem = o.report.theorem.number().to_string();
            w.write_record(["theorem", "quantity", "value"])?;
            for term in &o.report.terms {
                w.write_record([theorem.as_str(), term.name, &term.value.to_string()])?;
            }
            let r = &o.report;
            for (name, value) in [
                ("total", r.total.to_string()),
                ("measured", r.measured.to_string()),
                ("margin", r.margin.to_string()),
                ("precondition_pass", r.precondition_pass.to_string()),
                ("vacuous", r.vacuous.to_string()),
                ("holds", r.holds.to_string()),
            ] {
                w.write_record([theorem.as_str(), name, &value])?;
            }
            w.flush()?;
            written.push(p);
            let p = dir.join("convergence.csv");
            write_convergence(&p, &cells)?;
            written.push(p);
        }
        Outcome::Rounds(o) => {
            let p = dir.join("tradeoff.csv");
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["strategy", "reached", "R_used", "T_used"])?;
            for row in &o.rows {
                w.write_record([
                    row.strategy.clone(),
                    row.reached.to_string(),
                    row.rounds_used.map(|v| v.to_string()).unwrap_or_default(),
                    row.t_used.map(|v| v.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            written.push(p);
        }
        Outcome::Speedup(o) => {
            let p = dir.join("speedup.csv");
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record([
                "n", "R", "strategy", "metric", "mean_error", "stderr", "speedup", "speedup_stderr", "sqrt_n", "clamped",
            ])?;
            for row in &o.rows {
                w.write_record([
                    row.n.to_string(),
                    row.rounds.to_string(),
                    row.strategy.clone(),
                    o.metric.tag().to_string(),
                    row.mean_error.to_string(),
                    row.stderr.to_string(),
                    row.speedup.to_string(),
                    row.speedup_stderr.to_string(),
                    row.sqrt_n.to_string(),
                    row.clamped.to_string(),
                ])?;
            }
            w.flush()?;
            written.push(p);
        }
        Outcome::Compare(o) => {
            let p = dir.join("compare.csv");
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["strategy", "R", "metric", "mean_error", "stderr"])?;
            for row in &o.rows {
                w.write_record([
                    row.strategy.clone(),
                    row.rounds.to_string(),
                    o.metric.tag().to_string(),
                    row.mean_error.to_string(),
                    row.stderr.to_string(),
                ])?;
            }
            w.flush()?;
            written.push(p);
            let p = dir.join("convergence.csv");
            write_convergence(&p, &cells)?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Input CSV → output `.dat` pairs handled by [`write_plot_data`].
pub const PLOT_INPUTS: [(&str, &str); 3] =
    [("speedup.csv", "speedup.dat"), ("tradeoff.csv", "tradeoff.dat"), ("convergence.csv", "convergence.dat")];

fn read_rows(path: &Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((header, rows))
}

fn column(header: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{} has no column {name}", path.display())))
}

fn dat_field(s: &str) -> &str {
    if s.is_empty() {
        "nan"
    } else {
        s
    }
}

/// Converts whichever results CSVs are present in `dir` into plot data.
/// Fails when none of them is present.
pub fn write_plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let present: Vec<_> = PLOT_INPUTS.iter().filter(|(csv_name, _)| dir.join(csv_name).is_file()).collect();
    if present.is_empty() {
        let names: Vec<_> = PLOT_INPUTS.iter().map(|(c, _)| *c).collect();
        return Err(Error::Config(format!("{} contains none of: {}", dir.display(), names.join(", "))));
    }
    let mut written = Vec::new();
    for (csv_name, dat_name) in present {
        let src = dir.join(csv_name);
        let (header, rows) = read_rows(&src)?;
        let mut out = String::new();
        match *csv_name {
            "speedup.csv" => {
                let cols = ["n", "speedup", "speedup_stderr", "sqrt_n", "strategy"].map(|c| column(&header, c, &src));
                let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
                out.push_str("# n speedup stderr sqrt_n_reference strategy\n");
                for row in &rows {
                    let fields: Vec<&str> = cols.iter().map(|&c| dat_field(&row[c])).collect();
                    out.push_str(&fields.join(" "));
                    out.push('\n');
                }
            }
            "tradeoff.csv" => {
                let cols = ["strategy", "R_used", "T_used"].map(|c| column(&header, c, &src));
                let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
                out.push_str("# strategy R_used T_used\n");
                for row in &rows {
                    let fields: Vec<&str> = cols.iter().map(|&c| dat_field(&row[c])).collect();
                    out.push_str(&fields.join(" "));
                    out.push('\n');
                }
            }
            _ => {
                let cols = ["t", "mean_r", "stderr_r", "strategy"].map(|c| column(&header, c, &src));
                let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
                out.push_str("# t mean_r stderr strategy\n");
                for row in &rows {
                    let fields: Vec<&str> = cols.iter().map(|&c| dat_field(&row[c])).collect();
                    out.push_str(&fields.join(" "));
                    out.push('\n');
                }
            }
        }
        let dst = dir.join(dat_name);
        fs::File::create(&dst)?.write_all(out.as_bytes())?;
        written.push(dst);
    }
    Ok(written)
}

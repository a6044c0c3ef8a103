//! File writers: atomic replacement and fixed-precision text.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use slrsm_core::Eigenpair;

use crate::report::RunReport;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` with 12 significant digits, positional for moderate exponents and
/// scientific otherwise (like C's `%.12g`, but keeping trailing zeros).
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        format!("{:.*}", (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

/// Writes through a sibling temp file and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub fn eigenvalues_csv(report: &RunReport) -> String {
    let mut out = String::from("index,mu,eigenvalue,abs_err,rel_err,error_estimate\n");
    for (k, root) in report.roots.iter().enumerate() {
        let index = k + 1;
        let row = report.table.iter().find(|r| r.index == index);
        let _ = writeln!(
            out,
            "{index},{},{},{},{},{}",
            sig(root.mu),
            sig(root.eigenvalue),
            opt(row.map(|r| r.abs_err)),
            opt(row.map(|r| r.rel_err)),
            opt(root.error_estimate)
        );
    }
    out
}

pub fn eigenfunction_csv(pair: &Eigenpair) -> String {
    let mut out = String::from("x,y,yprime,side\n");
    for (side, values) in [("L", &pair.left), ("R", &pair.right)] {
        for v in values {
            let _ = writeln!(out, "{},{},{},{side}", sig(v.x), sig(v.y), sig(v.dy));
        }
    }
    out
}

pub fn gram_csv(gram: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in gram {
        let cells: Vec<String> = row.iter().map(|&v| sig(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Comparison table: reference zero, computed zero, absolute and relative
/// error.
pub fn comparison_table(report: &RunReport) -> String {
    let mut out = format!(
        "{:<6} {:<20} {:<20} {:<20} {:<20}\n",
        "Index", "Exact", "RSM", "Absolute Error", "Relative Error"
    );
    for row in &report.table {
        let _ = writeln!(
            out,
            "{:<6} {:<20} {:<20} {:<20} {:<20}",
            row.index,
            sig(row.oracle_mu),
            sig(row.rsm_mu),
            sig(row.abs_err),
            sig(row.rel_err)
        );
    }
    out
}

/// Writes report.json, eigenvalues.csv, gram.csv and one
/// eigenfunction_k.csv per eigenpair into `dir`.
pub fn write_run(dir: &Path, report: &RunReport, pairs: &[Eigenpair]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    write_atomic(
        &dir.join("eigenvalues.csv"),
        eigenvalues_csv(report).as_bytes(),
    )?;
    write_atomic(&dir.join("gram.csv"), gram_csv(&report.gram).as_bytes())?;
    for pair in pairs {
        write_atomic(
            &dir.join(format!("eigenfunction_{}.csv", pair.index)),
            eigenfunction_csv(pair).as_bytes(),
        )?;
    }
    Ok(())
}

use std::fmt::Write as _;
use std::io::Write;

use super::{loglog_regression, Regression, StudyResult};
use crate::error::Result;

pub const CSV_HEADER: &str = "param,value,e_l2,e_h1,lambda_l2,lambda_h1,slope_running";

const FIT_SAMPLES: usize = 20;

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Writes one row per sweep point in sweep order.
///
/// `slope_running` is the log-log slope of `e_l2` over the surviving points
/// up to and including this row; empty while fewer than two are available.
pub fn write_csv(result: &StudyResult, mut w: impl Write) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rec in &result.records {
        if rec.failure.is_none() {
            if let (Some(x), Some(y)) = (result.abscissa(rec), rec.e_l2) {
                xs.push(x);
                ys.push(y);
            }
        }
        let running = if xs.len() >= 2 { loglog_regression(&xs, &ys).ok().map(|f| f.slope) } else { None };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            result.kind.param_name(),
            cell(Some(rec.value)),
            cell(rec.e_l2),
            cell(rec.e_h1),
            cell(rec.lambda_l2),
            cell(rec.lambda_h1),
            cell(running),
        )
        .unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

fn series(out: &mut String, name: &str, pts: &[(f64, f64)], fit: Option<&Regression>) {
    writeln!(out, "# {name}: log10(x) log10(error)").unwrap();
    for (x, y) in pts {
        writeln!(out, "{:.16e} {:.16e}", x.log10(), y.log10()).unwrap();
    }
    out.push_str("\n\n");
    if let Some(f) = fit {
        let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).log10();
        let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).log10();
        writeln!(out, "# {name} fit: slope {:.6} intercept {:.6} r2 {:.6}", f.slope, f.intercept, f.r_squared).unwrap();
        for s in 0..FIT_SAMPLES {
            let lx = lo + (hi - lo) * s as f64 / (FIT_SAMPLES - 1) as f64;
            let ly = (f.intercept + f.slope * lx * std::f64::consts::LN_10) / std::f64::consts::LN_10;
            writeln!(out, "{lx:.16e} {ly:.16e}").unwrap();
        }
        out.push_str("\n\n");
    }
}

/// Plain-text plot data: for each error, the measured points followed by
/// samples of the fitted line, datasets separated by two blank lines.
pub fn write_plot_data(result: &StudyResult, mut w: impl Write) -> Result<()> {
    let pts = result.points();
    let mut out = String::new();
    let l2: Vec<(f64, f64)> = pts.iter().filter_map(|p| p.1.map(|y| (p.0, y))).collect();
    series(&mut out, "e_l2", &l2, result.l2_fit.as_ref());
    let h1: Vec<(f64, f64)> = pts.iter().filter_map(|p| p.2.map(|y| (p.0, y))).collect();
    if !h1.is_empty() {
        series(&mut out, "e_h1", &h1, result.h1_fit.as_ref());
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

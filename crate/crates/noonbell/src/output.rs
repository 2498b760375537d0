//! CSV, JSON and plain-text payloads. Every writer is a pure function of its
//! input, so identical runs give byte-identical files.

use anyhow::Result;
use noonbell_core::marginals::DensityGrid;
use noonbell_core::optimizer::CertificationReport;
use noonbell_core::OptimizationResult;
use serde::Serialize;

/// Shortest round-trip decimal form, always with a fractional part or exponent.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Fixed 10-decimal form used for density grids.
pub fn grid_value(x: f64) -> String {
    let s = format!("{x:.10}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(writer.into_inner().map_err(|e| e.into_error())?)?)
}

/// One row per result: functional, N, best value, bound, margin, settings, seed.
pub fn sweep_csv(results: &[OptimizationResult]) -> Result<String> {
    let width = results.iter().map(|r| r.best_settings.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["functional", "N", "best_value", "bound", "margin"].map(String::from).to_vec();
    header.extend((0..width).map(|i| format!("setting_{i}")));
    header.push("seed".into());
    w.write_record(&header)?;
    for r in results {
        let mut row = vec![
            r.functional_name.clone(),
            r.n.to_string(),
            float(r.best_value),
            float(r.bound),
            float(r.violation_margin),
        ];
        row.extend(r.best_settings.iter().map(|a| a.to_string()));
        row.extend((r.best_settings.len()..width).map(|_| String::new()));
        row.push(r.seed.to_string());
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn result_text(r: &OptimizationResult) -> String {
    let settings: Vec<String> = r.best_settings.iter().map(|a| a.to_string()).collect();
    let mut s = format!(
        "functional {}\nN {}\nbest_value {}\nbound {}\nviolation_margin {}\nviolates {}\nsettings {}\nstarts_converged {}/{}\nseed {}\n",
        r.functional_name,
        r.n,
        float(r.best_value),
        float(r.bound),
        float(r.violation_margin),
        r.violates(),
        settings.join(","),
        r.starts_converged,
        r.num_starts,
        r.seed,
    );
    if r.boundary_hit {
        let limit = r.asymptotic_limit.map_or_else(|| "n/a".into(), float);
        s.push_str(&format!("boundary_hit true\nasymptotic_limit {limit}\n"));
    }
    s
}

pub fn certification_text(c: &CertificationReport) -> String {
    format!(
        "certification {} N={} grid={} radius={} optimizer={} grid_best={} gap={} slack={} {}\n",
        c.functional,
        c.n,
        c.grid_points,
        float(c.radius),
        float(c.optimizer_value),
        float(c.grid_best_value),
        float(c.gap),
        float(c.slack),
        if c.passed { "PASS" } else { "FAIL" },
    )
}

/// Long-form grid: metadata columns, then indices, coordinates and density,
/// rows in row-major order (`y` slowest).
pub fn grid_csv(grid: &DensityGrid, range: f64) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "N", "range", "count", "normalization", "iy", "iv", "y", "v", "value"])?;
    let meta = [
        grid.kind.label().to_string(),
        grid.n.to_string(),
        float(range),
        grid.y_axis.count.to_string(),
        float(grid.normalization),
    ];
    for iy in 0..grid.y_axis.count {
        for iv in 0..grid.v_axis.count {
            let mut row = meta.to_vec();
            row.extend([
                iy.to_string(),
                iv.to_string(),
                grid_value(grid.y_axis.point(iy)),
                grid_value(grid.v_axis.point(iv)),
                grid_value(grid.get(iy, iv)),
            ]);
            w.write_record(&row)?;
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_forms() {
        assert_eq!(float(-1.0), "-1.0");
        assert_eq!(float(0.5), "0.5");
        assert_eq!(float(1e-12), "1e-12");
    }

    #[test]
    fn grid_value_drops_negative_zero() {
        assert_eq!(grid_value(-1e-13), "0.0000000000");
        assert_eq!(grid_value(-2e-10), "-0.0000000002");
        assert_eq!(grid_value(0.25), "0.2500000000");
    }
}

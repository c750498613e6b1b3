use std::fmt::Write;

use super::study::{ConvergenceReport, ConvergenceRow};

/// C `printf("%.12e")` formatting: mantissa with 12 decimals, signed
/// exponent of at least two digits.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// One header line, then one line per level.
pub fn report_to_csv(report: &ConvergenceReport) -> String {
    let mut out = ConvergenceRow::COLUMNS.join(",");
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.level,
            format_sci(r.h),
            r.n_dofs_primal,
            r.n_dofs_dual,
            format_sci(r.err_l2_b),
            format_sci(r.err_l2_omega),
            format_sci(r.err_h1semi_b),
            format_sci(r.triple_norm),
            format_sci(r.residual_hminus1),
            format_sci(r.l2_omega_of_uh),
        );
    }
    out
}

pub fn report_to_json(report: &ConvergenceReport) -> String {
    serde_json::to_string_pretty(report).expect("report is serialisable")
}

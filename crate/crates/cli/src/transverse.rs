use serde::Serialize;
use softwg::transverse::{default_discretization, solve_double_well, solve_ground_state};

use crate::config::{RunConfig, TRANSVERSE_STEP};
use crate::{fmt_float, fmt_opt, CliError, Context, Report};

#[derive(Debug, Clone, Serialize)]
pub struct DoubleWellRow {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "E1R")]
    pub e1r: f64,
    /// Test-function bound on `E1R`.
    pub upper_bound: f64,
    /// `E1 - E1R`.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransverseReport {
    pub resolved_config: RunConfig,
    #[serde(rename = "E1")]
    pub e1: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub norm_check: f64,
    pub double_wells: Vec<DoubleWellRow>,
    /// Least-squares slope of `ln(E1 - E1R)` against `R`.
    pub gap_slope: Option<f64>,
    /// `-2√(-E1)`.
    pub expected_slope: f64,
}

pub(crate) fn solver_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Solver(e.to_string())
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn cmd_transverse(cfg: &RunConfig, ctx: &Context) -> Result<TransverseReport, CliError> {
    let profile = cfg.transverse_profile()?;
    let disc = default_discretization(&profile, TRANSVERSE_STEP).map_err(solver_err)?;
    let gs = solve_ground_state(&profile, &disc).map_err(solver_err)?;
    ctx.note(&format!("E1 = {}", gs.e1));
    let mut double_wells = Vec::with_capacity(cfg.r_list.len());
    for &r in &cfg.r_list {
        let dw = solve_double_well(&profile, r, TRANSVERSE_STEP).map_err(solver_err)?;
        ctx.note(&format!("R = {r}: E1R = {}", dw.e1r));
        double_wells.push(DoubleWellRow {
            r,
            e1r: dw.e1r,
            upper_bound: dw.upper_bound,
            gap: gs.e1 - dw.e1r,
        });
    }
    let logs: Vec<(f64, f64)> = double_wells
        .iter()
        .filter(|d| d.gap > 0.0)
        .map(|d| (d.r, d.gap.ln()))
        .collect();
    let gap_slope = if logs.len() == double_wells.len() {
        fit_slope(&logs)
    } else {
        None
    };
    Ok(TransverseReport {
        resolved_config: cfg.resolved(gs.e1)?,
        e1: gs.e1,
        n_plus: gs.n_plus,
        n_minus: gs.n_minus,
        norm_check: gs.norm_check,
        double_wells,
        gap_slope,
        expected_slope: -2.0 * (-gs.e1).sqrt(),
    })
}

impl Report for TransverseReport {
    fn csv_header(&self) -> Vec<String> {
        ["R", "E1", "n_plus", "n_minus", "E1R", "upper_bound", "gap", "gap_slope"]
            .map(String::from)
            .to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let common = |r: String, e1r: String, ub: String, gap: String| {
            vec![
                r,
                fmt_float(self.e1),
                fmt_float(self.n_plus),
                fmt_float(self.n_minus),
                e1r,
                ub,
                gap,
                fmt_opt(self.gap_slope),
            ]
        };
        if self.double_wells.is_empty() {
            return vec![common(String::new(), String::new(), String::new(), String::new())];
        }
        self.double_wells
            .iter()
            .map(|d| {
                common(
                    fmt_float(d.r),
                    fmt_float(d.e1r),
                    fmt_float(d.upper_bound),
                    fmt_float(d.gap),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0].iter().map(|&x| (x, 3.0 - 2.0 * x)).collect();
        assert!((fit_slope(&pts).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}

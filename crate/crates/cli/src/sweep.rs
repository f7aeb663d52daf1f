use rayon::prelude::*;
use serde::Serialize;
use softwg::variational::{bound_state_certificate, variational_limit};
use softwg::transverse::{default_discretization, solve_ground_state};

use crate::config::{RunConfig, TRANSVERSE_STEP};
use crate::spectrum::spectral_report;
use crate::transverse::solver_err;
use crate::{fmt_float, fmt_opt, CliError, Context, Report};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    pub threshold: Option<f64>,
    /// Extrapolated eigenvalues, ascending; empty when the row failed.
    pub lambdas: Vec<f64>,
    pub binding_count: Option<usize>,
    pub variational_limit: Option<f64>,
    pub certificate_n0: Option<u64>,
    /// Empty when the row succeeded.
    pub errors: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub resolved_config: RunConfig,
    pub rows: Vec<SweepRow>,
}

fn sweep_row(cfg: &RunConfig, theta: f64, e1: f64) -> SweepRow {
    let mut errors = Vec::new();
    let mut row = SweepRow {
        theta,
        e1,
        threshold: None,
        lambdas: Vec::new(),
        binding_count: None,
        variational_limit: None,
        certificate_n0: None,
        errors: String::new(),
    };
    let variational = || -> Result<(f64, Option<u64>), CliError> {
        let g = cfg.waveguide_at(theta)?;
        let profile = cfg.transverse_profile()?;
        let disc = default_discretization(&profile, TRANSVERSE_STEP).map_err(solver_err)?;
        let gs = solve_ground_state(&profile, &disc).map_err(solver_err)?;
        let limit = variational_limit(&g, &gs).map_err(solver_err)?;
        let n0 = bound_state_certificate(&g, &profile, &gs).ok().map(|c| c.0);
        Ok((limit, n0))
    };
    match variational() {
        Ok((limit, n0)) => {
            row.variational_limit = Some(limit);
            row.certificate_n0 = n0;
        }
        Err(e) => errors.push(e.to_string()),
    }
    match spectral_report(cfg, theta) {
        Ok((r, converged)) => {
            if !converged {
                let worst = r.disagreement.iter().copied().fold(0.0, f64::max);
                errors.push(format!(
                    "not converged: disagreement {worst:e} > tol {:e}",
                    cfg.solver.tol
                ));
            }
            row.threshold = Some(r.threshold);
            row.lambdas = r.eigenvalues;
            row.binding_count = Some(r.binding_count);
        }
        Err(e) => errors.push(e.to_string()),
    }
    row.errors = errors.join("; ");
    row
}

/// One spectral report per angle on a common grid, rows in input order.
pub fn cmd_sweep(cfg: &RunConfig, ctx: &Context) -> Result<SweepReport, CliError> {
    if cfg.theta_list.is_empty() {
        return Err(CliError::Config("theta_list is empty".into()));
    }
    let profile = cfg.transverse_profile()?;
    let disc = default_discretization(&profile, TRANSVERSE_STEP).map_err(solver_err)?;
    let e1 = solve_ground_state(&profile, &disc).map_err(solver_err)?.e1;
    let resolved = cfg.resolved(e1)?;
    let rows: Vec<SweepRow> = resolved
        .theta_list
        .par_iter()
        .map(|&theta| {
            let row = sweep_row(&resolved, theta, e1);
            ctx.note(&format!(
                "theta = {theta}: binding_count = {:?} {}",
                row.binding_count, row.errors
            ));
            row
        })
        .collect();
    Ok(SweepReport {
        resolved_config: resolved,
        rows,
    })
}

impl Report for SweepReport {
    fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["theta", "E1", "threshold"].map(String::from).to_vec();
        h.extend((1..=self.resolved_config.solver.k).map(|i| format!("lambda_{i}")));
        h.extend(
            ["binding_count", "variational_limit", "certificate_n0", "errors"].map(String::from),
        );
        h
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let k = self.resolved_config.solver.k;
        self.rows
            .iter()
            .map(|r| {
                let mut out = vec![fmt_float(r.theta), fmt_float(r.e1), fmt_opt(r.threshold)];
                out.extend((0..k).map(|i| fmt_opt(r.lambdas.get(i).copied())));
                out.push(r.binding_count.map(|c| c.to_string()).unwrap_or_default());
                out.push(fmt_opt(r.variational_limit));
                out.push(r.certificate_n0.map(|n| n.to_string()).unwrap_or_default());
                out.push(r.errors.clone());
                out
            })
            .collect()
    }
}

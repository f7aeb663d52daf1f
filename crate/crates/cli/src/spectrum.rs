use std::io::Write;

use serde::Serialize;
use softwg::hamiltonian2d::{
    assemble, discrete_spectrum, sample_potential, HamiltonianError, LevelResult, SolverOptions,
    SpectralReport,
};
use softwg::transverse::{default_discretization, solve_ground_state};

use crate::config::{RunConfig, TRANSVERSE_STEP};
use crate::transverse::solver_err;
use crate::{fmt_float, CliError, Context, Report, EXIT_NOT_CONVERGED};

#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    pub h: f64,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub shift: f64,
}

impl From<&LevelResult> for LevelRow {
    fn from(l: &LevelResult) -> Self {
        Self {
            h: l.h,
            dim: l.dim,
            eigenvalues: l.eigenvalues.clone(),
            residuals: l.residuals.clone(),
            iterations: l.iterations,
            inner_iterations: l.inner_iterations,
            shift: l.shift,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub resolved_config: RunConfig,
    pub threshold: f64,
    /// Extrapolated from the two finest levels, ascending.
    pub eigenvalues: Vec<f64>,
    pub disagreement: Vec<f64>,
    pub margins: Vec<f64>,
    pub binding_count: usize,
    pub order: u32,
    pub tol: f64,
    pub converged: bool,
    pub levels: Vec<LevelRow>,
}

impl SpectrumReport {
    fn new(cfg: RunConfig, r: &SpectralReport, converged: bool) -> Self {
        Self {
            tol: cfg.solver.tol,
            resolved_config: cfg,
            threshold: r.threshold,
            eigenvalues: r.eigenvalues.clone(),
            disagreement: r.disagreement.clone(),
            margins: r.margins.clone(),
            binding_count: r.binding_count,
            order: r.order,
            converged,
            levels: r.levels.iter().map(LevelRow::from).collect(),
        }
    }
}

pub(crate) fn solver_options(cfg: &RunConfig) -> SolverOptions {
    let mut opts = SolverOptions::new(cfg.solver.k);
    opts.seed = cfg.solver.seed;
    opts
}

/// Spectral report, converged or not, at angle `theta` on the resolved grid.
pub(crate) fn spectral_report(
    cfg: &RunConfig,
    theta: f64,
) -> Result<(SpectralReport, bool), CliError> {
    let g = cfg.waveguide_at(theta)?;
    let profile = cfg.transverse_profile()?;
    let grid = cfg.grid2d()?;
    match discrete_spectrum(
        &g,
        &profile,
        &grid,
        cfg.grid.refinement_levels,
        cfg.solver.tol,
        &solver_options(cfg),
    ) {
        Ok(r) => Ok((r, true)),
        Err(HamiltonianError::NotConverged { report, .. }) => Ok((*report, false)),
        Err(HamiltonianError::InvalidGrid(msg)) => Err(CliError::Config(msg)),
        Err(e) => Err(solver_err(e)),
    }
}

pub(crate) fn transverse_e1(cfg: &RunConfig) -> Result<f64, CliError> {
    let profile = cfg.transverse_profile()?;
    let disc = default_discretization(&profile, TRANSVERSE_STEP).map_err(solver_err)?;
    Ok(solve_ground_state(&profile, &disc).map_err(solver_err)?.e1)
}

pub fn cmd_spectrum(cfg: &RunConfig, ctx: &Context) -> Result<SpectrumReport, CliError> {
    let resolved = cfg.resolved(transverse_e1(cfg)?)?;
    let (report, converged) = spectral_report(&resolved, resolved.geometry.theta)?;
    for l in &report.levels {
        ctx.note(&format!(
            "h = {}: {} unknowns, {} outer / {} inner iterations, lambda = {:?}",
            l.h, l.dim, l.iterations, l.inner_iterations, l.eigenvalues
        ));
    }
    if !converged {
        ctx.note("refinement levels disagree beyond solver.tol");
    }
    Ok(SpectrumReport::new(resolved, &report, converged))
}

/// Writes the coarsest-level matrix in coordinate format.
pub fn dump_matrix<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let resolved = cfg.resolved(transverse_e1(cfg)?)?;
    let g = resolved.waveguide()?;
    let profile = resolved.transverse_profile()?;
    let grid = resolved.grid2d()?;
    let field = sample_potential(&g, &profile, &grid).map_err(solver_err)?;
    assemble(&grid, &field).write_coordinate(out)?;
    Ok(())
}

impl Report for SpectrumReport {
    fn csv_header(&self) -> Vec<String> {
        [
            "index",
            "lambda",
            "lambda_coarse",
            "lambda_fine",
            "disagreement",
            "margin",
            "binding",
            "threshold",
        ]
        .map(String::from)
        .to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let n = self.levels.len();
        let (coarse, fine) = (&self.levels[n - 2], &self.levels[n - 1]);
        let mut coarse_sorted = coarse.eigenvalues.clone();
        let mut fine_sorted = fine.eigenvalues.clone();
        coarse_sorted.sort_by(f64::total_cmp);
        fine_sorted.sort_by(f64::total_cmp);
        (0..self.eigenvalues.len())
            .map(|i| {
                let lambda = self.eigenvalues[i];
                let bound = lambda < self.threshold - 3.0 * self.disagreement[i];
                vec![
                    (i + 1).to_string(),
                    fmt_float(lambda),
                    fmt_float(coarse_sorted[i]),
                    fmt_float(fine_sorted[i]),
                    fmt_float(self.disagreement[i]),
                    fmt_float(self.margins[i]),
                    bound.to_string(),
                    fmt_float(self.threshold),
                ]
            })
            .collect()
    }

    fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

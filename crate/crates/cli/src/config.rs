//! Run configuration: one JSON document shared by every experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use softwg::geometry::WaveguideGeometry;
use softwg::hamiltonian2d::Grid2D;
use softwg::transverse::TransverseProfile;

use crate::CliError;

/// Step of the one-dimensional transverse grids.
pub const TRANSVERSE_STEP: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Well separations for the double-well part of `transverse`.
    #[serde(default = "default_r_list")]
    pub r_list: Vec<f64>,
    /// Mollifier scales for `variational`.
    #[serde(default = "default_n_list")]
    pub n_list: Vec<u64>,
    /// Opening angles for `sweep`.
    #[serde(default)]
    pub theta_list: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "R")]
    pub radius: f64,
    pub theta: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Delta {
        alpha: f64,
    },
    /// Depth `V0` on `(-a, a)` with `a` from the geometry.
    SquareWell {
        #[serde(rename = "V0")]
        v0: f64,
    },
    /// Two whitespace- or comma-separated columns `t W(t)`; `#` starts a comment.
    Tabulated {
        table: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    /// `[x_min, x_max, y_min, y_max]`; filled in by [`RunConfig::resolved`].
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    pub refinement_levels: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            h: 1.0 / 16.0,
            bbox: None,
            refinement_levels: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub k: usize,
    /// Largest accepted refinement disagreement.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 4,
            tol: 1e-3,
            seed: 0x5eed,
        }
    }
}

fn default_r_list() -> Vec<f64> {
    vec![3.0, 5.0, 7.0]
}

fn default_n_list() -> Vec<u64> {
    vec![100, 200, 400, 800, 1600]
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn waveguide(&self) -> Result<WaveguideGeometry, CliError> {
        self.waveguide_at(self.geometry.theta)
    }

    pub fn waveguide_at(&self, theta: f64) -> Result<WaveguideGeometry, CliError> {
        let g = &self.geometry;
        WaveguideGeometry::new(g.radius, theta, g.a).map_err(config_err)
    }

    pub fn transverse_profile(&self) -> Result<TransverseProfile, CliError> {
        match &self.profile {
            ProfileConfig::Delta { alpha } => TransverseProfile::delta(*alpha).map_err(config_err),
            ProfileConfig::SquareWell { v0 } => {
                TransverseProfile::square_well(*v0, self.geometry.a).map_err(config_err)
            }
            ProfileConfig::Tabulated { table } => {
                let (knots, values) = read_table(table)?;
                TransverseProfile::tabulated(knots, values, self.geometry.a).map_err(config_err)
            }
        }
    }

    /// Grid of the coarsest level; requires a box.
    pub fn grid2d(&self) -> Result<Grid2D, CliError> {
        let [x0, x1, y0, y1] = self
            .grid
            .bbox
            .ok_or_else(|| CliError::Config("grid.box is not set".into()))?;
        Grid2D::new(x0, x1, y0, y1, self.grid.h).map_err(config_err)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.waveguide()?;
        self.transverse_profile()?;
        let grid = &self.grid;
        if !(grid.h.is_finite() && grid.h > 0.0) {
            return Err(CliError::Config(format!("grid.h must be positive, got {}", grid.h)));
        }
        if grid.refinement_levels < 2 {
            return Err(CliError::Config("grid.refinement_levels must be at least 2".into()));
        }
        if grid.bbox.is_some() {
            self.grid2d()?;
        }
        let s = &self.solver;
        if s.k == 0 {
            return Err(CliError::Config("solver.k must be at least 1".into()));
        }
        if !(s.tol.is_finite() && s.tol > 0.0) {
            return Err(CliError::Config(format!("solver.tol must be positive, got {}", s.tol)));
        }
        for &r in &self.r_list {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::Config(format!("r_list entry {r} is not positive")));
            }
        }
        if self.n_list.contains(&0) {
            return Err(CliError::Config("n_list entries must be positive".into()));
        }
        for &t in &self.theta_list {
            if !(t > 0.0 && t < std::f64::consts::PI) {
                return Err(CliError::Config(format!("theta_list entry {t} is outside (0, pi)")));
            }
            self.waveguide_at(t)?;
        }
        Ok(())
    }

    /// Copy with the box filled in. Without an explicit box the arc of the
    /// widest opening in use is covered with padding `12/√(-E1)`, rounded
    /// outwards to whole units.
    pub fn resolved(&self, e1: f64) -> Result<Self, CliError> {
        let mut out = self.clone();
        if out.grid.bbox.is_none() {
            let theta = self
                .theta_list
                .iter()
                .copied()
                .fold(self.geometry.theta, f64::max);
            let g = self.waveguide_at(theta)?;
            let padding = 12.0 / (-e1).sqrt();
            let grid = Grid2D::around_arc(&g, padding, 1.0, self.grid.h).map_err(config_err)?;
            out.grid.bbox = Some([grid.x_min, grid.x_max, grid.y_min, grid.y_max]);
        }
        Ok(out)
    }
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                CliError::Config(format!("{}:{}: {e}", path.display(), lineno + 1))
            })
        };
        if cols.len() != 2 {
            return Err(CliError::Config(format!(
                "{}:{}: expected two columns",
                path.display(),
                lineno + 1
            )));
        }
        knots.push(parse(cols[0])?);
        values.push(parse(cols[1])?);
    }
    Ok((knots, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "geometry": {"R": 4, "theta": 1.5707963267948966, "a": 0.5},
        "profile": {"kind": "square_well", "V0": 2}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.grid, GridConfig::default());
        assert_eq!(cfg.solver.k, 4);
        assert_eq!(cfg.r_list, vec![3.0, 5.0, 7.0]);
        assert!(cfg.theta_list.is_empty());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        for text in [
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5, "b": 1}, "profile": {"kind": "delta", "alpha": -1}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1, "V0": 2}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "extra": 1}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "gauss", "alpha": -1}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn invariants_checked_at_parse() {
        for text in [
            r#"{"geometry": {"R": 4, "theta": 4, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": 1}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "square_well", "V0": -2}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "grid": {"h": 0.3, "box": [-1, 1, -1, 1], "refinement_levels": 2}}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "theta_list": [0.5, 3.5]}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "n_list": [0]}"#,
            r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "solver": {"k": 0, "tol": 1e-3, "seed": 1}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn resolved_round_trip() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        let resolved = cfg.resolved(-0.6158).unwrap();
        let [x0, x1, y0, y1] = resolved.grid.bbox.unwrap();
        assert!(x0 < -2.0 && x1 > 2.0 && y0 < -0.5 && y1 > 1.0);
        let back = RunConfig::from_json(&resolved.to_json()).unwrap();
        assert_eq!(back, resolved);
        assert_eq!(resolved.resolved(-1.0).unwrap(), resolved);
    }

    #[test]
    fn tabulated_profile_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        std::fs::write(&path, "# t W\n-0.5, 0\n-0.25 -1\n0 -2\n0.25 -1\n0.5 0\n").unwrap();
        let text = format!(
            r#"{{"geometry": {{"R": 4, "theta": 1, "a": 0.5}}, "profile": {{"kind": "tabulated", "table": {:?}}}}}"#,
            path
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        let p = cfg.transverse_profile().unwrap();
        assert_eq!(p.value(0.125), -1.5);
        std::fs::write(&path, "0 1 2\n").unwrap();
        assert!(RunConfig::from_json(&text).is_err());
    }
}

use serde::Serialize;
use softwg::transverse::{default_discretization, solve_ground_state};
use softwg::variational::{
    bound_state_certificate, form_breakdown, q_tilde_2_int_closed, q_tilde_full_quadrature,
    variational_limit, Mollifier, VariationalError,
};

use crate::config::{RunConfig, TRANSVERSE_STEP};
use crate::transverse::solver_err;
use crate::{fmt_float, fmt_opt, CliError, Context, Report};

/// One mollifier scale: the quadrature of the transformed form split into
/// its three parts, and the curvature parts after integration by parts
/// (exactly zero on a straight guide).
#[derive(Debug, Clone, Serialize)]
pub struct FormRow {
    pub n: u64,
    pub q1: f64,
    pub q2_int: f64,
    pub q2_ext: f64,
    pub total: f64,
    pub bracket_q2_int: f64,
    pub bracket_q2_ext: f64,
    pub bracket_total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    /// `None` when the exterior term diverges.
    pub value: Option<f64>,
    pub label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub n0: Option<u64>,
    pub value: Option<f64>,
    pub label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalReport {
    pub resolved_config: RunConfig,
    #[serde(rename = "E1")]
    pub e1: f64,
    /// `ξ1(R)² θ/2`.
    pub q2_int_closed: f64,
    pub forms: Vec<FormRow>,
    pub limit: LimitReport,
    pub certificate: CertificateReport,
}

fn from_variational(e: VariationalError) -> CliError {
    match e {
        VariationalError::MollifierTooNarrow { .. } | VariationalError::InvalidMollifier => {
            CliError::Config(e.to_string())
        }
        other => solver_err(other),
    }
}

pub fn cmd_variational(cfg: &RunConfig, ctx: &Context) -> Result<VariationalReport, CliError> {
    let g = cfg.waveguide()?;
    let profile = cfg.transverse_profile()?;
    let disc = default_discretization(&profile, TRANSVERSE_STEP).map_err(solver_err)?;
    let gs = solve_ground_state(&profile, &disc).map_err(solver_err)?;

    let mut forms = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let m = Mollifier::new(n).map_err(from_variational)?;
        let raw = q_tilde_full_quadrature(&g, &profile, &gs, &m).map_err(from_variational)?;
        let bracket = form_breakdown(&g, &gs, &m).map_err(from_variational)?;
        ctx.note(&format!("n = {n}: total = {}", raw.total));
        forms.push(FormRow {
            n,
            q1: raw.q1,
            q2_int: raw.q2_int,
            q2_ext: raw.q2_ext,
            total: raw.total,
            bracket_q2_int: bracket.q2_int,
            bracket_q2_ext: bracket.q2_ext,
            bracket_total: bracket.total,
        });
    }

    let limit = match variational_limit(&g, &gs) {
        Ok(v) => LimitReport {
            value: Some(v),
            label: fmt_float(v),
        },
        Err(VariationalError::DivergentExt) => LimitReport {
            value: None,
            label: "-inf (divergent ext term)".into(),
        },
        Err(e) => return Err(solver_err(e)),
    };

    let certificate = if g.is_straight() {
        CertificateReport {
            n0: None,
            value: None,
            label: "no certificate (straight)".into(),
        }
    } else {
        match bound_state_certificate(&g, &profile, &gs) {
            Ok((n0, value)) => CertificateReport {
                n0: Some(n0),
                value: Some(value),
                label: format!("n0 = {n0}"),
            },
            Err(e @ VariationalError::CertificateNotFound { .. }) => CertificateReport {
                n0: None,
                value: None,
                label: e.to_string(),
            },
            Err(e) => return Err(from_variational(e)),
        }
    };

    Ok(VariationalReport {
        resolved_config: cfg.resolved(gs.e1)?,
        e1: gs.e1,
        q2_int_closed: q_tilde_2_int_closed(&g, &gs),
        forms,
        limit,
        certificate,
    })
}

impl Report for VariationalReport {
    fn csv_header(&self) -> Vec<String> {
        [
            "n",
            "q1",
            "q2_int",
            "q2_ext",
            "total",
            "bracket_q2_int",
            "bracket_q2_ext",
            "bracket_total",
            "limit",
            "certificate_n0",
            "certificate_value",
        ]
        .map(String::from)
        .to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let limit = self.limit.value.map(fmt_float).unwrap_or_else(|| "-inf".into());
        let n0 = self.certificate.n0.map(|n| n.to_string()).unwrap_or_default();
        self.forms
            .iter()
            .map(|f| {
                vec![
                    f.n.to_string(),
                    fmt_float(f.q1),
                    fmt_float(f.q2_int),
                    fmt_float(f.q2_ext),
                    fmt_float(f.total),
                    fmt_float(f.bracket_q2_int),
                    fmt_float(f.bracket_q2_ext),
                    fmt_float(f.bracket_total),
                    limit.clone(),
                    n0.clone(),
                    fmt_opt(self.certificate.value),
                ]
            })
            .collect()
    }
}

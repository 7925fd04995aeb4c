//! Executes a config into report rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use su11net_core::metrology::{NumericQfi, ReportOptions};
use su11net_core::{saturation_report, Backend, Bound, ReportFlag, Scheme, SensitivityReport};

use crate::config::{BackendKind, ExperimentConfig};

/// Step for the Fock-oracle QFI.
pub const QFI_STEP: f64 = 1e-4;

/// One output row; measured columns are empty when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scheme: Scheme,
    #[serde(rename = "M")]
    pub modes: usize,
    pub r: f64,
    pub beta: f64,
    pub eval_point: f64,
    pub signal: Option<f64>,
    pub signal_std: Option<f64>,
    pub slope: Option<f64>,
    pub delta_measured: Option<f64>,
    pub qfi_closed: Option<f64>,
    pub qfi_numeric: Option<f64>,
    pub qcrb: Option<Bound>,
    pub saturation_ratio: Option<f64>,
    pub flags: Vec<ReportFlag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    fn from_report(rep: SensitivityReport) -> Self {
        Self {
            scheme: rep.scheme,
            modes: rep.modes,
            r: rep.r,
            beta: rep.beta,
            eval_point: rep.eval_point,
            signal: Some(rep.signal),
            signal_std: Some(rep.signal_std),
            slope: Some(rep.slope),
            delta_measured: Some(rep.delta_measured),
            qfi_closed: Some(rep.qfi_closed),
            qfi_numeric: rep.qfi_numeric,
            qcrb: Some(rep.qcrb),
            saturation_ratio: Some(rep.saturation_ratio).filter(|x| x.is_finite()),
            flags: rep.flags,
            error: None,
        }
    }
}

fn backend(cfg: &ExperimentConfig) -> Backend {
    match (cfg.backend.kind, cfg.backend.cutoff) {
        (BackendKind::Fock, Some(cutoff)) => Backend::Fock { cutoff, guard: cfg.backend.guard() },
        _ => Backend::Gaussian,
    }
}

fn run_point(cfg: &ExperimentConfig, r: f64) -> Row {
    let beta = cfg.beta.unwrap_or_else(|| cfg.scheme.default_beta()).rem_euclid(std::f64::consts::TAU);
    let failed = |eval_point: f64, err: su11net_core::Error| Row {
        scheme: cfg.scheme,
        modes: cfg.modes,
        r,
        beta,
        eval_point,
        signal: None,
        signal_std: None,
        slope: None,
        delta_measured: None,
        qfi_closed: None,
        qfi_numeric: None,
        qcrb: None,
        saturation_ratio: None,
        flags: vec![ReportFlag::for_error(&err)],
        error: Some(err.to_string()),
    };
    let pipeline = match cfg.pipeline(r) {
        Ok(p) => p,
        Err(e) => return failed(cfg.eval_point.unwrap_or(f64::NAN), e),
    };
    let eval_point = cfg.eval_point.unwrap_or_else(|| {
        let avg = pipeline.network_average();
        if avg != 0.0 {
            avg
        } else {
            cfg.scheme.default_eval_point()
        }
    });
    let options = ReportOptions {
        backend: backend(cfg),
        eval_point: Some(eval_point),
        step: None,
        numeric_qfi: match (cfg.backend.qfi_numeric, cfg.backend.cutoff) {
            (true, Some(cutoff)) => Some(NumericQfi { cutoff, guard: cfg.backend.guard(), step: QFI_STEP }),
            _ => None,
        },
    };
    match saturation_report(&pipeline, &options) {
        Ok(rep) => Row::from_report(rep),
        Err(e) => failed(eval_point, e),
    }
}

/// One row per squeezing value, in sweep order; failures stay in their own row.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<Row> {
    cfg.r.values().into_par_iter().map(|r| run_point(cfg, r)).collect()
}

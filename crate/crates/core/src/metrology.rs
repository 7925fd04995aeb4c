//! Error sensitivity, quantum Fisher information and Cramér–Rao bounds for pipelines.
//!
//! The measured sensitivity is `Δη = ΔS / |∂S/∂η|`, where `S` is the photon
//! number (or the homodyne quadrature) at port 1 and `η` is the network
//! average. The slope comes from a central difference with one Richardson
//! refinement; moving `η` shifts every node value by the same amount.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::BosonicState;
use crate::error::{invalid, Error, Result};
use crate::fock::{qfi_numeric, QfiEstimate};
use crate::interferometer::{Backend, Pipeline, Scheme};

/// Saturation tolerance for displacement schemes.
pub const DISPLACEMENT_TOL: f64 = 1e-6;
/// Saturation tolerance for phase schemes at `r ≥ 1`.
pub const PHASE_TOL: f64 = 5e-3;
/// Saturation tolerance for the homodyne scheme, where `α² ≫ sinh² r` is assumed.
pub const HOMODYNE_TOL: f64 = 1e-2;
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalStats {
    pub mean: f64,
    pub std: f64,
}

/// Photon-number signal and its fluctuation at `port` of the output state.
pub fn signal_stats(pipeline: &Pipeline, port: usize, backend: &Backend) -> Result<SignalStats> {
    if port >= pipeline.modes() {
        return invalid(format!("port {port} out of range for {} modes", pipeline.modes()));
    }
    let out = pipeline.run(backend)?;
    let (mean, var) = out.photon_moments(port)?;
    Ok(SignalStats { mean, std: var.max(0.0).sqrt() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityEstimate {
    pub eval_point: f64,
    pub signal: f64,
    pub signal_std: f64,
    pub slope: f64,
    /// Disagreement between the refined slope and the half-step difference.
    pub slope_uncertainty: f64,
    pub delta: f64,
}

/// `max(1e-6, 1e-4·|η₀|)`.
pub fn default_step(eta0: f64) -> f64 {
    (1e-4 * eta0.abs()).max(1e-6)
}

fn refined_slope<F>(signal: F, eta0: f64, h: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !h.is_finite() || h <= 0.0 {
        return invalid(format!("finite-difference step must be positive, got {h}"));
    }
    let diff = |step: f64| -> Result<f64> { Ok((signal(eta0 + step)? - signal(eta0 - step)?) / (2.0 * step)) };
    let coarse = diff(h)?;
    let fine = diff(h / 2.0)?;
    let slope = (4.0 * fine - coarse) / 3.0;
    Ok((slope, (slope - fine).abs()))
}

fn estimate<F>(signal: F, eta0: f64, h: Option<f64>, centre: (f64, f64)) -> Result<SensitivityEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = h.unwrap_or_else(|| default_step(eta0));
    let (slope, slope_uncertainty) = refined_slope(signal, eta0, h)?;
    let (signal, signal_std) = centre;
    // A signal change across the stencil at rounding level carries no slope.
    let change = slope.abs() * 2.0 * h;
    if change.is_nan() || change <= ROUNDING_FLOOR * signal.abs().max(1.0) {
        return Err(Error::DegenerateSlope { eta0 });
    }
    Ok(SensitivityEstimate {
        eval_point: eta0,
        signal,
        signal_std,
        slope,
        slope_uncertainty,
        delta: signal_std / slope.abs(),
    })
}

/// Photon-number error sensitivity of the network average at port 1.
pub fn error_sensitivity(
    pipeline: &Pipeline,
    eta0: f64,
    h: Option<f64>,
    backend: &Backend,
) -> Result<SensitivityEstimate> {
    if pipeline.scheme().encodes_phase() && (eta0.is_nan() || eta0 <= 0.0) {
        return invalid(format!("phase sensitivity needs an evaluation point > 0, got {eta0}"));
    }
    let signal = |eta: f64| -> Result<f64> { Ok(pipeline.with_average(eta).run(backend)?.photon_moments(0)?.0) };
    let centre = signal_stats(&pipeline.with_average(eta0), 0, backend)?;
    estimate(signal, eta0, h, (centre.mean, centre.std))
}

/// Sensitivity of the homodyne signal `Im⟨a₁⟩` with fluctuation from `Var Y`, `Y = (a − a†)/(2i)`.
pub fn homodyne_sensitivity(
    pipeline: &Pipeline,
    eta0: f64,
    h: Option<f64>,
    backend: &Backend,
) -> Result<SensitivityEstimate> {
    if !pipeline.scheme().is_homodyne() {
        return invalid(format!("homodyne sensitivity needs the homodyne scheme, got {}", pipeline.scheme()));
    }
    match pipeline.probe().seed {
        Some(a) if a > 0.0 => {}
        other => return invalid(format!("homodyne scheme needs a real seed amplitude > 0, got {other:?}")),
    }
    let signal = |eta: f64| -> Result<f64> { Ok(pipeline.with_average(eta).run(backend)?.quadrature_stats(0)?.0) };
    let (mean_y, var_y) = pipeline.with_average(eta0).run(backend)?.quadrature_stats(0)?;
    estimate(signal, eta0, h, (mean_y, var_y.max(0.0).sqrt()))
}

/// Closed-form QFI of the network average for each scheme at its default probe orientation.
pub fn qfi_closed_form(scheme: Scheme, modes: usize, r: f64, alpha: Option<f64>) -> Result<f64> {
    if modes == 0 {
        return invalid("mode count must be at least 1");
    }
    if !r.is_finite() || r < 0.0 {
        return invalid(format!("squeezing must be finite and >= 0, got {r}"));
    }
    let (s, c) = (r.sinh(), r.cosh());
    Ok(match scheme {
        Scheme::SingleDisplacement => 4.0 * (2.0 * r).exp(),
        Scheme::NetworkDisplacement => 4.0 * modes as f64 * (2.0 * r).exp(),
        Scheme::SinglePhase | Scheme::NetworkPhase => 8.0 * s * s * (1.0 + s * s),
        Scheme::NetworkPhaseHomodyne => {
            let a = alpha.ok_or_else(|| {
                Error::InvalidArgument("squeezed-coherent QFI needs the seed amplitude".into())
            })?;
            let vacuum_part = s.powi(4) + s * s + s * s * c * c;
            let seed_part = a * a * (2.0 * r).exp() * (1.0 + 2.0 * s * s + 2.0 * s * c);
            4.0 * (vacuum_part + seed_part)
        }
    })
}

/// QFI as four times the generator variance on the Gaussian encoded state.
///
/// Phase schemes use `Σ_j n_j`; displacement schemes use `i Σ_j (a_j† − a_j) = √2 Σ_j p_j`.
pub fn qfi_generator(pipeline: &Pipeline) -> Result<f64> {
    let state = pipeline.encoded_state(&Backend::Gaussian)?;
    let g = state.as_gaussian().expect("gaussian backend");
    if pipeline.scheme().encodes_phase() {
        Ok(4.0 * g.total_photon_moments().1)
    } else {
        let m = g.modes();
        let mut var_p = 0.0;
        for j in 0..m {
            for k in 0..m {
                var_p += g.cov()[(j + m, k + m)];
            }
        }
        Ok(8.0 * var_p)
    }
}

/// Numeric QFI from the Fock oracle, moving every node value together.
pub fn qfi_fock(pipeline: &Pipeline, cutoff: usize, guard: f64, eta0: f64, h: f64) -> Result<QfiEstimate> {
    let backend = Backend::Fock { cutoff, guard };
    let family = |eta: f64| -> Result<_> {
        let state = pipeline.with_average(eta).encoded_state(&backend)?;
        Ok(state.as_fock().expect("fock backend").clone())
    };
    qfi_numeric(family, eta0, h)
}

/// Quantum Cramér–Rao bound `1/√F_Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Finite(f64),
    /// `F_Q = 0`: the probe carries no information about the parameter.
    Unbounded,
}

impl Bound {
    pub fn value(&self) -> f64 {
        match self {
            Bound::Finite(v) => *v,
            Bound::Unbounded => f64::INFINITY,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_f64(*v),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Bound::Finite(v)),
            Raw::Text(t) if t == "unbounded" => Ok(Bound::Unbounded),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid bound '{t}'"))),
        }
    }
}

pub fn qcrb(fisher: f64) -> Result<Bound> {
    if fisher.is_nan() || fisher < 0.0 {
        return invalid(format!("Fisher information must be >= 0, got {fisher}"));
    }
    if fisher == 0.0 {
        Ok(Bound::Unbounded)
    } else {
        Ok(Bound::Finite(1.0 / fisher.sqrt()))
    }
}

/// Small-phase split of the port-1 signal: `I₁ = 4cosh²r sinh²r φ̄²` and `I₂ = Φ sinh²r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSignalSplit {
    pub i1: f64,
    pub i2: f64,
}

impl PhaseSignalSplit {
    pub fn of(pipeline: &Pipeline) -> Self {
        let r = pipeline.probe().squeeze.r();
        let (s, c) = (r.sinh(), r.cosh());
        let avg = pipeline.network_average();
        Self { i1: 4.0 * c * c * s * s * avg * avg, i2: pipeline.spread() * s * s }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFlag {
    /// Phase scheme below `r = 1`, where saturation is only approached.
    SmallSqueezing,
    /// Inhomogeneous node phases: the `I₂` term biases the signal.
    SpreadBias,
    QfiNotConverged,
    /// Measured sensitivity beats the bound by more than the tolerance.
    BelowBound,
    /// Ratio exceeds `1 + tol`.
    Unsaturated,
    /// Probe `β` differs from the orientation the closed form assumes.
    NonDefaultOrientation,
    NoInformation,
    TruncationOverflow,
    DegenerateSlope,
    Failed,
}

impl ReportFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportFlag::SmallSqueezing => "small-squeezing",
            ReportFlag::SpreadBias => "spread-bias",
            ReportFlag::QfiNotConverged => "qfi-not-converged",
            ReportFlag::BelowBound => "below-bound",
            ReportFlag::Unsaturated => "unsaturated",
            ReportFlag::NonDefaultOrientation => "non-default-orientation",
            ReportFlag::NoInformation => "no-information",
            ReportFlag::TruncationOverflow => "truncation-overflow",
            ReportFlag::DegenerateSlope => "degenerate-slope",
            ReportFlag::Failed => "failed",
        }
    }

    /// Flag describing why a run could not produce a report.
    pub fn for_error(err: &Error) -> Self {
        match err {
            Error::TruncationOverflow { .. } => ReportFlag::TruncationOverflow,
            Error::DegenerateSlope { .. } => ReportFlag::DegenerateSlope,
            _ => ReportFlag::Failed,
        }
    }
}

impl fmt::Display for ReportFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub scheme: Scheme,
    pub modes: usize,
    pub r: f64,
    pub beta: f64,
    pub eval_point: f64,
    pub signal: f64,
    pub signal_std: f64,
    pub slope: f64,
    pub slope_uncertainty: f64,
    pub delta_measured: f64,
    pub qfi_closed: f64,
    pub qfi_numeric: Option<f64>,
    pub qcrb: Bound,
    pub saturation_ratio: f64,
    pub phase_split: Option<PhaseSignalSplit>,
    pub truncation_weight: Option<f64>,
    pub flags: Vec<ReportFlag>,
}

/// Fock-oracle settings for the optional numeric QFI.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericQfi {
    pub cutoff: usize,
    pub guard: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportOptions {
    pub backend: Backend,
    /// Network average to evaluate at; defaults to the pipeline's own average, or the scheme default when that is 0.
    pub eval_point: Option<f64>,
    pub step: Option<f64>,
    pub numeric_qfi: Option<NumericQfi>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { backend: Backend::Gaussian, eval_point: None, step: None, numeric_qfi: None }
    }
}

fn tolerance(scheme: Scheme) -> f64 {
    if scheme.is_homodyne() {
        HOMODYNE_TOL
    } else if scheme.encodes_phase() {
        PHASE_TOL
    } else {
        DISPLACEMENT_TOL
    }
}

/// Measured sensitivity, closed-form bound and their ratio for one pipeline.
pub fn saturation_report(pipeline: &Pipeline, options: &ReportOptions) -> Result<SensitivityReport> {
    let scheme = pipeline.scheme();
    let probe = pipeline.probe();
    let eta0 = options.eval_point.unwrap_or_else(|| {
        let avg = pipeline.network_average();
        if avg != 0.0 {
            avg
        } else {
            scheme.default_eval_point()
        }
    });
    let at = pipeline.with_average(eta0);
    let est = if scheme.is_homodyne() {
        homodyne_sensitivity(&at, eta0, options.step, &options.backend)?
    } else {
        error_sensitivity(&at, eta0, options.step, &options.backend)?
    };
    let qfi_closed = qfi_closed_form(scheme, pipeline.modes(), probe.squeeze.r(), probe.seed)?;
    let bound = qcrb(qfi_closed)?;
    let mut flags = Vec::new();

    let qfi_numeric = match options.numeric_qfi {
        // An oracle failure only costs the numeric column.
        Some(n) => match qfi_fock(&at, n.cutoff, n.guard, eta0, n.step) {
            Ok(q) => {
                if !q.converged {
                    flags.push(ReportFlag::QfiNotConverged);
                }
                Some(q.value)
            }
            Err(e) => {
                flags.push(ReportFlag::for_error(&e));
                None
            }
        },
        None => None,
    };

    let saturation_ratio = match bound {
        Bound::Finite(b) => est.delta / b,
        Bound::Unbounded => {
            flags.push(ReportFlag::NoInformation);
            f64::NAN
        }
    };
    let tol = tolerance(scheme);
    if saturation_ratio < 1.0 - tol {
        flags.push(ReportFlag::BelowBound);
    }
    if saturation_ratio > 1.0 + tol {
        flags.push(ReportFlag::Unsaturated);
    }
    let photon_phase = scheme.encodes_phase() && !scheme.is_homodyne();
    if photon_phase && probe.squeeze.r() < 1.0 {
        flags.push(ReportFlag::SmallSqueezing);
    }
    if scheme.encodes_phase() && at.spread() > 0.0 {
        flags.push(ReportFlag::SpreadBias);
    }
    if (probe.squeeze.beta() - scheme.default_beta()).abs() > 1e-12 {
        flags.push(ReportFlag::NonDefaultOrientation);
    }

    let truncation_weight = match options.backend {
        Backend::Gaussian => None,
        Backend::Fock { .. } => at.run(&options.backend)?.truncation_weight(),
    };

    Ok(SensitivityReport {
        scheme,
        modes: pipeline.modes(),
        r: probe.squeeze.r(),
        beta: probe.squeeze.beta(),
        eval_point: eta0,
        signal: est.signal,
        signal_std: est.signal_std,
        slope: est.slope,
        slope_uncertainty: est.slope_uncertainty,
        delta_measured: est.delta,
        qfi_closed,
        qfi_numeric,
        qcrb: bound,
        saturation_ratio,
        phase_split: photon_phase.then(|| PhaseSignalSplit::of(&at)),
        truncation_weight,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pipeline(scheme: Scheme, modes: usize, r: f64, value: f64) -> Pipeline {
        Pipeline::builder(scheme).modes(modes).squeezing(r).uniform(value).build().unwrap()
    }

    #[test]
    fn qcrb_values() {
        assert_abs_diff_eq!(qcrb(4.0 * 1f64.exp().powi(2)).unwrap().value(), 0.183940, epsilon = 1e-6);
        assert_abs_diff_eq!(qcrb(26.30823).unwrap().value(), 0.194964, epsilon = 1e-6);
        assert_eq!(qcrb(0.0).unwrap(), Bound::Unbounded);
        assert!(qcrb(-1.0).is_err());
        assert!(qcrb(f64::NAN).is_err());
    }

    #[test]
    fn closed_forms() {
        let e2 = 1f64.exp().powi(2);
        assert_abs_diff_eq!(qfi_closed_form(Scheme::NetworkDisplacement, 4, 1.0, None).unwrap(), 16.0 * e2, epsilon = 1e-12);
        assert_abs_diff_eq!(qfi_closed_form(Scheme::NetworkDisplacement, 4, 1.0, None).unwrap(), 118.2249, epsilon = 1e-4);
        assert_eq!(qfi_closed_form(Scheme::NetworkPhase, 3, 0.0, None).unwrap(), 0.0);
        assert_abs_diff_eq!(
            qfi_closed_form(Scheme::NetworkPhaseHomodyne, 4, 1.0, Some(10.0)).unwrap(),
            21865.57,
            epsilon = 1e-2
        );
        assert!(qfi_closed_form(Scheme::NetworkPhaseHomodyne, 4, 1.0, None).is_err());
    }

    #[test]
    fn squeezed_coherent_closed_form_is_four_times_number_variance() {
        // S(r)|α⟩ with β = 0 has ⟨a⟩ = αe^r, so Var n = 2 sinh²r cosh²r + α² e^{4r}.
        for (r, a) in [(0.5, 2.0), (1.0, 10.0), (0.2, 0.0)] {
            let (s, c) = (f64::sinh(r), f64::cosh(r));
            let expected = 4.0 * (2.0 * s * s * c * c + a * a * (4.0 * r).exp());
            let got = qfi_closed_form(Scheme::NetworkPhaseHomodyne, 1, r, Some(a)).unwrap();
            assert_abs_diff_eq!(got, expected, epsilon = 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn generator_variance_matches_closed_forms() {
        for r in [0.0, 0.4, 1.0, 1.7] {
            let p = pipeline(Scheme::SingleDisplacement, 1, r, 0.1);
            let want = qfi_closed_form(Scheme::SingleDisplacement, 1, r, None).unwrap();
            assert_abs_diff_eq!(qfi_generator(&p).unwrap(), want, epsilon = 1e-9 * want);
            let p = pipeline(Scheme::SinglePhase, 1, r, 0.0);
            let want = qfi_closed_form(Scheme::SinglePhase, 1, r, None).unwrap();
            assert_abs_diff_eq!(qfi_generator(&p).unwrap(), want, epsilon = 1e-9 * want.max(1.0));
            for m in [2, 3, 5] {
                let p = pipeline(Scheme::NetworkDisplacement, m, r, 0.0);
                let want = qfi_closed_form(Scheme::NetworkDisplacement, m, r, None).unwrap();
                assert_abs_diff_eq!(qfi_generator(&p).unwrap(), want, epsilon = 1e-9 * want);
            }
        }
        let p = Pipeline::builder(Scheme::NetworkPhaseHomodyne).modes(3).squeezing(0.8).seed(2.0).build().unwrap();
        let want = qfi_closed_form(Scheme::NetworkPhaseHomodyne, 3, 0.8, Some(2.0)).unwrap();
        assert_abs_diff_eq!(qfi_generator(&p).unwrap(), want, epsilon = 1e-9 * want);
    }

    #[test]
    fn single_displacement_sensitivity() {
        let p = pipeline(Scheme::SingleDisplacement, 1, 1.0, 0.1);
        let est = error_sensitivity(&p, 0.1, None, &Backend::Gaussian).unwrap();
        assert_abs_diff_eq!(est.delta, 0.183940, epsilon = 1e-6);
    }

    #[test]
    fn network_displacement_signal_and_sensitivity() {
        let p = pipeline(Scheme::NetworkDisplacement, 4, 1.0, 0.1);
        let s = signal_stats(&p, 0, &Backend::Gaussian).unwrap();
        assert_abs_diff_eq!(s.mean, 0.295562, epsilon = 1e-6);
        assert_abs_diff_eq!(s.std, 0.543656, epsilon = 1e-6);
        let est = error_sensitivity(&p, 0.1, None, &Backend::Gaussian).unwrap();
        assert_abs_diff_eq!(est.delta, 0.091970, epsilon = 1e-6);
        assert!(signal_stats(&p, 4, &Backend::Gaussian).is_err());
    }

    #[test]
    fn single_phase_signal() {
        let p = pipeline(Scheme::SinglePhase, 1, 1.0, 0.01);
        let s = signal_stats(&p, 0, &Backend::Gaussian).unwrap();
        let (sh, ch) = (1f64.sinh(), 1f64.cosh());
        let a2 = 4.0 * 0.01f64.sin().powi(2) * ch * ch * sh * sh;
        assert_abs_diff_eq!(s.mean, a2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.mean, 1.31537e-3, epsilon = 1e-8);
        // ΔS = |A|√(1 + |A|² + |B|²) with |B|² = 1 + |A|².
        assert_abs_diff_eq!(s.std, (a2 * (2.0 + 2.0 * a2)).sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(s.std, 0.0513244, epsilon = 1e-6);
    }

    #[test]
    fn phase_sensitivity_rejects_zero_point() {
        let p = pipeline(Scheme::NetworkPhase, 2, 1.0, 0.0);
        assert!(matches!(error_sensitivity(&p, 0.0, None, &Backend::Gaussian), Err(Error::InvalidArgument(_))));
        let d = pipeline(Scheme::NetworkDisplacement, 2, 1.0, 0.0);
        assert!(matches!(error_sensitivity(&d, 0.0, None, &Backend::Gaussian), Err(Error::DegenerateSlope { .. })));
        assert!(error_sensitivity(&d, 0.1, Some(0.0), &Backend::Gaussian).is_err());
    }

    #[test]
    fn homodyne_limits() {
        let p = Pipeline::builder(Scheme::NetworkPhaseHomodyne).modes(4).squeezing(1.0).seed(10.0).build().unwrap();
        let est = homodyne_sensitivity(&p, 1e-4, None, &Backend::Gaussian).unwrap();
        assert_abs_diff_eq!(est.delta / ((-2.0f64).exp() / 20.0), 1.0, epsilon = 5e-3);
        let p = Pipeline::builder(Scheme::NetworkPhaseHomodyne).modes(1).seed(1.0).build().unwrap();
        let est = homodyne_sensitivity(&p, 1e-4, None, &Backend::Gaussian).unwrap();
        assert_abs_diff_eq!(est.delta, 0.5, epsilon = 1e-6);
        let p = Pipeline::builder(Scheme::NetworkPhaseHomodyne).modes(1).seed(0.0).build().unwrap();
        assert!(homodyne_sensitivity(&p, 1e-4, None, &Backend::Gaussian).is_err());
        let q = pipeline(Scheme::NetworkPhase, 2, 1.0, 0.0);
        assert!(homodyne_sensitivity(&q, 1e-4, None, &Backend::Gaussian).is_err());
    }

    #[test]
    fn reports() {
        let p = pipeline(Scheme::NetworkDisplacement, 2, 0.5, 0.1);
        let rep = saturation_report(&p, &ReportOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.saturation_ratio, 1.0, epsilon = 1e-6);
        assert!(rep.flags.is_empty(), "{:?}", rep.flags);

        let p = pipeline(Scheme::SinglePhase, 1, 1.0, 0.0);
        let rep = saturation_report(&p, &ReportOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.saturation_ratio, 1.0, epsilon = 5e-3);
        assert_eq!(rep.eval_point, 1e-4);
        assert!(rep.flags.is_empty(), "{:?}", rep.flags);

        let p = pipeline(Scheme::NetworkPhase, 2, 0.3, 0.0);
        let rep = saturation_report(&p, &ReportOptions::default()).unwrap();
        assert!(rep.saturation_ratio > 1.0);
        assert!(rep.flags.contains(&ReportFlag::SmallSqueezing));
        assert!(rep.phase_split.is_some());

        let p = pipeline(Scheme::NetworkPhase, 2, 0.0, 0.0);
        let res = saturation_report(&p, &ReportOptions::default());
        assert!(matches!(res, Err(Error::DegenerateSlope { .. })), "{res:?}");
    }
}

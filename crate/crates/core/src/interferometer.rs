//! Time-reversed SU(1,1)–SU(m) pipelines: probe preparation, distribution,
//! per-node encoding, undistribution and unsqueezing.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{BosonicState, Element};
use crate::error::{invalid, Error, Result};
use crate::fock::{FockState, DEFAULT_GUARD, MAX_MODES};
use crate::gaussian::{unitarity_defect, GaussianState, SqueezeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SingleDisplacement,
    SinglePhase,
    NetworkDisplacement,
    NetworkPhase,
    NetworkPhaseHomodyne,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SingleDisplacement,
        Scheme::SinglePhase,
        Scheme::NetworkDisplacement,
        Scheme::NetworkPhase,
        Scheme::NetworkPhaseHomodyne,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::SingleDisplacement => "single-displacement",
            Scheme::SinglePhase => "single-phase",
            Scheme::NetworkDisplacement => "network-displacement",
            Scheme::NetworkPhase => "network-phase",
            Scheme::NetworkPhaseHomodyne => "network-phase-homodyne",
        }
    }

    pub fn encodes_phase(&self) -> bool {
        matches!(self, Scheme::SinglePhase | Scheme::NetworkPhase | Scheme::NetworkPhaseHomodyne)
    }

    pub fn is_single_mode(&self) -> bool {
        matches!(self, Scheme::SingleDisplacement | Scheme::SinglePhase)
    }

    pub fn is_homodyne(&self) -> bool {
        matches!(self, Scheme::NetworkPhaseHomodyne)
    }

    /// Probe squeezing phase used when none is given.
    pub fn default_beta(&self) -> f64 {
        match self {
            Scheme::NetworkPhaseHomodyne => 0.0,
            _ => PI,
        }
    }

    /// Default evaluation point of the network average.
    pub fn default_eval_point(&self) -> f64 {
        if self.encodes_phase() {
            1e-4
        } else {
            0.1
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme id '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributorKind {
    #[default]
    Dft,
    Hadamard,
}

impl FromStr for DistributorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dft" => Ok(DistributorKind::Dft),
            "hadamard" => Ok(DistributorKind::Hadamard),
            other => invalid(format!("unknown distributor '{other}' (expected dft or hadamard)")),
        }
    }
}

/// Balanced `M×M` unitary with `|U_{j1}| = 1/√M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distributor {
    kind: DistributorKind,
    matrix: DMatrix<Complex64>,
}

impl Distributor {
    pub fn balanced(modes: usize, kind: DistributorKind) -> Result<Self> {
        if modes == 0 {
            return invalid("distributor needs at least one mode");
        }
        let norm = 1.0 / (modes as f64).sqrt();
        let matrix = match kind {
            DistributorKind::Dft => DMatrix::from_fn(modes, modes, |j, k| {
                let angle = 2.0 * PI * ((j * k) % modes) as f64 / modes as f64;
                Complex64::from_polar(norm, angle)
            }),
            DistributorKind::Hadamard => {
                if !modes.is_power_of_two() {
                    return invalid(format!("Hadamard distributor needs a power-of-two mode count, got {modes}"));
                }
                // Sylvester: H_{jk} = (−1)^{popcount(j & k)}
                DMatrix::from_fn(modes, modes, |j, k| {
                    let sign = if (j & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(sign * norm, 0.0)
                })
            }
        };
        debug_assert!(unitarity_defect(&matrix) < 1e-12);
        Ok(Self { kind, matrix })
    }

    pub fn kind(&self) -> DistributorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Single-mode probe: `S(ζ)|0⟩`, or `S(ζ)D(α)|0⟩` when a coherent seed is present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub squeeze: SqueezeParams,
    pub seed: Option<f64>,
}

/// Ordered, immutable description of one interferometer run.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    scheme: Scheme,
    distributor: Distributor,
    probe: Probe,
    encoding: Vec<f64>,
}

/// Builder for [`Pipeline`]; unset fields take the scheme defaults.
#[derive(Clone, Debug)]
pub struct PipelineBuilder {
    scheme: Scheme,
    modes: Option<usize>,
    r: f64,
    beta: Option<f64>,
    distributor: DistributorKind,
    encoding: Option<Vec<f64>>,
    uniform: Option<f64>,
    seed: Option<f64>,
}

impl PipelineBuilder {
    pub fn modes(mut self, modes: usize) -> Self {
        self.modes = Some(modes);
        self
    }

    pub fn squeezing(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn distributor(mut self, kind: DistributorKind) -> Self {
        self.distributor = kind;
        self
    }

    pub fn encoding(mut self, encoding: Vec<f64>) -> Self {
        self.encoding = Some(encoding);
        self.uniform = None;
        self
    }

    /// Same value at every node.
    pub fn uniform(mut self, value: f64) -> Self {
        self.uniform = Some(value);
        self.encoding = None;
        self
    }

    pub fn seed(mut self, alpha: f64) -> Self {
        self.seed = Some(alpha);
        self
    }

    pub fn build(self) -> Result<Pipeline> {
        let scheme = self.scheme;
        let modes = match (scheme.is_single_mode(), self.modes) {
            (true, None | Some(1)) => 1,
            (true, Some(m)) => return invalid(format!("{scheme} is a single-mode scheme, got {m} modes")),
            (false, Some(m)) if m >= 1 => m,
            (false, _) => return invalid(format!("{scheme} needs a mode count >= 1")),
        };
        let encoding = match (self.encoding, self.uniform) {
            (Some(e), _) => e,
            (None, value) => vec![value.unwrap_or(0.0); modes],
        };
        if encoding.len() != modes {
            return invalid(format!("encoding has length {} but the network has {modes} modes", encoding.len()));
        }
        if let Some(bad) = encoding.iter().find(|v| !v.is_finite()) {
            return invalid(format!("encoding value {bad} is not finite"));
        }
        match (scheme.is_homodyne(), self.seed) {
            (true, None) => return invalid("network-phase-homodyne needs a coherent seed amplitude"),
            (true, Some(a)) if !a.is_finite() => return invalid(format!("seed amplitude {a} is not finite")),
            (false, Some(_)) => return invalid(format!("{scheme} does not take a coherent seed")),
            _ => {}
        }
        let squeeze = SqueezeParams::new(self.r, self.beta.unwrap_or(scheme.default_beta()))?;
        let distributor = Distributor::balanced(modes, self.distributor)?;
        Ok(Pipeline { scheme, distributor, probe: Probe { squeeze, seed: self.seed }, encoding })
    }
}

/// Which simulator executes a pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Gaussian,
    Fock { cutoff: usize, guard: f64 },
}

impl Backend {
    pub fn fock(cutoff: usize) -> Self {
        Backend::Fock { cutoff, guard: DEFAULT_GUARD }
    }
}

/// Final state from either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum SimState {
    Gaussian(GaussianState),
    Fock(FockState),
}

impl SimState {
    pub fn as_gaussian(&self) -> Option<&GaussianState> {
        match self {
            SimState::Gaussian(g) => Some(g),
            SimState::Fock(_) => None,
        }
    }

    pub fn as_fock(&self) -> Option<&FockState> {
        match self {
            SimState::Fock(f) => Some(f),
            SimState::Gaussian(_) => None,
        }
    }

    pub fn truncation_weight(&self) -> Option<f64> {
        self.as_fock().map(FockState::truncation_weight)
    }
}

macro_rules! delegate {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            SimState::Gaussian($s) => $e,
            SimState::Fock($s) => $e,
        }
    };
}

impl BosonicState for SimState {
    fn mode_count(&self) -> usize {
        delegate!(self, s => s.mode_count())
    }

    fn apply(&self, element: &Element) -> Result<Self> {
        match self {
            SimState::Gaussian(s) => s.apply(element).map(SimState::Gaussian),
            SimState::Fock(s) => s.apply(element).map(SimState::Fock),
        }
    }

    fn photon_moments(&self, mode: usize) -> Result<(f64, f64)> {
        delegate!(self, s => s.photon_moments(mode))
    }

    fn total_photon_moments(&self) -> (f64, f64) {
        delegate!(self, s => s.total_photon_moments())
    }

    fn mean_amplitude(&self, mode: usize) -> Result<Complex64> {
        delegate!(self, s => s.mean_amplitude(mode))
    }

    fn quadrature_stats(&self, mode: usize) -> Result<(f64, f64)> {
        delegate!(self, s => BosonicState::quadrature_stats(s, mode))
    }
}

impl Pipeline {
    pub fn builder(scheme: Scheme) -> PipelineBuilder {
        PipelineBuilder {
            scheme,
            modes: None,
            r: 0.0,
            beta: None,
            distributor: DistributorKind::Dft,
            encoding: None,
            uniform: None,
            seed: None,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn modes(&self) -> usize {
        self.distributor.modes()
    }

    pub fn probe(&self) -> Probe {
        self.probe
    }

    pub fn distributor(&self) -> &Distributor {
        &self.distributor
    }

    pub fn encoding(&self) -> &[f64] {
        &self.encoding
    }

    /// `ᾱ` or `φ̄`.
    pub fn network_average(&self) -> f64 {
        self.encoding.iter().sum::<f64>() / self.encoding.len() as f64
    }

    /// `Φ = mean(φ_j²) − φ̄²`, the spread of the node values.
    pub fn spread(&self) -> f64 {
        let mean = self.network_average();
        let sq = self.encoding.iter().map(|v| v * v).sum::<f64>() / self.encoding.len() as f64;
        (sq - mean * mean).max(0.0)
    }

    /// Shifts every node value so the network average becomes `eta`, keeping the deviations.
    pub fn with_average(&self, eta: f64) -> Pipeline {
        let shift = eta - self.network_average();
        let mut next = self.clone();
        next.encoding.iter_mut().for_each(|v| *v += shift);
        next
    }

    fn encode_elements(&self) -> Vec<Element> {
        self.encoding
            .iter()
            .enumerate()
            .map(|(mode, &v)| {
                if self.scheme.encodes_phase() {
                    Element::Rotate { mode, phi: v }
                } else {
                    Element::Displace { mode, alpha: Complex64::new(v, 0.0) }
                }
            })
            .collect()
    }

    /// Elements up to and including the encoding.
    pub fn encoding_elements(&self) -> Vec<Element> {
        let mut els = Vec::new();
        if let Some(alpha) = self.probe.seed {
            els.push(Element::Displace { mode: 0, alpha: Complex64::new(alpha, 0.0) });
        }
        els.push(Element::Squeeze { mode: 0, params: self.probe.squeeze });
        if self.modes() > 1 {
            els.push(Element::Passive(self.distributor.matrix.clone()));
        }
        els.extend(self.encode_elements());
        els
    }

    /// Full time-reversed sequence.
    pub fn elements(&self) -> Vec<Element> {
        let mut els = self.encoding_elements();
        if self.modes() > 1 {
            els.push(Element::Passive(self.distributor.matrix.adjoint()));
        }
        els.push(Element::Unsqueeze { mode: 0, params: self.probe.squeeze });
        els
    }

    /// Composite Heisenberg quadrature map of [`Pipeline::elements`].
    pub fn symplectic(&self) -> DMatrix<f64> {
        let m = self.modes();
        self.elements()
            .iter()
            .fold(DMatrix::identity(2 * m, 2 * m), |acc, el| el.symplectic(m) * acc)
    }

    fn initial(&self, backend: &Backend) -> Result<SimState> {
        match *backend {
            Backend::Gaussian => GaussianState::vacuum(self.modes()).map(SimState::Gaussian),
            Backend::Fock { cutoff, guard } => {
                if self.modes() > MAX_MODES {
                    return invalid(format!("Fock backend supports at most {MAX_MODES} modes"));
                }
                Ok(SimState::Fock(FockState::vacuum(self.modes(), cutoff)?.with_guard(guard)))
            }
        }
    }

    pub fn run(&self, backend: &Backend) -> Result<SimState> {
        self.initial(backend)?.apply_all(&self.elements())
    }

    /// State after encoding, before the network and squeezer are undone.
    pub fn encoded_state(&self, backend: &Backend) -> Result<SimState> {
        self.initial(backend)?.apply_all(&self.encoding_elements())
    }
}

//! Backend-agnostic circuit elements and the state interface both simulators implement.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::gaussian::{embed_block, passive_matrix, rotation_block, GaussianState, SqueezeParams};

/// One step of an interferometer pipeline.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Squeeze { mode: usize, params: SqueezeParams },
    /// `S⁻¹(ζ)` with the same parameters as a prior [`Element::Squeeze`].
    Unsqueeze { mode: usize, params: SqueezeParams },
    Displace { mode: usize, alpha: Complex64 },
    /// `e^{iφ a†a}`.
    Rotate { mode: usize, phi: f64 },
    /// Passive network `a_i → Σ_l U_il a_l`.
    Passive(DMatrix<Complex64>),
}

impl Element {
    /// Heisenberg quadrature map of the element; displacements map to the identity.
    pub fn symplectic(&self, modes: usize) -> DMatrix<f64> {
        match self {
            Element::Squeeze { mode, params } => embed_block(modes, *mode, params.block()),
            Element::Unsqueeze { mode, params } => embed_block(modes, *mode, params.inverse_block()),
            Element::Displace { .. } => DMatrix::identity(2 * modes, 2 * modes),
            Element::Rotate { mode, phi } => embed_block(modes, *mode, rotation_block(*phi)),
            Element::Passive(u) => passive_matrix(u),
        }
    }
}

/// Moments every backend can report for a single mode or the whole register.
pub trait BosonicState: Sized + Clone + Send + Sync {
    fn mode_count(&self) -> usize;

    fn apply(&self, element: &Element) -> Result<Self>;

    /// `(⟨n⟩, Var n)` of one mode.
    fn photon_moments(&self, mode: usize) -> Result<(f64, f64)>;

    /// `(⟨N⟩, Var N)` of the total photon number.
    fn total_photon_moments(&self) -> (f64, f64);

    /// `⟨a⟩` of one mode.
    fn mean_amplitude(&self, mode: usize) -> Result<Complex64>;

    /// Mean and variance of `Y = (a − a†)/(2i)`.
    fn quadrature_stats(&self, mode: usize) -> Result<(f64, f64)>;

    fn apply_all<'a, I>(&self, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Element>,
    {
        let mut state = self.clone();
        for el in elements {
            state = state.apply(el)?;
        }
        Ok(state)
    }
}

impl BosonicState for GaussianState {
    fn mode_count(&self) -> usize {
        self.modes()
    }

    fn apply(&self, element: &Element) -> Result<Self> {
        match element {
            Element::Squeeze { mode, params } => self.squeeze(*mode, *params),
            Element::Unsqueeze { mode, params } => self.squeeze_inverse(*mode, *params),
            Element::Displace { mode, alpha } => self.displace(*mode, *alpha),
            Element::Rotate { mode, phi } => self.rotate(*mode, *phi),
            Element::Passive(u) => self.apply_passive(u),
        }
    }

    fn photon_moments(&self, mode: usize) -> Result<(f64, f64)> {
        Ok((self.photon_mean(mode)?, self.photon_variance(mode)?))
    }

    fn total_photon_moments(&self) -> (f64, f64) {
        GaussianState::total_photon_moments(self)
    }

    fn mean_amplitude(&self, mode: usize) -> Result<Complex64> {
        GaussianState::mean_amplitude(self, mode)
    }

    fn quadrature_stats(&self, mode: usize) -> Result<(f64, f64)> {
        GaussianState::quadrature_stats(self, mode)
    }
}

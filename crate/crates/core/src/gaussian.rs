//! Exact evolution of pure Gaussian states of `M` bosonic modes.
//!
//! Quadratures are `x = (a + a†)/√2` and `p = (a − a†)/(i√2)`, so the vacuum
//! covariance is `I/2`. Vectors and matrices use block ordering
//! `(x_1 … x_M, p_1 … p_M)`.
//!
//! Every operation is described by its Heisenberg matrix `F` (the map the
//! element induces on the quadrature operators); the state moments evolve as
//! `mean → F·mean` and `cov → F·cov·Fᵀ`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance on `max |U†U − I|` accepted by [`GaussianState::apply_passive`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Squeezing `ζ = r·e^{iβ}` of `S(ζ) = exp(½ζa†² − ½ζ*a²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    r: f64,
    beta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, beta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return invalid(format!("squeezing magnitude must be finite and >= 0, got {r}"));
        }
        if !beta.is_finite() {
            return invalid(format!("squeezing phase must be finite, got {beta}"));
        }
        Ok(Self { r, beta: beta.rem_euclid(TAU) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Squeezing phase, reduced to `[0, 2π)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// 2×2 Heisenberg block of `S(ζ)` acting on `(x, p)`.
    ///
    /// `S†aS = a cosh r + a† e^{iβ} sinh r`, i.e. `R(β/2)·diag(e^r, e^{-r})·R(−β/2)`.
    pub fn block(&self) -> [[f64; 2]; 2] {
        let (c, s) = (self.r.cosh(), self.r.sinh());
        let (cb, sb) = (self.beta.cos(), self.beta.sin());
        [[c + s * cb, s * sb], [s * sb, c - s * cb]]
    }

    /// Heisenberg block of `S⁻¹(ζ)`.
    pub fn inverse_block(&self) -> [[f64; 2]; 2] {
        let (c, s) = (self.r.cosh(), self.r.sinh());
        let (cb, sb) = (self.beta.cos(), self.beta.sin());
        [[c - s * cb, -s * sb], [-s * sb, c + s * cb]]
    }
}

/// Standard symplectic form `Ω = [[0, I], [−I, 0]]` in block ordering.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        omega[(j, j + modes)] = 1.0;
        omega[(j + modes, j)] = -1.0;
    }
    omega
}

/// Embeds a single-mode 2×2 block into the `2M×2M` identity.
pub fn embed_block(modes: usize, mode: usize, block: [[f64; 2]; 2]) -> DMatrix<f64> {
    let mut f = DMatrix::identity(2 * modes, 2 * modes);
    let idx = [mode, mode + modes];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            f[(i, j)] = block[a][b];
        }
    }
    f
}

/// Heisenberg block of `e^{iφ a†a}`: `a → e^{iφ} a`.
pub fn rotation_block(phi: f64) -> [[f64; 2]; 2] {
    let (c, s) = (phi.cos(), phi.sin());
    [[c, -s], [s, c]]
}

/// Quadrature map `[[X, −Y], [Y, X]]` of the passive network `a_i → Σ_l U_il a_l`, `U = X + iY`.
pub fn passive_matrix(u: &DMatrix<Complex64>) -> DMatrix<f64> {
    let m = u.nrows();
    let mut f = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for l in 0..m {
            let z = u[(i, l)];
            f[(i, l)] = z.re;
            f[(i, l + m)] = -z.im;
            f[(i + m, l)] = z.im;
            f[(i + m, l + m)] = z.re;
        }
    }
    f
}

/// `max |U†U − I|` over all entries.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let prod = u.adjoint() * u;
    let n = u.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub(crate) fn check_unitary(u: &DMatrix<Complex64>, modes: usize) -> Result<()> {
    if u.nrows() != modes || u.ncols() != modes {
        return Err(Error::DimensionMismatch(format!(
            "passive network is {}x{}, state has {modes} modes",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect.is_nan() || defect >= UNITARITY_TOL {
        return Err(Error::NonUnitary { defect });
    }
    Ok(())
}

/// Complex Bogoliubov coefficients of a single-mode map `ã = B·a + A·a†`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bogoliubov {
    /// Coefficient of `a`.
    pub b: Complex64,
    /// Coefficient of `a†`.
    pub a: Complex64,
}

impl Bogoliubov {
    /// Reads the coefficients off a 2×2 quadrature map.
    pub fn from_block(f: [[f64; 2]; 2]) -> Self {
        let b = Complex64::new(f[0][0] + f[1][1], f[1][0] - f[0][1]) / 2.0;
        let a = Complex64::new(f[0][0] - f[1][1], f[1][0] + f[0][1]) / 2.0;
        Self { b, a }
    }

    /// `|B|² − |A|²`, which is 1 for any canonical single-mode map.
    pub fn commutator(&self) -> f64 {
        self.b.norm_sqr() - self.a.norm_sqr()
    }
}

/// Mean vector and covariance matrix of `M` bosonic modes.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return invalid("mode count must be at least 1");
        }
        Ok(Self {
            modes,
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return invalid(format!("mode {mode} out of range for {} modes", self.modes));
        }
        Ok(())
    }

    /// Applies a Heisenberg quadrature map to both moments.
    pub fn apply_symplectic(&self, f: &DMatrix<f64>) -> Result<Self> {
        let dim = 2 * self.modes;
        if f.nrows() != dim || f.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "symplectic map is {}x{}, expected {dim}x{dim}",
                f.nrows(),
                f.ncols()
            )));
        }
        let mean = f * &self.mean;
        let cov = f * &self.cov * f.transpose();
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { modes: self.modes, mean, cov })
    }

    pub fn squeeze(&self, mode: usize, params: SqueezeParams) -> Result<Self> {
        self.check_mode(mode)?;
        self.apply_symplectic(&embed_block(self.modes, mode, params.block()))
    }

    pub fn squeeze_inverse(&self, mode: usize, params: SqueezeParams) -> Result<Self> {
        self.check_mode(mode)?;
        self.apply_symplectic(&embed_block(self.modes, mode, params.inverse_block()))
    }

    pub fn displace(&self, mode: usize, alpha: Complex64) -> Result<Self> {
        self.check_mode(mode)?;
        let mut next = self.clone();
        next.mean[mode] += std::f64::consts::SQRT_2 * alpha.re;
        next.mean[mode + self.modes] += std::f64::consts::SQRT_2 * alpha.im;
        Ok(next)
    }

    pub fn rotate(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        self.apply_symplectic(&embed_block(self.modes, mode, rotation_block(phi)))
    }

    pub fn apply_passive(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        check_unitary(u, self.modes)?;
        self.apply_symplectic(&passive_matrix(u))
    }

    fn block(&self, mode: usize) -> ([[f64; 2]; 2], [f64; 2]) {
        let (x, p) = (mode, mode + self.modes);
        (
            [[self.cov[(x, x)], self.cov[(x, p)]], [self.cov[(p, x)], self.cov[(p, p)]]],
            [self.mean[x], self.mean[p]],
        )
    }

    /// `⟨a†a⟩` of one mode.
    pub fn photon_mean(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (s, d) = self.block(mode);
        Ok((s[0][0] + s[1][1] - 1.0) / 2.0 + (d[0] * d[0] + d[1] * d[1]) / 2.0)
    }

    /// `⟨(a†a)²⟩ − ⟨a†a⟩²` of one mode: `(tr σ² − ½)/2 + dᵀσd`.
    pub fn photon_variance(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let (s, d) = self.block(mode);
        let tr_sq = s[0][0] * s[0][0] + s[1][1] * s[1][1] + 2.0 * s[0][1] * s[1][0];
        let quad = d[0] * (s[0][0] * d[0] + s[0][1] * d[1]) + d[1] * (s[1][0] * d[0] + s[1][1] * d[1]);
        Ok((tr_sq - 0.5) / 2.0 + quad)
    }

    /// Mean and variance of the total photon number `Σ_j a_j†a_j`.
    pub fn total_photon_moments(&self) -> (f64, f64) {
        let m = self.modes as f64;
        let mean = (self.cov.trace() - m) / 2.0 + self.mean.norm_squared() / 2.0;
        let tr_sq = (&self.cov * &self.cov).trace();
        let quad = self.mean.dot(&(&self.cov * &self.mean));
        (mean, tr_sq / 2.0 - m / 4.0 + quad)
    }

    /// `⟨a⟩` of one mode.
    pub fn mean_amplitude(&self, mode: usize) -> Result<Complex64> {
        self.check_mode(mode)?;
        let (_, d) = self.block(mode);
        Ok(Complex64::new(d[0], d[1]) / std::f64::consts::SQRT_2)
    }

    /// Mean and variance of `Y = (a − a†)/(2i)`.
    pub fn quadrature_stats(&self, mode: usize) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let (s, d) = self.block(mode);
        Ok((d[1] / std::f64::consts::SQRT_2, s[1][1] / 2.0))
    }

    /// `det(2σ)`, equal to 1 for pure states.
    pub fn purity_determinant(&self) -> f64 {
        (&self.cov * 2.0).determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `σ + (i/2)Ω`; non-negative for physical states.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let omega = symplectic_form(self.modes);
        let h = DMatrix::from_fn(2 * self.modes, 2 * self.modes, |i, j| {
            Complex64::new(self.cov[(i, j)], 0.5 * omega[(i, j)])
        });
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |cov − cov_other|` and `max |mean − mean_other|` combined.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dc = (&self.cov - &other.cov).amax();
        let dm = (&self.mean - &other.mean).amax();
        dc.max(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn sq(r: f64, beta: f64) -> SqueezeParams {
        SqueezeParams::new(r, beta).unwrap()
    }

    #[test]
    fn vacuum_convention() {
        let v = GaussianState::vacuum(1).unwrap();
        assert_eq!(v.mean().as_slice(), &[0.0, 0.0]);
        assert_eq!(v.cov(), &(DMatrix::identity(2, 2) * 0.5));
        let v3 = GaussianState::vacuum(3).unwrap();
        assert_eq!(v3.mean().len(), 6);
        assert_eq!(v3.cov(), &(DMatrix::identity(6, 6) * 0.5));
        let v2 = GaussianState::vacuum(2).unwrap();
        assert_eq!(v2.photon_mean(1).unwrap(), 0.0);
        assert_eq!(v2.photon_variance(0).unwrap(), 0.0);
        assert!(matches!(GaussianState::vacuum(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn squeeze_params_validate() {
        assert!(SqueezeParams::new(-0.1, 0.0).is_err());
        assert!(SqueezeParams::new(f64::NAN, 0.0).is_err());
        assert_abs_diff_eq!(sq(1.0, 3.0 * PI).beta(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(sq(1.0, -PI / 2.0).beta(), 1.5 * PI, epsilon = 1e-12);
    }

    #[test]
    fn squeezed_vacuum_moments() {
        let s = GaussianState::vacuum(1).unwrap().squeeze(0, sq(1.0, 0.0)).unwrap();
        let sh = 1f64.sinh();
        assert_abs_diff_eq!(s.photon_mean(0).unwrap(), sh * sh, epsilon = 1e-12);
        assert_abs_diff_eq!(s.photon_mean(0).unwrap(), 1.381098, epsilon = 1e-6);
        assert_abs_diff_eq!(s.photon_variance(0).unwrap(), 6.577058, epsilon = 1e-6);
        // β = 0 amplifies x and squeezes p.
        let (mean_y, var_y) = s.quadrature_stats(0).unwrap();
        assert_eq!(mean_y, 0.0);
        assert_abs_diff_eq!(var_y, (-2.0f64).exp() / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn squeeze_orientation_beta_pi() {
        // β = π: S†aS = a cosh r − a† sinh r, so x → e^{-r} x and p → e^{r} p.
        let r = 0.7;
        let b = sq(r, PI).block();
        assert_abs_diff_eq!(b[0][0], (-r).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(b[1][1], r.exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(b[0][1], 0.0, epsilon = 1e-14);
        let bog = Bogoliubov::from_block(b);
        assert_abs_diff_eq!(bog.b.re, r.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(bog.a.re, -r.sinh(), epsilon = 1e-14);
        assert_abs_diff_eq!(bog.a.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn squeeze_then_inverse_is_identity() {
        let p = sq(1.0, 0.3);
        let v = GaussianState::vacuum(2).unwrap();
        let back = v.squeeze(1, p).unwrap().squeeze_inverse(1, p).unwrap();
        assert!(back.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn displacement_convention() {
        let v = GaussianState::vacuum(1).unwrap();
        let c = v.displace(0, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.photon_mean(0).unwrap(), 1.0, epsilon = 1e-14);
        let c = v.displace(0, Complex64::new(0.0, 2.0)).unwrap();
        assert_abs_diff_eq!(c.mean()[0], 0.0);
        assert_abs_diff_eq!(c.mean()[1], 2.828427, epsilon = 1e-6);
        let c = v.displace(0, Complex64::new(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.photon_variance(0).unwrap(), 4.0, epsilon = 1e-12);
        let c = v.displace(0, Complex64::new(3.0, 0.0)).unwrap();
        assert_abs_diff_eq!(c.photon_mean(0).unwrap(), 9.0, epsilon = 1e-12);
        let c = v.displace(0, Complex64::new(0.0, 1.0)).unwrap();
        let (my, vy) = c.quadrature_stats(0).unwrap();
        assert_abs_diff_eq!(my, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vy, 0.25, epsilon = 1e-14);
        assert_eq!(v.quadrature_stats(0).unwrap(), (0.0, 0.25));
    }

    #[test]
    fn rotation_convention() {
        let v = GaussianState::vacuum(1).unwrap();
        let c = v.displace(0, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(c.rotate(0, 0.0).unwrap(), c);
        let rot = c.rotate(0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(rot.mean()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rot.mean()[1], 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(rot.mean_amplitude(0).unwrap().im, 1.0, epsilon = 1e-15);
        let s = v.squeeze(0, sq(0.8, 1.1)).unwrap().displace(0, Complex64::new(0.3, -0.4)).unwrap();
        for phi in [0.1, 1.0, 2.5] {
            let n0 = s.photon_mean(0).unwrap();
            assert_abs_diff_eq!(s.rotate(0, phi).unwrap().photon_mean(0).unwrap(), n0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mode_out_of_range() {
        let v = GaussianState::vacuum(2).unwrap();
        assert!(v.squeeze(2, sq(1.0, 0.0)).is_err());
        assert!(v.displace(5, Complex64::new(1.0, 0.0)).is_err());
        assert!(v.rotate(2, 0.1).is_err());
        assert!(v.photon_mean(2).is_err());
        assert!(v.photon_variance(2).is_err());
        assert!(v.quadrature_stats(3).is_err());
    }

    #[test]
    fn passive_balanced_splits_photons() {
        let h = FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        );
        let s = GaussianState::vacuum(2).unwrap().squeeze(0, sq(0.9, PI)).unwrap();
        let n = s.photon_mean(0).unwrap();
        let out = s.apply_passive(&u).unwrap();
        assert_abs_diff_eq!(out.photon_mean(0).unwrap(), n / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.photon_mean(1).unwrap(), n / 2.0, epsilon = 1e-12);
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!(s.apply_passive(&id).unwrap().max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn passive_rejects_non_unitary() {
        let s = GaussianState::vacuum(2).unwrap();
        let u = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        match s.apply_passive(&u) {
            Err(Error::NonUnitary { defect }) => assert!(defect > 0.5),
            other => panic!("expected NonUnitary, got {other:?}"),
        }
        let u3 = DMatrix::<Complex64>::identity(3, 3);
        assert!(matches!(s.apply_passive(&u3), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn symplectic_blocks_preserve_form() {
        let omega = symplectic_form(1);
        for f in [sq(1.3, 0.4).block(), sq(0.2, 5.0).inverse_block(), rotation_block(0.77)] {
            let f = embed_block(1, 0, f);
            let err = (&f * &omega * f.transpose() - &omega).amax();
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn uncertainty_and_purity() {
        let s = GaussianState::vacuum(2)
            .unwrap()
            .squeeze(0, sq(1.0, 0.0))
            .unwrap()
            .rotate(0, 0.3)
            .unwrap();
        assert_abs_diff_eq!(s.purity_determinant(), 1.0, epsilon = 1e-10);
        assert!(s.uncertainty_min_eigenvalue() > -1e-10);
    }

    #[test]
    fn bogoliubov_commutator_of_rotation() {
        let b = Bogoliubov::from_block(rotation_block(0.4));
        assert_abs_diff_eq!(b.commutator(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.a.norm(), 0.0, epsilon = 1e-15);
    }
}

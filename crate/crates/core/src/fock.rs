//! Brute-force simulator in a truncated number basis.
//!
//! Amplitudes live in a dense tensor of `N^M` entries (mode 0 is the most
//! significant index). Each element is applied as `exp(A)` of its
//! anti-Hermitian generator restricted to the truncated space, so the norm is
//! preserved exactly and truncation damage never gets hidden by a
//! renormalization. Instead, the probability sitting in the top two levels of
//! any mode is tracked and compared against a guard.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{BosonicState, Element};
use crate::error::{invalid, Error, Result};
use crate::gaussian::check_unitary;

/// Default bound on [`FockState::truncation_weight`].
pub const DEFAULT_GUARD: f64 = 1e-10;
/// Largest register the oracle accepts.
pub const MAX_MODES: usize = 4;
const MAX_DIMENSION: usize = 1 << 22;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Truncated-basis annihilation operator on one mode.
pub fn annihilation(cutoff: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Principal-branch Hermitian `H` with `e^{iH} = U`.
pub fn unitary_generator(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (q, t) = u.clone().schur().unpack();
    let n = u.nrows();
    let logs = DMatrix::from_fn(n, n, |i, j| if i == j { t[(i, i)].ln() } else { ZERO });
    let h = &q * logs * q.adjoint() * (-I);
    (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    guard: f64,
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_MODES {
            return invalid(format!("Fock oracle supports 1..={MAX_MODES} modes, got {modes}"));
        }
        if cutoff < 3 {
            return invalid(format!("cutoff must be at least 3, got {cutoff}"));
        }
        let dim = cutoff
            .checked_pow(modes as u32)
            .filter(|&d| d <= MAX_DIMENSION)
            .ok_or_else(|| Error::InvalidArgument(format!("cutoff {cutoff}^{modes} exceeds the dense budget")))?;
        let mut amps = vec![ZERO; dim];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { modes, cutoff, guard: DEFAULT_GUARD, amps })
    }

    /// Replaces the truncation guard checked after every element.
    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.modes - 1 - mode) as u32)
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return invalid(format!("mode {mode} out of range for {} modes", self.modes));
        }
        Ok(())
    }

    /// Probability that at least one mode occupies one of its top two levels.
    pub fn truncation_weight(&self) -> f64 {
        let top = self.cutoff - 2;
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| (0..self.modes).any(|m| self.occupation(*idx, m) >= top))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn apply_element(&self, element: &Element) -> Result<Self> {
        let a = annihilation(self.cutoff);
        let ad = a.adjoint();
        let mut next = match element {
            Element::Squeeze { mode, params } | Element::Unsqueeze { mode, params } => {
                self.check_mode(*mode)?;
                let zeta = Complex64::from_polar(params.r(), params.beta());
                let mut gen = (&ad * &ad * zeta - &a * &a * zeta.conj()) * Complex64::new(0.5, 0.0);
                if matches!(element, Element::Unsqueeze { .. }) {
                    gen = -gen;
                }
                self.apply_single_mode(*mode, &gen.exp())
            }
            Element::Displace { mode, alpha } => {
                self.check_mode(*mode)?;
                let gen = &ad * *alpha - &a * alpha.conj();
                self.apply_single_mode(*mode, &gen.exp())
            }
            Element::Rotate { mode, phi } => {
                self.check_mode(*mode)?;
                let mut next = self.clone();
                for (idx, amp) in next.amps.iter_mut().enumerate() {
                    let n = self.occupation(idx, *mode) as f64;
                    *amp *= Complex64::from_polar(1.0, phi * n);
                }
                next
            }
            Element::Passive(u) => {
                check_unitary(u, self.modes)?;
                self.apply_number_conserving(&unitary_generator(u))
            }
        };
        next.guard = self.guard;
        let weight = next.truncation_weight();
        if weight > self.guard {
            return Err(Error::TruncationOverflow { weight, guard: self.guard });
        }
        Ok(next)
    }

    fn apply_single_mode(&self, mode: usize, op: &DMatrix<Complex64>) -> Self {
        let n = self.cutoff;
        let stride = self.stride(mode);
        let outer = self.amps.len() / (n * stride);
        let mut out = self.clone();
        let mut col = vec![ZERO; n];
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for (k, c) in col.iter_mut().enumerate() {
                    *c = self.amps[base + k * stride];
                }
                for row in 0..n {
                    let mut acc = ZERO;
                    for (k, c) in col.iter().enumerate() {
                        acc += op[(row, k)] * c;
                    }
                    out.amps[base + row * stride] = acc;
                }
            }
        }
        out
    }

    /// `v → G v` with `G = Σ_jk H_jk a_j† a_k` in the truncated basis.
    fn number_generator_action(&self, h: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
        let m = self.modes;
        let strides: Vec<usize> = (0..m).map(|k| self.stride(k)).collect();
        let mut out = vec![ZERO; v.len()];
        let mut occ = vec![0usize; m];
        for (idx, &amp) in v.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            for (k, o) in occ.iter_mut().enumerate() {
                *o = (idx / strides[k]) % self.cutoff;
            }
            for k in 0..m {
                if occ[k] == 0 {
                    continue;
                }
                let lowered = idx - strides[k];
                let lower_coef = (occ[k] as f64).sqrt();
                for j in 0..m {
                    let hj = h[(j, k)];
                    if hj == ZERO {
                        continue;
                    }
                    let nj = if j == k { occ[j] - 1 } else { occ[j] };
                    if nj + 1 >= self.cutoff {
                        continue;
                    }
                    let coef = lower_coef * ((nj + 1) as f64).sqrt();
                    out[lowered + strides[j]] += hj * amp * coef;
                }
            }
        }
        out
    }

    /// `exp(iG)` applied by a scaled Taylor series; `G` is too large to exponentiate densely.
    fn apply_number_conserving(&self, h: &DMatrix<Complex64>) -> Self {
        let bound = h.iter().map(|z| z.norm()).sum::<f64>() * (self.cutoff - 1) as f64;
        let steps = bound.ceil().max(1.0) as usize;
        let scale = I / steps as f64;
        let mut v = self.amps.clone();
        for _ in 0..steps {
            let mut acc = v.clone();
            let mut term = v;
            for k in 1..=200 {
                let g = self.number_generator_action(h, &term);
                let factor = scale / k as f64;
                term = g.into_iter().map(|z| z * factor).collect();
                let mut tn = 0.0;
                let mut an = 0.0;
                for (a, t) in acc.iter_mut().zip(&term) {
                    *a += t;
                    tn += t.norm_sqr();
                    an += a.norm_sqr();
                }
                if tn <= 1e-34 * an {
                    break;
                }
            }
            v = acc;
        }
        Self { modes: self.modes, cutoff: self.cutoff, guard: self.guard, amps: v }
    }

    /// `(⟨n⟩, Var n)` of one mode.
    pub fn photon_moments(&self, mode: usize) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let (mut m1, mut m2) = (0.0, 0.0);
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            let n = self.occupation(idx, mode) as f64;
            m1 += p * n;
            m2 += p * n * n;
        }
        Ok((m1, m2 - m1 * m1))
    }

    /// `⟨ψ|a^k|ψ⟩` for one mode.
    fn lowering_expectation(&self, mode: usize, power: usize) -> Complex64 {
        let stride = self.stride(mode);
        let mut acc = ZERO;
        for (idx, a) in self.amps.iter().enumerate() {
            let n = self.occupation(idx, mode);
            if n < power {
                continue;
            }
            let coef: f64 = (0..power).map(|q| ((n - q) as f64).sqrt()).product();
            acc += self.amps[idx - power * stride].conj() * a * coef;
        }
        acc
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::InvalidArgument(format!(
                "overlap of {}-mode/cutoff {} with {}-mode/cutoff {}",
                self.modes, self.cutoff, other.modes, other.cutoff
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

impl BosonicState for FockState {
    fn mode_count(&self) -> usize {
        self.modes
    }

    fn apply(&self, element: &Element) -> Result<Self> {
        self.apply_element(element)
    }

    fn photon_moments(&self, mode: usize) -> Result<(f64, f64)> {
        FockState::photon_moments(self, mode)
    }

    fn total_photon_moments(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            let n: usize = (0..self.modes).map(|m| self.occupation(idx, m)).sum();
            m1 += p * n as f64;
            m2 += p * (n * n) as f64;
        }
        (m1, m2 - m1 * m1)
    }

    fn mean_amplitude(&self, mode: usize) -> Result<Complex64> {
        self.check_mode(mode)?;
        Ok(self.lowering_expectation(mode, 1))
    }

    fn quadrature_stats(&self, mode: usize) -> Result<(f64, f64)> {
        let (n, _) = self.photon_moments(mode)?;
        let a1 = self.lowering_expectation(mode, 1);
        let a2 = self.lowering_expectation(mode, 2);
        let second = -(2.0 * a2.re - 2.0 * n - 1.0) / 4.0;
        Ok((a1.im, second - a1.im * a1.im))
    }
}

/// Central-difference quantum Fisher information of a pure-state family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiEstimate {
    /// Richardson-refined value.
    pub value: f64,
    /// Estimate with step `h`.
    pub coarse: f64,
    /// Estimate with step `h/2`.
    pub fine: f64,
    /// `|fine − coarse| / |fine|`.
    pub relative_change: f64,
    /// `false` when halving `h` moved the estimate by more than 10%.
    pub converged: bool,
}

/// `F_Q = 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²)` with `|∂ψ⟩` from a central difference.
pub fn qfi_numeric<F>(family: F, eta0: f64, h: f64) -> Result<QfiEstimate>
where
    F: Fn(f64) -> Result<FockState>,
{
    if !h.is_finite() || h <= 0.0 {
        return invalid(format!("finite-difference step must be positive, got {h}"));
    }
    let psi = family(eta0)?;
    let at_step = |step: f64| -> Result<f64> {
        let plus = family(eta0 + step)?;
        let minus = family(eta0 - step)?;
        if plus.amps.len() != psi.amps.len() || minus.amps.len() != psi.amps.len() {
            return Err(Error::DimensionMismatch("family changed shape".into()));
        }
        let d: Vec<Complex64> =
            plus.amps.iter().zip(&minus.amps).map(|(p, m)| (p - m) / (2.0 * step)).collect();
        let dd: f64 = d.iter().map(|z| z.norm_sqr()).sum();
        let pd: Complex64 = psi.amps.iter().zip(&d).map(|(a, b)| a.conj() * b).sum();
        Ok(4.0 * (dd - pd.norm_sqr()))
    };
    let coarse = at_step(h)?;
    let fine = at_step(h / 2.0)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let relative_change = if fine.abs() > 0.0 {
        (fine - coarse).abs() / fine.abs()
    } else {
        (fine - coarse).abs()
    };
    Ok(QfiEstimate { value, coarse, fine, relative_change, converged: relative_change <= 0.1 })
}

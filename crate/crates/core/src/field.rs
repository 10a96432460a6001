//! Periodic grid fields with cached Fourier coefficients.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Samples of a real periodic function on the uniform grid
/// `x_j = -L/2 + j L/n`, with the unnormalized DFT cached alongside.
///
/// Both representations are lazily synchronized: whichever one an operation
/// produces is stored, and the other is computed on first access. A field is
/// immutable after construction; operators return new fields.
#[derive(Clone)]
pub struct SpectralField {
    n: usize,
    domain_length: f64,
    values: OnceLock<Vec<f64>>,
    modes: OnceLock<Vec<Complex64>>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("n", &self.n)
            .field("domain_length", &self.domain_length)
            .field("values_cached", &self.values.get().is_some())
            .field("modes_cached", &self.modes.get().is_some())
            .finish()
    }
}

fn validate_grid(n: usize, domain_length: f64) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::param(
            "n",
            n as f64,
            "grid size must be a power of two and at least 8",
        ));
    }
    if !(domain_length > 0.0) || !domain_length.is_finite() {
        return Err(Error::param(
            "domain_length",
            domain_length,
            "must be positive and finite",
        ));
    }
    Ok(())
}

impl SpectralField {
    pub fn from_values(domain_length: f64, values: Vec<f64>) -> Result<Self> {
        validate_grid(values.len(), domain_length)?;
        let cell = OnceLock::new();
        let n = values.len();
        cell.set(values).ok();
        Ok(SpectralField {
            n,
            domain_length,
            values: cell,
            modes: OnceLock::new(),
        })
    }

    /// Build from DFT coefficients. The coefficients must be the transform
    /// of a real signal: `V_{n-m} = conj(V_m)` and real entries at m = 0 and
    /// m = n/2, checked to 1e-12 relative to the largest magnitude.
    pub fn from_modes(domain_length: f64, modes: Vec<Complex64>) -> Result<Self> {
        validate_grid(modes.len(), domain_length)?;
        let n = modes.len();
        let scale = modes.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        let mut worst = 0.0f64;
        for m in 1..n {
            let d = (modes[m] - modes[n - m].conj()).norm();
            worst = worst.max(d);
        }
        worst = worst.max(modes[0].im.abs()).max(modes[n / 2].im.abs());
        if worst > 1e-12 * scale {
            return Err(Error::Contract(format!(
                "modes violate conjugate symmetry by {worst:.3e} (scale {scale:.3e})"
            )));
        }
        Ok(Self::from_modes_unchecked(domain_length, modes))
    }

    pub(crate) fn from_modes_unchecked(domain_length: f64, modes: Vec<Complex64>) -> Self {
        let n = modes.len();
        let cell = OnceLock::new();
        cell.set(modes).ok();
        SpectralField {
            n,
            domain_length,
            values: OnceLock::new(),
            modes: cell,
        }
    }

    pub fn zeros(n: usize, domain_length: f64) -> Result<Self> {
        Self::from_values(domain_length, vec![0.0; n])
    }

    /// Sample a function on the grid.
    pub fn from_fn(n: usize, domain_length: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        validate_grid(n, domain_length)?;
        let dx = domain_length / n as f64;
        let x0 = -domain_length / 2.0;
        Ok(Self::from_values(
            domain_length,
            (0..n).map(|j| f(x0 + j as f64 * dx)).collect(),
        )?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / self.n as f64
    }

    /// Grid node `x_j = -L/2 + j L/n`.
    pub fn x(&self, j: usize) -> f64 {
        -self.domain_length / 2.0 + j as f64 * self.dx()
    }

    /// Signed wavenumber index for DFT bin m (m = n/2 maps to +n/2).
    pub fn signed_index(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Angular frequency `xi_m = 2 pi k / L` of DFT bin m.
    pub fn frequency(&self, m: usize) -> f64 {
        2.0 * PI * self.signed_index(m) as f64 / self.domain_length
    }

    pub fn values(&self) -> &[f64] {
        self.values
            .get_or_init(|| fft::idft_real(self.modes.get().expect("field has no representation")))
    }

    pub fn modes(&self) -> &[Complex64] {
        self.modes
            .get_or_init(|| fft::dft_real(self.values.get().expect("field has no representation")))
    }

    /// New field with DFT bin m mapped through `f(m, xi_m, V_m)`.
    pub fn map_modes(&self, f: impl Fn(usize, f64, Complex64) -> Complex64) -> Self {
        let mapped = self
            .modes()
            .iter()
            .enumerate()
            .map(|(m, &v)| f(m, self.frequency(m), v))
            .collect();
        Self::from_modes_unchecked(self.domain_length, mapped)
    }

    /// Spectral derivative (Nyquist bin zeroed, the symmetric convention).
    pub fn derivative(&self) -> Self {
        let nyq = self.n / 2;
        self.map_modes(|m, xi, v| {
            if m == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, xi) * v
            }
        })
    }

    /// Trigonometric interpolation at an arbitrary point (periodic in L).
    pub fn evaluate_at(&self, x: f64) -> f64 {
        let modes = self.modes();
        let u = x + self.domain_length / 2.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &v) in modes.iter().enumerate() {
            let phase = self.frequency(m) * u;
            acc += v * Complex64::new(phase.cos(), phase.sin());
        }
        acc.re / self.n as f64
    }

    /// `||theta||_{L^2}` over one period, computed from modes (Parseval).
    pub fn l2_norm(&self) -> f64 {
        let n2 = (self.n * self.n) as f64;
        let sum: f64 = self.modes().iter().map(|c| c.norm_sqr()).sum();
        (self.domain_length * sum / n2).sqrt()
    }

    /// Homogeneous Sobolev seminorm `||theta||_{H^sigma}` (zero mode dropped).
    pub fn sobolev_seminorm(&self, sigma: f64) -> f64 {
        let n2 = (self.n * self.n) as f64;
        let sum: f64 = self
            .modes()
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let xi = self.frequency(m).abs();
                if xi == 0.0 {
                    0.0
                } else {
                    xi.powf(2.0 * sigma) * c.norm_sqr()
                }
            })
            .sum();
        (self.domain_length * sum / n2).sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.modes()[0].re / self.n as f64
    }

    pub fn has_non_finite(&self) -> bool {
        self.values().iter().any(|v| !v.is_finite())
    }

    /// Largest magnitude within the outermost 1% of cells on each edge;
    /// the torus-surrogate contamination monitor.
    pub fn edge_magnitude(&self) -> f64 {
        let values = self.values();
        let band = (self.n / 100).max(1);
        let mut worst = 0.0f64;
        for j in 0..band {
            worst = worst.max(values[j].abs());
            worst = worst.max(values[self.n - 1 - j].abs());
        }
        worst
    }

    /// Band-limited upsampling onto `factor * n` points (zero padding in
    /// Fourier space, Nyquist bin split symmetrically). Exact on the trig
    /// interpolant.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 1 {
            return Ok(self.clone());
        }
        if !factor.is_power_of_two() {
            return Err(Error::param(
                "factor",
                factor as f64,
                "refinement factor must be a power of two",
            ));
        }
        let n = self.n;
        let nn = n * factor;
        let modes = self.modes();
        let scale = factor as f64;
        let mut big = vec![Complex64::new(0.0, 0.0); nn];
        for m in 0..n / 2 {
            big[m] = modes[m] * scale;
        }
        for m in n / 2 + 1..n {
            big[nn - (n - m)] = modes[m] * scale;
        }
        let nyq = modes[n / 2] * (scale / 2.0);
        big[n / 2] = nyq;
        big[nn - n / 2] = nyq.conj();
        Ok(Self::from_modes_unchecked(self.domain_length, big))
    }

    /// Relative round-trip defect between the two cached representations,
    /// or None when only one is materialized.
    pub fn roundtrip_defect(&self) -> Option<f64> {
        let values = self.values.get()?;
        let modes = self.modes.get()?;
        let back = fft::idft_real(modes);
        let scale = values.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
        let worst = values
            .iter()
            .zip(&back)
            .fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        Some(worst / scale)
    }
}

//! Fourier form of the tangent condition on the circle.
//!
//! For a positive measure `μ` on `[0, 2π)` the Toeplitz matrix
//! `T₀[m, n] = a_{m-n}`, `a_n = ∫ e^{-inθ} dμ`, is positive semidefinite. A
//! derivative `η` with coefficients `a'_n = ⟨η, e^{-inθ}⟩` is tangent at `μ`
//! when `T₁[m, n] = a'_{m-n}` is positive semidefinite on `ker T₀`.
//!
//! Every check here is truncated at a maximal frequency `N`: a violation at
//! some `N` is conclusive, while passing at `N` is evidence only.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::distributions::{DensityPiece, RadonMeasure, StructuredDistribution};
use crate::error::{Error, Result};
use crate::numerics::{simpson, DEFAULT_PANELS};

/// Relative spectral threshold for positivity and kernel detection.
pub const SPECTRAL_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;

/// Coefficients `a_n` for `|n| <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    max_frequency: usize,
    /// `a_{-N}, …, a_N`.
    coeffs: Vec<Complex64>,
}

impl FourierData {
    pub fn new(max_frequency: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * max_frequency + 1 {
            return Err(Error::Domain(format!(
                "{} coefficients given for maximal frequency {max_frequency}",
                coeffs.len()
            )));
        }
        Ok(Self { max_frequency, coeffs })
    }

    pub fn from_fn<F: FnMut(i64) -> Complex64>(max_frequency: usize, mut f: F) -> Self {
        let n = max_frequency as i64;
        Self { max_frequency, coeffs: (-n..=n).map(&mut f).collect() }
    }

    pub fn max_frequency(&self) -> usize {
        self.max_frequency
    }

    /// `a_n`; panics for `|n| > N`.
    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.max_frequency as i64) as usize]
    }

    /// Coefficients up to a lower maximal frequency.
    pub fn truncate(&self, max_frequency: usize) -> Result<Self> {
        if max_frequency > self.max_frequency {
            return Err(Error::Domain(format!("cannot extend frequency {} to {max_frequency}", self.max_frequency)));
        }
        Ok(Self::from_fn(max_frequency, |n| self.get(n)))
    }

    /// `a_{-n} = conj(a_n)` up to `1e-12` relative to `max |a_n|`.
    pub fn is_hermitian(&self) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let n = self.max_frequency as i64;
        (0..=n).all(|k| (self.get(-k) - self.get(k).conj()).norm() <= HERMITIAN_TOL * scale)
    }

    /// `T[m, n] = a_{m-n}`, `0 <= m, n <= N`.
    pub fn toeplitz(&self) -> DMatrix<Complex64> {
        let d = self.max_frequency + 1;
        DMatrix::from_fn(d, d, |m, n| self.get(m as i64 - n as i64))
    }
}

/// `⟨η, e^{-inθ}⟩` for `|n| <= N`, with `∂^k δ_{θ₀} ↦ (in)^k e^{-inθ₀}` and
/// densities on `[0, 2π]` integrated by quadrature.
pub fn fourier_coefficients(eta: &StructuredDistribution, max_frequency: usize) -> FourierData {
    FourierData::from_fn(max_frequency, |n| {
        let nf = n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in eta.atoms() {
            let phase = Complex64::from_polar(1.0, -nf * a.location);
            acc += a.coeff * Complex64::new(0.0, nf).powu(a.order as u32) * phase;
        }
        for d in eta.density() {
            let (lo, hi) = d.interval();
            let re = simpson(|x| d.value(x) * (nf * x).cos(), lo, hi, DEFAULT_PANELS);
            let im = -simpson(|x| d.value(x) * (nf * x).sin(), lo, hi, DEFAULT_PANELS);
            acc += Complex64::new(re, im);
        }
        acc
    })
}

pub fn measure_fourier_coefficients(mu: &RadonMeasure, max_frequency: usize) -> Result<FourierData> {
    Ok(fourier_coefficients(&mu.as_distribution()?, max_frequency))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Spectral norm of the matrix.
    pub norm: f64,
}

fn hermitian_eigen(m: DMatrix<Complex64>) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    SymmetricEigen::new(m)
}

fn psd_of(m: DMatrix<Complex64>) -> PsdReport {
    if m.nrows() == 0 {
        return PsdReport { is_psd: true, min_eigenvalue: 0.0, norm: 0.0 };
    }
    let eig = hermitian_eigen(m);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let norm = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    PsdReport { is_psd: min >= -SPECTRAL_TOL * norm, min_eigenvalue: min, norm }
}

/// Positive semidefiniteness of the `(N+1) × (N+1)` Toeplitz matrix.
pub fn toeplitz_psd(data: &FourierData) -> Result<PsdReport> {
    if !data.is_hermitian() {
        return Err(Error::Domain("Fourier data are not Hermitian".into()));
    }
    Ok(psd_of(data.toeplitz()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentReport {
    pub max_frequency: usize,
    pub satisfied: bool,
    pub kernel_dim: usize,
    /// Smallest eigenvalue of `Qᴴ T₁ Q` (0 for a trivial kernel).
    pub min_projected_eigenvalue: f64,
    /// Spectral norm of `Qᴴ T₁ Q`.
    pub projected_norm: f64,
}

/// PSD test of `T₁` restricted to `ker T₀`.
pub fn tangent_condition(a0: &FourierData, a1: &FourierData) -> Result<TangentReport> {
    if a0.max_frequency() != a1.max_frequency() {
        return Err(Error::Domain("coefficient sets have different maximal frequencies".into()));
    }
    if !a1.is_hermitian() {
        return Err(Error::Domain("derivative Fourier data are not Hermitian".into()));
    }
    let t0 = toeplitz_psd(a0)?;
    if !t0.is_psd {
        return Err(Error::Precondition(format!(
            "Toeplitz matrix of the base measure is not PSD (min eigenvalue {:e})",
            t0.min_eigenvalue
        )));
    }
    let eig = hermitian_eigen(a0.toeplitz());
    let kernel: Vec<usize> =
        (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] <= SPECTRAL_TOL * t0.norm).collect();
    let n = a0.max_frequency();
    if kernel.is_empty() {
        return Ok(TangentReport {
            max_frequency: n,
            satisfied: true,
            kernel_dim: 0,
            min_projected_eigenvalue: 0.0,
            projected_norm: 0.0,
        });
    }
    let q = DMatrix::from_fn(n + 1, kernel.len(), |r, c| eig.eigenvectors[(r, kernel[c])]);
    let t1 = a1.toeplitz();
    let t1_norm = psd_of(t1.clone()).norm;
    let projected = q.adjoint() * t1 * &q;
    // symmetrize against rounding before the eigensolve
    let projected = (&projected + projected.adjoint()) * Complex64::new(0.5, 0.0);
    let report = psd_of(projected);
    Ok(TangentReport {
        max_frequency: n,
        satisfied: report.min_eigenvalue >= -SPECTRAL_TOL * t1_norm,
        kernel_dim: kernel.len(),
        min_projected_eigenvalue: report.min_eigenvalue,
        projected_norm: report.norm,
    })
}

/// [`tangent_condition`] for every maximal frequency `0..=max_frequency`.
pub fn tangent_condition_scan(a0: &FourierData, a1: &FourierData, max_frequency: usize) -> Result<Vec<TangentReport>> {
    (0..=max_frequency)
        .into_par_iter()
        .map(|n| tangent_condition(&a0.truncate(n)?, &a1.truncate(n)?))
        .collect()
}

/// `dθ / 2π` on `[0, 2π]`.
pub fn uniform_circle_measure() -> RadonMeasure {
    RadonMeasure::new(vec![], vec![DensityPiece::uniform(0.0, std::f64::consts::TAU, 1.0).expect("nonempty interval")])
        .expect("positive density")
}

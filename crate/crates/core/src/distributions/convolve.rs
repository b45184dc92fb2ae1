use rayon::prelude::*;

use super::distribution::{DensityPiece, StructuredDistribution};
use crate::error::Result;
use crate::numerics::{simpson, GridFunction, GridSpec, ScaledMollifier};

/// Panels used for the local convolution integral of sampled densities.
const WINDOW_PANELS: usize = 512;
/// Default grid resolution: nodes per mollifier support half-width.
const NODES_PER_HALF_WIDTH: f64 = 200.0;

/// `ψ_ε * η` as a pointwise-evaluable function, together with its primitive.
///
/// Atoms use `ψ_ε * ∂^k δ_p = ψ_ε^(k)(· - p)`; boxes use the exact primitive
/// of `ψ_ε`; sampled densities are convolved by quadrature.
#[derive(Debug, Clone)]
pub struct Mollified<'a> {
    psi: &'a ScaledMollifier,
    eta: &'a StructuredDistribution,
    /// Cumulative integrals of the sampled density pieces, aligned with `eta.density()`.
    cumulative: Vec<Option<GridFunction>>,
}

impl<'a> Mollified<'a> {
    pub fn new(psi: &'a ScaledMollifier, eta: &'a StructuredDistribution) -> Result<Self> {
        psi.derivative(0.0, eta.order())?;
        let cumulative = eta
            .density()
            .iter()
            .map(|d| match d {
                DensityPiece::Grid(g) => Some(g.cumulative_integral()),
                DensityPiece::Box { .. } => None,
            })
            .collect();
        Ok(Self { psi, eta, cumulative })
    }

    pub fn value(&self, x: f64) -> f64 {
        let psi = self.psi;
        let mut acc = 0.0;
        for a in self.eta.atoms() {
            acc += a.coeff * psi.derivative(x - a.location, a.order).expect("order checked at construction");
        }
        let r = psi.support_half_width();
        for d in self.eta.density() {
            acc += match d {
                DensityPiece::Box { lo, hi, height } => height * (psi.primitive(x - lo) - psi.primitive(x - hi)),
                DensityPiece::Grid(g) => {
                    let a = (x - r).max(g.x_lo());
                    let b = (x + r).min(g.x_hi());
                    if b <= a {
                        0.0
                    } else {
                        simpson(|y| g.interpolate(y) * psi.eval(x - y), a, b, WINDOW_PANELS)
                    }
                }
            };
        }
        acc
    }

    /// `∫_{-∞}^x (ψ_ε * η)`.
    pub fn primitive(&self, x: f64) -> f64 {
        let psi = self.psi;
        let mut acc = 0.0;
        for a in self.eta.atoms() {
            acc += a.coeff
                * if a.order == 0 {
                    psi.primitive(x - a.location)
                } else {
                    psi.derivative(x - a.location, a.order - 1).expect("order checked at construction")
                };
        }
        let r = psi.support_half_width();
        for (d, cum) in self.eta.density().iter().zip(&self.cumulative) {
            acc += match (d, cum) {
                (DensityPiece::Box { lo, hi, height }, _) => {
                    height * (psi.second_primitive(x - lo) - psi.second_primitive(x - hi))
                }
                (DensityPiece::Grid(g), Some(cum)) => {
                    // Ψ_ε(x - y) = 1 for y <= x - εs
                    let cut = x - r;
                    let below = if cut <= g.x_lo() {
                        0.0
                    } else if cut >= g.x_hi() {
                        cum.values()[cum.len() - 1]
                    } else {
                        cum.interpolate(cut)
                    };
                    let a = cut.max(g.x_lo());
                    let b = (x + r).min(g.x_hi());
                    let window = if b <= a {
                        0.0
                    } else {
                        simpson(|y| g.interpolate(y) * psi.primitive(x - y), a, b, WINDOW_PANELS)
                    };
                    below + window
                }
                (DensityPiece::Grid(_), None) => unreachable!("cumulative integral prepared for every grid piece"),
            };
        }
        acc
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridFunction> {
        let values: Vec<f64> = (0..spec.n).into_par_iter().map(|i| self.value(spec.x(i))).collect();
        GridFunction::new(spec.x_lo, spec.x_hi, values)
    }

    pub fn sample_primitive(&self, spec: &GridSpec) -> Result<GridFunction> {
        let values: Vec<f64> = (0..spec.n).into_par_iter().map(|i| self.primitive(spec.x(i))).collect();
        GridFunction::new(spec.x_lo, spec.x_hi, values)
    }
}

/// Grid covering `supp η ⊕ [-εs, εs]` with a margin of one support
/// half-width, spacing `εs / 200`.
pub fn default_grid(psi: &ScaledMollifier, eta: &StructuredDistribution) -> Result<GridSpec> {
    let r = psi.support_half_width();
    let (lo, hi) = eta.support().hull().unwrap_or((0.0, 0.0));
    GridSpec::with_spacing(lo - 2.0 * r, hi + 2.0 * r, r / NODES_PER_HALF_WIDTH)
}

/// `ψ_ε * η` sampled on [`default_grid`].
pub fn convolve_mollifier(psi: &ScaledMollifier, eta: &StructuredDistribution) -> Result<GridFunction> {
    convolve_mollifier_on(psi, eta, &default_grid(psi, eta)?)
}

pub fn convolve_mollifier_on(
    psi: &ScaledMollifier,
    eta: &StructuredDistribution,
    spec: &GridSpec,
) -> Result<GridFunction> {
    Mollified::new(psi, eta)?.sample(spec)
}

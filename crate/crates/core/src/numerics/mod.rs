//! Numeric substrate: smooth test functions, quadrature, uniform grids, the
//! plateau mollifier with exact derivatives, seminorms and one-sided
//! Richardson extrapolation.

mod bump;
mod grid;
mod mollifier;
pub mod quadrature;
mod richardson;
mod seminorm;
mod smooth;

pub use bump::ClassicBump;
pub use grid::{GridFunction, GridSpec, MIN_GRID_POINTS};
pub use mollifier::{Mollifier, ScaledMollifier, DEFAULT_MAX_ORDER};
pub use quadrature::{simpson, DEFAULT_PANELS};
pub use richardson::{richardson_one_sided, ErrorPowers, Extrapolation, RichardsonOptions, Side};
pub use seminorm::{seminorm, SEMINORM_POINTS};
pub use smooth::{binomial, Dilated, Polynomial, Product, SharedFn, SmoothFn, Sum, Trig};

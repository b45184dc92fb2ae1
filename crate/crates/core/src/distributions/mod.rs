//! Finite-order distributions, positive measures and their supports on the
//! line, with pairing against smooth functions and mollifier convolution.

mod convolve;
mod distribution;
mod measure;
mod support;
pub mod text;

pub use convolve::{convolve_mollifier, convolve_mollifier_on, default_grid, Mollified};
pub use distribution::{Atom, DensityPiece, StructuredDistribution};
pub use measure::RadonMeasure;
pub use support::{PointClass, SupportSet};
pub use text::{Domain, SpecDocument, SpecKind};

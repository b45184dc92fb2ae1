//! Weak derivatives of families of positive measures.
//!
//! The crate answers four related questions on the real line (and the
//! circle):
//!
//! * which finite-order distributions `η` can be the one-sided (or
//!   two-sided) derivative `d/dt ∫φ dμ_t |_{t=0}` of a family of positive
//!   measures starting at `μ` ([`admissibility`]);
//! * explicit deforming families realizing such derivatives, and a numerical
//!   weak-derivative verifier ([`families`]);
//! * the Toeplitz / Fourier form of the tangent condition on the circle
//!   ([`caratheodory`]);
//! * mollified velocity representatives solving the smoothed continuity
//!   equation, with moderateness exponents ([`transport`]).
//!
//! [`cone`] is a finite-dimensional companion: tangent cones of polytopes
//! and balls, and the polygonal curve construction leaving a point in a
//! prescribed direction.

// `!(x > 0.0)` style guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod caratheodory;
pub mod cone;
pub mod distributions;
pub mod error;
pub mod families;
pub mod numerics;
pub mod transport;

pub use admissibility::{Mode, TestFunctionSpec, Verdict};
pub use distributions::{Atom, DensityPiece, RadonMeasure, StructuredDistribution, SupportSet};
pub use error::{Error, Result};
pub use numerics::{GridFunction, Mollifier, ScaledMollifier, SmoothFn};

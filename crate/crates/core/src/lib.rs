//! Complex geodesics of convex tube domains `Ω + iℝⁿ`.
//!
//! Geodesics are described through boundary measures on the circle and the
//! quadratic certificates that witness them. The core types are generic over
//! the scalar (see [`scalar::Real`]); the aliases below fix it to `f64`.

// `!(x < y)` is how NaN gets rejected; index loops mirror the coordinate formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circle;
pub mod domain;
pub mod error;
pub mod geodesic;
pub mod hfun;
pub mod measure;
pub mod quad;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use circle::{Arc, ArcSet};
pub use domain::{StaircaseDomain, TubeDomain};
pub use error::{Error, Result};
pub use geodesic::{DiscMap, Geodesic};
pub use scalar::{Dual, Real};
pub use solver::{solve_two_point, SolveProblem, SolveSolution};
pub use verify::{Status, VerificationReport};

pub type C64 = num_complex::Complex<f64>;
pub type QuadTerm = hfun::QuadTerm<f64>;
pub type QuadCertificate = hfun::QuadCertificate<f64>;
pub type CircleMeasure = measure::CircleMeasure<f64>;
pub type GeodesicSpec = geodesic::GeodesicSpec<f64>;

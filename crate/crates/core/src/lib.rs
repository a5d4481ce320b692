//! Exact enumeration and asymptotic laws for the height of non-plane
//! unlabelled rooted binary trees and the diameter of their unrooted
//! ternary counterparts.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: truncated power series over big integers, with the
//!   multiset operators `MSet2` and `MSet3`.
//! - [`trees`]: exact counts by size and height or diameter, and exact
//!   distributions built from them.
//! - [`constants`]: the radius of convergence `rho` and the singular
//!   constant `lambda`, with certified error bounds.
//! - [`limit_laws`]: theta-type limit distributions, densities and moments.
//! - [`deviations`]: the large-deviation rate function from its saddle
//!   point system.
//! - [`approx`]: real-axis checks of the main approximations for `e_h` and
//!   `u_d`.

pub mod approx;
pub mod constants;
pub mod deviations;
pub mod error;
pub mod limit_laws;
pub mod numeric;
pub mod series;
pub mod trees;

pub use constants::VerifiedConstant;
pub use deviations::RatePoint;
pub use error::{Error, Result};
pub use limit_laws::ThetaEvalPolicy;
pub use series::TruncatedIntSeries;
pub use trees::{DiameterTable, ExactPmf, HeightLadder};

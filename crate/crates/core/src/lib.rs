//! Random walks in heavy-tailed random scenery and the random conductance
//! model on layered fields: exponent formulas, simulation, chemical
//! distances and Monte Carlo verification.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::too_many_arguments)]

pub mod chemdist;
pub mod calibration;
pub mod ctrw;
pub mod error;
pub mod exponents;
pub mod functional;
pub mod lattice;
pub mod montecarlo;
pub mod output;
pub mod rng;
pub mod scenery;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::Site;
pub use scenery::{Scenery, SceneryField, SceneryLaw};

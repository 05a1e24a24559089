//! A verifiable computational kernel for finite truncated simplicial sets.
//!
//! The crate builds Delta-sets, nerves, Milnor and Segal classifying spaces,
//! Eilenberg-MacLane models, Postnikov quotients and bundles with
//! Eilenberg-MacLane fibers, and validates their structural laws by
//! exhaustive checks at small caps. Bounded-cohomology semi-norms are
//! computed exactly by rational linear programming.

pub mod error;
pub mod monotone;
pub mod sset;
pub mod smap;
pub mod generate;
pub mod groups;
pub mod category;
pub mod gamma;
pub mod builders;
pub mod cochain;
pub mod em;
pub mod kan;
pub mod postnikov;
pub mod unravel;
pub mod zlin;
pub mod bundle;
pub mod lp;

pub use error::{Error, Result};
pub use monotone::MonotoneMap;
pub use sset::{FiniteDeltaSet, FiniteSimplicialSet, SimplexRef};
pub use smap::{DeltaMap, SimplicialMap};

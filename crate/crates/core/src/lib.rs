//! Exact connectivity analysis of self-affine sponges and fractal cubes.
//!
//! The crate builds the stage-`k` box approximations of a sponge attractor,
//! counts delta-connected components with certified lower/upper brackets,
//! extracts gap sequences and island structure, and classifies specs
//! against the maximal-power-law and perfect-disconnectedness criteria with
//! machine-checkable certificates.
//!
//! All geometric decisions are made in exact integer or rational
//! arithmetic; floating point appears only in reports. The coordinate
//! scalar is generic ([`num::GridInt`]): [`Coord`] (`i128`) fails loudly on
//! overflow, [`BigCoord`] never overflows.

pub mod classify;
pub mod components;
pub mod deciders;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod model;
pub mod num;
pub mod report;

pub use error::{Error, Result};
pub use model::{DimensionValue, Kind, SpongeSpec};

/// Default exact scalar: fast fixed-width integers, loud on overflow.
pub type Coord = i128;
/// Arbitrary-precision scalar for runs that overflow [`Coord`].
pub type BigCoord = num_bigint::BigInt;

pub type Box128 = geometry::ExactBox<Coord>;
pub type BoxBig = geometry::ExactBox<BigCoord>;
pub type Frac128 = num::Frac<Coord>;
pub type FracBig = num::Frac<BigCoord>;

/// Default enumeration budget (boxes) shared by library callers and the CLI.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

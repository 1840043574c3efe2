//! UAV-to-vehicle path loss in built-up areas.
//!
//! The channel between a UAV flying along a street centerline and a vehicle on
//! the same street is modelled as a coherent sum of the direct ray, the ground
//! bounce and up to two first-order wall reflections. Building geometry comes
//! from the ITU-R P.1410 statistical description (α, β, γ) mapped onto a
//! regular Manhattan grid, and each facade either produces a wall reflection or
//! not depending on whether the specular point lands on a wall below the roof
//! edge.
//!
//! Modules:
//! - [`scenario`]: ITU-R parameters, grid derivation, Rayleigh building heights.
//! - [`geometry`]: path lengths, critical altitude, facade hit test.
//! - [`pathloss`]: the coherent path-loss formula and sweeps.
//! - [`oracle`]: independent image-method/Fermat verification on explicit 3D panels.
//! - [`stats`]: empirical CDFs, normal fits, sweep summaries.
//! - [`cli`]: configuration, commands, CSV output.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod pathloss;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{analyze_link, LinkGeometry, MultipathBreakdown, Side, SideProfile};
pub use pathloss::{path_loss_bu, PathLossSample, RadioConfig, SweepRange};
pub use scenario::{
    BuildingHeights, BuiltUpParams, ConstantHeights, GridLayout, HeightTable, RayleighHeights,
    ScenarioPreset,
};
pub use stats::{NormalFit, SweepSummary};

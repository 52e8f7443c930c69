//! Outer length billiards: simulation and verification tools.
//!
//! Around a strictly convex planar table, an exterior point sees two tangent
//! lines. The outer length billiard map slides the point along one of them to
//! the apex formed with the tangent line of a circle inscribed in the fan, which
//! works out to a circle-free characterization via the table's support function.
//! This crate implements the map, its degenerate limits (segments, Poncelet
//! pencils, outer area billiards), the far-field asymptotics with their normal
//! forms, circumscribed-circle center dynamics, and periodic orbit search, plus
//! a command line front end for orbits, sweeps, and verification reports.

pub mod asymptotics;
pub mod centers;
pub mod cli;
pub mod degenerate;
pub mod error;
pub mod geom;
pub mod map;
pub mod oval;
pub mod periodic;
pub mod report;
pub mod svg;
pub mod tablespec;
pub mod verify;
pub mod solve;

pub use error::{Error, Result};
pub use geom::Vec2;
pub use oval::{CurvePoint, DualMode, Oval, OvalKind, RadialCurve, TangentFan};

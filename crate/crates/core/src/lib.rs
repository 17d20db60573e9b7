//! Spherical reflection of free boundary minimal surfaces in the unit ball.

pub mod catalog;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod harmonic_series;
pub mod holomorphic;
pub mod isothermal;
pub mod jet;
pub mod reflection;
pub mod reports;

pub use error::{Error, Result, Stage};
pub use jet::{Jet, Vec3};

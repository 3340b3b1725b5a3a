//! Simulation and control stack for a soft underwater robot driven by twelve
//! passive helical flagella on a dodecahedral frame.
//!
//! The arms come in six antipodal pairs; each pair shares one motor driver
//! channel, so the controller only ever chooses six duties. [`mixer`] turns a
//! surge/yaw request into those duties, [`sim`] runs the fixed-step loop, and
//! [`sim::serve`] exposes it to a live pilot.

pub mod actuation;
pub mod autopilot;
pub mod ballast;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hydro;
pub mod mixer;
pub mod sim;

pub use error::{Result, SimError};

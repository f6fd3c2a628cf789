//! Planning and perception stack for a flying robot that aims a rotatable
//! stereo camera while it flies: directional sensing memory, camera-heading
//! optimization, obstacle tracking, occupancy mapping with distance fields,
//! trajectory generation, and a deterministic kinematic simulator tying the
//! pieces together.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature (on by
//! default) is only needed by downstream IO.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod config;
pub mod flight;
pub mod geometry;
pub mod head;
pub mod sim;
pub mod sud;
pub mod timesync;
pub mod tracker;
pub mod world;

pub use geometry::{Stamp, Vec2, Vec3};

//! Design analysis for a gripper-driven screwing tool built from a modified
//! chained scissor-like element (SLE) and a double-ratchet output stage.
//!
//! The crate covers the full quasi-static model of the tool:
//!
//! * [`params`]: tool and gripper constants, validation, and the key-value
//!   configuration format.
//! * [`kinematics`]: width/angle relations, rotational travel, pad height,
//!   and output angle over squeeze/stretch cycles.
//! * [`quasistatics`]: spring torque, grip pressure, stable-hold condition,
//!   output torques and the fastenable-screw lookup.
//! * [`spring_opt`]: selection of the torsional spring coefficient.
//! * [`cam`]: synthesis of the curved inner profile of the holding pads.
//! * [`stability`]: grasp-wrench-set structural stability index.
//! * [`insertion`]: simulated linear/spiral/rotation search tooltip insertion
//!   with a discrete impedance controller.
//! * [`report`]: report envelopes and CSV writers shared by the CLI.

// `!(x > 0.0)` checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod cam;
pub mod config;
pub mod error;
pub mod insertion;
pub mod kinematics;
pub mod params;
pub mod quasistatics;
pub mod report;
pub mod spring_opt;
pub mod stability;

pub use error::{Error, Result};
pub use params::{GripperParams, ToolParams};

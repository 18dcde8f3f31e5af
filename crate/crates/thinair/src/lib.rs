//! Software simulation of mid-air ultrasonic haptics for virtual cockpit
//! controls.
//!
//! The crate models the full chain from acoustic focusing to certification
//! auditing:
//!
//! - [`acoustics`]: transducer arrays, conjugate-phase focusing, and complex
//!   pressure fields by superposition.
//! - [`modulation`]: AM envelopes, spatio-temporal (STM) path traversal,
//!   4 mm spatial quantization, and the 40 kHz update-rate cap.
//! - [`sensations`]: the named tactile template library (dial, click,
//!   presence, line) anchored to hand landmarks.
//! - [`rig`]: multi-device geometry, reach cones, device selection, coverage
//!   maps, and power estimation.
//! - [`interaction`]: cockpit profiles, contact detection, and the
//!   deterministic session engine producing haptic event logs.
//! - [`compliance`]: the FTD/FFS rules engine and latency-budget checker.
//! - [`config`]: versioned JSON documents for arrays, rigs, profiles, and
//!   latency pipelines, with bundled example factories.
//!
//! All pressure values are in arbitrary units (unit source strength per
//! element); the toolkit makes relative comparisons only. Air absorption is
//! not modeled.

// Validation uses `!(x > 0.0)` style on purpose: the negation rejects NaN,
// which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustics;
pub mod compliance;
pub mod config;
pub mod interaction;
pub mod math;
pub mod modulation;
pub mod rig;
pub mod sensations;

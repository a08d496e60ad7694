//! Multi-target point tracking by detection.
//!
//! Each target is followed by its own constant-velocity Kalman filter. At
//! every frame the predicted positions of the live tracks are compared with
//! the incoming detections through a Euclidean cost matrix and associated
//! with the Hungarian method. The crate also ships a seeded scenario
//! generator, CLEAR-style evaluation and the line-oriented file formats used
//! by the `headtrack` command-line tool.

pub mod assignment;
pub mod cli;
pub mod detection;
mod error;
pub mod io;
pub mod kfilter;
pub mod synth;
pub mod tracker;

pub use assignment::{Assignment, CostMatrix};
pub use detection::Detection;
pub use error::{Error, Result};
pub use kfilter::{KalmanState, Measurement, MotionModel};
pub use synth::{GroundTruth, Metrics, ScenarioSpec};
pub use tracker::{FrameResult, Tracker, TrackerConfig};

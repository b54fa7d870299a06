//! Conceptors for recurrent networks.
//!
//! A conceptor is the ellipsoid envelope of the state cloud a pattern excites
//! in a driven reservoir, represented as a symmetric matrix with spectrum in
//! `[0, 1]`. This crate computes conceptors, combines them with a Boolean
//! algebra, stores patterns in a reservoir (batch and incremental), regenerates
//! them under conceptor control, recalls them from cues by auto-adaptation,
//! and classifies timeseries with per-class conceptors.

pub mod autoadapt;
pub mod classify;
pub mod conceptor;
pub mod demo;
pub mod error;
pub mod generation;
pub mod linalg;
pub mod loading;
pub mod metrics;
pub mod pattern;
pub mod reservoir;
mod serde_mat;
pub mod synth;

pub use autoadapt::{AdaptState, AutoAdaptOptions, Autofocus, CueOptions};
pub use classify::{Classifier, Evidence, EvidenceVector};
pub use conceptor::{mix, Aperture, Conceptor, Correlation};
pub use error::{Error, Result};
pub use generation::{BlendSchedule, GenerateOptions, GenerationRun, RecallOptions};
pub use loading::{load_patterns, LoadParams, LoadedNetwork, MemoryState};
pub use pattern::Pattern;
pub use reservoir::{Reservoir, ReservoirParams, StateCloud};

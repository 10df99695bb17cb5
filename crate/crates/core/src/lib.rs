//! Visual-acuity-consistent foveated rendering (VaFR).
//!
//! Screen content is resampled into a log-polar buffer whose radial density
//! follows human visual acuity. Its size depends only on the acuity model,
//! never on display resolution or gaze.
//!
//! * [`acuity`] – piecewise-linear MAR model and device adaptation.
//! * [`mapping`] – screen ⇄ LP forward/inverse mapping and buffer sizing.
//! * [`lpbuffer`] – the semi-elliptical LP buffer and its statistics.
//! * [`foveate`] – image foveation pipeline with LP-space FXAA.
//! * [`raycast`] – CPU ray caster emitting one ray per LP shading point.
//! * [`baselines`] – shading-rate curves of earlier log-polar methods.

pub mod acuity;
pub mod baselines;
pub mod error;
pub mod foveate;
pub mod image;
pub mod lpbuffer;
pub mod mapping;
pub mod presets;
pub mod raycast;

pub use acuity::{AcuityModel, AcuitySegment};
pub use error::{Result, VafrError};
pub use foveate::{AaMode, FoveationParams, Foveator, OutsidePolicy};
pub use image::Image;
pub use lpbuffer::{BufferStats, LpBuffer, Texel};
pub use mapping::{DeltaSpec, Forward, MappingContext};

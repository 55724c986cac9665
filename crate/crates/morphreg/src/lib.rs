//! Fully automatic dense registration of 3D facial surface meshes.
//!
//! The pipeline detects 17 anatomical landmarks on a raw facial scan
//! (sphere-fit nose tip localization, statistical eigenspace detection of the
//! six most salient points, heuristics for the rest), resamples the surface
//! on a spherical grid, and warps a reference mesh onto each sample with a
//! thin-plate spline to obtain dense point-to-point correspondence. Averages
//! of registered faces are built by generalized Procrustes analysis.
//!
//! Coordinate convention throughout: millimeters, +z toward the viewer,
//! +y up, +x to the subject's left.

pub mod config;
pub mod error;
pub mod flatten;
pub mod gpa;
pub mod heuristic;
pub mod io;
pub mod landmarks;
pub mod mesh;
pub mod nose;
pub mod pca;
pub mod pipeline;
pub mod rand_util;
pub mod spatial;
pub mod sphere;
pub mod spherical;
pub mod synth;
pub mod tps;

pub use error::{Error, Result};
pub use landmarks::{LandmarkName, LandmarkSet};
pub use mesh::{RigidTransform, TriangleMesh};

//! Desk-scale implementation of an NIR-guided venipuncture positioning
//! pipeline: synthetic vein imagery with exact ground truth, a classical
//! vein-labeling chain, puncture-site geometry (suitability analysis and
//! signed-angle fitting), four encoder-decoder regression topologies with
//! two-step training on a small from-scratch tensor engine, evaluation with
//! volunteer-level cross-validation, and a gantry positioning planner.

pub mod augment;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod models;
pub mod nn;
pub mod planner;
pub mod raster;
pub mod synth;
pub mod vision;

pub use error::{Error, Result};

//! Agent-aware geometric verification of embodied action plans.

pub mod audit;
pub mod checks;
pub mod engine;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod navmap;
pub mod reward;
pub mod rng;
pub mod scene;

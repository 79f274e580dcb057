//! CLI and HTTP front ends for the vidtriage pipeline.

pub mod api;
pub mod cli;
pub mod jobs;
pub mod runtime;

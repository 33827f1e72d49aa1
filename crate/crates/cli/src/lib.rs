//! Command-line front end and HTTP session service for the fractional
//! transversal game engine.

pub mod cli;
pub mod service;
pub mod session;

pub use cli::run;

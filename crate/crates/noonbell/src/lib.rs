//! Standard-library front end for `noonbell-core`: a rayon executor, CSV/JSON
//! and SVG writers, run manifests, the oracle verification suite and the
//! `noonbell` command line.

pub mod cli;
pub mod exec;
pub mod manifest;
pub mod output;
pub mod params;
pub mod svg;
pub mod verify;

pub use exec::Rayon;

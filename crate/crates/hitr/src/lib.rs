//! File formats, input loading, run manifests, and the command-line front
//! end for the `hitr-core` library.

pub mod cli;
pub mod formats;
pub mod io;
pub mod manifest;

pub use hitr_core as core;

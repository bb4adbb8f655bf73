//! Files, command line and verification harness around [`resket_core`].

pub use resket_core as core;

pub mod cli;
pub mod error;
pub mod format;
pub mod io;
pub mod random;
pub mod verify;

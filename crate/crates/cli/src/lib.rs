//! Configuration, presets and experiment drivers behind the `oto-clock` binary.

pub mod config;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod resolve;
pub mod verify;

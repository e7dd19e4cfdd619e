//! Spec-document parsing, scenario bundles, telemetry I/O, synthetic
//! telemetry generation, and report rendering behind the `autonomy` CLI.

pub mod commands;
pub mod doc;
pub mod generate;
pub mod report;
pub mod scenario;
pub mod telemetry;

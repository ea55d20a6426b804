//! Named experiment presets, their CSV artifacts and run manifests.

mod output;
mod preset;

pub use output::{write_atomic, CsvTable};
pub use preset::{locked_constant_warnings, run_preset, Assumption, ExperimentPreset, PresetName, PresetOutput, Sweep};

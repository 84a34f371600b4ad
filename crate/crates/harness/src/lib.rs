//! Experiment presets, output writers and the `nds` command-line tool.

pub mod cli;
pub mod output;
pub mod presets;
pub mod svg;

//! Configuration files, presets, CSV and SVG output.

pub mod config;
pub mod csv;
pub mod presets;
pub mod svg;

pub use config::{emit_config, parse_config, parse_distribution};
pub use csv::{emit_csv, emit_runs_csv, format_sig, write_curves_csv};
pub use presets::{preset, preset_ids, preset_text, PRESET_IDS};
pub use svg::{render_svg, SvgStyle};

//! File formats, competence-map export and the `divmap` command line on top
//! of [`divmap_core`].

pub mod cli;
pub mod config;
mod error;
pub mod export;
pub mod formats;

pub use config::{RunConfig, CONFIG_FILE};
pub use error::{Error, Result};
pub use export::{export_map, read_map_csv, save_map, MapFormat, MapNode};
pub use formats::{load_basemap, save_basemap, GraphFormat};

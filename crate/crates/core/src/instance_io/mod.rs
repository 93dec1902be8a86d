//! Instance generation, TSPLIB/CVRPLIB parsing, multi-robot derivation and
//! the canonical on-disk formats.

mod derive;
mod generate;
mod store;
mod tsplib;

use std::io;
use std::path::Path;

use thiserror::Error;

pub use derive::derive_variant_instance;
pub use generate::{angular_clusters, generate_random_instance, generate_with_rules, GenerationRules, COORD_MAX};
pub use store::{
    build_dataset, instance_from_json, instance_to_json, load_instance, read_paper_fixtures, save_instance,
    write_dataset, Dataset, DatasetManifest, ManifestEntry, GENERATED_SIZES, INSTANCES_DIR, MANIFEST_FILE,
    PAPER_CVRPLIB_FILES, SEEDS_PER_CELL,
};
pub use tsplib::{fleet_size_from_name, parse_tsplib, parse_tsplib_document, TsplibDocument};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("generation error: {0}")]
    Generation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("derivation error: {0}")]
    Derivation(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

//! Canonical JSON persistence for instances and the dataset manifest.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use super::generate::{generate_with_rules, GenerationRules};
use super::tsplib::parse_tsplib;
use super::{derive_variant_instance, IoError};
use crate::routing::{Location, Metric, ProblemInstance, VariantKind, VariantSpec};

/// The five CVRPLIB files every multi-robot variant is derived from.
pub const PAPER_CVRPLIB_FILES: [&str; 5] = ["P-n16-k8", "P-n19-k2", "P-n21-k2", "E-n22-k4", "P-n23-k8"];

/// Location counts for generated single-robot instances.
pub const GENERATED_SIZES: [usize; 3] = [10, 15, 20];

pub const SEEDS_PER_CELL: u64 = 5;

#[derive(Deserialize)]
struct RawLocation {
    id: i64,
    x: f64,
    y: f64,
    #[serde(default)]
    demand: i64,
}

#[derive(Deserialize)]
struct RawInstance {
    name: String,
    variant: VariantSpec,
    locations: Vec<RawLocation>,
    metric: Metric,
    #[serde(default)]
    seed: Option<u64>,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = String;

    fn try_from(raw: RawInstance) -> Result<Self, String> {
        let mut ids = BTreeSet::new();
        let mut locations = Vec::with_capacity(raw.locations.len());
        for (i, l) in raw.locations.iter().enumerate() {
            if l.id < 0 {
                return Err(format!("locations[{i}].id: negative id {}", l.id));
            }
            if !ids.insert(l.id) {
                return Err(format!("locations[{i}].id: duplicate id {}", l.id));
            }
            if l.demand < 0 {
                return Err(format!("locations[{i}].demand: negative demand {}", l.demand));
            }
            let demand = u32::try_from(l.demand)
                .map_err(|_| format!("locations[{i}].demand: {} is too large", l.demand))?;
            locations.push(Location {
                id: l.id as usize,
                x: l.x,
                y: l.y,
                demand,
            });
        }
        ProblemInstance::new(raw.name, raw.variant, locations, raw.metric, raw.seed).map_err(|e| e.to_string())
    }
}

impl<'de> Deserialize<'de> for ProblemInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(deserializer)?;
        ProblemInstance::try_from(raw).map_err(D::Error::custom)
    }
}

pub fn instance_to_json(instance: &ProblemInstance) -> String {
    let mut s = serde_json::to_string_pretty(instance).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Schema(e.to_string()))
}

pub fn save_instance(instance: &ProblemInstance, path: &Path) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| IoError::io(parent, e))?;
    }
    fs::write(path, instance_to_json(instance)).map_err(|e| IoError::io(path, e))
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    instance_from_json(&text).map_err(|e| match e {
        IoError::Schema(msg) => IoError::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: VariantKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Path relative to the dataset directory.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub rules: GenerationRules,
    pub seed_base: u64,
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const INSTANCES_DIR: &str = "instances";

impl DatasetManifest {
    pub fn load(dataset_dir: &Path) -> Result<Self, IoError> {
        let path = dataset_dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| IoError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| IoError::Schema(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn instance_path(&self, dataset_dir: &Path, entry: &ManifestEntry) -> PathBuf {
        dataset_dir.join(&entry.path)
    }

    pub fn load_instances(&self, dataset_dir: &Path) -> Result<Vec<ProblemInstance>, IoError> {
        self.entries
            .iter()
            .map(|e| load_instance(&self.instance_path(dataset_dir, e)))
            .collect()
    }
}

/// In-memory dataset before it is written out.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub instances: Vec<ProblemInstance>,
}

/// Generates the single-robot cells and derives all multi-robot variants
/// from the given CVRPLIB texts (`(source file name, contents)` pairs).
pub fn build_dataset(
    rules: &GenerationRules,
    seed_base: u64,
    cvrplib: &[(String, String)],
) -> Result<Dataset, IoError> {
    let mut entries = Vec::new();
    let mut instances = Vec::new();
    let mut push = |inst: ProblemInstance, seed: Option<u64>, source: Option<String>| {
        entries.push(ManifestEntry {
            name: inst.name.clone(),
            kind: inst.kind(),
            n: inst.n(),
            seed,
            source,
            path: format!("{INSTANCES_DIR}/{}.json", inst.name),
        });
        instances.push(inst);
    };

    for kind in VariantKind::SINGLE_ROBOT {
        for n in GENERATED_SIZES {
            for seed in seed_base..seed_base + SEEDS_PER_CELL {
                push(generate_with_rules(kind, n, seed, rules)?, Some(seed), None);
            }
        }
    }
    for kind in VariantKind::MULTI_ROBOT {
        for (file, text) in cvrplib {
            let base = parse_tsplib(text).map_err(|e| match e {
                IoError::Parse { line, message } => IoError::Parse {
                    line,
                    message: format!("{file}: {message}"),
                },
                other => other,
            })?;
            push(derive_variant_instance(&base, kind)?, None, Some(file.clone()));
        }
    }
    Ok(Dataset {
        manifest: DatasetManifest {
            rules: *rules,
            seed_base,
            entries,
        },
        instances,
    })
}

/// Reads the five standard CVRPLIB files from `dir`, failing with the
/// missing file's name.
pub fn read_paper_fixtures(dir: &Path) -> Result<Vec<(String, String)>, IoError> {
    PAPER_CVRPLIB_FILES
        .iter()
        .map(|name| {
            let file = format!("{name}.vrp");
            let path = dir.join(&file);
            fs::read_to_string(&path)
                .map(|text| (file, text))
                .map_err(|e| IoError::io(&path, e))
        })
        .collect()
}

pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<(), IoError> {
    for (entry, inst) in dataset.manifest.entries.iter().zip(&dataset.instances) {
        save_instance(inst, &dir.join(&entry.path))?;
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, dataset.manifest.to_json()).map_err(|e| IoError::io(&path, e))
}

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};

use routebench_core::instance_io::{
    build_dataset, read_paper_fixtures, write_dataset, Dataset, GenerationRules, INSTANCES_DIR, MANIFEST_FILE,
};

use crate::config::{resource, HarnessConfig};
use crate::{CliError, CliResult};

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Generate the single-robot instances and derive the multi-robot ones
    /// from the five CVRPLIB files.
    Gen(GenArgs),
    /// Derive the four multi-robot variants from the given CVRPLIB files.
    Import(ImportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// First seed of every (variant, size) cell; five consecutive seeds are used.
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Directory holding P-n16-k8.vrp and the other CVRPLIB files.
    #[arg(long, value_name = "DIR")]
    pub cvrplib: Option<PathBuf>,
    /// k-TSP visits ceil(n * fraction) locations.
    #[arg(long)]
    pub ktsp_fraction: Option<f64>,
    /// GTSP uses ceil(n / divisor) clusters.
    #[arg(long)]
    pub gtsp_cluster_divisor: Option<usize>,
    /// Replace an existing dataset that differs.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

pub fn execute(cmd: DatasetCommand, cfg: &HarnessConfig) -> CliResult<()> {
    match cmd {
        DatasetCommand::Gen(a) => {
            let mut rules = GenerationRules::default();
            if let Some(f) = a.ktsp_fraction {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(CliError::Usage(format!("--ktsp-fraction must be in (0, 1], got {f}")));
                }
                rules.ktsp_fraction = f;
            }
            if let Some(d) = a.gtsp_cluster_divisor {
                if d == 0 {
                    return Err(CliError::Usage("--gtsp-cluster-divisor must be positive".into()));
                }
                rules.gtsp_cluster_divisor = d;
            }
            let dir = resource(a.cvrplib.as_deref(), cfg.cvrplib.as_deref(), "data/cvrplib");
            let files = read_paper_fixtures(&dir).map_err(|e| {
                CliError::Environment(format!("{e}; point --cvrplib at the directory with the vendored .vrp files"))
            })?;
            let dataset = build_dataset(&rules, a.seed_base, &files)?;
            store(&dataset, &a.out, a.force)
        }
        DatasetCommand::Import(a) => {
            let mut files = Vec::new();
            for path in &a.files {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Environment(format!("cannot read {}: {e}", path.display())))?;
                let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
                files.push((name, text));
            }
            let mut dataset = build_dataset(&GenerationRules::default(), 0, &files)?;
            let entries = std::mem::take(&mut dataset.manifest.entries);
            let instances = std::mem::take(&mut dataset.instances);
            (dataset.manifest.entries, dataset.instances) =
                entries.into_iter().zip(instances).filter(|(e, _)| e.source.is_some()).unzip();
            store(&dataset, &a.out, a.force)
        }
    }
}

fn store(dataset: &Dataset, out: &Path, force: bool) -> CliResult<()> {
    let manifest_path = out.join(MANIFEST_FILE);
    let fresh = dataset.manifest.to_json();
    match fs::read_to_string(&manifest_path) {
        Ok(existing) if existing == fresh => {}
        Ok(_) if !force => {
            return Err(CliError::Environment(format!(
                "{} holds a different dataset; pass --force to replace it",
                out.display()
            )))
        }
        Err(_) if !force && out.is_dir() && dir_has_entries(out)? => {
            return Err(CliError::Environment(format!(
                "{} is not empty and has no manifest (partial dataset?); pass --force to replace it",
                out.display()
            )))
        }
        _ => {
            if force {
                // only the parts this command owns
                for sub in [INSTANCES_DIR, "certificates"] {
                    let p = out.join(sub);
                    if p.is_dir() {
                        fs::remove_dir_all(&p)
                            .map_err(|e| CliError::Environment(format!("cannot remove {}: {e}", p.display())))?;
                    }
                }
            }
        }
    }
    write_dataset(dataset, out)?;
    let derived = dataset.manifest.entries.iter().filter(|e| e.source.is_some()).count();
    println!(
        "wrote {} instances ({} generated, {} derived) to {}",
        dataset.instances.len(),
        dataset.instances.len() - derived,
        derived,
        out.display()
    );
    Ok(())
}

fn dir_has_entries(dir: &Path) -> CliResult<bool> {
    let mut it = fs::read_dir(dir).map_err(|e| CliError::Environment(format!("{}: {e}", dir.display())))?;
    Ok(it.next().is_some())
}

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use routebench_core::exact::{solve_instance, CertificateStatus, ExactOptions, OptimalCertificate};
use routebench_core::instance_io::{load_instance, DatasetManifest};
use routebench_core::VariantKind;

use crate::config::{parse_kind, positive_secs, HarnessConfig};
use crate::{CliError, CliResult};

pub const CERTIFICATES_DIR: &str = "certificates";

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,
    /// Wall-clock budget per multi-robot instance, in seconds.
    #[arg(long, value_name = "SECS")]
    pub budget: Option<f64>,
    /// Only these variants (slug, repeatable).
    #[arg(long = "kind", value_parser = parse_kind)]
    pub kinds: Vec<VariantKind>,
    /// Only these instances (repeatable).
    #[arg(long = "instance")]
    pub instances: Vec<String>,
    /// Recompute certificates that already exist.
    #[arg(long)]
    pub force: bool,
}

pub fn execute(args: SolveArgs, cfg: &HarnessConfig) -> CliResult<()> {
    let manifest = DatasetManifest::load(&args.dataset)?;
    let budget = args.budget.or(cfg.solve_budget_secs).unwrap_or(600.0);
    let options = ExactOptions {
        time_budget: positive_secs(budget, "--budget")?,
    };
    let dir = args.dataset.join(CERTIFICATES_DIR);
    fs::create_dir_all(&dir).map_err(|e| CliError::Environment(format!("{}: {e}", dir.display())))?;

    let (mut proven, mut bound, mut skipped, mut failed) = (0, 0, 0, 0);
    for entry in &manifest.entries {
        if !args.kinds.is_empty() && !args.kinds.contains(&entry.kind) {
            continue;
        }
        if !args.instances.is_empty() && !args.instances.contains(&entry.name) {
            continue;
        }
        let cert_path = dir.join(format!("{}.json", entry.name));
        let err_path = dir.join(format!("{}.error.txt", entry.name));
        if !args.force && read_certificate(&cert_path).is_some() {
            skipped += 1;
            continue;
        }
        let instance = load_instance(&manifest.instance_path(&args.dataset, entry))?;
        match solve_instance(&instance, &options) {
            Ok(cert) => {
                let mut json = serde_json::to_string_pretty(&cert).expect("certificate serializes");
                json.push('\n');
                write(&cert_path, &json)?;
                let _ = fs::remove_file(&err_path);
                match cert.status {
                    CertificateStatus::ProvenOptimal => proven += 1,
                    CertificateStatus::BoundOnly => bound += 1,
                }
                println!(
                    "{:<28} {:<15} {:>12.4}  lb {:>12.4}  {:.2} s",
                    entry.name,
                    status_name(cert.status),
                    cert.value.value,
                    cert.lower_bound,
                    cert.solve_time
                );
            }
            Err(e) => {
                failed += 1;
                write(&err_path, &format!("{e}\n"))?;
                eprintln!("{:<28} FAILED: {e}", entry.name);
            }
        }
    }
    println!("PROVEN_OPTIMAL {proven}, BOUND_ONLY {bound}, skipped {skipped}, failed {failed}");
    if failed > 0 {
        return Err(CliError::Partial(format!(
            "{failed} instance(s) failed; see the .error.txt files in {}",
            dir.display()
        )));
    }
    Ok(())
}

fn status_name(s: CertificateStatus) -> &'static str {
    match s {
        CertificateStatus::ProvenOptimal => "PROVEN_OPTIMAL",
        CertificateStatus::BoundOnly => "BOUND_ONLY",
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Environment(format!("cannot write {}: {e}", path.display())))
}

fn read_certificate(path: &Path) -> Option<OptimalCertificate> {
    serde_json::from_str(&fs::read_to_string(path).ok()?).ok()
}

/// Certificates keyed by instance name. A missing directory gives an empty map.
pub fn load_certificates(dir: &Path) -> CliResult<HashMap<String, OptimalCertificate>> {
    let mut out = HashMap::new();
    let Ok(entries) = fs::read_dir(dir) else {
        return Ok(out);
    };
    for entry in entries {
        let path = entry.map_err(|e| CliError::Environment(format!("{}: {e}", dir.display())))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let cert = read_certificate(&path)
                .ok_or_else(|| CliError::Environment(format!("malformed certificate {}", path.display())))?;
            out.insert(name, cert);
        }
    }
    Ok(out)
}

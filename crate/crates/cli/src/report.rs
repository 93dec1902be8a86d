use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use routebench_core::exact::OptimalCertificate;
use routebench_core::metrics::{
    approach_table, confusion_table, export, library_usage_table, pivot_table, AggregateOptions, ExportFormat,
    GroupKey, ReportTable,
};
use routebench_core::pipeline::{read_records, ApproachRules, RunRecord};

use crate::config::HarnessConfig;
use crate::solve::{load_certificates, CERTIFICATES_DIR};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => ExportFormat::Markdown,
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A records directory (every `*.jsonl` inside) or one record file.
    #[arg(long, value_name = "PATH")]
    pub records: PathBuf,
    /// Dataset whose `certificates/` supply optimal values for the gap.
    #[arg(long, value_name = "DIR")]
    pub dataset: Option<PathBuf>,
    /// Certificate directory; overrides `--dataset`.
    #[arg(long, value_name = "DIR")]
    pub certificates: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "markdown")]
    pub format: Vec<FormatArg>,
    /// Restrict to one experiment id.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Leave aborted runs out of success-rate denominators.
    #[arg(long)]
    pub exclude_aborted: bool,
    /// JSON object mapping program SHA-256 to an approach tag.
    #[arg(long, value_name = "FILE")]
    pub approach_overrides: Option<PathBuf>,
}

fn collect_records(path: &Path) -> CliResult<Vec<RunRecord>> {
    if path.is_file() {
        return Ok(read_records(path)?);
    }
    if !path.is_dir() {
        return Err(CliError::Environment(format!("{} does not exist", path.display())));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::Environment(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl") && p.is_file())
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        out.extend(read_records(&f)?);
    }
    Ok(out)
}

/// Every report table for one experiment's records.
pub fn build_tables(
    records: &[RunRecord],
    certificates: &HashMap<String, OptimalCertificate>,
    options: AggregateOptions,
    rules: &ApproachRules,
) -> CliResult<Vec<ReportTable>> {
    Ok(vec![
        pivot_table("framework", "Results by framework", records, certificates, GroupKey::Framework, options)?,
        pivot_table("context", "Results by context", records, certificates, GroupKey::Context, options)?,
        pivot_table("model", "Results by model", records, certificates, GroupKey::Model, options)?,
        confusion_table(records),
        library_usage_table(records),
        approach_table(records, rules),
    ])
}

pub fn execute(args: ReportArgs, _cfg: &HarnessConfig) -> CliResult<()> {
    let mut records = collect_records(&args.records)?;
    if let Some(id) = &args.experiment {
        records.retain(|r| &r.experiment_id == id);
    }
    if records.is_empty() {
        println!("no records in {}; nothing to report", args.records.display());
        return Ok(());
    }
    let cert_dir = args
        .certificates
        .clone()
        .or_else(|| args.dataset.as_ref().map(|d| d.join(CERTIFICATES_DIR)));
    let certificates = match &cert_dir {
        Some(dir) => load_certificates(dir)?,
        None => HashMap::new(),
    };
    if certificates.is_empty() {
        eprintln!("warning: no certificates loaded; gap columns will be empty");
    }
    let rules = match &args.approach_overrides {
        Some(p) => ApproachRules::with_overrides_file(p)?,
        None => ApproachRules::default(),
    };
    let options = AggregateOptions {
        exclude_aborted: args.exclude_aborted,
    };
    let tables = build_tables(&records, &certificates, options, &rules)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Environment(format!("{}: {e}", args.out.display())))?;
    for table in &tables {
        for &f in &args.format {
            let path = export(table, f.into(), &args.out)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

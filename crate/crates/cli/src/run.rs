use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::thread;

use clap::{Args, ValueEnum};

use routebench_core::instance_io::{load_instance, DatasetManifest};
use routebench_core::llm::{ChatProvider, PricingTable, RecordingProvider, RemoteProvider, ReplayProvider};
use routebench_core::pipeline::{
    append_record, completed_keys, read_records, run_framework, Assets, ContextKind, ContextSpec, FinalStatus,
    FrameworkKind, RunContext, RunKey, RunSpec,
};
use routebench_core::{ProblemInstance, VariantKind};

use crate::config::{parse_kind, resource, HarnessConfig};
use crate::providers::{model_config, remote, TranscriptMode};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameworkArg {
    All,
    Single,
    Debug,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContextArg {
    None,
    Math,
    PseudoCode,
    Paper,
    All,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,
    /// Directory for `<experiment>.jsonl` record files.
    #[arg(long, value_name = "DIR")]
    pub records: PathBuf,
    #[arg(long, default_value = "default")]
    pub experiment: String,
    #[arg(long, value_enum, default_value = "all")]
    pub framework: FrameworkArg,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "none")]
    pub context: Vec<ContextArg>,
    /// Which pseudo-code / paper assets to use.
    #[arg(long = "asset-id", value_delimiter = ',', default_values_t = [1u8, 2])]
    pub asset_ids: Vec<u8>,
    /// Model name (repeatable).
    #[arg(long, required = true)]
    pub model: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub repeats: u32,
    #[arg(long, value_enum, default_value = "replay")]
    pub transcript_mode: TranscriptMode,
    /// Transcript directory; defaults to `<records>/transcripts`.
    #[arg(long, value_name = "DIR")]
    pub transcripts: Option<PathBuf>,
    #[arg(long = "kind", value_parser = parse_kind)]
    pub kinds: Vec<VariantKind>,
    #[arg(long = "instance")]
    pub instances: Vec<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub debug_budget: Option<u32>,
    #[arg(long)]
    pub verify_budget: Option<u32>,
    /// Program time limit in seconds.
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<f64>,
    /// Interpreter command, e.g. "python3 -I".
    #[arg(long)]
    pub runner: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub pricing: Option<PathBuf>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone)]
struct Job {
    instance: usize,
    framework: FrameworkKind,
    context: ContextSpec,
    model: String,
    repeat: u32,
}

/// `<instance>__<framework>__<context>__<model>__r<repeat>.jsonl`
pub fn transcript_name(instance: &str, framework: FrameworkKind, context: &ContextSpec, model: &str, repeat: u32) -> String {
    format!(
        "{}__{}__{}__{}__r{repeat}.jsonl",
        file_safe(instance),
        framework.slug(),
        context.label(),
        file_safe(model)
    )
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

fn frameworks(arg: FrameworkArg) -> Vec<FrameworkKind> {
    match arg {
        FrameworkArg::All => vec![FrameworkKind::SingleAttempt, FrameworkKind::SelfDebug, FrameworkKind::SelfDebugVerify],
        FrameworkArg::Single => vec![FrameworkKind::SingleAttempt],
        FrameworkArg::Debug => vec![FrameworkKind::SelfDebug],
        FrameworkArg::Verify => vec![FrameworkKind::SelfDebugVerify],
    }
}

fn contexts(args: &[ContextArg], ids: &[u8]) -> CliResult<Vec<ContextSpec>> {
    let mut out: Vec<ContextSpec> = Vec::new();
    let mut push = |kind: ContextKind| -> CliResult<()> {
        let specs = match kind {
            ContextKind::None | ContextKind::MathFormulation => vec![ContextSpec::new(kind, None)?],
            _ => ids.iter().map(|&id| ContextSpec::new(kind, Some(id))).collect::<Result<_, _>>()?,
        };
        for s in specs {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(())
    };
    for a in args {
        match a {
            ContextArg::None => push(ContextKind::None)?,
            ContextArg::Math => push(ContextKind::MathFormulation)?,
            ContextArg::PseudoCode => push(ContextKind::PseudoCode)?,
            ContextArg::Paper => push(ContextKind::PaperSummary)?,
            ContextArg::All => {
                for k in [ContextKind::None, ContextKind::MathFormulation, ContextKind::PseudoCode, ContextKind::PaperSummary] {
                    push(k)?;
                }
            }
        }
    }
    Ok(out)
}

fn load_pricing(flag: Option<&Path>, cfg: &HarnessConfig) -> CliResult<PricingTable> {
    let path = resource(flag, cfg.pricing.as_deref(), "config/pricing.json");
    if path.exists() {
        return Ok(PricingTable::load(&path)?);
    }
    if flag.is_some() || cfg.pricing.is_some() {
        return Err(CliError::Environment(format!("pricing file {} not found", path.display())));
    }
    eprintln!("warning: no pricing table found; costs will be unknown");
    Ok(PricingTable::default())
}

pub fn execute(args: RunArgs, cfg: &HarnessConfig) -> CliResult<()> {
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    if args.experiment.is_empty() || file_safe(&args.experiment) != args.experiment {
        return Err(CliError::Usage(format!(
            "--experiment {:?} must be nonempty and use only letters, digits, '.', '_' or '-'",
            args.experiment
        )));
    }
    let manifest = DatasetManifest::load(&args.dataset)?;
    let mut instances: Vec<ProblemInstance> = Vec::new();
    for entry in &manifest.entries {
        let kind_ok = args.kinds.is_empty() || args.kinds.contains(&entry.kind);
        let name_ok = args.instances.is_empty() || args.instances.contains(&entry.name);
        if kind_ok && name_ok {
            instances.push(load_instance(&manifest.instance_path(&args.dataset, entry))?);
        }
    }
    if let Some(missing) = args.instances.iter().find(|n| !instances.iter().any(|i| &i.name == *n)) {
        return Err(CliError::Usage(format!("instance {missing} is not in the dataset (or excluded by --kind)")));
    }
    let frameworks = frameworks(args.framework);
    let contexts = contexts(&args.context, &args.asset_ids)?;

    let records_path = args.records.join(format!("{}.jsonl", args.experiment));
    let done: BTreeSet<RunKey> = if records_path.exists() {
        completed_keys(&read_records(&records_path)?)
    } else {
        BTreeSet::new()
    };
    let mut jobs = VecDeque::new();
    let mut total = 0;
    for &framework in &frameworks {
        for context in &contexts {
            for model in &args.model {
                for (i, inst) in instances.iter().enumerate() {
                    for repeat in 0..args.repeats {
                        total += 1;
                        let key = RunKey {
                            instance: inst.name.clone(),
                            framework,
                            context: *context,
                            model: model.clone(),
                            repeat,
                        };
                        if !done.contains(&key) {
                            jobs.push_back(Job {
                                instance: i,
                                framework,
                                context: *context,
                                model: model.clone(),
                                repeat,
                            });
                        }
                    }
                }
            }
        }
    }
    if jobs.is_empty() {
        println!("nothing to do: all {total} runs are already in {}", records_path.display());
        return Ok(());
    }

    let assets_dir = resource(args.assets.as_deref(), cfg.assets.as_deref(), "assets");
    let assets = Assets::load(&assets_dir)?;
    let mut missing_assets = BTreeSet::new();
    for job in &jobs {
        if let Some(key) = Assets::key_for(instances[job.instance].kind(), &job.context) {
            if assets.get(&key).is_none_or(|t| t.trim().is_empty()) {
                missing_assets.insert(key);
            }
        }
    }
    if let Some(first) = missing_assets.first() {
        return Err(CliError::Environment(format!(
            "{} context asset(s) missing under {}, first {first}; paper summaries come from `routebench summarize`",
            missing_assets.len(),
            assets_dir.display()
        )));
    }

    let transcripts = args.transcripts.clone().unwrap_or_else(|| args.records.join("transcripts"));
    let transcript_for = |job: &Job| {
        transcripts.join(transcript_name(
            &instances[job.instance].name,
            job.framework,
            &job.context,
            &job.model,
            job.repeat,
        ))
    };
    let remote_provider: Option<Arc<RemoteProvider>> = if args.transcript_mode.is_remote() {
        Some(remote(cfg)?)
    } else {
        let absent: Vec<PathBuf> = jobs.iter().map(&transcript_for).filter(|p| !p.is_file()).collect();
        if let Some(first) = absent.first() {
            return Err(CliError::Environment(format!(
                "replay mode: {} of {} transcripts are missing, first {}",
                absent.len(),
                jobs.len(),
                first.display()
            )));
        }
        None
    };
    if args.transcript_mode == TranscriptMode::Record {
        std::fs::create_dir_all(&transcripts)
            .map_err(|e| CliError::Environment(format!("{}: {e}", transcripts.display())))?;
    }

    let pricing = load_pricing(args.pricing.as_deref(), cfg)?;
    let sandbox = cfg.sandbox(args.runner.as_deref(), args.timeout)?;
    let budgets = cfg.budgets(args.debug_budget, args.verify_budget);
    let workers = args
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()).min(4))
        .max(1);

    let pending = jobs.len();
    let queue = Mutex::new(jobs);
    let sink = Mutex::new((0usize, Vec::<String>::new()));
    let run_one = |job: &Job| -> CliResult<FinalStatus> {
        let instance = &instances[job.instance];
        let path = transcript_for(job);
        let transcript = (args.transcript_mode != TranscriptMode::Live).then(|| path.clone());
        let model = model_config(&job.model, args.transcript_mode, cfg, args.temperature, args.max_tokens, transcript)?;
        let spec = RunSpec {
            experiment_id: &args.experiment,
            instance,
            framework: job.framework,
            context: job.context,
            repeat: job.repeat,
        };
        let go = |provider: &dyn ChatProvider| {
            let ctx = RunContext {
                provider,
                model: &model,
                assets: &assets,
                sandbox: &sandbox,
                pricing: &pricing,
                budgets,
            };
            run_framework(&spec, &ctx)
        };
        let record = match (args.transcript_mode, &remote_provider) {
            (TranscriptMode::Replay, _) => go(&ReplayProvider::from_path(&path)?)?,
            (TranscriptMode::Record, Some(remote)) => {
                let recorder = RecordingProvider::new(Arc::clone(remote));
                let record = go(&recorder)?;
                recorder.write(&path)?;
                record
            }
            (_, Some(remote)) => go(remote.as_ref())?,
            (_, None) => unreachable!("remote provider is built for remote modes"),
        };
        let status = record.final_status;
        let _guard = sink.lock().expect("sink lock");
        append_record(&records_path, &record)?;
        Ok(status)
    };

    thread::scope(|s| {
        for _ in 0..workers.min(pending) {
            s.spawn(|| loop {
                let Some(job) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                let label = format!(
                    "{} {} {} {} r{}",
                    instances[job.instance].name,
                    job.framework.slug(),
                    job.context.label(),
                    job.model,
                    job.repeat
                );
                let outcome = run_one(&job);
                let mut state = sink.lock().expect("sink lock");
                state.0 += 1;
                match outcome {
                    Ok(status) => {
                        println!("[{}/{pending}] {label}: {}", state.0, status_name(status));
                        if status == FinalStatus::Aborted {
                            state.1.push(format!("{label}: aborted"));
                        }
                    }
                    Err(e) => {
                        eprintln!("[{}/{pending}] {label}: error: {e}", state.0);
                        state.1.push(format!("{label}: {e}"));
                    }
                }
            });
        }
    });

    let (_, failures) = sink.into_inner().expect("sink lock");
    println!(
        "{} run(s) finished, {} failed; records in {}",
        pending - failures.len(),
        failures.len(),
        records_path.display()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Partial(format!("{} of {pending} runs failed or aborted", failures.len())))
    }
}

fn status_name(s: FinalStatus) -> &'static str {
    match s {
        FinalStatus::Feasible => "FEASIBLE",
        FinalStatus::Infeasible => "INFEASIBLE",
        FinalStatus::NoSolution => "NO_SOLUTION",
        FinalStatus::Aborted => "ABORTED",
    }
}

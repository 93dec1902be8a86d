use std::fs;
use std::path::PathBuf;

use clap::Args;

use routebench_core::llm::{ChatProvider, RecordingProvider, ReplayProvider};
use routebench_core::pipeline::summarize_paper;
use routebench_core::VariantKind;

use crate::config::{parse_kind, resource, HarnessConfig};
use crate::providers::{model_config, remote, TranscriptMode};
use crate::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Paper text (plain text or Markdown).
    #[arg(long, value_name = "FILE")]
    pub paper: PathBuf,
    /// Variant the summarized method addresses.
    #[arg(long, value_parser = parse_kind)]
    pub variant: VariantKind,
    /// Slot number under `paper_summaries/<variant>/`.
    #[arg(long, default_value_t = 1)]
    pub id: u8,
    #[arg(long)]
    pub model: String,
    #[arg(long, value_enum, default_value = "live")]
    pub transcript_mode: TranscriptMode,
    /// Transcript file, required for replay and record.
    #[arg(long, value_name = "FILE")]
    pub transcript: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub assets: Option<PathBuf>,
    /// Summary cache; defaults to `<assets>/paper_summaries/.cache`.
    #[arg(long, value_name = "DIR")]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub temperature: Option<f64>,
}

pub fn execute(args: SummarizeArgs, cfg: &HarnessConfig) -> CliResult<()> {
    if !(1..=2).contains(&args.id) {
        return Err(CliError::Usage(format!("--id must be 1 or 2, got {}", args.id)));
    }
    if args.transcript_mode != TranscriptMode::Live && args.transcript.is_none() {
        return Err(CliError::Usage("--transcript is required in replay and record modes".into()));
    }
    let text = fs::read_to_string(&args.paper)
        .map_err(|e| CliError::Environment(format!("cannot read {}: {e}", args.paper.display())))?;
    let assets = resource(args.assets.as_deref(), cfg.assets.as_deref(), "assets");
    let cache = args
        .cache
        .clone()
        .unwrap_or_else(|| assets.join("paper_summaries").join(".cache"));
    let transcript = args.transcript.clone().filter(|_| args.transcript_mode != TranscriptMode::Live);
    let model = model_config(&args.model, args.transcript_mode, cfg, args.temperature, None, transcript.clone())?;

    let (summary, cached) = match args.transcript_mode {
        TranscriptMode::Replay => {
            let provider = ReplayProvider::from_path(transcript.as_deref().expect("checked above"))?;
            summarize_paper(&text, &provider, &model, &cache)?
        }
        TranscriptMode::Record => {
            let recorder = RecordingProvider::new(remote(cfg)?);
            let out = summarize_paper(&text, &recorder, &model, &cache)?;
            if !out.1 {
                recorder.write(transcript.as_deref().expect("checked above"))?;
            }
            out
        }
        TranscriptMode::Live => {
            let provider = remote(cfg)?;
            summarize_paper(&text, provider.as_ref() as &dyn ChatProvider, &model, &cache)?
        }
    };
    let dir = assets.join("paper_summaries").join(args.variant.slug());
    fs::create_dir_all(&dir).map_err(|e| CliError::Environment(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("{}.txt", args.id));
    fs::write(&path, summary.trim_end().to_string() + "\n")
        .map_err(|e| CliError::Environment(format!("cannot write {}: {e}", path.display())))?;
    println!("{}{}", path.display(), if cached { " (from cache)" } else { "" });
    Ok(())
}

//! Replay fixtures: a scripted model session plus the recorded transcript
//! and the expected RunRecord, stored as
//! `<root>/<name>/{spec.json, transcript.jsonl, golden.json}`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    run_framework, Assets, Budgets, ConfusionLabel, ContextSpec, FinalStatus, FrameworkKind, PipelineError,
    RunContext, RunRecord, RunSpec,
};
use crate::instance_io::{derive_variant_instance, generate_random_instance, parse_tsplib};
use crate::llm::{
    Completion, ModelConfig, PricingTable, ProviderKind, RecordingProvider, ReplayProvider, ScriptedProvider, Usage,
};
use crate::routing::{ProblemInstance, VariantKind};
use crate::sandbox::SandboxConfig;

pub const SPEC_FILE: &str = "spec.json";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";
pub const GOLDEN_FILE: &str = "golden.json";
pub const FIXTURE_EXPERIMENT: &str = "fixtures";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureInstance {
    Generated { kind: VariantKind, n: usize, seed: u64 },
    /// A vendored CVRPLIB file, optionally turned into another variant.
    Cvrplib { file: String, kind: VariantKind },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureExpectation {
    pub final_status: FinalStatus,
    pub generation_calls: u32,
    pub llm_calls: u32,
    pub confusion: Vec<ConfusionLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub description: String,
    pub instance: FixtureInstance,
    pub framework: FrameworkKind,
    pub context: ContextSpec,
    #[serde(default)]
    pub budgets: Budgets,
    pub model: String,
    #[serde(default)]
    pub repeat: u32,
    /// Model replies in call order, used only when recording.
    pub responses: Vec<String>,
    pub expect: FixtureExpectation,
}

/// Shared inputs for running fixtures.
pub struct FixtureEnv {
    /// Directory holding the vendored `.vrp` files.
    pub cvrplib_dir: PathBuf,
    pub assets: Assets,
    pub sandbox: SandboxConfig,
    pub pricing: PricingTable,
}

#[derive(Debug, Clone)]
pub struct ReplayFixture {
    pub name: String,
    pub dir: PathBuf,
    pub spec: FixtureSpec,
}

impl ReplayFixture {
    /// Every subdirectory of `root` holding a spec file, sorted by name.
    pub fn load_all(root: &Path) -> Result<Vec<Self>, PipelineError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(root).map_err(|e| PipelineError::io(root, e))? {
            let dir = entry.map_err(|e| PipelineError::io(root, e))?.path();
            let spec_path = dir.join(SPEC_FILE);
            if !spec_path.is_file() {
                continue;
            }
            let text = fs::read_to_string(&spec_path).map_err(|e| PipelineError::io(&spec_path, e))?;
            let spec = serde_json::from_str(&text)
                .map_err(|e| PipelineError::Config(format!("{}: {e}", spec_path.display())))?;
            let name = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
            out.push(ReplayFixture { name, dir, spec });
        }
        out.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(out)
    }

    pub fn transcript_path(&self) -> PathBuf {
        self.dir.join(TRANSCRIPT_FILE)
    }

    pub fn golden_path(&self) -> PathBuf {
        self.dir.join(GOLDEN_FILE)
    }

    pub fn instance(&self, env: &FixtureEnv) -> Result<ProblemInstance, PipelineError> {
        let err = |e: crate::instance_io::IoError| PipelineError::Config(format!("fixture {}: {e}", self.name));
        match &self.spec.instance {
            FixtureInstance::Generated { kind, n, seed } => generate_random_instance(*kind, *n, *seed).map_err(err),
            FixtureInstance::Cvrplib { file, kind } => {
                let path = env.cvrplib_dir.join(file);
                let text = fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
                let base = parse_tsplib(&text).map_err(err)?;
                derive_variant_instance(&base, *kind).map_err(err)
            }
        }
    }

    pub fn model_config(&self) -> ModelConfig {
        let mut m = ModelConfig::new(self.spec.model.clone(), ProviderKind::Replay);
        m.transcript = Some(self.transcript_path());
        m
    }

    fn run_with(
        &self,
        env: &FixtureEnv,
        provider: &dyn crate::llm::ChatProvider,
    ) -> Result<RunRecord, PipelineError> {
        let instance = self.instance(env)?;
        let model = self.model_config();
        let ctx = RunContext {
            provider,
            model: &model,
            assets: &env.assets,
            sandbox: &env.sandbox,
            pricing: &env.pricing,
            budgets: self.spec.budgets,
        };
        let spec = RunSpec {
            experiment_id: FIXTURE_EXPERIMENT,
            instance: &instance,
            framework: self.spec.framework,
            context: self.spec.context,
            repeat: self.spec.repeat,
        };
        run_framework(&spec, &ctx)
    }

    /// Replays the stored transcript. Errors if calls are left unserved.
    pub fn replay(&self, env: &FixtureEnv) -> Result<RunRecord, PipelineError> {
        let provider = ReplayProvider::from_path(&self.transcript_path())?;
        let record = self.run_with(env, &provider)?;
        if provider.remaining() > 0 {
            return Err(PipelineError::Config(format!(
                "fixture {}: {} transcript entries were not used",
                self.name,
                provider.remaining()
            )));
        }
        Ok(record)
    }

    /// Runs the scripted responses, writes the transcript, then replays it
    /// and writes the golden record.
    pub fn record(&self, env: &FixtureEnv) -> Result<RunRecord, PipelineError> {
        let responses = self
            .spec
            .responses
            .iter()
            .enumerate()
            .map(|(i, text)| Completion {
                text: text.clone(),
                usage: Usage {
                    prompt_tokens: 900 + 150 * i as u64,
                    completion_tokens: (text.len() as u64).div_ceil(4),
                },
            })
            .collect();
        let recorder = RecordingProvider::new(ScriptedProvider::new(responses));
        let live = self.run_with(env, &recorder)?;
        recorder.write(&self.transcript_path())?;
        let replayed = self.replay(env)?;
        if golden_json(&live) != golden_json(&replayed) {
            return Err(PipelineError::Config(format!("fixture {}: replay differs from the live run", self.name)));
        }
        fs::write(self.golden_path(), golden_json(&replayed)).map_err(|e| PipelineError::io(&self.golden_path(), e))?;
        Ok(replayed)
    }
}

/// Pretty JSON of a record with timing zeroed.
pub fn golden_json(record: &RunRecord) -> String {
    let mut r = record.clone();
    r.normalize_timing();
    serde_json::to_string_pretty(&r).expect("record serializes") + "\n"
}

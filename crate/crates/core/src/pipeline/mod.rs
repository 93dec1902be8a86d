//! The three generation frameworks and four context modes, producing one
//! auditable [`RunRecord`] per (instance, framework, context, model, repeat).

mod analysis;
pub mod fixture;
mod prompt;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use analysis::{
    classify_approach, imported_modules, scan_imports, source_digest, ApproachRules, ApproachTag, LibraryTag,
};
pub use prompt::{
    build_prompt, constraint_prompt, debug_feedback, extract_code, solution_json, task_description,
    unit_test_program, unit_test_prompt, verification_feedback, AssetProvenance, Assets, FEEDBACK_TAIL_CHARS,
};

use crate::llm::{cost, ChatMessage, ChatProvider, LlmError, ModelConfig, PricingTable, Usage};
use crate::routing::{evaluate, ProblemInstance, Solution};
use crate::sandbox::{execute_program, parse_solution, ExecutionResult, SandboxConfig};
use crate::verifier::{check_feasible, VerdictReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path} line {line}: {message}")]
    Record { path: String, line: usize, message: String },
}

impl PipelineError {
    fn io(path: &Path, e: impl ToString) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrameworkKind {
    SingleAttempt,
    SelfDebug,
    SelfDebugVerify,
}

impl FrameworkKind {
    pub const ALL: [FrameworkKind; 3] = [
        FrameworkKind::SingleAttempt,
        FrameworkKind::SelfDebug,
        FrameworkKind::SelfDebugVerify,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            FrameworkKind::SingleAttempt => "single",
            FrameworkKind::SelfDebug => "debug",
            FrameworkKind::SelfDebugVerify => "verify",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.slug() == s)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            FrameworkKind::SingleAttempt => "Single Attempt",
            FrameworkKind::SelfDebug => "Debug",
            FrameworkKind::SelfDebugVerify => "Debug + Verify",
        }
    }
}

impl fmt::Display for FrameworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContextKind {
    None,
    MathFormulation,
    PseudoCode,
    PaperSummary,
}

impl ContextKind {
    pub const ALL: [ContextKind; 4] = [
        ContextKind::None,
        ContextKind::MathFormulation,
        ContextKind::PseudoCode,
        ContextKind::PaperSummary,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ContextKind::None => "none",
            ContextKind::MathFormulation => "math",
            ContextKind::PseudoCode => "pseudo-code",
            ContextKind::PaperSummary => "paper",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.slug() == s)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ContextKind::None => "No Context",
            ContextKind::MathFormulation => "Math",
            ContextKind::PseudoCode => "Pseudo-Code",
            ContextKind::PaperSummary => "Paper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextSpec {
    pub kind: ContextKind,
    /// Which pseudo-code or paper (1 or 2) for the asset-backed kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asset_id: Option<u8>,
}

impl ContextSpec {
    pub fn none() -> Self {
        Self {
            kind: ContextKind::None,
            asset_id: None,
        }
    }

    pub fn new(kind: ContextKind, asset_id: Option<u8>) -> Result<Self, PipelineError> {
        let spec = Self { kind, asset_id };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let needs_id = matches!(self.kind, ContextKind::PseudoCode | ContextKind::PaperSummary);
        if needs_id && self.asset_id.is_none() {
            return Err(PipelineError::Config(format!("context {} needs an asset id", self.kind.slug())));
        }
        Ok(())
    }

    /// Short label such as `pseudo-code-2`, used in file names.
    pub fn label(&self) -> String {
        match self.asset_id {
            Some(id) => format!("{}-{id}", self.kind.slug()),
            None => self.kind.slug().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Regenerations after a failed run or unreadable output.
    pub max_debug_rounds: u32,
    /// Regenerations after the model's own unit test rejects a result.
    pub max_verification_rounds: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_debug_rounds: 3,
            max_verification_rounds: 2,
        }
    }
}

impl Budgets {
    /// Upper bound on solution-generation calls for a framework.
    pub fn max_generation_calls(&self, framework: FrameworkKind) -> u32 {
        let per_round = 1 + self.max_debug_rounds;
        match framework {
            FrameworkKind::SingleAttempt => 1,
            FrameworkKind::SelfDebug => per_round,
            FrameworkKind::SelfDebugVerify => per_round * (1 + self.max_verification_rounds),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FinalStatus {
    Feasible,
    Infeasible,
    NoSolution,
    /// The model could not be reached; see [`RunRecord::error`].
    Aborted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LlmVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConfusionLabel {
    TruePositive,
    TrueNegative,
    FalsePositive,
    FalseNegative,
}

/// Positive means "judged feasible".
pub fn classify_verifier_outcome(verdict: LlmVerdict, ground_truth: &VerdictReport) -> ConfusionLabel {
    match (verdict, ground_truth.feasible) {
        (LlmVerdict::Pass, true) => ConfusionLabel::TruePositive,
        (LlmVerdict::Fail, false) => ConfusionLabel::TrueNegative,
        (LlmVerdict::Pass, false) => ConfusionLabel::FalsePositive,
        (LlmVerdict::Fail, true) => ConfusionLabel::FalseNegative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttemptKind {
    /// First generation of a round.
    Initial,
    /// Regeneration after a failed run or unreadable output.
    Debug,
    /// Regeneration after the unit test rejected the previous result.
    Verification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmVerification {
    pub constraints: String,
    pub unit_test_source: Option<String>,
    pub test_execution: Option<ExecutionResult>,
    pub verdict: LlmVerdict,
    pub usage: Usage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptTrace {
    pub index: usize,
    pub kind: AttemptKind,
    pub response: String,
    pub generated_source: Option<String>,
    pub execution: Option<ExecutionResult>,
    pub parse_error: Option<String>,
    pub parsed: Option<Solution>,
    pub llm_verifier: Option<LlmVerification>,
    /// Scoring only; never shown to the model.
    pub ground_truth: Option<VerdictReport>,
    pub confusion: Option<ConfusionLabel>,
    pub usage: Usage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl From<&ModelConfig> for ModelSettings {
    fn from(c: &ModelConfig) -> Self {
        Self {
            model_name: c.model_name.clone(),
            temperature: c.temperature,
            max_tokens: c.max_tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment_id: String,
    pub instance: String,
    pub variant: crate::routing::VariantKind,
    pub framework: FrameworkKind,
    pub context: ContextSpec,
    pub model: ModelSettings,
    pub repeat: u32,
    pub budgets: Budgets,
    pub attempts: Vec<AttemptTrace>,
    pub final_status: FinalStatus,
    /// Objective of the final solution, present only when feasible.
    pub objective: Option<f64>,
    pub usage: Usage,
    /// Dollars; `None` when the model has no price.
    pub cost: Option<f64>,
    pub llm_calls: u32,
    pub generation_calls: u32,
    /// Run time of the final attempt's program (seconds).
    pub execution_time: Option<f64>,
    pub total_execution_time: f64,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl RunRecord {
    /// Identity of a run within an experiment, used to resume.
    pub fn key(&self) -> RunKey {
        RunKey {
            instance: self.instance.clone(),
            framework: self.framework,
            context: self.context,
            model: self.model.model_name.clone(),
            repeat: self.repeat,
        }
    }

    pub fn confusion_labels(&self) -> impl Iterator<Item = ConfusionLabel> + '_ {
        self.attempts.iter().filter_map(|a| a.confusion)
    }

    /// Zeroes every timing field so records can be compared byte-for-byte.
    pub fn normalize_timing(&mut self) {
        self.wall_time = 0.0;
        self.total_execution_time = 0.0;
        if self.execution_time.is_some() {
            self.execution_time = Some(0.0);
        }
        for a in &mut self.attempts {
            if let Some(e) = &mut a.execution {
                e.wall_time = 0.0;
            }
            if let Some(t) = a.llm_verifier.as_mut().and_then(|v| v.test_execution.as_mut()) {
                t.wall_time = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunKey {
    pub instance: String,
    pub framework: FrameworkKind,
    pub context: ContextSpec,
    pub model: String,
    pub repeat: u32,
}

/// Everything a run needs besides the instance.
pub struct RunContext<'a> {
    pub provider: &'a dyn ChatProvider,
    pub model: &'a ModelConfig,
    pub assets: &'a Assets,
    pub sandbox: &'a SandboxConfig,
    pub pricing: &'a PricingTable,
    pub budgets: Budgets,
}

pub struct RunSpec<'a> {
    pub experiment_id: &'a str,
    pub instance: &'a ProblemInstance,
    pub framework: FrameworkKind,
    pub context: ContextSpec,
    pub repeat: u32,
}

struct Session<'a> {
    ctx: &'a RunContext<'a>,
    usage: Usage,
    llm_calls: u32,
}

impl Session<'_> {
    fn call(&mut self, messages: &[ChatMessage]) -> Result<(String, Usage), LlmError> {
        self.llm_calls += 1;
        let out = self.ctx.provider.complete(messages, self.ctx.model)?;
        self.usage += out.usage;
        Ok((out.text, out.usage))
    }
}

fn with_feedback(base: &[ChatMessage], response: &str, feedback: String) -> Vec<ChatMessage> {
    let mut msgs = base.to_vec();
    // an empty reply cannot be replayed as a message; keep a marker instead
    let previous = if response.trim().is_empty() { "(empty reply)" } else { response };
    msgs.push(ChatMessage::assistant(previous));
    msgs.push(ChatMessage::user(feedback));
    msgs
}

fn verify(
    session: &mut Session<'_>,
    instance: &ProblemInstance,
    solution: &Solution,
) -> Result<LlmVerification, LlmError> {
    let mut usage = Usage::default();
    let ask = constraint_prompt(instance);
    let (constraints, u) = session.call(&ask)?;
    usage += u;
    let constraints = if constraints.trim().is_empty() {
        "(no constraints listed)".to_string()
    } else {
        constraints
    };
    let (reply, u) = session.call(&unit_test_prompt(instance, &constraints, solution))?;
    usage += u;
    let source = extract_code(&reply);
    let test_execution = source
        .as_deref()
        .map(|s| execute_program(&unit_test_program(s, solution), session.ctx.sandbox));
    let verdict = match &test_execution {
        Some(e) if e.is_ok() => LlmVerdict::Pass,
        _ => LlmVerdict::Fail,
    };
    Ok(LlmVerification {
        constraints,
        unit_test_source: source,
        test_execution,
        verdict,
        usage,
    })
}

/// Runs one framework on one instance. Model transport failures end the
/// run with [`FinalStatus::Aborted`]; configuration problems are errors.
pub fn run_framework(spec: &RunSpec<'_>, ctx: &RunContext<'_>) -> Result<RunRecord, PipelineError> {
    let started = Instant::now();
    let instance = spec.instance;
    let base = build_prompt(instance, &spec.context, ctx.assets)?;
    let mut session = Session {
        ctx,
        usage: Usage::default(),
        llm_calls: 0,
    };
    let mut attempts: Vec<AttemptTrace> = Vec::new();
    let mut generation_calls = 0u32;
    let mut error = None;

    let mut messages = base.clone();
    let mut kind = AttemptKind::Initial;
    let mut debug_round = 0u32;
    let mut verification_round = 0u32;
    loop {
        let (response, usage) = match session.call(&messages) {
            Ok(r) => r,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        generation_calls += 1;
        let source = extract_code(&response);
        let execution = source.as_deref().map(|s| execute_program(s, ctx.sandbox));
        let (parsed, parse_error) = match &execution {
            Some(e) if e.is_ok() => match parse_solution(&e.stdout, instance) {
                Ok(s) => (Some(s), None),
                Err(err) => (None, Some(err.to_string())),
            },
            _ => (None, None),
        };
        let ground_truth = parsed.as_ref().map(|s| check_feasible(instance, s));
        let mut trace = AttemptTrace {
            index: attempts.len(),
            kind,
            response,
            generated_source: source,
            execution,
            parse_error,
            parsed,
            llm_verifier: None,
            ground_truth,
            confusion: None,
            usage,
        };

        let Some(solution) = trace.parsed.clone() else {
            let feedback = debug_feedback(trace.execution.as_ref(), trace.parse_error.as_deref());
            let response = trace.response.clone();
            attempts.push(trace);
            if spec.framework == FrameworkKind::SingleAttempt || debug_round >= ctx.budgets.max_debug_rounds {
                break;
            }
            debug_round += 1;
            kind = AttemptKind::Debug;
            messages = with_feedback(&base, &response, feedback);
            continue;
        };
        if spec.framework != FrameworkKind::SelfDebugVerify {
            attempts.push(trace);
            break;
        }

        let check = match verify(&mut session, instance, &solution) {
            Ok(v) => v,
            Err(e) => {
                error = Some(e.to_string());
                attempts.push(trace);
                break;
            }
        };
        let verdict = check.verdict;
        let feedback = verification_feedback(check.test_execution.as_ref());
        trace.confusion = trace.ground_truth.as_ref().map(|g| classify_verifier_outcome(verdict, g));
        trace.llm_verifier = Some(check);
        let response = trace.response.clone();
        attempts.push(trace);
        if verdict == LlmVerdict::Pass || verification_round >= ctx.budgets.max_verification_rounds {
            break;
        }
        verification_round += 1;
        debug_round = 0;
        kind = AttemptKind::Verification;
        messages = with_feedback(&base, &response, feedback);
    }

    let last = attempts.last();
    let final_status = if error.is_some() {
        FinalStatus::Aborted
    } else {
        match last.and_then(|a| a.ground_truth.as_ref()) {
            Some(g) if g.feasible => FinalStatus::Feasible,
            Some(_) => FinalStatus::Infeasible,
            None => FinalStatus::NoSolution,
        }
    };
    let objective = match (final_status, last.and_then(|a| a.parsed.as_ref())) {
        (FinalStatus::Feasible, Some(s)) => evaluate(instance, s).ok().map(|o| o.value),
        _ => None,
    };
    let execution_time = last.and_then(|a| a.execution.as_ref()).map(|e| e.wall_time);
    let total_execution_time = attempts.iter().filter_map(|a| a.execution.as_ref()).map(|e| e.wall_time).sum();
    Ok(RunRecord {
        experiment_id: spec.experiment_id.to_string(),
        instance: instance.name.clone(),
        variant: instance.kind(),
        framework: spec.framework,
        context: spec.context,
        model: ModelSettings::from(ctx.model),
        repeat: spec.repeat,
        budgets: ctx.budgets,
        attempts,
        final_status,
        objective,
        usage: session.usage,
        cost: cost(session.usage, &ctx.model.model_name, ctx.pricing),
        llm_calls: session.llm_calls,
        generation_calls,
        execution_time,
        total_execution_time,
        wall_time: started.elapsed().as_secs_f64(),
        error,
    })
}

/// Appends one record as a JSON line.
pub fn append_record(path: &Path, record: &RunRecord) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
    }
    let mut line = serde_json::to_string(record).expect("record serializes");
    line.push('\n');
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| PipelineError::io(path, e))?;
    f.write_all(line.as_bytes()).map_err(|e| PipelineError::io(path, e))
}

/// Reads a JSON-lines record file. A torn final line (interrupted write)
/// is skipped; malformed lines elsewhere are errors.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, PipelineError> {
    let f = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let lines: Vec<String> = BufReader::new(f)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::io(path, e))?;
    let mut out = Vec::new();
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if Some(i) == last => {}
            Err(e) => {
                return Err(PipelineError::Record {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

pub fn completed_keys(records: &[RunRecord]) -> BTreeSet<RunKey> {
    records.iter().map(RunRecord::key).collect()
}

/// Summarizes a paper once; later calls with the same text read the
/// cached file `<cache_dir>/<sha256>.txt`. Returns the summary and whether
/// it came from the cache.
pub fn summarize_paper(
    paper_text: &str,
    provider: &dyn ChatProvider,
    model: &ModelConfig,
    cache_dir: &Path,
) -> Result<(String, bool), PipelineError> {
    if paper_text.trim().is_empty() {
        return Err(PipelineError::Parameter("paper text is empty".into()));
    }
    let digest = hex::encode(Sha256::digest(paper_text.as_bytes()));
    let path = cache_dir.join(format!("{digest}.txt"));
    if let Ok(text) = fs::read_to_string(&path) {
        return Ok((text, true));
    }
    let messages = [
        ChatMessage::system("You summarize research papers on routing algorithms for engineers who will implement them."),
        ChatMessage::user(format!(
            "Summarize the following paper. Keep the problem definition, the algorithm steps and any \
             implementation details needed to reproduce the method.\n\n{paper_text}"
        )),
    ];
    let out = provider.complete(&messages, model)?;
    fs::create_dir_all(cache_dir).map_err(|e| PipelineError::io(cache_dir, e))?;
    fs::write(&path, &out.text).map_err(|e| PipelineError::io(&path, e))?;
    Ok((out.text, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{Completion, ProviderKind, RecordingProvider, ReplayProvider, ScriptedProvider};
    use crate::verifier::{ConstraintId, Violation};

    fn report(feasible: bool) -> VerdictReport {
        VerdictReport {
            feasible,
            violations: if feasible {
                vec![]
            } else {
                vec![Violation {
                    constraint: ConstraintId::Coverage,
                    detail: "location 2 is never visited".into(),
                }]
            },
        }
    }

    #[test]
    fn confusion_labels() {
        use ConfusionLabel::*;
        assert_eq!(classify_verifier_outcome(LlmVerdict::Fail, &report(true)), FalseNegative);
        assert_eq!(classify_verifier_outcome(LlmVerdict::Pass, &report(false)), FalsePositive);
        assert_eq!(classify_verifier_outcome(LlmVerdict::Pass, &report(true)), TruePositive);
        assert_eq!(classify_verifier_outcome(LlmVerdict::Fail, &report(false)), TrueNegative);
    }

    #[test]
    fn budget_bound() {
        let b = Budgets::default();
        assert_eq!(b.max_generation_calls(FrameworkKind::SingleAttempt), 1);
        assert_eq!(b.max_generation_calls(FrameworkKind::SelfDebug), 4);
        assert_eq!(b.max_generation_calls(FrameworkKind::SelfDebugVerify), 12);
    }

    #[test]
    fn context_spec_rules() {
        assert!(ContextSpec::new(ContextKind::PseudoCode, None).is_err());
        assert!(ContextSpec::new(ContextKind::PaperSummary, Some(2)).is_ok());
        assert_eq!(ContextSpec::new(ContextKind::PseudoCode, Some(2)).unwrap().label(), "pseudo-code-2");
        for f in FrameworkKind::ALL {
            assert_eq!(FrameworkKind::from_slug(f.slug()), Some(f));
        }
    }

    #[test]
    fn summary_cache() {
        let dir = tempfile::tempdir().unwrap();
        let mut model = ModelConfig::new("gpt-4-turbo-2024-04-09", ProviderKind::Replay);
        model.transcript = Some("x".into());
        let rec = RecordingProvider::new(ScriptedProvider::new(vec![Completion {
            text: "Short summary.".into(),
            usage: Usage::default(),
        }]));
        let (s, cached) = summarize_paper("A paper body.", &rec, &model, dir.path()).unwrap();
        assert_eq!((s.as_str(), cached), ("Short summary.", false));

        let replay = ReplayProvider::new(rec.entries());
        let cache2 = tempfile::tempdir().unwrap();
        let (s2, _) = summarize_paper("A paper body.", &replay, &model, cache2.path()).unwrap();
        assert_eq!(s2, s);
        assert_eq!(replay.remaining(), 0);
        // second call: cache hit, no provider calls left to serve it
        let (s3, cached) = summarize_paper("A paper body.", &replay, &model, cache2.path()).unwrap();
        assert_eq!((s3.as_str(), cached), ("Short summary.", true));
        assert!(matches!(
            summarize_paper("  ", &replay, &model, cache2.path()),
            Err(PipelineError::Parameter(_))
        ));
    }

    #[test]
    fn torn_last_line_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        fs::write(&path, "{\"experiment_id\": \"x\"").unwrap();
        assert!(read_records(&path).unwrap().is_empty());
        fs::write(&path, "{bad}\n{\"also\": 1}\n").unwrap();
        assert!(read_records(&path).is_err());
    }
}

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{request_digest, ChatMessage, ChatProvider, Completion, LlmError, ModelConfig, Usage};

/// One recorded exchange. `messages` is kept for auditing only; replay
/// matches on `digest`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub digest: String,
    pub response: String,
    pub usage: Usage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<Vec<ChatMessage>>,
}

fn io_err(path: &Path, e: impl ToString) -> LlmError {
    LlmError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptEntry>, LlmError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| LlmError::Fixture(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn write_transcript(entries: &[TranscriptEntry], path: &Path) -> Result<(), LlmError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let mut out = Vec::new();
    for e in entries {
        serde_json::to_writer(&mut out, e).expect("entry serializes");
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&out).map_err(|e| io_err(path, e))
}

/// Serves recorded responses in order, checking each request's digest.
pub struct ReplayProvider {
    entries: Vec<TranscriptEntry>,
    cursor: Mutex<usize>,
}

impl ReplayProvider {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        Self {
            entries,
            cursor: Mutex::new(0),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, LlmError> {
        Ok(Self::new(read_transcript(path)?))
    }

    pub fn served(&self) -> usize {
        *self.cursor.lock().unwrap()
    }

    pub fn remaining(&self) -> usize {
        self.entries.len() - self.served()
    }
}

impl ChatProvider for ReplayProvider {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError> {
        let mut cursor = self.cursor.lock().unwrap();
        let index = *cursor;
        let actual = request_digest(&config.model_name, config.temperature, messages);
        let Some(entry) = self.entries.get(index) else {
            return Err(LlmError::Fixture(format!(
                "transcript exhausted after {} entries; request digest {actual}",
                self.entries.len()
            )));
        };
        if entry.digest != actual {
            return Err(LlmError::ReplayMismatch {
                index,
                expected: entry.digest.clone(),
                actual,
            });
        }
        *cursor += 1;
        Ok(Completion {
            text: entry.response.clone(),
            usage: entry.usage,
        })
    }
}

/// Wraps a provider and records every successful exchange.
pub struct RecordingProvider<P> {
    inner: P,
    entries: Mutex<Vec<TranscriptEntry>>,
    keep_messages: bool,
}

impl<P: ChatProvider> RecordingProvider<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            entries: Mutex::new(Vec::new()),
            keep_messages: true,
        }
    }

    /// Drops request messages from the transcript, keeping only digests.
    pub fn without_messages(mut self) -> Self {
        self.keep_messages = false;
        self
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.entries.lock().unwrap().clone()
    }

    pub fn write(&self, path: &Path) -> Result<(), LlmError> {
        write_transcript(&self.entries(), path)
    }
}

impl<P: ChatProvider> ChatProvider for RecordingProvider<P> {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError> {
        let out = self.inner.complete(messages, config)?;
        self.entries.lock().unwrap().push(TranscriptEntry {
            digest: request_digest(&config.model_name, config.temperature, messages),
            response: out.text.clone(),
            usage: out.usage,
            messages: self.keep_messages.then(|| messages.to_vec()),
        });
        Ok(out)
    }
}

/// Returns canned responses in order without looking at the request. Used
/// to author transcripts: wrap it in a [`RecordingProvider`] and run a
/// session.
pub struct ScriptedProvider {
    responses: Vec<Completion>,
    cursor: Mutex<usize>,
}

impl ScriptedProvider {
    pub fn new(responses: Vec<Completion>) -> Self {
        Self {
            responses,
            cursor: Mutex::new(0),
        }
    }
}

impl ChatProvider for ScriptedProvider {
    fn complete(&self, _messages: &[ChatMessage], _config: &ModelConfig) -> Result<Completion, LlmError> {
        let mut cursor = self.cursor.lock().unwrap();
        let out = self
            .responses
            .get(*cursor)
            .cloned()
            .ok_or_else(|| LlmError::Fixture(format!("script exhausted after {} responses", self.responses.len())))?;
        *cursor += 1;
        Ok(out)
    }
}

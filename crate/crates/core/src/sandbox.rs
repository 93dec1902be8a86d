//! Runs generated programs in a child process with a wall-clock limit and
//! parses the routes they print.
//!
//! Isolation is for experiment hygiene only: a fresh temp directory, a
//! cleared environment and a killed process group on timeout. There is no
//! syscall or network filtering.

use std::fs;
use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::routing::{ProblemInstance, Route, Solution};

pub const PROGRAM_FILE: &str = "main.py";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

const POLL: Duration = Duration::from_millis(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExecStatus {
    Ok,
    NonzeroExit,
    Timeout,
    LaunchFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub status: ExecStatus,
    pub stdout: String,
    pub stderr: String,
    /// Seconds.
    pub wall_time: f64,
    pub exit_code: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifacts: Option<PathBuf>,
}

impl ExecutionResult {
    pub fn is_ok(&self) -> bool {
        self.status == ExecStatus::Ok
    }

    fn launch_failure(message: String) -> Self {
        Self {
            status: ExecStatus::LaunchFailure,
            stdout: String::new(),
            stderr: message,
            wall_time: 0.0,
            exit_code: None,
            artifacts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SandboxConfig {
    /// Interpreter command; the program path is appended.
    pub runner: Vec<String>,
    #[serde(with = "secs")]
    pub timeout: Duration,
    pub keep_artifacts: bool,
    /// Where kept artifact directories go (system temp dir when unset).
    pub artifacts_root: Option<PathBuf>,
    /// Variables copied from the parent environment.
    pub env_allowlist: Vec<String>,
    /// Variables set for every child.
    pub env_fixed: Vec<(String, String)>,
}

impl Default for SandboxConfig {
    fn default() -> Self {
        Self {
            runner: vec!["python3".into()],
            timeout: DEFAULT_TIMEOUT,
            keep_artifacts: false,
            artifacts_root: None,
            env_allowlist: ["PATH", "HOME", "LANG", "LC_ALL", "VIRTUAL_ENV", "PYTHONPATH", "GRB_LICENSE_FILE"]
                .map(String::from)
                .to_vec(),
            env_fixed: vec![
                ("PYTHONHASHSEED".into(), "0".into()),
                ("PYTHONDONTWRITEBYTECODE".into(), "1".into()),
                ("PYTHONIOENCODING".into(), "utf-8".into()),
            ],
        }
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

struct Semaphore {
    permits: Mutex<usize>,
    freed: Condvar,
}

struct Permit(&'static Semaphore);

impl Drop for Permit {
    fn drop(&mut self) {
        *self.0.permits.lock().unwrap() += 1;
        self.0.freed.notify_one();
    }
}

fn acquire_slot() -> Permit {
    static SLOTS: OnceLock<Semaphore> = OnceLock::new();
    let sem = SLOTS.get_or_init(|| Semaphore {
        permits: Mutex::new(thread::available_parallelism().map_or(4, |n| n.get())),
        freed: Condvar::new(),
    });
    let mut p = sem.permits.lock().unwrap();
    while *p == 0 {
        p = sem.freed.wait(p).unwrap();
    }
    *p -= 1;
    Permit(sem)
}

fn drain<R: Read + Send + 'static>(r: Option<R>) -> thread::JoinHandle<Vec<u8>> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut r) = r {
            let _ = r.read_to_end(&mut buf);
        }
        buf
    })
}

/// Writes `source` to a fresh directory and runs it there.
pub fn execute_program(source: &str, config: &SandboxConfig) -> ExecutionResult {
    let Some((program, args)) = config.runner.split_first() else {
        return ExecutionResult::launch_failure("no runner command configured".into());
    };
    if source.trim().is_empty() {
        return ExecutionResult::launch_failure("empty program source".into());
    }
    let dir = {
        let mut b = tempfile::Builder::new();
        b.prefix("routebench-");
        match &config.artifacts_root {
            Some(root) => fs::create_dir_all(root).and_then(|_| b.tempdir_in(root)),
            None => b.tempdir(),
        }
    };
    let dir = match dir {
        Ok(d) => d,
        Err(e) => return ExecutionResult::launch_failure(format!("cannot create work dir: {e}")),
    };
    if let Err(e) = fs::write(dir.path().join(PROGRAM_FILE), source) {
        return ExecutionResult::launch_failure(format!("cannot write program: {e}"));
    }

    let mut result = run_in(dir.path(), program, args, config);
    if config.keep_artifacts {
        let _ = fs::write(dir.path().join("stdout.txt"), &result.stdout);
        let _ = fs::write(dir.path().join("stderr.txt"), &result.stderr);
        result.artifacts = Some(dir.keep());
    }
    result
}

fn run_in(dir: &Path, program: &str, args: &[String], config: &SandboxConfig) -> ExecutionResult {
    let mut cmd = Command::new(program);
    cmd.args(args)
        .arg(PROGRAM_FILE)
        .current_dir(dir)
        .env_clear()
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0);
    for key in &config.env_allowlist {
        if let Some(v) = std::env::var_os(key) {
            cmd.env(key, v);
        }
    }
    for (k, v) in &config.env_fixed {
        cmd.env(k, v);
    }

    let _permit = acquire_slot();
    let started = Instant::now();
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return ExecutionResult::launch_failure(format!("cannot launch `{program}`: {e}")),
    };
    let out = drain(child.stdout.take());
    let err = drain(child.stderr.take());

    let mut timed_out = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break Some(s),
            Ok(None) if started.elapsed() >= config.timeout => {
                timed_out = true;
                // negative pid addresses the whole group, so grandchildren die too
                unsafe {
                    libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
                }
                let _ = child.kill();
                break child.wait().ok();
            }
            Ok(None) => thread::sleep(POLL),
            Err(_) => break None,
        }
    };
    let wall_time = started.elapsed().as_secs_f64();
    // A surviving grandchild may hold the pipes open; the group kill above
    // covers the timeout path, and normal exits close them.
    let stdout = String::from_utf8_lossy(&out.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err.join().unwrap_or_default()).into_owned();
    let exit_code = status.and_then(|s| s.code());
    let status = if timed_out {
        ExecStatus::Timeout
    } else if exit_code == Some(0) {
        ExecStatus::Ok
    } else {
        ExecStatus::NonzeroExit
    };
    ExecutionResult {
        status,
        stdout,
        stderr,
        wall_time,
        exit_code,
        artifacts: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum ParseError {
    #[error("no solution found in program output")]
    NoSolution,
    #[error("location id {0} does not exist in the instance")]
    UnknownId(i64),
    #[error("malformed routes: {0}")]
    Malformed(String),
}

/// Extracts routes from program output.
///
/// Prefers the last JSON object with a `routes` key. Otherwise takes the
/// last run of consecutive lines that each hold two or more integer ids
/// (brackets, commas, arrows and a `label:` prefix are tolerated).
pub fn parse_solution(stdout: &str, instance: &ProblemInstance) -> Result<Solution, ParseError> {
    let raw = match last_routes_object(stdout) {
        Some(v) => routes_from_json(&v)?,
        None => routes_from_lines(stdout).ok_or(ParseError::NoSolution)?,
    };
    let n = instance.n() as i64;
    let mut routes = Vec::with_capacity(raw.len());
    for r in raw {
        if let Some(&bad) = r.iter().find(|&&id| id < 0 || id >= n) {
            return Err(ParseError::UnknownId(bad));
        }
        routes.push(Route::new(r.into_iter().map(|id| id as usize).collect()));
    }
    Ok(Solution::new(routes))
}

fn last_routes_object(text: &str) -> Option<Value> {
    for (i, _) in text.rmatch_indices('{') {
        let mut it = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        if let Some(Ok(v)) = it.next() {
            if v.get("routes").is_some() {
                return Some(v);
            }
        }
    }
    None
}

fn id_of(v: &Value) -> Result<i64, ParseError> {
    if let Some(i) = v.as_i64() {
        return Ok(i);
    }
    match v.as_f64() {
        Some(f) if f.fract() == 0.0 && f.abs() < 1e15 => Ok(f as i64),
        _ => Err(ParseError::Malformed(format!("{v} is not an integer id"))),
    }
}

fn routes_from_json(v: &Value) -> Result<Vec<Vec<i64>>, ParseError> {
    let Some(list) = v["routes"].as_array() else {
        return Err(ParseError::Malformed("\"routes\" is not a list".into()));
    };
    // a flat id list is read as one route
    if !list.is_empty() && list.iter().all(|x| !x.is_array()) {
        return Ok(vec![list.iter().map(id_of).collect::<Result<_, _>>()?]);
    }
    list.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| ParseError::Malformed(format!("route {r} is not a list")))?
                .iter()
                .map(id_of)
                .collect()
        })
        .collect()
}

fn ids_in_line(line: &str) -> Option<Vec<i64>> {
    let body = line.rsplit_once(':').map_or(line, |(_, b)| b);
    let cleaned: String = body
        .chars()
        .map(|c| if "[](),;->".contains(c) { ' ' } else { c })
        .collect();
    let ids: Option<Vec<i64>> = cleaned.split_whitespace().map(|t| t.parse().ok()).collect();
    ids.filter(|v| v.len() >= 2)
}

fn routes_from_lines(text: &str) -> Option<Vec<Vec<i64>>> {
    let mut best: Option<Vec<Vec<i64>>> = None;
    let mut cur: Vec<Vec<i64>> = Vec::new();
    for line in text.lines() {
        match ids_in_line(line) {
            Some(ids) => cur.push(ids),
            None if line.trim().is_empty() => {}
            None => {
                if !cur.is_empty() {
                    best = Some(std::mem::take(&mut cur));
                }
            }
        }
    }
    if !cur.is_empty() {
        best = Some(cur);
    }
    best
}

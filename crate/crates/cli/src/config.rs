//! Harness configuration file. Every field is optional and command-line
//! flags take precedence. Relative paths are resolved against the file's
//! directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use routebench_core::pipeline::Budgets;
use routebench_core::sandbox::SandboxConfig;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Interpreter command for generated programs, e.g. `["python3"]`.
    pub runner: Option<Vec<String>>,
    pub timeout_secs: Option<f64>,
    pub keep_artifacts: Option<bool>,
    pub artifacts_dir: Option<PathBuf>,
    pub max_debug_rounds: Option<u32>,
    pub max_verification_rounds: Option<u32>,
    pub pricing: Option<PathBuf>,
    pub assets: Option<PathBuf>,
    pub cvrplib: Option<PathBuf>,
    pub workers: Option<usize>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub api_base: Option<String>,
    pub api_key_env: Option<String>,
    pub request_timeout_secs: Option<f64>,
    /// Multi-robot search budget for `solve`.
    pub solve_budget_secs: Option<f64>,
}

impl HarnessConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Environment(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.artifacts_dir,
            &mut cfg.pricing,
            &mut cfg.assets,
            &mut cfg.cvrplib,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn sandbox(&self, runner: Option<&str>, timeout_secs: Option<f64>) -> CliResult<SandboxConfig> {
        let mut sb = SandboxConfig::default();
        if let Some(r) = runner {
            sb.runner = r.split_whitespace().map(String::from).collect();
        } else if let Some(r) = &self.runner {
            sb.runner = r.clone();
        }
        if sb.runner.is_empty() {
            return Err(CliError::Usage("runner command is empty".into()));
        }
        if let Some(t) = timeout_secs.or(self.timeout_secs) {
            sb.timeout = positive_secs(t, "timeout")?;
        }
        sb.keep_artifacts = self.keep_artifacts.unwrap_or(false);
        sb.artifacts_root = self.artifacts_dir.clone();
        Ok(sb)
    }

    pub fn budgets(&self, debug: Option<u32>, verify: Option<u32>) -> Budgets {
        let d = Budgets::default();
        Budgets {
            max_debug_rounds: debug.or(self.max_debug_rounds).unwrap_or(d.max_debug_rounds),
            max_verification_rounds: verify.or(self.max_verification_rounds).unwrap_or(d.max_verification_rounds),
        }
    }
}

pub fn positive_secs(secs: f64, what: &str) -> CliResult<Duration> {
    if secs.is_finite() && secs > 0.0 {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err(CliError::Usage(format!("{what} must be a positive number of seconds, got {secs}")))
    }
}

/// Flag, then config, then `rel` under the working directory, then `rel`
/// under the source checkout the binary was built from.
pub fn resource(flag: Option<&Path>, configured: Option<&Path>, rel: &str) -> PathBuf {
    if let Some(p) = flag.or(configured) {
        return p.to_path_buf();
    }
    let local = PathBuf::from(rel);
    if local.exists() {
        return local;
    }
    let checkout = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel);
    if checkout.exists() {
        checkout
    } else {
        local
    }
}

pub fn parse_kind(s: &str) -> Result<routebench_core::VariantKind, String> {
    routebench_core::VariantKind::from_slug(s).ok_or_else(|| {
        let all: Vec<&str> = routebench_core::VariantKind::ALL.iter().map(|k| k.slug()).collect();
        format!("unknown variant {s:?}; expected one of {}", all.join(", "))
    })
}

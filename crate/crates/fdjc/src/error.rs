use std::path::PathBuf;

use fdjc_core::dynamics::DynamicsError;
use fdjc_core::observables::ObservableError;
use serde_json::json;
use thiserror::Error;

fn hint(suggestion: &Option<String>) -> String {
    suggestion
        .as_ref()
        .map(|s| format!("; did you mean `{s}`?"))
        .unwrap_or_default()
}

fn at_line(line: &Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {message}")]
    Parse {
        origin: String,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
    #[error("unknown key `{key}`{}{}", at_line(.line), hint(.suggestion))]
    UnknownKey {
        key: String,
        line: Option<usize>,
        suggestion: Option<String>,
    },
    #[error("missing key `{key}`")]
    MissingKey { key: String },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("unknown preset `{name}`{}", hint(.suggestion))]
    UnknownPreset {
        name: String,
        suggestion: Option<String>,
    },
    #[error("unknown observable `{name}`{}", hint(.suggestion))]
    UnknownObservable {
        name: String,
        suggestion: Option<String>,
    },
    #[error("cannot read {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub(crate) fn invalid(key: &str, message: impl Into<String>) -> Self {
        Self::InvalidValue {
            key: key.to_owned(),
            message: message.into(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "parse_error",
            Self::UnknownKey { .. } => "unknown_key",
            Self::MissingKey { .. } => "missing_key",
            Self::InvalidValue { .. } => "invalid_value",
            Self::UnknownPreset { .. } => "unknown_preset",
            Self::UnknownObservable { .. } => "unknown_observable",
            Self::Read { .. } => "read_error",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error("cannot write {}: {source}", .path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} checks exceeded their tolerance")]
    Verification { failed: usize, total: usize },
}

impl RunError {
    /// 2 for configuration problems, 3 for numerical failures, 1 for output IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Dynamics(DynamicsError::InvalidParams(_) | DynamicsError::Deformation(_)) => 2,
            Self::Dynamics(_) | Self::Observable(_) | Self::Verification { .. } => 3,
            Self::Write { .. } => 1,
        }
    }

    /// Single-line JSON description written to stderr by the CLI.
    pub fn record(&self) -> serde_json::Value {
        let message = self.to_string();
        match self {
            Self::Config(e) => {
                let mut rec = json!({ "error": e.kind(), "message": message });
                match e {
                    ConfigError::Parse {
                        line, column, origin, ..
                    } => {
                        rec["origin"] = json!(origin);
                        rec["line"] = json!(line);
                        rec["column"] = json!(column);
                    }
                    ConfigError::UnknownKey {
                        key,
                        line,
                        suggestion,
                    } => {
                        rec["key"] = json!(key);
                        rec["line"] = json!(line);
                        rec["suggestion"] = json!(suggestion);
                    }
                    ConfigError::MissingKey { key } | ConfigError::InvalidValue { key, .. } => {
                        rec["key"] = json!(key);
                    }
                    ConfigError::UnknownPreset { name, suggestion }
                    | ConfigError::UnknownObservable { name, suggestion } => {
                        rec["name"] = json!(name);
                        rec["suggestion"] = json!(suggestion);
                    }
                    ConfigError::Read { path, .. } => rec["path"] = json!(path),
                }
                rec
            }
            Self::Dynamics(DynamicsError::Blocks(blocks)) => json!({
                "error": "block_failure",
                "message": message,
                "failed_blocks": blocks.len(),
                "first": { "n": blocks[0].n, "p": blocks[0].p },
            }),
            Self::Dynamics(_) => json!({ "error": "invalid_parameters", "message": message }),
            Self::Observable(_) => json!({ "error": "observable_failure", "message": message }),
            Self::Write { path, .. } => json!({ "error": "write_error", "message": message, "path": path }),
            Self::Verification { failed, total } => json!({
                "error": "verification_failed",
                "message": message,
                "failed": failed,
                "total": total,
            }),
        }
    }
}

/// Closest candidate by normalized Levenshtein similarity, if any is close.
pub(crate) fn nearest<'a>(input: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<String> {
    candidates
        .into_iter()
        .map(|c| (strsim::normalized_levenshtein(input, c), c))
        .filter(|(score, _)| *score >= 0.5)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c.to_owned())
}

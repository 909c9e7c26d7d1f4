use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{CyclotomicNumber, Rational};

/// Environment variable overriding the results directory.
pub const RESULTS_DIR_ENV: &str = "ETAQUOT_RESULTS_DIR";
const DEFAULT_RESULTS_DIR: &str = "results";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Suited,
    NotSuited,
    Proved,
    Refuted,
}

impl Verdict {
    /// `suited` and `proved` are positive outcomes.
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Suited | Verdict::Proved)
    }
}

/// Evidence attached to a negative verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `X_{S₁',R'}(a/c; m) ≠ X_{S₂',R'}(a/c; m)`.
    Cusp {
        a: i64,
        c: i64,
        m: Rational,
        x1: CyclotomicNumber,
        x2: CyclotomicNumber,
    },
    /// Differing coefficients of `q^index`.
    Coefficient {
        index: i64,
        left: String,
        right: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub parameters: serde_json::Value,
    /// Wall-clock milliseconds; absent from deterministic output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Certificate {
    pub fn new(verdict: Verdict, witnesses: Vec<Witness>, parameters: serde_json::Value) -> Self {
        Certificate {
            verdict,
            witnesses,
            parameters,
            runtime_ms: None,
        }
    }

    /// The certificate without its runtime, for byte-stable output.
    pub fn without_runtime(&self) -> Self {
        Certificate {
            runtime_ms: None,
            ..self.clone()
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `ETAQUOT_RESULTS_DIR`, or `results` in the working directory.
pub fn results_dir() -> PathBuf {
    std::env::var_os(RESULTS_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RESULTS_DIR))
}

/// Writes `certificate` to `<dir>/<digest of config>.json`.
pub fn persist_certificate(dir: &Path, config_text: &str, certificate: &Certificate) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", sha256_hex(config_text.as_bytes())));
    let text = serde_json::to_string_pretty(certificate)
        .map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

/// Progress record for a long job. `digest` covers every other field, so a
/// truncated or edited file is rejected on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub job: String,
    pub config_digest: String,
    pub progress: u64,
    pub state: String,
    pub digest: String,
}

impl Checkpoint {
    pub fn new(job: &str, config_text: &str, progress: u64, state: String) -> Self {
        let mut c = Checkpoint {
            version: CHECKPOINT_VERSION,
            job: job.to_string(),
            config_digest: sha256_hex(config_text.as_bytes()),
            progress,
            state,
            digest: String::new(),
        };
        c.digest = c.body_digest();
        c
    }

    fn body_digest(&self) -> String {
        sha256_hex(
            format!(
                "{}\n{}\n{}\n{}\n{}",
                self.version, self.job, self.config_digest, self.progress, self.state
            )
            .as_bytes(),
        )
    }

    pub fn path(dir: &Path, job: &str, config_text: &str) -> PathBuf {
        dir.join(format!("{}.{job}.checkpoint.json", sha256_hex(config_text.as_bytes())))
    }

    pub fn save(&self, dir: &Path, config_text: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        let path = Self::path(dir, &self.job, config_text);
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Loads and validates the checkpoint for `(job, config)`, if one exists.
    pub fn load(dir: &Path, job: &str, config_text: &str) -> Result<Option<Self>> {
        let path = Self::path(dir, job, config_text);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let c: Checkpoint =
            serde_json::from_str(&text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if c.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", c.version)));
        }
        if c.job != job || c.config_digest != sha256_hex(config_text.as_bytes()) {
            return Err(Error::Checkpoint("checkpoint belongs to another job".into()));
        }
        if c.digest != c.body_digest() {
            return Err(Error::Checkpoint("content digest mismatch".into()));
        }
        Ok(Some(c))
    }

    pub fn remove(dir: &Path, job: &str, config_text: &str) -> Result<()> {
        match fs::remove_file(Self::path(dir, job, config_text)) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }
}

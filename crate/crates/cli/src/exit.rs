use std::fmt;
use std::path::Path;

use qsep::gen::GenError;
use qsep::harness::HarnessError;
use qsep::oracle::io::IoError;
use serde::Serialize;

/// Why a command stopped. Each kind has a fixed exit code.
#[derive(Debug)]
pub enum Failure {
    /// A check failed (exit 1).
    Verify(String),
    /// Parameters that cannot be realized (exit 2).
    Infeasible { msg: String, hint: Option<String> },
    /// Detector and instance disagree on the model (exit 3).
    Mismatch(String),
    /// Reading or writing a file failed (exit 4).
    Io(String),
}

pub type Outcome = Result<(), Failure>;

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Infeasible { .. } => 2,
            Failure::Mismatch(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn hint(&self) -> Option<&str> {
        match self {
            Failure::Infeasible { hint, .. } => hint.as_deref(),
            _ => None,
        }
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Failure::Infeasible {
            msg: msg.into(),
            hint: None,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verify(m) | Failure::Mismatch(m) | Failure::Io(m) => f.write_str(m),
            Failure::Infeasible { msg, .. } => f.write_str(msg),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        let hint = match &e {
            GenError::PrimeShortage { .. } => Some("pass --widen to grow the prime window".to_string()),
            GenError::Capacity { .. } => {
                Some("lower --c, narrow --scales, fix a smaller --rho or raise --n".to_string())
            }
            _ => None,
        };
        Failure::Infeasible {
            msg: e.to_string(),
            hint,
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::ModelMismatch { .. } => Failure::Mismatch(e.to_string()),
            HarnessError::Gen(g) => g.into(),
            HarnessError::Config(_) => Failure::infeasible(e.to_string()),
            HarnessError::Meta(_) => Failure::Verify(e.to_string()),
            HarnessError::Io(_) => Failure::Io(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e.to_string())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    qsep::oracle::io::write_json(path, value)?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

//! JSON container for instances. The payload file never carries metadata;
//! ground truth travels in a separate sidecar flagged `ground-truth: true`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{FunctionInstance, GraphInstance, Instance, InstanceError, Model};
use crate::meta::{Certificate, StructureMeta};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: invalid instance: {source}")]
    Invalid {
        path: String,
        #[source]
        source: InstanceError,
    },
    #[error("{path}: header says n = {header} but payload has {payload} entries")]
    SizeMismatch {
        path: String,
        header: usize,
        payload: usize,
    },
    #[error("{0}: sidecar is not flagged as ground truth")]
    NotGroundTruth(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceHeader {
    pub model: Model,
    pub n: usize,
    pub seed: u64,
    pub construction: String,
    pub parameters: serde_json::Value,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    Succ(Vec<u32>),
    Adj(Vec<Vec<u32>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub header: InstanceHeader,
    pub payload: Payload,
}

impl InstanceFile {
    pub fn from_instance(header: InstanceHeader, inst: &Instance) -> Self {
        let payload = match inst {
            Instance::Function(f) => Payload::Succ(f.succ().to_vec()),
            Instance::Graph(g) => Payload::Adj(g.adjacency()),
        };
        InstanceFile { header, payload }
    }

    /// Rebuilds the instance, validating it. Metadata is not attached.
    pub fn to_instance(&self, path: &str) -> Result<Instance, IoError> {
        let invalid = |source| IoError::Invalid {
            path: path.to_string(),
            source,
        };
        let inst = match &self.payload {
            Payload::Succ(s) => Instance::Function(FunctionInstance::new(s.clone()).map_err(invalid)?),
            Payload::Adj(a) => Instance::Graph(GraphInstance::from_adjacency(a.clone()).map_err(invalid)?),
        };
        if inst.n() != self.header.n {
            return Err(IoError::SizeMismatch {
                path: path.to_string(),
                header: self.header.n,
                payload: inst.n(),
            });
        }
        Ok(inst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaFile {
    #[serde(rename = "ground-truth")]
    pub ground_truth: bool,
    pub config_hash: String,
    pub meta: StructureMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub config_hash: String,
    pub certificate: Certificate,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string(value).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Fs {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Fs {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<(InstanceHeader, Instance), IoError> {
    let file: InstanceFile = read_json(path)?;
    let inst = file.to_instance(&path.display().to_string())?;
    Ok((file.header, inst))
}

pub fn read_meta(path: &Path) -> Result<StructureMeta, IoError> {
    let file: MetaFile = read_json(path)?;
    if !file.ground_truth {
        return Err(IoError::NotGroundTruth(path.display().to_string()));
    }
    Ok(file.meta)
}

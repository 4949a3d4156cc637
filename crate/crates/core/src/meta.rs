//! Generator-side ground truth and the unlabeled hints handed to
//! certificate-holding detectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::oracle::Witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    Path,
    Cycle,
    Feeder,
    Star,
    Backbone,
    Isolated,
    WitnessGadget,
}

/// One planted structure. `members` are listed in traversal order: along the
/// path or cycle for paths/cycles/feeders, center first for stars, `v_0`
/// first for the backbone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub kind: StructureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u32>,
    pub members: Vec<u32>,
}

impl Structure {
    pub fn new(kind: StructureKind, members: Vec<u32>) -> Self {
        Structure {
            kind,
            scale: None,
            prime: None,
            index: None,
            members,
        }
    }

    pub fn with_scale(mut self, scale: u32) -> Self {
        self.scale = Some(scale);
        self
    }

    pub fn with_prime(mut self, prime: u32) -> Self {
        self.prime = Some(prime);
        self
    }

    pub fn with_index(mut self, index: u32) -> Self {
        self.index = Some(index);
        self
    }
}

/// Hidden metadata emitted by every generator. Never reachable through an
/// oracle; verification tools read it directly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureMeta {
    pub construction: String,
    pub structures: Vec<Structure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_index: Option<u32>,
    /// Planted witnesses, in internal labels.
    pub witnesses: Vec<Witness>,
    /// Construction-specific facts (capacity report, widened prime window,
    /// wiring notes). Kept as an ordered map so serialization is stable.
    #[serde(default)]
    pub notes: BTreeMap<String, serde_json::Value>,
}

impl StructureMeta {
    pub fn new(construction: impl Into<String>) -> Self {
        StructureMeta {
            construction: construction.into(),
            ..Default::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("note values are plain data");
        self.notes.insert(key.to_string(), v);
    }

    /// Checks that member lists are pairwise disjoint and cover `[n]`.
    pub fn check_partition(&self, n: usize) -> Result<(), String> {
        let mut owner = vec![u32::MAX; n];
        for (si, s) in self.structures.iter().enumerate() {
            for &m in &s.members {
                let m = m as usize;
                if m >= n {
                    return Err(format!("structure {si} lists element {m} outside [0, {n})"));
                }
                if owner[m] != u32::MAX {
                    return Err(format!(
                        "element {m} belongs to structures {} and {si}",
                        owner[m]
                    ));
                }
                owner[m] = si as u32;
            }
        }
        if let Some(missing) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(format!("element {missing} is not covered by any structure"));
        }
        Ok(())
    }

    /// Applies a label map to every member and witness.
    pub fn mapped(&self, map: impl Fn(u32) -> u32) -> StructureMeta {
        StructureMeta {
            construction: self.construction.clone(),
            structures: self
                .structures
                .iter()
                .map(|s| Structure {
                    members: s.members.iter().map(|&m| map(m)).collect(),
                    ..s.clone()
                })
                .collect(),
            good_index: self.good_index,
            witnesses: self
                .witnesses
                .iter()
                .map(|w| w.mapped(|v| map(v as u32) as usize))
                .collect(),
            notes: self.notes.clone(),
        }
    }

    pub fn count_kind(&self, kind: StructureKind, scale: Option<u32>) -> usize {
        self.structures
            .iter()
            .filter(|s| s.kind == kind && (scale.is_none() || s.scale == scale))
            .count()
    }
}

/// The untrusted hint. It carries only label-free structural parameters, so
/// it stays valid under any relabeling of the instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    CollisionScale { t: u32 },
    ClawScale { t: u32 },
    FixedPointPrimes { primes: Vec<u32> },
    StarDegrees { degrees: Vec<u32> },
    BackboneIndex { index: u32 },
    PathLength { k: u32 },
}

impl Certificate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Certificate::CollisionScale { .. } => "collision-scale",
            Certificate::ClawScale { .. } => "claw-scale",
            Certificate::FixedPointPrimes { .. } => "fixed-point-primes",
            Certificate::StarDegrees { .. } => "star-degrees",
            Certificate::BackboneIndex { .. } => "backbone-index",
            Certificate::PathLength { .. } => "path-length",
        }
    }
}

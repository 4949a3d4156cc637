//! Ground-truth checks for a generated instance: the metadata partitions
//! `[n]` and matches the wiring, declared witness counts agree with an
//! exhaustive search, and construction-specific invariants hold.

use std::collections::BTreeMap;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::detect::{brute_force_find, BruteTarget, BRUTE_FORCE_LIMIT};
use crate::gen::{FunctionPattern, GraphPattern};
use crate::meta::{StructureKind, StructureMeta};
use crate::oracle::{FunctionInstance, GraphInstance, Instance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, result: Result<String, String>) -> Self {
        let (ok, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Check {
            name: name.to_string(),
            ok,
            detail,
        }
    }
}

/// Runs every applicable check, in a fixed order. A failed check does not
/// stop later ones.
pub fn verify_instance(inst: &Instance, meta: &StructureMeta) -> Vec<Check> {
    let mut out = vec![Check::new("partition", partition(inst, meta))];
    out.push(Check::new("witnesses", declared_witnesses(inst, meta)));
    let count_name = match brute_target(meta) {
        Some(BruteTarget::Collision) => "collisions",
        _ => "witness-count",
    };
    out.push(Check::new(count_name, witness_count(inst, meta)));
    if meta.construction == "fixedpoint-fn" {
        out.push(Check::new("prime-spacing", prime_spacing(inst, meta)));
    }
    if meta.construction == "star-graph" {
        out.push(Check::new("degree-uniqueness", degree_uniqueness(inst, meta)));
    }
    out
}

/// The first failing check, if any.
pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.ok)
}

fn partition(inst: &Instance, meta: &StructureMeta) -> Result<String, String> {
    meta.check_partition(inst.n())?;
    match inst {
        Instance::Function(f) => function_wiring(f, meta)?,
        Instance::Graph(g) => graph_wiring(g, meta)?,
    }
    Ok(format!("{} structures cover {} elements", meta.structures.len(), inst.n()))
}

fn function_wiring(f: &FunctionInstance, meta: &StructureMeta) -> Result<(), String> {
    // The planted pattern overrides the cycle successor of its entries; the
    // witness check covers those edges.
    let rewired: FxHashSet<u32> = if meta.construction == "fixedpoint-fn" {
        meta.witnesses.iter().flat_map(|w| w.vertices.iter().copied()).collect()
    } else {
        FxHashSet::default()
    };
    let step = |a: u32, b: u32| -> Result<(), String> {
        if rewired.contains(&a) || f.f(a as usize) == b as usize {
            Ok(())
        } else {
            Err(format!("f({a}) = {} but the metadata expects {b}", f.f(a as usize)))
        }
    };
    let mut cycle_of: BTreeMap<u32, &[u32]> = BTreeMap::new();
    for s in &meta.structures {
        if s.kind == StructureKind::Cycle {
            if let Some(i) = s.index {
                cycle_of.insert(i, &s.members);
            }
        }
    }
    for s in &meta.structures {
        let m = &s.members;
        match s.kind {
            StructureKind::Cycle => {
                for w in m.windows(2) {
                    step(w[0], w[1])?;
                }
                step(*m.last().unwrap(), m[0])?;
            }
            StructureKind::Path => {
                for w in m.windows(2) {
                    step(w[0], w[1])?;
                }
                let last = *m.last().unwrap();
                let y = f.f(last as usize) as u32;
                if !m[1..m.len() - 1].contains(&y) {
                    return Err(format!("witness path end {last} maps to {y}, outside its interior"));
                }
            }
            StructureKind::Isolated => {
                if let Some(&x) = m.iter().find(|&&x| f.f(x as usize) != x as usize) {
                    return Err(format!("filler element {x} is not a fixed point"));
                }
            }
            // Random-function feeders are unordered tree elements.
            StructureKind::Feeder if s.prime.is_some() => {
                for w in m.windows(2) {
                    step(w[0], w[1])?;
                }
                let cyc = s.index.and_then(|i| cycle_of.get(&i)).ok_or("feeder without a cycle")?;
                let y = f.f(*m.last().unwrap() as usize) as u32;
                if !cyc.contains(&y) {
                    return Err(format!("feeder {:?} enters {y}, not its own cycle", s.index));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn graph_wiring(g: &GraphInstance, meta: &StructureMeta) -> Result<(), String> {
    let edge = |a: u32, b: u32| -> Result<(), String> {
        if g.has_edge(a as usize, b as usize) {
            Ok(())
        } else {
            Err(format!("edge {{{a}, {b}}} is missing"))
        }
    };
    for s in &meta.structures {
        let m = &s.members;
        match s.kind {
            StructureKind::Path | StructureKind::Backbone => {
                for w in m.windows(2) {
                    edge(w[0], w[1])?;
                }
            }
            StructureKind::Star => {
                for &l in &m[1..] {
                    edge(m[0], l)?;
                }
                if g.degree(m[0] as usize) != m.len() - 1 {
                    return Err(format!("center {} has extra edges", m[0]));
                }
            }
            StructureKind::Isolated => {
                if let Some(&x) = m.iter().find(|&&x| g.degree(x as usize) > 0) {
                    return Err(format!("isolated vertex {x} has degree {}", g.degree(x as usize)));
                }
            }
            StructureKind::WitnessGadget => {
                if let Some(&x) = m.iter().find(|&&x| g.degree(x as usize) != 1) {
                    return Err(format!("pendant {x} has degree {}", g.degree(x as usize)));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn declared_witnesses(inst: &Instance, meta: &StructureMeta) -> Result<String, String> {
    for (i, w) in meta.witnesses.iter().enumerate() {
        let r = match inst {
            Instance::Function(f) => w.validate_function(f),
            Instance::Graph(g) => w.validate_graph(g),
        };
        r.map_err(|e| format!("declared witness {i}: {e}"))?;
    }
    Ok(format!("{} declared witnesses validate", meta.witnesses.len()))
}

/// The exhaustive-search target whose witnesses are exactly the planted
/// ones, or `None` for constructions without planted witnesses.
pub fn brute_target(meta: &StructureMeta) -> Option<BruteTarget> {
    let note_str = |k: &str| meta.notes.get(k).and_then(|v| v.as_str()).map(str::to_string);
    let note_u = |k: &str| meta.notes.get(k).and_then(|v| v.as_u64());
    match meta.construction.as_str() {
        "collision-fn" => Some(BruteTarget::Collision),
        "claw-graph" => Some(BruteTarget::Star { k: 3 }),
        "fixedpoint-fn" => {
            let pattern: FunctionPattern = note_str("pattern")?.parse().ok()?;
            Some(if pattern.is_fixed_point() {
                BruteTarget::FixedPoint
            } else {
                BruteTarget::Pattern { pattern }
            })
        }
        "star-graph" => {
            let pattern: GraphPattern = note_str("pattern")?.parse().ok()?;
            Some(BruteTarget::Clique { h: pattern.size() })
        }
        "starpath-graph" => Some(BruteTarget::Star { k: note_u("k")? as usize }),
        "identity" => Some(BruteTarget::Collision),
        _ => None,
    }
}

fn witness_count(inst: &Instance, meta: &StructureMeta) -> Result<String, String> {
    let Some(target) = brute_target(meta) else {
        return Ok(format!("{}: no planted witnesses to count", meta.construction));
    };
    let combinatorial = matches!(target, BruteTarget::Pattern { .. } | BruteTarget::Clique { .. });
    if combinatorial && inst.n() > BRUTE_FORCE_LIMIT {
        return Ok(format!("skipped: n = {} exceeds {BRUTE_FORCE_LIMIT}", inst.n()));
    }
    let found = brute_force_find(inst, &target).map_err(|e| e.to_string())?.len();
    let expected = meta.witnesses.len();
    let line = format!("{expected} expected / {found} found");
    if found == expected {
        Ok(line)
    } else {
        Err(line)
    }
}

fn prime_spacing(inst: &Instance, meta: &StructureMeta) -> Result<String, String> {
    let f = inst.as_function().ok_or("not a function")?;
    let mut checked = 0;
    for c in meta.structures.iter().filter(|s| s.kind == StructureKind::Cycle) {
        let (Some(q), Some(i)) = (c.prime, c.index) else {
            continue;
        };
        let len = c.members.len();
        if len % q as usize != 0 {
            return Err(format!("cycle {i}: length {len} is not a multiple of {q}"));
        }
        let pos: BTreeMap<u32, usize> = c.members.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let mut entries: Vec<usize> = meta
            .structures
            .iter()
            .filter(|s| s.kind == StructureKind::Feeder && s.index == Some(i))
            .filter_map(|s| pos.get(&(f.f(*s.members.last()? as usize) as u32)).copied())
            .collect();
        entries.sort_unstable();
        if entries.len() != len / q as usize {
            return Err(format!("cycle {i}: {} feeders, expected {}", entries.len(), len / q as usize));
        }
        for k in 0..entries.len() {
            let gap = (entries[(k + 1) % entries.len()] + len - entries[k]) % len;
            let gap = if gap == 0 { len } else { gap };
            if gap != q as usize {
                return Err(format!("cycle {i}: feeder gap {gap}, expected {q}"));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} prime cycles evenly fed"))
}

fn degree_uniqueness(inst: &Instance, meta: &StructureMeta) -> Result<String, String> {
    let g = inst.as_graph().ok_or("not a graph")?;
    let mut seen = BTreeMap::new();
    for s in meta.structures.iter().filter(|s| s.kind == StructureKind::Star) {
        let d = g.degree(s.members[0] as usize);
        if let Some(other) = seen.insert(d, s.members[0]) {
            return Err(format!("centers {other} and {} share degree {d}", s.members[0]));
        }
    }
    Ok(format!("{} star centers, all degrees distinct", seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{
        gen_collision_function, gen_fixedpoint_function, gen_star_graph, FixedPointParams, ScaleParams,
    };

    #[test]
    fn fresh_collision_instance_passes() {
        let g = gen_collision_function(4096, &ScaleParams::new(2, 6), 3).unwrap();
        let checks = verify_instance(&g.instance, g.meta());
        assert!(first_failure(&checks).is_none(), "{checks:?}");
    }

    #[test]
    fn rewired_successor_breaks_the_partition_check() {
        let g = gen_collision_function(4096, &ScaleParams::new(2, 6), 3).unwrap();
        let f = g.instance.as_function().unwrap();
        let mut succ = f.succ().to_vec();
        let x = g.meta().structures[0].members[0] as usize;
        succ[x] = succ[(x + 1) % 4096];
        let bad = Instance::Function(FunctionInstance::new(succ).unwrap());
        let checks = verify_instance(&bad, g.meta());
        assert_eq!(first_failure(&checks).unwrap().name, "partition");
    }

    #[test]
    fn fixedpoint_instances_pass_for_both_patterns() {
        for pattern in ["fixed-point", "3-collision"] {
            let p = FixedPointParams {
                widen: true,
                pattern: pattern.parse().unwrap(),
                ..Default::default()
            };
            let g = gen_fixedpoint_function(1 << 16, &p, 9).unwrap();
            let checks = verify_instance(&g.instance, g.meta());
            assert!(first_failure(&checks).is_none(), "{pattern}: {checks:?}");
        }
    }

    #[test]
    fn star_degrees_are_distinct() {
        let g = gen_star_graph(4096, "triangle".parse().unwrap(), 5).unwrap();
        let checks = verify_instance(&g.instance, g.meta());
        assert!(first_failure(&checks).is_none(), "{checks:?}");
        assert_eq!(checks.last().unwrap().name, "degree-uniqueness");
    }
}

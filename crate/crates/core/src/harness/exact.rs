//! Exact per-attempt expectations for the memoryless collision walk.
//!
//! A walk from `x` with cap `c` queries `f` until it either revisits an
//! element or spends `c` queries. With `τ(x)` the distance from `x` to its
//! terminal cycle and `λ(x)` that cycle's length, the walk costs
//! `min(τ + λ, c)` queries, and it certifies a collision exactly when it
//! enters the cycle from outside (`τ ≥ 1`) and closes it within the cap.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HarnessError;
use crate::gen::Filler;
use crate::meta::StructureMeta;
use crate::oracle::FunctionInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptExpectation {
    pub n: u64,
    pub cap: u64,
    /// Starts whose walk certifies a collision within the cap.
    pub successful_starts: u64,
    /// Sum of walk lengths over all starts.
    pub total_queries: u64,
}

impl AttemptExpectation {
    pub fn success_probability(&self) -> Ratio<u64> {
        Ratio::new(self.successful_starts, self.n)
    }

    pub fn expected_queries(&self) -> Ratio<u64> {
        Ratio::new(self.total_queries, self.n)
    }
}

/// `(τ, λ)` for every element.
pub fn tail_and_cycle(f: &FunctionInstance) -> (Vec<u32>, Vec<u32>) {
    const FRESH: u32 = u32::MAX;
    let n = f.n();
    let mut tau = vec![FRESH; n];
    let mut lambda = vec![FRESH; n];
    // position on the current stack, or FRESH
    let mut pos = vec![FRESH; n];
    let mut stack: Vec<usize> = Vec::new();
    for s in 0..n {
        if tau[s] != FRESH {
            continue;
        }
        let mut x = s;
        while tau[x] == FRESH && pos[x] == FRESH {
            pos[x] = stack.len() as u32;
            stack.push(x);
            x = f.f(x);
        }
        if tau[x] == FRESH {
            // closed a new cycle at stack[pos[x]..]
            let from = pos[x] as usize;
            let len = (stack.len() - from) as u32;
            for &y in &stack[from..] {
                tau[y] = 0;
                lambda[y] = len;
            }
            stack.truncate(from);
        }
        while let Some(y) = stack.pop() {
            let z = f.f(y);
            tau[y] = tau[z] + 1;
            lambda[y] = lambda[z];
        }
    }
    (tau, lambda)
}

/// Enumerates every start. Needs no metadata.
pub fn enumerate_attempts(f: &FunctionInstance, cap: u64) -> AttemptExpectation {
    let (tau, lambda) = tail_and_cycle(f);
    let mut ok = 0u64;
    let mut total = 0u64;
    for (&t, &l) in tau.iter().zip(&lambda) {
        let len = t as u64 + l as u64;
        total += len.min(cap);
        if t >= 1 && len <= cap {
            ok += 1;
        }
    }
    AttemptExpectation {
        n: f.n() as u64,
        cap,
        successful_starts: ok,
        total_queries: total,
    }
}

/// Exact success probability and expected length of one walk with cap `2^t`
/// from a uniform start on a generated instance.
pub fn exact_cert_expectation(f: &FunctionInstance, t: u32) -> Result<AttemptExpectation, HarnessError> {
    if f.meta().is_none() {
        return Err(HarnessError::Meta("instance carries no ground-truth metadata".into()));
    }
    Ok(enumerate_attempts(f, 1u64 << t))
}

fn note<'a>(meta: &'a StructureMeta, key: &str) -> Result<&'a Value, HarnessError> {
    meta.notes
        .get(key)
        .ok_or_else(|| HarnessError::Meta(format!("metadata lacks the `{key}` note")))
}

fn note_as<T: for<'de> Deserialize<'de>>(meta: &StructureMeta, key: &str) -> Result<T, HarnessError> {
    serde_json::from_value(note(meta, key)?.clone())
        .map_err(|e| HarnessError::Meta(format!("note `{key}`: {e}")))
}

/// The same quantities summed scale by scale from the construction's
/// bookkeeping alone: closed cycles of every scale, the witness paths of the
/// good scale with their recorded re-entry points, and the filler.
pub fn closed_form_expectation(meta: &StructureMeta, n: usize, t: u32) -> Result<AttemptExpectation, HarnessError> {
    let cap = 1u64 << t;
    let i_min: u32 = note_as(meta, "i_min")?;
    let a: Vec<u64> = note_as(meta, "a")?;
    let bt: u64 = note_as(meta, "witness_paths")?;
    let targets: Vec<u64> = note_as(meta, "collision_targets")?;
    let usage: u64 = note_as(meta, "usage")?;
    let filler: Filler = note_as(meta, "filler")?;
    let good = meta
        .good_index
        .ok_or_else(|| HarnessError::Meta("metadata lacks the good index".into()))?;
    if targets.len() as u64 != bt {
        return Err(HarnessError::Meta(format!(
            "{bt} witness paths but {} re-entry points",
            targets.len()
        )));
    }

    let mut ok = 0u64;
    let mut total = 0u64;
    for (k, &ai) in a.iter().enumerate() {
        let i = i_min + k as u32;
        let len = 1u64 << i;
        let cycles = if i == good { ai - bt } else { ai };
        total += cycles * len * len.min(cap);
    }
    let len = 1u64 << good;
    for &w in &targets {
        // before the re-entry point the walk enters the loop from outside
        for j in 0..w {
            let steps = len - j;
            total += steps.min(cap);
            if steps <= cap {
                ok += 1;
            }
        }
        let loop_len = len - w;
        total += loop_len * loop_len.min(cap);
    }
    let rest = n as u64 - usage;
    total += match filler {
        Filler::FixedPoints => rest,
        Filler::Cycles if rest % 2 == 1 => 3 * 3u64.min(cap) + (rest - 3) * 2u64.min(cap),
        Filler::Cycles => rest * 2u64.min(cap),
    };
    Ok(AttemptExpectation {
        n: n as u64,
        cap,
        successful_starts: ok,
        total_queries: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_collision_function, ScaleParams};
    use crate::meta::StructureMeta;

    fn cycle(n: u32) -> FunctionInstance {
        FunctionInstance::new((0..n).map(|x| (x + 1) % n).collect())
            .unwrap()
            .with_meta(StructureMeta::new("cycle"))
    }

    #[test]
    fn single_long_cycle() {
        let e = exact_cert_expectation(&cycle(1000), 5).unwrap();
        assert_eq!(e.success_probability(), Ratio::from_integer(0));
        assert_eq!(e.expected_queries(), Ratio::from_integer(32));
    }

    #[test]
    fn missing_meta_is_an_error() {
        let f = FunctionInstance::identity(4);
        assert!(exact_cert_expectation(&f, 2).is_err());
    }

    #[test]
    fn rho_shape() {
        // 0 -> 1 -> 2 -> 3 -> 1: tail 1, loop 3
        let f = FunctionInstance::new(vec![1, 2, 3, 1, 4]).unwrap();
        let (tau, lambda) = tail_and_cycle(&f);
        assert_eq!(tau, vec![1, 0, 0, 0, 0]);
        assert_eq!(lambda, vec![3, 3, 3, 3, 1]);
        let e = enumerate_attempts(&f, 4);
        assert_eq!((e.successful_starts, e.total_queries), (1, 4 + 3 * 3 + 1));
        let e = enumerate_attempts(&f, 3);
        assert_eq!((e.successful_starts, e.total_queries), (0, 3 + 3 * 3 + 1));
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for seed in 0..6 {
            let mut p = ScaleParams::new(3, 8);
            if seed % 2 == 1 {
                p.filler = crate::gen::Filler::Cycles;
            }
            let g = gen_collision_function(1 << 13, &p, seed).unwrap();
            let f = g.instance.as_function().unwrap();
            for t in 3..=8 {
                let a = exact_cert_expectation(f, t).unwrap();
                let b = closed_form_expectation(g.meta(), 1 << 13, t).unwrap();
                assert_eq!(a, b, "seed {seed}, t {t}");
            }
        }
    }
}

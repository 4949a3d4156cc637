use std::collections::BTreeMap;

use rand::Rng as _;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{conclude, Budgeted, FnMemo, SearchOutcome};
use crate::oracle::{FunctionAccess, OracleError, Witness};
use crate::rng::Rng;

/// Whether walks share what earlier walks learned.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkMemory {
    /// Each walk starts from scratch and re-queries everything; collisions
    /// are only noticed inside one walk. This is the process the exact
    /// per-attempt analysis describes.
    #[default]
    PerWalk,
    /// One table of known values and first preimages for the whole run;
    /// known values cost nothing and collisions across walks are caught.
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttemptResult {
    pub queries: u64,
    pub witness: Option<Witness>,
}

struct Walk {
    cur: usize,
    steps: u64,
    cap: u64,
    pos: FxHashMap<u32, u32>,
    seq: Vec<u32>,
}

enum Step {
    Continue,
    Terminal,
    Found(Witness),
}

impl Walk {
    fn new(start: usize, cap: u64) -> Self {
        let mut pos = FxHashMap::default();
        pos.insert(start as u32, 0);
        Walk {
            cur: start,
            steps: 0,
            cap,
            pos,
            seq: vec![start as u32],
        }
    }

    fn step<O: FunctionAccess + ?Sized>(
        &mut self,
        o: &mut O,
        memo: Option<&mut FnMemo>,
    ) -> Result<Step, OracleError> {
        let y = match memo {
            Some(m) => {
                let (y, hit) = m.step(o, self.cur)?;
                if let Some(w) = hit {
                    return Ok(Step::Found(w));
                }
                y
            }
            None => o.query_function(self.cur)?,
        };
        self.steps += 1;
        if let Some(&r) = self.pos.get(&(y as u32)) {
            if r >= 1 {
                let p = self.seq[r as usize - 1] as usize;
                return Ok(Step::Found(Witness::collision(p, self.cur, y)));
            }
            return Ok(Step::Terminal);
        }
        self.pos.insert(y as u32, self.seq.len() as u32);
        self.seq.push(y as u32);
        self.cur = y;
        Ok(if self.steps >= self.cap {
            Step::Terminal
        } else {
            Step::Continue
        })
    }
}

/// One memoryless walk from `start`: at most `cap` queries, stopping at the
/// first repeated element. A repeat of anything but the start certifies a
/// collision.
pub fn collision_attempt<O: FunctionAccess + ?Sized>(
    o: &mut O,
    start: usize,
    cap: u64,
) -> Result<AttemptResult, OracleError> {
    let before = o.count();
    let mut walk = Walk::new(start, cap);
    loop {
        match walk.step(o, None)? {
            Step::Continue => {}
            Step::Terminal => {
                return Ok(AttemptResult {
                    queries: o.count() - before,
                    witness: None,
                })
            }
            Step::Found(w) => {
                return Ok(AttemptResult {
                    queries: o.count() - before,
                    witness: Some(w),
                })
            }
        }
    }
}

/// Certificate-holding collision search: walks of up to `2^t` steps from
/// uniform starts until a collision shows up. With shared memory the search
/// ends Exhausted once every value is known.
pub fn cert_collision_search<O: FunctionAccess + ?Sized>(
    oracle: &mut O,
    t: u32,
    budget: Option<u64>,
    memory: WalkMemory,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::function(oracle, budget);
    let n = o.n();
    let cap = 1u64 << t.min(62);
    let mut memo = FnMemo::default();
    let mut attempts = 0;
    let res = (|| loop {
        if memo.succ.len() == n {
            // everything is known and no collision showed up
            return Ok(None);
        }
        attempts += 1;
        let mut walk = Walk::new(rng.gen_range(0..n), cap);
        loop {
            let m = (memory == WalkMemory::Shared).then_some(&mut memo);
            match walk.step(&mut o, m)? {
                Step::Continue => {}
                Step::Terminal => break,
                Step::Found(w) => return Ok(Some(w)),
            }
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

/// Certificate-free search: one walk per scale `i ∈ [i_min, i_max]`, advanced
/// round-robin one step at a time, lowest scale first. Walk `i` restarts from
/// a fresh uniform element after `2^i` steps or on reaching a repeat.
pub fn multiscale_collision_search<O: FunctionAccess + ?Sized>(
    oracle: &mut O,
    i_min: u32,
    i_max: u32,
    budget: Option<u64>,
    memory: WalkMemory,
    rng: &mut Rng,
) -> SearchOutcome {
    let mut o = Budgeted::function(oracle, budget);
    let n = o.n();
    let mut memo = FnMemo::default();
    let caps: Vec<u64> = (i_min..=i_max).map(|i| 1u64 << i.min(62)).collect();
    let mut walks: Vec<Walk> = caps.iter().map(|&c| Walk::new(rng.gen_range(0..n), c)).collect();
    let mut attempts = walks.len() as u64;
    let res = (|| loop {
        if memo.succ.len() == n {
            return Ok(None);
        }
        for w in walks.iter_mut() {
            let m = (memory == WalkMemory::Shared).then_some(&mut memo);
            match w.step(&mut o, m)? {
                Step::Continue => {}
                Step::Terminal => {
                    *w = Walk::new(rng.gen_range(0..n), w.cap);
                    attempts += 1;
                }
                Step::Found(wit) => return Ok(Some(wit)),
            }
        }
    })();
    let q = o.count();
    conclude(res, q, attempts, BTreeMap::new())
}

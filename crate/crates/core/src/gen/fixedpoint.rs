//! Prime-spaced feeder cycles with one planted copy of a pattern `H`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::pattern::FunctionPattern;
use super::primes::primes_in_window;
use super::{GenError, Generated};
use crate::meta::{Certificate, Structure, StructureKind, StructureMeta};
use crate::oracle::{FunctionInstance, Instance};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// How many prime-tagged cycles to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleCount {
    /// `⌊α n^{1/4} / log₂ n⌋`.
    Formula,
    /// As many cycles with feeders as fit in `n`.
    Fill,
    Exact(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedPointParams {
    pub alpha: f64,
    /// Defaults to `n^{3/4}`.
    pub cycle_len: Option<usize>,
    /// Defaults to `n^{1/4}`.
    pub feeder_len: Option<usize>,
    /// Open interval for the primes; defaults to `(n^{1/4}/4, n^{1/4}/2)`.
    pub prime_window: Option<(f64, f64)>,
    pub cycles: CycleCount,
    /// Grow the upper end of the window by 1.25x until enough primes exist.
    pub widen: bool,
    pub pattern: FunctionPattern,
}

impl Default for FixedPointParams {
    fn default() -> Self {
        FixedPointParams {
            alpha: 0.125,
            cycle_len: None,
            feeder_len: None,
            prime_window: None,
            cycles: CycleCount::Fill,
            widen: false,
            pattern: FunctionPattern::fixed_point(),
        }
    }
}

/// Cycle length rounded to a multiple of `p`, so the wrap-around gap is `p`
/// as well.
fn cycle_len_for(len: usize, p: usize) -> usize {
    p * ((len as f64 / p as f64).round() as usize).max(1)
}

fn component_size(len: usize, feeder: usize, p: usize) -> usize {
    let l = cycle_len_for(len, p);
    l + (l / p) * feeder
}

struct Pool {
    perm: Vec<u32>,
    cursor: usize,
}

impl Pool {
    fn take(&mut self, k: usize) -> Vec<u32> {
        let s = self.perm[self.cursor..self.cursor + k].to_vec();
        self.cursor += k;
        s
    }
}

struct Resolved {
    len: usize,
    feeder: usize,
    lo: f64,
    hi: f64,
    widened: bool,
    primes: Vec<usize>,
}

fn resolve(n: usize, p: &FixedPointParams, extra: usize) -> Result<Resolved, GenError> {
    let nf = n as f64;
    let quarter = nf.powf(0.25);
    let len = p.cycle_len.unwrap_or(nf.powf(0.75).round() as usize).max(2);
    let feeder = p.feeder_len.unwrap_or(quarter.round() as usize).max(1);
    let (lo, mut hi) = p.prime_window.unwrap_or((quarter / 4.0, quarter / 2.0));
    if !(lo < hi) {
        return Err(GenError::Param(format!("empty prime window ({lo}, {hi})")));
    }
    let t = p.pattern.entries().len();
    let room = n.saturating_sub(extra);
    let mut widened = false;
    loop {
        let window: Vec<usize> = primes_in_window(lo, hi).into_iter().map(|q| q as usize).collect();
        let (need, short) = match p.cycles {
            CycleCount::Formula => {
                let need = (p.alpha * quarter / nf.log2()).floor() as usize;
                (need, window.len() < need)
            }
            CycleCount::Exact(k) => (k, window.len() < k),
            CycleCount::Fill => {
                let mut left = room;
                let mut k = 0;
                for &q in &window {
                    let s = component_size(len, feeder, q);
                    if s > left {
                        break;
                    }
                    left -= s;
                    k += 1;
                }
                let next = component_size(len, feeder, hi.ceil() as usize);
                if k == window.len() && left >= next {
                    (k + (left / next).max(1), true)
                } else {
                    (k, false)
                }
            }
        };
        if short {
            if p.widen && hi < nf {
                hi *= 1.25;
                widened = true;
                continue;
            }
            return Err(GenError::PrimeShortage {
                lo,
                hi,
                have: window.len(),
                need,
            });
        }
        if need < t {
            return Err(GenError::Param(format!(
                "{need} prime-tagged cycles cannot host {t} entry vertices"
            )));
        }
        let primes = window[..need].to_vec();
        let used: usize = primes.iter().map(|&q| component_size(len, feeder, q)).sum();
        if used + extra > n {
            return Err(GenError::Capacity {
                needed: used + extra,
                n,
                detail: format!("{need} cycles with feeders plus {extra} pattern elements"),
            });
        }
        return Ok(Resolved {
            len,
            feeder,
            lo,
            hi,
            widened,
            primes,
        });
    }
}

/// Builds the prime-spaced construction. Cycle `i` has length a multiple of
/// `p_i` near `cycle_len`, with a feeder path of `feeder_len` elements
/// entering every `p_i`-th cycle element. `T` entry elements are drawn
/// uniformly from cycle elements on distinct cycles; each host cycle is cut at
/// its entry and the pattern is wired in. Leftovers close into cycles of
/// length about `cycle_len`, so no stray fixed point appears.
pub fn gen_fixedpoint_function(
    n: usize,
    p: &FixedPointParams,
    seed: u64,
) -> Result<Generated, GenError> {
    p.pattern.validate().map_err(GenError::Param)?;
    let entries = p.pattern.entries();
    let sinks = p.pattern.sinks();
    let fresh_vertices = p.pattern.vertices as usize - entries.len();
    let extra = fresh_vertices + 3 * sinks.len();
    let r = resolve(n, p, extra)?;

    let mut rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut pool = Pool { perm, cursor: 0 };

    let mut succ = vec![u32::MAX; n];
    let mut meta = StructureMeta::new("fixedpoint-fn");
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut feeder_index: Vec<(usize, usize)> = Vec::new();
    for (i, &q) in r.primes.iter().enumerate() {
        let l = cycle_len_for(r.len, q);
        let cyc = pool.take(l);
        for j in 0..l {
            succ[cyc[j] as usize] = cyc[(j + 1) % l];
        }
        for pos in (0..l).step_by(q) {
            let fd = pool.take(r.feeder);
            for w in fd.windows(2) {
                succ[w[0] as usize] = w[1];
            }
            succ[*fd.last().unwrap() as usize] = cyc[pos];
            feeder_index.push((i, meta.structures.len()));
            meta.structures.push(
                Structure::new(StructureKind::Feeder, fd)
                    .with_prime(q as u32)
                    .with_index(i as u32),
            );
        }
        cycles.push(cyc);
    }

    let total: usize = cycles.iter().map(Vec::len).sum();
    let t = entries.len();
    let chosen: Vec<(usize, usize)> = loop {
        let picks: Vec<(usize, usize)> = (0..t)
            .map(|_| {
                let mut k = rng.gen_range(0..total);
                let mut c = 0;
                while k >= cycles[c].len() {
                    k -= cycles[c].len();
                    c += 1;
                }
                (c, k)
            })
            .collect();
        let distinct = picks
            .iter()
            .enumerate()
            .all(|(a, x)| picks[..a].iter().all(|y| y.0 != x.0));
        if distinct {
            break picks;
        }
    };

    let mut image = vec![u32::MAX; p.pattern.vertices as usize];
    for (&v, &(c, pos)) in entries.iter().zip(&chosen) {
        image[v as usize] = cycles[c][pos];
    }
    let mut gadget = Vec::new();
    for v in 0..p.pattern.vertices as usize {
        if image[v] == u32::MAX {
            image[v] = pool.take(1)[0];
            gadget.push(image[v]);
        }
    }
    for &(a, b) in &p.pattern.edges {
        succ[image[a as usize] as usize] = image[b as usize];
    }
    for &s in &sinks {
        let tri = pool.take(3);
        succ[image[s as usize] as usize] = tri[0];
        for j in 0..3 {
            succ[tri[j] as usize] = tri[(j + 1) % 3];
        }
        gadget.extend_from_slice(&tri);
    }
    if !gadget.is_empty() {
        meta.structures
            .push(Structure::new(StructureKind::WitnessGadget, gadget));
    }

    for (i, cyc) in cycles.iter().enumerate() {
        meta.structures.push(
            Structure::new(StructureKind::Cycle, cyc.clone())
                .with_prime(r.primes[i] as u32)
                .with_index(i as u32),
        );
    }

    let rest = pool.take(n - pool.cursor);
    let mut lone = false;
    match rest.len() {
        0 => {}
        1 => {
            // Prepend to the first feeder so no fixed point appears and the
            // entry spacing is untouched.
            let (_, si) = feeder_index[0];
            let z = rest[0];
            succ[z as usize] = meta.structures[si].members[0];
            meta.structures[si].members.insert(0, z);
            lone = true;
        }
        k => {
            let q = (k / r.len).max(1);
            let mut off = 0;
            for j in 0..q {
                let l = if j + 1 == q { k - off } else { r.len };
                let cyc = &rest[off..off + l];
                for x in 0..l {
                    succ[cyc[x] as usize] = cyc[(x + 1) % l];
                }
                meta.structures
                    .push(Structure::new(StructureKind::Cycle, cyc.to_vec()));
                off += l;
            }
        }
    }

    meta.witnesses.push(p.pattern.witness(&image));
    meta.note("pattern", p.pattern.to_string());
    meta.note("primes", &r.primes);
    meta.note("prime_window", (r.lo, r.hi));
    meta.note("window_widened", r.widened);
    meta.note("cycle_len", r.len);
    meta.note("feeder_len", r.feeder);
    meta.note("cycles", r.primes.len());
    meta.note("entries", &chosen);
    meta.note("lone_leftover", lone);
    meta.note("alpha", p.alpha);

    let certificate = Certificate::FixedPointPrimes {
        primes: chosen.iter().map(|&(c, _)| r.primes[c] as u32).collect(),
    };
    let f = FunctionInstance::new(succ).expect("every element was assigned");
    Ok(Generated {
        instance: Instance::Function(f.with_meta(meta)),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_at_2_16_is_short() {
        let err = gen_fixedpoint_function(1 << 16, &FixedPointParams::default(), 1).unwrap_err();
        match err {
            GenError::PrimeShortage { have, .. } => assert_eq!(have, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn widened_instance_partitions() {
        let p = FixedPointParams {
            widen: true,
            ..Default::default()
        };
        let g = gen_fixedpoint_function(1 << 12, &p, 3).unwrap();
        g.meta().check_partition(1 << 12).unwrap();
        let f = g.instance.as_function().unwrap();
        assert_eq!(f.succ().iter().enumerate().filter(|(x, &y)| *x == y as usize).count(), 1);
        for w in &g.meta().witnesses {
            w.validate_function(f).unwrap();
        }
    }

    #[test]
    fn cycle_length_is_multiple_of_prime() {
        assert_eq!(cycle_len_for(4096, 7), 4095);
        assert_eq!(cycle_len_for(4, 7), 7);
    }
}

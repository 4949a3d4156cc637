use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use super::pattern::GraphPattern;
use super::{GenError, Generated};
use crate::meta::{Certificate, Structure, StructureKind, StructureMeta};
use crate::oracle::{GraphInstance, Instance, Witness, WitnessKind};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

/// `m` pairwise-distinct degrees in `[lo, hi]` summing to `total`: a uniform
/// random subset, then the largest (or smallest) values are pushed toward the
/// window edge until the sum matches.
fn distinct_degrees(
    m: usize,
    lo: usize,
    hi: usize,
    total: usize,
    rng: &mut Rng,
) -> Result<Vec<usize>, GenError> {
    if hi + 1 < lo + m {
        return Err(GenError::Param(format!(
            "window [{lo}, {hi}] cannot hold {m} distinct degrees"
        )));
    }
    let mut d: Vec<usize> = index::sample(rng, hi - lo + 1, m)
        .into_iter()
        .map(|x| x + lo)
        .collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let sum: usize = d.iter().sum();
    if sum < total {
        let mut deficit = total - sum;
        for (j, x) in d.iter_mut().enumerate() {
            let raise = (hi - j - *x).min(deficit);
            *x += raise;
            deficit -= raise;
            if deficit == 0 {
                break;
            }
        }
        if deficit > 0 {
            return Err(GenError::Param(format!(
                "{m} distinct degrees in [{lo}, {hi}] cannot sum to {total}"
            )));
        }
    } else if sum > total {
        let mut excess = sum - total;
        for (j, x) in d.iter_mut().rev().enumerate() {
            let lower = (*x - (lo + j)).min(excess);
            *x -= lower;
            excess -= lower;
            if excess == 0 {
                break;
            }
        }
        if excess > 0 {
            return Err(GenError::Param(format!(
                "{m} distinct degrees in [{lo}, {hi}] cannot sum to {total}"
            )));
        }
    }
    Ok(d)
}

/// `⌊√n⌋` stars with distinct center degrees in `[⌈√n/4⌉, ⌊3√n/2⌋]` covering
/// every vertex; one leaf from each of `h` random stars joins an `h`-clique.
/// The certificate lists the degrees of those `h` centers.
pub fn gen_star_graph(n: usize, pattern: GraphPattern, seed: u64) -> Result<Generated, GenError> {
    let m = (n as f64).sqrt().floor() as usize;
    if m < 4 {
        return Err(GenError::Param(format!("n = {n} is too small for the star layout")));
    }
    let h = pattern.size();
    if h > m {
        return Err(GenError::Param(format!("{h}-clique needs {h} stars, only {m} exist")));
    }
    let mut rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let lo = m.div_ceil(4);
    let hi = 3 * m / 2;
    let degrees = distinct_degrees(m, lo, hi, n - m, &mut rng)?;

    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut adj = vec![Vec::new(); n];
    let mut meta = StructureMeta::new("star-graph");
    let mut off = m;
    let mut stars = Vec::with_capacity(m);
    for (i, &d) in degrees.iter().enumerate() {
        let c = perm[i];
        let leaves = &perm[off..off + d];
        off += d;
        for &l in leaves {
            adj[c as usize].push(l);
            adj[l as usize].push(c);
        }
        let mut members = vec![c];
        members.extend_from_slice(leaves);
        meta.structures
            .push(Structure::new(StructureKind::Star, members.clone()).with_index(i as u32));
        stars.push(members);
    }
    debug_assert_eq!(off, n);

    let mut good: Vec<usize> = index::sample(&mut rng, m, h).into_vec();
    good.sort_unstable();
    let clique: Vec<u32> = good
        .iter()
        .map(|&s| stars[s][rng.gen_range(1..stars[s].len())])
        .collect();
    for a in 0..clique.len() {
        for b in a + 1..clique.len() {
            adj[clique[a] as usize].push(clique[b]);
            adj[clique[b] as usize].push(clique[a]);
        }
    }
    if h > 0 {
        meta.witnesses.push(Witness::new(
            WitnessKind::Clique { h: h as u32 },
            clique.clone(),
        ));
    }
    let mut good_degrees: Vec<u32> = good.iter().map(|&s| degrees[s] as u32).collect();
    good_degrees.sort_unstable();
    meta.note("degrees", &degrees);
    meta.note("degree_window", (lo, hi));
    meta.note("good_stars", &good);
    meta.note("pattern", pattern.to_string());

    let g = GraphInstance::from_adjacency_unchecked(&adj).with_meta(meta);
    Ok(Generated {
        instance: Instance::Graph(g),
        certificate: Certificate::StarDegrees {
            degrees: good_degrees,
        },
    })
}

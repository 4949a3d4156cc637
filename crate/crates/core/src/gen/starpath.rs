use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{GenError, Generated};
use crate::meta::{Certificate, Structure, StructureKind, StructureMeta};
use crate::oracle::{GraphInstance, Instance, Witness, WitnessKind};
use crate::rng::{derive_seed, rng_from_seed, stream};

/// Backbone `v_1 .. v_m` (`m = ⌊√n⌋`) with a pendant `v_0` on `v_1` and a
/// hanging path `P_i` below every `v_i`; the hanging paths share the
/// remaining vertices as evenly as possible. One uniformly random vertex `u`
/// then receives `k` fresh pendants. The certificate is the 1-based column
/// index of `u` (`v_0` counts as column 1).
pub fn gen_starpath_graph(n: usize, k: usize, seed: u64) -> Result<Generated, GenError> {
    if k < 4 {
        return Err(GenError::Param(format!("k-star needs k >= 4, got {k}")));
    }
    let m = (n as f64).sqrt().floor() as usize;
    if m < 3 || n < 2 * m + 1 + k {
        return Err(GenError::Param(format!("n = {n} is too small for k = {k}")));
    }
    let hanging = n - m - 1 - k;
    let base = hanging / m;
    let extra = hanging % m;

    let mut rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let spine = &perm[..m + 1];
    let mut adj = vec![Vec::new(); n];
    let mut edge = |a: u32, b: u32| {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    };
    for w in spine.windows(2) {
        edge(w[0], w[1]);
    }
    let mut meta = StructureMeta::new("starpath-graph");
    meta.structures
        .push(Structure::new(StructureKind::Backbone, spine.to_vec()));
    // column[x] = 1-based hanging-path index owning x
    let mut column = vec![0u32; n];
    column[spine[0] as usize] = 1;
    let mut off = m + 1;
    let mut sizes = Vec::with_capacity(m);
    for i in 1..=m {
        let len = base + usize::from(i <= extra);
        let path = &perm[off..off + len];
        off += len;
        column[spine[i] as usize] = i as u32;
        edge(spine[i], path[0]);
        for w in path.windows(2) {
            edge(w[0], w[1]);
        }
        for &x in path {
            column[x as usize] = i as u32;
        }
        meta.structures.push(
            Structure::new(StructureKind::Path, path.to_vec()).with_index(i as u32),
        );
        sizes.push(len);
    }
    let pendants = perm[off..].to_vec();
    debug_assert_eq!(pendants.len(), k);
    let u = perm[rng.gen_range(0..off)];
    for &x in &pendants {
        edge(u, x);
    }
    let index = column[u as usize];
    let mut wv = vec![u];
    wv.extend_from_slice(&pendants);
    meta.witnesses
        .push(Witness::new(WitnessKind::KStar { k: k as u32 }, wv));
    meta.structures.push(
        Structure::new(StructureKind::WitnessGadget, pendants).with_index(index),
    );
    meta.good_index = Some(index);
    meta.note("k", k);
    meta.note("backbone_len", m);
    meta.note("hanging_sizes", &sizes);
    meta.note("center", u);

    let g = GraphInstance::from_adjacency_unchecked(&adj).with_meta(meta);
    Ok(Generated {
        instance: Instance::Graph(g),
        certificate: Certificate::BackboneIndex { index },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backbone_degrees() {
        let g = gen_starpath_graph(4096, 4, 9).unwrap();
        let gr = g.instance.as_graph().unwrap();
        let meta = g.meta();
        meta.check_partition(4096).unwrap();
        let spine = &meta.structures[0].members;
        let u = meta.witnesses[0].vertices[0] as usize;
        for (i, &v) in spine.iter().enumerate() {
            if v as usize == u {
                continue;
            }
            let expect = match i {
                0 => 1,
                i if i == spine.len() - 1 => 2,
                _ => 3,
            };
            assert_eq!(gr.degree(v as usize), expect, "v_{i}");
        }
        assert!(gr.is_forest());
        let heavy: Vec<usize> = (0..4096).filter(|&v| gr.degree(v) >= 4).collect();
        assert_eq!(heavy, vec![u]);
    }
}

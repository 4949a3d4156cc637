//! Multi-scale path layouts: the collision function and the claw graph.

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{GenError, Generated};
use crate::meta::{Certificate, Structure, StructureKind, StructureMeta};
use crate::oracle::{FunctionInstance, GraphInstance, Instance, Witness};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

/// Written in JSON as `"auto"` or as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    /// Largest `ρ ≤ 1` for which everything fits.
    Auto,
    Fixed(f64),
}

impl Serialize for Rho {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rho::Auto => s.serialize_str("auto"),
            Rho::Fixed(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for Rho {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(Rho::Fixed(r)),
            Raw::Text(t) if t == "auto" => Ok(Rho::Auto),
            Raw::Text(t) => t
                .parse()
                .map(Rho::Fixed)
                .map_err(|_| serde::de::Error::custom(format!("rho must be a number or \"auto\", got {t:?}"))),
        }
    }
}

impl std::str::FromStr for Rho {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Rho::Auto);
        }
        s.parse().map(Rho::Fixed).map_err(|_| format!("rho must be a number or \"auto\", got {s:?}"))
    }
}

/// How elements not covered by any path are completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filler {
    #[default]
    FixedPoints,
    /// 2-cycles, plus one 3-cycle when the count is odd.
    Cycles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub i_min: u32,
    pub i_max: u32,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    #[serde(default = "defaults::c")]
    pub c: f64,
    #[serde(default = "defaults::rho")]
    pub rho: Rho,
    /// Forces the good scale instead of drawing it.
    #[serde(default)]
    pub good_index: Option<u32>,
    /// Forces the number of witness paths (0 allowed, for witness-free controls).
    #[serde(default)]
    pub witness_count: Option<usize>,
    #[serde(default)]
    pub filler: Filler,
    /// Keep at least one path per scale even when `ρn/β^i < 1`.
    #[serde(default = "defaults::yes")]
    pub clamp_paths: bool,
}

mod defaults {
    pub fn beta() -> f64 {
        2.2
    }
    pub fn gamma() -> f64 {
        1.1
    }
    pub fn c() -> f64 {
        0.3
    }
    pub fn rho() -> super::Rho {
        super::Rho::Auto
    }
    pub fn yes() -> bool {
        true
    }
}

impl ScaleParams {
    pub fn new(i_min: u32, i_max: u32) -> Self {
        ScaleParams {
            i_min,
            i_max,
            beta: defaults::beta(),
            gamma: defaults::gamma(),
            c: defaults::c(),
            rho: Rho::Auto,
            good_index: None,
            witness_count: None,
            filler: Filler::FixedPoints,
            clamp_paths: true,
        }
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<u32> {
        self.i_min..=self.i_max
    }

    pub fn num_scales(&self) -> usize {
        (self.i_max - self.i_min + 1) as usize
    }

    fn validate(&self, n: usize, min_scale: u32) -> Result<(), GenError> {
        let p = |s: String| Err(GenError::Param(s));
        if self.i_min > self.i_max {
            return p(format!("i_min = {} exceeds i_max = {}", self.i_min, self.i_max));
        }
        if self.i_min < min_scale {
            return p(format!("i_min must be at least {min_scale} for this construction"));
        }
        if self.i_max >= 31 || (1usize << self.i_max) > n {
            return p(format!("paths of length 2^{} do not fit in n = {n}", self.i_max));
        }
        if !(1.0 < self.gamma && self.gamma < self.beta) {
            return p(format!("need 1 < gamma < beta, got gamma = {}, beta = {}", self.gamma, self.beta));
        }
        if !(0.0 < self.c && self.c < 0.5) {
            return p(format!("need 0 < c < 1/2, got {}", self.c));
        }
        if let Rho::Fixed(r) = self.rho {
            if !(r > 0.0 && r <= 1.0) {
                return p(format!("rho must lie in (0, 1], got {r}"));
            }
        }
        if let Some(t) = self.good_index {
            if !self.scales().contains(&t) {
                return p(format!("good index {t} outside [{}, {}]", self.i_min, self.i_max));
            }
        }
        Ok(())
    }
}

/// Path counts per scale after normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalePlan {
    pub n: usize,
    pub i_min: u32,
    pub i_max: u32,
    pub rho: f64,
    /// `a[i - i_min]`: number of paths of length `2^i`.
    pub a: Vec<usize>,
    /// `b[i - i_min]`: witness paths if `i` is the good scale.
    pub b: Vec<usize>,
    /// Elements outside the paths reserved by the construction.
    pub overhead: usize,
    /// `Σ a_i 2^i + overhead`.
    pub usage: usize,
}

impl ScalePlan {
    fn at(n: usize, p: &ScaleParams, rho: f64, overhead: &dyn Fn(&[usize]) -> usize) -> Self {
        let nf = n as f64;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in p.scales() {
            let mut ai = (rho * nf / p.beta.powi(i as i32)).floor() as usize;
            if p.clamp_paths {
                ai = ai.max(1);
            }
            let bi = (rho * nf.powf(1.0 - p.c) / p.gamma.powi(i as i32)).floor() as usize;
            a.push(ai);
            b.push(bi.max(1).min(ai));
        }
        let paths: usize = p.scales().zip(&a).map(|(i, &ai)| ai << i).sum();
        let overhead = overhead(&b);
        ScalePlan {
            n,
            i_min: p.i_min,
            i_max: p.i_max,
            rho,
            a,
            b,
            overhead,
            usage: paths + overhead,
        }
    }

    pub fn compute(
        n: usize,
        p: &ScaleParams,
        overhead: &dyn Fn(&[usize]) -> usize,
    ) -> Result<Self, GenError> {
        let fits = |plan: &ScalePlan| {
            plan.usage <= n && !(p.filler == Filler::Cycles && n - plan.usage == 1)
        };
        let plan = match p.rho {
            Rho::Fixed(r) => {
                let plan = Self::at(n, p, r, overhead);
                if plan.usage > n {
                    return Err(plan.capacity_error());
                }
                if !fits(&plan) {
                    return Err(GenError::Param(
                        "a single leftover element cannot be closed without a fixed point".into(),
                    ));
                }
                plan
            }
            Rho::Auto => {
                let full = Self::at(n, p, 1.0, overhead);
                if full.usage <= n {
                    full
                } else {
                    let floor = Self::at(n, p, 0.0, overhead);
                    if floor.usage > n {
                        return Err(floor.capacity_error());
                    }
                    let (mut lo, mut hi) = (0.0f64, 1.0f64);
                    for _ in 0..64 {
                        let mid = 0.5 * (lo + hi);
                        if Self::at(n, p, mid, overhead).usage <= n {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    Self::at(n, p, lo, overhead)
                }
            }
        };
        if fits(&plan) {
            return Ok(plan);
        }
        let mut rho = plan.rho;
        for _ in 0..100_000 {
            rho *= 1.0 - 1e-4;
            let next = Self::at(n, p, rho, overhead);
            if fits(&next) {
                return Ok(next);
            }
        }
        Err(GenError::Param("could not avoid a single leftover element".into()))
    }

    fn capacity_error(&self) -> GenError {
        let terms: Vec<String> = (self.i_min..=self.i_max)
            .zip(&self.a)
            .map(|(i, ai)| format!("{ai}*2^{i}"))
            .collect();
        GenError::Capacity {
            needed: self.usage,
            n: self.n,
            detail: format!(
                "sum a_i*2^i = {} + overhead {} (rho = {:.4})",
                terms.join(" + "),
                self.overhead,
                self.rho
            ),
        }
    }

    pub fn a_at(&self, i: u32) -> usize {
        self.a[(i - self.i_min) as usize]
    }

    pub fn b_at(&self, i: u32) -> usize {
        self.b[(i - self.i_min) as usize]
    }

    pub fn path_elements(&self) -> usize {
        self.usage - self.overhead
    }

    fn record(&self, meta: &mut StructureMeta) {
        meta.note("rho", self.rho);
        meta.note("i_min", self.i_min);
        meta.note("i_max", self.i_max);
        meta.note("a", &self.a);
        meta.note("b", &self.b);
        meta.note("usage", self.usage);
        meta.note("overhead", self.overhead);
    }
}

fn draw_good_index(p: &ScaleParams, seed: u64) -> u32 {
    p.good_index.unwrap_or_else(|| {
        rng_from_seed(derive_seed(seed, stream::GOOD_INDEX)).gen_range(p.i_min..=p.i_max)
    })
}

fn witness_paths(p: &ScaleParams, plan: &ScalePlan, t: u32) -> Result<usize, GenError> {
    let bt = p.witness_count.unwrap_or(plan.b_at(t));
    if bt > plan.a_at(t) {
        return Err(GenError::Param(format!(
            "{bt} witness paths requested but scale {t} has only {} paths",
            plan.a_at(t)
        )));
    }
    if p.witness_count.is_none() {
        if bt == 0 {
            return Err(GenError::DegenerateWitness(format!("no paths at scale {t}")));
        }
        if plan.b_at(t) == 1 {
            warn!("witness count at scale {t} clamped to 1");
        }
    }
    Ok(bt)
}

/// Cuts `elems` into consecutive paths, `a_i` of length `2^i` per scale.
fn lay_paths(elems: &[u32], plan: &ScalePlan) -> Vec<Vec<Vec<u32>>> {
    let mut off = 0;
    (plan.i_min..=plan.i_max)
        .zip(&plan.a)
        .map(|(i, &ai)| {
            let len = 1usize << i;
            (0..ai)
                .map(|_| {
                    let p = elems[off..off + len].to_vec();
                    off += len;
                    p
                })
                .collect()
        })
        .collect()
}

/// Collision function: closed cycles of every scale, `b_t` scale-`t` paths
/// whose last element points into their own interior, filler elsewhere.
pub fn gen_collision_function(
    n: usize,
    p: &ScaleParams,
    seed: u64,
) -> Result<Generated, GenError> {
    p.validate(n, 2)?;
    let plan = ScalePlan::compute(n, p, &|_| 0)?;
    let t = draw_good_index(p, seed);
    let bt = witness_paths(p, &plan, t)?;

    let mut rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let paths = lay_paths(&perm, &plan);

    let mut succ = vec![u32::MAX; n];
    let mut meta = StructureMeta::new("collision-fn");
    let mut targets = Vec::new();
    for (i, scale_paths) in (plan.i_min..=plan.i_max).zip(&paths) {
        for (j, path) in scale_paths.iter().enumerate() {
            for w in path.windows(2) {
                succ[w[0] as usize] = w[1];
            }
            let last = *path.last().unwrap() as usize;
            let s = if i == t && j < bt {
                let w = rng.gen_range(1..=path.len() - 2);
                succ[last] = path[w];
                targets.push(w);
                meta.witnesses.push(Witness::collision(
                    path[w - 1] as usize,
                    last,
                    path[w] as usize,
                ));
                Structure::new(StructureKind::Path, path.clone())
            } else {
                succ[last] = path[0];
                Structure::new(StructureKind::Cycle, path.clone())
            };
            meta.structures.push(s.with_scale(i).with_index(j as u32));
        }
    }
    let rest = &perm[plan.path_elements()..];
    fill(&mut succ, rest, p.filler, &mut meta);

    meta.good_index = Some(t);
    plan.record(&mut meta);
    meta.note("witness_paths", bt);
    meta.note("collision_targets", &targets);
    meta.note("filler", p.filler);

    let f = FunctionInstance::new(succ).expect("every element was assigned");
    Ok(Generated {
        instance: Instance::Function(f.with_meta(meta)),
        certificate: Certificate::CollisionScale { t },
    })
}

fn fill(succ: &mut [u32], rest: &[u32], filler: Filler, meta: &mut StructureMeta) {
    if rest.is_empty() {
        return;
    }
    match filler {
        Filler::FixedPoints => {
            for &x in rest {
                succ[x as usize] = x;
            }
            meta.structures
                .push(Structure::new(StructureKind::Isolated, rest.to_vec()));
        }
        Filler::Cycles => {
            assert!(rest.len() >= 2, "a lone element cannot form a cycle");
            let mut k = 0;
            while k < rest.len() {
                let len = if rest.len() - k == 3 { 3 } else { 2 };
                let cyc = &rest[k..k + len];
                for j in 0..len {
                    succ[cyc[j] as usize] = cyc[(j + 1) % len];
                }
                meta.structures
                    .push(Structure::new(StructureKind::Cycle, cyc.to_vec()));
                k += len;
            }
        }
    }
}

/// The random part of the claw construction that does not depend on the good
/// scale: a blue pool, the paths of every scale, and the isolated rest.
#[derive(Debug, Clone)]
pub struct ClawLayout {
    pub plan: ScalePlan,
    pub pool: Vec<u32>,
    /// `paths[i - i_min][j]`, vertices in path order.
    pub paths: Vec<Vec<Vec<u32>>>,
    pub isolated: Vec<u32>,
}

pub fn claw_layout(n: usize, p: &ScaleParams, seed: u64) -> Result<ClawLayout, GenError> {
    p.validate(n, 1)?;
    let overhead = |b: &[usize]| 4 * b.iter().copied().max().unwrap_or(0);
    let plan = ScalePlan::compute(n, p, &overhead)?;
    let mut rng: Rng = rng_from_seed(derive_seed(seed, stream::INSTANCE));
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let pool = perm[..plan.overhead].to_vec();
    let paths = lay_paths(&perm[plan.overhead..], &plan);
    let isolated = perm[plan.usage..].to_vec();
    Ok(ClawLayout {
        plan,
        pool,
        paths,
        isolated,
    })
}

impl ClawLayout {
    pub fn n(&self) -> usize {
        self.plan.n
    }

    /// Candidate witness paths of scale `i`: the first `b_i` paths.
    pub fn red_paths(&self, i: u32) -> &[Vec<u32>] {
        let k = (i - self.plan.i_min) as usize;
        &self.paths[k][..self.plan.b[k]]
    }

    /// Adjacency lists of the black part: every path, no attachments.
    pub fn base_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n()];
        for path in self.paths.iter().flatten() {
            for w in path.windows(2) {
                adj[w[0] as usize].push(w[1]);
                adj[w[1] as usize].push(w[0]);
            }
        }
        adj
    }

    /// Pendant pairs for the ends of the `j`-th witness path.
    pub fn pendants(&self, j: usize) -> [u32; 4] {
        let p = &self.pool[4 * j..4 * j + 4];
        [p[0], p[1], p[2], p[3]]
    }

    /// Attaches two pool vertices to each end of the first `bt` scale-`t`
    /// paths and returns the finished graph with metadata.
    pub fn build(&self, t: u32, bt: usize) -> GraphInstance {
        let mut adj = self.base_adjacency();
        let k = (t - self.plan.i_min) as usize;
        let mut meta = StructureMeta::new("claw-graph");
        for (j, path) in self.paths[k][..bt].iter().enumerate() {
            let [b1, b2, b3, b4] = self.pendants(j);
            let (u, v) = (path[0], *path.last().unwrap());
            for (end, x) in [(u, b1), (u, b2), (v, b3), (v, b4)] {
                adj[end as usize].push(x);
                adj[x as usize].push(end);
            }
            let nu = adj[u as usize][0] as usize;
            let nv = adj[v as usize][0] as usize;
            meta.witnesses
                .push(Witness::star(u as usize, &[nu, b1 as usize, b2 as usize]));
            meta.witnesses
                .push(Witness::star(v as usize, &[nv, b3 as usize, b4 as usize]));
        }
        for (i, scale_paths) in (self.plan.i_min..=self.plan.i_max).zip(&self.paths) {
            for (j, path) in scale_paths.iter().enumerate() {
                meta.structures.push(
                    Structure::new(StructureKind::Path, path.clone())
                        .with_scale(i)
                        .with_index(j as u32),
                );
            }
        }
        for j in 0..bt {
            meta.structures.push(
                Structure::new(StructureKind::WitnessGadget, self.pendants(j).to_vec())
                    .with_scale(t)
                    .with_index(j as u32),
            );
        }
        let mut isolated: Vec<u32> = self.pool[4 * bt..].to_vec();
        isolated.extend_from_slice(&self.isolated);
        if !isolated.is_empty() {
            meta.structures
                .push(Structure::new(StructureKind::Isolated, isolated));
        }
        meta.good_index = Some(t);
        self.plan.record(&mut meta);
        meta.note("witness_paths", bt);
        GraphInstance::from_adjacency_unchecked(&adj).with_meta(meta)
    }
}

/// Claw graph: undirected paths of every scale; each end of the `b_t`
/// witness paths gets two pendant vertices from the reserved pool.
pub fn gen_claw_graph(n: usize, p: &ScaleParams, seed: u64) -> Result<Generated, GenError> {
    let layout = claw_layout(n, p, seed)?;
    let t = draw_good_index(p, seed);
    let bt = witness_paths(p, &layout.plan, t)?;
    Ok(Generated {
        instance: Instance::Graph(layout.build(t, bt)),
        certificate: Certificate::ClawScale { t },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_counts_follow_the_floor_formula() {
        let mut p = ScaleParams::new(2, 5);
        p.rho = Rho::Fixed(0.25);
        let plan = ScalePlan::compute(1024, &p, &|_| 0).unwrap();
        let expect: Vec<usize> = (2..=5)
            .map(|i| (0.25 * 1024.0 / 2.2f64.powi(i)).floor() as usize)
            .collect();
        assert_eq!(plan.a, expect);
    }

    #[test]
    fn auto_rho_fits() {
        let p = ScaleParams::new(2, 6);
        let plan = ScalePlan::compute(4096, &p, &|_| 0).unwrap();
        assert!(plan.usage <= 4096);
        assert!(plan.rho > 0.0 && plan.rho <= 1.0);
    }

    #[test]
    fn fixed_rho_overflow_is_reported() {
        let mut p = ScaleParams::new(2, 8);
        p.rho = Rho::Fixed(1.0);
        let err = ScalePlan::compute(1024, &p, &|_| 0).unwrap_err();
        assert!(matches!(err, GenError::Capacity { .. }));
    }

    #[test]
    fn collision_meta_partitions() {
        let g = gen_collision_function(4096, &ScaleParams::new(2, 6), 1).unwrap();
        g.meta().check_partition(4096).unwrap();
        let f = g.instance.as_function().unwrap();
        for w in &g.meta().witnesses {
            w.validate_function(f).unwrap();
        }
    }

    #[test]
    fn claw_meta_partitions() {
        let g = gen_claw_graph(4096, &ScaleParams::new(1, 6), 1).unwrap();
        g.meta().check_partition(4096).unwrap();
        let gr = g.instance.as_graph().unwrap();
        for w in &g.meta().witnesses {
            w.validate_graph(gr).unwrap();
        }
    }
}

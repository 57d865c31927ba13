//! Seeded synthetic instances: friendship-based, prominence-based and
//! weight-based delegations, each either synthetic or derived from a base
//! graph.
//!
//! Casting voters are drawn independently with probability `p_c` from the
//! global stream, in voter order. Per-voter orderings use the voter's own
//! stream, so changing one voter's neighbourhood never shifts another's
//! draws.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::EdgeList;
use crate::model::{classify, Instance, VoterClass};
use crate::rng::{self, Rng};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Friendship,
    ProminenceSynthetic,
    ProminenceFromBase,
    WeightBased,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spatial {
    /// Points uniform in the unit square.
    #[default]
    Uniform2d,
    /// Points from a standard bivariate normal.
    Gaussian2d,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub method: Method,
    pub n: usize,
    /// Probability that a voter casts its own vote.
    pub p_c: f64,
    /// Target average out-degree Δ.
    pub avg_degree: f64,
    #[serde(default = "default_exponent")]
    pub alpha: f64,
    #[serde(default = "default_exponent")]
    pub beta: f64,
    #[serde(default)]
    pub spatial: Spatial,
    #[serde(default)]
    pub seed: u64,
}

fn default_exponent() -> f64 {
    1.0
}

impl GenConfig {
    pub fn friendship(n: usize, avg_degree: f64, p_c: f64, alpha: f64, seed: u64) -> Self {
        GenConfig { method: Method::Friendship, n, p_c, avg_degree, alpha, beta: 1.0, spatial: Spatial::default(), seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.p_c) {
            return bad(format!("casting probability {} is outside [0, 1]", self.p_c));
        }
        if !(self.avg_degree.is_finite() && self.avg_degree > 0.0) {
            return bad(format!("average degree must be positive, got {}", self.avg_degree));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad(format!("beta must be non-negative, got {}", self.beta));
        }
        let needs_n = matches!(self.method, Method::Friendship | Method::ProminenceSynthetic | Method::WeightBased);
        if needs_n && self.n == 0 {
            return bad("the number of voters must be positive".into());
        }
        if self.method == Method::Friendship && self.n > 1 && self.avg_degree > (self.n - 1) as f64 {
            return bad(format!("average degree {} needs more than {} voters", self.avg_degree, self.n));
        }
        if self.method == Method::WeightBased && self.avg_degree.fract() != 0.0 {
            return bad(format!("weight-based generation needs an integral degree, got {}", self.avg_degree));
        }
        Ok(())
    }

    /// A copy with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig { seed, ..self.clone() }
    }
}

/// Dispatches on `cfg.method`; base-graph methods require `base`.
pub fn generate(cfg: &GenConfig, base: Option<&EdgeList>) -> Result<Instance> {
    match cfg.method {
        Method::Friendship => gen_friendship(cfg),
        Method::ProminenceSynthetic => gen_prominence(cfg, None),
        Method::ProminenceFromBase => {
            let base = base.ok_or_else(|| Error::InvalidConfig("prominence-from-base needs a base graph".into()))?;
            gen_prominence(cfg, Some(base))
        }
        Method::WeightBased => gen_weight_based(cfg, base),
    }
}

fn draw_casting(n: usize, p_c: f64, rng: &mut Rng) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(p_c)).collect()
}

/// Orders `items` by repeated draws proportional to `weight`, without
/// replacement. Zero total weight falls back to a uniform order.
fn weighted_order(items: &[usize], weight: impl Fn(usize) -> f64, rng: &mut Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = items.to_vec();
    let mut w: Vec<f64> = pool.iter().map(|&x| weight(x)).collect();
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let i = match WeightedIndex::new(&w) {
            Ok(dist) => dist.sample(rng),
            Err(_) => rng.gen_range(0..pool.len()),
        };
        out.push(pool.swap_remove(i));
        w.swap_remove(i);
    }
    out
}

fn build(rankings: Vec<Vec<usize>>, casting: &[bool], names: Option<Vec<String>>) -> Result<Instance> {
    let cast: Vec<usize> = (0..casting.len()).filter(|&v| casting[v]).collect();
    let inst = Instance::from_rankings(rankings, cast)?;
    match names {
        Some(names) => inst.with_names(names),
        None => Ok(inst),
    }
}

/// Friendship-based delegation. The base graph is Erdős–Rényi with edge
/// probability `Δ / (n - 1)`; every non-casting voter ranks its neighbours by
/// sequential sampling with weights `(1 + λ)^α`, `λ` being the number of
/// common neighbours in the base graph. Voters without neighbours abstain.
pub fn gen_friendship(cfg: &GenConfig) -> Result<Instance> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = rng::global(cfg.seed);
    let casting = draw_casting(n, cfg.p_c, &mut rng);
    let p = if n > 1 { (cfg.avg_degree / (n - 1) as f64).min(1.0) } else { 0.0 };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let sets: Vec<HashSet<usize>> = adj.iter().map(|a| a.iter().copied().collect()).collect();
    let rankings = (0..n)
        .map(|v| {
            if casting[v] {
                return Vec::new();
            }
            let mut vr = rng::voter_stream(cfg.seed, v);
            let common = |w: usize| adj[v].iter().filter(|x| sets[w].contains(x)).count();
            weighted_order(&adj[v], |w| (1.0 + common(w) as f64).powf(cfg.alpha), &mut vr)
        })
        .collect();
    build(rankings, &casting, None)
}

/// Prominence-based delegation.
///
/// Without a base graph: starting from no edges, a uniformly random
/// non-casting voter `v` repeatedly adds an edge to a new target `x` chosen
/// with probability proportional to `(1 + indeg(x))^β` in the graph built so
/// far, until `round(Δ · |V \ C|)` edges exist. Edge ranks follow insertion
/// order.
///
/// With a base graph: each non-casting voter ranks its base out-neighbours
/// by sequential sampling with weights `(1 + base indegree)^β`.
pub fn gen_prominence(cfg: &GenConfig, base: Option<&EdgeList>) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = rng::global(cfg.seed);
    match base {
        None => {
            let n = cfg.n;
            let casting = draw_casting(n, cfg.p_c, &mut rng);
            let mut rankings: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut indeg = vec![0usize; n];
            let mut open: Vec<usize> = (0..n).filter(|&v| !casting[v] && n > 1).collect();
            let target = (cfg.avg_degree * open.len() as f64).round() as usize;
            let mut added = 0;
            while added < target && !open.is_empty() {
                let slot = rng.gen_range(0..open.len());
                let v = open[slot];
                let taken: HashSet<usize> = rankings[v].iter().copied().collect();
                let candidates: Vec<usize> = (0..n).filter(|&x| x != v && !taken.contains(&x)).collect();
                let w: Vec<f64> = candidates.iter().map(|&x| (1.0 + indeg[x] as f64).powf(cfg.beta)).collect();
                let x = candidates[WeightedIndex::new(&w).map_err(|e| Error::InvalidConfig(e.to_string()))?.sample(&mut rng)];
                rankings[v].push(x);
                indeg[x] += 1;
                added += 1;
                if rankings[v].len() == n - 1 {
                    open.swap_remove(slot);
                }
            }
            build(rankings, &casting, None)
        }
        Some(base) => {
            let n = base.n();
            let casting = draw_casting(n, cfg.p_c, &mut rng);
            let out = base_out_neighbours(base);
            let mut indeg = vec![0usize; n];
            for list in &out {
                for &(x, _) in list {
                    indeg[x] += 1;
                }
            }
            let rankings = (0..n)
                .map(|v| {
                    if casting[v] {
                        return Vec::new();
                    }
                    let mut vr = rng::voter_stream(cfg.seed, v);
                    let targets: Vec<usize> = out[v].iter().map(|&(x, _)| x).collect();
                    weighted_order(&targets, |x| (1.0 + indeg[x] as f64).powf(cfg.beta), &mut vr)
                })
                .collect();
            build(rankings, &casting, Some(base.labels.clone()))
        }
    }
}

/// Out-neighbours per node with their weights; self-loops dropped and only
/// the first occurrence of a repeated edge kept.
fn base_out_neighbours(base: &EdgeList) -> Vec<Vec<(usize, Option<f64>)>> {
    let mut out: Vec<Vec<(usize, Option<f64>)>> = vec![Vec::new(); base.n()];
    let mut seen = HashSet::new();
    for &(u, v, w) in &base.edges {
        if u != v && seen.insert((u, v)) {
            out[u].push((v, w));
        }
    }
    out
}

/// Weight-based delegation.
///
/// Without a base graph: `n` random points in the plane; every non-casting
/// voter ranks its `Δ` nearest neighbours by increasing distance (equal
/// distances in random order).
///
/// With a weighted base graph: edges of positive weight are kept and ranked
/// by decreasing weight, equal weights in random order.
pub fn gen_weight_based(cfg: &GenConfig, base: Option<&EdgeList>) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = rng::global(cfg.seed);
    match base {
        None => {
            let n = cfg.n;
            let delta = cfg.avg_degree as usize;
            if n - 1 < delta {
                return Err(Error::InsufficientNeighbors { delta, available: n - 1 });
            }
            let casting = draw_casting(n, cfg.p_c, &mut rng);
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| match cfg.spatial {
                    Spatial::Uniform2d => (rng.gen::<f64>(), rng.gen::<f64>()),
                    Spatial::Gaussian2d => (StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)),
                })
                .collect();
            let dist = |a: usize, b: usize| {
                let (dx, dy) = (points[a].0 - points[b].0, points[a].1 - points[b].1);
                dx.hypot(dy)
            };
            let rankings = (0..n)
                .map(|v| {
                    if casting[v] {
                        return Vec::new();
                    }
                    let mut vr = rng::voter_stream(cfg.seed, v);
                    let mut others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
                    others.shuffle(&mut vr);
                    others.sort_by(|&a, &b| dist(v, a).total_cmp(&dist(v, b)));
                    others.truncate(delta);
                    others
                })
                .collect();
            build(rankings, &casting, None)
        }
        Some(base) => {
            let n = base.n();
            let casting = draw_casting(n, cfg.p_c, &mut rng);
            let out = base_out_neighbours(base);
            let mut rankings = vec![Vec::new(); n];
            for v in (0..n).filter(|&v| !casting[v]) {
                let mut list = Vec::new();
                for &(x, w) in &out[v] {
                    let w = w.ok_or_else(|| Error::InvalidConfig("weight-based generation needs edge weights".into()))?;
                    if w > 0.0 {
                        list.push((x, w));
                    }
                }
                let mut vr = rng::voter_stream(cfg.seed, v);
                list.shuffle(&mut vr);
                list.sort_by(|a, b| b.1.total_cmp(&a.1));
                rankings[v] = list.into_iter().map(|(x, _)| x).collect();
            }
            build(rankings, &casting, Some(base.labels.clone()))
        }
    }
}

/// Share of voters that are not isolated, `1 - |I| / |V|`.
pub fn participation_rate(instance: &Instance) -> Rational {
    Rational::from_integer(1) - isolated_fraction(instance)
}

/// `|I| / |V|`.
pub fn isolated_fraction(instance: &Instance) -> Rational {
    if instance.n() == 0 {
        return Rational::from_integer(0);
    }
    let isolated = classify(instance).count(VoterClass::Isolated);
    Rational::new(isolated as i64, instance.n() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;
    use crate::format::parse_edge_list;

    fn mean_out_degree(inst: &Instance) -> f64 {
        let non: Vec<_> = inst.voters().filter(|&v| !inst.is_casting(v)).collect();
        non.iter().map(|&v| inst.out_edges(v).len()).sum::<usize>() as f64 / non.len() as f64
    }

    #[test]
    fn friendship_is_deterministic_and_near_target_degree() {
        let cfg = GenConfig::friendship(1000, 4.0, 0.2, 2.0, 7);
        let a = gen_friendship(&cfg).unwrap();
        assert_eq!(a, gen_friendship(&cfg).unwrap());
        assert!((mean_out_degree(&a) - 4.0).abs() < 0.5, "{}", mean_out_degree(&a));
        a.check_contiguous_ranks().unwrap();
    }

    #[test]
    fn friendship_edge_cases() {
        let all_cast = gen_friendship(&GenConfig::friendship(50, 4.0, 1.0, 2.0, 1)).unwrap();
        assert_eq!(all_cast.edge_count(), 0);
        let uniform = gen_friendship(&GenConfig::friendship(50, 4.0, 0.2, 0.0, 1)).unwrap();
        uniform.check_contiguous_ranks().unwrap();
    }

    #[test]
    fn prominence_adds_exactly_m_edges() {
        let cfg = GenConfig { method: Method::ProminenceSynthetic, beta: 1.0, ..GenConfig::friendship(1000, 4.0, 0.2, 1.0, 3) };
        let inst = gen_prominence(&cfg, None).unwrap();
        let non = inst.voters().filter(|&v| !inst.is_casting(v)).count();
        assert_eq!(inst.edge_count(), 4 * non);
        inst.check_contiguous_ranks().unwrap();
    }

    #[test]
    fn weight_based_nearest_neighbours() {
        let cfg = GenConfig { method: Method::WeightBased, ..GenConfig::friendship(500, 6.0, 0.1, 1.0, 1) };
        let inst = gen_weight_based(&cfg, None).unwrap();
        for v in inst.voters().filter(|&v| !inst.is_casting(v)) {
            assert_eq!(inst.out_edges(v).len(), 6);
        }
        let gauss = GenConfig { spatial: Spatial::Gaussian2d, ..cfg.clone() };
        assert_eq!(gen_weight_based(&gauss, None).unwrap(), gen_weight_based(&gauss, None).unwrap());
        let small = GenConfig { n: 5, ..cfg };
        assert!(matches!(gen_weight_based(&small, None), Err(Error::InsufficientNeighbors { delta: 6, available: 4 })));
    }

    #[test]
    fn weight_based_from_base() {
        let base = parse_edge_list("a b 2\na c 5\na d 5\nb a -1\nc a -3\n").unwrap();
        let cfg = GenConfig { method: Method::WeightBased, ..GenConfig::friendship(4, 1.0, 0.0, 1.0, 9) };
        let inst = gen_weight_based(&cfg, Some(&base)).unwrap();
        let a = inst.id_of("a").unwrap();
        let ranked: Vec<String> = inst.out_edges(a).iter().map(|e| inst.name(e.target)).collect();
        assert_eq!(ranked.len(), 3);
        assert_eq!(ranked[2], "b");
        assert!(inst.out_edges(inst.id_of("b").unwrap()).is_empty());
        let negative = parse_edge_list("a b -1\nb a -2\n").unwrap();
        assert_eq!(gen_weight_based(&cfg, Some(&negative)).unwrap().edge_count(), 0);
    }

    #[test]
    fn prominence_from_base_keeps_base_edges() {
        let base = parse_edge_list("0 1\n0 2\n1 2\n2 0\n").unwrap();
        let cfg = GenConfig { method: Method::ProminenceFromBase, ..GenConfig::friendship(3, 1.0, 0.0, 1.0, 2) };
        let inst = generate(&cfg, Some(&base)).unwrap();
        assert_eq!(inst.edge_count(), 4);
        let zero = inst.id_of("0").unwrap();
        assert_eq!(inst.name(inst.out_edges(zero)[0].target).len(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::friendship(10, 4.0, 1.5, 2.0, 0).validate().is_err());
        assert!(GenConfig::friendship(10, -1.0, 0.5, 2.0, 0).validate().is_err());
        assert!(GenConfig::friendship(3, 4.0, 0.5, 2.0, 0).validate().is_err());
    }

    #[test]
    fn participation_of_fig1() {
        assert_eq!(participation_rate(&fig1()), Rational::new(9, 11));
        assert_eq!(participation_rate(&crate::fixtures::star(3)), Rational::from_integer(1));
    }
}

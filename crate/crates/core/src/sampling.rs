//! Small random instances for axiom falsification and oracle comparisons.

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use crate::model::{Instance, VoterId};
use crate::rng::{self, Rng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub max_out: usize,
    pub casting_fraction: f64,
}

impl SamplerConfig {
    /// Axiom trials: `n` in `4..=12`, out-degree `1..=3`, 30% casting.
    pub const AXIOMS: SamplerConfig = SamplerConfig { n_min: 4, n_max: 12, max_out: 3, casting_fraction: 0.3 };
    /// Oracle comparisons: `n` in `4..=10`.
    pub const ORACLE: SamplerConfig = SamplerConfig { n_min: 4, n_max: 10, max_out: 3, casting_fraction: 0.3 };
    /// Exhaustive popularity checks: `n` in `3..=8`.
    pub const POPULARITY: SamplerConfig = SamplerConfig { n_min: 3, n_max: 8, max_out: 3, casting_fraction: 0.3 };
}

/// Draws `n` uniformly, then exactly `max(1, round(fraction * n))` casting
/// voters, then for every other voter an out-degree uniform in
/// `1..=max_out` (capped at `n - 1`) and that many distinct targets in
/// random order.
pub fn sample_instance(cfg: SamplerConfig, rng: &mut Rng) -> Instance {
    let n = rng.gen_range(cfg.n_min..=cfg.n_max);
    let k = ((cfg.casting_fraction * n as f64).round() as usize).clamp(1, n);
    let mut casting = vec![false; n];
    for c in index::sample(rng, n, k) {
        casting[c] = true;
    }
    let mut rankings = vec![Vec::new(); n];
    for v in 0..n {
        if casting[v] {
            continue;
        }
        let deg = rng.gen_range(1..=cfg.max_out).min(n - 1);
        let mut others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        others.shuffle(rng);
        others.truncate(deg);
        rankings[v] = others;
    }
    let cast: Vec<usize> = (0..n).filter(|&v| casting[v]).collect();
    Instance::from_rankings(rankings, cast).expect("sampled instance is valid")
}

/// The `i`-th instance of a seeded batch.
pub fn nth_instance(cfg: SamplerConfig, seed: u64, i: u64) -> Instance {
    sample_instance(cfg, &mut rng::global(rng::child_seed(seed, i)))
}

/// Uniform pick among `candidates`, `None` when empty.
pub fn pick(rng: &mut Rng, candidates: &[VoterId]) -> Option<VoterId> {
    candidates.choose(rng).copied()
}

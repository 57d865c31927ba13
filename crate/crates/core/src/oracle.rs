//! Exhaustive reference implementations for small instances.

use crate::branching::{majority_margin, Branching, PriorityOrder};
use crate::error::{Error, Result};
use crate::model::{classify, paths_from, Instance, Path, RankedEdge, Sequence, VoterId};
use crate::order::{Comparison, SeqOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_paths: usize,
    pub max_branchings: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_paths: 100_000, max_branchings: 100_000 }
    }
}

/// The ⊳-best path of `v` among all its delegation paths.
pub fn oracle_best_path(instance: &Instance, v: VoterId, order: &SeqOrder, budget: OracleBudget) -> Result<Path> {
    let paths = paths_from(instance, v, budget.max_paths)?;
    let seqs: Vec<Sequence> = paths.iter().map(Path::sequence).collect();
    let best = (0..seqs.len()).find(|&i| {
        (0..seqs.len()).all(|j| i == j || order.cmp(&seqs[i], &seqs[j]) == Comparison::Better)
    });
    best.map(|i| paths[i].clone()).ok_or(Error::NonUniqueMax(v))
}

pub fn oracle_best_sequence(instance: &Instance, v: VoterId, order: &SeqOrder, budget: OracleBudget) -> Result<Sequence> {
    oracle_best_path(instance, v, order, budget).map(|p| p.sequence())
}

/// All C-branchings, by per-voter edge choice with a cycle filter. With
/// `reversed` the voters are enumerated from the highest id down and their
/// edges from the worst rank up; the set is the same.
pub fn enumerate_branchings_with(instance: &Instance, budget: OracleBudget, reversed: bool) -> Result<Vec<Branching>> {
    let classes = classify(instance);
    let mut voters: Vec<VoterId> = classes.delegating().collect();
    if reversed {
        voters.reverse();
    }
    let options: Vec<Vec<RankedEdge>> = voters
        .iter()
        .map(|&v| {
            let mut es: Vec<RankedEdge> =
                instance.out_edges(v).iter().filter(|e| classes.participates(e.target)).copied().collect();
            if reversed {
                es.reverse();
            }
            es
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![None; instance.n()];
    fill(instance, &voters, &options, 0, &mut choice, &mut out, budget.max_branchings)?;
    Ok(out)
}

pub fn enumerate_branchings(instance: &Instance, budget: OracleBudget) -> Result<Vec<Branching>> {
    enumerate_branchings_with(instance, budget, false)
}

fn fill(
    instance: &Instance,
    voters: &[VoterId],
    options: &[Vec<RankedEdge>],
    depth: usize,
    choice: &mut Vec<Option<RankedEdge>>,
    out: &mut Vec<Branching>,
    cap: usize,
) -> Result<()> {
    if depth == voters.len() {
        if let Ok(b) = Branching::new(instance, choice.clone()) {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded { what: "branching", cap });
            }
            out.push(b);
        }
        return Ok(());
    }
    let v = voters[depth];
    for e in &options[depth] {
        choice[v.0] = Some(*e);
        if !closes_cycle(choice, v) {
            fill(instance, voters, options, depth + 1, choice, out, cap)?;
        }
    }
    choice[v.0] = None;
    Ok(())
}

fn closes_cycle(choice: &[Option<RankedEdge>], v: VoterId) -> bool {
    let mut at = v;
    for _ in 0..choice.len() {
        match choice[at.0] {
            Some(e) if e.target == v => return true,
            Some(e) => at = e.target,
            None => return false,
        }
    }
    true
}

/// Maximum margin of any C-branching against `b`.
pub fn oracle_unpopularity(instance: &Instance, b: &Branching, budget: OracleBudget) -> Result<i64> {
    let all = enumerate_branchings(instance, budget)?;
    let mut best = i64::MIN;
    for other in &all {
        best = best.max(majority_margin(instance, other, b)?);
    }
    Ok(best)
}

/// `true` when `b` is preferred to `other` by priority: at the first voter
/// (in `pi` order) where their ranks differ, `b` has the smaller rank.
pub fn priority_prefers(pi: &PriorityOrder, b: &Branching, other: &Branching) -> bool {
    for &v in pi.order() {
        match (b.edge(v), other.edge(v)) {
            (Some(x), Some(y)) if x.rank != y.rank => return x.rank < y.rank,
            _ => {}
        }
    }
    false
}

/// Minimum rank sum, then the priority-best among those.
pub fn oracle_borda(instance: &Instance, pi: &PriorityOrder, budget: OracleBudget) -> Result<Branching> {
    let all = enumerate_branchings(instance, budget)?;
    let min = all.iter().map(Branching::rank_sum).min().ok_or(Error::EmptyInput)?;
    let mut best: Option<&Branching> = None;
    for b in all.iter().filter(|b| b.rank_sum() == min) {
        if best.is_none_or(|cur| priority_prefers(pi, b, cur)) {
            best = Some(b);
        }
    }
    Ok(best.unwrap().clone())
}

//! C-branchings: optimum branchings, Borda branchings with priority
//! tie-breaking, majority margins and unpopularity.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::edmonds::{min_arborescence, Arc};
use crate::error::{Error, Result};
use crate::model::{classify, Classification, Instance, Rank, RankedEdge, VoterId};
use crate::num::Cost;
use crate::resolve::Resolution;

/// One outgoing edge per delegating voter, acyclic. Indexed by the voter ids
/// of the instance it was built on; isolated voters are simply ignored, which
/// is the same as working on the reduced instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Branching {
    choice: Vec<Option<RankedEdge>>,
}

impl Branching {
    /// Validates that `choice` is a C-branching of `instance`.
    pub fn new(instance: &Instance, choice: Vec<Option<RankedEdge>>) -> Result<Self> {
        let b = Branching { choice };
        b.validate(instance, &classify(instance))?;
        Ok(b)
    }

    fn validate(&self, instance: &Instance, classes: &Classification) -> Result<()> {
        let bad = |msg: String| Err(Error::MismatchedInstance(msg));
        if self.choice.len() != instance.n() {
            return bad(format!("branching covers {} voters, instance has {}", self.choice.len(), instance.n()));
        }
        for v in instance.voters() {
            match (classes.is_delegating(v), self.choice[v.0]) {
                (true, None) => return bad(format!("delegating voter {v} has no edge")),
                (false, Some(_)) => return bad(format!("voter {v} is not delegating but has an edge")),
                (true, Some(e)) => {
                    if e.source != v || instance.edge(v, e.target) != Some(e) || !classes.participates(e.target) {
                        return bad(format!("edge of voter {v} is not an edge of the reduced instance"));
                    }
                }
                (false, None) => {}
            }
        }
        for v in classes.delegating() {
            let mut at = v;
            let mut steps = 0;
            while let Some(e) = self.choice[at.0] {
                at = e.target;
                steps += 1;
                if steps > instance.n() {
                    return bad(format!("the edges chosen from voter {v} run into a cycle"));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.choice.len()
    }

    pub fn edge(&self, v: VoterId) -> Option<RankedEdge> {
        self.choice.get(v.0).copied().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = RankedEdge> + '_ {
        self.choice.iter().flatten().copied()
    }

    pub fn as_slice(&self) -> &[Option<RankedEdge>] {
        &self.choice
    }

    pub fn rank_sum(&self) -> u64 {
        self.edges().map(|e| u64::from(e.rank)).sum()
    }

    pub fn cost_by<C: Cost>(&self, cost: impl Fn(&RankedEdge) -> C) -> C {
        self.edges().fold(C::zero(), |acc, e| acc + cost(&e))
    }

    /// The branching of a confluent resolution: the first edge of every path.
    pub fn from_resolution(instance: &Instance, res: &Resolution) -> Result<Self> {
        if !res.is_confluent() {
            return Err(Error::NonConfluentMetrics);
        }
        Branching::new(instance, res.first_edges())
    }

    /// Paths obtained by following the branching from every delegating voter.
    pub fn to_resolution(&self, rule: impl Into<String>) -> Resolution {
        Resolution::from_successors(rule, &self.choice)
    }
}

/// Bijection from voters to priorities; smaller priority is served first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PriorityOrder {
    /// Voters from highest to lowest priority.
    order: Vec<VoterId>,
}

impl PriorityOrder {
    /// Voter `v` gets priority `v + 1`.
    pub fn identity(n: usize) -> Self {
        PriorityOrder { order: (0..n).map(VoterId).collect() }
    }

    /// `order[0]` is served first.
    pub fn from_order(order: Vec<VoterId>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for v in &order {
            if v.0 >= order.len() || seen[v.0] {
                return Err(Error::InvalidConfig("priority order must be a permutation of all voters".into()));
            }
            seen[v.0] = true;
        }
        Ok(PriorityOrder { order })
    }

    /// Priorities `pi[v]` in `1..=n`.
    pub fn from_priorities(pi: &[usize]) -> Result<Self> {
        let mut order = vec![VoterId(usize::MAX); pi.len()];
        for (v, &p) in pi.iter().enumerate() {
            if p == 0 || p > pi.len() || order[p - 1].0 != usize::MAX {
                return Err(Error::InvalidConfig("priorities must be a bijection onto 1..n".into()));
            }
            order[p - 1] = VoterId(v);
        }
        Ok(PriorityOrder { order })
    }

    pub fn order(&self) -> &[VoterId] {
        &self.order
    }

    pub fn priority(&self, v: VoterId) -> usize {
        self.order.iter().position(|&u| u == v).map(|p| p + 1).unwrap_or(usize::MAX)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Comma-separated voter ids, highest priority first: `"3,0,2,1"`.
impl FromStr for PriorityOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map(VoterId))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidConfig(format!("bad priority list: {e}")))?;
        PriorityOrder::from_order(order)
    }
}

impl fmt::Display for PriorityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.order.iter().map(VoterId::to_string).collect();
        f.write_str(&ids.join(","))
    }
}

/// Optimum branching over admissible edges only; `allowed[v]` restricts
/// voter `v` to one edge when set.
fn optimum<C: Cost>(
    instance: &Instance,
    classes: &Classification,
    cost: &impl Fn(&RankedEdge) -> C,
    fixed: &[Option<RankedEdge>],
) -> Result<(C, Branching)> {
    let n = instance.n();
    let root = n;
    let mut arcs = Vec::new();
    let mut edge_of = Vec::new();
    for v in instance.voters() {
        match classes.class(v) {
            crate::model::VoterClass::Casting | crate::model::VoterClass::Isolated => {
                arcs.push(Arc { from: root, to: v.0, cost: C::zero() });
                edge_of.push(None);
            }
            crate::model::VoterClass::Delegating => {
                for e in instance.out_edges(v) {
                    if !classes.participates(e.target) || fixed[v.0].is_some_and(|f| f != *e) {
                        continue;
                    }
                    arcs.push(Arc { from: e.target.0, to: v.0, cost: cost(e) });
                    edge_of.push(Some(*e));
                }
            }
        }
    }
    let chosen = min_arborescence(n + 1, root, &arcs).ok_or_else(|| {
        let v = classes
            .delegating()
            .find(|v| fixed[v.0].is_none())
            .or_else(|| classes.delegating().next())
            .unwrap_or(VoterId(0));
        Error::Infeasible(v)
    })?;
    let mut choice = vec![None; n];
    let mut total = C::zero();
    for v in 0..n {
        if let Some(e) = chosen[v].and_then(|i| edge_of[i]) {
            total = total + arcs[chosen[v].unwrap()].cost.clone();
            choice[v] = Some(e);
        }
    }
    Ok((total, Branching { choice }))
}

/// A minimum-cost C-branching, without tie-breaking guarantees beyond
/// determinism. Returns the cost alongside.
pub fn optimum_branching<C: Cost>(instance: &Instance, cost: impl Fn(&RankedEdge) -> C) -> Result<(C, Branching)> {
    let classes = classify(instance);
    optimum(instance, &classes, &cost, &vec![None; instance.n()])
}

/// A minimum-cost C-branching; among the optimal ones, the one that gives
/// voters in priority order the smallest possible rank (earlier voters
/// first). Computed by fixing voters one by one, each probe being a
/// constrained optimum branching.
pub fn min_cost_branching<C: Cost>(
    instance: &Instance,
    cost: impl Fn(&RankedEdge) -> C,
    pi: &PriorityOrder,
) -> Result<Branching> {
    if pi.len() != instance.n() {
        return Err(Error::MismatchedInstance(format!(
            "priority order has {} voters, instance has {}",
            pi.len(),
            instance.n()
        )));
    }
    let classes = classify(instance);
    let mut fixed = vec![None; instance.n()];
    let (opt, mut current) = optimum(instance, &classes, &cost, &fixed)?;
    for &v in pi.order() {
        let Some(incumbent) = current.choice[v.0] else { continue };
        for e in instance.out_edges(v) {
            if e.rank >= incumbent.rank {
                break;
            }
            if !classes.participates(e.target) {
                continue;
            }
            fixed[v.0] = Some(*e);
            match optimum(instance, &classes, &cost, &fixed) {
                Ok((c, b)) if c == opt => {
                    current = b;
                    break;
                }
                _ => {}
            }
        }
        fixed[v.0] = current.choice[v.0];
    }
    Ok(current)
}

/// Rank-sum-minimal C-branching with priority tie-breaking.
pub fn borda_branching(instance: &Instance, pi: &PriorityOrder) -> Result<Branching> {
    min_cost_branching(instance, |e| i64::from(e.rank), pi)
}

fn check_same(instance: &Instance, bs: &[&Branching]) -> Result<Classification> {
    let classes = classify(instance);
    for b in bs {
        b.validate(instance, &classes)?;
    }
    Ok(classes)
}

/// Voters preferring `b` minus voters preferring `other`; each voter compares
/// the rank of its own edge.
pub fn majority_margin(instance: &Instance, b: &Branching, other: &Branching) -> Result<i64> {
    let classes = check_same(instance, &[b, other])?;
    Ok(margin(&classes, b, other))
}

fn margin(classes: &Classification, b: &Branching, other: &Branching) -> i64 {
    classes
        .delegating()
        .map(|v| {
            let (x, y) = (b.choice[v.0].unwrap().rank, other.choice[v.0].unwrap().rank);
            match x.cmp(&y) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
            }
        })
        .sum()
}

/// Largest margin any branching achieves against `b`, with a branching
/// attaining it.
pub fn unpopularity_margin(instance: &Instance, b: &Branching) -> Result<(i64, Branching)> {
    check_same(instance, &[b])?;
    let own: Vec<Option<Rank>> = b.choice.iter().map(|e| e.map(|e| e.rank)).collect();
    let (cost, best) = optimum_branching(instance, |e| match own[e.source.0] {
        Some(r) if e.rank < r => -1i64,
        Some(r) if e.rank > r => 1,
        _ => 0,
    })?;
    Ok((-cost, best))
}

pub fn is_popular(instance: &Instance, b: &Branching) -> Result<bool> {
    Ok(unpopularity_margin(instance, b)?.0 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, mutual_pair, star};
    use num_rational::Ratio;

    fn ranks(inst: &Instance, b: &Branching, names: &[&str]) -> Vec<Rank> {
        names.iter().map(|n| b.edge(inst.id_of(n).unwrap()).unwrap().rank).collect()
    }

    #[test]
    fn mutual_pair_cost_three_and_priority() {
        let inst = mutual_pair();
        let (cost, _) = optimum_branching(&inst, |e| i64::from(e.rank)).unwrap();
        assert_eq!(cost, 3);
        let b = borda_branching(&inst, &PriorityOrder::identity(inst.n())).unwrap();
        assert_eq!(ranks(&inst, &b, &["v1", "v2"]), vec![1, 2]);
        let res = b.to_resolution("borda");
        assert_eq!(res.sequence(inst.id_of("v1").unwrap()).unwrap().0, vec![1, 2]);
        let v2_first = PriorityOrder::from_order(vec![VoterId(1), VoterId(0), VoterId(2), VoterId(3)]).unwrap();
        let b = borda_branching(&inst, &v2_first).unwrap();
        assert_eq!(ranks(&inst, &b, &["v1", "v2"]), vec![2, 1]);
    }

    #[test]
    fn star_has_one_branching() {
        let inst = star(4);
        let b = borda_branching(&inst, &PriorityOrder::identity(5)).unwrap();
        assert_eq!(b.rank_sum(), 4);
        assert_eq!(unpopularity_margin(&inst, &b).unwrap().0, 0);
    }

    #[test]
    fn rational_costs() {
        let inst = mutual_pair();
        let (cost, _) = optimum_branching(&inst, |e| Ratio::new(i64::from(e.rank), 3)).unwrap();
        assert_eq!(cost, Ratio::new(1, 1));
        let (fcost, _) = optimum_branching(&inst, |e| f64::from(e.rank) * 0.5).unwrap();
        assert_eq!(fcost, 1.5);
    }

    #[test]
    fn margins_on_the_mutual_pair() {
        let inst = mutual_pair();
        let (v1, v2, w1, w2) = (VoterId(0), VoterId(1), VoterId(2), VoterId(3));
        let e = |s, t| inst.edge(s, t).unwrap();
        let b = Branching::new(&inst, vec![Some(e(v1, v2)), Some(e(v2, w2)), None, None]).unwrap();
        let b2 = Branching::new(&inst, vec![Some(e(v1, w1)), Some(e(v2, v1)), None, None]).unwrap();
        assert_eq!(majority_margin(&inst, &b, &b2).unwrap(), 0);
        assert_eq!(majority_margin(&inst, &b, &b).unwrap(), 0);
        let both_direct = Branching::new(&inst, vec![Some(e(v1, w1)), Some(e(v2, w2)), None, None]).unwrap();
        assert_eq!(majority_margin(&inst, &b, &both_direct).unwrap(), 1);
        let (mu, best) = unpopularity_margin(&inst, &both_direct).unwrap();
        assert_eq!(mu, 1);
        assert_eq!(majority_margin(&inst, &best, &both_direct).unwrap(), 1);
        assert!(is_popular(&inst, &b).unwrap());
    }

    #[test]
    fn cyclic_choice_is_rejected() {
        let inst = mutual_pair();
        let e = |s, t| inst.edge(VoterId(s), VoterId(t)).unwrap();
        assert!(Branching::new(&inst, vec![Some(e(0, 1)), Some(e(1, 0)), None, None]).is_err());
    }

    #[test]
    fn fig1_borda_ignores_isolated_voters() {
        let inst = fig1();
        let b = borda_branching(&inst, &PriorityOrder::identity(inst.n())).unwrap();
        assert_eq!(b.edges().count(), 6);
        assert!(b.edge(inst.id_of("g").unwrap()).is_none());
        let f = b.edge(inst.id_of("f").unwrap()).unwrap();
        assert_ne!(inst.name(f.target), "g");
    }

    #[test]
    fn priority_parsing() {
        let pi: PriorityOrder = "2,0,1".parse().unwrap();
        assert_eq!(pi.priority(VoterId(2)), 1);
        assert_eq!(pi.to_string(), "2,0,1");
        assert!("0,0,1".parse::<PriorityOrder>().is_err());
        assert_eq!(PriorityOrder::from_priorities(&[2, 3, 1]).unwrap(), pi);
    }
}

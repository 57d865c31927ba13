//! Delegation rules that select one path per delegating voter.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{classify, Instance, Path, Rank, RankedEdge, Sequence, VoterId};
use crate::order::SeqOrder;

/// Chosen path of every delegating voter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub rule: String,
    paths: Vec<Option<Path>>,
}

impl Resolution {
    /// `paths[v]` must be `Some` exactly for the delegating voters.
    pub fn new(rule: impl Into<String>, paths: Vec<Option<Path>>) -> Self {
        Resolution { rule: rule.into(), paths }
    }

    /// Builds paths by following a successor edge from every delegating voter.
    pub fn from_successors(rule: impl Into<String>, next: &[Option<RankedEdge>]) -> Self {
        let paths = (0..next.len())
            .map(|v| next[v].map(|_| follow(next, VoterId(v))))
            .collect();
        Resolution::new(rule, paths)
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, v: VoterId) -> Option<&Path> {
        self.paths.get(v.0).and_then(Option::as_ref)
    }

    /// `(voter, path)` pairs in voter order.
    pub fn paths(&self) -> impl Iterator<Item = (VoterId, &Path)> + '_ {
        self.paths
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|p| (VoterId(i), p)))
    }

    pub fn guru(&self, v: VoterId) -> Option<VoterId> {
        self.path(v).and_then(Path::target)
    }

    pub fn sequence(&self, v: VoterId) -> Option<Sequence> {
        self.path(v).map(Path::sequence)
    }

    /// First edge of every chosen path, indexed by voter.
    pub fn first_edges(&self) -> Vec<Option<RankedEdge>> {
        self.paths.iter().map(|p| p.as_ref().and_then(Path::first_edge)).collect()
    }

    pub fn is_confluent(&self) -> bool {
        is_confluent_output(self)
    }

    /// Human-readable listing, one `voter: a -> b [seq: (..)]` line per delegating voter.
    pub fn listing(&self, instance: &Instance) -> String {
        let mut out = String::new();
        for (v, p) in self.paths() {
            out.push_str(&format!("{}: {} [seq: {}]\n", instance.name(v), p.display(instance), p.sequence()));
        }
        out
    }
}

fn follow(next: &[Option<RankedEdge>], v: VoterId) -> Path {
    let mut edges = Vec::new();
    let mut at = v;
    while let Some(e) = next[at.0] {
        edges.push(e);
        at = e.target;
        assert!(edges.len() <= next.len(), "successor map contains a cycle");
    }
    Path::new(edges)
}

/// Every voter on a chosen path leaves along a single edge across all paths.
pub fn is_confluent_output(res: &Resolution) -> bool {
    let mut next: Vec<Option<VoterId>> = vec![None; res.n()];
    for (_, path) in res.paths() {
        for e in &path.edges {
            match next[e.source.0] {
                Some(t) if t != e.target => return false,
                _ => next[e.source.0] = Some(e.target),
            }
        }
    }
    true
}

/// Copy of the instance without edges of rank above `d`.
pub fn truncate_outdegree(instance: &Instance, d: Rank) -> Instance {
    instance.truncated(d)
}

struct Candidate<'a> {
    order: &'a SeqOrder,
    seq: Sequence,
    edge: RankedEdge,
}

impl Candidate<'_> {
    /// `Less` means `self` should settle first.
    fn precedence(&self, other: &Self) -> Ordering {
        self.order
            .cmp_total(&self.seq, &other.seq)
            .then(self.edge.source.cmp(&other.edge.source))
            .then(self.edge.target.cmp(&other.edge.target))
    }
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.precedence(other) == Ordering::Equal
    }
}

impl Eq for Candidate<'_> {}

impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.precedence(self)
    }
}

/// Sequence rule for a confluent order, computed by settling voters one at a
/// time: starting from the casting voters (labelled with the empty
/// sequence), the unsettled voter whose candidate `(r(v, w), label(w))` is
/// best is settled next. Equal candidates of different voters go to the
/// smaller voter id, then the smaller target id.
pub fn resolve_confluent(instance: &Instance, order: &SeqOrder) -> Result<Resolution> {
    if *order == SeqOrder::Lex {
        return Err(Error::NotConfluentOrder);
    }
    let n = instance.n();
    let incoming = instance.in_edges();
    let mut label: Vec<Option<Sequence>> = vec![None; n];
    let mut next: Vec<Option<RankedEdge>> = vec![None; n];
    let mut heap = BinaryHeap::new();

    for c in instance.casting_voters() {
        label[c.0] = Some(Sequence::empty());
    }
    for c in instance.casting_voters() {
        relax(order, &incoming, c, &label, &mut heap);
    }
    while let Some(Candidate { seq, edge, .. }) = heap.pop() {
        let v = edge.source;
        if label[v.0].is_some() {
            continue;
        }
        label[v.0] = Some(seq);
        next[v.0] = Some(edge);
        relax(order, &incoming, v, &label, &mut heap);
    }
    Ok(Resolution::from_successors(order.name(), &next))
}

fn relax<'a>(
    order: &'a SeqOrder,
    incoming: &[Vec<RankedEdge>],
    w: VoterId,
    label: &[Option<Sequence>],
    heap: &mut BinaryHeap<Candidate<'a>>,
) {
    let lw = label[w.0].as_ref().expect("relaxing a settled voter");
    for e in &incoming[w.0] {
        if label[e.source.0].is_none() {
            heap.push(Candidate { order, seq: lw.prepend(e.rank), edge: *e });
        }
    }
}

/// Voters that reach a casting voter without passing through a blocked voter.
fn reach_avoiding(instance: &Instance, incoming: &[Vec<RankedEdge>], blocked: &[bool]) -> Vec<bool> {
    let mut reach = vec![false; instance.n()];
    let mut queue = VecDeque::new();
    for c in instance.casting_voters() {
        if !blocked[c.0] {
            reach[c.0] = true;
            queue.push_back(c);
        }
    }
    while let Some(w) = queue.pop_front() {
        for e in &incoming[w.0] {
            let s = e.source.0;
            if !reach[s] && !blocked[s] {
                reach[s] = true;
                queue.push_back(e.source);
            }
        }
    }
    reach
}

/// Depth-first delegation: the lexicographically best path of every voter.
///
/// Each voter walks greedily along its best-ranked edge whose head can still
/// reach a casting voter once all voters visited so far are removed.
pub fn resolve_dfd(instance: &Instance) -> Result<Resolution> {
    let classes = classify(instance);
    let incoming = instance.in_edges();
    let mut paths = vec![None; instance.n()];
    for v in classes.delegating() {
        let mut visited = vec![false; instance.n()];
        visited[v.0] = true;
        let mut edges = Vec::new();
        let mut at = v;
        while !instance.is_casting(at) {
            let out = instance.out_edges(at);
            // A casting head is always feasible; skip the reachability sweep then.
            let step = match out.iter().find(|e| !visited[e.target.0]) {
                Some(e) if instance.is_casting(e.target) => Some(*e),
                _ => {
                    let reach = reach_avoiding(instance, &incoming, &visited);
                    out.iter().find(|e| reach[e.target.0]).copied()
                }
            };
            let e = step.ok_or_else(|| {
                Error::InvalidInstance(format!("voter {at} lost its route to a casting voter"))
            })?;
            visited[e.target.0] = true;
            edges.push(e);
            at = e.target;
        }
        paths[v.0] = Some(Path::new(edges));
    }
    Ok(Resolution::new("dfd", paths))
}

/// The diffusion process: repeatedly take the smallest rank on any edge
/// entering the settled set and settle the tails of all such edges at once.
pub fn resolve_diffusion_process(instance: &Instance) -> Result<Resolution> {
    let n = instance.n();
    let mut settled: Vec<bool> = (0..n).map(|v| instance.is_casting(VoterId(v))).collect();
    let mut next: Vec<Option<RankedEdge>> = vec![None; n];
    loop {
        let boundary: Vec<RankedEdge> = instance
            .edges()
            .filter(|e| !settled[e.source.0] && settled[e.target.0])
            .copied()
            .collect();
        let Some(min) = boundary.iter().map(|e| e.rank).min() else { break };
        for e in boundary.into_iter().filter(|e| e.rank == min) {
            debug_assert!(next[e.source.0].is_none(), "two boundary edges of one voter share a rank");
            next[e.source.0] = Some(e);
        }
        for (v, e) in next.iter().enumerate() {
            if e.is_some() {
                settled[v] = true;
            }
        }
    }
    Ok(Resolution::from_successors("diffusion", &next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, mutual_pair, star};

    fn trace(inst: &Instance, res: &Resolution, name: &str) -> String {
        res.path(inst.id_of(name).unwrap()).unwrap().display(inst)
    }

    #[test]
    fn fig1_sequence_rules_for_voter_a() {
        let inst = fig1();
        let dfd = resolve_dfd(&inst).unwrap();
        assert_eq!(trace(&inst, &dfd, "a"), "a -> b -> c -> d -> e -> f -> k");
        assert_eq!(trace(&inst, &dfd, "d"), "d -> e -> b -> c -> i");
        assert_eq!(dfd.sequence(inst.id_of("d").unwrap()).unwrap(), Sequence::from([1, 1, 1, 3]));
        let bfd = resolve_confluent(&inst, &SeqOrder::Bfd).unwrap();
        assert_eq!(trace(&inst, &bfd, "a"), "a -> b -> c -> i");
        for order in [SeqOrder::MinSum, SeqOrder::Leximax] {
            let res = resolve_confluent(&inst, &order).unwrap();
            assert_eq!(trace(&inst, &res, "a"), "a -> b -> c -> d -> j", "{order}");
        }
    }

    #[test]
    fn fig1_diffusion_sends_everyone_to_j() {
        let inst = fig1();
        let engine = resolve_confluent(&inst, &SeqOrder::Diff).unwrap();
        let process = resolve_diffusion_process(&inst).unwrap();
        let j = inst.id_of("j").unwrap();
        for name in ["a", "b", "c", "d", "e", "f"] {
            assert_eq!(engine.guru(inst.id_of(name).unwrap()), Some(j), "{name}");
        }
        assert_eq!(trace(&inst, &engine, "c"), "c -> d -> j");
        assert_eq!(trace(&inst, &engine, "f"), "f -> e -> b -> c -> d -> j");
        assert_eq!(engine.first_edges(), process.first_edges());
    }

    #[test]
    fn lex_is_rejected_by_the_settle_engine() {
        assert!(matches!(resolve_confluent(&fig1(), &SeqOrder::Lex), Err(Error::NotConfluentOrder)));
    }

    #[test]
    fn confluence_of_outputs() {
        let inst = fig1();
        assert!(resolve_confluent(&inst, &SeqOrder::Bfd).unwrap().is_confluent());
        assert!(!resolve_dfd(&inst).unwrap().is_confluent());
        assert!(resolve_dfd(&star(3)).unwrap().is_confluent());
    }

    #[test]
    fn isolated_voters_get_no_path() {
        let inst = fig1();
        let res = resolve_confluent(&inst, &SeqOrder::Bfd).unwrap();
        assert!(res.path(inst.id_of("g").unwrap()).is_none());
        assert_eq!(res.paths().count(), 6);
    }

    #[test]
    fn mutual_pair_diffusion_settles_both_directly_in_one_batch() {
        let inst = mutual_pair();
        let res = resolve_diffusion_process(&inst).unwrap();
        for v in ["v1", "v2"] {
            assert_eq!(res.path(inst.id_of(v).unwrap()).unwrap().len(), 1);
        }
        // The settle engine breaks the cross-voter tie towards v1.
        let engine = resolve_confluent(&inst, &SeqOrder::Bfd).unwrap();
        assert_eq!(engine.path(inst.id_of("v1").unwrap()).unwrap().len(), 1);
    }

    #[test]
    fn truncation_to_one() {
        let inst = truncate_outdegree(&fig1(), 1);
        let f = inst.id_of("f").unwrap();
        assert_eq!(inst.out_edges(f).len(), 1);
        assert_eq!(inst.out_edges(f)[0].target, inst.id_of("e").unwrap());
        let classes = classify(&inst);
        assert_eq!(classes.count(crate::model::VoterClass::Delegating), 0);
        assert_eq!(truncate_outdegree(&fig1(), 4), fig1());
    }
}

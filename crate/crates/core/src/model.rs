//! Ranked delegation instances, voter classification, paths and rank
//! sequences.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a delegation edge in its source voter's ranking (1 is the top choice).
pub type Rank = u32;

/// Dense voter index in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoterId(pub usize);

impl VoterId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VoterId {
    fn from(v: usize) -> Self {
        VoterId(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RankedEdge {
    pub source: VoterId,
    pub target: VoterId,
    pub rank: Rank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VoterClass {
    Casting,
    Delegating,
    Isolated,
}

/// A ranked delegation instance.
///
/// Out-edges of each voter are stored sorted by rank. Instances built with
/// [`Instance::from_rankings`] have contiguous ranks `1..=k`; reduced
/// instances keep the original (possibly gappy) ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    out: Vec<Vec<RankedEdge>>,
    casting: Vec<bool>,
    names: Option<Vec<String>>,
}

impl Instance {
    /// Builds an instance from per-voter rankings: `rankings[v][i]` is the
    /// rank-`i + 1` delegate of voter `v`. Casting voters must have empty
    /// rankings.
    pub fn from_rankings<I>(rankings: Vec<Vec<usize>>, casting: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let n = rankings.len();
        let mut edges = Vec::new();
        for (v, targets) in rankings.iter().enumerate() {
            for (i, &t) in targets.iter().enumerate() {
                edges.push(RankedEdge {
                    source: VoterId(v),
                    target: VoterId(t),
                    rank: i as Rank + 1,
                });
            }
        }
        let inst = Self::from_ranked_edges(n, casting, edges)?;
        inst.check_contiguous_ranks()?;
        Ok(inst)
    }

    /// Builds an instance from explicit ranked edges. Rank values must be
    /// distinct per voter but need not be contiguous.
    pub fn from_ranked_edges<I, E>(n: usize, casting: I, edges: E) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
        E: IntoIterator<Item = RankedEdge>,
    {
        let mut is_casting = vec![false; n];
        for c in casting {
            if c >= n {
                return Err(Error::InvalidInstance(format!("casting voter {c} out of range 0..{n}")));
            }
            is_casting[c] = true;
        }
        let mut out: Vec<Vec<RankedEdge>> = vec![Vec::new(); n];
        for e in edges {
            let (s, t) = (e.source.0, e.target.0);
            if s >= n || t >= n {
                return Err(Error::InvalidInstance(format!("edge {s}->{t} out of range 0..{n}")));
            }
            if s == t {
                return Err(Error::InvalidInstance(format!("self-delegation of voter {s}")));
            }
            if e.rank == 0 {
                return Err(Error::InvalidInstance(format!("edge {s}->{t} has rank 0")));
            }
            if is_casting[s] {
                return Err(Error::InvalidInstance(format!("casting voter {s} has an outgoing edge")));
            }
            out[s].push(e);
        }
        for list in &mut out {
            list.sort_by_key(|e| e.rank);
            for w in list.windows(2) {
                if w[0].rank == w[1].rank {
                    return Err(Error::InvalidInstance(format!(
                        "voter {} uses rank {} twice",
                        w[0].source, w[0].rank
                    )));
                }
            }
            let mut targets: Vec<usize> = list.iter().map(|e| e.target.0).collect();
            targets.sort_unstable();
            if targets.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "voter {} lists a delegate twice",
                    list[0].source
                )));
            }
        }
        Ok(Instance { out, casting: is_casting, names: None })
    }

    /// Attaches display names. Names must be unique and non-empty.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n() {
            return Err(Error::InvalidInstance(format!(
                "{} names for {} voters",
                names.len(),
                self.n()
            )));
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) || names.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidInstance("voter names must be unique and non-empty".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Verifies that every non-casting voter ranks its delegates `1..=k`.
    pub fn check_contiguous_ranks(&self) -> Result<()> {
        for list in &self.out {
            for (i, e) in list.iter().enumerate() {
                if e.rank != i as Rank + 1 {
                    return Err(Error::InvalidInstance(format!(
                        "ranks of voter {} are not 1..{}",
                        e.source,
                        list.len()
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn voters(&self) -> impl Iterator<Item = VoterId> + '_ {
        (0..self.n()).map(VoterId)
    }

    #[inline]
    pub fn is_casting(&self, v: VoterId) -> bool {
        self.casting[v.0]
    }

    pub fn casting_voters(&self) -> impl Iterator<Item = VoterId> + '_ {
        self.voters().filter(move |&v| self.is_casting(v))
    }

    /// Out-edges of `v`, sorted by rank.
    #[inline]
    pub fn out_edges(&self, v: VoterId) -> &[RankedEdge] {
        &self.out[v.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = &RankedEdge> + '_ {
        self.out.iter().flatten()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn edge(&self, source: VoterId, target: VoterId) -> Option<RankedEdge> {
        self.out[source.0].iter().copied().find(|e| e.target == target)
    }

    pub fn max_rank(&self) -> Rank {
        self.edges().map(|e| e.rank).max().unwrap_or(0)
    }

    /// In-edges per voter.
    pub fn in_edges(&self) -> Vec<Vec<RankedEdge>> {
        let mut incoming = vec![Vec::new(); self.n()];
        for e in self.edges() {
            incoming[e.target.0].push(*e);
        }
        incoming
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of `v`: its name if the instance carries names, the id otherwise.
    pub fn name(&self, v: VoterId) -> String {
        match &self.names {
            Some(names) => names[v.0].clone(),
            None => v.0.to_string(),
        }
    }

    pub fn id_of(&self, name: &str) -> Option<VoterId> {
        match &self.names {
            Some(names) => names.iter().position(|s| s == name).map(VoterId),
            None => name.parse::<usize>().ok().filter(|&i| i < self.n()).map(VoterId),
        }
    }

    /// Copy with the out-edges of `v` deleted; `v` stays non-casting.
    pub fn without_out_edges(&self, v: VoterId) -> Instance {
        let mut inst = self.clone();
        inst.out[v.0].clear();
        inst
    }

    /// Copy where `v` turns into a casting voter (its out-edges are deleted).
    pub fn promoted_to_casting(&self, v: VoterId) -> Instance {
        let mut inst = self.without_out_edges(v);
        inst.casting[v.0] = true;
        inst
    }

    /// Copy with `k` fresh casting voters appended. They have no edges and
    /// nobody delegates to them.
    pub fn with_isolated_casting(&self, k: usize) -> Instance {
        let mut inst = self.clone();
        let n = inst.n();
        for i in 0..k {
            inst.out.push(Vec::new());
            inst.casting.push(true);
            if let Some(names) = &mut inst.names {
                let mut name = format!("dummy{}", n + i);
                while names.contains(&name) {
                    name.push('_');
                }
                names.push(name);
            }
        }
        inst
    }

    /// Copy keeping only edges of rank at most `d`.
    pub fn truncated(&self, d: Rank) -> Instance {
        let mut inst = self.clone();
        for list in &mut inst.out {
            list.retain(|e| e.rank <= d);
        }
        inst
    }
}

/// Per-voter class, indexed by voter id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    classes: Vec<VoterClass>,
}

impl Classification {
    pub fn class(&self, v: VoterId) -> VoterClass {
        self.classes[v.0]
    }

    pub fn is_delegating(&self, v: VoterId) -> bool {
        self.classes[v.0] == VoterClass::Delegating
    }

    pub fn is_isolated(&self, v: VoterId) -> bool {
        self.classes[v.0] == VoterClass::Isolated
    }

    /// Casting or delegating.
    pub fn participates(&self, v: VoterId) -> bool {
        self.classes[v.0] != VoterClass::Isolated
    }

    pub fn of_class(&self, class: VoterClass) -> impl Iterator<Item = VoterId> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == class)
            .map(|(i, _)| VoterId(i))
    }

    pub fn delegating(&self) -> impl Iterator<Item = VoterId> + '_ {
        self.of_class(VoterClass::Delegating)
    }

    pub fn count(&self, class: VoterClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn as_slice(&self) -> &[VoterClass] {
        &self.classes
    }
}

/// Partitions voters into casting, delegating and isolated by reverse
/// reachability from the casting voters.
pub fn classify(instance: &Instance) -> Classification {
    let n = instance.n();
    let incoming = instance.in_edges();
    let mut classes = vec![VoterClass::Isolated; n];
    let mut queue = VecDeque::new();
    for c in instance.casting_voters() {
        classes[c.0] = VoterClass::Casting;
        queue.push_back(c);
    }
    while let Some(w) = queue.pop_front() {
        for e in &incoming[w.0] {
            if classes[e.source.0] == VoterClass::Isolated {
                classes[e.source.0] = VoterClass::Delegating;
                queue.push_back(e.source);
            }
        }
    }
    Classification { classes }
}

/// The instance restricted to casting and delegating voters.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub instance: Instance,
    /// `original[i]` is the id, in the source instance, of reduced voter `i`.
    pub original: Vec<VoterId>,
}

/// Drops isolated voters and every edge touching them. Ranks are kept
/// verbatim, so the result may have rank gaps. Surviving voters keep their
/// relative order; names are carried over (numeric instances get their
/// original ids as names).
pub fn reduce(instance: &Instance) -> Reduced {
    let classes = classify(instance);
    let original: Vec<VoterId> = instance.voters().filter(|&v| classes.participates(v)).collect();
    let mut new_id = vec![usize::MAX; instance.n()];
    for (i, v) in original.iter().enumerate() {
        new_id[v.0] = i;
    }
    let edges: Vec<RankedEdge> = instance
        .edges()
        .filter(|e| new_id[e.source.0] != usize::MAX && new_id[e.target.0] != usize::MAX)
        .map(|e| RankedEdge {
            source: VoterId(new_id[e.source.0]),
            target: VoterId(new_id[e.target.0]),
            rank: e.rank,
        })
        .collect();
    let casting = original
        .iter()
        .enumerate()
        .filter(|(_, &v)| instance.is_casting(v))
        .map(|(i, _)| i);
    let reduced = Instance::from_ranked_edges(original.len(), casting, edges)
        .expect("restriction of a valid instance is valid");
    let names = original.iter().map(|&v| instance.name(v)).collect();
    let reduced = reduced.with_names(names).expect("names stay unique");
    Reduced { instance: reduced, original }
}

/// A finite list of ranks; the empty sequence has length 0 and maximum 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence(pub Vec<Rank>);

impl Sequence {
    pub fn empty() -> Self {
        Sequence(Vec::new())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ranks(&self) -> &[Rank] {
        &self.0
    }

    pub fn max_rank(&self) -> Rank {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&r| r as u64).sum()
    }

    /// Strict prefix test: `self` is shorter than `other` and agrees on every position.
    pub fn is_prefix_of(&self, other: &Sequence) -> bool {
        self.len() < other.len() && other.0.starts_with(&self.0)
    }

    /// `(x, self)`.
    pub fn prepend(&self, x: Rank) -> Sequence {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(x);
        v.extend_from_slice(&self.0);
        Sequence(v)
    }

    /// `(self, other)`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Sequence(v)
    }
}

impl From<Vec<Rank>> for Sequence {
    fn from(v: Vec<Rank>) -> Self {
        Sequence(v)
    }
}

impl From<&[Rank]> for Sequence {
    fn from(v: &[Rank]) -> Self {
        Sequence(v.to_vec())
    }
}

impl<const N: usize> From<[Rank; N]> for Sequence {
    fn from(v: [Rank; N]) -> Self {
        Sequence(v.to_vec())
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// A chain of edges; delegation paths are simple and end at a casting voter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub edges: Vec<RankedEdge>,
}

impl Path {
    pub fn new(edges: Vec<RankedEdge>) -> Self {
        Path { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> Option<VoterId> {
        self.edges.first().map(|e| e.source)
    }

    /// Final voter of the path (the guru, for delegation paths).
    pub fn target(&self) -> Option<VoterId> {
        self.edges.last().map(|e| e.target)
    }

    pub fn first_edge(&self) -> Option<RankedEdge> {
        self.edges.first().copied()
    }

    /// Voter sequence `v0, v1, ..., vk`.
    pub fn voters(&self) -> Vec<VoterId> {
        let mut vs = Vec::with_capacity(self.len() + 1);
        if let Some(first) = self.edges.first() {
            vs.push(first.source);
        }
        vs.extend(self.edges.iter().map(|e| e.target));
        vs
    }

    pub fn sequence(&self) -> Sequence {
        sequence_of(self)
    }

    /// Edges chain and no voter repeats.
    pub fn is_simple_chain(&self) -> bool {
        if self.edges.windows(2).any(|w| w[0].target != w[1].source) {
            return false;
        }
        let mut vs = self.voters();
        vs.sort_unstable();
        vs.windows(2).all(|w| w[0] != w[1])
    }

    pub fn display(&self, instance: &Instance) -> String {
        self.voters()
            .iter()
            .map(|&v| instance.name(v))
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

/// Ranks along the path.
pub fn sequence_of(path: &Path) -> Sequence {
    Sequence(path.edges.iter().map(|e| e.rank).collect())
}

pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// All simple paths from `v` to a casting voter. Exponential in general;
/// errors once more than `cap` paths have been found.
pub fn paths_from(instance: &Instance, v: VoterId, cap: usize) -> Result<Vec<Path>> {
    if instance.is_casting(v) {
        return Err(Error::PreconditionUnmet(format!("voter {v} is casting")));
    }
    let classes = classify(instance);
    let mut found = Vec::new();
    let mut on_path = vec![false; instance.n()];
    let mut stack: Vec<RankedEdge> = Vec::new();
    on_path[v.0] = true;
    walk(instance, &classes, v, &mut on_path, &mut stack, &mut found, cap)?;
    Ok(found)
}

fn walk(
    instance: &Instance,
    classes: &Classification,
    at: VoterId,
    on_path: &mut [bool],
    stack: &mut Vec<RankedEdge>,
    found: &mut Vec<Path>,
    cap: usize,
) -> Result<()> {
    for e in instance.out_edges(at) {
        let t = e.target;
        if on_path[t.0] || classes.is_isolated(t) {
            continue;
        }
        stack.push(*e);
        if instance.is_casting(t) {
            if found.len() >= cap {
                return Err(Error::BudgetExceeded { what: "path", cap });
            }
            found.push(Path::new(stack.clone()));
        } else {
            on_path[t.0] = true;
            walk(instance, classes, t, on_path, stack, found, cap)?;
            on_path[t.0] = false;
        }
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;

    fn id(inst: &Instance, name: &str) -> VoterId {
        inst.id_of(name).unwrap()
    }

    fn node_path(inst: &Instance, names: &[&str]) -> Path {
        let vs: Vec<VoterId> = names.iter().map(|n| id(inst, n)).collect();
        Path::new(vs.windows(2).map(|w| inst.edge(w[0], w[1]).unwrap()).collect())
    }

    #[test]
    fn fig1_classification() {
        let inst = fig1();
        let classes = classify(&inst);
        for n in ["a", "b", "c", "d", "e", "f"] {
            assert_eq!(classes.class(id(&inst, n)), VoterClass::Delegating, "{n}");
        }
        for n in ["g", "h"] {
            assert_eq!(classes.class(id(&inst, n)), VoterClass::Isolated, "{n}");
        }
        for n in ["i", "j", "k"] {
            assert_eq!(classes.class(id(&inst, n)), VoterClass::Casting, "{n}");
        }
    }

    #[test]
    fn no_edges_one_caster() {
        let inst = Instance::from_rankings(vec![vec![], vec![], vec![]], [1]).unwrap();
        let classes = classify(&inst);
        assert_eq!(classes.as_slice(), &[VoterClass::Isolated, VoterClass::Casting, VoterClass::Isolated]);
    }

    #[test]
    fn direct_edge_is_delegating() {
        let inst = Instance::from_rankings(vec![vec![1], vec![]], [1]).unwrap();
        assert_eq!(classify(&inst).class(VoterId(0)), VoterClass::Delegating);
    }

    #[test]
    fn validation_errors() {
        assert!(Instance::from_rankings(vec![vec![0]], []).is_err(), "self loop");
        assert!(Instance::from_rankings(vec![vec![1, 1], vec![]], [1]).is_err(), "duplicate target");
        assert!(Instance::from_rankings(vec![vec![], vec![0]], [1]).is_err(), "casting with edge");
        assert!(Instance::from_rankings(vec![vec![3]], []).is_err(), "out of range");
        let gappy = vec![RankedEdge { source: VoterId(0), target: VoterId(1), rank: 2 }];
        let inst = Instance::from_ranked_edges(2, [1], gappy).unwrap();
        assert!(inst.check_contiguous_ranks().is_err());
    }

    #[test]
    fn fig1_reduction_keeps_ranks() {
        let inst = fig1();
        let red = reduce(&inst);
        let r = &red.instance;
        assert_eq!(r.n(), 9);
        assert!(r.id_of("g").is_none() && r.id_of("h").is_none());
        let f = id(r, "f");
        let ranks: Vec<(String, Rank)> =
            r.out_edges(f).iter().map(|e| (r.name(e.target), e.rank)).collect();
        assert_eq!(ranks, vec![("e".to_string(), 1), ("k".to_string(), 4)]);
        assert_eq!(r.edge_count(), inst.edge_count() - 3);
        assert_eq!(classify(r).count(VoterClass::Isolated), 0);
    }

    #[test]
    fn reduction_of_reduced_is_identity() {
        let inst = Instance::from_rankings(vec![vec![1, 2], vec![], vec![]], [1, 2]).unwrap();
        let red = reduce(&inst);
        assert_eq!(red.instance.n(), 3);
        assert_eq!(red.instance.edges().copied().collect::<Vec<_>>(), inst.edges().copied().collect::<Vec<_>>());

        let all_isolated = Instance::from_rankings(vec![vec![1], vec![0], vec![]], [2]).unwrap();
        let red = reduce(&all_isolated);
        assert_eq!(red.instance.n(), 1);
        assert!(red.instance.is_casting(VoterId(0)));
    }

    #[test]
    fn fig1_paths_of_d_and_g() {
        let inst = fig1();
        let mut got: Vec<Vec<VoterId>> =
            paths_from(&inst, id(&inst, "d"), DEFAULT_PATH_CAP).unwrap().iter().map(Path::voters).collect();
        got.sort();
        let mut want: Vec<Vec<VoterId>> = [
            node_path(&inst, &["d", "j"]),
            node_path(&inst, &["d", "e", "b", "c", "i"]),
            node_path(&inst, &["d", "e", "f", "k"]),
        ]
        .iter()
        .map(Path::voters)
        .collect();
        want.sort();
        assert_eq!(got, want);
        assert!(paths_from(&inst, id(&inst, "g"), DEFAULT_PATH_CAP).unwrap().is_empty());
    }

    #[test]
    fn path_budget_errors() {
        let inst = fig1();
        let err = paths_from(&inst, id(&inst, "d"), 2).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { cap: 2, .. }));
    }

    #[test]
    fn fig1_sequences() {
        let inst = fig1();
        let long = node_path(&inst, &["a", "b", "c", "d", "e", "f", "k"]);
        assert_eq!(sequence_of(&long), Sequence::from([1, 1, 1, 1, 2, 4]));
        let short = node_path(&inst, &["a", "b", "c", "i"]);
        assert_eq!(sequence_of(&short), Sequence::from([1, 1, 3]));
        assert_eq!(sequence_of(&Path::default()), Sequence::empty());
        assert_eq!(Sequence::empty().max_rank(), 0);
    }
}

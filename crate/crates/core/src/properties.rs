//! Empirical checks of order-level properties: the two confluence
//! conditions, lexicographic consistency, rank-awareness and truncation.
//!
//! Every check first sweeps all short sequences over small ranks (so small
//! counterexamples are found deterministically) and then draws random
//! sequences: lengths geometric with mean 4, ranks uniform in `1..=6`.

use rand::Rng as _;
use serde::Serialize;

use crate::model::{Rank, Sequence};
use crate::order::{comparable, Comparison, SeqOrder};
use crate::rng::{self, Rng};

const MAX_RANK: Rank = 6;
const SWEEP_LEN: usize = 3;
const SWEEP_RANK: Rank = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub property: String,
    /// Sequences involved, in the order named by `property`.
    pub sequences: Vec<Sequence>,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let seqs: Vec<String> = self.sequences.iter().map(Sequence::to_string).collect();
        write!(f, "{}: {}", self.property, seqs.join(" vs "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub order: String,
    pub property: String,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Random sequence source.
pub struct SequenceSampler {
    rng: Rng,
}

impl SequenceSampler {
    pub fn new(seed: u64) -> Self {
        SequenceSampler { rng: rng::global(seed) }
    }

    pub fn length(&mut self) -> usize {
        let mut len = 1;
        while self.rng.gen_bool(0.75) {
            len += 1;
        }
        len
    }

    pub fn rank(&mut self) -> Rank {
        self.rng.gen_range(1..=MAX_RANK)
    }

    pub fn sequence(&mut self) -> Sequence {
        let len = self.length();
        self.sequence_of_len(len)
    }

    pub fn sequence_of_len(&mut self, len: usize) -> Sequence {
        Sequence((0..len).map(|_| self.rank()).collect())
    }

    /// Sequence with every rank strictly below `bound` (possibly empty).
    pub fn tail_below(&mut self, bound: Rank) -> Sequence {
        if bound <= 1 || self.rng.gen_bool(0.3) {
            return Sequence::empty();
        }
        let len = self.length();
        Sequence((0..len).map(|_| self.rng.gen_range(1..bound)).collect())
    }

    /// A comparable pair, resampling until neither is a prefix of the other.
    pub fn comparable_pair(&mut self) -> (Sequence, Sequence) {
        loop {
            let (s, t) = (self.sequence(), self.sequence());
            if comparable(&s, &t) {
                return (s, t);
            }
        }
    }

    pub fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }
}

/// All sequences of length `1..=max_len` over ranks `1..=max_rank`, shortest first.
pub fn small_sequences(max_len: usize, max_rank: Rank) -> Vec<Sequence> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::<Rank>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for r in 1..=max_rank {
                let mut t = s.clone();
                t.push(r);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned().map(Sequence));
        layer = next;
    }
    out
}

/// Property (i), prefix extension: `s ⊳ t ⇔ (x,s) ⊳ (x,t)` for comparable `s, t`.
fn prefix_extension(order: &SeqOrder, s: &Sequence, t: &Sequence, x: Rank) -> Option<Counterexample> {
    let (xs, xt) = (s.prepend(x), t.prepend(x));
    if order.cmp(s, t) != order.cmp(&xs, &xt) {
        return Some(Counterexample {
            property: "prefix-extension".into(),
            sequences: vec![s.clone(), t.clone(), xs, xt],
        });
    }
    None
}

/// Property (ii), suffix dominance: `s ⊳ (u,s)` whenever the two are comparable.
/// The counterexample lists the wrongly preferred extension first.
fn suffix_dominance(order: &SeqOrder, s: &Sequence, u: &Sequence) -> Option<Counterexample> {
    let us = u.concat(s);
    if comparable(s, &us) && order.cmp(s, &us) != Comparison::Better {
        return Some(Counterexample { property: "suffix-dominance".into(), sequences: vec![us, s.clone()] });
    }
    None
}

/// Checks both confluence conditions: an exhaustive sweep of short
/// sequences, then `samples` random draws.
pub fn check_confluence_properties(order: &SeqOrder, samples: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport {
        order: order.name(),
        property: "confluence".into(),
        checked: 0,
        counterexample: None,
    };
    let small = small_sequences(SWEEP_LEN, SWEEP_RANK);
    for s in &small {
        for u in &small {
            report.checked += 1;
            if let Some(c) = suffix_dominance(order, s, u) {
                report.counterexample = Some(c);
                return report;
            }
            if comparable(s, u) {
                for x in 1..=SWEEP_RANK {
                    report.checked += 1;
                    if let Some(c) = prefix_extension(order, s, u, x) {
                        report.counterexample = Some(c);
                        return report;
                    }
                }
            }
        }
    }
    let mut sampler = SequenceSampler::new(seed);
    for _ in 0..samples {
        let (s, t) = sampler.comparable_pair();
        let x = sampler.rank();
        let u = sampler.sequence();
        report.checked += 1;
        if let Some(c) = prefix_extension(order, &s, &t, x).or_else(|| suffix_dominance(order, &s, &u)) {
            report.counterexample = Some(c);
            return report;
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OrderAxiom {
    /// Equal-length sequences differing only in the last rank are ordered lexicographically.
    WeaklyLex,
    /// Equal-length sequences are ordered lexicographically.
    StronglyLex,
    /// A smaller maximum rank wins.
    RankAware,
    /// `(s,x,t) ⊳ (s',x,t')` with `x` above both tails implies `s ⊳ s'`.
    Truncation,
}

impl OrderAxiom {
    pub fn name(self) -> &'static str {
        match self {
            OrderAxiom::WeaklyLex => "weakly-lexicographic",
            OrderAxiom::StronglyLex => "strongly-lexicographic",
            OrderAxiom::RankAware => "rank-awareness",
            OrderAxiom::Truncation => "truncation",
        }
    }
}

fn lex_agrees(order: &SeqOrder, axiom: OrderAxiom, s: &Sequence, t: &Sequence) -> Option<Counterexample> {
    if comparable(s, t) && order.cmp(s, t) != SeqOrder::Lex.cmp(s, t) {
        return Some(Counterexample { property: axiom.name().into(), sequences: vec![s.clone(), t.clone()] });
    }
    None
}

/// Tests a single candidate witness against `axiom`. For
/// [`OrderAxiom::Truncation`] the witness is `[s, s', x-as-singleton, t, t']`.
pub fn witness_violates(order: &SeqOrder, axiom: OrderAxiom, witness: &[Sequence]) -> Option<Counterexample> {
    match axiom {
        OrderAxiom::WeaklyLex => {
            let [s, t] = witness else { return None };
            let n = s.len();
            (n == t.len() && n > 0 && s.0[..n - 1] == t.0[..n - 1])
                .then(|| lex_agrees(order, axiom, s, t))
                .flatten()
        }
        OrderAxiom::StronglyLex => {
            let [s, t] = witness else { return None };
            (s.len() == t.len()).then(|| lex_agrees(order, axiom, s, t)).flatten()
        }
        OrderAxiom::RankAware => {
            let [s, t] = witness else { return None };
            if comparable(s, t) && s.max_rank() < t.max_rank() && order.cmp(s, t) != Comparison::Better {
                return Some(Counterexample { property: axiom.name().into(), sequences: vec![s.clone(), t.clone()] });
            }
            None
        }
        OrderAxiom::Truncation => {
            let [s, t, x, ts, tt] = witness else { return None };
            let x = *x.0.first()?;
            if s.is_empty() || t.is_empty() || s.0[0] == t.0[0] || ts.max_rank() >= x || tt.max_rank() >= x {
                return None;
            }
            let long_s = s.concat(&Sequence(vec![x])).concat(ts);
            let long_t = t.concat(&Sequence(vec![x])).concat(tt);
            if order.better(&long_s, &long_t) && !order.better(s, t) {
                return Some(Counterexample {
                    property: axiom.name().into(),
                    sequences: vec![long_s, long_t, s.clone(), t.clone()],
                });
            }
            None
        }
    }
}

/// Sweeps short sequences and then `samples` random candidates for `axiom`.
pub fn check_order_axiom(order: &SeqOrder, axiom: OrderAxiom, samples: usize, seed: u64) -> PropertyReport {
    let mut report = PropertyReport {
        order: order.name(),
        property: axiom.name().into(),
        checked: 0,
        counterexample: None,
    };
    let small = small_sequences(SWEEP_LEN, SWEEP_RANK);
    let mut tails = vec![Sequence::empty()];
    tails.extend(small_sequences(1, SWEEP_RANK));
    for s in &small {
        for t in &small {
            match axiom {
                OrderAxiom::Truncation => {
                    for x in 1..=SWEEP_RANK + 1 {
                        for ts in tails.iter().filter(|q| q.max_rank() < x) {
                            for tt in tails.iter().filter(|q| q.max_rank() < x) {
                                report.checked += 1;
                                let w = [s.clone(), t.clone(), Sequence(vec![x]), ts.clone(), tt.clone()];
                                if let Some(c) = witness_violates(order, axiom, &w) {
                                    report.counterexample = Some(c);
                                    return report;
                                }
                            }
                        }
                    }
                }
                _ => {
                    report.checked += 1;
                    if let Some(c) = witness_violates(order, axiom, &[s.clone(), t.clone()]) {
                        report.counterexample = Some(c);
                        return report;
                    }
                }
            }
        }
    }
    let mut sampler = SequenceSampler::new(seed);
    for _ in 0..samples {
        let witness: Vec<Sequence> = match axiom {
            OrderAxiom::WeaklyLex => {
                let s = sampler.sequence();
                let mut t = s.clone();
                let last = t.0.len() - 1;
                while t.0[last] == s.0[last] {
                    t.0[last] = sampler.rank();
                }
                vec![s, t]
            }
            OrderAxiom::StronglyLex => {
                let len = sampler.length().max(2);
                let s = sampler.sequence_of_len(len);
                let t = sampler.sequence_of_len(len);
                vec![s, t]
            }
            OrderAxiom::RankAware => {
                let (s, t) = sampler.comparable_pair();
                if s.max_rank() <= t.max_rank() {
                    vec![s, t]
                } else {
                    vec![t, s]
                }
            }
            OrderAxiom::Truncation => {
                let (s, t) = sampler.comparable_pair();
                let x = sampler.rank();
                let ts = sampler.tail_below(x);
                let tt = sampler.tail_below(x);
                vec![s, t, Sequence(vec![x]), ts, tt]
            }
        };
        report.checked += 1;
        if let Some(c) = witness_violates(order, axiom, &witness) {
            report.counterexample = Some(c);
            return report;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_breaks_suffix_dominance_with_the_classic_pair() {
        let report = check_confluence_properties(&SeqOrder::Lex, 100, 1);
        let c = report.counterexample.expect("lex is not confluent");
        assert_eq!(c.property, "suffix-dominance");
        assert_eq!(c.sequences, vec![Sequence::from([1, 2]), Sequence::from([2])]);
    }

    #[test]
    fn confluent_orders_pass() {
        for order in [
            SeqOrder::Bfd,
            SeqOrder::MinSum,
            SeqOrder::Leximax,
            SeqOrder::Diff,
            SeqOrder::WeightedSum("1=1,2=4,3=9".parse().unwrap()),
        ] {
            let report = check_confluence_properties(&order, 10_000, 42);
            assert!(report.passed(), "{order}: {:?}", report.counterexample);
        }
    }

    #[test]
    fn rank_awareness() {
        for order in [SeqOrder::Leximax, SeqOrder::Diff] {
            assert!(check_order_axiom(&order, OrderAxiom::RankAware, 10_000, 3).passed(), "{order}");
        }
        for order in [SeqOrder::Bfd, SeqOrder::MinSum, SeqOrder::Lex] {
            assert!(!check_order_axiom(&order, OrderAxiom::RankAware, 10_000, 3).passed(), "{order}");
        }
        let w = [Sequence::from([2, 2]), Sequence::from([3])];
        assert!(witness_violates(&SeqOrder::Bfd, OrderAxiom::RankAware, &w).is_some());
        assert!(witness_violates(&SeqOrder::Leximax, OrderAxiom::RankAware, &w).is_none());
    }

    #[test]
    fn strong_lexicography() {
        let report = check_order_axiom(&SeqOrder::Leximax, OrderAxiom::StronglyLex, 10_000, 5);
        assert!(!report.passed());
        let w = [Sequence::from([1, 1, 5]), Sequence::from([2, 2, 2])];
        assert!(witness_violates(&SeqOrder::Leximax, OrderAxiom::StronglyLex, &w).is_some());
        for order in [SeqOrder::Bfd, SeqOrder::Lex] {
            assert!(check_order_axiom(&order, OrderAxiom::StronglyLex, 10_000, 5).passed(), "{order}");
        }
    }

    #[test]
    fn weak_lexicography_holds_for_shipped_orders() {
        for order in [SeqOrder::Lex, SeqOrder::Bfd, SeqOrder::MinSum, SeqOrder::Leximax, SeqOrder::Diff] {
            assert!(check_order_axiom(&order, OrderAxiom::WeaklyLex, 10_000, 9).passed(), "{order}");
        }
    }

    #[test]
    fn truncation_holds_for_diffusion_only_among_rank_aware_orders() {
        assert!(check_order_axiom(&SeqOrder::Diff, OrderAxiom::Truncation, 10_000, 11).passed());
        assert!(!check_order_axiom(&SeqOrder::Leximax, OrderAxiom::Truncation, 10_000, 11).passed());
    }

    #[test]
    fn sweep_size() {
        assert_eq!(small_sequences(3, 3).len(), 3 + 9 + 27);
        assert_eq!(small_sequences(2, 2)[..3], [Sequence::from([1]), Sequence::from([2]), Sequence::from([1, 1])]);
    }
}

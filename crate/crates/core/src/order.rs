//! Orders over rank sequences.
//!
//! Every order is expressed as "which of two sequences is better". For the
//! total orders the better sequence is the one a sequence rule selects; the
//! diffusion order is only defined on comparable pairs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{Rank, Sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Better,
    Worse,
    /// Only returned for identical inputs.
    Equal,
    Incomparable,
}

impl Comparison {
    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Better => Comparison::Worse,
            Comparison::Worse => Comparison::Better,
            other => other,
        }
    }

    /// `Less` means "better".
    fn from_ordering(o: Ordering) -> Comparison {
        match o {
            Ordering::Less => Comparison::Better,
            Ordering::Greater => Comparison::Worse,
            Ordering::Equal => Comparison::Equal,
        }
    }
}

/// Two distinct non-empty sequences are comparable iff neither is a prefix of the other.
pub fn comparable(s: &Sequence, t: &Sequence) -> bool {
    !s.is_empty() && !t.is_empty() && s != t && !s.is_prefix_of(t) && !t.is_prefix_of(s)
}

/// Ranks sorted in non-increasing order.
pub fn sort_desc(s: &Sequence) -> Sequence {
    let mut v = s.0.clone();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Sequence(v)
}

/// Strictly increasing positive weights on ranks: an explicit table for
/// ranks `1..=k`, continued affinely with the slope of the last two entries.
///
/// Weights are stored scaled to a common denominator so sums are exact
/// integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankWeights {
    table: Vec<Ratio<i64>>,
    scaled: Vec<u128>,
    slope: u128,
}

impl RankWeights {
    pub fn new(table: Vec<Ratio<i64>>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidConfig("weight table is empty".into()));
        }
        if table[0] <= Ratio::from_integer(0) {
            return Err(Error::InvalidConfig("rank weights must be positive".into()));
        }
        if table.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("rank weights must be strictly increasing".into()));
        }
        let denom = table.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
        let scaled: Vec<u128> = table
            .iter()
            .map(|r| (r.numer() * (denom / r.denom())) as u128)
            .collect();
        let slope = match scaled.len() {
            1 => scaled[0],
            k => scaled[k - 1] - scaled[k - 2],
        };
        Ok(RankWeights { table, scaled, slope })
    }

    /// `w(r) = r`.
    pub fn identity() -> Self {
        RankWeights::new(vec![Ratio::from_integer(1)]).expect("valid")
    }

    fn scaled_weight(&self, r: Rank) -> u128 {
        let k = self.scaled.len();
        let i = r as usize;
        if i <= k {
            self.scaled[i - 1]
        } else {
            self.scaled[k - 1] + self.slope * (i - k) as u128
        }
    }

    /// Weight of rank `r` as an exact rational.
    pub fn weight(&self, r: Rank) -> Ratio<i64> {
        let k = self.table.len();
        let i = r as usize;
        if i <= k {
            self.table[i - 1]
        } else {
            let last = self.table[k - 1];
            let slope = if k == 1 { last } else { last - self.table[k - 2] };
            last + slope * Ratio::from_integer((i - k) as i64)
        }
    }

    fn scaled_sum(&self, s: &Sequence) -> u128 {
        s.0.iter().map(|&r| self.scaled_weight(r)).sum()
    }
}

impl fmt::Display for RankWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}={}", i + 1, w)?;
        }
        Ok(())
    }
}

impl FromStr for RankWeights {
    type Err = Error;

    /// `1=1,2=3,3=7`; keys must be exactly `1..=k` and values may be `p/q`.
    fn from_str(text: &str) -> Result<Self> {
        let mut table = Vec::new();
        for (i, item) in text.split(',').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("weight entry `{item}` is not `rank=value`")))?;
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("invalid rank `{k}`")))?;
            if k != i + 1 {
                return Err(Error::InvalidConfig(format!("weight table must list ranks 1..k in order, got {k}")));
            }
            let v: Ratio<i64> = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("invalid weight `{v}`")))?;
            table.push(v);
        }
        RankWeights::new(table)
    }
}

/// A relation over rank sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeqOrder {
    /// Lexicographic; a proper prefix beats its extensions.
    Lex,
    /// Shorter first, then lexicographic.
    Bfd,
    /// Smaller rank sum first, then lexicographic.
    MinSum,
    /// Smaller weighted rank sum first, then lexicographic.
    WeightedSum(RankWeights),
    /// Lexicographic on the non-increasingly sorted ranks, then on the sequences.
    Leximax,
    /// The diffusion order; defined on comparable sequences only.
    Diff,
}

impl SeqOrder {
    pub fn name(&self) -> String {
        match self {
            SeqOrder::Lex => "lex".into(),
            SeqOrder::Bfd => "bfd".into(),
            SeqOrder::MinSum => "minsum".into(),
            SeqOrder::WeightedSum(w) => format!("wsum:{w}"),
            SeqOrder::Leximax => "leximax".into(),
            SeqOrder::Diff => "diff".into(),
        }
    }

    /// Compares `s` against `t`. `Incomparable` is returned only by
    /// [`SeqOrder::Diff`] on pairs where one sequence is a prefix of the other
    /// (or one is empty).
    pub fn cmp(&self, s: &Sequence, t: &Sequence) -> Comparison {
        if s == t {
            return Comparison::Equal;
        }
        match self {
            SeqOrder::Diff if !comparable(s, t) => Comparison::Incomparable,
            _ => Comparison::from_ordering(self.cmp_total(s, t)),
        }
    }

    /// `true` when `s` is strictly better than `t`.
    pub fn better(&self, s: &Sequence, t: &Sequence) -> bool {
        self.cmp(s, t) == Comparison::Better
    }

    /// Total extension used by the settle engine, `Less` meaning better. It
    /// agrees with [`SeqOrder::cmp`] wherever that is defined; for the
    /// diffusion order a proper prefix beats its extensions.
    pub fn cmp_total(&self, s: &Sequence, t: &Sequence) -> Ordering {
        let (a, b) = (s.ranks(), t.ranks());
        match self {
            SeqOrder::Lex => a.cmp(b),
            SeqOrder::Bfd => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            SeqOrder::MinSum => s.sum().cmp(&t.sum()).then_with(|| a.cmp(b)),
            SeqOrder::WeightedSum(w) => w.scaled_sum(s).cmp(&w.scaled_sum(t)).then_with(|| a.cmp(b)),
            SeqOrder::Leximax => sort_desc(s).0.cmp(&sort_desc(t).0).then_with(|| a.cmp(b)),
            SeqOrder::Diff => {
                let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                diff_after_prefix(&a[common..], &b[common..])
            }
        }
    }

    /// Orders that are total on all of the sequence space.
    pub fn is_total(&self) -> bool {
        !matches!(self, SeqOrder::Diff)
    }
}

impl fmt::Display for SeqOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Diffusion comparison of two sequences without a joint prefix.
fn diff_after_prefix(a: &[Rank], b: &[Rank]) -> Ordering {
    let max_a = a.iter().copied().max().unwrap_or(0);
    let max_b = b.iter().copied().max().unwrap_or(0);
    if max_a != max_b {
        return max_a.cmp(&max_b);
    }
    if a.is_empty() && b.is_empty() {
        return Ordering::Equal;
    }
    let count_a = a.iter().filter(|&&r| r == max_a).count();
    let count_b = b.iter().filter(|&&r| r == max_b).count();
    if count_a != count_b {
        return count_a.cmp(&count_b);
    }
    let head_a = &a[..a.iter().position(|&r| r == max_a).unwrap()];
    let head_b = &b[..b.iter().position(|&r| r == max_b).unwrap()];
    match (head_a.is_empty(), head_b.is_empty()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => diff_after_prefix(head_a, head_b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[Rank]) -> Sequence {
        Sequence::from(v)
    }

    #[test]
    fn comparability() {
        assert!(!comparable(&seq(&[1]), &seq(&[1, 2])));
        assert!(comparable(&seq(&[1, 2]), &seq(&[2])));
        assert!(comparable(&seq(&[1, 1, 3]), &seq(&[1, 1, 1, 2])));
        assert!(!comparable(&seq(&[1, 2]), &seq(&[1, 2])));
        assert!(!comparable(&seq(&[]), &seq(&[1])));
    }

    #[test]
    fn named_examples() {
        use Comparison::*;
        assert_eq!(SeqOrder::Lex.cmp(&seq(&[1, 1, 1, 1, 2, 4]), &seq(&[1, 1, 3])), Better);
        assert_eq!(SeqOrder::Bfd.cmp(&seq(&[1, 1, 3]), &seq(&[1, 1, 1, 2])), Better);
        assert_eq!(SeqOrder::MinSum.cmp(&seq(&[1, 1, 1, 2]), &seq(&[1, 1, 3])), Better);
        assert_eq!(SeqOrder::Diff.cmp(&seq(&[1, 1, 2]), &seq(&[1, 100])), Better);
        assert_eq!(SeqOrder::Diff.cmp(&seq(&[2]), &seq(&[1, 100])), Better);
        assert_eq!(SeqOrder::Diff.cmp(&seq(&[1, 5, 4, 4, 4, 4]), &seq(&[2, 5])), Better);
        assert_eq!(SeqOrder::Diff.cmp(&seq(&[1]), &seq(&[1, 2])), Incomparable);
        // sigma gives (5,2) against (5,4,4,4,4,1); the former is lexicographically smaller
        assert_eq!(sort_desc(&seq(&[2, 5])), seq(&[5, 2]));
        assert_eq!(sort_desc(&seq(&[1, 5, 4, 4, 4, 4])), seq(&[5, 4, 4, 4, 4, 1]));
        assert_eq!(SeqOrder::Leximax.cmp(&seq(&[2, 5]), &seq(&[1, 5, 4, 4, 4, 4])), Better);
    }

    #[test]
    fn lex_prefers_prefix() {
        assert_eq!(SeqOrder::Lex.cmp(&seq(&[1]), &seq(&[1, 2])), Comparison::Better);
        assert_eq!(SeqOrder::Lex.cmp(&seq(&[1, 2]), &seq(&[2])), Comparison::Better);
    }

    #[test]
    fn sorting() {
        assert_eq!(sort_desc(&seq(&[1, 3, 4, 3])), seq(&[4, 3, 3, 1]));
        assert_eq!(sort_desc(&seq(&[])), seq(&[]));
        assert_eq!(sort_desc(&seq(&[2, 2, 2])), seq(&[2, 2, 2]));
    }

    #[test]
    fn equal_inputs() {
        for order in [SeqOrder::Lex, SeqOrder::Bfd, SeqOrder::Diff, SeqOrder::Leximax] {
            assert_eq!(order.cmp(&seq(&[1, 2]), &seq(&[1, 2])), Comparison::Equal);
        }
    }

    #[test]
    fn weight_tables() {
        let w: RankWeights = "1=1,2=3,3=7".parse().unwrap();
        assert_eq!(w.weight(2), Ratio::from_integer(3));
        assert_eq!(w.weight(5), Ratio::from_integer(15));
        let half: RankWeights = "1=1/2,2=2/3".parse().unwrap();
        assert_eq!(half.weight(3), Ratio::new(5, 6));
        assert_eq!(half.scaled_weight(1) * 5, half.scaled_weight(3) * 3);
        assert!("1=2,2=1".parse::<RankWeights>().is_err());
        assert!("1=0,2=1".parse::<RankWeights>().is_err());
        assert!("2=1".parse::<RankWeights>().is_err());
        assert!("".parse::<RankWeights>().is_err());
        assert_eq!(RankWeights::identity().weight(9), Ratio::from_integer(9));
        // superlinear weights separate (1,1,1,2) from (1,1,3) the other way round
        let convex = SeqOrder::WeightedSum("1=1,2=2,3=10".parse().unwrap());
        assert_eq!(convex.cmp(&seq(&[1, 1, 1, 2]), &seq(&[1, 1, 3])), Comparison::Better);
        let flat = SeqOrder::WeightedSum("1=10,2=11,3=12".parse().unwrap());
        assert_eq!(flat.cmp(&seq(&[1, 1, 3]), &seq(&[1, 1, 1, 2])), Comparison::Better);
    }
}

//! Evaluation quantities of a resolution and their averages.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::axioms::weights;
use crate::branching::{unpopularity_margin, Branching};
use crate::error::{Error, Result};
use crate::model::{classify, Instance, VoterClass};
use crate::num::fmt_sig6;
use crate::resolve::Resolution;
use crate::{BigRational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricsRecord {
    pub max_rank: u32,
    pub max_len: usize,
    /// Mean path length over delegating voters.
    pub avg_len: Rational,
    pub max_sum: u64,
    pub max_weight: Rational,
    /// Mean rank of the first edges; confluent resolutions only.
    pub avg_rank: Option<Rational>,
    /// Unpopularity margin of the first-edge branching over `|C| + |D|`;
    /// confluent resolutions only.
    pub unpop: Option<Rational>,
}

/// Mean first-edge rank of a confluent resolution.
pub fn avg_rank(res: &Resolution) -> Result<Rational> {
    if !res.is_confluent() {
        return Err(Error::NonConfluentMetrics);
    }
    let ranks: Vec<u32> = res.first_edges().iter().flatten().map(|e| e.rank).collect();
    if ranks.is_empty() {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(ranks.iter().map(|&r| i64::from(r)).sum(), ranks.len() as i64))
}

/// Normalized unpopularity of a confluent resolution.
pub fn unpop(instance: &Instance, res: &Resolution) -> Result<Rational> {
    let b = Branching::from_resolution(instance, res)?;
    let (mu, _) = unpopularity_margin(instance, &b)?;
    let classes = classify(instance);
    let participants = classes.count(VoterClass::Casting) + classes.count(VoterClass::Delegating);
    if participants == 0 {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(mu, participants as i64))
}

/// All metrics; `avg_rank` and `unpop` are filled in when `confluent_rule` is
/// set (the output of a confluent rule is always confluent).
pub fn compute_metrics(instance: &Instance, res: &Resolution, confluent_rule: bool) -> Result<MetricsRecord> {
    let mut max_rank = 0;
    let mut max_len = 0;
    let mut max_sum = 0;
    let mut total_len = 0usize;
    let mut count = 0usize;
    for (_, p) in res.paths() {
        let seq = p.sequence();
        max_rank = max_rank.max(seq.max_rank());
        max_len = max_len.max(seq.len());
        max_sum = max_sum.max(seq.sum());
        total_len += seq.len();
        count += 1;
    }
    let avg_len = if count == 0 { Rational::zero() } else { Rational::new(total_len as i64, count as i64) };
    let max_weight = weights(instance, res).max();
    let (avg_rank, unpop) = if confluent_rule {
        (Some(avg_rank(res)?), Some(unpop(instance, res)?))
    } else {
        (None, None)
    };
    Ok(MetricsRecord { max_rank, max_len, avg_len, max_sum, max_weight, avg_rank, unpop })
}

/// Field-wise means. Optional fields average over the records that have them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeanRecord {
    pub count: usize,
    pub max_rank: BigRational,
    pub max_len: BigRational,
    pub avg_len: BigRational,
    pub max_sum: BigRational,
    pub max_weight: BigRational,
    pub avg_rank: Option<BigRational>,
    pub unpop: Option<BigRational>,
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn mean(values: impl Iterator<Item = BigRational>) -> Option<BigRational> {
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    for v in values {
        sum += v;
        k += 1;
    }
    (k > 0).then(|| sum / int(k))
}

pub fn aggregate(records: &[MetricsRecord]) -> Result<MeanRecord> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let all = |f: fn(&MetricsRecord) -> BigRational| mean(records.iter().map(f)).expect("non-empty");
    Ok(MeanRecord {
        count: records.len(),
        max_rank: all(|r| int(u64::from(r.max_rank))),
        max_len: all(|r| int(r.max_len as u64)),
        avg_len: all(|r| big(&r.avg_len)),
        max_sum: all(|r| int(r.max_sum)),
        max_weight: all(|r| big(&r.max_weight)),
        avg_rank: mean(records.iter().filter_map(|r| r.avg_rank.as_ref().map(big))),
        unpop: mean(records.iter().filter_map(|r| r.unpop.as_ref().map(big))),
    })
}

pub const CSV_HEADER: &str = "instance,rule,max_rank,max_len,avg_len,max_sum,max_weight,avg_rank,unpop";

fn dec<T: ToPrimitive>(x: &T) -> String {
    fmt_sig6(crate::num::to_f64(x))
}

fn opt<T: ToPrimitive>(x: &Option<T>) -> String {
    x.as_ref().map(dec).unwrap_or_default()
}

pub fn csv_row(instance: &str, rule: &str, r: &MetricsRecord) -> String {
    format!(
        "{instance},{rule},{},{},{},{},{},{},{}",
        r.max_rank,
        r.max_len,
        dec(&r.avg_len),
        r.max_sum,
        dec(&r.max_weight),
        opt(&r.avg_rank),
        opt(&r.unpop)
    )
}

pub fn csv_mean_row(instance: &str, rule: &str, r: &MeanRecord) -> String {
    format!(
        "{instance},{rule},{},{},{},{},{},{},{}",
        dec(&r.max_rank),
        dec(&r.max_len),
        dec(&r.avg_len),
        dec(&r.max_sum),
        dec(&r.max_weight),
        opt(&r.avg_rank),
        opt(&r.unpop)
    )
}

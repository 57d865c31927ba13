//! Relative voting weights and randomized checks of the axioms:
//! guru-participation (also with binary majority votes), copy-robustness and
//! independence of isolated casting voters.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::format::write_v1;
use crate::model::{classify, Instance, VoterClass, VoterId};
use crate::resolve::Resolution;
use crate::rng;
use crate::rule::Rule;
use crate::sampling::{pick, sample_instance, SamplerConfig};
use crate::Rational;

/// Relative weight of every casting voter: one plus the number of
/// delegators ending there, over the number of non-isolated voters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightVector {
    pub denominator: usize,
    counts: Vec<Option<usize>>,
}

impl WeightVector {
    /// Zero for voters that are not casting.
    pub fn weight(&self, c: VoterId) -> Rational {
        match self.counts.get(c.0).copied().flatten() {
            Some(k) if self.denominator > 0 => Ratio::new(k as i64, self.denominator as i64),
            _ => Ratio::from_integer(0),
        }
    }

    /// Numerator of the weight (delegators plus one).
    pub fn count(&self, c: VoterId) -> usize {
        self.counts.get(c.0).copied().flatten().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VoterId, Rational)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, k)| k.is_some())
            .map(|(i, _)| (VoterId(i), self.weight(VoterId(i))))
    }

    pub fn max(&self) -> Rational {
        self.iter().map(|(_, w)| w).max().unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn total(&self) -> Rational {
        self.iter().map(|(_, w)| w).sum()
    }
}

pub fn weights(instance: &Instance, res: &Resolution) -> WeightVector {
    let classes = classify(instance);
    let mut counts: Vec<Option<usize>> = vec![None; instance.n()];
    for c in instance.casting_voters() {
        counts[c.0] = Some(1);
    }
    for (_, p) in res.paths() {
        if let Some(c) = p.target() {
            if let Some(k) = counts[c.0].as_mut() {
                *k += 1;
            }
        }
    }
    let denominator = classes.count(VoterClass::Casting) + classes.count(VoterClass::Delegating);
    WeightVector { denominator, counts }
}

/// A failed axiom check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// The voter whose weight, outcome or path breaks the axiom.
    pub voter: VoterId,
    pub detail: String,
}

fn delegating(instance: &Instance, v: VoterId) -> Result<()> {
    if classify(instance).is_delegating(v) {
        Ok(())
    } else {
        Err(Error::PreconditionUnmet(format!("voter {} is not delegating", instance.name(v))))
    }
}

/// Withdrawing `v` (deleting its out-edges) must not lower the weight of any
/// casting voter other than `v`'s guru.
pub fn check_guru_participation(rule: &Rule, instance: &Instance, v: VoterId) -> Result<Option<Witness>> {
    delegating(instance, v)?;
    let before = rule.resolve(instance)?;
    let guru = before.guru(v).expect("delegating voter has a guru");
    let without = instance.without_out_edges(v);
    let after = rule.resolve(&without)?;
    let (w, w2) = (weights(instance, &before), weights(&without, &after));
    for u in instance.casting_voters().filter(|&u| u != guru) {
        if w.weight(u) > w2.weight(u) {
            return Ok(Some(Witness {
                voter: u,
                detail: format!(
                    "{} loses weight when {} withdraws: {} before, {} after",
                    instance.name(u),
                    instance.name(v),
                    w.weight(u),
                    w2.weight(u)
                ),
            }));
        }
    }
    Ok(None)
}

/// Outcome of a binary weighted majority vote: 0, 1, or 1/2 on a tie.
pub fn majority_outcome(w: &WeightVector, ballots: &[bool]) -> Rational {
    let yes: Rational = w.iter().filter(|(c, _)| ballots[c.0]).map(|(_, x)| x).sum();
    let half = Ratio::new(1, 2);
    match yes.cmp(&half) {
        std::cmp::Ordering::Greater => Ratio::from_integer(1),
        std::cmp::Ordering::Less => Ratio::from_integer(0),
        std::cmp::Ordering::Equal => half,
    }
}

/// With every casting voter voting yes/no (`ballots[c]`), `v`'s guru must
/// weakly prefer the outcome with `v` delegating over the outcome after `v`
/// withdraws. Outcomes closer to a voter's ballot are preferred.
pub fn check_guru_participation_star(
    rule: &Rule,
    instance: &Instance,
    v: VoterId,
    ballots: &[bool],
) -> Result<Option<Witness>> {
    delegating(instance, v)?;
    if ballots.len() != instance.n() {
        return Err(Error::MismatchedInstance("one ballot per voter is required".into()));
    }
    let before = rule.resolve(instance)?;
    let guru = before.guru(v).expect("delegating voter has a guru");
    let without = instance.without_out_edges(v);
    let after = rule.resolve(&without)?;
    let o = majority_outcome(&weights(instance, &before), ballots);
    let o2 = majority_outcome(&weights(&without, &after), ballots);
    let ideal = Ratio::from_integer(i64::from(ballots[guru.0]));
    let dist = |x: Rational| if x > ideal { x - ideal } else { ideal - x };
    if o != o2 && dist(o2) < dist(o) {
        return Ok(Some(Witness {
            voter: guru,
            detail: format!(
                "guru {} votes {} and prefers outcome {} after {} withdraws over {}",
                instance.name(guru),
                u8::from(ballots[guru.0]),
                o2,
                instance.name(v),
                o
            ),
        }));
    }
    Ok(None)
}

/// Turns a weight loss of casting voter `u` into a majority-vote instance:
/// appends dummy casting voters so that `u`'s side has exactly half the
/// weight, making the original vote a tie. Returns the padded instance and
/// ballots where `u`'s side votes no and everyone else yes.
pub fn lift_guru_violation(rule: &Rule, instance: &Instance, u: VoterId) -> Result<(Instance, Vec<bool>)> {
    let res = rule.resolve(instance)?;
    let w = weights(instance, &res);
    let (z, total) = (w.count(u), w.denominator);
    let (dummies, dummies_with_u) = if 2 * z <= total { (total - 2 * z, true) } else { (2 * z - total, false) };
    let padded = instance.with_isolated_casting(dummies);
    let mut ballots = vec![true; padded.n()];
    ballots[u.0] = false;
    if dummies_with_u {
        for b in &mut ballots[instance.n()..] {
            *b = false;
        }
    }
    Ok((padded, ballots))
}

/// If `v` delegates directly to casting voter `c`, promoting `v` to casting
/// must keep the joint weight of `v` and `c` unchanged.
pub fn check_copy_robustness(rule: &Rule, instance: &Instance, v: VoterId) -> Result<Option<Witness>> {
    delegating(instance, v)?;
    let before = rule.resolve(instance)?;
    let path = before.path(v).expect("delegating voter has a path");
    if path.len() != 1 {
        return Err(Error::PreconditionUnmet(format!(
            "path of {} has length {}, not 1",
            instance.name(v),
            path.len()
        )));
    }
    let c = path.target().unwrap();
    let promoted = instance.promoted_to_casting(v);
    let after = rule.resolve(&promoted)?;
    let (w, w2) = (weights(instance, &before), weights(&promoted, &after));
    let joint = w2.weight(c) + w2.weight(v);
    if w.weight(c) != joint {
        return Ok(Some(Witness {
            voter: v,
            detail: format!(
                "weight of {} is {} before; after {} starts casting, {} + {} = {}",
                instance.name(c),
                w.weight(c),
                instance.name(v),
                w2.weight(c),
                w2.weight(v),
                joint
            ),
        }));
    }
    Ok(None)
}

/// Adding a casting voter nobody delegates to must leave every path unchanged.
pub fn check_iic(rule: &Rule, instance: &Instance) -> Result<Option<Witness>> {
    let before = rule.resolve(instance)?;
    let padded = instance.with_isolated_casting(1);
    let after = rule.resolve(&padded)?;
    for (v, p) in before.paths() {
        if after.path(v) != Some(p) {
            return Ok(Some(Witness {
                voter: v,
                detail: format!(
                    "path of {} changes from {} to {}",
                    instance.name(v),
                    p.display(instance),
                    after.path(v).map_or("none".to_string(), |q| q.display(&padded))
                ),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    GuruParticipation,
    GuruParticipationStar,
    CopyRobustness,
    Iic,
}

impl Axiom {
    pub fn all() -> [Axiom; 4] {
        [Axiom::GuruParticipation, Axiom::GuruParticipationStar, Axiom::CopyRobustness, Axiom::Iic]
    }

    pub fn name(self) -> &'static str {
        match self {
            Axiom::GuruParticipation => "guru",
            Axiom::GuruParticipationStar => "guru-star",
            Axiom::CopyRobustness => "copy",
            Axiom::Iic => "iic",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "guru" | "guru-participation" => Ok(Axiom::GuruParticipation),
            "guru-star" | "guru*" | "guru-participation-star" => Ok(Axiom::GuruParticipationStar),
            "copy" | "copy-robustness" => Ok(Axiom::CopyRobustness),
            "iic" => Ok(Axiom::Iic),
            _ => Err(Error::InvalidConfig(format!("unknown axiom `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// The instance in text format.
    pub instance: String,
    /// Name of the voter the check was run for.
    pub voter: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub rule: String,
    pub trials: usize,
    pub seed: u64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A stored test case: instance, the voter to check and, for majority
/// votes, the ballots.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub instance: Instance,
    pub voter: Option<VoterId>,
    pub ballots: Option<Vec<bool>>,
}

/// Stored counterexamples relevant to `axiom`.
pub fn archived_fixtures(axiom: Axiom) -> Result<Vec<Fixture>> {
    let fixture = |name, instance: Instance, voter: &str| {
        let voter = instance.id_of(voter);
        Fixture { name, instance, voter, ballots: None }
    };
    Ok(match axiom {
        Axiom::GuruParticipation => vec![fixture("dfd_guru", fixtures::dfd_guru(), fixtures::DFD_GURU_VOTER)],
        Axiom::GuruParticipationStar => {
            let inst = fixtures::dfd_guru();
            let v = inst.id_of(fixtures::DFD_GURU_VOTER).expect("fixture voter exists");
            let witness = check_guru_participation(&Rule::Dfd, &inst, v)?
                .ok_or_else(|| Error::PreconditionUnmet("dfd_guru fixture no longer violates guru-participation".into()))?;
            let (padded, ballots) = lift_guru_violation(&Rule::Dfd, &inst, witness.voter)?;
            vec![Fixture { name: "dfd_guru_majority", instance: padded, voter: Some(v), ballots: Some(ballots) }]
        }
        Axiom::CopyRobustness => vec![fixture("copy_ring", fixtures::copy_ring(), "u")],
        Axiom::Iic => vec![fixture("fig1", fixtures::fig1(), "a")],
    })
}

/// Runs one check; `Ok(None)` when the axiom holds, `Err(PreconditionUnmet)`
/// when the case is not eligible.
pub fn check_case(
    rule: &Rule,
    axiom: Axiom,
    instance: &Instance,
    v: VoterId,
    ballots: Option<&[bool]>,
) -> Result<Option<Witness>> {
    match axiom {
        Axiom::GuruParticipation => check_guru_participation(rule, instance, v),
        Axiom::GuruParticipationStar => {
            let ballots = ballots.ok_or_else(|| Error::PreconditionUnmet("ballots are required".into()))?;
            check_guru_participation_star(rule, instance, v, ballots)
        }
        Axiom::CopyRobustness => check_copy_robustness(rule, instance, v),
        Axiom::Iic => check_iic(rule, instance),
    }
}

const MAX_ATTEMPTS: usize = 1000;

/// One randomized trial: samples instances until an eligible case appears.
fn trial(rule: &Rule, axiom: Axiom, seed: u64, i: u64) -> Result<Option<Violation>> {
    let mut rng = rng::global(rng::child_seed(seed, i));
    for _ in 0..MAX_ATTEMPTS {
        let inst = sample_instance(SamplerConfig::AXIOMS, &mut rng);
        let candidates: Vec<VoterId> = match axiom {
            Axiom::Iic => vec![VoterId(0)],
            Axiom::CopyRobustness => {
                let res = rule.resolve(&inst)?;
                res.paths().filter(|(_, p)| p.len() == 1).map(|(v, _)| v).collect()
            }
            _ => classify(&inst).delegating().collect(),
        };
        let Some(v) = pick(&mut rng, &candidates) else { continue };
        let ballots: Vec<bool> = (0..inst.n()).map(|_| rng.gen_bool(0.5)).collect();
        return Ok(check_case(rule, axiom, &inst, v, Some(&ballots))?.map(|w| Violation {
            instance: write_v1(&inst).expect("sampled instances have contiguous ranks"),
            voter: inst.name(v),
            detail: format!("trial {i}: {}", w.detail),
        }));
    }
    Err(Error::PreconditionUnmet(format!("no eligible case for {axiom} in {MAX_ATTEMPTS} samples")))
}

/// Randomized falsification over `trials` eligible cases, followed by the
/// archived fixtures. Trials run in parallel; the report does not depend on
/// scheduling.
pub fn run_axiom(rule: &Rule, axiom: Axiom, trials: usize, seed: u64) -> Result<AxiomReport> {
    let outcomes: Vec<Result<Option<Violation>>> =
        (0..trials as u64).into_par_iter().map(|i| trial(rule, axiom, seed, i)).collect();
    let mut violations = Vec::new();
    for o in outcomes {
        violations.extend(o?);
    }
    for fx in archived_fixtures(axiom)? {
        let v = fx.voter.unwrap_or(VoterId(0));
        match check_case(rule, axiom, &fx.instance, v, fx.ballots.as_deref()) {
            Ok(Some(w)) => violations.push(Violation {
                instance: write_v1(&fx.instance)?,
                voter: fx.instance.name(v),
                detail: format!("fixture {}: {}", fx.name, w.detail),
            }),
            Ok(None) | Err(Error::PreconditionUnmet(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(AxiomReport { axiom: axiom.name().into(), rule: rule.name(), trials, seed, violations })
}

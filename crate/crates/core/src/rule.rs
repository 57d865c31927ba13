//! Named delegation rules.

use std::fmt;
use std::str::FromStr;

use crate::branching::{borda_branching, PriorityOrder};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::order::{RankWeights, SeqOrder};
use crate::resolve::{resolve_confluent, resolve_dfd, resolve_diffusion_process, Resolution};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Dfd,
    Bfd,
    MinSum,
    WeightedSum(RankWeights),
    Leximax,
    Diffusion,
    /// Rank-sum-minimal branching; ties go by the priority order (identity if `None`).
    Borda(Option<PriorityOrder>),
}

impl Rule {
    /// The six rules evaluated in experiments.
    pub fn all() -> Vec<Rule> {
        vec![Rule::Dfd, Rule::Bfd, Rule::MinSum, Rule::Leximax, Rule::Diffusion, Rule::Borda(None)]
    }

    pub fn name(&self) -> String {
        match self {
            Rule::Dfd => "dfd".into(),
            Rule::Bfd => "bfd".into(),
            Rule::MinSum => "minsum".into(),
            Rule::WeightedSum(w) => format!("wsum:{w}"),
            Rule::Leximax => "leximax".into(),
            Rule::Diffusion => "diffusion".into(),
            Rule::Borda(_) => "borda".into(),
        }
    }

    /// The sequence order this rule maximises, if it is a sequence rule.
    pub fn order(&self) -> Option<SeqOrder> {
        match self {
            Rule::Dfd => Some(SeqOrder::Lex),
            Rule::Bfd => Some(SeqOrder::Bfd),
            Rule::MinSum => Some(SeqOrder::MinSum),
            Rule::WeightedSum(w) => Some(SeqOrder::WeightedSum(w.clone())),
            Rule::Leximax => Some(SeqOrder::Leximax),
            Rule::Diffusion => Some(SeqOrder::Diff),
            Rule::Borda(_) => None,
        }
    }

    pub fn is_confluent(&self) -> bool {
        !matches!(self, Rule::Dfd)
    }

    pub fn resolve(&self, instance: &Instance) -> Result<Resolution> {
        let mut res = match self {
            Rule::Dfd => resolve_dfd(instance)?,
            Rule::Diffusion => resolve_diffusion_process(instance)?,
            Rule::Borda(pi) => {
                let pi = match pi {
                    Some(pi) if pi.len() != instance.n() => {
                        return Err(Error::MismatchedInstance(format!(
                            "priority order has {} voters, instance has {}",
                            pi.len(),
                            instance.n()
                        )))
                    }
                    Some(pi) => pi.clone(),
                    None => PriorityOrder::identity(instance.n()),
                };
                borda_branching(instance, &pi)?.to_resolution("borda")
            }
            other => resolve_confluent(instance, &other.order().expect("sequence rule"))?,
        };
        res.rule = self.name();
        Ok(res)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Case-insensitive: `bfd`, `dfd`, `minsum`, `leximax`, `diffusion`,
/// `borda`, or `wsum:1=1,2=3,3=7`.
impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(table) = lower.strip_prefix("wsum:") {
            return Ok(Rule::WeightedSum(table.parse()?));
        }
        match lower.as_str() {
            "dfd" => Ok(Rule::Dfd),
            "bfd" => Ok(Rule::Bfd),
            "minsum" => Ok(Rule::MinSum),
            "leximax" => Ok(Rule::Leximax),
            "diffusion" | "diff" => Ok(Rule::Diffusion),
            "borda" => Ok(Rule::Borda(None)),
            _ => Err(Error::InvalidConfig(format!("unknown rule `{s}`"))),
        }
    }
}

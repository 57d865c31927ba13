//! Small hand-built instances used throughout the tests and the CLI.

use crate::format::parse_v1;
use crate::model::Instance;

/// Text encoding of the eleven-voter running example.
pub const FIG1_V1: &str = include_str!("../assets/fig1.txt");

/// The running example: delegating a..f, isolated g and h, casting i, j, k.
pub fn fig1() -> Instance {
    parse_v1(FIG1_V1).expect("fig1 fixture parses")
}

/// Two voters ranking each other first and their own casting voter second:
/// `v1: v2 w1`, `v2: v1 w2`.
pub fn mutual_pair() -> Instance {
    parse_v1("v1: v2 w1\nv2: v1 w2\ncasting: w1 w2\n").expect("mutual pair parses")
}

/// `k` delegators with a single edge each to one casting voter.
pub fn star(k: usize) -> Instance {
    let mut rankings = vec![vec![k]; k];
    rankings.push(vec![]);
    Instance::from_rankings(rankings, [k]).expect("star is valid")
}

/// Four-voter ring on which every confluent sequence rule breaks
/// copy-robustness for voter `u`.
pub fn copy_ring() -> Instance {
    parse_v1("v: u t\nu: v s\ncasting: t s\n").expect("copy ring parses")
}

/// Instance on which depth-first delegation violates guru-participation
/// when voter [`DFD_GURU_VOTER`] withdraws (found by randomized search).
pub const DFD_GURU_V1: &str = include_str!("../assets/dfd_guru.txt");

pub const DFD_GURU_VOTER: &str = "x";

pub fn dfd_guru() -> Instance {
    parse_v1(DFD_GURU_V1).expect("dfd guru fixture parses")
}

/// Instance where no C-branching is popular (found by randomized search).
pub const NO_POPULAR_V1: &str = include_str!("../assets/no_popular.txt");

pub fn no_popular() -> Instance {
    parse_v1(NO_POPULAR_V1).expect("no-popular fixture parses")
}

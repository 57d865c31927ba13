//! Minimum-cost spanning arborescence (Chu-Liu/Edmonds) by recursive cycle
//! contraction. Costs may be negative.

use crate::num::Cost;

#[derive(Clone, Debug, PartialEq)]
pub struct Arc<C> {
    pub from: usize,
    pub to: usize,
    pub cost: C,
}

/// Chooses one incoming arc for every node except `root` so that the chosen
/// arcs form an arborescence of minimum total cost. Returns the chosen arc
/// index per node (`None` for the root), or `None` if some node cannot be
/// reached from the root. Among equal-cost arcs the smaller index is
/// preferred at every step, so the result is deterministic.
pub fn min_arborescence<C: Cost>(n: usize, root: usize, arcs: &[Arc<C>]) -> Option<Vec<Option<usize>>> {
    let local: Vec<(usize, usize, C)> = arcs
        .iter()
        .filter(|a| a.from != a.to && a.to != root)
        .map(|a| (a.from, a.to, a.cost.clone()))
        .collect();
    let ids: Vec<usize> = arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.from != a.to && a.to != root)
        .map(|(i, _)| i)
        .collect();
    let chosen = solve(n, root, &local)?;
    Some(chosen.into_iter().map(|c| c.map(|i| ids[i])).collect())
}

/// Returns per node the index (into `arcs`) of its chosen incoming arc.
fn solve<C: Cost>(n: usize, root: usize, arcs: &[(usize, usize, C)]) -> Option<Vec<Option<usize>>> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (i, (_, to, cost)) in arcs.iter().enumerate() {
        match best[*to] {
            Some(j) if arcs[j].2 <= *cost => {}
            _ => best[*to] = Some(i),
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }

    // Detect cycles among the chosen arcs.
    let mut comp = vec![usize::MAX; n];
    let mut mark = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        let mut v = start;
        while v != root && mark[v] == usize::MAX && comp[v] == usize::MAX {
            mark[v] = start;
            v = arcs[best[v].unwrap()].0;
        }
        if v != root && mark[v] == start && comp[v] == usize::MAX {
            let mut cycle = vec![v];
            let mut u = arcs[best[v].unwrap()].0;
            while u != v {
                cycle.push(u);
                u = arcs[best[u].unwrap()].0;
            }
            for &u in &cycle {
                comp[u] = usize::MAX - 1;
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Some(best);
    }

    // Contract: every cycle becomes one node, other nodes keep their own.
    let mut next_id = 0;
    let mut comp = vec![usize::MAX; n];
    for cycle in &cycles {
        for &u in cycle {
            comp[u] = next_id;
        }
        next_id += 1;
    }
    for c in comp.iter_mut() {
        if *c == usize::MAX {
            *c = next_id;
            next_id += 1;
        }
    }
    let in_cycle = |v: usize| comp[v] < cycles.len();
    let mut contracted = Vec::new();
    let mut origin = Vec::new();
    for (i, (from, to, cost)) in arcs.iter().enumerate() {
        let (cf, ct) = (comp[*from], comp[*to]);
        if cf == ct {
            continue;
        }
        let cost = if in_cycle(*to) { cost.clone() - arcs[best[*to].unwrap()].2.clone() } else { cost.clone() };
        contracted.push((cf, ct, cost));
        origin.push(i);
    }
    let sub = solve(next_id, comp[root], &contracted)?;

    // Expand: cycle nodes keep their cycle arc except where the entering arc lands.
    let mut chosen: Vec<Option<usize>> = vec![None; n];
    for (cv, arc) in sub.iter().enumerate() {
        let Some(arc) = arc else { continue };
        let original = origin[*arc];
        let to = arcs[original].1;
        if cv < cycles.len() {
            for &u in &cycles[cv] {
                chosen[u] = best[u];
            }
        }
        chosen[to] = Some(original);
    }
    Some(chosen)
}

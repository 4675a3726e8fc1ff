use super::{Dag, EdgeKind, Pdag};
use crate::error::{Error, Result};

/// Completed PDAG of the Markov equivalence class of `g`: v-structure arcs
/// stay directed, compelled arcs are found with Meek's rules, everything
/// else is undirected.
pub fn cpdag(g: &Dag) -> Pdag {
    let n = g.node_count();
    let mut p = Pdag::new(g.nodes().to_vec());
    for (u, v) in g.arcs() {
        p.add_undirected(u, v).expect("distinct endpoints");
    }
    for c in 0..n {
        let parents: Vec<usize> = g.parents(c).iter().copied().collect();
        for (i, &a) in parents.iter().enumerate() {
            for &b in &parents[i + 1..] {
                if !g.has_arc(a, b) && !g.has_arc(b, a) {
                    p.add_directed(a, c).expect("subgraph of a DAG");
                    p.add_directed(b, c).expect("subgraph of a DAG");
                }
            }
        }
    }
    meek_closure(&mut p);
    p
}

/// Applies Meek rules R1-R3 until no undirected edge can be oriented.
/// Orientations that would close a directed cycle are skipped.
pub(crate) fn meek_closure(p: &mut Pdag) {
    loop {
        let mut changed = false;
        let undirected: Vec<(usize, usize)> = p.undirected().iter().copied().collect();
        for (x, y) in undirected {
            if !p.has_undirected(x, y) {
                continue;
            }
            for (a, b) in [(x, y), (y, x)] {
                if compelled(p, a, b) && p.can_direct(a, b) {
                    p.add_directed(a, b).expect("checked acyclic");
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Does some Meek rule force the undirected edge `a - b` into `a -> b`?
fn compelled(p: &Pdag, a: usize, b: usize) -> bool {
    let n = p.node_count();
    // R1: c -> a - b with c, b nonadjacent
    if (0..n).any(|c| p.has_directed(c, a) && c != b && !p.adjacent(c, b)) {
        return true;
    }
    // R2: a -> c -> b
    if (0..n).any(|c| p.has_directed(a, c) && p.has_directed(c, b)) {
        return true;
    }
    // R3: a - c -> b and a - d -> b with c, d nonadjacent
    let candidates: Vec<usize> = (0..n)
        .filter(|&c| c != b && p.has_undirected(a, c) && p.has_directed(c, b))
        .collect();
    for (i, &c) in candidates.iter().enumerate() {
        for &d in &candidates[i + 1..] {
            if !p.adjacent(c, d) {
                return true;
            }
        }
    }
    false
}

fn aligned<'a>(a: &'a Pdag, b: &'a Pdag) -> Result<Vec<usize>> {
    if a.node_count() != b.node_count() {
        return Err(Error::NodeSetMismatch);
    }
    a.nodes()
        .iter()
        .map(|name| {
            b.nodes()
                .iter()
                .position(|x| x == name)
                .ok_or(Error::NodeSetMismatch)
        })
        .collect()
}

/// Structural Hamming distance: the number of node pairs whose edge status
/// (absent, either direction, undirected) differs between `a` and `b`.
pub fn shd(a: &Pdag, b: &Pdag) -> Result<usize> {
    let map = aligned(a, b)?;
    let n = a.node_count();
    let mut distance = 0;
    for i in 0..n {
        for j in i + 1..n {
            let ka = a.edge_kind(i, j);
            let kb = b.edge_kind(map[i], map[j]);
            if ka != kb {
                distance += 1;
            }
        }
    }
    Ok(distance)
}

/// Number of node pairs adjacent in exactly one of the two graphs.
pub fn skeleton_shd(a: &Pdag, b: &Pdag) -> Result<usize> {
    let map = aligned(a, b)?;
    let n = a.node_count();
    let mut distance = 0;
    for i in 0..n {
        for j in i + 1..n {
            let ea = a.edge_kind(i, j) != EdgeKind::Absent;
            let eb = b.edge_kind(map[i], map[j]) != EdgeKind::Absent;
            if ea != eb {
                distance += 1;
            }
        }
    }
    Ok(distance)
}

//! Directed acyclic and partially directed graphs over named variables.

mod constraints;
mod cpdag;
mod export;
mod paths;

use std::collections::{BTreeSet, VecDeque};

pub use constraints::{check_constraints, ConstraintSet, ResolvedConstraints};
pub use cpdag::{cpdag, shd, skeleton_shd};
pub(crate) use cpdag::meek_closure;
pub use export::{arc_list_csv, parse_arc_list_csv, ArcRecord};
pub use paths::{directed_paths, Path};

use crate::error::{Error, Result};

/// Read access to the directed arcs of a graph, by node name.
pub trait ArcSet {
    fn node_names(&self) -> &[String];
    fn contains_directed(&self, from: usize, to: usize) -> bool;

    fn node_index(&self, name: &str) -> Option<usize> {
        self.node_names().iter().position(|n| n == name)
    }
}

/// Node permutation sorting indices by name; used for lexicographic tie-breaks.
pub fn name_order(nodes: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].cmp(&nodes[b]));
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
}

impl Dag {
    pub fn new(nodes: Vec<String>) -> Self {
        let n = nodes.len();
        Dag {
            nodes,
            parents: vec![BTreeSet::new(); n],
            children: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_arcs(nodes: Vec<String>, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Dag::new(nodes);
        for &(u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    pub fn from_named(nodes: &[&str], arcs: &[(&str, &str)]) -> Result<Self> {
        let mut g = Dag::new(nodes.iter().map(|s| s.to_string()).collect());
        for (u, v) in arcs {
            let u = g.require(u)?;
            let v = g.require(v)?;
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, node: usize) -> &str {
        &self.nodes[node]
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.node_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, node: usize) -> &BTreeSet<usize> {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> &BTreeSet<usize> {
        &self.children[node]
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.children[from].contains(&to)
    }

    pub fn arc_count(&self) -> usize {
        self.children.iter().map(BTreeSet::len).sum()
    }

    /// Arcs in index order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, ch)| ch.iter().map(move |&v| (u, v)))
            .collect()
    }

    /// Arcs as name pairs, sorted lexicographically.
    pub fn named_arcs(&self) -> Vec<(String, String)> {
        let mut arcs: Vec<(String, String)> = self
            .arcs()
            .into_iter()
            .map(|(u, v)| (self.nodes[u].clone(), self.nodes[v].clone()))
            .collect();
        arcs.sort();
        arcs
    }

    /// True when a directed path `from ⇝ to` exists (a node reaches itself).
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &self.children[u] {
                if w == to {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn check_new_arc(&self, from: usize, to: usize) -> Result<()> {
        let n = self.nodes.len();
        if from >= n || to >= n {
            return Err(Error::InvalidArgument(format!("arc ({from}, {to}) out of range")));
        }
        if from == to {
            return Err(self.invalid(from, to, "self-loop"));
        }
        if self.has_arc(from, to) {
            return Err(self.invalid(from, to, "duplicate arc"));
        }
        Ok(())
    }

    fn invalid(&self, from: usize, to: usize, reason: &'static str) -> Error {
        Error::InvalidArc {
            from: self.nodes[from].clone(),
            to: self.nodes[to].clone(),
            reason,
        }
    }

    /// Adds `from -> to`; rejected (graph unchanged) on self-loops,
    /// duplicates, or when it would close a directed cycle.
    pub fn add_arc(&mut self, from: usize, to: usize) -> Result<()> {
        self.check_new_arc(from, to)?;
        if self.has_path(to, from) {
            return Err(Error::Cycle {
                from: self.nodes[from].clone(),
                to: self.nodes[to].clone(),
            });
        }
        self.children[from].insert(to);
        self.parents[to].insert(from);
        Ok(())
    }

    pub fn remove_arc(&mut self, from: usize, to: usize) -> bool {
        let removed = self.children[from].remove(&to);
        self.parents[to].remove(&from);
        removed
    }

    /// Replaces `from -> to` by `to -> from`; graph unchanged on failure.
    pub fn reverse_arc(&mut self, from: usize, to: usize) -> Result<()> {
        if !self.has_arc(from, to) {
            return Err(self.invalid(from, to, "arc not present"));
        }
        self.remove_arc(from, to);
        if self.has_path(from, to) {
            self.children[from].insert(to);
            self.parents[to].insert(from);
            return Err(Error::Cycle {
                from: self.nodes[to].clone(),
                to: self.nodes[from].clone(),
            });
        }
        self.children[to].insert(from);
        self.parents[from].insert(to);
        Ok(())
    }

    /// Would adding `from -> to` keep the graph acyclic?
    pub fn can_add(&self, from: usize, to: usize) -> bool {
        from != to && !self.has_arc(from, to) && !self.has_path(to, from)
    }

    /// Would reversing the existing arc `from -> to` keep the graph acyclic?
    pub fn can_reverse(&self, from: usize, to: usize) -> bool {
        // a cycle appears iff another path from -> ... -> to exists
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.children[from]
            .iter()
            .copied()
            .filter(|&w| w != to)
            .collect();
        for &w in &stack {
            seen[w] = true;
        }
        while let Some(u) = stack.pop() {
            if u == to {
                return false;
            }
            for &w in &self.children[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        true
    }

    /// Kahn's algorithm, smallest index first among available nodes.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(BTreeSet::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&u) = ready.iter().next() {
            ready.remove(&u);
            order.push(u);
            for &w in &self.children[u] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        order
    }

    pub fn to_pdag(&self) -> Pdag {
        Pdag {
            nodes: self.nodes.clone(),
            directed: self.arcs().into_iter().collect(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn to_dot(&self) -> String {
        export::dot(&self.nodes, &self.named_arcs_with(|_, _| None), &[])
    }

    /// DOT output with an optional label per arc.
    pub fn to_dot_labeled<F>(&self, label: F) -> String
    where
        F: Fn(usize, usize) -> Option<String>,
    {
        export::dot(&self.nodes, &self.named_arcs_with(label), &[])
    }

    fn named_arcs_with<F>(&self, label: F) -> Vec<(String, String, Option<String>)>
    where
        F: Fn(usize, usize) -> Option<String>,
    {
        let mut arcs: Vec<_> = self
            .arcs()
            .into_iter()
            .map(|(u, v)| (self.nodes[u].clone(), self.nodes[v].clone(), label(u, v)))
            .collect();
        arcs.sort();
        arcs
    }
}

impl ArcSet for Dag {
    fn node_names(&self) -> &[String] {
        &self.nodes
    }

    fn contains_directed(&self, from: usize, to: usize) -> bool {
        self.has_arc(from, to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Absent,
    /// `a -> b` for the queried pair `(a, b)`.
    Forward,
    /// `b -> a` for the queried pair `(a, b)`.
    Backward,
    Undirected,
}

/// Partially directed graph: directed arcs plus undirected edges, the
/// directed part acyclic. Undirected edges are stored as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdag {
    nodes: Vec<String>,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

fn unordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Pdag {
    pub fn new(nodes: Vec<String>) -> Self {
        Pdag {
            nodes,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        }
    }

    pub fn from_named(nodes: &[&str], directed: &[(&str, &str)], undirected: &[(&str, &str)]) -> Result<Self> {
        let mut g = Pdag::new(nodes.iter().map(|s| s.to_string()).collect());
        let idx = |g: &Pdag, s: &str| {
            g.node_index(s)
                .ok_or_else(|| Error::UnknownVariable(s.to_string()))
        };
        for (u, v) in directed {
            let (u, v) = (idx(&g, u)?, idx(&g, v)?);
            g.add_directed(u, v)?;
        }
        for (u, v) in undirected {
            let (u, v) = (idx(&g, u)?, idx(&g, v)?);
            g.add_undirected(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        self.directed.contains(&(from, to))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&unordered(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_undirected(a, b) || self.has_directed(a, b) || self.has_directed(b, a)
    }

    pub fn edge_kind(&self, a: usize, b: usize) -> EdgeKind {
        if self.has_directed(a, b) {
            EdgeKind::Forward
        } else if self.has_directed(b, a) {
            EdgeKind::Backward
        } else if self.has_undirected(a, b) {
            EdgeKind::Undirected
        } else {
            EdgeKind::Absent
        }
    }

    pub fn edge_count(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    /// Nodes joined to `v` by an undirected edge.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.undirected
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Nodes adjacent to `v` through any edge.
    pub fn adjacents(&self, v: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&u| u != v && self.adjacent(u, v))
            .collect()
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        self.directed
            .iter()
            .filter(|&&(_, b)| b == v)
            .map(|&(a, _)| a)
            .collect()
    }

    fn directed_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in self.directed.range((u, 0)..(u + 1, 0)) {
                debug_assert_eq!(a, u);
                if b == to {
                    return true;
                }
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }

    /// Would orienting or adding `from -> to` keep the directed part acyclic?
    pub fn can_direct(&self, from: usize, to: usize) -> bool {
        from != to && !self.directed_path(to, from)
    }

    /// Adds `from -> to`, replacing any existing edge between the pair.
    pub fn add_directed(&mut self, from: usize, to: usize) -> Result<()> {
        if from == to || from >= self.nodes.len() || to >= self.nodes.len() {
            return Err(Error::InvalidArgument(format!("bad arc ({from}, {to})")));
        }
        let previous = self.edge_kind(from, to);
        self.remove_edge(from, to);
        if !self.can_direct(from, to) {
            self.restore(from, to, previous);
            return Err(Error::Cycle {
                from: self.nodes[from].clone(),
                to: self.nodes[to].clone(),
            });
        }
        self.directed.insert((from, to));
        Ok(())
    }

    fn restore(&mut self, a: usize, b: usize, kind: EdgeKind) {
        match kind {
            EdgeKind::Absent => {}
            EdgeKind::Forward => {
                self.directed.insert((a, b));
            }
            EdgeKind::Backward => {
                self.directed.insert((b, a));
            }
            EdgeKind::Undirected => {
                self.undirected.insert(unordered(a, b));
            }
        }
    }

    /// Adds `a - b`, replacing any existing edge between the pair.
    pub fn add_undirected(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.nodes.len() || b >= self.nodes.len() {
            return Err(Error::InvalidArgument(format!("bad edge ({a}, {b})")));
        }
        self.remove_edge(a, b);
        self.undirected.insert(unordered(a, b));
        Ok(())
    }

    /// Removes whatever edge joins `a` and `b`; returns what was there.
    pub fn remove_edge(&mut self, a: usize, b: usize) -> EdgeKind {
        let kind = self.edge_kind(a, b);
        self.directed.remove(&(a, b));
        self.directed.remove(&(b, a));
        self.undirected.remove(&unordered(a, b));
        kind
    }

    /// Unordered adjacent pairs `(min, max)`.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.directed
            .iter()
            .map(|&(a, b)| unordered(a, b))
            .chain(self.undirected.iter().copied())
            .collect()
    }

    /// Returns the DAG when no undirected edge remains.
    pub fn to_dag(&self) -> Option<Dag> {
        if !self.undirected.is_empty() {
            return None;
        }
        let arcs: Vec<_> = self.directed.iter().copied().collect();
        Dag::from_arcs(self.nodes.clone(), &arcs).ok()
    }

    pub fn to_dot(&self) -> String {
        let mut directed: Vec<_> = self
            .directed
            .iter()
            .map(|&(a, b)| (self.nodes[a].clone(), self.nodes[b].clone(), None))
            .collect();
        directed.sort();
        let mut undirected: Vec<_> = self
            .undirected
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.nodes[a].clone(), self.nodes[b].clone());
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        undirected.sort();
        export::dot(&self.nodes, &directed, &undirected)
    }
}

impl ArcSet for Pdag {
    fn node_names(&self) -> &[String] {
        &self.nodes
    }

    fn contains_directed(&self, from: usize, to: usize) -> bool {
        self.has_directed(from, to)
    }
}

/// Output of a structure learner: score-based and hybrid learners return
/// DAGs, constraint-based learners return PDAGs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LearnedGraph {
    Dag(Dag),
    Pdag(Pdag),
}

impl LearnedGraph {
    pub fn as_dag(&self) -> Option<&Dag> {
        match self {
            LearnedGraph::Dag(d) => Some(d),
            LearnedGraph::Pdag(_) => None,
        }
    }

    pub fn to_pdag(&self) -> Pdag {
        match self {
            LearnedGraph::Dag(d) => d.to_pdag(),
            LearnedGraph::Pdag(p) => p.clone(),
        }
    }

    pub fn edge_kind(&self, a: usize, b: usize) -> EdgeKind {
        match self {
            LearnedGraph::Dag(d) => {
                if d.has_arc(a, b) {
                    EdgeKind::Forward
                } else if d.has_arc(b, a) {
                    EdgeKind::Backward
                } else {
                    EdgeKind::Absent
                }
            }
            LearnedGraph::Pdag(p) => p.edge_kind(a, b),
        }
    }

    pub fn to_dot(&self) -> String {
        match self {
            LearnedGraph::Dag(d) => d.to_dot(),
            LearnedGraph::Pdag(p) => p.to_dot(),
        }
    }

    /// One line per edge, `A -> B` or `A -- B`, sorted by name.
    pub fn edge_lines(&self) -> Vec<String> {
        let pdag = self.to_pdag();
        let nodes = pdag.nodes();
        let mut lines: Vec<String> = pdag
            .directed()
            .iter()
            .map(|&(a, b)| format!("{} -> {}", nodes[a], nodes[b]))
            .chain(pdag.undirected().iter().map(|&(a, b)| {
                let (x, y) = if nodes[a] <= nodes[b] { (a, b) } else { (b, a) };
                format!("{} -- {}", nodes[x], nodes[y])
            }))
            .collect();
        lines.sort();
        lines
    }
}

impl ArcSet for LearnedGraph {
    fn node_names(&self) -> &[String] {
        match self {
            LearnedGraph::Dag(d) => d.node_names(),
            LearnedGraph::Pdag(p) => p.node_names(),
        }
    }

    fn contains_directed(&self, from: usize, to: usize) -> bool {
        match self {
            LearnedGraph::Dag(d) => d.has_arc(from, to),
            LearnedGraph::Pdag(p) => p.has_directed(from, to),
        }
    }
}

use super::{name_order, Dag};
use crate::error::Result;

/// Node-simple directed path, stored as its node sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<usize>,
}

impl Path {
    pub fn new(nodes: Vec<usize>) -> Self {
        assert!(nodes.len() >= 2, "a path has at least one arc");
        Path { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn display(&self, g: &Dag) -> String {
        self.nodes
            .iter()
            .map(|&v| g.name(v))
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

/// All node-simple directed paths `from ⇝ to`, ordered lexicographically by
/// node-name sequence. A node has no path to itself.
pub fn directed_paths(g: &Dag, from: &str, to: &str) -> Result<Vec<Path>> {
    let u = g.require(from)?;
    let v = g.require(to)?;
    Ok(g.paths_between(u, v))
}

impl Dag {
    pub fn paths_between(&self, from: usize, to: usize) -> Vec<Path> {
        let mut out = Vec::new();
        if from == to {
            return out;
        }
        let rank = {
            let order = name_order(self.nodes());
            let mut rank = vec![0; order.len()];
            for (r, &v) in order.iter().enumerate() {
                rank[v] = r;
            }
            rank
        };
        // only nodes that can still reach the target are worth entering
        let reaches: Vec<bool> = (0..self.node_count())
            .map(|w| self.has_path(w, to))
            .collect();
        if !reaches[from] {
            return out;
        }
        let sorted_children: Vec<Vec<usize>> = (0..self.node_count())
            .map(|w| {
                let mut ch: Vec<usize> = self
                    .children(w)
                    .iter()
                    .copied()
                    .filter(|&c| reaches[c])
                    .collect();
                ch.sort_by_key(|&c| rank[c]);
                ch
            })
            .collect();
        let mut on_path = vec![false; self.node_count()];
        let mut stack = vec![from];
        on_path[from] = true;
        extend(&sorted_children, to, &mut stack, &mut on_path, &mut out);
        out
    }
}

fn extend(
    children: &[Vec<usize>],
    target: usize,
    stack: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Path>,
) {
    let last = *stack.last().expect("stack holds the source");
    for &c in &children[last] {
        if c == target {
            let mut nodes = stack.clone();
            nodes.push(c);
            out.push(Path::new(nodes));
        } else if !on_path[c] {
            on_path[c] = true;
            stack.push(c);
            extend(children, target, stack, on_path, out);
            stack.pop();
            on_path[c] = false;
        }
    }
}

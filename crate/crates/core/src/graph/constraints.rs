use std::collections::BTreeSet;
use std::path::Path;

use super::{ArcSet, Dag};
use crate::error::{Error, Result};

/// Arcs forbidden (blacklist) or required (whitelist) during learning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    blacklist: BTreeSet<(String, String)>,
    whitelist: BTreeSet<(String, String)>,
}

impl ConstraintSet {
    pub fn new<I, J, S>(blacklist: I, whitelist: J) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        J: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let blacklist: BTreeSet<(String, String)> = blacklist
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let whitelist: BTreeSet<(String, String)> = whitelist
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        for (a, b) in blacklist.iter().chain(&whitelist) {
            if a == b {
                return Err(Error::InvalidArgument(format!("constraint {a} -> {b} is a self-loop")));
            }
        }
        if let Some((a, b)) = whitelist.intersection(&blacklist).next() {
            return Err(Error::InvalidArgument(format!(
                "{a} -> {b} is both whitelisted and blacklisted"
            )));
        }
        let mut nodes: Vec<String> = whitelist
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        nodes.dedup();
        let mut g = Dag::new(nodes);
        for (a, b) in &whitelist {
            let (u, v) = (g.require(a)?, g.require(b)?);
            g.add_arc(u, v).map_err(|_| {
                Error::InvalidArgument(format!("whitelist is cyclic at {a} -> {b}"))
            })?;
        }
        Ok(ConstraintSet {
            blacklist,
            whitelist,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn blacklist(&self) -> &BTreeSet<(String, String)> {
        &self.blacklist
    }

    pub fn whitelist(&self) -> &BTreeSet<(String, String)> {
        &self.whitelist
    }

    pub fn is_empty(&self) -> bool {
        self.blacklist.is_empty() && self.whitelist.is_empty()
    }

    /// One arc per line: `blacklist: FROM -> TO` or `whitelist: FROM -> TO`.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut black = Vec::new();
        let mut white = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::parse("constraints", lineno + 1, msg);
            let (kind, arc) = line
                .split_once(':')
                .ok_or_else(|| err("expected `blacklist:` or `whitelist:` prefix"))?;
            let (from, to) = arc
                .split_once("->")
                .ok_or_else(|| err("expected `FROM -> TO`"))?;
            let (from, to) = (from.trim().to_string(), to.trim().to_string());
            if from.is_empty() || to.is_empty() {
                return Err(err("empty node name"));
            }
            match kind.trim() {
                "blacklist" => black.push((from, to)),
                "whitelist" => white.push((from, to)),
                other => return Err(err(&format!("unknown constraint kind `{other}`"))),
            }
        }
        ConstraintSet::new(black, white)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ConstraintSet::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.blacklist {
            out.push_str(&format!("blacklist: {a} -> {b}\n"));
        }
        for (a, b) in &self.whitelist {
            out.push_str(&format!("whitelist: {a} -> {b}\n"));
        }
        out
    }

    /// Maps the constraints onto node indices; every named node must exist.
    pub fn resolve(&self, nodes: &[String]) -> Result<ResolvedConstraints> {
        let n = nodes.len();
        let index = |name: &str| {
            nodes
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut black = vec![false; n * n];
        for (a, b) in &self.blacklist {
            black[index(a)? * n + index(b)?] = true;
        }
        let mut white = Vec::new();
        for (a, b) in &self.whitelist {
            white.push((index(a)?, index(b)?));
        }
        white.sort_unstable();
        Ok(ResolvedConstraints { n, black, white })
    }
}

/// Index form of a [`ConstraintSet`] for a fixed node list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedConstraints {
    n: usize,
    black: Vec<bool>,
    white: Vec<(usize, usize)>,
}

impl ResolvedConstraints {
    pub fn none(n: usize) -> Self {
        ResolvedConstraints {
            n,
            black: vec![false; n * n],
            white: Vec::new(),
        }
    }

    pub fn is_blacklisted(&self, from: usize, to: usize) -> bool {
        self.black[from * self.n + to]
    }

    pub fn is_whitelisted(&self, from: usize, to: usize) -> bool {
        self.white.binary_search(&(from, to)).is_ok()
    }

    /// Whitelisted in either direction.
    pub fn pair_whitelisted(&self, a: usize, b: usize) -> bool {
        self.is_whitelisted(a, b) || self.is_whitelisted(b, a)
    }

    /// Both directions blacklisted: the pair may never be adjacent.
    pub fn pair_forbidden(&self, a: usize, b: usize) -> bool {
        self.is_blacklisted(a, b) && self.is_blacklisted(b, a)
    }

    pub fn whitelist(&self) -> &[(usize, usize)] {
        &self.white
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// True iff no blacklisted arc is present in its stated direction and every
/// whitelisted arc is present as a directed arc.
pub fn check_constraints<G: ArcSet + ?Sized>(g: &G, c: &ConstraintSet) -> bool {
    let index = |name: &str| g.node_index(name);
    for (a, b) in c.blacklist() {
        if let (Some(u), Some(v)) = (index(a), index(b)) {
            if g.contains_directed(u, v) {
                return false;
            }
        }
    }
    c.whitelist().iter().all(|(a, b)| match (index(a), index(b)) {
        (Some(u), Some(v)) => g.contains_directed(u, v),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Pdag;

    fn nodes() -> Vec<&'static str> {
        vec!["EDU", "WORK", "M_POOR", "HEALTH", "SA_LIFE"]
    }

    #[test]
    fn empty_graph_empty_constraints() {
        let g = Dag::from_named(&[], &[]).unwrap();
        assert!(check_constraints(&g, &ConstraintSet::empty()));
    }

    #[test]
    fn blacklisted_arc_fails() {
        let c = ConstraintSet::new([("WORK", "EDU")], []).unwrap();
        let g = Dag::from_named(&nodes(), &[("WORK", "EDU")]).unwrap();
        assert!(!check_constraints(&g, &c));
        let ok = Dag::from_named(&nodes(), &[("EDU", "WORK")]).unwrap();
        assert!(check_constraints(&ok, &c));
    }

    #[test]
    fn missing_whitelisted_arc_fails() {
        let c = ConstraintSet::new([], [("EDU", "WORK")]).unwrap();
        let g = Dag::from_named(&nodes(), &[("HEALTH", "SA_LIFE")]).unwrap();
        assert!(!check_constraints(&g, &c));
        let undirected = Pdag::from_named(&nodes(), &[], &[("EDU", "WORK")]).unwrap();
        assert!(!check_constraints(&undirected, &c));
        let g = Dag::from_named(&nodes(), &[("EDU", "WORK")]).unwrap();
        assert!(check_constraints(&g, &c));
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(ConstraintSet::new([("A", "B")], [("A", "B")]).is_err());
        assert!(ConstraintSet::new([], [("A", "B"), ("B", "A")]).is_err());
        assert!(ConstraintSet::new([], [("A", "B"), ("B", "C"), ("C", "A")]).is_err());
        assert!(ConstraintSet::new([("A", "A")], []).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let text = "\
# priors
blacklist: WORK -> EDU
blacklist: M_POOR -> EDU
blacklist: SA_LIFE -> HEALTH
whitelist: EDU -> WORK
";
        let c = ConstraintSet::parse(text).unwrap();
        assert_eq!(c.blacklist().len(), 3);
        assert_eq!(c.whitelist().len(), 1);
        assert_eq!(ConstraintSet::parse(&c.to_text()).unwrap(), c);
        assert!(matches!(
            ConstraintSet::parse("greylist: A -> B"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn resolve_reports_unknown_nodes() {
        let c = ConstraintSet::new([("X", "EDU")], []).unwrap();
        let names: Vec<String> = nodes().iter().map(|s| s.to_string()).collect();
        assert!(matches!(c.resolve(&names), Err(Error::UnknownVariable(_))));
    }
}

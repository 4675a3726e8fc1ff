use crate::error::{Error, Result};

pub(super) fn dot(
    nodes: &[String],
    directed: &[(String, String, Option<String>)],
    undirected: &[(String, String)],
) -> String {
    let mut out = String::from("digraph {\n");
    for n in nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for (a, b, label) in directed {
        match label {
            Some(l) => out.push_str(&format!("  \"{a}\" -> \"{b}\" [label=\"{l}\"];\n")),
            None => out.push_str(&format!("  \"{a}\" -> \"{b}\";\n")),
        }
    }
    for (a, b) in undirected {
        out.push_str(&format!("  \"{a}\" -> \"{b}\" [dir=none];\n"));
    }
    out.push_str("}\n");
    out
}

/// One row of a flat arc list: `from,to[,strength]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcRecord {
    pub from: String,
    pub to: String,
    pub strength: Option<f64>,
}

pub fn arc_list_csv(arcs: &[ArcRecord]) -> String {
    let with_strength = arcs.iter().any(|a| a.strength.is_some());
    let mut out = String::from(if with_strength {
        "from,to,strength\n"
    } else {
        "from,to\n"
    });
    for a in arcs {
        match (with_strength, a.strength) {
            (true, Some(s)) => out.push_str(&format!("{},{},{}\n", a.from, a.to, s)),
            (true, None) => out.push_str(&format!("{},{},\n", a.from, a.to)),
            (false, _) => out.push_str(&format!("{},{}\n", a.from, a.to)),
        }
    }
    out
}

pub fn parse_arc_list_csv(text: &str) -> Result<Vec<ArcRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 || header[0] != "from" || header[1] != "to" {
        return Err(Error::parse("arc list", 1, "expected header `from,to[,strength]`"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() < 2 {
            return Err(Error::parse("arc list", line, "expected at least two fields"));
        }
        let strength = match rec.get(2) {
            Some(s) if !s.is_empty() => Some(
                s.parse::<f64>()
                    .map_err(|e| Error::parse("arc list", line, format!("bad strength: {e}")))?,
            ),
            _ => None,
        };
        out.push(ArcRecord {
            from: rec[0].to_string(),
            to: rec[1].to_string(),
            strength,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Dag;

    #[test]
    fn dot_has_one_line_per_arc() {
        let g = Dag::from_named(&["A", "B", "C"], &[("A", "B"), ("C", "B")]).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 2);
        assert!(dot.contains("\"A\" -> \"B\";"));
    }

    #[test]
    fn arc_list_round_trip() {
        let arcs = vec![
            ArcRecord {
                from: "A".into(),
                to: "B".into(),
                strength: Some(0.825),
            },
            ArcRecord {
                from: "C".into(),
                to: "B".into(),
                strength: Some(1.0),
            },
        ];
        assert_eq!(parse_arc_list_csv(&arc_list_csv(&arcs)).unwrap(), arcs);
    }
}

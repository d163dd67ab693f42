//! Document formats: the JSON shapes for finite graphs, k-graphs and staged
//! column templates, plus the CLI path-literal syntax.

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, KGraphError};
use crate::graph::{DirectedGraph, GraphDoc};
use crate::kgraph::{KGraph, KGraphBuilder};
use crate::paths::{FinitePath, InfinitePath};
use crate::staged::{StagedDigraph, StagedDoc};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct KEdgeDoc {
    pub id: String,
    pub r: String,
    pub s: String,
    pub color: usize,
}

/// `{"k":2,"vertices":[…],"edges":[{"id","r","s","color"}],"squares":[[["f","g"],["g2","f2"]],…]}`
/// where each square entry states `f·g = g2·f2`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct KGraphDoc {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<KEdgeDoc>,
    #[serde(default)]
    pub squares: Vec<[[String; 2]; 2]>,
}

impl KGraphDoc {
    pub fn build(&self) -> Result<KGraph, KGraphError> {
        if self.k == 0 {
            return Err(KGraphError::Invalid("k must be at least 1".into()));
        }
        let mut b = KGraphBuilder::new(self.k);
        for v in &self.vertices {
            b.vertex(v);
        }
        for e in &self.edges {
            if e.color == 0 || e.color > self.k {
                return Err(KGraphError::Invalid(format!(
                    "edge {} has color {} outside 1..={}",
                    e.id, e.color, self.k
                )));
            }
            b.edge(&e.id, &e.r, &e.s, e.color);
        }
        for sq in &self.squares {
            b.square(&sq[0][0], &sq[0][1], &sq[1][0], &sq[1][1]);
        }
        b.build()
    }

    pub fn from_kgraph(kg: &KGraph) -> KGraphDoc {
        let g = kg.skeleton();
        let mut squares = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for a in g.edge_ids() {
            for &b in g.edges_with_range(g.source(a)) {
                if kg.color(a) >= kg.color(b) {
                    continue;
                }
                if let Some((c, d)) = kg.square_partner(a, b) {
                    let entry = [
                        [g.edge_name(a).to_string(), g.edge_name(b).to_string()],
                        [g.edge_name(c).to_string(), g.edge_name(d).to_string()],
                    ];
                    if seen.insert(entry.clone()) {
                        squares.push(entry);
                    }
                }
            }
        }
        KGraphDoc {
            k: kg.k,
            vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
            edges: g
                .edge_ids()
                .map(|e| KEdgeDoc {
                    id: g.edge_name(e).to_string(),
                    r: g.vertex_name(g.range(e)).to_string(),
                    s: g.vertex_name(g.source(e)).to_string(),
                    color: kg.color(e) + 1,
                })
                .collect(),
            squares,
        }
    }
}

/// What an input document turned out to be.
pub enum InputKind {
    Digraph(DirectedGraph),
    Staged(StagedDigraph),
    KGraph(KGraph),
}

/// Sniffs a JSON document: k-graphs carry `"k"`, staged templates carry
/// `"tracks"`, plain graphs carry `"vertices"`/`"edges"`.
pub fn parse_input(name: &str, body: &str) -> Result<InputKind, GraphError> {
    let value: serde_json::Value = serde_json::from_str(body)
        .map_err(|e| GraphError::InvalidDocument(format!("{name}: {e}")))?;
    if value.get("k").is_some() {
        let doc: KGraphDoc = serde_json::from_value(value)
            .map_err(|e| GraphError::InvalidDocument(format!("{name}: {e}")))?;
        let kg = doc
            .build()
            .map_err(|e| GraphError::InvalidDocument(format!("{name}: {e}")))?;
        return Ok(InputKind::KGraph(kg));
    }
    if value.get("tracks").is_some() {
        let doc: StagedDoc = serde_json::from_value(value)
            .map_err(|e| GraphError::InvalidDocument(format!("{name}: {e}")))?;
        return Ok(InputKind::Staged(StagedDigraph::from_doc(name, doc)?));
    }
    let doc: GraphDoc = serde_json::from_value(value)
        .map_err(|e| GraphError::InvalidDocument(format!("{name}: {e}")))?;
    Ok(InputKind::Digraph(doc.build()?))
}

/// Path literals:
/// - finite: `"e1 e2 e3"`;
/// - a lone vertex: `"v:<vertex>"`;
/// - ultimately periodic: `"e1 e2 ; c1 c2"` meaning `e1e2(c1c2)^∞`
///   (head may be empty: `"; c1 c2"`);
/// - tail anchored: `"e1 e2 ; @anchor"` or `"; @anchor+3"` for a ray
///   starting at offset 3.
pub fn parse_path_literal(
    graph: &DirectedGraph,
    staged: Option<&StagedDigraph>,
    literal: &str,
) -> Result<ParsedPath, GraphError> {
    let lit = literal.trim();
    if let Some(v) = lit.strip_prefix("v:") {
        let path = FinitePath::vertex(v.trim());
        path.validate(graph)?;
        return Ok(ParsedPath::Finite(path));
    }
    match lit.split_once(';') {
        None => {
            let edges: Vec<String> = lit.split_whitespace().map(String::from).collect();
            if edges.is_empty() {
                return Err(GraphError::InvalidDocument("empty path literal".into()));
            }
            Ok(ParsedPath::Finite(FinitePath::from_edges(graph, edges)?))
        }
        Some((head_part, tail_part)) => {
            let head_edges: Vec<String> =
                head_part.split_whitespace().map(String::from).collect();
            let tail = tail_part.trim();
            if let Some(anchor_lit) = tail.strip_prefix('@') {
                let family = staged.ok_or_else(|| {
                    GraphError::InvalidDocument("anchored literal needs a staged graph".into())
                })?;
                let (name, offset) = match anchor_lit.split_once('+') {
                    Some((n, o)) => (
                        n,
                        o.parse::<usize>().map_err(|_| {
                            GraphError::InvalidDocument(format!("bad anchor offset in {lit}"))
                        })?,
                    ),
                    None => (anchor_lit, 0),
                };
                let anchor = family.parse_anchor(name)?;
                let head = if head_edges.is_empty() {
                    use crate::paths::RayResolver;
                    FinitePath::vertex(&family.ray_vertex(anchor, offset))
                } else {
                    FinitePath::from_edges(graph, head_edges)?
                };
                Ok(ParsedPath::Infinite(family.anchored_path(head, anchor, offset)))
            } else {
                let cycle: Vec<String> = tail.split_whitespace().map(String::from).collect();
                if cycle.is_empty() {
                    return Err(GraphError::InvalidDocument("empty cycle in UP literal".into()));
                }
                let head = if head_edges.is_empty() {
                    let first = graph
                        .edge(&cycle[0])
                        .ok_or_else(|| GraphError::UnknownEdge(cycle[0].clone()))?;
                    FinitePath::vertex(graph.vertex_name(graph.range(first)))
                } else {
                    FinitePath::from_edges(graph, head_edges)?
                };
                Ok(ParsedPath::Infinite(InfinitePath::up(graph, head, cycle)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedPath {
    Finite(FinitePath),
    Infinite(InfinitePath),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{loop_plus_edge, two_times_family};

    #[test]
    fn kgraph_doc_round_trips() {
        let kg = crate::kgraph::omega(2, &[2, 1]);
        let doc = KGraphDoc::from_kgraph(&kg);
        let rebuilt = doc.build().unwrap();
        assert!(rebuilt.validate().is_valid());
        let doc2 = KGraphDoc::from_kgraph(&rebuilt);
        assert_eq!(doc, doc2);
    }

    #[test]
    fn graph_doc_round_trips() {
        let g = loop_plus_edge();
        let doc = GraphDoc::from_graph(&g);
        let body = serde_json::to_string(&doc).unwrap();
        match parse_input("test", &body).unwrap() {
            InputKind::Digraph(g2) => {
                assert_eq!(GraphDoc::from_graph(&g2), doc);
            }
            _ => panic!("expected a digraph"),
        }
    }

    #[test]
    fn path_literals_parse() {
        let f = two_times_family();
        let g = f.stage(6);
        match parse_path_literal(&g, Some(&f), "e0 e1 f1_2 ; @w:2").unwrap() {
            ParsedPath::Infinite(InfinitePath::Anchored { head, offset, .. }) => {
                assert_eq!(head.edges.len(), 3);
                assert_eq!(offset, 0);
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        match parse_path_literal(&g, Some(&f), "; @v+2").unwrap() {
            ParsedPath::Infinite(InfinitePath::Anchored { head, offset, .. }) => {
                assert!(head.edges.is_empty());
                assert_eq!(offset, 2);
                assert_eq!(head.at, "v2");
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        let lp = loop_plus_edge();
        match parse_path_literal(&lp, None, "; g").unwrap() {
            ParsedPath::Infinite(InfinitePath::Up { head, cycle }) => {
                assert!(head.edges.is_empty());
                assert_eq!(cycle, vec!["g".to_string()]);
            }
            other => panic!("unexpected parse: {other:?}"),
        }
        assert!(parse_path_literal(&lp, None, "v:u").is_ok());
        assert!(parse_path_literal(&lp, None, "f").is_ok());
        // A head must end where the cycle starts.
        assert!(parse_path_literal(&lp, None, "f ; g").is_err());
    }
}

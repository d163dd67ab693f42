//! Row-finite directed graphs and their basic structural analysis.
//!
//! Edges are stored as (range, source) pairs. A path `α = α₁α₂⋯αₖ` is
//! composable when `s(αⱼ) = r(αⱼ₊₁)`, so paths traverse edges from range to
//! source. This reverses the arrow direction a drawing suggests; it is the
//! convention under which path composition matches operator multiplication,
//! and every range/source query in this crate follows it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub name: String,
    pub range: VertexId,
    pub source: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Finite,
    /// A finite stage of a staged (finitely presented infinite) graph.
    Stage,
}

/// A row-finite directed graph with named vertices and edges.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    kind: GraphKind,
    vertex_names: Vec<String>,
    vertex_index: BTreeMap<String, VertexId>,
    edges: Vec<EdgeRecord>,
    edge_index: BTreeMap<String, EdgeId>,
    by_range: Vec<Vec<EdgeId>>,
    by_source: Vec<Vec<EdgeId>>,
}

impl DirectedGraph {
    pub fn new(kind: GraphKind) -> Self {
        DirectedGraph {
            kind,
            vertex_names: Vec::new(),
            vertex_index: BTreeMap::new(),
            edges: Vec::new(),
            edge_index: BTreeMap::new(),
            by_range: Vec::new(),
            by_source: Vec::new(),
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if self.vertex_index.contains_key(name) {
            return Err(GraphError::DuplicateId(name.to_string()));
        }
        let id = VertexId(self.vertex_names.len() as u32);
        self.vertex_names.push(name.to_string());
        self.vertex_index.insert(name.to_string(), id);
        self.by_range.push(Vec::new());
        self.by_source.push(Vec::new());
        Ok(id)
    }

    /// Adds a vertex, returning the existing id if the name is already present.
    pub fn ensure_vertex(&mut self, name: &str) -> VertexId {
        match self.vertex_index.get(name) {
            Some(&id) => id,
            None => self.add_vertex(name).expect("fresh vertex"),
        }
    }

    pub fn add_edge(&mut self, name: &str, range: &str, source: &str) -> Result<EdgeId, GraphError> {
        if self.edge_index.contains_key(name) {
            return Err(GraphError::DuplicateId(name.to_string()));
        }
        let r = self
            .vertex(range)
            .ok_or_else(|| GraphError::UnknownVertex(range.to_string()))?;
        let s = self
            .vertex(source)
            .ok_or_else(|| GraphError::UnknownVertex(source.to_string()))?;
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(EdgeRecord {
            name: name.to_string(),
            range: r,
            source: s,
        });
        self.edge_index.insert(name.to_string(), id);
        self.by_range[r.0 as usize].push(id);
        self.by_source[s.0 as usize].push(id);
        Ok(id)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0 as usize].name
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e.0 as usize].range
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.0 as usize].source
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    /// `vE¹ = r⁻¹(v)`: the edges a path at `v` may continue along.
    pub fn edges_with_range(&self, v: VertexId) -> &[EdgeId] {
        &self.by_range[v.0 as usize]
    }

    /// `E¹v = s⁻¹(v)`.
    pub fn edges_with_source(&self, v: VertexId) -> &[EdgeId] {
        &self.by_source[v.0 as usize]
    }

    /// A source is a vertex `v` with `r⁻¹(v) = ∅`.
    pub fn is_source(&self, v: VertexId) -> bool {
        self.by_range[v.0 as usize].is_empty()
    }

    pub fn sources(&self) -> BTreeSet<VertexId> {
        self.vertices().filter(|&v| self.is_source(v)).collect()
    }

    /// Vertices reachable from `v` by following edges range → source,
    /// including `v` itself.
    pub fn reachable_from(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            for &e in self.edges_with_range(u) {
                let w = self.source(e);
                if !seen.contains(&w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Vertices that admit at least one infinite continuation, i.e. that
    /// reach a cycle. Meaningful for finite graphs.
    pub fn prolongable_vertices(&self) -> BTreeSet<VertexId> {
        let on_cycle: BTreeSet<VertexId> = self
            .find_cycles()
            .iter()
            .flat_map(|c| c.vertices(self))
            .collect();
        self.vertices()
            .filter(|&v| {
                let r = self.reachable_from(v);
                r.iter().any(|u| on_cycle.contains(u))
            })
            .collect()
    }

    /// All simple cycles, each in canonical rotation (lexicographically least
    /// edge name first). A cycle is a nonempty edge sequence with
    /// `r(α) = s(α)` and pairwise distinct sources.
    pub fn find_cycles(&self) -> Vec<Cycle> {
        let mut out = Vec::new();
        let n = self.vertex_count();
        for start in 0..n as u32 {
            let start = VertexId(start);
            // Cycles whose least vertex id is `start`.
            let mut path: Vec<EdgeId> = Vec::new();
            let mut visited: BTreeSet<VertexId> = BTreeSet::new();
            self.cycle_dfs(start, start, &mut path, &mut visited, &mut out);
        }
        out.sort_by(|a, b| self.cycle_key(a).cmp(&self.cycle_key(b)));
        out.dedup();
        out
    }

    fn cycle_dfs(
        &self,
        start: VertexId,
        at: VertexId,
        path: &mut Vec<EdgeId>,
        visited: &mut BTreeSet<VertexId>,
        out: &mut Vec<Cycle>,
    ) {
        for &e in self.edges_with_range(at) {
            let next = self.source(e);
            if next == start && !path.is_empty() || next == start && path.is_empty() {
                // Closing edge (this also covers self-loops).
                path.push(e);
                out.push(Cycle::canonical(self, path.clone()));
                path.pop();
                continue;
            }
            if next < start || visited.contains(&next) {
                continue;
            }
            visited.insert(next);
            path.push(e);
            self.cycle_dfs(start, next, path, visited, out);
            path.pop();
            visited.remove(&next);
        }
    }

    fn cycle_key(&self, c: &Cycle) -> Vec<String> {
        c.edges.iter().map(|&e| self.edge_name(e).to_string()).collect()
    }

    /// Entries to `cycle`: edges `f` with `r(f) = r(αᵢ)` for some `i` and
    /// `f ≠ αᵢ`.
    pub fn cycle_entries(&self, cycle: &Cycle) -> BTreeSet<EdgeId> {
        let mut out = BTreeSet::new();
        for &a in &cycle.edges {
            for &f in self.edges_with_range(self.range(a)) {
                if f != a {
                    out.insert(f);
                }
            }
        }
        out
    }

    /// All splitting pairs `{f, g}` (`s(f) = s(g)`, `f ≠ g`) among `allowed`
    /// edges; pairs are reported with the lexicographically smaller edge first.
    pub fn splitting_pairs_in(&self, allowed: &BTreeSet<EdgeId>) -> BTreeSet<(EdgeId, EdgeId)> {
        let mut by_src: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &e in allowed {
            by_src.entry(self.source(e)).or_default().push(e);
        }
        let mut out = BTreeSet::new();
        for (_, es) in by_src {
            for i in 0..es.len() {
                for j in (i + 1)..es.len() {
                    out.insert((es[i].min(es[j]), es[i].max(es[j])));
                }
            }
        }
        out
    }

    pub fn all_edges_set(&self) -> BTreeSet<EdgeId> {
        self.edge_ids().collect()
    }

    /// Edge set of the restricted subgraph `E|_{VE^{≤∞}}`: edges whose range
    /// is reachable from some vertex of `v_set`.
    pub fn restriction_to_boundary_cone(&self, v_set: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
        let mut reach = BTreeSet::new();
        for &v in v_set {
            reach.extend(self.reachable_from(v));
        }
        self.edge_ids()
            .filter(|&e| reach.contains(&self.range(e)))
            .collect()
    }

    /// Edge set of `E|_{VE^∞}`: edges on infinite paths with range in `v_set`.
    /// Exact on finite graphs.
    pub fn restriction_to_infinite_cone(&self, v_set: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
        let prolongable = self.prolongable_vertices();
        let mut reach = BTreeSet::new();
        for &v in v_set {
            reach.extend(self.reachable_from(v));
        }
        self.edge_ids()
            .filter(|&e| reach.contains(&self.range(e)) && prolongable.contains(&self.source(e)))
            .collect()
    }
}

/// A simple cycle in canonical rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    pub edges: Vec<EdgeId>,
}

impl Cycle {
    /// Rotates so the lexicographically least edge name comes first.
    pub fn canonical(graph: &DirectedGraph, edges: Vec<EdgeId>) -> Cycle {
        assert!(!edges.is_empty());
        let least = (0..edges.len())
            .min_by_key(|&i| graph.edge_name(edges[i]))
            .unwrap();
        let mut rotated = Vec::with_capacity(edges.len());
        for i in 0..edges.len() {
            rotated.push(edges[(least + i) % edges.len()]);
        }
        Cycle { edges: rotated }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The vertices `r(α₁), r(α₂), …` visited by the cycle.
    pub fn vertices(&self, graph: &DirectedGraph) -> Vec<VertexId> {
        self.edges.iter().map(|&e| graph.range(e)).collect()
    }

    pub fn range(&self, graph: &DirectedGraph) -> VertexId {
        graph.range(self.edges[0])
    }

    pub fn names(&self, graph: &DirectedGraph) -> Vec<String> {
        self.edges.iter().map(|&e| graph.edge_name(e).to_string()).collect()
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

/// One finding of `validate`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DuplicateVertex { name: String },
    DuplicateEdge { name: String },
    DanglingRange { edge: String, vertex: String },
    DanglingSource { edge: String, vertex: String },
    RowFiniteViolation { vertex: String, in_degree: usize, bound: usize },
    StageInstability { vertex: String, stage: usize, detail: String },
    FrontierOutsideStage { vertex: String, stage: usize },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Raw graph data as found in documents, validated before a
/// `DirectedGraph` is built.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeDoc {
    pub id: String,
    pub r: String,
    pub s: String,
}

impl GraphDoc {
    /// Checks dangling endpoints, duplicate ids and (vacuously on finite
    /// data) row-finiteness; all findings are reported, none abort.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut seen_v = BTreeSet::new();
        for v in &self.vertices {
            if !seen_v.insert(v.clone()) {
                report.findings.push(Finding::DuplicateVertex { name: v.clone() });
            }
        }
        let mut seen_e = BTreeSet::new();
        for e in &self.edges {
            if !seen_e.insert(e.id.clone()) {
                report.findings.push(Finding::DuplicateEdge { name: e.id.clone() });
            }
            if !seen_v.contains(&e.r) {
                report.findings.push(Finding::DanglingRange {
                    edge: e.id.clone(),
                    vertex: e.r.clone(),
                });
            }
            if !seen_v.contains(&e.s) {
                report.findings.push(Finding::DanglingSource {
                    edge: e.id.clone(),
                    vertex: e.s.clone(),
                });
            }
        }
        report
    }

    pub fn build(&self) -> Result<DirectedGraph, GraphError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(GraphError::InvalidDocument(format!(
                "{} finding(s), first: {:?}",
                report.findings.len(),
                report.findings[0]
            )));
        }
        let mut g = DirectedGraph::new(GraphKind::Finite);
        for v in &self.vertices {
            g.add_vertex(v)?;
        }
        for e in &self.edges {
            g.add_edge(&e.id, &e.r, &e.s)?;
        }
        Ok(g)
    }

    pub fn from_graph(g: &DirectedGraph) -> GraphDoc {
        GraphDoc {
            vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
            edges: g
                .edge_ids()
                .map(|e| EdgeDoc {
                    id: g.edge_name(e).to_string(),
                    r: g.vertex_name(g.range(e)).to_string(),
                    s: g.vertex_name(g.source(e)).to_string(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn loop_plus_edge() -> DirectedGraph {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("u").unwrap();
        g.add_vertex("v").unwrap();
        g.add_edge("g", "u", "u").unwrap();
        g.add_edge("f", "u", "v").unwrap();
        g
    }

    #[test]
    fn sources_of_loop_plus_edge() {
        let g = loop_plus_edge();
        let s = g.sources();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&g.vertex("v").unwrap()));
    }

    #[test]
    fn single_loop_has_no_sources() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("u").unwrap();
        g.add_edge("g", "u", "u").unwrap();
        assert!(g.sources().is_empty());
        let cycles = g.find_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].names(&g), vec!["g"]);
    }

    #[test]
    fn empty_graph_is_valid() {
        let doc = GraphDoc { vertices: vec![], edges: vec![] };
        assert!(doc.validate().is_valid());
    }

    #[test]
    fn dangling_edge_is_reported_by_name() {
        let doc = GraphDoc {
            vertices: vec!["u".into()],
            edges: vec![EdgeDoc { id: "e".into(), r: "u".into(), s: "w".into() }],
        };
        let report = doc.validate();
        assert!(!report.is_valid());
        assert!(matches!(
            &report.findings[0],
            Finding::DanglingSource { edge, vertex } if edge == "e" && vertex == "w"
        ));
    }

    #[test]
    fn entries_of_loop() {
        let g = loop_plus_edge();
        let cycles = g.find_cycles();
        assert_eq!(cycles.len(), 1);
        let entries = g.cycle_entries(&cycles[0]);
        assert_eq!(entries.len(), 1);
        assert!(entries.contains(&g.edge("f").unwrap()));
    }

    #[test]
    fn isolated_loop_has_no_entries() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("u").unwrap();
        g.add_edge("g", "u", "u").unwrap();
        let cycles = g.find_cycles();
        assert!(g.cycle_entries(&cycles[0]).is_empty());
    }

    #[test]
    fn entries_never_lie_on_their_cycle() {
        // 2-cycle with one extra edge entering it.
        let mut g = DirectedGraph::new(GraphKind::Finite);
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge("p", "a", "b").unwrap();
        g.add_edge("q", "b", "a").unwrap();
        g.add_edge("h", "a", "c").unwrap();
        for c in g.find_cycles() {
            let entries = g.cycle_entries(&c);
            for e in &c.edges {
                assert!(!entries.contains(e));
            }
        }
    }

    #[test]
    fn parallel_loops_are_distinct_cycles() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("u").unwrap();
        g.add_edge("a", "u", "u").unwrap();
        g.add_edge("b", "u", "u").unwrap();
        let cycles = g.find_cycles();
        assert_eq!(cycles.len(), 2);
    }

    #[test]
    fn two_cycle_found_once_in_canonical_rotation() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("q", "a", "b").unwrap();
        g.add_edge("p", "b", "a").unwrap();
        let cycles = g.find_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].names(&g), vec!["p", "q"]);
    }
}

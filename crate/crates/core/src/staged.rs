//! Staged (finitely presented infinite) row-finite graphs.
//!
//! A staged graph is unrolled from a column template: a set of tracks (one
//! vertex per column), edge templates instantiated at every column (or every
//! `period`-th column), optional hair chains hanging off a track, and a
//! finite sporadic part. `stage(N)` materializes columns `0..=N` and hair
//! depth `N` as an ordinary finite graph.
//!
//! All infinite-graph queries are stabilizing computations: they run on
//! `stage(N)` for growing `N` and an answer is certified only when it is
//! either determined by a frontier-free region or covered by the family's
//! declared column-periodicity contract. Everything else is reported as
//! unknown rather than guessed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{DirectedGraph, EdgeId, Finding, GraphKind, ValidationReport, VertexId};
use crate::paths::{AnchorRef, FinitePath, InfinitePath, RayResolver};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TrackSpec {
    pub id: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EndpointSpec {
    pub track: String,
    pub offset: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TemplateSpec {
    pub id: String,
    pub r: EndpointSpec,
    pub s: EndpointSpec,
    #[serde(default)]
    pub phase: usize,
    #[serde(default = "one")]
    pub period: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HairSpec {
    pub attach_track: String,
    #[serde(default = "tru")]
    pub chain: bool,
}

fn tru() -> bool {
    true
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SporadicSpec {
    #[serde(default)]
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<SporadicEdge>,
}

/// Endpoints reference sporadic vertices by id or track vertices as
/// `track@col`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SporadicEdge {
    pub id: String,
    pub r: String,
    pub s: String,
}

/// Declared behaviour the family promises beyond any finite stage; verified
/// empirically on every stage the library touches.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FamilyContracts {
    /// Column quantities repeat with this period beyond `onset`.
    pub column_period: usize,
    pub onset: usize,
    /// Every infinite tail eventually follows a declared anchor ray.
    pub anchor_complete: bool,
}

impl Default for FamilyContracts {
    fn default() -> Self {
        FamilyContracts { column_period: 1, onset: 0, anchor_complete: false }
    }
}

/// Column-template presentation of a staged graph.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StagedDoc {
    pub tracks: Vec<TrackSpec>,
    pub templates: Vec<TemplateSpec>,
    #[serde(default)]
    pub hairs: Vec<HairSpec>,
    #[serde(default)]
    pub sporadic: SporadicSpec,
    #[serde(default)]
    pub contracts: Option<FamilyContracts>,
}

#[derive(Clone, Debug)]
pub struct StagedDigraph {
    pub name: String,
    doc: StagedDoc,
    contracts: FamilyContracts,
    /// Index of a ray-forming horizontal template per track, if any.
    ray_template: Vec<Option<usize>>,
    hair_tracks: Vec<usize>,
}

impl StagedDigraph {
    pub fn from_doc(name: &str, doc: StagedDoc) -> Result<StagedDigraph, GraphError> {
        let track_index: BTreeMap<&str, usize> = doc
            .tracks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        if track_index.len() != doc.tracks.len() {
            return Err(GraphError::InvalidDocument("duplicate track id".into()));
        }
        let mut ray_template = vec![None; doc.tracks.len()];
        for (i, t) in doc.templates.iter().enumerate() {
            let rt = *track_index
                .get(t.r.track.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(t.r.track.clone()))?;
            let st = *track_index
                .get(t.s.track.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(t.s.track.clone()))?;
            if t.period == 0 {
                return Err(GraphError::InvalidDocument(format!("template {} has period 0", t.id)));
            }
            if rt == st && t.r.offset == 0 && t.s.offset == 1 && t.period == 1 {
                if ray_template[rt].is_some() {
                    return Err(GraphError::InvalidDocument(format!(
                        "track {} has two horizontal templates",
                        doc.tracks[rt].id
                    )));
                }
                ray_template[rt] = Some(i);
            }
        }
        let mut hair_tracks = Vec::new();
        for h in &doc.hairs {
            let t = *track_index
                .get(h.attach_track.as_str())
                .ok_or_else(|| GraphError::UnknownVertex(h.attach_track.clone()))?;
            if !h.chain {
                return Err(GraphError::InvalidDocument("only chain hairs are supported".into()));
            }
            hair_tracks.push(t);
        }
        let period = doc
            .templates
            .iter()
            .fold(1usize, |acc, t| lcm(acc, t.period));
        let contracts = doc.contracts.clone().unwrap_or(FamilyContracts {
            column_period: period,
            onset: 0,
            anchor_complete: false,
        });
        Ok(StagedDigraph { name: name.to_string(), doc, contracts, ray_template, hair_tracks })
    }

    pub fn doc(&self) -> &StagedDoc {
        &self.doc
    }

    pub fn contracts(&self) -> &FamilyContracts {
        &self.contracts
    }

    pub fn track_count(&self) -> usize {
        self.doc.tracks.len()
    }

    pub fn track_id(&self, t: usize) -> &str {
        &self.doc.tracks[t].id
    }

    pub fn track_index(&self, id: &str) -> Option<usize> {
        self.doc.tracks.iter().position(|t| t.id == id)
    }

    pub fn track_vertex_name(&self, t: usize, col: usize) -> String {
        format!("{}{}", self.doc.tracks[t].id, col)
    }

    fn hair_vertex_name(&self, t: usize, col: usize, depth: usize) -> String {
        assert!(depth >= 1);
        format!("{}{}.h{}", self.doc.tracks[t].id, col, depth)
    }

    fn hair_edge_name(&self, t: usize, col: usize, depth: usize) -> String {
        format!("{}{}.c{}", self.doc.tracks[t].id, col, depth)
    }

    pub fn template_edge_name(&self, stem: &str, col: usize) -> String {
        format!("{stem}{col}")
    }

    /// Longest column reach of any template, used for frontier width.
    fn span(&self) -> usize {
        let mut span = 1i64;
        for t in &self.doc.templates {
            span = span.max(t.r.offset.abs() + 1).max(t.s.offset.abs() + 1);
            span = span.max(t.period as i64);
        }
        span as usize
    }

    /// Materializes columns `0..=n` (hair depth `n`) as a finite graph.
    pub fn stage(&self, n: usize) -> DirectedGraph {
        self.stage_with_hair_depth(n, n)
    }

    /// A stage with hair chains truncated at `depth`. Hair vertices receive
    /// nothing but their own chain edge, so shallow hairs are exact for
    /// reachability, counting and splitting-pair analysis; the deepest hair
    /// vertex stays on the frontier either way.
    pub fn stage_with_hair_depth(&self, n: usize, depth: usize) -> DirectedGraph {
        let depth = depth.min(n);
        let mut g = DirectedGraph::new(GraphKind::Stage);
        for col in 0..=n {
            for t in 0..self.track_count() {
                g.add_vertex(&self.track_vertex_name(t, col)).expect("fresh");
            }
        }
        for &t in &self.hair_tracks {
            for col in 0..=n {
                for d in 1..=depth {
                    g.add_vertex(&self.hair_vertex_name(t, col, d)).expect("fresh");
                }
            }
        }
        for v in &self.doc.sporadic.vertices {
            g.add_vertex(v).expect("fresh sporadic vertex");
        }
        for t in &self.doc.templates {
            let mut col = t.phase;
            while col <= n {
                let rc = col as i64 + t.r.offset;
                let sc = col as i64 + t.s.offset;
                if rc >= 0 && sc >= 0 && rc <= n as i64 && sc <= n as i64 {
                    let rt = self.track_index(&t.r.track).unwrap();
                    let st = self.track_index(&t.s.track).unwrap();
                    g.add_edge(
                        &self.template_edge_name(&t.id, col),
                        &self.track_vertex_name(rt, rc as usize),
                        &self.track_vertex_name(st, sc as usize),
                    )
                    .expect("fresh template edge");
                }
                col += t.period;
            }
        }
        for &t in &self.hair_tracks {
            for col in 0..=n {
                for d in 0..depth {
                    let range = if d == 0 {
                        self.track_vertex_name(t, col)
                    } else {
                        self.hair_vertex_name(t, col, d)
                    };
                    g.add_edge(
                        &self.hair_edge_name(t, col, d),
                        &range,
                        &self.hair_vertex_name(t, col, d + 1),
                    )
                    .expect("fresh hair edge");
                }
            }
        }
        for e in &self.doc.sporadic.edges {
            let r = self.resolve_sporadic_endpoint(&e.r);
            let s = self.resolve_sporadic_endpoint(&e.s);
            g.add_edge(&e.id, &r, &s).expect("fresh sporadic edge");
        }
        g
    }

    fn resolve_sporadic_endpoint(&self, spec: &str) -> String {
        match spec.split_once('@') {
            Some((track, col)) => {
                let t = self.track_index(track).expect("sporadic track");
                self.track_vertex_name(t, col.parse().expect("sporadic column"))
            }
            None => spec.to_string(),
        }
    }

    /// Vertex names of `stage(n)` whose in-edge set may still change in
    /// later stages.
    pub fn frontier(&self, n: usize) -> BTreeSet<String> {
        self.frontier_with_hair_depth(n, n)
    }

    pub fn frontier_with_hair_depth(&self, n: usize, depth: usize) -> BTreeSet<String> {
        let depth = depth.min(n);
        let span = self.span();
        let mut out = BTreeSet::new();
        let first_frontier = if n >= span { n - span + 1 } else { 0 };
        for col in first_frontier..=n {
            for t in 0..self.track_count() {
                out.insert(self.track_vertex_name(t, col));
            }
        }
        for &t in &self.hair_tracks {
            for col in 0..=n {
                if depth >= 1 {
                    out.insert(self.hair_vertex_name(t, col, depth));
                }
            }
        }
        out
    }

    pub fn is_interior(&self, n: usize, vertex: &str) -> bool {
        !self.frontier(n).contains(vertex)
    }

    /// Declared anchors: one per ray track, one per hair attachment point.
    /// Hair anchors are enumerated up to the given column budget.
    pub fn anchors(&self, col_budget: usize) -> Vec<AnchorRef> {
        let mut out = Vec::new();
        for t in 0..self.track_count() {
            if self.ray_template[t].is_some() {
                out.push(AnchorRef::Track { track: t as u32 });
            }
        }
        for &t in &self.hair_tracks {
            for col in 0..=col_budget {
                out.push(AnchorRef::Hair { track: t as u32, col: col as u32 });
            }
        }
        out
    }

    pub fn anchor_name(&self, a: AnchorRef) -> String {
        match a {
            AnchorRef::Track { track } => format!("@{}", self.track_id(track as usize)),
            AnchorRef::Hair { track, col } => {
                format!("@{}:{}", self.track_id(track as usize), col)
            }
        }
    }

    pub fn parse_anchor(&self, s: &str) -> Result<AnchorRef, GraphError> {
        let body = s.strip_prefix('@').unwrap_or(s);
        match body.split_once(':') {
            None => {
                let t = self
                    .track_index(body)
                    .ok_or_else(|| GraphError::UnknownAnchor(s.to_string()))?;
                if self.ray_template[t].is_none() {
                    return Err(GraphError::UnknownAnchor(format!("{s}: track has no ray")));
                }
                Ok(AnchorRef::Track { track: t as u32 })
            }
            Some((track, col)) => {
                let t = self
                    .track_index(track)
                    .ok_or_else(|| GraphError::UnknownAnchor(s.to_string()))?;
                if !self.hair_tracks.contains(&t) {
                    return Err(GraphError::UnknownAnchor(format!("{s}: track has no hair")));
                }
                let col: usize = col
                    .parse()
                    .map_err(|_| GraphError::UnknownAnchor(s.to_string()))?;
                Ok(AnchorRef::Hair { track: t as u32, col: col as u32 })
            }
        }
    }

    /// A declared anchor is a deterministic-tail port when every ray vertex
    /// receives exactly the previous ray edge (`|vE¹| = 1` hereditarily),
    /// checked on the interior of the given stage.
    pub fn anchor_is_deterministic(&self, a: AnchorRef, stage: &DirectedGraph, window: usize) -> bool {
        for i in 0..window {
            let vname = self.ray_vertex(a, i);
            let v = match stage.vertex(&vname) {
                Some(v) => v,
                None => return true, // beyond stage; earlier prefix decided
            };
            let ins = stage.edges_with_range(v);
            let expect = self.ray_edge(a, i);
            if ins.len() != 1 || stage.edge_name(ins[0]) != expect {
                return false;
            }
        }
        true
    }

    /// Checks the staged-graph contracts on small stages: monotone growth,
    /// interior stability, frontier containment, and ray validity.
    pub fn validate(&self, n: usize) -> ValidationReport {
        let mut report = ValidationReport::default();
        let a = self.stage(n);
        let b = self.stage(n + 1);
        for v in a.vertices() {
            let name = a.vertex_name(v);
            if b.vertex(name).is_none() {
                report.findings.push(Finding::StageInstability {
                    vertex: name.to_string(),
                    stage: n,
                    detail: "vertex missing from the next stage".into(),
                });
            }
        }
        for e in a.edge_ids() {
            let name = a.edge_name(e);
            match b.edge(name) {
                None => report.findings.push(Finding::StageInstability {
                    vertex: name.to_string(),
                    stage: n,
                    detail: "edge missing from the next stage".into(),
                }),
                Some(e2) => {
                    if b.vertex_name(b.range(e2)) != a.vertex_name(a.range(e))
                        || b.vertex_name(b.source(e2)) != a.vertex_name(a.source(e))
                    {
                        report.findings.push(Finding::StageInstability {
                            vertex: name.to_string(),
                            stage: n,
                            detail: "edge endpoints changed between stages".into(),
                        });
                    }
                }
            }
        }
        let frontier = self.frontier(n);
        for f in &frontier {
            if a.vertex(f).is_none() {
                report.findings.push(Finding::FrontierOutsideStage {
                    vertex: f.clone(),
                    stage: n,
                });
            }
        }
        // Interior in-edge stability.
        for v in a.vertices() {
            let name = a.vertex_name(v);
            if frontier.contains(name) {
                continue;
            }
            let in_a: BTreeSet<&str> = a
                .edges_with_range(v)
                .iter()
                .map(|&e| a.edge_name(e))
                .collect();
            let v2 = b.vertex(name).expect("monotone");
            let in_b: BTreeSet<&str> = b
                .edges_with_range(v2)
                .iter()
                .map(|&e| b.edge_name(e))
                .collect();
            if in_a != in_b {
                report.findings.push(Finding::StageInstability {
                    vertex: name.to_string(),
                    stage: n,
                    detail: format!("interior in-edges changed: {in_a:?} vs {in_b:?}"),
                });
            }
        }
        // Row-finiteness per stage (bounded by template count; reported if
        // a vertex exceeds a generous template-derived bound).
        let bound = self.doc.templates.len() + self.doc.sporadic.edges.len() + 1;
        for v in a.vertices() {
            let d = a.edges_with_range(v).len();
            if d > bound {
                report.findings.push(Finding::RowFiniteViolation {
                    vertex: a.vertex_name(v).to_string(),
                    in_degree: d,
                    bound,
                });
            }
        }
        report
    }

    /// Builds a tail-anchored infinite path in normal form.
    pub fn anchored_path(&self, head: FinitePath, anchor: AnchorRef, offset: usize) -> InfinitePath {
        InfinitePath::anchored(self, head, anchor, offset)
    }

    /// The ray-anchored path with empty head starting at `offset`.
    pub fn ray_path(&self, anchor: AnchorRef, offset: usize) -> InfinitePath {
        self.anchored_path(FinitePath::vertex(&self.ray_vertex(anchor, offset)), anchor, offset)
    }

    /// Do the declared anchors pairwise eventually part ways on this stage?
    /// Rays are also required to repeat no edge.
    pub fn verify_rays(&self, stage: &DirectedGraph, window: usize) -> Result<(), GraphError> {
        let anchors = self.anchors(window);
        for &a in &anchors {
            let mut seen = BTreeSet::new();
            for i in 0..window {
                let e = self.ray_edge(a, i);
                if stage.edge(&e).is_none() {
                    break;
                }
                if !seen.insert(e.clone()) {
                    return Err(GraphError::InvalidPath(format!(
                        "ray {} repeats edge {e}",
                        self.anchor_name(a)
                    )));
                }
                let ray_v = self.ray_vertex(a, i);
                let edge = stage.edge(&e).unwrap();
                if stage.vertex_name(stage.range(edge)) != ray_v {
                    return Err(GraphError::InvalidPath(format!(
                        "ray {} edge {e} does not start at {ray_v}",
                        self.anchor_name(a)
                    )));
                }
            }
        }
        for i in 0..anchors.len() {
            for j in (i + 1)..anchors.len() {
                let (a, b) = (anchors[i], anchors[j]);
                let ea: BTreeSet<String> = (2..window).map(|t| self.ray_edge(a, t)).collect();
                let eb: BTreeSet<String> = (2..window).map(|t| self.ray_edge(b, t)).collect();
                if !ea.is_disjoint(&eb) {
                    return Err(GraphError::InvalidPath(format!(
                        "rays {} and {} share a tail edge",
                        self.anchor_name(a),
                        self.anchor_name(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl RayResolver for StagedDigraph {
    fn ray_vertex(&self, anchor: AnchorRef, i: usize) -> String {
        match anchor {
            AnchorRef::Track { track } => self.track_vertex_name(track as usize, i),
            AnchorRef::Hair { track, col } => {
                if i == 0 {
                    self.track_vertex_name(track as usize, col as usize)
                } else {
                    self.hair_vertex_name(track as usize, col as usize, i)
                }
            }
        }
    }

    fn ray_edge(&self, anchor: AnchorRef, i: usize) -> String {
        match anchor {
            AnchorRef::Track { track } => {
                let tmpl = self.ray_template[track as usize].expect("ray track");
                self.template_edge_name(&self.doc.templates[tmpl].id, i)
            }
            AnchorRef::Hair { track, col } => {
                self.hair_edge_name(track as usize, col as usize, i)
            }
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A path-count that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn as_finite(&self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(*n),
            Count::Infinite => None,
        }
    }
}

/// Number of finite paths from `from` to `to` (range → source traversal),
/// counting the empty path when `from == to`, and excluding paths whose last
/// edge is `forbidden_last`. Infinite when a directed cycle lies on some
/// such path.
pub fn count_paths(
    g: &DirectedGraph,
    from: VertexId,
    to: VertexId,
    forbidden_last: Option<EdgeId>,
) -> Count {
    // Vertices that can occur on a from→to path.
    let reach = g.reachable_from(from);
    let mut co = BTreeSet::new();
    let mut stack = vec![to];
    while let Some(u) = stack.pop() {
        if !co.insert(u) {
            continue;
        }
        for &e in g.edges_with_source(u) {
            let w = g.range(e);
            if !co.contains(&w) {
                stack.push(w);
            }
        }
    }
    let on_path: BTreeSet<VertexId> = reach.intersection(&co).copied().collect();
    if on_path.is_empty() {
        return Count::Finite(0);
    }
    // Any cycle inside the on-path region pumps.
    if region_has_cycle(g, &on_path) {
        return Count::Infinite;
    }
    // DAG count by memoized DFS: ways(u) = number of paths u → to.
    let mut memo: BTreeMap<VertexId, u64> = BTreeMap::new();
    let total_to = ways(g, from, to, &on_path, &mut memo);
    // Correct for the forbidden last edge: subtract paths ending with it.
    match forbidden_last {
        None => Count::Finite(total_to),
        Some(e) => {
            if g.source(e) != to || !on_path.contains(&g.range(e)) {
                return Count::Finite(total_to);
            }
            let mut memo2: BTreeMap<VertexId, u64> = BTreeMap::new();
            let via = ways(g, from, g.range(e), &on_path, &mut memo2);
            Count::Finite(total_to.saturating_sub(via))
        }
    }
}

fn region_has_cycle(g: &DirectedGraph, region: &BTreeSet<VertexId>) -> bool {
    // Iterative three-colour DFS over the traversal digraph restricted to
    // `region`.
    let mut state: BTreeMap<VertexId, u8> = BTreeMap::new();
    for &start in region {
        if state.contains_key(&start) {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state.insert(start, 1);
        while let Some(&mut (u, ref mut idx)) = stack.last_mut() {
            let outs = g.edges_with_range(u);
            if *idx < outs.len() {
                let e = outs[*idx];
                *idx += 1;
                let w = g.source(e);
                if !region.contains(&w) {
                    continue;
                }
                match state.get(&w) {
                    None => {
                        state.insert(w, 1);
                        stack.push((w, 0));
                    }
                    Some(1) => return true,
                    _ => {}
                }
            } else {
                state.insert(u, 2);
                stack.pop();
            }
        }
    }
    false
}

fn ways(
    g: &DirectedGraph,
    at: VertexId,
    to: VertexId,
    region: &BTreeSet<VertexId>,
    memo: &mut BTreeMap<VertexId, u64>,
) -> u64 {
    if at == to {
        // The empty path, plus any loop back is impossible in a DAG region.
        return 1;
    }
    if let Some(&w) = memo.get(&at) {
        return w;
    }
    let mut total: u64 = 0;
    for &e in g.edges_with_range(at) {
        let next = g.source(e);
        if region.contains(&next) {
            total = total.saturating_add(ways(g, next, to, region, memo));
        }
    }
    memo.insert(at, total);
    total
}

/// The tail class an infinite (or source-terminated finite) path belongs to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TailClass {
    Cycle(Vec<String>),
    Anchor(AnchorRef),
    SourceVertex(String),
}

impl TailClass {
    pub fn of(path: &InfinitePath) -> TailClass {
        match path {
            InfinitePath::Up { cycle, .. } => TailClass::Cycle(cycle.clone()),
            InfinitePath::Anchored { anchor, .. } => TailClass::Anchor(*anchor),
        }
    }
}

/// Counts the paths with range `from` that are shift equivalent to the given
/// tail class, evaluated on one finite graph (a stage or a finite graph).
/// Join points beyond the stage are invisible; see `stabilized_class_count`.
pub fn count_into_class_on(
    g: &DirectedGraph,
    resolver: &dyn DynRay,
    from: VertexId,
    class: &TailClass,
) -> Count {
    match class {
        TailClass::SourceVertex(w) => match g.vertex(w) {
            None => Count::Finite(0),
            Some(w) => count_paths(g, from, w, None),
        },
        TailClass::Cycle(cycle) => {
            let mut total: u64 = 0;
            for i in 0..cycle.len() {
                let e = match g.edge(&cycle[i]) {
                    Some(e) => e,
                    None => return Count::Finite(0),
                };
                let join = g.range(e);
                let entering = g.edge(&cycle[(i + cycle.len() - 1) % cycle.len()]).unwrap();
                match count_paths(g, from, join, Some(entering)) {
                    Count::Infinite => return Count::Infinite,
                    Count::Finite(k) => total = total.saturating_add(k),
                }
            }
            Count::Finite(total)
        }
        TailClass::Anchor(a) => {
            let mut total: u64 = 0;
            let mut j = 0usize;
            loop {
                let vname = resolver.ray_vertex_dyn(*a, j);
                let join = match g.vertex(&vname) {
                    Some(v) => v,
                    None => break,
                };
                let forbidden = if j == 0 {
                    None
                } else {
                    g.edge(&resolver.ray_edge_dyn(*a, j - 1))
                };
                match count_paths(g, from, join, forbidden) {
                    Count::Infinite => return Count::Infinite,
                    Count::Finite(k) => total = total.saturating_add(k),
                }
                j += 1;
            }
            Count::Finite(total)
        }
    }
}

/// Object-safe ray access so counting can run over both staged graphs and
/// finite graphs (which have no rays).
pub trait DynRay {
    fn ray_vertex_dyn(&self, a: AnchorRef, i: usize) -> String;
    fn ray_edge_dyn(&self, a: AnchorRef, i: usize) -> String;
}

impl DynRay for StagedDigraph {
    fn ray_vertex_dyn(&self, a: AnchorRef, i: usize) -> String {
        self.ray_vertex(a, i)
    }
    fn ray_edge_dyn(&self, a: AnchorRef, i: usize) -> String {
        self.ray_edge(a, i)
    }
}

/// Finite graphs have no rays; any anchor lookup is a logic error.
pub struct NoRayAccess;

impl DynRay for NoRayAccess {
    fn ray_vertex_dyn(&self, _: AnchorRef, _: usize) -> String {
        unreachable!("finite graph has no anchors")
    }
    fn ray_edge_dyn(&self, _: AnchorRef, _: usize) -> String {
        unreachable!("finite graph has no anchors")
    }
}

/// Outcome of a stabilizing computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stabilized<T> {
    Certified(T),
    /// Observed on the evaluated stages but not covered by a contract.
    Empirical(T),
    Unknown { reason: String },
}

impl<T> Stabilized<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Stabilized::Certified(t) | Stabilized::Empirical(t) => Some(t),
            Stabilized::Unknown { .. } => None,
        }
    }
    pub fn is_certified(&self) -> bool {
        matches!(self, Stabilized::Certified(_))
    }
}

/// Three growing probe stages of one family, shared across many stabilizing
/// queries. Hair chains are kept shallow: they receive nothing but their
/// own chain edge, so this is exact for reachability and counting.
pub struct StageProbe<'f> {
    pub family: &'f StagedDigraph,
    pub stages: Vec<(usize, DirectedGraph)>,
}

impl<'f> StageProbe<'f> {
    pub fn new(family: &'f StagedDigraph, budget: usize) -> StageProbe<'f> {
        let p = family.contracts().column_period.max(1);
        let n1 = budget.max(4) + family.contracts().onset;
        let depth = 4;
        let stages = [n1, n1 + p, n1 + 2 * p]
            .into_iter()
            .map(|n| (n, family.stage_with_hair_depth(n, depth)))
            .collect();
        StageProbe { family, stages }
    }

    pub fn base(&self) -> &DirectedGraph {
        &self.stages[0].1
    }

    pub fn base_n(&self) -> usize {
        self.stages[0].0
    }

    /// Certifies a class count by comparing the three probe stages: equal
    /// counts certify a finite value, strict growth certifies divergence.
    pub fn class_count(&self, from_name: &str, class: &TailClass) -> Stabilized<Count> {
        let mut counts = Vec::with_capacity(3);
        for (_, g) in &self.stages {
            match g.vertex(from_name) {
                None => {
                    return Stabilized::Unknown {
                        reason: format!("vertex {from_name} not present at the probe stage"),
                    }
                }
                Some(v) => counts.push(count_into_class_on(g, self.family, v, class)),
            }
        }
        match (counts[0], counts[1], counts[2]) {
            (Count::Infinite, _, _) | (_, Count::Infinite, _) | (_, _, Count::Infinite) => {
                Stabilized::Certified(Count::Infinite)
            }
            (Count::Finite(a), Count::Finite(b), Count::Finite(c)) => {
                if a == b && b == c {
                    Stabilized::Certified(Count::Finite(a))
                } else if a < b && b < c {
                    Stabilized::Certified(Count::Infinite)
                } else if a <= b && b <= c {
                    // Not yet settled; the caller may retry with more budget.
                    Stabilized::Unknown {
                        reason: format!("counts {a},{b},{c} did not stabilize"),
                    }
                } else {
                    Stabilized::Unknown {
                        reason: format!("counts {a},{b},{c} are not monotone; contract violated?"),
                    }
                }
            }
        }
    }
}

/// One-off stabilized count; heavy callers should share a `StageProbe`.
pub fn stabilized_class_count(
    family: &StagedDigraph,
    from_name: &str,
    class: &TailClass,
    budget: usize,
) -> Stabilized<Count> {
    StageProbe::new(family, budget).class_count(from_name, class)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare_ray() -> StagedDigraph {
        StagedDigraph::from_doc(
            "ray",
            StagedDoc {
                tracks: vec![TrackSpec { id: "v".into() }],
                templates: vec![TemplateSpec {
                    id: "e".into(),
                    r: EndpointSpec { track: "v".into(), offset: 0 },
                    s: EndpointSpec { track: "v".into(), offset: 1 },
                    phase: 0,
                    period: 1,
                }],
                hairs: vec![],
                sporadic: SporadicSpec::default(),
                contracts: Some(FamilyContracts {
                    column_period: 1,
                    onset: 0,
                    anchor_complete: true,
                }),
            },
        )
        .unwrap()
    }

    #[test]
    fn stages_are_monotone_and_stable() {
        let f = bare_ray();
        for n in 1..5 {
            assert!(f.validate(n).is_valid(), "stage {n}");
        }
    }

    #[test]
    fn ray_anchor_counts_one() {
        let f = bare_ray();
        let class = TailClass::Anchor(AnchorRef::Track { track: 0 });
        match stabilized_class_count(&f, "v0", &class, 6) {
            Stabilized::Certified(Count::Finite(1)) => {}
            other => panic!("expected certified 1, got {other:?}"),
        }
    }

    #[test]
    fn frontier_is_inside_stage() {
        let f = bare_ray();
        let g = f.stage(5);
        for v in f.frontier(5) {
            assert!(g.vertex(&v).is_some());
        }
    }

    #[test]
    fn deterministic_port_detection() {
        let f = bare_ray();
        let g = f.stage(6);
        assert!(f.anchor_is_deterministic(AnchorRef::Track { track: 0 }, &g, 4));
    }

    #[test]
    fn count_paths_infinite_through_cycle() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_vertex("c").unwrap();
        g.add_edge("in", "a", "b").unwrap();
        g.add_edge("loop", "b", "b").unwrap();
        g.add_edge("out", "b", "c").unwrap();
        assert_eq!(
            count_paths(&g, g.vertex("a").unwrap(), g.vertex("c").unwrap(), None),
            Count::Infinite
        );
        assert_eq!(
            count_paths(&g, g.vertex("c").unwrap(), g.vertex("a").unwrap(), None),
            Count::Finite(0)
        );
    }

    #[test]
    fn count_paths_with_forbidden_last_edge() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        for v in ["a", "b", "c"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge("p", "a", "c").unwrap();
        g.add_edge("q", "a", "b").unwrap();
        g.add_edge("r", "b", "c").unwrap();
        let (a, c) = (g.vertex("a").unwrap(), g.vertex("c").unwrap());
        assert_eq!(count_paths(&g, a, c, None), Count::Finite(2));
        let p = g.edge("p").unwrap();
        assert_eq!(count_paths(&g, a, c, Some(p)), Count::Finite(1));
    }
}

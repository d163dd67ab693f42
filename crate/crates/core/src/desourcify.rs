//! Source-removal constructions: head-adding for directed graphs and the
//! equivalence-class desourcification for row-finite k-graphs.
//!
//! A desourced vertex class is `[x; m]` for a boundary path `x` and offset
//! `m ∈ ℕ^k`; two pairs agree exactly when they share the base vertex
//! `x(m ∧ d(x))` and the excess `m − m ∧ d(x)`, so classes are handled
//! through that canonical key. Morphism classes `[x; (m, n)]` likewise have
//! the key (segment between the clipped offsets, entry excess, degree).
//! Composition follows the representative recipe
//! `z = x(0, n ∧ d(x)) · σ^{p ∧ d(y)}(y)` and is representative independent
//! (property-tested).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::KGraphError;
use crate::graph::{DirectedGraph, GraphKind};
use crate::kgraph::{Degree, KGraph, Morphism};
use crate::kpaths::{boundary_member, morphism_label, KPath};
use crate::kstaged::{KSchema, StagedKGraph};
use crate::staged::{
    EndpointSpec, FamilyContracts, SporadicEdge, SporadicSpec, StagedDigraph, StagedDoc,
    TemplateSpec, TrackSpec,
};

/// Adds an infinite head to every source of a finite directed graph,
/// returning the staged graph whose stage `N` carries chains of length `N`.
pub fn add_heads(graph: &DirectedGraph) -> Result<StagedDigraph, KGraphError> {
    let mut tracks = Vec::new();
    let mut templates = Vec::new();
    let mut sporadic = SporadicSpec {
        vertices: graph.vertices().map(|v| graph.vertex_name(v).to_string()).collect(),
        edges: graph
            .edge_ids()
            .map(|e| SporadicEdge {
                id: graph.edge_name(e).to_string(),
                r: graph.vertex_name(graph.range(e)).to_string(),
                s: graph.vertex_name(graph.source(e)).to_string(),
            })
            .collect(),
    };
    for w in graph.sources() {
        let wname = graph.vertex_name(w);
        let track = format!("h.{wname}");
        tracks.push(TrackSpec { id: track.clone() });
        templates.push(TemplateSpec {
            id: format!("{track}.e"),
            r: EndpointSpec { track: track.clone(), offset: 0 },
            s: EndpointSpec { track: track.clone(), offset: 1 },
            phase: 0,
            period: 1,
        });
        sporadic.edges.push(SporadicEdge {
            id: format!("{track}.in"),
            r: wname.to_string(),
            s: format!("{track}@0"),
        });
    }
    if tracks.is_empty() {
        // Sourceless input: a staged presentation with no head tracks; keep
        // one dummy track so stages are well-formed, unattached to anything.
        tracks.push(TrackSpec { id: "h._unused".into() });
        templates.push(TemplateSpec {
            id: "h._unused.e".into(),
            r: EndpointSpec { track: "h._unused".into(), offset: 0 },
            s: EndpointSpec { track: "h._unused".into(), offset: 1 },
            phase: 0,
            period: 1,
        });
    }
    StagedDigraph::from_doc(
        "add-heads",
        StagedDoc {
            tracks,
            templates,
            hairs: vec![],
            sporadic,
            contracts: Some(FamilyContracts { column_period: 1, onset: 0, anchor_complete: true }),
        },
    )
    .map_err(|e| KGraphError::Invalid(e.to_string()))
}

/// Extended degree in `(ℕ ∪ ∞)^k`, `None` being ∞.
pub type ExtDeg = Vec<Option<u64>>;

fn meet(m: &Degree, d: &ExtDeg) -> Degree {
    Degree(
        m.0.iter()
            .zip(d)
            .map(|(mi, di)| match di {
                None => *mi,
                Some(fin) => (*mi as u64).min(*fin) as u32,
            })
            .collect(),
    )
}

/// A boundary path in a desourcification context: a plain representable
/// path for a finite k-graph, or a finite head composed onto a closed-form
/// schema for a parametric one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BPath {
    Fin(KPath),
    Sch { head: Morphism, tail: KSchema },
}

/// Where desourcification happens: a finite k-graph with a search budget,
/// or a parametric k-graph evaluated on one of its stages.
pub enum BoundaryCtx<'a> {
    Finite { kg: &'a KGraph, budget: u32 },
    Staged { family: &'a StagedKGraph, stage: KGraph, window: u32 },
}

impl<'a> BoundaryCtx<'a> {
    pub fn finite(kg: &'a KGraph, budget: u32) -> BoundaryCtx<'a> {
        BoundaryCtx::Finite { kg, budget }
    }

    pub fn staged(family: &'a StagedKGraph, window: u32) -> BoundaryCtx<'a> {
        BoundaryCtx::Staged { family, stage: family.stage(window + 4), window }
    }

    pub fn kg(&self) -> &KGraph {
        match self {
            BoundaryCtx::Finite { kg, .. } => kg,
            BoundaryCtx::Staged { stage, .. } => stage,
        }
    }

    pub fn k(&self) -> usize {
        self.kg().k
    }

    pub fn degree(&self, x: &BPath) -> ExtDeg {
        match x {
            BPath::Fin(p) => {
                let d = p.degree(self.kg());
                d.0.iter().map(|c| c.map(|v| v as u64)).collect()
            }
            BPath::Sch { head, tail } => {
                let (kg, family) = match self {
                    BoundaryCtx::Staged { family, stage, .. } => (stage, family),
                    _ => unreachable!("schema path in a finite context"),
                };
                let dh = kg.degree(head);
                family
                    .schema_degree(tail)
                    .iter()
                    .zip(&dh.0)
                    .map(|(t, h)| t.map(|v| v + *h as u64))
                    .collect()
            }
        }
    }

    pub fn segment(&self, x: &BPath, p: &Degree, q: &Degree) -> Result<Morphism, KGraphError> {
        match x {
            BPath::Fin(path) => path.segment(self.kg(), p, q),
            BPath::Sch { head, tail } => {
                let (kg, family) = match self {
                    BoundaryCtx::Staged { family, stage, .. } => (stage, family),
                    _ => unreachable!(),
                };
                let dh = kg.degree(head);
                let need = Degree(
                    q.0.iter().zip(&dh.0).map(|(qi, hi)| qi.saturating_sub(*hi)).collect(),
                );
                let tail_part = family.schema_segment(kg, tail, &need)?;
                let unrolled = kg.compose(head, &tail_part)?;
                kg.segment(&unrolled, p, q)
            }
        }
    }

    pub fn vertex_at(&self, x: &BPath, p: &Degree) -> Result<String, KGraphError> {
        Ok(morphism_label(self.kg(), &self.segment(x, p, p)?))
    }

    pub fn sigma(&self, x: &BPath, p: &Degree) -> Result<BPath, KGraphError> {
        match x {
            BPath::Fin(path) => Ok(BPath::Fin(path.sigma(self.kg(), p)?)),
            BPath::Sch { head, tail } => {
                let (kg, family) = match self {
                    BoundaryCtx::Staged { family, stage, .. } => (stage, family),
                    _ => unreachable!(),
                };
                let dh = kg.degree(head);
                let into_tail = Degree(
                    p.0.iter().zip(&dh.0).map(|(pi, hi)| pi.saturating_sub(*hi)).collect(),
                );
                let tail_part = family.schema_segment(kg, tail, &into_tail)?;
                let unrolled = kg.compose(head, &tail_part)?;
                let (_, new_head) = kg.factorize(&unrolled, p)?;
                let new_tail = family
                    .schema_sigma(tail, &into_tail.0)
                    .ok_or_else(|| KGraphError::DegreeOutOfRange(p.0.clone(), vec![]))?;
                Ok(BPath::Sch { head: new_head, tail: new_tail })
            }
        }
    }

    /// Prepends a finite morphism to a boundary path.
    pub fn prepend(&self, head: &Morphism, x: &BPath) -> Result<BPath, KGraphError> {
        match x {
            BPath::Fin(KPath::Finite(m)) => {
                Ok(BPath::Fin(KPath::Finite(self.kg().compose(head, m)?)))
            }
            BPath::Fin(KPath::Upk { prefix, tail }) => Ok(BPath::Fin(
                KPath::Upk { prefix: self.kg().compose(head, prefix)?, tail: tail.clone() }
                    .normalize(self.kg()),
            )),
            BPath::Sch { head: h2, tail } => Ok(BPath::Sch {
                head: self.kg().compose(head, h2)?,
                tail: tail.clone(),
            }),
        }
    }

    /// Boundary representatives rooted at a vertex.
    pub fn boundary_reps(&self, vertex: &str) -> Vec<BPath> {
        match self {
            BoundaryCtx::Finite { kg, budget } => {
                let v = match kg.vertex(vertex) {
                    Some(v) => v,
                    None => return vec![],
                };
                let cap = Degree(vec![kg.skeleton().vertex_count() as u32 + 1; kg.k]);
                let mut out = Vec::new();
                for m in kg.morphisms_from_up_to(v, &cap) {
                    let x = KPath::Finite(m);
                    if boundary_member(kg, &x, *budget).is_yes() {
                        out.push(BPath::Fin(x));
                    }
                }
                out
            }
            BoundaryCtx::Staged { family, stage, window } => {
                let mut out = Vec::new();
                for s in family.schemas_with_range(vertex, *window) {
                    if let Some(v) = stage.vertex(vertex) {
                        out.push(BPath::Sch { head: Morphism::vertex(v), tail: s });
                    }
                }
                out
            }
        }
    }

    /// Verifies that the path really is a boundary path (exact for finite
    /// contexts; schemas are boundary by their family's contract).
    pub fn verify_boundary(&self, x: &BPath) -> Result<(), KGraphError> {
        match (self, x) {
            (BoundaryCtx::Finite { kg, budget }, BPath::Fin(p)) => {
                if boundary_member(kg, p, *budget).is_yes() {
                    Ok(())
                } else {
                    Err(KGraphError::NotBoundary(format!("{p:?}")))
                }
            }
            (BoundaryCtx::Staged { .. }, BPath::Sch { .. }) => Ok(()),
            _ => Err(KGraphError::Invalid("path does not belong to this context".into())),
        }
    }
}

/// Canonical key of a desourced vertex class `[x; m]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VClassKey {
    pub base: String,
    pub excess: Vec<u32>,
}

/// Canonical key of a desourced morphism class `[x; (m, n)]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PClassKey {
    pub segment: Vec<String>,
    pub segment_range: String,
    pub entry_excess: Vec<u32>,
    pub degree: Vec<u32>,
}

pub fn v_class_key(ctx: &BoundaryCtx, x: &BPath, m: &Degree) -> Result<VClassKey, KGraphError> {
    let d = ctx.degree(x);
    let clip = meet(m, &d);
    Ok(VClassKey {
        base: ctx.vertex_at(x, &clip)?,
        excess: m.minus(&clip).0,
    })
}

pub fn p_class_key(
    ctx: &BoundaryCtx,
    x: &BPath,
    m: &Degree,
    n: &Degree,
) -> Result<PClassKey, KGraphError> {
    if !m.le(n) {
        return Err(KGraphError::DegreeOutOfRange(m.0.clone(), n.0.clone()));
    }
    let d = ctx.degree(x);
    let mc = meet(m, &d);
    let nc = meet(n, &d);
    let seg = ctx.segment(x, &mc, &nc)?;
    Ok(PClassKey {
        segment: seg.edges.iter().map(|&e| ctx.kg().edge_name(e).to_string()).collect(),
        segment_range: ctx.kg().vertex_name(seg.at).to_string(),
        entry_excess: m.minus(&mc).0,
        degree: n.minus(m).0,
    })
}

/// `(x; m) ≈ (y; p)`: same base vertex and excess.
pub fn v_equiv(
    ctx: &BoundaryCtx,
    x: &BPath,
    m: &Degree,
    y: &BPath,
    p: &Degree,
) -> Result<bool, KGraphError> {
    Ok(v_class_key(ctx, x, m)? == v_class_key(ctx, y, p)?)
}

/// `(x; (m,n)) ∼ (y; (p,q))`: equal clipped segments, entry excess and
/// degree.
#[allow(clippy::too_many_arguments)]
pub fn p_equiv(
    ctx: &BoundaryCtx,
    x: &BPath,
    m: &Degree,
    n: &Degree,
    y: &BPath,
    p: &Degree,
    q: &Degree,
) -> Result<bool, KGraphError> {
    Ok(p_class_key(ctx, x, m, n)? == p_class_key(ctx, y, p, q)?)
}

/// A desourced morphism class with its defining representative.
#[derive(Clone, Debug)]
pub struct PClass {
    pub rep: BPath,
    pub offsets: (Degree, Degree),
    pub key: PClassKey,
}

pub fn p_class(ctx: &BoundaryCtx, x: &BPath, m: &Degree, n: &Degree) -> Result<PClass, KGraphError> {
    Ok(PClass { rep: x.clone(), offsets: (m.clone(), n.clone()), key: p_class_key(ctx, x, m, n)? })
}

/// Composition of morphism classes via the representative recipe
/// `z = x(0, n∧d(x)) · σ^{p∧d(y)}(y)`, giving `[z; (m, n+q−p)]`.
pub fn compose_tilde(
    ctx: &BoundaryCtx,
    a: &PClass,
    b: &PClass,
) -> Result<PClass, KGraphError> {
    let (m, n) = &a.offsets;
    let (p, q) = &b.offsets;
    let s_a = v_class_key(ctx, &a.rep, n)?;
    let r_b = v_class_key(ctx, &b.rep, p)?;
    if s_a != r_b {
        return Err(KGraphError::NotComposable(format!("{s_a:?}"), format!("{r_b:?}")));
    }
    let dx = ctx.degree(&a.rep);
    let dy = ctx.degree(&b.rep);
    let head = ctx.segment(&a.rep, &Degree::zero(ctx.k()), &meet(n, &dx))?;
    let tail = ctx.sigma(&b.rep, &meet(p, &dy))?;
    let z = ctx.prepend(&head, &tail)?;
    let n_new = n.plus(q).minus(p);
    p_class(ctx, &z, m, &n_new)
}

/// `ι(α) = [αx; (0, d(α))]` for any boundary `x` at `s(α)`; well defined by
/// construction, so the first representative serves.
pub fn iota_key(ctx: &BoundaryCtx, alpha: &Morphism) -> Result<PClassKey, KGraphError> {
    let kg = ctx.kg();
    let s = kg.vertex_name(kg.source(alpha)).to_string();
    let reps = ctx.boundary_reps(&s);
    let x = reps
        .first()
        .ok_or_else(|| KGraphError::NoBoundaryRepresentative(s.clone()))?;
    let ax = ctx.prepend(alpha, x)?;
    p_class_key(ctx, &ax, &Degree::zero(ctx.k()), &kg.degree(alpha))
}

/// `κ(x)(m, n) = [x; (m, n)]`: the desourced image of a boundary path,
/// queried segment by segment (its codomain is infinite, so it is never
/// materialized).
pub struct KappaPath<'c, 'a> {
    ctx: &'c BoundaryCtx<'a>,
    x: BPath,
}

pub fn kappa<'c, 'a>(ctx: &'c BoundaryCtx<'a>, x: BPath) -> Result<KappaPath<'c, 'a>, KGraphError> {
    ctx.verify_boundary(&x)?;
    Ok(KappaPath { ctx, x })
}

impl KappaPath<'_, '_> {
    pub fn segment(&self, m: &Degree, n: &Degree) -> Result<PClassKey, KGraphError> {
        p_class_key(self.ctx, &self.x, m, n)
    }

    pub fn vertex(&self, m: &Degree) -> Result<VClassKey, KGraphError> {
        v_class_key(self.ctx, &self.x, m)
    }
}

/// Lags `n` with `κ(x) ∼ₙ κ(y)` in the desourcification, searched over a
/// bounded offset grid and compared on key probes up to `probe` (enough to
/// separate ultimately periodic representatives).
pub fn kappa_shift_lags(
    ctx: &BoundaryCtx,
    x: &BPath,
    y: &BPath,
    search: u32,
    probe: u32,
) -> Vec<Vec<i64>> {
    let k = ctx.k();
    let grid = Degree(vec![search; k]);
    let probe_box = Degree(vec![probe; k]);
    let mut lags = Vec::new();
    for m in grid.box_iter() {
        for p in grid.box_iter() {
            // σ^m(κx) = σ^p(κy) iff all their segments agree.
            let mut all_eq = true;
            for t in probe_box.box_iter() {
                let a = p_class_key(ctx, x, &m, &m.plus(&t));
                let b = p_class_key(ctx, y, &p, &p.plus(&t));
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => {
                        all_eq = false;
                        break;
                    }
                }
            }
            if all_eq {
                let n: Vec<i64> =
                    m.0.iter().zip(&p.0).map(|(a, b)| *a as i64 - *b as i64).collect();
                if !lags.contains(&n) {
                    lags.push(n);
                }
            }
        }
    }
    lags.sort();
    lags
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentVertex {
    pub key: VClassKey,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentEdge {
    pub key: PClassKey,
    pub color: usize,
    pub r: VClassKey,
    pub s: VClassKey,
}

/// A finite window onto the desourcification: all classes with offsets at
/// most `bound` over the representatives rooted in the context window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesourcedFragment {
    pub bound: Vec<u32>,
    pub vertices: Vec<FragmentVertex>,
    pub edges: Vec<FragmentEdge>,
    /// ι on the original vertices and edges found in the window.
    pub iota_vertices: Vec<(String, VClassKey)>,
    pub iota_edges: Vec<(String, PClassKey)>,
}

impl DesourcedFragment {
    pub fn vertex_keys(&self) -> BTreeSet<&VClassKey> {
        self.vertices.iter().map(|v| &v.key).collect()
    }

    pub fn vertices_with_base(&self, base: &str) -> Vec<&VClassKey> {
        self.vertices.iter().map(|v| &v.key).filter(|k| k.base == base).collect()
    }

    pub fn edges_with_range(&self, key: &VClassKey) -> Vec<&FragmentEdge> {
        self.edges.iter().filter(|e| &e.r == key).collect()
    }

    /// Every vertex class in `interior` receives at least one edge class of
    /// each color.
    pub fn sourceless_on(&self, interior: &[&VClassKey], k: usize) -> bool {
        interior.iter().all(|key| {
            (0..k).all(|c| self.edges.iter().any(|e| &e.r == *key && e.color == c))
        })
    }
}

/// Materializes the desourcification window: classes `[x; m]` and
/// `[x; (m, m+e_i)]` for `m ≤ bound`, over boundary representatives rooted
/// at the given vertices. Vertices without a representative are an error
/// (no silent incompleteness).
pub fn materialize_truncation(
    ctx: &BoundaryCtx,
    root_vertices: &[String],
    bound: &Degree,
) -> Result<DesourcedFragment, KGraphError> {
    let k = ctx.k();
    let mut vkeys: BTreeSet<VClassKey> = BTreeSet::new();
    let mut ekeys: BTreeMap<PClassKey, FragmentEdge> = BTreeMap::new();
    for vname in root_vertices {
        let reps = ctx.boundary_reps(vname);
        if reps.is_empty() {
            return Err(KGraphError::NoBoundaryRepresentative(vname.clone()));
        }
        for x in &reps {
            let _ = ctx.degree(x);
            for m in bound.box_iter() {
                // Offsets beyond the representable part of a finite path are
                // still fine; the key clips them.
                vkeys.insert(v_class_key(ctx, x, &m)?);
                for color in 0..k {
                    let n = m.plus(&Degree::unit(k, color));
                    if !n.le(bound) {
                        continue;
                    }
                    // Skip degenerate edges that would need a segment beyond
                    // the path (clipped to a vertex on both ends but with
                    // excess mismatch is still a real class).
                    let key = p_class_key(ctx, x, &m, &n)?;
                    let r = v_class_key(ctx, x, &m)?;
                    let s = v_class_key(ctx, x, &n)?;
                    ekeys.entry(key.clone()).or_insert(FragmentEdge { key, color, r, s });
                }
            }
        }
    }
    // ι on the window.
    let kg = ctx.kg();
    let mut iota_vertices = Vec::new();
    for vname in root_vertices {
        if let Some(v) = kg.vertex(vname) {
            let x = &ctx.boundary_reps(vname)[0];
            let _ = v;
            iota_vertices.push((vname.clone(), v_class_key(ctx, x, &Degree::zero(k))?));
        }
    }
    let mut iota_edges = Vec::new();
    for e in kg.skeleton().edge_ids() {
        let rname = kg.vertex_name(kg.skeleton().range(e)).to_string();
        if !root_vertices.contains(&rname) {
            continue;
        }
        if let Ok(key) = iota_key(ctx, &kg.edge_morphism(e)) {
            iota_edges.push((kg.edge_name(e).to_string(), key));
        }
    }
    Ok(DesourcedFragment {
        bound: bound.0.clone(),
        vertices: vkeys.into_iter().map(|key| FragmentVertex { key }).collect(),
        edges: ekeys.into_values().collect(),
        iota_vertices,
        iota_edges,
    })
}

/// Converts a fragment into a plain colored graph document for emission.
pub fn fragment_to_graph(frag: &DesourcedFragment) -> DirectedGraph {
    let mut g = DirectedGraph::new(GraphKind::Finite);
    let label = |k: &VClassKey| format!("[{};{:?}]", k.base, k.excess);
    for v in &frag.vertices {
        let _ = g.add_vertex(&label(&v.key));
    }
    for (i, e) in frag.edges.iter().enumerate() {
        let name = format!(
            "[{}·{};{:?};{:?}]#{i}",
            e.key.segment_range,
            e.key.segment.join("·"),
            e.key.entry_excess,
            e.key.degree
        );
        let _ = g.add_edge(&name, &label(&e.r), &label(&e.s));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::loop_plus_edge;
    use crate::kgraph::omega;

    #[test]
    fn add_heads_attaches_one_chain_per_source() {
        let f = add_heads(&loop_plus_edge()).unwrap();
        let g = f.stage(3);
        // v is the unique source; its chain v ← h.v0 ← h.v1 ← …
        assert!(g.edge("h.v.in").is_some());
        assert!(g.vertex("h.v0").is_some());
        for n in 1..4 {
            assert!(f.validate(n).is_valid());
        }
        // No sources in the stage interior.
        let frontier = f.frontier(3);
        for v in g.vertices() {
            if !frontier.contains(g.vertex_name(v)) {
                assert!(!g.is_source(v), "{} became a source", g.vertex_name(v));
            }
        }
    }

    #[test]
    fn sourceless_graph_is_unchanged_aside_from_the_unused_track() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("u").unwrap();
        g.add_edge("g", "u", "u").unwrap();
        let f = add_heads(&g).unwrap();
        let s = f.stage(2);
        assert!(s.edge("g").is_some());
        assert!(s.vertex("h.u0").is_none());
    }

    #[test]
    fn v_equiv_is_reflexive_and_separates_excess() {
        let kg = omega(2, &[3, 2]);
        let ctx = BoundaryCtx::finite(&kg, 3);
        let x = &ctx.boundary_reps("(0,0)")[0];
        let m = Degree(vec![1, 1]);
        assert!(v_equiv(&ctx, x, &m, x, &m).unwrap());
        // Past the path end the excess grows and separates classes.
        let deep = Degree(vec![4, 2]);
        let deeper = Degree(vec![5, 2]);
        assert!(!v_equiv(&ctx, x, &deep, x, &deeper).unwrap());
    }

    #[test]
    fn distinct_omega_paths_share_vertex_classes() {
        // Two boundary paths of Ω_{2,(3,2)} from different roots share the
        // class of their common grid vertex.
        let kg = omega(2, &[3, 2]);
        let ctx = BoundaryCtx::finite(&kg, 3);
        let x = &ctx.boundary_reps("(0,0)")[0];
        let y = &ctx.boundary_reps("(1,0)")[0];
        assert!(v_equiv(&ctx, x, &Degree(vec![2, 1]), y, &Degree(vec![1, 1])).unwrap());
    }

    #[test]
    fn compose_tilde_identity_and_degree() {
        let kg = omega(2, &[3, 2]);
        let ctx = BoundaryCtx::finite(&kg, 3);
        let x = ctx.boundary_reps("(0,0)")[0].clone();
        let a = p_class(&ctx, &x, &Degree(vec![0, 0]), &Degree(vec![2, 1])).unwrap();
        let id = p_class(&ctx, &x, &Degree(vec![2, 1]), &Degree(vec![2, 1])).unwrap();
        let c = compose_tilde(&ctx, &a, &id).unwrap();
        assert_eq!(c.key, a.key);
        let b = p_class(&ctx, &x, &Degree(vec![2, 1]), &Degree(vec![3, 2])).unwrap();
        let ab = compose_tilde(&ctx, &a, &b).unwrap();
        assert_eq!(ab.key.degree, vec![3, 2]);
    }

    #[test]
    fn sourceless_truncation_is_the_graph_itself() {
        // A sourceless finite k-graph: single vertex with commuting loops.
        let mut b = crate::kgraph::KGraphBuilder::new(2);
        b.vertex("v");
        b.edge("a", "v", "v", 1);
        b.edge("bb", "v", "v", 2);
        b.square("a", "bb", "bb", "a");
        let kg = b.build().unwrap();
        assert!(kg.validate().is_valid());
        let ctx = BoundaryCtx::finite(&kg, 2);
        // Boundary rep: the doubly periodic path (a·bb)^∞.
        let tail = kg
            .compose(
                &kg.edge_morphism(kg.edge("a").unwrap()),
                &kg.edge_morphism(kg.edge("bb").unwrap()),
            )
            .unwrap();
        let x = BPath::Fin(KPath::Upk {
            prefix: Morphism::vertex(kg.vertex("v").unwrap()),
            tail,
        });
        // Every vertex class collapses onto the base vertex.
        for m in Degree(vec![2, 2]).box_iter() {
            let key = v_class_key(&ctx, &x, &m).unwrap();
            assert_eq!(key.base, "v");
            assert_eq!(key.excess, vec![0, 0]);
        }
    }

    #[test]
    fn robertson_truncation_has_the_drawn_column_structure() {
        let family = StagedKGraph::robertson();
        let ctx = BoundaryCtx::staged(&family, 8);
        let roots: Vec<String> = (0..=4)
            .flat_map(|c| vec![format!("v{c}"), format!("w{c}")])
            .chain((1..=4).map(|c| format!("a{c}")))
            .collect();
        let frag = materialize_truncation(&ctx, &roots, &Degree(vec![3, 3])).unwrap();
        // Per column: the v-chain [v_j; (0,p)] for p = 0..3.
        for c in 0..=2u32 {
            let vkeys = frag.vertices_with_base(&format!("v{c}"));
            assert_eq!(vkeys.len(), 4, "column {c}: {vkeys:?}");
            for p in 0..=3u32 {
                assert!(vkeys.iter().any(|k| k.excess == vec![0, p]));
            }
            let wkeys = frag.vertices_with_base(&format!("w{c}"));
            assert_eq!(wkeys.len(), 4, "column {c} w-chain");
            // The a-grid: all excesses up to the bound.
            let akeys = frag.vertices_with_base(&format!("a{}", c + 1));
            assert_eq!(akeys.len(), 16, "column {} a-grid", c + 1);
        }
    }
}

//! Decision procedures for the structural classification properties of
//! directed graphs and k-graphs: principal/AF, simple, liminal, postliminal,
//! bounded trace, Fell and continuous trace.
//!
//! Finite directed graphs are decided exactly by structural criteria that
//! are cross-validated (in the test suite) against literal path-space
//! evaluation. Staged graphs are decided by evaluating the path-space
//! conditions over the representable path family with stabilization; a
//! verdict is only reported when certified, otherwise the property is
//! Unknown. The trace-class properties require a principal path groupoid;
//! when the groupoid is not principal and nothing forces a No through the
//! implication chain, the honest answer is Unknown.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, VertexId};
use crate::kgraph::{Degree, KGraph};
use crate::kpaths::{boundary_member, morphism_label, shift_equivalent_k, KPath};
use crate::kstaged::{KSchema, StagedKGraph};
use crate::paths::{FinitePath, InfinitePath, RayResolver};
use crate::staged::{
    count_into_class_on, Count, NoRayAccess, Stabilized, StageProbe, StagedDigraph, TailClass,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    NoCycles,
    Cycle { edges: Vec<String> },
    CycleEntry { cycle: Vec<String>, entry: String },
    EntryInCycle { cycle: Vec<String>, entry: String, entry_cycle: Vec<String> },
    EveryCycleHasEntry,
    NotCofinal { vertex: String, tail: String },
    Cofinal,
    ShiftClassBound { m: u64 },
    InfiniteShiftClass { vertex: String, class: String },
    MultipleReturns { class: String, counts: Vec<u64> },
    UniqueReturn { class: String, position: usize },
    SplittingPairs { count: u64 },
    GrowingSplittingPairs { restriction: String, counts: Vec<u64> },
    SelfLag { path: String, lag: Vec<i64> },
    MonolithicCover { bases: Vec<(String, String)> },
    GrowingMonolithicBases { vertices: Vec<String>, counts: Vec<u64> },
    NonPrincipal,
    DivertableNotEquivalent { from: String, to: String },
    PathSpace { detail: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub budget_used: usize,
}

impl PropertyReport {
    fn yes(cert: Certificate, budget: usize) -> PropertyReport {
        PropertyReport { verdict: Verdict::Yes, certificate: Some(cert), reason: None, budget_used: budget }
    }
    fn no(cert: Certificate, budget: usize) -> PropertyReport {
        PropertyReport { verdict: Verdict::No, certificate: Some(cert), reason: None, budget_used: budget }
    }
    fn unknown(reason: impl Into<String>, budget: usize) -> PropertyReport {
        PropertyReport {
            verdict: Verdict::Unknown,
            certificate: None,
            reason: Some(reason.into()),
            budget_used: budget,
        }
    }
}

pub const PROPERTIES: [&str; 8] = [
    "principal",
    "af",
    "simple",
    "liminal",
    "postliminal",
    "bounded_trace",
    "fell",
    "continuous_trace",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub subject: String,
    pub properties: BTreeMap<String, PropertyReport>,
}

impl ClassificationReport {
    pub fn verdict(&self, prop: &str) -> Verdict {
        self.properties.get(prop).map(|p| p.verdict).unwrap_or(Verdict::Unknown)
    }

    /// Fills Unknowns through the implication chain
    /// continuous_trace ⟹ fell ⟹ bounded_trace ⟹ liminal ⟹ postliminal
    /// (Yes propagates to weaker properties, No to stronger ones).
    fn propagate_chain(&mut self, budget: usize) {
        let chain = ["continuous_trace", "fell", "bounded_trace", "liminal", "postliminal"];
        for i in 0..chain.len() {
            if self.verdict(chain[i]) == Verdict::Yes {
                for weaker in chain.iter().skip(i + 1) {
                    if self.verdict(weaker) == Verdict::Unknown {
                        self.properties.insert(
                            weaker.to_string(),
                            PropertyReport {
                                verdict: Verdict::Yes,
                                certificate: self.properties[chain[i]].certificate.clone(),
                                reason: Some(format!("implied by {}", chain[i])),
                                budget_used: budget,
                            },
                        );
                    }
                }
            }
        }
        for i in (0..chain.len()).rev() {
            if self.verdict(chain[i]) == Verdict::No {
                for stronger in chain.iter().take(i) {
                    if self.verdict(stronger) == Verdict::Unknown {
                        self.properties.insert(
                            stronger.to_string(),
                            PropertyReport {
                                verdict: Verdict::No,
                                certificate: self.properties[chain[i]].certificate.clone(),
                                reason: Some(format!("implies {}", chain[i])),
                                budget_used: budget,
                            },
                        );
                    }
                }
            }
        }
    }

    /// True when no decided pair violates the implication chain.
    pub fn chain_consistent(&self) -> bool {
        let chain = ["continuous_trace", "fell", "bounded_trace", "liminal", "postliminal"];
        for i in 0..chain.len() - 1 {
            if self.verdict(chain[i]) == Verdict::Yes && self.verdict(chain[i + 1]) == Verdict::No {
                return false;
            }
        }
        true
    }
}

/// Cofinality of a finite graph: every vertex reaches every source and
/// meets every simple cycle.
pub fn is_cofinal_finite(g: &DirectedGraph) -> (Verdict, Certificate) {
    let sources = g.sources();
    let cycles = g.find_cycles();
    for v in g.vertices() {
        let reach = g.reachable_from(v);
        for &w in &sources {
            if !reach.contains(&w) {
                return (
                    Verdict::No,
                    Certificate::NotCofinal {
                        vertex: g.vertex_name(v).to_string(),
                        tail: g.vertex_name(w).to_string(),
                    },
                );
            }
        }
        for c in &cycles {
            if !c.vertices(g).iter().any(|u| reach.contains(u)) {
                return (
                    Verdict::No,
                    Certificate::NotCofinal {
                        vertex: g.vertex_name(v).to_string(),
                        tail: format!("({})^inf", c.names(g).join(" ")),
                    },
                );
            }
        }
    }
    (Verdict::Yes, Certificate::Cofinal)
}

/// Exact classification of a finite row-finite directed graph.
pub fn classify_digraph(g: &DirectedGraph) -> ClassificationReport {
    let mut props = BTreeMap::new();
    let cycles = g.find_cycles();
    let acyclic = cycles.is_empty();

    // principal and AF: no cycles.
    let principal = if acyclic {
        PropertyReport::yes(Certificate::NoCycles, 0)
    } else {
        PropertyReport::no(Certificate::Cycle { edges: cycles[0].names(g) }, 0)
    };
    props.insert("principal".into(), principal.clone());
    props.insert("af".into(), principal);

    // simple: every cycle has an entry and the graph is cofinal.
    let entryless = cycles.iter().find(|c| g.cycle_entries(c).is_empty());
    let (cof, cof_cert) = is_cofinal_finite(g);
    let simple = match (&entryless, cof) {
        (Some(c), _) => PropertyReport::no(
            Certificate::CycleEntry { cycle: c.names(g), entry: "(none)".into() },
            0,
        ),
        (None, Verdict::No) => PropertyReport::no(cof_cert.clone(), 0),
        (None, _) => PropertyReport::yes(Certificate::Cofinal, 0),
    };
    props.insert("simple".into(), simple);

    // liminal: no cycle has an entry.
    let with_entry = cycles
        .iter()
        .find_map(|c| g.cycle_entries(c).iter().next().map(|&e| (c.clone(), e)));
    let liminal = match &with_entry {
        None => PropertyReport::yes(Certificate::PathSpace { detail: "no cycle has an entry".into() }, 0),
        Some((c, e)) => PropertyReport::no(
            Certificate::CycleEntry { cycle: c.names(g), entry: g.edge_name(*e).to_string() },
            0,
        ),
    };
    props.insert("liminal".into(), liminal);

    // postliminal: no entry to a cycle lies on a cycle.
    let mut entry_in_cycle = None;
    'outer: for c in &cycles {
        for e in g.cycle_entries(c) {
            if let Some(c2) = cycles.iter().find(|c2| c2.edges.contains(&e)) {
                entry_in_cycle = Some((c.clone(), e, c2.clone()));
                break 'outer;
            }
        }
    }
    let postliminal = match &entry_in_cycle {
        None => PropertyReport::yes(
            Certificate::PathSpace { detail: "no entry to a cycle lies on a cycle".into() },
            0,
        ),
        Some((c, e, c2)) => PropertyReport::no(
            Certificate::EntryInCycle {
                cycle: c.names(g),
                entry: g.edge_name(*e).to_string(),
                entry_cycle: c2.names(g),
            },
            0,
        ),
    };
    props.insert("postliminal".into(), postliminal);

    // Trace-class properties: decided when acyclic (finite path space) or
    // when a cycle entry already kills liminality; otherwise the path
    // groupoid is not principal and the characterizations do not apply.
    let trace = if acyclic {
        let m = max_class_count_acyclic(g);
        PropertyReport::yes(Certificate::ShiftClassBound { m }, 0)
    } else if let Some((c, e)) = &with_entry {
        PropertyReport::no(
            Certificate::CycleEntry { cycle: c.names(g), entry: g.edge_name(*e).to_string() },
            0,
        )
    } else {
        PropertyReport::unknown(
            "cycles without entries: path groupoid is not principal and no characterization applies",
            0,
        )
    };
    props.insert("bounded_trace".into(), trace.clone());
    props.insert("fell".into(), trace.clone());
    props.insert("continuous_trace".into(), trace);

    let mut report = ClassificationReport { subject: "digraph".into(), properties: props };
    report.propagate_chain(0);
    report
}

/// Max number of boundary paths sharing a range vertex and a tail class in
/// an acyclic finite graph (all classes are source classes).
fn max_class_count_acyclic(g: &DirectedGraph) -> u64 {
    let mut m = 0u64;
    for v in g.vertices() {
        for w in g.sources() {
            let class = TailClass::SourceVertex(g.vertex_name(w).to_string());
            if let Count::Finite(c) = count_into_class_on(g, &NoRayAccess, v, &class) {
                m = m.max(c);
            }
        }
    }
    m
}

/// The tail classes representable in one stage window of a staged graph.
fn window_classes(family: &StagedDigraph, window: usize) -> Vec<(String, TailClass)> {
    family
        .anchors(window)
        .into_iter()
        .map(|a| (family.anchor_name(a), TailClass::Anchor(a)))
        .collect()
}

/// Representative range vertices: one period's worth of columns per track
/// plus the hair tops.
fn window_vertices(family: &StagedDigraph, _window: usize) -> Vec<String> {
    let cols = family.contracts().onset + family.contracts().column_period;
    let mut out = Vec::new();
    for t in 0..family.track_count() {
        for c in 0..=cols {
            out.push(family.track_vertex_name(t, c));
        }
    }
    out
}

/// Stabilizing classification of a staged directed graph.
pub fn classify_staged_digraph(family: &StagedDigraph, budget: usize) -> ClassificationReport {
    let mut props = BTreeMap::new();
    let p = family.contracts().column_period.max(1);
    let probe = StageProbe::new(family, budget.max(6));
    let n1 = probe.base_n();
    let g1 = probe.base();
    let g2 = &probe.stages[1].1;

    // Cycles: template cycles replicate into the interior of any stage.
    let interior_cycles = |g: &DirectedGraph, n: usize| -> Vec<Vec<String>> {
        let frontier = family.frontier(n);
        g.find_cycles()
            .into_iter()
            .filter(|c| c.vertices(g).iter().all(|&v| !frontier.contains(g.vertex_name(v))))
            .map(|c| c.names(g))
            .collect()
    };
    let cyc1 = interior_cycles(g1, n1);
    let cyc2 = interior_cycles(g2, n1 + p);
    let principal = if !cyc1.is_empty() {
        PropertyReport::no(Certificate::Cycle { edges: cyc1[0].clone() }, n1)
    } else if cyc2.is_empty() {
        PropertyReport::yes(Certificate::NoCycles, n1 + p)
    } else {
        PropertyReport::unknown("cycle census did not stabilize", n1 + p)
    };
    props.insert("principal".into(), principal.clone());
    props.insert("af".into(), principal.clone());

    let classes = window_classes(family, family.contracts().onset + p);
    let verts = window_vertices(family, n1);
    let anchor_complete = family.contracts().anchor_complete;

    // liminal: every (vertex, class) count is finite.
    let mut liminal = None;
    let mut max_count = 0u64;
    'lim: for v in &verts {
        for (cname, class) in &classes {
            match probe.class_count(v, class) {
                Stabilized::Certified(Count::Infinite) => {
                    liminal = Some(PropertyReport::no(
                        Certificate::InfiniteShiftClass { vertex: v.clone(), class: cname.clone() },
                        n1,
                    ));
                    break 'lim;
                }
                Stabilized::Certified(Count::Finite(c)) => max_count = max_count.max(c),
                other => {
                    liminal = Some(PropertyReport::unknown(
                        format!("count({v}, {cname}) did not certify: {other:?}"),
                        n1,
                    ));
                    break 'lim;
                }
            }
        }
    }
    let liminal = liminal.unwrap_or_else(|| {
        if anchor_complete && principal.verdict == Verdict::Yes {
            PropertyReport::yes(Certificate::ShiftClassBound { m: max_count }, n1)
        } else {
            PropertyReport::unknown("family is not anchor-complete", n1)
        }
    });
    // bounded trace shares the finite-count analysis with liminal here: the
    // per-vertex bound is the window maximum.
    let bounded = match liminal.verdict {
        Verdict::Yes => PropertyReport::yes(Certificate::ShiftClassBound { m: max_count }, n1),
        Verdict::No => PropertyReport::no(
            liminal.certificate.clone().unwrap_or(Certificate::NonPrincipal),
            n1,
        ),
        Verdict::Unknown => PropertyReport::unknown(
            liminal.reason.clone().unwrap_or_default(),
            n1,
        ),
    };
    props.insert("liminal".into(), liminal);
    props.insert("bounded_trace".into(), bounded);

    // postliminal: every class eventually readmits only its own shift.
    let mut post = None;
    'post: for (cname, class) in &classes {
        let anchor = match class {
            TailClass::Anchor(a) => *a,
            _ => continue,
        };
        let window = family.contracts().onset + 2 * p + 2;
        let mut counts = Vec::new();
        let mut found = None;
        for pos in 0..window {
            let v = family.ray_vertex(anchor, pos);
            match probe.class_count(&v, class) {
                Stabilized::Certified(Count::Finite(c)) => {
                    counts.push(c);
                    if c == 1 {
                        found = Some(pos);
                        break;
                    }
                }
                Stabilized::Certified(Count::Infinite) => counts.push(u64::MAX),
                other => {
                    post = Some(PropertyReport::unknown(
                        format!("return count along {cname} did not certify: {other:?}"),
                        n1,
                    ));
                    break 'post;
                }
            }
        }
        match found {
            Some(_) => {}
            None => {
                post = Some(PropertyReport::no(
                    Certificate::MultipleReturns { class: cname.clone(), counts },
                    n1,
                ));
                break 'post;
            }
        }
    }
    let post = post.unwrap_or_else(|| {
        if anchor_complete {
            PropertyReport::yes(
                Certificate::PathSpace {
                    detail: "every representable class eventually readmits only its own shift"
                        .into(),
                },
                n1,
            )
        } else {
            PropertyReport::unknown("family is not anchor-complete", n1)
        }
    });
    props.insert("postliminal".into(), post);

    // fell: for every class z there is a depth beyond which the restriction
    // to the cone has finitely many splitting pairs.
    let fell = staged_fell(&probe, &classes, n1, p, anchor_complete, &principal);
    props.insert("fell".into(), fell);

    // continuous trace: splitting pairs of every finite-cone restriction.
    let cts = staged_cts(&probe, &verts, n1, anchor_complete, &principal);
    props.insert("continuous_trace".into(), cts);

    // simple: every cycle has an entry (vacuous without cycles) and cofinal.
    let cof = staged_cofinal(&probe, &verts, &classes, anchor_complete);
    let simple = match (&cyc1.is_empty(), &cof) {
        (_, (Verdict::No, cert)) => PropertyReport::no(cert.clone(), n1),
        (true, (Verdict::Yes, _)) => PropertyReport::yes(Certificate::Cofinal, n1),
        _ => PropertyReport::unknown("cofinality undecided at budget", n1),
    };
    props.insert("simple".into(), simple);

    let mut report =
        ClassificationReport { subject: format!("staged:{}", family.name), properties: props };
    report.propagate_chain(n1);
    report
}

fn splitting_pairs_of_cone(
    family: &StagedDigraph,
    stage_n: usize,
    g: &DirectedGraph,
    from: &[String],
    infinite_only: bool,
) -> Option<u64> {
    let mut seeds = BTreeSet::new();
    for name in from {
        seeds.insert(g.vertex(name)?);
    }
    let mut reach: BTreeSet<VertexId> = BTreeSet::new();
    for &v in &seeds {
        reach.extend(g.reachable_from(v));
    }
    let frontier = family.frontier_with_hair_depth(stage_n, 4);
    // On a stage, a vertex can continue forever iff it reaches the frontier
    // or a cycle: compute as backward reachability from that target set.
    let mut targets: BTreeSet<VertexId> = g
        .vertices()
        .filter(|&v| frontier.contains(g.vertex_name(v)))
        .collect();
    for c in g.find_cycles() {
        targets.extend(c.vertices(g));
    }
    let mut can_continue = targets.clone();
    let mut stack: Vec<VertexId> = targets.into_iter().collect();
    while let Some(u) = stack.pop() {
        for &e in g.edges_with_source(u) {
            let w = g.range(e);
            if can_continue.insert(w) {
                stack.push(w);
            }
        }
    }
    let allowed: BTreeSet<_> = g
        .edge_ids()
        .filter(|&e| {
            reach.contains(&g.range(e)) && (!infinite_only || can_continue.contains(&g.source(e)))
        })
        .collect();
    Some(g.splitting_pairs_in(&allowed).len() as u64)
}

fn probe_splitting_pairs(probe: &StageProbe, v_set: &[String]) -> Vec<Option<u64>> {
    probe
        .stages
        .iter()
        .map(|(n, g)| splitting_pairs_of_cone(probe.family, *n, g, v_set, true))
        .collect()
}

fn staged_fell(
    probe: &StageProbe,
    classes: &[(String, TailClass)],
    n1: usize,
    p: usize,
    anchor_complete: bool,
    principal: &PropertyReport,
) -> PropertyReport {
    let family = probe.family;
    if principal.verdict == Verdict::No {
        return PropertyReport::unknown("path groupoid is not principal", n1);
    }
    let window = family.contracts().onset + 2 * p + 2;
    for (cname, class) in classes {
        let anchor = match class {
            TailClass::Anchor(a) => *a,
            _ => continue,
        };
        let mut ok = false;
        let mut counts = Vec::new();
        for pos in 0..window {
            let v = family.ray_vertex(anchor, pos);
            match probe_splitting_pairs(probe, &[v])[..] {
                [Some(a), Some(b), Some(c)] if a == b && b == c => {
                    ok = true;
                    break;
                }
                [Some(a), Some(b), Some(c)] => counts = vec![a, b, c],
                _ => {}
            }
        }
        if !ok {
            return PropertyReport::no(
                Certificate::GrowingSplittingPairs { restriction: format!("{cname} cone"), counts },
                n1,
            );
        }
    }
    if anchor_complete {
        PropertyReport::yes(
            Certificate::PathSpace {
                detail: "every class cone eventually has stable splitting pairs".into(),
            },
            n1,
        )
    } else {
        PropertyReport::unknown("family is not anchor-complete", n1)
    }
}

fn staged_cts(
    probe: &StageProbe,
    verts: &[String],
    n1: usize,
    anchor_complete: bool,
    principal: &PropertyReport,
) -> PropertyReport {
    if principal.verdict == Verdict::No {
        return PropertyReport::unknown("path groupoid is not principal", n1);
    }
    let mut subsets: Vec<Vec<String>> = verts.iter().map(|v| vec![v.clone()]).collect();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            subsets.push(vec![verts[i].clone(), verts[j].clone()]);
        }
    }
    let mut total = 0u64;
    for v_set in &subsets {
        match probe_splitting_pairs(probe, v_set)[..] {
            [Some(a), Some(b), Some(c)] if a == b && b == c => total = total.max(a),
            [Some(a), Some(b), Some(c)] => {
                return PropertyReport::no(
                    Certificate::GrowingSplittingPairs {
                        restriction: format!("{v_set:?} cone"),
                        counts: vec![a, b, c],
                    },
                    n1,
                );
            }
            _ => return PropertyReport::unknown("restriction left the stage", n1),
        }
    }
    if anchor_complete {
        PropertyReport::yes(Certificate::SplittingPairs { count: total }, n1)
    } else {
        PropertyReport::unknown("family is not anchor-complete", n1)
    }
}

fn staged_cofinal(
    probe: &StageProbe,
    verts: &[String],
    classes: &[(String, TailClass)],
    anchor_complete: bool,
) -> (Verdict, Certificate) {
    let family = probe.family;
    let (n1, ref g1) = probe.stages[0];
    let (n2, ref g2) = probe.stages[1];
    for v in verts {
        for (cname, class) in classes {
            let anchor = match class {
                TailClass::Anchor(a) => *a,
                _ => continue,
            };
            let hit = |g: &DirectedGraph, window: usize| -> Option<bool> {
                let vid = g.vertex(v)?;
                let reach = g.reachable_from(vid);
                Some((0..window).any(|i| {
                    g.vertex(&family.ray_vertex(anchor, i))
                        .map(|u| reach.contains(&u))
                        .unwrap_or(false)
                }))
            };
            match (hit(g1, n1), hit(g2, n2)) {
                (Some(false), Some(false)) => {
                    return (
                        Verdict::No,
                        Certificate::NotCofinal { vertex: v.clone(), tail: cname.clone() },
                    );
                }
                (Some(true), Some(true)) => {}
                _ => return (Verdict::Unknown, Certificate::Cofinal),
            }
        }
    }
    if anchor_complete {
        (Verdict::Yes, Certificate::Cofinal)
    } else {
        (Verdict::Unknown, Certificate::Cofinal)
    }
}

/// The monolithic-extension witness: `t` with `(x, y) = (η·t, ζ·t)`, when it
/// exists.
pub fn monolithic_extension<R: RayResolver>(
    graph: &DirectedGraph,
    resolver: &R,
    x: &InfinitePath,
    y: &InfinitePath,
    eta: &FinitePath,
    zeta: &FinitePath,
) -> Option<InfinitePath> {
    if eta.source_name(graph) != zeta.source_name(graph) {
        return None;
    }
    for (i, e) in eta.edges.iter().enumerate() {
        if &x.edge_at(resolver, i + 1) != e {
            return None;
        }
    }
    for (i, e) in zeta.edges.iter().enumerate() {
        if &y.edge_at(resolver, i + 1) != e {
            return None;
        }
    }
    if x.range_name() != eta.range_name() || y.range_name() != zeta.range_name() {
        return None;
    }
    let t = x.shift(graph, resolver, eta.len());
    let t2 = y.shift(graph, resolver, zeta.len());
    if t == t2 {
        Some(t)
    } else {
        None
    }
}

/// Frequently-divertable outcome with a stuck-vertex certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOutcome {
    Yes,
    No { stuck_vertex: String },
    Unknown { reason: String },
}

/// Path argument for boundary-path operations: finite (source-terminated)
/// or infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryPath {
    Finite(FinitePath),
    Infinite(InfinitePath),
}

fn target_vertices_finite(g: &DirectedGraph, y: &BoundaryPath) -> BTreeSet<VertexId> {
    match y {
        BoundaryPath::Finite(p) => {
            let mut s = BTreeSet::new();
            s.insert(g.vertex(&p.source_name(g)).expect("path vertex"));
            s
        }
        BoundaryPath::Infinite(InfinitePath::Up { cycle, .. }) => cycle
            .iter()
            .map(|e| g.range(g.edge(e).expect("cycle edge")))
            .collect(),
        BoundaryPath::Infinite(InfinitePath::Anchored { .. }) => {
            unreachable!("finite graphs have no anchored paths")
        }
    }
}

fn path_vertices_finite(g: &DirectedGraph, x: &BoundaryPath) -> BTreeSet<VertexId> {
    match x {
        BoundaryPath::Finite(p) => (0..=p.len())
            .map(|i| g.vertex(&p.vertex_at(g, i)).expect("path vertex"))
            .collect(),
        BoundaryPath::Infinite(InfinitePath::Up { head, cycle }) => {
            let mut s: BTreeSet<VertexId> = (0..=head.len())
                .map(|i| g.vertex(&head.vertex_at(g, i)).expect("path vertex"))
                .collect();
            s.extend(cycle.iter().map(|e| g.range(g.edge(e).expect("cycle edge"))));
            s
        }
        BoundaryPath::Infinite(InfinitePath::Anchored { .. }) => {
            unreachable!("finite graphs have no anchored paths")
        }
    }
}

/// Exact frequently-divertable decision on finite graphs: from every vertex
/// of `x` there must be a path into `y`'s tail.
pub fn frequently_divertable_finite(
    g: &DirectedGraph,
    x: &BoundaryPath,
    y: &BoundaryPath,
) -> FdOutcome {
    let targets = target_vertices_finite(g, y);
    for v in path_vertices_finite(g, x) {
        let reach = g.reachable_from(v);
        if targets.is_disjoint(&reach) {
            return FdOutcome::No { stuck_vertex: g.vertex_name(v).to_string() };
        }
    }
    FdOutcome::Yes
}

/// Stabilizing frequently-divertable decision on staged graphs.
pub fn frequently_divertable_staged(
    family: &StagedDigraph,
    x: &InfinitePath,
    y: &InfinitePath,
    budget: usize,
) -> FdOutcome {
    let p = family.contracts().column_period.max(1);
    let n1 = budget.max(6);
    let window = family.contracts().onset + 2 * p + 2;
    // Vertices of x: the head plus one period's worth of ray positions.
    let mut from: Vec<String> = Vec::new();
    match x {
        InfinitePath::Up { head, cycle } => {
            for i in 0..=head.len() {
                from.push(head.vertex_at(&family.stage(n1), i));
            }
            let g = family.stage(n1);
            for e in cycle {
                from.push(g.vertex_name(g.range(g.edge(e).expect("edge"))).to_string());
            }
        }
        InfinitePath::Anchored { head, anchor, offset } => {
            let g = family.stage(n1);
            for i in 0..=head.len() {
                from.push(head.vertex_at(&g, i));
            }
            for i in 0..window {
                from.push(family.ray_vertex(*anchor, offset + i));
            }
        }
    }
    let target_hit = |stage_n: usize, v: &str| -> Option<bool> {
        let g = family.stage(stage_n);
        let vid = g.vertex(v)?;
        let reach = g.reachable_from(vid);
        match y {
            InfinitePath::Up { cycle, .. } => Some(cycle.iter().any(|e| {
                g.edge(e).map(|e| reach.contains(&g.range(e))).unwrap_or(false)
            })),
            InfinitePath::Anchored { anchor, offset, .. } => Some((0..stage_n).any(|i| {
                g.vertex(&family.ray_vertex(*anchor, offset + i))
                    .map(|u| reach.contains(&u))
                    .unwrap_or(false)
            })),
        }
    };
    for v in &from {
        match (target_hit(n1, v), target_hit(n1 + p, v)) {
            (Some(true), Some(true)) => {}
            (Some(false), Some(false)) => return FdOutcome::No { stuck_vertex: v.clone() },
            _ => {
                return FdOutcome::Unknown {
                    reason: format!("diversion from {v} did not stabilize at budget {n1}"),
                }
            }
        }
    }
    FdOutcome::Yes
}

/// Exact classification of a finite k-graph.
pub fn classify_kgraph(kg: &KGraph, budget: u32) -> ClassificationReport {
    let mut props = BTreeMap::new();
    let skeleton_cycles = kg.skeleton().find_cycles();
    let acyclic = skeleton_cycles.is_empty();

    let principal = if acyclic {
        PropertyReport::yes(Certificate::NoCycles, budget as usize)
    } else {
        let c = &skeleton_cycles[0];
        let mut lag = vec![0i64; kg.k];
        for &e in &c.edges {
            lag[kg.color(e)] += 1;
        }
        PropertyReport::no(
            Certificate::SelfLag { path: format!("({})^inf", c.names(kg.skeleton()).join(" ")), lag },
            budget as usize,
        )
    };
    props.insert("principal".into(), principal.clone());
    props.insert("af".into(), principal.clone());

    if acyclic {
        let boundary = enumerate_boundary_finite(kg, budget);
        let (liminal, postliminal) = liminal_postliminal_over(kg, &boundary, budget);
        props.insert("liminal".into(), liminal);
        props.insert("postliminal".into(), postliminal);
        let m = boundary
            .iter()
            .map(|x| {
                boundary
                    .iter()
                    .filter(|y| {
                        y.range_name(kg) == x.range_name(kg)
                            && shift_equivalent_k(kg, x, y, budget)
                    })
                    .count() as u64
            })
            .max()
            .unwrap_or(0);
        let yes = PropertyReport::yes(Certificate::ShiftClassBound { m }, budget as usize);
        props.insert("bounded_trace".into(), yes.clone());
        props.insert("fell".into(), yes.clone());
        props.insert(
            "continuous_trace".into(),
            PropertyReport::yes(
                Certificate::MonolithicCover { bases: vec![("all morphisms".into(), "all morphisms".into())] },
                budget as usize,
            ),
        );
        props.insert("simple".into(), simple_kgraph_acyclic(kg, &boundary, budget));
    } else if kg.k == 1 {
        // Literal path-space evaluation over the representable classes.
        let g = kg.skeleton();
        let mut classes: Vec<(String, TailClass)> = g
            .find_cycles()
            .iter()
            .map(|c| (format!("({})^inf", c.names(g).join(" ")), TailClass::Cycle(c.names(g))))
            .collect();
        for w in g.sources() {
            classes.push((
                format!("->{}", g.vertex_name(w)),
                TailClass::SourceVertex(g.vertex_name(w).to_string()),
            ));
        }
        let mut liminal = PropertyReport::yes(
            Certificate::PathSpace { detail: "all shift classes finite per range vertex".into() },
            budget as usize,
        );
        'lim: for v in g.vertices() {
            for (cname, class) in &classes {
                if count_into_class_on(g, &NoRayAccess, v, class) == Count::Infinite {
                    liminal = PropertyReport::no(
                        Certificate::InfiniteShiftClass {
                            vertex: g.vertex_name(v).to_string(),
                            class: cname.clone(),
                        },
                        budget as usize,
                    );
                    break 'lim;
                }
            }
        }
        let mut postliminal = PropertyReport::yes(
            Certificate::PathSpace { detail: "every cycle class eventually readmits only itself".into() },
            budget as usize,
        );
        for c in &g.find_cycles() {
            let class = TailClass::Cycle(c.names(g));
            let u = c.range(g);
            match count_into_class_on(g, &NoRayAccess, u, &class) {
                Count::Finite(1) => {}
                Count::Finite(n) => {
                    postliminal = PropertyReport::no(
                        Certificate::MultipleReturns {
                            class: format!("({})^inf", c.names(g).join(" ")),
                            counts: vec![n],
                        },
                        budget as usize,
                    );
                    break;
                }
                Count::Infinite => {
                    postliminal = PropertyReport::no(
                        Certificate::MultipleReturns {
                            class: format!("({})^inf", c.names(g).join(" ")),
                            counts: vec![u64::MAX],
                        },
                        budget as usize,
                    );
                    break;
                }
            }
        }
        let trace = match liminal.verdict {
            Verdict::No => PropertyReport::no(
                liminal.certificate.clone().unwrap_or(Certificate::NonPrincipal),
                budget as usize,
            ),
            _ => PropertyReport::unknown(
                "cycles present: path groupoid is not principal",
                budget as usize,
            ),
        };
        props.insert("liminal".into(), liminal);
        props.insert("postliminal".into(), postliminal);
        props.insert("bounded_trace".into(), trace.clone());
        props.insert("fell".into(), trace.clone());
        props.insert("continuous_trace".into(), trace);
        let (cof, cert) = is_cofinal_finite(g);
        let entryless = g.find_cycles().iter().any(|c| g.cycle_entries(c).is_empty());
        let simple = if entryless {
            PropertyReport::no(
                Certificate::CycleEntry { cycle: vec![], entry: "(none)".into() },
                budget as usize,
            )
        } else if cof == Verdict::Yes {
            PropertyReport::yes(Certificate::Cofinal, budget as usize)
        } else {
            PropertyReport::no(cert, budget as usize)
        };
        props.insert("simple".into(), simple);
    } else {
        for prop in ["liminal", "postliminal", "simple"] {
            props.insert(
                prop.into(),
                PropertyReport::unknown(
                    "cyclic k-graph with k ≥ 2: beyond the representable path family",
                    budget as usize,
                ),
            );
        }
        for prop in ["bounded_trace", "fell", "continuous_trace"] {
            props.insert(
                prop.into(),
                PropertyReport::unknown("path groupoid is not principal", budget as usize),
            );
        }
    }

    let mut report = ClassificationReport { subject: "kgraph".into(), properties: props };
    report.propagate_chain(budget as usize);
    report
}

fn enumerate_boundary_finite(kg: &KGraph, budget: u32) -> Vec<KPath> {
    let cap = Degree(vec![kg.skeleton().vertex_count() as u32 + 1; kg.k]);
    let mut out = Vec::new();
    for v in kg.skeleton().vertices() {
        for m in kg.morphisms_from_up_to(v, &cap) {
            let x = KPath::Finite(m);
            if boundary_member(kg, &x, budget).is_yes() {
                out.push(x);
            }
        }
    }
    out
}

fn fd_over_boundary(kg: &KGraph, boundary: &[KPath], y: &KPath, x: &KPath, budget: u32) -> bool {
    // y frequently divertable to [x]: from every vertex of y some boundary
    // path is shift equivalent to x.
    let d = y.degree_cap(kg, budget);
    for n in d.box_iter() {
        let at = match y.vertex_at(kg, &n) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let ok = boundary.iter().any(|z| {
            z.range_name(kg) == at && shift_equivalent_k(kg, z, x, budget)
        });
        if !ok {
            return false;
        }
    }
    true
}

fn liminal_postliminal_over(
    kg: &KGraph,
    boundary: &[KPath],
    budget: u32,
) -> (PropertyReport, PropertyReport) {
    let mut liminal = PropertyReport::yes(
        Certificate::PathSpace {
            detail: "every frequently divertable boundary pair is shift equivalent".into(),
        },
        budget as usize,
    );
    'out: for x in boundary {
        for y in boundary {
            if fd_over_boundary(kg, boundary, y, x, budget) && !shift_equivalent_k(kg, y, x, budget)
            {
                liminal = PropertyReport::no(
                    Certificate::DivertableNotEquivalent {
                        from: morphism_label_of(kg, y),
                        to: morphism_label_of(kg, x),
                    },
                    budget as usize,
                );
                break 'out;
            }
        }
    }
    let mut postliminal = PropertyReport::yes(
        Certificate::PathSpace { detail: "a separating base point exists for every path".into() },
        budget as usize,
    );
    'out2: for x in boundary {
        let d = x.degree_cap(kg, budget);
        let mut found = false;
        'pts: for n in d.box_iter() {
            let at = match x.vertex_at(kg, &n) {
                Ok(v) => v,
                Err(_) => continue,
            };
            for y in boundary {
                if y.range_name(kg) == at
                    && fd_over_boundary(kg, boundary, y, x, budget)
                    && !shift_equivalent_k(kg, y, x, budget)
                {
                    continue 'pts;
                }
            }
            found = true;
            break;
        }
        if !found {
            postliminal = PropertyReport::no(
                Certificate::PathSpace {
                    detail: format!("no base point separates {}", morphism_label_of(kg, x)),
                },
                budget as usize,
            );
            break 'out2;
        }
    }
    (liminal, postliminal)
}

fn morphism_label_of(kg: &KGraph, x: &KPath) -> String {
    match x {
        KPath::Finite(m) => morphism_label(kg, m),
        KPath::Upk { prefix, tail } => format!(
            "{}·({})^inf",
            morphism_label(kg, prefix),
            morphism_label(kg, tail)
        ),
    }
}

fn simple_kgraph_acyclic(kg: &KGraph, boundary: &[KPath], budget: u32) -> PropertyReport {
    // Cofinality over the finite boundary-path space: every vertex reaches
    // (a vertex of) every boundary path.
    for v in kg.skeleton().vertices() {
        let reach = kg.skeleton().reachable_from(v);
        for x in boundary {
            let d = x.degree_cap(kg, budget);
            let hit = d.box_iter().iter().any(|n| {
                x.vertex_at(kg, n)
                    .ok()
                    .and_then(|name| kg.vertex(&name))
                    .map(|u| reach.contains(&u))
                    .unwrap_or(false)
            });
            if !hit {
                return PropertyReport::no(
                    Certificate::NotCofinal {
                        vertex: kg.vertex_name(v).to_string(),
                        tail: morphism_label_of(kg, x),
                    },
                    budget as usize,
                );
            }
        }
    }
    PropertyReport::yes(Certificate::Cofinal, budget as usize)
}

/// Stabilizing classification of a parametric k-graph over its boundary
/// schemas.
pub fn classify_staged_kgraph(family: &StagedKGraph, budget: u32) -> ClassificationReport {
    let mut props = BTreeMap::new();
    let window = budget.max(4);
    let stage = family.stage(window + 2);
    let verts = family.representative_vertices(window);

    // All schemas rooted in the representative window.
    let mut schemas: Vec<KSchema> = Vec::new();
    for v in &verts {
        schemas.extend(family.schemas_with_range(v, window));
    }

    // principal: any schema with a nonzero self-lag.
    let mut principal = PropertyReport::yes(Certificate::NoCycles, window as usize);
    for s in &schemas {
        let lags = family.schema_self_lags(s, 3);
        if let Some(lag) = lags.first() {
            principal = PropertyReport::no(
                Certificate::SelfLag {
                    path: family.schema_label(&stage, s, 3),
                    lag: lag.clone(),
                },
                window as usize,
            );
            break;
        }
    }
    props.insert("principal".into(), principal.clone());
    props.insert("af".into(), principal.clone());

    let partial_eq_le_infty = schemas.iter().all(|s| family.schema_le_infty(s, &stage));

    // Raw liminal/postliminal conditions over schemas.
    let fd = |y: &KSchema, x: &KSchema| -> bool {
        // From every window position along y, some schema is equivalent to x.
        let dy = family.schema_degree(y);
        let probes = Degree(
            dy.iter()
                .map(|c| c.map(|v| (v as u32).min(window)).unwrap_or(window))
                .collect(),
        );
        for n in probes.box_iter() {
            if let Some(sy) = family.schema_sigma(y, &n.0) {
                let at = family.schema_range(&sy);
                let ok = family
                    .schemas_with_range(&at, window + 4)
                    .iter()
                    .any(|z| family.schema_equivalent(z, x, window + 4));
                if !ok {
                    return false;
                }
            }
        }
        true
    };
    let mut raw_liminal: Result<(), (KSchema, KSchema)> = Ok(());
    'rl: for x in &schemas {
        for y in &schemas {
            if fd(y, x) && !family.schema_equivalent(y, x, window + 4) {
                raw_liminal = Err((y.clone(), x.clone()));
                break 'rl;
            }
        }
    }
    let mut raw_postliminal: Result<(), KSchema> = Ok(());
    'rp: for x in &schemas {
        let dx = family.schema_degree(x);
        let probes = Degree(
            dx.iter()
                .map(|c| c.map(|v| (v as u32).min(window)).unwrap_or(window))
                .collect(),
        );
        let mut found = false;
        'pts: for n in probes.box_iter() {
            let sx = match family.schema_sigma(x, &n.0) {
                Some(s) => s,
                None => continue,
            };
            let at = family.schema_range(&sx);
            for y in family.schemas_with_range(&at, window + 4) {
                if fd(&y, x) && !family.schema_equivalent(&y, x, window + 4) {
                    continue 'pts;
                }
            }
            found = true;
            break;
        }
        if !found {
            raw_postliminal = Err(x.clone());
            break 'rp;
        }
    }
    let liminal = match &raw_liminal {
        Ok(()) => PropertyReport::yes(
            Certificate::PathSpace {
                detail: "every frequently divertable boundary pair is shift equivalent".into(),
            },
            window as usize,
        ),
        Err((y, x)) if partial_eq_le_infty => PropertyReport::no(
            Certificate::DivertableNotEquivalent {
                from: family.schema_label(&stage, y, 3),
                to: family.schema_label(&stage, x, 3),
            },
            window as usize,
        ),
        Err(_) => PropertyReport::unknown(
            "boundary condition fails but ∂Λ ≠ Λ^{≤∞}: only the forward implication applies",
            window as usize,
        ),
    };
    let postliminal = match &raw_postliminal {
        Ok(()) => PropertyReport::yes(
            Certificate::PathSpace { detail: "a separating base point exists for every path".into() },
            window as usize,
        ),
        Err(x) if partial_eq_le_infty => PropertyReport::no(
            Certificate::PathSpace {
                detail: format!("no base point separates {}", family.schema_label(&stage, x, 3)),
            },
            window as usize,
        ),
        Err(_) => PropertyReport::unknown(
            "boundary condition fails but ∂Λ ≠ Λ^{≤∞}: only the forward implication applies",
            window as usize,
        ),
    };
    props.insert("liminal".into(), liminal);
    props.insert("postliminal".into(), postliminal);

    // Monolithic-extension cover analysis for the trace-class properties.
    let non_principal = principal.verdict == Verdict::No;
    let cts = if non_principal {
        PropertyReport::unknown("path groupoid is not principal", window as usize)
    } else {
        staged_kgraph_cts(family, &verts, window)
    };
    let fell = if non_principal {
        PropertyReport::unknown("path groupoid is not principal", window as usize)
    } else if cts.verdict == Verdict::Yes {
        PropertyReport {
            verdict: Verdict::Yes,
            certificate: cts.certificate.clone(),
            reason: Some("implied by continuous_trace".into()),
            budget_used: window as usize,
        }
    } else {
        staged_kgraph_fell(family, &schemas, window)
    };
    let bounded = if non_principal {
        PropertyReport::unknown("path groupoid is not principal", window as usize)
    } else {
        staged_kgraph_bounded(family, &verts, window)
    };
    props.insert("continuous_trace".into(), cts);
    props.insert("fell".into(), fell);
    props.insert("bounded_trace".into(), bounded);
    props.insert(
        "simple".into(),
        PropertyReport::unknown("cofinality of parametric k-graphs is not evaluated", window as usize),
    );

    let mut report =
        ClassificationReport { subject: format!("staged-kgraph:{}", family.name), properties: props };
    report.propagate_chain(window as usize);
    report
}

fn monolithic_bases_for(
    family: &StagedKGraph,
    v_set: &[String],
    window: u32,
) -> BTreeSet<(String, String)> {
    let stage = family.stage(window + 2);
    let mut schemas = Vec::new();
    for v in v_set {
        schemas.extend(family.schemas_with_range(v, window));
    }
    let mut bases = BTreeSet::new();
    for a in &schemas {
        for b in &schemas {
            if let Some((p, q)) = family.schema_merge(a, b, window) {
                let pa = family
                    .schema_segment(&stage, a, &Degree(p))
                    .map(|m| morphism_label(&stage, &m))
                    .unwrap_or_else(|e| format!("<{e}>"));
                let pb = family
                    .schema_segment(&stage, b, &Degree(q))
                    .map(|m| morphism_label(&stage, &m))
                    .unwrap_or_else(|e| format!("<{e}>"));
                bases.insert((pa, pb));
            }
        }
    }
    bases
}

fn staged_kgraph_cts(family: &StagedKGraph, verts: &[String], window: u32) -> PropertyReport {
    let mut subsets: Vec<Vec<String>> = verts.iter().map(|v| vec![v.clone()]).collect();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            subsets.push(vec![verts[i].clone(), verts[j].clone()]);
        }
    }
    let p = family.column_period.max(1) as u32;
    let mut cover: BTreeSet<(String, String)> = BTreeSet::new();
    for v_set in &subsets {
        let b1 = monolithic_bases_for(family, v_set, window);
        let b2 = monolithic_bases_for(family, v_set, window + p);
        let b3 = monolithic_bases_for(family, v_set, window + 2 * p);
        if b1 == b2 && b2 == b3 {
            cover.extend(b1);
        } else if b1.len() < b2.len() && b2.len() < b3.len() {
            return PropertyReport::no(
                Certificate::GrowingMonolithicBases {
                    vertices: v_set.clone(),
                    counts: vec![b1.len() as u64, b2.len() as u64, b3.len() as u64],
                },
                window as usize,
            );
        } else {
            return PropertyReport::unknown(
                format!("monolithic bases for {v_set:?} did not stabilize"),
                window as usize,
            );
        }
    }
    PropertyReport::yes(
        Certificate::MonolithicCover { bases: cover.into_iter().collect() },
        window as usize,
    )
}

fn staged_kgraph_fell(family: &StagedKGraph, schemas: &[KSchema], window: u32) -> PropertyReport {
    let p = family.column_period.max(1) as u32;
    for z in schemas {
        let d = family.schema_degree(z);
        let probes = Degree(
            d.iter()
                .map(|c| c.map(|v| (v as u32).min(window)).unwrap_or(window))
                .collect(),
        );
        let mut ok = false;
        for n in probes.box_iter() {
            if let Some(sz) = family.schema_sigma(z, &n.0) {
                let v = vec![family.schema_range(&sz)];
                let b1 = monolithic_bases_for(family, &v, window);
                let b2 = monolithic_bases_for(family, &v, window + p);
                if b1 == b2 {
                    ok = true;
                    break;
                }
            }
        }
        if !ok {
            return PropertyReport::no(
                Certificate::GrowingMonolithicBases {
                    vertices: vec![family.schema_range(z)],
                    counts: vec![],
                },
                window as usize,
            );
        }
    }
    PropertyReport::yes(
        Certificate::PathSpace { detail: "every path cone has a stable monolithic cover".into() },
        window as usize,
    )
}

fn staged_kgraph_bounded(family: &StagedKGraph, verts: &[String], window: u32) -> PropertyReport {
    let p = family.column_period.max(1) as u32;
    let count_at = |w: u32| -> u64 {
        let mut m = 0u64;
        for v in verts {
            let schemas = family.schemas_with_range(v, w);
            for x in &schemas {
                let class_size = schemas
                    .iter()
                    .filter(|y| family.schema_equivalent(y, x, w + 2))
                    .count() as u64;
                m = m.max(class_size);
            }
        }
        m
    };
    let (a, b) = (count_at(window), count_at(window + p));
    if a == b {
        PropertyReport::yes(Certificate::ShiftClassBound { m: a }, window as usize)
    } else {
        PropertyReport::unknown("per-vertex class sizes did not stabilize", window as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        alternating_family, loop_plus_edge, single_loop, single_loop_with_exit, two_row_family,
        two_times_family,
    };
    use crate::paths::AnchorRef;

    #[test]
    fn loop_plus_edge_verdicts() {
        let g = loop_plus_edge();
        let r = classify_digraph(&g);
        assert_eq!(r.verdict("liminal"), Verdict::No);
        assert_eq!(r.verdict("postliminal"), Verdict::Yes);
        assert_eq!(r.verdict("principal"), Verdict::No);
        assert_eq!(r.verdict("af"), Verdict::No);
        assert_eq!(r.verdict("simple"), Verdict::No);
        assert_eq!(r.verdict("bounded_trace"), Verdict::No);
        match &r.properties["liminal"].certificate {
            Some(Certificate::CycleEntry { cycle, entry }) => {
                assert_eq!(cycle, &vec!["g".to_string()]);
                assert_eq!(entry, "f");
            }
            other => panic!("expected cycle-entry certificate, got {other:?}"),
        }
        assert!(r.chain_consistent());
    }

    #[test]
    fn single_loop_verdicts() {
        let r = classify_digraph(&single_loop());
        assert_eq!(r.verdict("liminal"), Verdict::Yes);
        assert_eq!(r.verdict("postliminal"), Verdict::Yes);
        assert_eq!(r.verdict("simple"), Verdict::No);
        // Cycles without entries: trace properties are out of the theorems'
        // reach and stay undecided.
        assert_eq!(r.verdict("bounded_trace"), Verdict::Unknown);
        assert!(r.chain_consistent());
    }

    #[test]
    fn single_loop_with_exit_is_cofinal_but_not_simple() {
        // The exit edge points away from the loop, so the loop has no entry:
        // cofinal, liminal, but not simple.
        let g = single_loop_with_exit();
        let (cof, _) = is_cofinal_finite(&g);
        assert_eq!(cof, Verdict::Yes);
        let r = classify_digraph(&g);
        assert_eq!(r.verdict("simple"), Verdict::No);
        assert_eq!(r.verdict("liminal"), Verdict::Yes);
    }

    #[test]
    fn empty_graph_all_yes() {
        let g = DirectedGraph::new(crate::graph::GraphKind::Finite);
        let r = classify_digraph(&g);
        for prop in PROPERTIES {
            assert_eq!(r.verdict(prop), Verdict::Yes, "{prop}");
        }
    }

    #[test]
    fn acyclic_chain_all_yes() {
        let r = classify_digraph(&crate::families::acyclic_chain(3));
        for prop in PROPERTIES {
            assert_eq!(r.verdict(prop), Verdict::Yes, "{prop}");
        }
    }

    #[test]
    fn two_row_family_verdicts() {
        let f = two_row_family();
        let r = classify_staged_digraph(&f, 6);
        assert_eq!(r.verdict("liminal"), Verdict::No, "{:?}", r.properties["liminal"]);
        assert_eq!(r.verdict("postliminal"), Verdict::Yes, "{:?}", r.properties["postliminal"]);
        assert!(r.chain_consistent());
    }

    #[test]
    fn alternating_family_not_postliminal() {
        let f = alternating_family();
        let r = classify_staged_digraph(&f, 6);
        assert_eq!(r.verdict("postliminal"), Verdict::No, "{:?}", r.properties["postliminal"]);
    }

    #[test]
    fn two_times_family_bounded_trace_not_fell() {
        let f = two_times_family();
        let r = classify_staged_digraph(&f, 6);
        assert_eq!(r.verdict("bounded_trace"), Verdict::Yes, "{:?}", r.properties["bounded_trace"]);
        match &r.properties["bounded_trace"].certificate {
            Some(Certificate::ShiftClassBound { m }) => assert_eq!(*m, 2),
            other => panic!("expected shift-class bound, got {other:?}"),
        }
        assert_eq!(r.verdict("fell"), Verdict::No, "{:?}", r.properties["fell"]);
        assert_eq!(r.verdict("liminal"), Verdict::Yes);
        assert!(r.chain_consistent());
    }

    #[test]
    fn two_row_fd_examples() {
        let f = two_row_family();
        let v = f.track_index("v").unwrap() as u32;
        let u = f.track_index("u").unwrap() as u32;
        let x = f.ray_path(AnchorRef::Track { track: v }, 0);
        let y = f.ray_path(AnchorRef::Track { track: u }, 0);
        assert_eq!(frequently_divertable_staged(&f, &x, &y, 6), FdOutcome::Yes);
        match frequently_divertable_staged(&f, &y, &x, 6) {
            FdOutcome::No { stuck_vertex } => assert_eq!(stuck_vertex, "u0"),
            other => panic!("expected No, got {other:?}"),
        }
        // x is frequently divertable to its own class.
        assert_eq!(frequently_divertable_staged(&f, &x, &x, 6), FdOutcome::Yes);
    }

    #[test]
    fn omega_32_classification() {
        let kg = crate::kgraph::omega(2, &[3, 2]);
        let r = classify_kgraph(&kg, 4);
        assert_eq!(r.verdict("liminal"), Verdict::Yes, "{:?}", r.properties["liminal"]);
        assert_eq!(r.verdict("continuous_trace"), Verdict::Yes);
        assert!(r.chain_consistent());
    }

    #[test]
    fn parallel_rows_not_principal_with_lag() {
        let f = StagedKGraph::parallel_rows();
        let r = classify_staged_kgraph(&f, 4);
        assert_eq!(r.verdict("principal"), Verdict::No);
        match &r.properties["principal"].certificate {
            Some(Certificate::SelfLag { lag, .. }) => assert_eq!(lag, &vec![1, -1]),
            other => panic!("expected self-lag certificate, got {other:?}"),
        }
        assert_eq!(r.verdict("liminal"), Verdict::Yes, "{:?}", r.properties["liminal"]);
        assert_eq!(r.verdict("bounded_trace"), Verdict::Unknown);
    }

    #[test]
    fn omega_inf_and_robertson_have_continuous_trace() {
        for f in [StagedKGraph::omega_inf(2, vec![None, Some(2)]), StagedKGraph::robertson()] {
            let r = classify_staged_kgraph(&f, 4);
            assert_eq!(
                r.verdict("continuous_trace"),
                Verdict::Yes,
                "{} {:?}",
                f.name,
                r.properties["continuous_trace"]
            );
            assert_eq!(r.verdict("principal"), Verdict::Yes, "{}", f.name);
            assert_eq!(r.verdict("liminal"), Verdict::Yes, "{}", f.name);
            assert!(r.chain_consistent());
        }
    }
}

//! Built-in graphs and staged families used throughout the test corpus and
//! exposed by the CLI registry.

use crate::graph::{DirectedGraph, GraphKind};
use crate::kgraph::{omega, KGraph, KGraphBuilder};
use crate::kstaged::StagedKGraph;
use crate::paths::{AnchorRef, FinitePath, InfinitePath, RayResolver};
use crate::staged::{
    EndpointSpec, FamilyContracts, HairSpec, SporadicSpec, StagedDigraph, StagedDoc, TemplateSpec,
    TrackSpec,
};

fn tmpl(id: &str, rt: &str, ro: i64, st: &str, so: i64, phase: usize, period: usize) -> TemplateSpec {
    TemplateSpec {
        id: id.into(),
        r: EndpointSpec { track: rt.into(), offset: ro },
        s: EndpointSpec { track: st.into(), offset: so },
        phase,
        period,
    }
}

fn staged(name: &str, doc: StagedDoc) -> StagedDigraph {
    StagedDigraph::from_doc(name, doc).expect("built-in family is well-formed")
}

/// One ray of vertices with a single edge between consecutive columns.
pub fn bare_ray() -> StagedDigraph {
    staged(
        "ray",
        StagedDoc {
            tracks: vec![TrackSpec { id: "v".into() }],
            templates: vec![tmpl("e", "v", 0, "v", 1, 0, 1)],
            hairs: vec![],
            sporadic: SporadicSpec::default(),
            contracts: Some(FamilyContracts { column_period: 1, onset: 0, anchor_complete: true }),
        },
    )
}

/// The k-times convergence family: a main row `v`, and at every column `n`
/// parallel edges `f1@n … f{k}@n` from a hair top `w_n` into `v_n`.
pub fn ktimes_family(k: usize) -> StagedDigraph {
    let mut templates = vec![tmpl("e", "v", 0, "v", 1, 0, 1)];
    for i in 1..=k {
        templates.push(tmpl(&format!("f{i}_"), "v", 0, "w", 0, 0, 1));
    }
    staged(
        &format!("thesis:ktimes:{k}"),
        StagedDoc {
            tracks: vec![TrackSpec { id: "v".into() }, TrackSpec { id: "w".into() }],
            templates,
            hairs: vec![HairSpec { attach_track: "w".into(), chain: true }],
            sporadic: SporadicSpec::default(),
            contracts: Some(FamilyContracts { column_period: 1, onset: 0, anchor_complete: true }),
        },
    )
}

/// The 2-times family (two parallel edges per column).
pub fn two_times_family() -> StagedDigraph {
    let mut f = ktimes_family(2);
    f.name = "thesis:2times".into();
    f
}

/// Two parallel edges at even columns and three at odd columns, giving lower
/// multiplicity 2 and upper multiplicity 3.
pub fn ml2mu3_family() -> StagedDigraph {
    staged(
        "thesis:ml2mu3",
        StagedDoc {
            tracks: vec![TrackSpec { id: "v".into() }, TrackSpec { id: "w".into() }],
            templates: vec![
                tmpl("e", "v", 0, "v", 1, 0, 1),
                tmpl("f1_", "v", 0, "w", 0, 0, 1),
                tmpl("f2_", "v", 0, "w", 0, 0, 1),
                tmpl("f3_", "v", 0, "w", 0, 1, 2),
            ],
            hairs: vec![HairSpec { attach_track: "w".into(), chain: true }],
            sporadic: SporadicSpec::default(),
            contracts: Some(FamilyContracts { column_period: 2, onset: 0, anchor_complete: true }),
        },
    )
}

/// Two limit rows `v` and `w` fed from a hub row `u`; each hub receives two
/// parallel edges from a hair top. The member sequence converges 2-times to
/// both row paths, so the orbit space is not Hausdorff.
pub fn non_hausdorff_family() -> StagedDigraph {
    staged(
        "thesis:nonhausdorff",
        StagedDoc {
            tracks: vec![
                TrackSpec { id: "v".into() },
                TrackSpec { id: "w".into() },
                TrackSpec { id: "u".into() },
                TrackSpec { id: "t".into() },
            ],
            templates: vec![
                tmpl("ev", "v", 0, "v", 1, 0, 1),
                tmpl("ew", "w", 0, "w", 1, 0, 1),
                tmpl("uv", "v", 0, "u", 0, 0, 1),
                tmpl("uw", "w", 0, "u", 0, 0, 1),
                tmpl("f1_", "u", 0, "t", 0, 0, 1),
                tmpl("f2_", "u", 0, "t", 0, 0, 1),
            ],
            hairs: vec![HairSpec { attach_track: "t".into(), chain: true }],
            sporadic: SporadicSpec::default(),
            contracts: Some(FamilyContracts { column_period: 1, onset: 0, anchor_complete: true }),
        },
    )
}

/// Two rows with a one-way diversion `f@n : v_n ← u_n` at every column. The
/// top row is frequently divertable to the bottom class but not conversely.
pub fn two_row_family() -> StagedDigraph {
    staged(
        "thesis:two_row",
        StagedDoc {
            tracks: vec![TrackSpec { id: "v".into() }, TrackSpec { id: "u".into() }],
            templates: vec![
                tmpl("ev", "v", 0, "v", 1, 0, 1),
                tmpl("eu", "u", 0, "u", 1, 0, 1),
                tmpl("f", "v", 0, "u", 0, 0, 1),
            ],
            hairs: vec![],
            sporadic: SporadicSpec::default(),
            contracts: Some(FamilyContracts { column_period: 1, onset: 0, anchor_complete: true }),
        },
    )
}

/// Two rows whose crossing edges alternate direction by column, so paths can
/// weave between the rows forever; not postliminal.
pub fn alternating_family() -> StagedDigraph {
    staged(
        "thesis:alternating",
        StagedDoc {
            tracks: vec![TrackSpec { id: "v".into() }, TrackSpec { id: "u".into() }],
            templates: vec![
                tmpl("ev", "v", 0, "v", 1, 0, 1),
                tmpl("eu", "u", 0, "u", 1, 0, 1),
                tmpl("fd", "v", 0, "u", 0, 0, 2),
                tmpl("fu", "u", 0, "v", 0, 1, 2),
            ],
            hairs: vec![],
            sporadic: SporadicSpec::default(),
            // Weaving tails follow no single anchor.
            contracts: Some(FamilyContracts { column_period: 2, onset: 0, anchor_complete: false }),
        },
    )
}

/// A loop `g` at `u` with one extra edge `f : u ← v`; `v` is a source and
/// the graph is neither liminal nor cofinal.
pub fn loop_plus_edge() -> DirectedGraph {
    let mut g = DirectedGraph::new(GraphKind::Finite);
    g.add_vertex("u").unwrap();
    g.add_vertex("v").unwrap();
    g.add_edge("g", "u", "u").unwrap();
    g.add_edge("f", "u", "v").unwrap();
    g
}

pub fn single_loop() -> DirectedGraph {
    let mut g = DirectedGraph::new(GraphKind::Finite);
    g.add_vertex("u").unwrap();
    g.add_edge("g", "u", "u").unwrap();
    g
}

/// A loop at `u` plus an exit edge `h : v ← u`; cofinal, no sources.
pub fn single_loop_with_exit() -> DirectedGraph {
    let mut g = DirectedGraph::new(GraphKind::Finite);
    g.add_vertex("u").unwrap();
    g.add_vertex("v").unwrap();
    g.add_edge("g", "u", "u").unwrap();
    g.add_edge("h", "v", "u").unwrap();
    g
}

pub fn acyclic_chain(n: usize) -> DirectedGraph {
    let mut g = DirectedGraph::new(GraphKind::Finite);
    for i in 0..=n {
        g.add_vertex(&format!("v{i}")).unwrap();
    }
    for i in 0..n {
        g.add_edge(&format!("e{i}"), &format!("v{i}"), &format!("v{}", i + 1)).unwrap();
    }
    g
}

/// The non-locally-convex corner: solid `α : v ← u`, dashed `β : v ← w`.
pub fn corner_kgraph() -> KGraph {
    let mut b = KGraphBuilder::new(2);
    b.vertex("v").vertex("u").vertex("w");
    b.edge("alpha", "v", "u", 1);
    b.edge("beta", "v", "w", 2);
    b.build().expect("corner 2-graph")
}

/// Built-in staged directed-graph families addressable by name.
pub fn builtin_staged(name: &str) -> Option<StagedDigraph> {
    match name {
        "thesis:2times" => Some(two_times_family()),
        "thesis:ml2mu3" => Some(ml2mu3_family()),
        "thesis:nonhausdorff" => Some(non_hausdorff_family()),
        "thesis:two_row" => Some(two_row_family()),
        "thesis:alternating" => Some(alternating_family()),
        "ray" => Some(bare_ray()),
        _ => {
            let k: usize = name.strip_prefix("thesis:ktimes:")?.parse().ok()?;
            if (2..=8).contains(&k) {
                Some(ktimes_family(k))
            } else {
                None
            }
        }
    }
}

/// Built-in finite directed graphs.
pub fn builtin_digraph(name: &str) -> Option<DirectedGraph> {
    match name {
        "loop_plus_edge" => Some(loop_plus_edge()),
        "single_loop" => Some(single_loop()),
        "single_loop_with_exit" => Some(single_loop_with_exit()),
        "acyclic_chain" => Some(acyclic_chain(3)),
        _ => None,
    }
}

/// Built-in finite k-graphs: `corner` and `omega:k:m1,…,mk` (finite bounds).
pub fn builtin_kgraph(name: &str) -> Option<KGraph> {
    if name == "corner" {
        return Some(corner_kgraph());
    }
    let rest = name.strip_prefix("omega:")?;
    let (k, bounds) = rest.split_once(':')?;
    let k: usize = k.parse().ok()?;
    let m: Option<Vec<u32>> = bounds.split(',').map(|c| c.parse().ok()).collect();
    let m = m?;
    if m.len() != k {
        return None;
    }
    Some(omega(k, &m))
}

/// Built-in parametric k-graphs: `robertson`, `parallel_rows`, and
/// `omega:k:…` with `inf` coordinates.
pub fn builtin_staged_kgraph(name: &str) -> Option<StagedKGraph> {
    match name {
        "robertson" => Some(StagedKGraph::robertson()),
        "parallel_rows" => Some(StagedKGraph::parallel_rows()),
        _ => {
            let rest = name.strip_prefix("omega:")?;
            let (k, bounds) = rest.split_once(':')?;
            let k: usize = k.parse().ok()?;
            let m: Option<Vec<Option<u32>>> = bounds
                .split(',')
                .map(|c| {
                    if c == "inf" {
                        Some(None)
                    } else {
                        c.parse().ok().map(Some)
                    }
                })
                .collect();
            let m = m?;
            if m.len() != k || m.iter().all(|c| c.is_some()) {
                return None;
            }
            Some(StagedKGraph::omega_inf(k, m))
        }
    }
}

/// The distinguished limit paths and member sequence of a convergence family.
pub struct SequenceFamily {
    pub name: String,
    pub graph: StagedDigraph,
    /// Number of parallel diversion edges per column; for ml2mu3 this is the
    /// column-parity-dependent pair (even, odd).
    pub parallel: (usize, usize),
    /// Hair track index the members dive into.
    hair_track: u32,
    /// The limit targets (the 2-times graphs have one; the non-Hausdorff
    /// family has two).
    targets: Vec<AnchorRef>,
    /// Per-column head builder for the member diving via parallel edge `i`
    /// toward target `t`.
    kind: FamilyKind,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FamilyKind {
    KTimes,
    NonHausdorff,
}

impl SequenceFamily {
    pub fn new(name: &str) -> Option<SequenceFamily> {
        let graph = builtin_staged(name)?;
        match name {
            "thesis:nonhausdorff" => Some(SequenceFamily {
                name: name.into(),
                parallel: (2, 2),
                hair_track: graph.track_index("t").unwrap() as u32,
                targets: vec![
                    AnchorRef::Track { track: graph.track_index("v").unwrap() as u32 },
                    AnchorRef::Track { track: graph.track_index("w").unwrap() as u32 },
                ],
                graph,
                kind: FamilyKind::NonHausdorff,
            }),
            "thesis:2times" | "thesis:ml2mu3" => Some(SequenceFamily {
                name: name.into(),
                parallel: if name == "thesis:ml2mu3" { (2, 3) } else { (2, 2) },
                hair_track: graph.track_index("w").unwrap() as u32,
                targets: vec![AnchorRef::Track { track: graph.track_index("v").unwrap() as u32 }],
                graph,
                kind: FamilyKind::KTimes,
            }),
            _ => {
                let k: usize = name.strip_prefix("thesis:ktimes:")?.parse().ok()?;
                Some(SequenceFamily {
                    name: name.into(),
                    parallel: (k, k),
                    hair_track: graph.track_index("w").unwrap() as u32,
                    targets: vec![
                        AnchorRef::Track { track: graph.track_index("v").unwrap() as u32 },
                    ],
                    graph,
                    kind: FamilyKind::KTimes,
                })
            }
        }
    }

    pub fn parallel_at(&self, col: usize) -> usize {
        if col % 2 == 0 {
            self.parallel.0
        } else {
            self.parallel.1
        }
    }

    /// The maximum number of diversion channels available at every column.
    pub fn min_parallel(&self) -> usize {
        self.parallel.0.min(self.parallel.1)
    }

    pub fn targets(&self) -> &[AnchorRef] {
        &self.targets
    }

    /// The limit path for a target (empty head on the target's ray).
    pub fn limit(&self, target: usize) -> InfinitePath {
        self.graph.ray_path(self.targets[target], 0)
    }

    /// The member `x^{(n)}`: dive at column `n` through the first parallel
    /// edge.
    pub fn member(&self, n: usize) -> InfinitePath {
        self.diversion(0, 1, n)
    }

    /// The path that follows target `t`'s row to column `n` and dives there
    /// through parallel edge `i` (1-based).
    pub fn diversion(&self, target: usize, i: usize, n: usize) -> InfinitePath {
        assert!(i >= 1 && i <= self.parallel_at(n), "parallel edge {i} absent at column {n}");
        let g = &self.graph;
        let track = match self.targets[target] {
            AnchorRef::Track { track } => track as usize,
            _ => unreachable!("targets are rows"),
        };
        let track_id = g.track_id(track).to_string();
        let mut edges: Vec<String> = Vec::new();
        // Row edges up to column n. Built-in rows use template id "e",
        // "ev", "ew" or "eu"; resolve through the ray edge naming.
        for c in 0..n {
            edges.push(g.ray_edge(self.targets[target], c));
        }
        match self.kind {
            FamilyKind::KTimes => {
                edges.push(g.template_edge_name(&format!("f{i}_"), n));
            }
            FamilyKind::NonHausdorff => {
                let hub = if track_id == "v" { "uv" } else { "uw" };
                edges.push(g.template_edge_name(hub, n));
                edges.push(g.template_edge_name(&format!("f{i}_"), n));
            }
        }
        let head = FinitePath {
            at: g.track_vertex_name(track, 0),
            edges,
        };
        g.anchored_path(head, AnchorRef::Hair { track: self.hair_track, col: n as u32 }, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::shift_equivalent;

    #[test]
    fn all_builtin_families_have_stable_stages() {
        for name in [
            "thesis:2times",
            "thesis:ktimes:3",
            "thesis:ml2mu3",
            "thesis:nonhausdorff",
            "thesis:two_row",
            "thesis:alternating",
        ] {
            let f = builtin_staged(name).unwrap();
            for n in 2..5 {
                let report = f.validate(n);
                assert!(report.is_valid(), "{name} stage {n}: {:?}", report.findings);
            }
            f.verify_rays(&f.stage(8), 6).unwrap();
        }
    }

    #[test]
    fn member_paths_are_valid_and_equivalent_to_diversions() {
        let fam = SequenceFamily::new("thesis:2times").unwrap();
        let g = fam.graph.stage(8);
        for n in 0..4 {
            let x = fam.member(n);
            match &x {
                InfinitePath::Anchored { head, .. } => head.validate(&g).unwrap(),
                _ => panic!("member should be anchored"),
            }
            let via2 = fam.diversion(0, 2, n);
            let lags = shift_equivalent(&x, &via2);
            assert!(lags.contains(0), "lag 0 between parallel diversions");
        }
    }

    #[test]
    fn nonhausdorff_members_reach_both_targets() {
        let fam = SequenceFamily::new("thesis:nonhausdorff").unwrap();
        let g = fam.graph.stage(8);
        let to_x = fam.diversion(0, 2, 3);
        let to_y = fam.diversion(1, 1, 3);
        for p in [&to_x, &to_y] {
            match p {
                InfinitePath::Anchored { head, .. } => head.validate(&g).unwrap(),
                _ => panic!(),
            }
        }
        assert_eq!(to_x.range_name(), "v0");
        assert_eq!(to_y.range_name(), "w0");
        // Both diversions share the member's hair class.
        assert!(shift_equivalent(&to_x, &fam.member(3)).contains(0));
        assert!(shift_equivalent(&to_y, &fam.member(3)).contains(0));
    }

    #[test]
    fn ml2mu3_has_three_channels_at_odd_columns_only() {
        let fam = SequenceFamily::new("thesis:ml2mu3").unwrap();
        assert_eq!(fam.parallel_at(0), 2);
        assert_eq!(fam.parallel_at(1), 3);
        let g = fam.graph.stage(6);
        assert!(g.edge("f3_1").is_some());
        assert!(g.edge("f3_0").is_none());
        assert!(g.edge("f3_2").is_none());
        assert!(g.edge("f3_3").is_some());
    }

    #[test]
    fn builtin_kgraphs_resolve() {
        assert!(builtin_kgraph("omega:2:3,2").is_some());
        assert!(builtin_kgraph("corner").is_some());
        assert!(builtin_staged_kgraph("omega:2:inf,2").is_some());
        assert!(builtin_staged_kgraph("robertson").is_some());
        assert!(builtin_kgraph("omega:2:3").is_none());
    }
}

//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Every tolerance here is exact (integer counts and
//! verdicts); nothing is deferred to later calibration.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;

use ckgraph::ck::{
    boundary_representation, boundary_representation_digraph, ck_verify_digraph, ck_verify_kgraph,
    Matrix,
};
use ckgraph::classify::{
    classify_digraph, classify_kgraph, classify_staged_digraph, classify_staged_kgraph,
    Certificate, Verdict,
};
use ckgraph::desourcify::{materialize_truncation, BoundaryCtx};
use ckgraph::families::{self, SequenceFamily};
use ckgraph::graph::{DirectedGraph, GraphKind};
use ckgraph::groupoid::{
    default_escape_cover, k_times_witness_check, multiplicity_profile, WitnessChoice,
};
use ckgraph::kgraph::{omega, Degree, KGraphBuilder};
use ckgraph::kstaged::{staged_boundary_member, KSchema, StagedKGraph};
use ckgraph::staged::{count_into_class_on, Count, NoRayAccess, TailClass};

fn line(criterion: &str, ok: bool) {
    println!("[{}] {criterion}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion failed: {criterion}");
}

/// Criterion 1: classification and boundary verdicts match the published
/// analyses of every named example graph, exactly.
#[test]
fn criterion_1_named_example_verdicts() {
    let mut ok = true;

    let r = classify_digraph(&families::loop_plus_edge());
    ok &= r.verdict("liminal") == Verdict::No;

    let two_row = families::two_row_family();
    let r = classify_staged_digraph(&two_row, 8);
    ok &= r.verdict("liminal") == Verdict::No;
    ok &= r.verdict("postliminal") == Verdict::Yes;

    let alternating = families::alternating_family();
    let r = classify_staged_digraph(&alternating, 8);
    ok &= r.verdict("postliminal") == Verdict::No;

    let two_times = families::two_times_family();
    let r = classify_staged_digraph(&two_times, 8);
    ok &= r.verdict("bounded_trace") == Verdict::Yes;
    ok &= r.verdict("fell") == Verdict::No;

    let r = classify_kgraph(&omega(2, &[3, 2]), 4);
    ok &= r.verdict("liminal") == Verdict::Yes;

    let r = classify_staged_kgraph(&StagedKGraph::parallel_rows(), 4);
    ok &= r.verdict("principal") == Verdict::No;
    ok &= matches!(
        &r.properties["principal"].certificate,
        Some(Certificate::SelfLag { lag, .. }) if lag == &vec![1, -1]
    );

    for family in [
        StagedKGraph::omega_inf(2, vec![None, Some(2)]),
        StagedKGraph::robertson(),
    ] {
        let r = classify_staged_kgraph(&family, 4);
        ok &= r.verdict("continuous_trace") == Verdict::Yes;
    }
    let r = classify_kgraph(&families::corner_kgraph(), 4);
    ok &= r.verdict("continuous_trace") == Verdict::Yes;

    let robertson = StagedKGraph::robertson();
    let x = KSchema::RobSolid { col: 0 };
    ok &= staged_boundary_member(&robertson, &x, 2).is_yes();
    ok &= !robertson.schema_le_infty(&x, &robertson.stage(8));

    line("1: named-example verdicts reproduce the published analyses", ok);
}

/// Criterion 2: exact multiplicity numbers on the built-in families with
/// default budgets, certified, under ten seconds per profile.
#[test]
fn criterion_2_multiplicity_numbers() {
    let mut ok = true;
    let cases: Vec<(&str, u64, u64)> = vec![
        ("thesis:2times", 2, 2),
        ("thesis:ktimes:2", 2, 2),
        ("thesis:ktimes:3", 3, 3),
        ("thesis:ktimes:4", 4, 4),
        ("thesis:ml2mu3", 2, 3),
    ];
    for (name, ml, mu) in cases {
        let fam = SequenceFamily::new(name).unwrap();
        let start = std::time::Instant::now();
        let p = multiplicity_profile(&fam, 0, 6, 16, 8);
        let elapsed = start.elapsed();
        let good =
            p.m_l == ml && p.m_u == mu && p.certified && elapsed.as_secs_f64() < 10.0;
        if !good {
            eprintln!("{name}: got ({}, {}), certified={}, {elapsed:?}", p.m_l, p.m_u, p.certified);
        }
        ok &= good;
    }
    line("2: M_L/M_U exact and certified on all built-in families (<10s each)", ok);
}

/// Independent oracle for the finite-graph liminal/postliminal conditions:
/// enumerates join paths literally and decides class finiteness by the
/// pumping criterion (a repeated vertex on a join path).
mod oracle {
    use super::*;
    use ckgraph::graph::VertexId;

    /// Tail classes: one per simple cycle and one per source.
    pub enum Tail {
        Cycle(ckgraph::graph::Cycle),
        Source(VertexId),
    }

    pub fn tails(g: &DirectedGraph) -> Vec<Tail> {
        let mut out: Vec<Tail> = g.find_cycles().into_iter().map(Tail::Cycle).collect();
        out.extend(g.sources().into_iter().map(Tail::Source));
        out
    }

    /// Join-path count from `v` into the class: `None` means infinite
    /// (a join path revisits a vertex, so it pumps).
    pub fn count(g: &DirectedGraph, v: VertexId, tail: &Tail) -> Option<u64> {
        let (targets, forbidden): (Vec<VertexId>, Vec<Option<ckgraph::graph::EdgeId>>) = match tail
        {
            Tail::Source(w) => (vec![*w], vec![None]),
            Tail::Cycle(c) => {
                let verts = c.vertices(g);
                let mut forb = Vec::new();
                for i in 0..c.edges.len() {
                    forb.push(Some(c.edges[(i + c.edges.len() - 1) % c.edges.len()]));
                }
                (verts, forb)
            }
        };
        let mut total = 0u64;
        for (ti, &t) in targets.iter().enumerate() {
            // DFS over all edge paths from v of length ≤ 2|V|+2 ending at t
            // with the allowed last edge; a non-simple join path pumps.
            let cap = 2 * g.vertex_count() + 2;
            let mut stack: Vec<(VertexId, Vec<ckgraph::graph::EdgeId>)> = vec![(v, vec![])];
            while let Some((at, path)) = stack.pop() {
                if at == t {
                    let last_ok = match (path.last(), forbidden[ti]) {
                        (None, _) => true,
                        (Some(&e), Some(f)) => e != f,
                        (Some(_), None) => true,
                    };
                    if last_ok {
                        // Vertex-repetition along the join path pumps.
                        let mut seen = BTreeSet::new();
                        seen.insert(g.vertex_name(v).to_string());
                        let mut simple = true;
                        let mut cur = v;
                        for &e in &path {
                            cur = g.source(e);
                            if !seen.insert(g.vertex_name(cur).to_string()) {
                                simple = false;
                                break;
                            }
                        }
                        if simple {
                            total += 1;
                        } else {
                            return None;
                        }
                    }
                }
                if path.len() >= cap {
                    continue;
                }
                for &e in g.edges_with_range(at) {
                    let mut next = path.clone();
                    next.push(e);
                    stack.push((g.source(e), next));
                }
            }
        }
        Some(total)
    }

    /// Literal liminal condition: every (vertex, class) count is finite.
    pub fn liminal(g: &DirectedGraph) -> bool {
        let ts = tails(g);
        g.vertices().all(|v| ts.iter().all(|t| count(g, v, t).is_some()))
    }

    /// Literal postliminal condition: every cycle class eventually readmits
    /// only its own shift (the count at a cycle vertex is exactly one).
    pub fn postliminal(g: &DirectedGraph) -> bool {
        g.find_cycles().iter().all(|c| {
            let u = c.range(g);
            count(g, u, &Tail::Cycle(c.clone())) == Some(1)
        })
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn random_graph(seed: u64) -> DirectedGraph {
    let mut s = seed;
    let nv = 2 + (splitmix(&mut s) % 5) as usize; // ≤ 6 vertices
    let ne = (splitmix(&mut s) % 11) as usize; // ≤ 10 edges
    let mut g = DirectedGraph::new(GraphKind::Finite);
    for i in 0..nv {
        g.add_vertex(&format!("v{i}")).unwrap();
    }
    for i in 0..ne {
        let r = (splitmix(&mut s) % nv as u64) as usize;
        let src = (splitmix(&mut s) % nv as u64) as usize;
        g.add_edge(&format!("e{i}"), &format!("v{r}"), &format!("v{src}")).unwrap();
    }
    g
}

/// Criterion 3: on ≥500 random graphs the derived structural verdicts match
/// the literal path-space oracle with zero disagreements.
#[test]
fn criterion_3_oracle_equivalence() {
    let mut disagreements = 0usize;
    let total = 500;
    for seed in 0..total {
        let g = random_graph(seed as u64 * 7919 + 1);
        let report = classify_digraph(&g);
        let lim = oracle::liminal(&g);
        let post = oracle::postliminal(&g);
        let derived_lim = report.verdict("liminal") == Verdict::Yes;
        let derived_post = report.verdict("postliminal") == Verdict::Yes;
        if lim != derived_lim || post != derived_post {
            disagreements += 1;
            eprintln!(
                "seed {seed}: oracle (lim={lim}, post={post}) vs derived ({derived_lim}, {derived_post})"
            );
        }
    }
    line(
        &format!("3: derived verdicts agree with the path-space oracle on {total} random graphs"),
        disagreements == 0,
    );
}

/// Criterion 4 (partly; the randomized laws live in the properties suite):
/// the implication chain is never violated on any decided report.
#[test]
fn criterion_4_implication_chain() {
    let mut ok = true;
    for seed in 0..300u64 {
        let g = random_graph(seed * 31 + 5);
        ok &= classify_digraph(&g).chain_consistent();
    }
    for name in [
        "thesis:2times",
        "thesis:ktimes:3",
        "thesis:ml2mu3",
        "thesis:nonhausdorff",
        "thesis:two_row",
        "thesis:alternating",
    ] {
        let f = families::builtin_staged(name).unwrap();
        ok &= classify_staged_digraph(&f, 7).chain_consistent();
    }
    for f in [
        StagedKGraph::robertson(),
        StagedKGraph::parallel_rows(),
        StagedKGraph::omega_inf(2, vec![None, Some(2)]),
    ] {
        ok &= classify_staged_kgraph(&f, 4).chain_consistent();
    }
    line("4: implication chain never violated on decided reports", ok);
}

/// Criterion 5: factorization validation accepts the grid builders and
/// rejects perturbed square tables; CK verification passes the boundary
/// representation and flags every single-relation mutation.
#[test]
fn criterion_5_factorization_and_ck() {
    let mut ok = true;

    for (k, m) in [(1usize, vec![3u32]), (2, vec![3, 2]), (3, vec![2, 1, 1])] {
        ok &= omega(k, &m).validate().is_valid();
    }

    // 50 random perturbations of the Ω_{2,(2,2)} square table must all be
    // rejected.
    let mut seed = 12345u64;
    let mut rejected = 0;
    for _ in 0..50 {
        let doc = ckgraph::doc::KGraphDoc::from_kgraph(&omega(2, &[2, 2]));
        let mut doc = doc;
        let n = doc.squares.len();
        let i = (splitmix(&mut seed) % n as u64) as usize;
        match splitmix(&mut seed) % 3 {
            0 => {
                // Point the square at a wrong partner.
                let j = (splitmix(&mut seed) % n as u64) as usize;
                if i == j {
                    doc.squares[i][1].swap(0, 1);
                } else {
                    let other = doc.squares[j][1].clone();
                    doc.squares[i][1] = other;
                }
            }
            1 => {
                // Drop a square: totality fails.
                doc.squares.remove(i);
            }
            _ => {
                // Swap the partner orientation: colors no longer match.
                doc.squares[i][1].swap(0, 1);
            }
        }
        match doc.build() {
            Ok(kg) => {
                if !kg.validate().is_valid() {
                    rejected += 1;
                }
            }
            // Duplicate or conflicting table entries are rejected at build.
            Err(_) => rejected += 1,
        }
    }
    ok &= rejected == 50;

    // Exact CK families from the boundary representation.
    let kg = omega(2, &[2, 1]);
    let fam = boundary_representation(&kg, 3).unwrap();
    ok &= ck_verify_kgraph(&kg, &fam, 2).unwrap().is_valid();

    // Mutation testing: each single mutation must be flagged, and the first
    // violated relation is the expected one.
    let mutations: Vec<(&str, Box<dyn Fn(&mut ckgraph::ck::CKFamily)>)> = vec![
        (
            "CK(i)",
            Box::new(|f: &mut ckgraph::ck::CKFamily| {
                let k = f.edge_ops.keys().next().unwrap().clone();
                f.edge_ops.insert(k, Matrix::zero(f.dim));
            }),
        ),
        (
            "projection",
            Box::new(|f: &mut ckgraph::ck::CKFamily| {
                let k = f.vertex_ops.keys().next().unwrap().clone();
                let mut m = f.vertex_ops[&k].clone();
                m.set_int(0, 1, 1);
                f.vertex_ops.insert(k, m);
            }),
        ),
        (
            "swap",
            Box::new(|f: &mut ckgraph::ck::CKFamily| {
                let names: Vec<String> = f.edge_ops.keys().cloned().collect();
                let a = f.edge_ops[&names[0]].clone();
                let b = f.edge_ops[&names[1]].clone();
                f.edge_ops.insert(names[0].clone(), b);
                f.edge_ops.insert(names[1].clone(), a);
            }),
        ),
    ];
    for (label, mutate) in &mutations {
        let mut bad = fam.clone();
        mutate(&mut bad);
        let report = ck_verify_kgraph(&kg, &bad, 2).unwrap();
        if report.is_valid() {
            eprintln!("mutation `{label}` was not flagged");
            ok = false;
        }
    }

    // Directed-graph relations, including the CK(ii) sum.
    let g = families::acyclic_chain(3);
    let dfam = boundary_representation_digraph(&g).unwrap();
    ok &= ck_verify_digraph(&g, &dfam).unwrap().is_valid();
    let mut bad = dfam.clone();
    let k = bad.edge_ops.keys().next().unwrap().clone();
    bad.edge_ops.insert(k, Matrix::zero(bad.dim));
    let report = ck_verify_digraph(&g, &bad).unwrap();
    ok &= report.violations.iter().any(|v| v.relation == "CK(i)")
        && report.violations.iter().any(|v| v.relation == "CK(ii)");

    line("5: factorization validation and CK mutation testing", ok);
}

/// Criterion 6: the Robertson desourcification truncation reproduces the
/// drawn skeleton column by column, and interior classes are sourceless.
#[test]
fn criterion_6_desourcification_figure() {
    let family = StagedKGraph::robertson();
    let ctx = BoundaryCtx::staged(&family, 10);
    let roots: Vec<String> = (0..=6)
        .flat_map(|c| vec![format!("v{c}"), format!("w{c}")])
        .chain((1..=6).map(|c| format!("a{c}")))
        .collect();
    let frag = materialize_truncation(&ctx, &roots, &Degree(vec![3, 3])).unwrap();
    let mut ok = true;

    for c in 0..=3u32 {
        // Main-row chain: ι(v_c) plus the dashed excess chain below it.
        let vkeys = frag.vertices_with_base(&format!("v{c}"));
        ok &= vkeys.len() == 4;
        for p in 0..=3u32 {
            ok &= vkeys.iter().any(|k| k.excess == vec![0, p]);
        }
        // Second row: ι(w_c) and its own dashed chain.
        let wkeys = frag.vertices_with_base(&format!("w{c}"));
        ok &= wkeys.len() == 4;
        // The source grid: one class per excess pair.
        let akeys = frag.vertices_with_base(&format!("a{}", c + 1));
        ok &= akeys.len() == 16;
    }

    // Drawn adjacencies at column 1: ι(v_1) receives the original dashed
    // edge from ι(w_1) AND the new dashed edge from the class [x;(·,1)].
    let iv1 = frag
        .vertex_keys()
        .into_iter()
        .find(|k| k.base == "v1" && k.excess == vec![0, 0])
        .unwrap()
        .clone();
    let dashed_in: Vec<_> = frag
        .edges_with_range(&iv1)
        .into_iter()
        .filter(|e| e.color == 1)
        .collect();
    ok &= dashed_in.len() == 2;
    let sources: BTreeSet<(String, Vec<u32>)> = dashed_in
        .iter()
        .map(|e| (e.s.base.clone(), e.s.excess.clone()))
        .collect();
    ok &= sources.contains(&("w1".to_string(), vec![0, 0]));
    ok &= sources.contains(&("v1".to_string(), vec![0, 1]));

    // The a-grid receives solid from excess (1,0) and dashed from (0,1).
    let ia2 = frag
        .vertex_keys()
        .into_iter()
        .find(|k| k.base == "a2" && k.excess == vec![0, 0])
        .unwrap()
        .clone();
    let in_colors: BTreeSet<(usize, Vec<u32>)> = frag
        .edges_with_range(&ia2)
        .into_iter()
        .map(|e| (e.color, e.s.excess.clone()))
        .collect();
    ok &= in_colors.contains(&(0, vec![1, 0]));
    ok &= in_colors.contains(&(1, vec![0, 1]));

    // Interior sourcelessness: every class with excess ≤ 2 in columns ≤ 3
    // receives both colors.
    let interior: Vec<_> = frag
        .vertex_keys()
        .into_iter()
        .filter(|k| {
            k.excess.iter().all(|&e| e <= 2) && {
                let col: u32 = k.base[1..].parse().unwrap_or(99);
                col <= 3
            }
        })
        .collect();
    ok &= frag.sourceless_on(&interior, 2);

    // ι is injective on the window and degree preserving on edges.
    let mut seen = BTreeSet::new();
    for (_, key) in &frag.iota_vertices {
        ok &= seen.insert(format!("{key:?}"));
    }
    for (name, key) in &frag.iota_edges {
        let expected = if name.starts_with('d') { vec![0, 1] } else { vec![1, 0] };
        ok &= key.degree == expected;
    }

    line("6: Robertson desourcification matches the drawn skeleton", ok);
}

/// Criterion 7: the explicit witness sequences pass all three k-times
/// conditions (certified) and the duplicated-witness case fails the escape
/// condition.
#[test]
fn criterion_7_witness_verification() {
    let mut ok = true;
    for (name, targets) in [("thesis:2times", 1usize), ("thesis:nonhausdorff", 2)] {
        let fam = SequenceFamily::new(name).unwrap();
        let cover = default_escape_cover(&fam, 5, 12);
        for t in 0..targets {
            let report =
                k_times_witness_check(&fam, t, 2, WitnessChoice::Canonical, 14, 5, &cover, 14);
            let good = report.passes
                && report.sources.certified
                && report.convergence.certified
                && report.escape.certified;
            if !good {
                eprintln!("{name} target {t}: {report:?}");
            }
            ok &= good;
        }
        let dup = k_times_witness_check(&fam, 0, 2, WitnessChoice::Duplicated, 14, 5, &cover, 14);
        ok &= !dup.passes && dup.sources.holds && !dup.escape.holds;
    }
    line("7: k-times witnesses verified; duplicated witnesses fail escape", ok);
}

/// The 2-times counting narrative behind criterion 2, pinned directly:
/// `λ_{x⁽ⁿ⁾}(G^{Z(z(0,m))}) = 2` for `n ≥ m` and `λ_z = 1`.
#[test]
fn two_times_counts_pinned() {
    let fam = SequenceFamily::new("thesis:2times").unwrap();
    let family = &fam.graph;
    let probe = ckgraph::staged::StageProbe::new(family, 8);
    let z = fam.limit(0);
    for m in 0..4usize {
        let from = format!("v{m}");
        assert_eq!(
            probe.class_count(&from, &TailClass::of(&z)),
            ckgraph::staged::Stabilized::Certified(Count::Finite(1))
        );
        for n in 0..6usize {
            let member = fam.member(n);
            let expect = if n >= m { 2 } else { 0 };
            assert_eq!(
                probe.class_count(&from, &TailClass::of(&member)),
                ckgraph::staged::Stabilized::Certified(Count::Finite(expect)),
                "c({m},{n})"
            );
        }
    }
}

/// A one-off guard for the exact equality `∂Λ = Λ^{≤∞}` on a locally convex
/// example, used by the boundary checker's fast path.
#[test]
fn omega_boundary_equals_le_infty() {
    let kg = omega(2, &[3, 2]);
    assert!(kg.locally_convex());
    let v = kg.vertex("(0,0)").unwrap();
    for m in kg.morphisms_from_up_to(v, &Degree(vec![3, 2])) {
        let x = ckgraph::kpaths::KPath::Finite(m);
        let le = ckgraph::kpaths::le_infty_member(&kg, &x).unwrap();
        let bd = ckgraph::kpaths::boundary_member(&kg, &x, 3).is_yes();
        assert_eq!(le, bd);
    }
}

/// The corner graph splits `Λ^{≤∞} = ∂Λ` from local convexity: it is not
/// locally convex yet the two path sets agree.
#[test]
fn corner_not_locally_convex_same_boundaries() {
    let kg = families::corner_kgraph();
    assert!(!kg.locally_convex());
    let mut boundary = 0;
    for v in kg.skeleton().vertices() {
        for m in kg.morphisms_from_up_to(v, &Degree(vec![1, 1])) {
            let x = ckgraph::kpaths::KPath::Finite(m);
            let le = ckgraph::kpaths::le_infty_member(&kg, &x).unwrap();
            let bd = ckgraph::kpaths::boundary_member(&kg, &x, 2).is_yes();
            assert_eq!(le, bd);
            if bd {
                boundary += 1;
            }
        }
    }
    // u, w, α, β.
    assert_eq!(boundary, 4);
}

/// CK relations on a one-vertex one-loop graph with the 1×1 family.
#[test]
fn scalar_loop_family() {
    let g = families::single_loop();
    let mut fam = ckgraph::ck::CKFamily { dim: 1, ..Default::default() };
    fam.vertex_ops.insert("u".into(), Matrix::identity(1));
    fam.edge_ops.insert("g".into(), Matrix::identity(1));
    assert!(ck_verify_digraph(&g, &fam).unwrap().is_valid());
}

/// Two parallel edges with rank-one partial isometries onto orthogonal
/// ranges satisfy the directed-graph relations.
#[test]
fn parallel_edges_orthogonal_isometries() {
    let mut b = KGraphBuilder::new(1);
    b.vertex("v").vertex("u");
    b.edge("f", "v", "u", 1);
    b.edge("g", "v", "u", 1);
    let kg = b.build().unwrap();
    let fam = boundary_representation(&kg, 2).unwrap();
    let report = ck_verify_kgraph(&kg, &fam, 1).unwrap();
    assert!(report.is_valid(), "{:?}", report.violations);
}

/// Cross-module agreement: the k-graph classifier on a 1-graph agrees with
/// the directed-graph classifier on its skeleton, property by property.
#[test]
fn kgraph_classifier_agrees_with_digraph_on_1_graphs() {
    for seed in 0..120u64 {
        let g = random_graph(seed * 101 + 3);
        let dg = classify_digraph(&g);
        // Rebuild as a 1-graph.
        let mut b = KGraphBuilder::new(1);
        for v in g.vertices() {
            b.vertex(g.vertex_name(v));
        }
        for e in g.edge_ids() {
            b.edge(
                g.edge_name(e),
                g.vertex_name(g.range(e)),
                g.vertex_name(g.source(e)),
                1,
            );
        }
        let kg = b.build().unwrap();
        let kr = classify_kgraph(&kg, 4);
        for prop in ckgraph::classify::PROPERTIES {
            let (a, b) = (dg.verdict(prop), kr.verdict(prop));
            // Both classifiers may leave non-principal trace properties
            // undecided; decided verdicts must agree.
            if a != Verdict::Unknown && b != Verdict::Unknown {
                assert_eq!(a, b, "seed {seed}, property {prop}");
            }
        }
    }
}

/// Literal path-space counts agree between the structural criteria and the
/// count machinery used by the k-graph classifier.
#[test]
fn count_machinery_matches_structure_on_examples() {
    // In the loop-plus-edge graph the cycle class has infinitely many
    // members with range u (pumping around g before exiting is impossible;
    // the entry f sits at u, so paths from u into [g^∞] are g^k itself only
    // — but from v the class is reached once).
    let g = families::loop_plus_edge();
    let u = g.vertex("u").unwrap();
    let v = g.vertex("v").unwrap();
    let class = TailClass::Cycle(vec!["g".into()]);
    assert_eq!(count_into_class_on(&g, &NoRayAccess, u, &class), Count::Finite(1));
    assert_eq!(count_into_class_on(&g, &NoRayAccess, v, &class), Count::Finite(0));
    // The finite class of paths ending at the source v: from u none (u can't
    // reach v), from v the trivial path.
    let src = TailClass::SourceVertex("v".into());
    assert_eq!(count_into_class_on(&g, &NoRayAccess, u, &src), Count::Finite(0));
    assert_eq!(count_into_class_on(&g, &NoRayAccess, v, &src), Count::Finite(1));
}

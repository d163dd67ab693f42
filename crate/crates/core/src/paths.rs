//! Finite and infinite paths with shift maps and lag arithmetic.
//!
//! Infinite paths come in two finitely representable shapes: ultimately
//! periodic (`head · cycle^∞`, the only shape arising in finite graphs) and
//! tail anchored (`head · ray`, where the ray is an anchor declared by a
//! staged graph). Shift equivalence is decided exactly on both shapes.
//!
//! Lag convention: `x ∼ₙ y` means `xᵢ = yᵢ₋ₙ` for all large `i`. Some of the
//! older literature uses the opposite sign; this crate commits to the
//! convention above everywhere and does not support both.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{DirectedGraph, VertexId};

/// A possibly empty finite path, stored by edge names so it survives staged
/// regeneration. An empty path sits at a single vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FinitePath {
    /// The path's vertex when it has no edges; otherwise the range of the
    /// first edge (kept for cheap range lookups).
    pub at: String,
    pub edges: Vec<String>,
}

impl FinitePath {
    pub fn vertex(at: &str) -> FinitePath {
        FinitePath { at: at.to_string(), edges: Vec::new() }
    }

    pub fn from_edges(graph: &DirectedGraph, edges: Vec<String>) -> Result<FinitePath, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::InvalidPath("empty edge list; use FinitePath::vertex".into()));
        }
        let first = graph
            .edge(&edges[0])
            .ok_or_else(|| GraphError::UnknownEdge(edges[0].clone()))?;
        let path = FinitePath { at: graph.vertex_name(graph.range(first)).to_string(), edges };
        path.validate(graph)?;
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn validate(&self, graph: &DirectedGraph) -> Result<(), GraphError> {
        if self.edges.is_empty() {
            graph
                .vertex(&self.at)
                .ok_or_else(|| GraphError::UnknownVertex(self.at.clone()))?;
            return Ok(());
        }
        let mut prev: Option<VertexId> = None;
        for (i, name) in self.edges.iter().enumerate() {
            let e = graph
                .edge(name)
                .ok_or_else(|| GraphError::UnknownEdge(name.clone()))?;
            if let Some(p) = prev {
                if graph.range(e) != p {
                    return Err(GraphError::NotComposable(self.edges[i - 1].clone(), name.clone()));
                }
            }
            prev = Some(graph.source(e));
        }
        let first = graph.edge(&self.edges[0]).unwrap();
        if graph.vertex_name(graph.range(first)) != self.at {
            return Err(GraphError::InvalidPath(format!(
                "`at` is {} but the first edge has range {}",
                self.at,
                graph.vertex_name(graph.range(first))
            )));
        }
        Ok(())
    }

    pub fn range_name(&self) -> &str {
        &self.at
    }

    pub fn source_name(&self, graph: &DirectedGraph) -> String {
        match self.edges.last() {
            None => self.at.clone(),
            Some(name) => {
                let e = graph.edge(name).expect("validated edge");
                graph.vertex_name(graph.source(e)).to_string()
            }
        }
    }

    /// `x(p)` for `0 ≤ p ≤ |x|`: the vertex after the first `p` edges.
    pub fn vertex_at(&self, graph: &DirectedGraph, p: usize) -> String {
        if p == 0 {
            return self.at.clone();
        }
        let e = graph.edge(&self.edges[p - 1]).expect("validated edge");
        graph.vertex_name(graph.source(e)).to_string()
    }

    /// Concatenation; requires `s(self) = r(other)`.
    pub fn concat(&self, graph: &DirectedGraph, other: &FinitePath) -> Result<FinitePath, GraphError> {
        if self.source_name(graph) != other.range_name() {
            return Err(GraphError::NotComposable(
                self.edges.last().cloned().unwrap_or_else(|| self.at.clone()),
                other.edges.first().cloned().unwrap_or_else(|| other.at.clone()),
            ));
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().cloned());
        Ok(FinitePath { at: self.at.clone(), edges })
    }
}

/// Identifies a declared ray of a staged graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AnchorRef {
    /// The horizontal ray of a track, starting at a given column.
    Track { track: u32 },
    /// The chain hanging off a track vertex at one column.
    Hair { track: u32, col: u32 },
}

/// Resolves anchor rays to concrete vertex/edge names. Rays are injective
/// (no edge repeats) and pairwise eventually disjoint; staged graphs verify
/// this on their stages.
pub trait RayResolver {
    fn ray_vertex(&self, anchor: AnchorRef, i: usize) -> String;
    /// The edge from `ray[i]` to `ray[i+1]` (range at `ray[i]`).
    fn ray_edge(&self, anchor: AnchorRef, i: usize) -> String;
}

/// Used for finite graphs, which cannot contain anchored paths.
pub struct NoRays;

impl RayResolver for NoRays {
    fn ray_vertex(&self, _: AnchorRef, _: usize) -> String {
        unreachable!("finite graphs have no anchored paths")
    }
    fn ray_edge(&self, _: AnchorRef, _: usize) -> String {
        unreachable!("finite graphs have no anchored paths")
    }
}

/// An infinite path in normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InfinitePath {
    /// `head · cycle^∞`; the cycle is in canonical rotation and the head does
    /// not end with a full copy of it.
    Up { head: FinitePath, cycle: Vec<String> },
    /// `head · ray(anchor)[offset..]`; the head does not end with the ray
    /// edge entering `ray[offset]`.
    Anchored { head: FinitePath, anchor: AnchorRef, offset: usize },
}

impl InfinitePath {
    /// Builds `head · cycle^∞` in normal form. The cycle may be given in any
    /// rotation (it must start where the head ends); the stored cycle is the
    /// canonical rotation, with the phase absorbed into the head, and the
    /// head never ends with a full cycle copy.
    pub fn up(
        graph: &DirectedGraph,
        head: FinitePath,
        cycle: Vec<String>,
    ) -> Result<InfinitePath, GraphError> {
        head.validate(graph)?;
        if cycle.is_empty() {
            return Err(GraphError::InvalidPath("empty cycle".into()));
        }
        let as_path = FinitePath::from_edges(graph, cycle.clone())?;
        if as_path.source_name(graph) != as_path.range_name() {
            return Err(GraphError::InvalidPath("cycle range and source differ".into()));
        }
        let mut seen = BTreeSet::new();
        for i in 0..cycle.len() {
            if !seen.insert(as_path.vertex_at(graph, i + 1)) {
                return Err(GraphError::InvalidPath("cycle sources are not distinct".into()));
            }
        }
        if head.source_name(graph) != as_path.range_name() {
            return Err(GraphError::InvalidPath(format!(
                "head ends at {} but the cycle starts at {}",
                head.source_name(graph),
                as_path.range_name()
            )));
        }
        // Canonical rotation: absorb the phase before the least edge name.
        let phi = (0..cycle.len()).min_by_key(|&i| &cycle[i]).unwrap();
        let mut head = head;
        head.edges.extend(cycle[..phi].iter().cloned());
        let mut canonical = cycle[phi..].to_vec();
        canonical.extend(cycle[..phi].iter().cloned());
        Ok(Self::normalize_up(head, canonical))
    }

    fn normalize_up(mut head: FinitePath, cycle: Vec<String>) -> InfinitePath {
        let k = cycle.len();
        while head.edges.len() >= k && head.edges[head.edges.len() - k..] == cycle[..] {
            head.edges.truncate(head.edges.len() - k);
        }
        InfinitePath::Up { head, cycle }
    }

    pub fn anchored<R: RayResolver>(
        resolver: &R,
        head: FinitePath,
        anchor: AnchorRef,
        offset: usize,
    ) -> InfinitePath {
        Self::normalize_anchored(resolver, head, anchor, offset)
    }

    fn normalize_anchored<R: RayResolver>(
        resolver: &R,
        mut head: FinitePath,
        anchor: AnchorRef,
        mut offset: usize,
    ) -> InfinitePath {
        while offset > 0 {
            match head.edges.last() {
                Some(last) if *last == resolver.ray_edge(anchor, offset - 1) => {
                    head.edges.pop();
                    offset -= 1;
                    if head.edges.is_empty() {
                        head.at = resolver.ray_vertex(anchor, offset);
                    }
                }
                _ => break,
            }
        }
        if head.edges.is_empty() && head.at.is_empty() {
            head.at = resolver.ray_vertex(anchor, offset);
        }
        InfinitePath::Anchored { head, anchor, offset }
    }

    pub fn range_name(&self) -> &str {
        match self {
            InfinitePath::Up { head, .. } => head.range_name(),
            InfinitePath::Anchored { head, .. } => head.range_name(),
        }
    }

    /// The edge `x_i` (1-based).
    pub fn edge_at<R: RayResolver>(&self, resolver: &R, i: usize) -> String {
        assert!(i >= 1);
        match self {
            InfinitePath::Up { head, cycle } => {
                if i <= head.len() {
                    head.edges[i - 1].clone()
                } else {
                    cycle[(i - head.len() - 1) % cycle.len()].clone()
                }
            }
            InfinitePath::Anchored { head, anchor, offset } => {
                if i <= head.len() {
                    head.edges[i - 1].clone()
                } else {
                    resolver.ray_edge(*anchor, offset + (i - head.len() - 1))
                }
            }
        }
    }

    /// The vertex `x(p)`.
    pub fn vertex_at<R: RayResolver>(&self, graph: &DirectedGraph, resolver: &R, p: usize) -> String {
        match self {
            InfinitePath::Up { head, cycle } => {
                if p <= head.len() {
                    head.vertex_at(graph, p)
                } else {
                    let e = graph
                        .edge(&cycle[(p - head.len() - 1) % cycle.len()])
                        .expect("cycle edge");
                    graph.vertex_name(graph.source(e)).to_string()
                }
            }
            InfinitePath::Anchored { head, anchor, offset } => {
                if p <= head.len() {
                    head.vertex_at(graph, p)
                } else {
                    resolver.ray_vertex(*anchor, offset + (p - head.len()))
                }
            }
        }
    }

    /// `x(m, n)` for `m ≤ n`: the finite path `x_{m+1} ⋯ x_n`.
    pub fn segment<R: RayResolver>(
        &self,
        graph: &DirectedGraph,
        resolver: &R,
        m: usize,
        n: usize,
    ) -> Result<FinitePath, GraphError> {
        if m > n {
            return Err(GraphError::SegmentOutOfRange(m, n, "infinite".into()));
        }
        if m == n {
            return Ok(FinitePath::vertex(&self.vertex_at(graph, resolver, m)));
        }
        let edges: Vec<String> = (m + 1..=n).map(|i| self.edge_at(resolver, i)).collect();
        Ok(FinitePath { at: self.vertex_at(graph, resolver, m), edges })
    }

    /// `σⁿ(x)`: drops the first `n` edges; always defined, in normal form.
    pub fn shift<R: RayResolver>(&self, graph: &DirectedGraph, resolver: &R, n: usize) -> InfinitePath {
        match self {
            InfinitePath::Up { head, cycle } => {
                // Suffixes of a normal-form head stay normal.
                let edges = if n <= head.len() {
                    head.edges[n..].to_vec()
                } else {
                    match (n - head.len()) % cycle.len() {
                        0 => Vec::new(),
                        rem => cycle[rem..].to_vec(),
                    }
                };
                let at = if edges.is_empty() {
                    let e = graph.edge(&cycle[0]).expect("cycle edge");
                    graph.vertex_name(graph.range(e)).to_string()
                } else {
                    let e = graph.edge(&edges[0]).expect("edge");
                    graph.vertex_name(graph.range(e)).to_string()
                };
                InfinitePath::Up { head: FinitePath { at, edges }, cycle: cycle.clone() }
            }
            InfinitePath::Anchored { head, anchor, offset } => {
                let (edges, offset) = if n <= head.len() {
                    (head.edges[n..].to_vec(), *offset)
                } else {
                    (Vec::new(), offset + (n - head.len()))
                };
                let at = if edges.is_empty() {
                    resolver.ray_vertex(*anchor, offset)
                } else {
                    let e = graph.edge(&edges[0]).expect("edge");
                    graph.vertex_name(graph.range(e)).to_string()
                };
                InfinitePath::Anchored { head: FinitePath { at, edges }, anchor: *anchor, offset }
            }
        }
    }

    pub fn head_len(&self) -> usize {
        match self {
            InfinitePath::Up { head, .. } => head.len(),
            InfinitePath::Anchored { head, .. } => head.len(),
        }
    }

    /// Edge names used anywhere in the head or periodic tail (ray edges are
    /// reported only up to `ray_window` for anchored paths).
    pub fn edge_support<R: RayResolver>(&self, resolver: &R, ray_window: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            InfinitePath::Up { head, cycle } => {
                out.extend(head.edges.iter().cloned());
                out.extend(cycle.iter().cloned());
            }
            InfinitePath::Anchored { head, anchor, offset } => {
                out.extend(head.edges.iter().cloned());
                for i in 0..ray_window {
                    out.insert(resolver.ray_edge(*anchor, offset + i));
                }
            }
        }
        out
    }
}

/// The set `{n ∈ ℤ : x ∼ₙ y}`, closed under the groupoid law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LagSet {
    Empty,
    Finite(Vec<i64>),
    Progression { base: i64, period: u64 },
}

impl LagSet {
    pub fn singleton(n: i64) -> LagSet {
        LagSet::Finite(vec![n])
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, LagSet::Empty)
    }

    pub fn contains(&self, n: i64) -> bool {
        match self {
            LagSet::Empty => false,
            LagSet::Finite(ns) => ns.contains(&n),
            LagSet::Progression { base, period } => {
                (n - base).rem_euclid(*period as i64) == 0
            }
        }
    }

    pub fn negate(&self) -> LagSet {
        match self {
            LagSet::Empty => LagSet::Empty,
            LagSet::Finite(ns) => {
                let mut out: Vec<i64> = ns.iter().map(|n| -n).collect();
                out.sort_unstable();
                LagSet::Finite(out)
            }
            LagSet::Progression { base, period } => LagSet::Progression {
                base: (-base).rem_euclid(*period as i64),
                period: *period,
            },
        }
    }

    /// Pointwise sum, for composing `L(x,y)` and `L(y,z)`. Progressions only
    /// combine when their periods agree (which is the case along a single
    /// shift class).
    pub fn add(&self, other: &LagSet) -> Option<LagSet> {
        match (self, other) {
            (LagSet::Empty, _) | (_, LagSet::Empty) => Some(LagSet::Empty),
            (LagSet::Finite(a), LagSet::Finite(b)) => {
                let mut out: Vec<i64> = a
                    .iter()
                    .flat_map(|x| b.iter().map(move |y| x + y))
                    .collect();
                out.sort_unstable();
                out.dedup();
                Some(LagSet::Finite(out))
            }
            (LagSet::Progression { base, period }, LagSet::Finite(b))
            | (LagSet::Finite(b), LagSet::Progression { base, period }) => {
                if b.len() == 1 {
                    Some(LagSet::Progression {
                        base: (base + b[0]).rem_euclid(*period as i64),
                        period: *period,
                    })
                } else {
                    None
                }
            }
            (
                LagSet::Progression { base: b1, period: p1 },
                LagSet::Progression { base: b2, period: p2 },
            ) => {
                if p1 == p2 {
                    Some(LagSet::Progression {
                        base: (b1 + b2).rem_euclid(*p1 as i64),
                        period: *p1,
                    })
                } else {
                    None
                }
            }
        }
    }

    /// Some element, when nonempty.
    pub fn witness(&self) -> Option<i64> {
        match self {
            LagSet::Empty => None,
            LagSet::Finite(ns) => ns.first().copied(),
            LagSet::Progression { base, .. } => Some(*base),
        }
    }
}

/// Exact lag set of two infinite paths.
///
/// Two ultimately periodic paths are shift equivalent iff their cycles are
/// rotations of one another; in canonical rotation that is cycle equality,
/// and the lag set is then the arithmetic progression
/// `(|head_x| − |head_y|) + |cycle|·ℤ`. Two anchored paths are equivalent
/// iff they share the anchor, with a single lag determined by head lengths
/// and offsets. Mixed shapes are never equivalent, since a declared ray
/// repeats no edge.
pub fn shift_equivalent(x: &InfinitePath, y: &InfinitePath) -> LagSet {
    match (x, y) {
        (InfinitePath::Up { head: hx, cycle: cx }, InfinitePath::Up { head: hy, cycle: cy }) => {
            if cx != cy {
                return LagSet::Empty;
            }
            let p = cx.len() as i64;
            let base = (hx.len() as i64 - hy.len() as i64).rem_euclid(p);
            LagSet::Progression { base, period: p as u64 }
        }
        (
            InfinitePath::Anchored { head: hx, anchor: ax, offset: ox },
            InfinitePath::Anchored { head: hy, anchor: ay, offset: oy },
        ) => {
            if ax != ay {
                return LagSet::Empty;
            }
            let n = (hx.len() as i64 - *ox as i64) - (hy.len() as i64 - *oy as i64);
            LagSet::singleton(n)
        }
        _ => LagSet::Empty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    fn two_cycle_graph() -> DirectedGraph {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("p", "a", "b").unwrap();
        g.add_edge("q", "b", "a").unwrap();
        g
    }

    fn up(graph: &DirectedGraph, head: FinitePath, cycle: Vec<&str>) -> InfinitePath {
        InfinitePath::up(graph, head, cycle.into_iter().map(String::from).collect()).unwrap()
    }

    #[test]
    fn one_period_segment_is_the_cycle() {
        let g = two_cycle_graph();
        let x = up(&g, FinitePath::vertex("a"), vec!["p", "q"]);
        let seg = x.segment(&g, &NoRays, 0, 2).unwrap();
        assert_eq!(seg.edges, vec!["p".to_string(), "q".to_string()]);
    }

    #[test]
    fn shift_by_period_is_identity() {
        let g = two_cycle_graph();
        let x = up(&g, FinitePath::vertex("a"), vec!["p", "q"]);
        assert_eq!(x.shift(&g, &NoRays, 2), x);
        assert_eq!(x.shift(&g, &NoRays, 0), x);
    }

    #[test]
    fn shift_composes_additively() {
        let g = two_cycle_graph();
        let head = FinitePath::from_edges(&g, vec!["p".into()]).unwrap();
        let x = up(&g, head, vec!["q", "p"]);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(
                    x.shift(&g, &NoRays, a).shift(&g, &NoRays, b),
                    x.shift(&g, &NoRays, a + b)
                );
            }
        }
    }

    #[test]
    fn head_is_stripped_after_shift() {
        let g = two_cycle_graph();
        let head = FinitePath::from_edges(&g, vec!["p".into()]).unwrap();
        let x = up(&g, head, vec!["q", "p"]);
        // Shifting past the head lands on a rotation of the cycle:
        // the b-rooted tail q·p·q·p⋯ is head [q] then canonical cycle pq.
        let shifted = x.shift(&g, &NoRays, 1);
        match &shifted {
            InfinitePath::Up { head: h1, .. } => {
                assert_eq!(h1.edges, vec!["q".to_string()]);
                assert_eq!(h1.at, "b");
            }
            _ => panic!("expected UP path"),
        }
    }

    #[test]
    fn self_lag_set_is_period_multiples() {
        let g = two_cycle_graph();
        let x = up(&g, FinitePath::vertex("a"), vec!["p", "q"]);
        let lags = shift_equivalent(&x, &x);
        assert_eq!(lags, LagSet::Progression { base: 0, period: 2 });
        assert!(lags.contains(0));
        assert!(lags.contains(-4));
        assert!(!lags.contains(3));
    }

    #[test]
    fn disjoint_cycles_are_not_equivalent() {
        let mut g = DirectedGraph::new(GraphKind::Finite);
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("p", "a", "a").unwrap();
        g.add_edge("q", "b", "b").unwrap();
        let x = up(&g, FinitePath::vertex("a"), vec!["p"]);
        let y = up(&g, FinitePath::vertex("b"), vec!["q"]);
        assert!(shift_equivalent(&x, &y).is_empty());
    }

    #[test]
    fn up_normal_form_strips_whole_cycle_copies() {
        let g = two_cycle_graph();
        // p·q·p followed by (qp)^∞ is the whole word (pq)^∞.
        let head = FinitePath::from_edges(&g, vec!["p".into(), "q".into(), "p".into()]).unwrap();
        let x = up(&g, head, vec!["q", "p"]);
        match &x {
            InfinitePath::Up { head, cycle } => {
                assert!(head.edges.is_empty());
                assert_eq!(cycle, &vec!["p".to_string(), "q".to_string()]);
            }
            _ => unreachable!(),
        }
        // A genuine head survives normalization.
        let mut g2 = two_cycle_graph();
        g2.add_vertex("w").unwrap();
        g2.add_edge("f", "a", "w").unwrap();
        let _ = g2;
    }
}

//! Boundary-path machinery for k-graphs: finitely representable paths of
//! possibly infinite degree, the shift maps, `Λ^{≤∞}` membership and the
//! boundary-path (`∂Λ`) check.

use serde::{Deserialize, Serialize};

use crate::error::KGraphError;
use crate::kgraph::{Degree, KGraph, Morphism};

/// A degree vector in `(ℕ ∪ {∞})^k`; `None` is ∞.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExtDegree(pub Vec<Option<u32>>);

impl ExtDegree {
    pub fn finite(d: &Degree) -> ExtDegree {
        ExtDegree(d.0.iter().map(|&c| Some(c)).collect())
    }

    pub fn all_infinite(k: usize) -> ExtDegree {
        ExtDegree(vec![None; k])
    }

    pub fn is_all_infinite(&self) -> bool {
        self.0.iter().all(|c| c.is_none())
    }

    pub fn ge_deg(&self, d: &Degree) -> bool {
        self.0
            .iter()
            .zip(&d.0)
            .all(|(a, b)| a.map(|x| x >= *b).unwrap_or(true))
    }
}

/// A finitely representable element of `W_Λ`: a finite morphism, or an
/// ultimately periodic path `prefix · tail^∞` whose tail is a generalized
/// cycle with strictly positive degree exactly on the infinite coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KPath {
    Finite(Morphism),
    Upk { prefix: Morphism, tail: Morphism },
}

impl KPath {
    pub fn validate(&self, kg: &KGraph) -> Result<(), KGraphError> {
        if let KPath::Upk { prefix, tail } = self {
            if kg.range(tail) != kg.source(tail) {
                return Err(KGraphError::Invalid("tail is not a generalized cycle".into()));
            }
            if kg.degree(tail).is_zero() {
                return Err(KGraphError::Invalid("tail has degree zero".into()));
            }
            if kg.source(prefix) != kg.range(tail) {
                return Err(KGraphError::NotComposable(
                    kg.vertex_name(kg.source(prefix)).to_string(),
                    kg.vertex_name(kg.range(tail)).to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Strips whole tail copies from the prefix end.
    pub fn normalize(self, kg: &KGraph) -> KPath {
        match self {
            KPath::Finite(_) => self,
            KPath::Upk { mut prefix, tail } => {
                let dt = kg.degree(&tail);
                loop {
                    let dp = kg.degree(&prefix);
                    if !dt.le(&dp) {
                        break;
                    }
                    match kg.factorize(&prefix, &dp.minus(&dt)) {
                        Ok((head, suffix)) if suffix == tail => prefix = head,
                        _ => break,
                    }
                }
                KPath::Upk { prefix, tail }
            }
        }
    }

    pub fn degree(&self, kg: &KGraph) -> ExtDegree {
        match self {
            KPath::Finite(m) => ExtDegree::finite(&kg.degree(m)),
            KPath::Upk { prefix, tail } => {
                let dp = kg.degree(prefix);
                let dt = kg.degree(tail);
                ExtDegree(
                    dp.0.iter()
                        .zip(&dt.0)
                        .map(|(&p, &t)| if t > 0 { None } else { Some(p) })
                        .collect(),
                )
            }
        }
    }

    pub fn range_name<'k>(&self, kg: &'k KGraph) -> &'k str {
        match self {
            KPath::Finite(m) => kg.vertex_name(kg.range(m)),
            KPath::Upk { prefix, .. } => kg.vertex_name(kg.range(prefix)),
        }
    }

    /// `prefix · tail^copies` as a finite morphism.
    pub fn unroll(&self, kg: &KGraph, copies: u32) -> Result<Morphism, KGraphError> {
        match self {
            KPath::Finite(m) => Ok(m.clone()),
            KPath::Upk { prefix, tail } => {
                let mut out = prefix.clone();
                for _ in 0..copies {
                    out = kg.compose(&out, tail)?;
                }
                Ok(out)
            }
        }
    }

    fn copies_for(&self, kg: &KGraph, need: &Degree) -> u32 {
        match self {
            KPath::Finite(_) => 0,
            KPath::Upk { prefix, tail } => {
                let dp = kg.degree(prefix);
                let dt = kg.degree(tail);
                let mut copies = 1u32;
                for i in 0..dt.0.len() {
                    if dt.0[i] > 0 && need.0[i] > dp.0[i] {
                        let deficit = need.0[i] - dp.0[i];
                        copies = copies.max(deficit.div_ceil(dt.0[i]) + 1);
                    }
                }
                copies
            }
        }
    }

    /// `x(p, q)` for `p ≤ q ≤ d(x)` with `q` finite.
    pub fn segment(&self, kg: &KGraph, p: &Degree, q: &Degree) -> Result<Morphism, KGraphError> {
        if !self.degree(kg).ge_deg(q) {
            return Err(KGraphError::DegreeOutOfRange(q.0.clone(), vec![]));
        }
        let u = self.unroll(kg, self.copies_for(kg, q))?;
        kg.segment(&u, p, q)
    }

    /// `x(p)`.
    pub fn vertex_at(&self, kg: &KGraph, p: &Degree) -> Result<String, KGraphError> {
        let seg = self.segment(kg, p, p)?;
        Ok(kg.vertex_name(seg.at).to_string())
    }

    /// `σ^p(x)` for `p ≤ d(x)`.
    pub fn sigma(&self, kg: &KGraph, p: &Degree) -> Result<KPath, KGraphError> {
        if !self.degree(kg).ge_deg(p) {
            return Err(KGraphError::DegreeOutOfRange(p.0.clone(), vec![]));
        }
        match self {
            KPath::Finite(m) => {
                let (_, rest) = kg.factorize(m, p)?;
                Ok(KPath::Finite(rest))
            }
            KPath::Upk { tail, .. } => {
                let dt = kg.degree(tail);
                let u = self.unroll(kg, self.copies_for(kg, &p.plus(&dt)))?;
                let (_, rest) = kg.factorize(&u, p)?;
                Ok(KPath::Upk { prefix: rest, tail: tail.clone() }.normalize(kg))
            }
        }
    }

    /// Path equality through segment comparison at a covering box: two
    /// representable paths of equal degree agree everywhere iff they agree
    /// on a box holding both prefixes plus two tail periods.
    pub fn path_eq(&self, kg: &KGraph, other: &KPath) -> bool {
        if self.degree(kg) != other.degree(kg) {
            return false;
        }
        match (self, other) {
            (KPath::Finite(a), KPath::Finite(b)) => a == b,
            _ => {
                let probe = self.eq_probe_box(kg).join(&other.eq_probe_box(kg));
                let a = self.segment(kg, &Degree::zero(kg.k), &probe);
                let b = other.segment(kg, &Degree::zero(kg.k), &probe);
                match (a, b) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
        }
    }

    fn eq_probe_box(&self, kg: &KGraph) -> Degree {
        match self {
            KPath::Finite(m) => kg.degree(m),
            KPath::Upk { prefix, tail } => {
                let dp = kg.degree(prefix);
                let dt = kg.degree(tail);
                dp.plus(&dt).plus(&dt)
            }
        }
    }

    /// Truncates the finite coordinates to the path's degree: the largest
    /// `q ≤ d(x)` with `q ≤ cap` on infinite coordinates.
    pub fn degree_cap(&self, kg: &KGraph, cap: u32) -> Degree {
        let d = self.degree(kg);
        Degree(d.0.iter().map(|c| c.unwrap_or(cap).min(cap)).collect())
    }
}

/// Lags `n` with `x ∼ₙ y` in the boundary-path sense: there is
/// `m ≤ d(x) ∧ (d(y)+n)` with `σ^m(x) = σ^{m−n}(y)`. The search is bounded
/// by the representable window `search`; for ultimately periodic paths any
/// witness appears within prefix-plus-period range.
pub fn shift_lags(kg: &KGraph, x: &KPath, y: &KPath, search: u32) -> Vec<Vec<i64>> {
    let k = kg.k;
    let mx = x.degree_cap(kg, search);
    let my = y.degree_cap(kg, search);
    let mut lags = Vec::new();
    for p in mx.box_iter() {
        let sx = match x.sigma(kg, &p) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for q in my.box_iter() {
            let sy = match y.sigma(kg, &q) {
                Ok(s) => s,
                Err(_) => continue,
            };
            if sx.path_eq(kg, &sy) {
                let n: Vec<i64> = (0..k).map(|i| p.0[i] as i64 - q.0[i] as i64).collect();
                if !lags.contains(&n) {
                    lags.push(n);
                }
            }
        }
    }
    lags.sort();
    lags
}

pub fn shift_equivalent_k(kg: &KGraph, x: &KPath, y: &KPath, search: u32) -> bool {
    !shift_lags(kg, x, y, search).is_empty()
}

/// `Λ^{≤∞}` membership, exact for finite and ultimately periodic paths: the
/// quantifier over `n` collapses to the largest admissible base point plus
/// one tail period on infinite coordinates.
pub fn le_infty_member(kg: &KGraph, x: &KPath) -> Result<bool, KGraphError> {
    x.validate(kg)?;
    let d = x.degree(kg);
    let (base, window) = match x {
        KPath::Finite(m) => (kg.degree(m), Degree::zero(kg.k)),
        KPath::Upk { prefix, tail } => {
            let dp = kg.degree(prefix);
            let dt = kg.degree(tail);
            let base = Degree(
                d.0.iter()
                    .enumerate()
                    .map(|(i, c)| match c {
                        Some(fin) => *fin,
                        None => dp.0[i] + dt.0[i],
                    })
                    .collect(),
            );
            let window = Degree(
                d.0.iter()
                    .enumerate()
                    .map(|(i, c)| match c {
                        Some(_) => 0,
                        None => dt.0[i].saturating_sub(1),
                    })
                    .collect(),
            );
            (base, window)
        }
    };
    for w in window.box_iter() {
        let n = base.plus(&w);
        let v = kg.vertex(&x.vertex_at(kg, &n)?).expect("vertex of path");
        for i in 0..kg.k {
            let at_full = match d.0[i] {
                Some(fin) => n.0[i] == fin,
                None => false,
            };
            if at_full && !kg.edges_with_range_color(v, i).is_empty() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of the boundary-path check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryOutcome {
    /// `complete` is true when decided by an exact criterion (sourceless or
    /// locally convex); false when certified only against every finite
    /// exhaustive set within the degree budget.
    Yes { complete: bool },
    No { at: Vec<u32>, witness_set: Vec<String> },
    Unknown { reason: String },
}

impl BoundaryOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, BoundaryOutcome::Yes { .. })
    }
}

/// `∂Λ` membership for finite k-graphs.
pub fn boundary_member(kg: &KGraph, x: &KPath, budget: u32) -> BoundaryOutcome {
    if let Err(e) = x.validate(kg) {
        return BoundaryOutcome::Unknown { reason: e.to_string() };
    }
    let d = x.degree(kg);
    if !kg.has_sources() {
        // ∂Λ = Λ^∞ for sourceless row-finite k-graphs.
        return if d.is_all_infinite() {
            BoundaryOutcome::Yes { complete: true }
        } else {
            BoundaryOutcome::No { at: vec![], witness_set: vec!["not of full degree".into()] }
        };
    }
    if kg.locally_convex() {
        return match le_infty_member(kg, x) {
            Ok(true) => BoundaryOutcome::Yes { complete: true },
            Ok(false) => match first_failing_fe(kg, x, budget) {
                Some((n, d_set)) => BoundaryOutcome::No { at: n.0, witness_set: d_set },
                None => BoundaryOutcome::No {
                    at: vec![],
                    witness_set: vec!["le-infty criterion".into()],
                },
            },
            Err(e) => BoundaryOutcome::Unknown { reason: e.to_string() },
        };
    }
    // General case: test against all finite exhaustive sets within budget at
    // every base point the path meets (up to one tail period).
    bounded_fe_check(kg, x, budget)
}

fn base_points(kg: &KGraph, x: &KPath, _budget: u32) -> Vec<Degree> {
    match x {
        KPath::Finite(m) => kg.degree(m).box_iter(),
        KPath::Upk { prefix, tail } => {
            let cap = kg.degree(prefix).plus(&kg.degree(tail));
            cap.box_iter()
        }
    }
}

fn bounded_fe_check(kg: &KGraph, x: &KPath, budget: u32) -> BoundaryOutcome {
    let bound = Degree(vec![budget; kg.k]);
    for n in base_points(kg, x, budget) {
        let vname = match x.vertex_at(kg, &n) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let v = kg.vertex(&vname).expect("path vertex");
        let pool: Vec<Morphism> = kg
            .morphisms_from_up_to(v, &bound)
            .into_iter()
            .filter(|m| !m.is_vertex())
            .collect();
        if pool.len() > 16 {
            return BoundaryOutcome::Unknown {
                reason: format!("exhaustive-set pool at {vname} exceeds enumeration bound"),
            };
        }
        for d_set in kg.finite_exhaustive_sets(v, &bound, pool.len().max(1)) {
            if !set_contains_segment(kg, x, &n, &d_set) {
                return BoundaryOutcome::No {
                    at: n.0.clone(),
                    witness_set: d_set
                        .iter()
                        .map(|m| morphism_label(kg, m))
                        .collect(),
                };
            }
        }
    }
    BoundaryOutcome::Yes { complete: false }
}

fn first_failing_fe(kg: &KGraph, x: &KPath, budget: u32) -> Option<(Degree, Vec<String>)> {
    let bound = Degree(vec![budget; kg.k]);
    for n in base_points(kg, x, budget) {
        let vname = x.vertex_at(kg, &n).ok()?;
        let v = kg.vertex(&vname)?;
        for d_set in kg.finite_exhaustive_sets(v, &bound, 16) {
            if !set_contains_segment(kg, x, &n, &d_set) {
                return Some((n, d_set.iter().map(|m| morphism_label(kg, m)).collect()));
            }
        }
    }
    None
}

pub(crate) fn set_contains_segment(kg: &KGraph, x: &KPath, n: &Degree, d_set: &[Morphism]) -> bool {
    let d = x.degree(kg);
    for nu in d_set {
        let m = kg.degree(nu);
        let end = n.plus(&m);
        let in_range = d
            .0
            .iter()
            .zip(&end.0)
            .all(|(c, e)| c.map(|fin| *e <= fin).unwrap_or(true));
        if !in_range {
            continue;
        }
        if let Ok(seg) = x.segment(kg, n, &end) {
            if &seg == nu {
                return true;
            }
        }
    }
    false
}

pub(crate) fn morphism_label(kg: &KGraph, m: &Morphism) -> String {
    if m.is_vertex() {
        kg.vertex_name(m.at).to_string()
    } else {
        m.edges
            .iter()
            .map(|&e| kg.edge_name(e).to_string())
            .collect::<Vec<_>>()
            .join("·")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::{omega, KGraphBuilder};

    #[test]
    fn grid_corner_paths_are_le_infty_and_boundary() {
        let kg = omega(2, &[3, 2]);
        let v = kg.vertex("(0,0)").unwrap();
        let full = kg.morphisms_from(v, &Degree(vec![3, 2])).remove(0);
        let x = KPath::Finite(full);
        assert!(le_infty_member(&kg, &x).unwrap());
        assert!(boundary_member(&kg, &x, 3).is_yes());
        // A path stopping strictly inside the grid is not boundary.
        let short = kg.morphisms_from(v, &Degree(vec![2, 1])).remove(0);
        let y = KPath::Finite(short);
        assert!(!le_infty_member(&kg, &y).unwrap());
        assert!(!boundary_member(&kg, &y, 3).is_yes());
    }

    #[test]
    fn sourceless_single_vertex_loop_kgraph() {
        let mut b = KGraphBuilder::new(1);
        b.vertex("v");
        b.edge("e", "v", "v", 1);
        let kg = b.build().unwrap();
        assert!(kg.validate().is_valid());
        let tail = kg.edge_morphism(kg.edge("e").unwrap());
        let x = KPath::Upk { prefix: Morphism::vertex(kg.vertex("v").unwrap()), tail };
        assert!(x.degree(&kg).is_all_infinite());
        assert!(boundary_member(&kg, &x, 2).is_yes());
        assert!(le_infty_member(&kg, &x).unwrap());
    }

    #[test]
    fn upk_sigma_is_periodic() {
        let mut b = KGraphBuilder::new(1);
        b.vertex("a").vertex("b");
        b.edge("p", "a", "b", 1);
        b.edge("q", "b", "a", 1);
        let kg = b.build().unwrap();
        let p = kg.edge_morphism(kg.edge("p").unwrap());
        let q = kg.edge_morphism(kg.edge("q").unwrap());
        let tail = kg.compose(&p, &q).unwrap();
        let x = KPath::Upk { prefix: Morphism::vertex(kg.vertex("a").unwrap()), tail };
        let s2 = x.sigma(&kg, &Degree(vec![2])).unwrap();
        assert!(x.path_eq(&kg, &s2));
        let s1 = x.sigma(&kg, &Degree(vec![1])).unwrap();
        assert!(!x.path_eq(&kg, &s1));
        assert_eq!(shift_lags(&kg, &x, &x, 4), vec![vec![-4], vec![-2], vec![0], vec![2], vec![4]]);
    }
}

//! Path-groupoid elements, basis sets, counting measures and multiplicity
//! profiles.
//!
//! Elements are triples `(x, n, y)` of infinite paths with `x ∼ₙ y`,
//! verified on construction. The counting measure `λ_x(G^V)` over a
//! cylinder `V = Z(α)` is, for principal graphs, the number of paths in the
//! cylinder shift equivalent to `x`; it is evaluated as a stabilizing
//! computation on the staged family. Relative multiplicities are realized
//! through the measure-ratio form: windowed cylinder counts against
//! `λ_z`, certified by the family's eventual-constancy contract.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::families::SequenceFamily;
use crate::graph::DirectedGraph;
use crate::paths::{shift_equivalent, FinitePath, InfinitePath, RayResolver};
use crate::staged::{stabilized_class_count, Count, Stabilized, StageProbe, StagedDigraph, TailClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidElement {
    pub x: InfinitePath,
    pub lag: i64,
    pub y: InfinitePath,
}

impl GroupoidElement {
    /// Builds `(x, n, y)`, verifying `x ∼ₙ y`.
    pub fn new(x: InfinitePath, lag: i64, y: InfinitePath) -> Result<GroupoidElement, GraphError> {
        if !shift_equivalent(&x, &y).contains(lag) {
            return Err(GraphError::InvalidPath(format!(
                "paths are not shift equivalent with lag {lag}"
            )));
        }
        Ok(GroupoidElement { x, lag, y })
    }

    pub fn unit(x: InfinitePath) -> GroupoidElement {
        GroupoidElement { x: x.clone(), lag: 0, y: x }
    }

    pub fn inverse(&self) -> GroupoidElement {
        GroupoidElement { x: self.y.clone(), lag: -self.lag, y: self.x.clone() }
    }

    pub fn range(&self) -> GroupoidElement {
        GroupoidElement::unit(self.x.clone())
    }

    pub fn source(&self) -> GroupoidElement {
        GroupoidElement::unit(self.y.clone())
    }

    /// `(x,n,y)·(y,m,z) = (x,n+m,z)`; requires middle paths equal.
    pub fn compose(&self, other: &GroupoidElement) -> Result<GroupoidElement, GraphError> {
        if self.y != other.x {
            return Err(GraphError::NotComposable(
                "source of the left element".into(),
                "range of the right element".into(),
            ));
        }
        Ok(GroupoidElement {
            x: self.x.clone(),
            lag: self.lag + other.lag,
            y: other.y.clone(),
        })
    }

    pub fn is_unit(&self) -> bool {
        self.lag == 0 && self.x == self.y
    }
}

/// The basis set `Z(α, β)` of the path-groupoid topology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSet {
    pub alpha: FinitePath,
    pub beta: FinitePath,
}

impl BasisSet {
    pub fn new(graph: &DirectedGraph, alpha: FinitePath, beta: FinitePath) -> Result<BasisSet, GraphError> {
        if alpha.source_name(graph) != beta.source_name(graph) {
            return Err(GraphError::NotComposable(
                "source of alpha".into(),
                "source of beta".into(),
            ));
        }
        Ok(BasisSet { alpha, beta })
    }

    pub fn diagonal(alpha: FinitePath) -> BasisSet {
        BasisSet { beta: alpha.clone(), alpha }
    }
}

/// Exact membership of an element in `Z(α, β)`: prefix checks, the lag
/// equation `n = |α| − |β|`, and tail agreement beyond the prefixes.
pub fn basis_member<R: RayResolver>(
    graph: &DirectedGraph,
    resolver: &R,
    g: &GroupoidElement,
    z: &BasisSet,
) -> bool {
    if g.lag != z.alpha.len() as i64 - z.beta.len() as i64 {
        return false;
    }
    if g.x.range_name() != z.alpha.range_name() || g.y.range_name() != z.beta.range_name() {
        return false;
    }
    for (i, e) in z.alpha.edges.iter().enumerate() {
        if &g.x.edge_at(resolver, i + 1) != e {
            return false;
        }
    }
    for (i, e) in z.beta.edges.iter().enumerate() {
        if &g.y.edge_at(resolver, i + 1) != e {
            return false;
        }
    }
    g.x.shift(graph, resolver, z.alpha.len()) == g.y.shift(graph, resolver, z.beta.len())
}

/// `λ_x(G^{Z(α)})`: the number of paths in the cylinder `αE^∞` shift
/// equivalent to `x`. Requires a principal ambient graph (no cycles for
/// directed graphs); infinite counts come with the growth certificate of
/// the stabilizing evaluation.
pub fn count_shift_class_in_cylinder(
    family: &StagedDigraph,
    x: &InfinitePath,
    alpha: &FinitePath,
    budget: usize,
) -> Stabilized<Count> {
    let probe = family.stage(budget.max(6));
    if !probe.find_cycles().is_empty() {
        return Stabilized::Unknown {
            reason: "ambient graph is not principal (it has cycles)".into(),
        };
    }
    if alpha.validate(&probe).is_err() {
        return Stabilized::Unknown { reason: "cylinder prefix is not a path of the stage".into() };
    }
    let from = alpha.source_name(&probe);
    stabilized_class_count(family, &from, &TailClass::of(x), budget)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicityProfile {
    pub family: String,
    pub target: usize,
    pub cylinder_depths: usize,
    pub index_window: usize,
    /// `λ_z` per cylinder depth.
    pub lambda_z: Vec<u64>,
    /// `c(m, n) = λ_{x⁽ⁿ⁾}(G^{Z(z(0,m))})`, indexed `[m][n]`.
    pub counts: Vec<Vec<u64>>,
    pub m_l: u64,
    pub m_u: u64,
    pub certified: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Computes the cylinder count table and the relative multiplicities
/// `M_L = min_m liminf_n c(m,n)/λ_z` and `M_U = min_m limsup_n c(m,n)/λ_z`.
/// The liminf/limsup over the infinite index set are evaluated on the
/// window's periodic tail and certified through the family's
/// eventual-constancy contract.
pub fn multiplicity_profile(
    fam: &SequenceFamily,
    target: usize,
    cylinder_depths: usize,
    index_window: usize,
    budget: usize,
) -> MultiplicityProfile {
    let family = &fam.graph;
    let period = family.contracts().column_period.max(1);
    let mut notes = Vec::new();
    let mut certified = true;
    let z_anchor = fam.targets()[target];
    let z = fam.limit(target);
    let need = cylinder_depths + 2 * period + 2;
    let window = index_window.max(need);
    let budget = budget.max(window + 2);

    let probe = StageProbe::new(family, budget);
    let mut lambda_z = Vec::new();
    for m in 0..cylinder_depths {
        let from = family.ray_vertex(z_anchor, m);
        match probe.class_count(&from, &TailClass::of(&z)) {
            Stabilized::Certified(Count::Finite(c)) => lambda_z.push(c),
            other => {
                notes.push(format!("lambda_z({m}) did not certify: {other:?}"));
                certified = false;
                lambda_z.push(0);
            }
        }
    }

    let mut counts = vec![vec![0u64; window]; cylinder_depths];
    for n in 0..window {
        let member = fam.member(n);
        let class = TailClass::of(&member);
        for (m, row) in counts.iter_mut().enumerate() {
            let from = family.ray_vertex(z_anchor, m);
            match probe.class_count(&from, &class) {
                Stabilized::Certified(Count::Finite(c)) => row[n] = c,
                Stabilized::Certified(Count::Infinite) => {
                    row[n] = u64::MAX;
                    notes.push(format!("c({m},{n}) is infinite"));
                    certified = false;
                }
                other => {
                    notes.push(format!("c({m},{n}) did not certify: {other:?}"));
                    certified = false;
                }
            }
        }
    }

    // liminf/limsup over n per cylinder: the tail of each row must be
    // periodic with the family period inside the window.
    let mut m_l = u64::MAX;
    let mut m_u = u64::MAX;
    for m in 0..cylinder_depths {
        let row = &counts[m];
        let tail_start = window - 2 * period;
        for n in tail_start..(window - period) {
            if row[n] != row[n + period] {
                notes.push(format!(
                    "row {m} is not {period}-periodic at the window tail; contract violated"
                ));
                certified = false;
            }
        }
        let tail = &row[window - period..];
        let lo = *tail.iter().min().unwrap();
        let hi = *tail.iter().max().unwrap();
        let lz = lambda_z.get(m).copied().unwrap_or(0);
        if lz == 0 {
            certified = false;
            continue;
        }
        m_l = m_l.min(lo / lz);
        m_u = m_u.min(hi / lz);
    }
    MultiplicityProfile {
        family: fam.name.clone(),
        target,
        cylinder_depths,
        index_window: window,
        lambda_z,
        counts,
        m_l,
        m_u,
        certified,
        notes,
    }
}

/// How the witness sequences are chosen for the k-times check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessChoice {
    /// The family's diversion channels toward the given target.
    Canonical,
    /// All channels replaced by the first one; condition (iii) must fail.
    Duplicated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub certified: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub family: String,
    pub target: usize,
    pub k: usize,
    pub choice: WitnessChoice,
    /// (i) every witness has source `x⁽ⁿ⁾`.
    pub sources: ConditionReport,
    /// (ii) witness ranges converge to the limit path.
    pub convergence: ConditionReport,
    /// (iii) pairwise products escape every basis set of the cover.
    pub escape: ConditionReport,
    pub passes: bool,
}

/// Default escape cover: the diagonal cylinders of every limit target.
pub fn default_escape_cover(fam: &SequenceFamily, cylinders: usize, budget: usize) -> Vec<BasisSet> {
    let g = fam.graph.stage(budget.max(cylinders + 2));
    let mut out = Vec::new();
    for (t, _) in fam.targets().iter().enumerate() {
        let z = fam.limit(t);
        for m in 0..cylinders {
            let alpha = z.segment(&g, &fam.graph, 0, m).expect("limit segment");
            out.push(BasisSet::diagonal(alpha));
        }
    }
    out
}

/// Verifies the three conditions of k-times convergence for the family's
/// witness sequences over a finite index window.
pub fn k_times_witness_check(
    fam: &SequenceFamily,
    target: usize,
    k: usize,
    choice: WitnessChoice,
    window: usize,
    cylinders: usize,
    escape_cover: &[BasisSet],
    budget: usize,
) -> WitnessReport {
    let family = &fam.graph;
    let stage = family.stage(budget.max(window + cylinders + 4));
    let contract = family.contracts().anchor_complete;
    let witness = |i: usize, n: usize| -> GroupoidElement {
        let member = fam.member(n);
        let channel = match choice {
            WitnessChoice::Canonical => i,
            WitnessChoice::Duplicated => 1,
        };
        let r_path = fam.diversion(target, channel, n);
        GroupoidElement::new(r_path, 0, member).expect("witness channels share the member's tail")
    };

    // (i) s(γ_n^{(i)}) = x⁽ⁿ⁾ — structural, exact.
    let mut sources_ok = true;
    for n in 0..window {
        let member = fam.member(n);
        for i in 1..=k {
            if witness(i, n).y != member {
                sources_ok = false;
            }
        }
    }
    let sources = ConditionReport {
        holds: sources_ok,
        certified: true,
        detail: format!("checked indices 0..{window}"),
    };

    // (ii) r(γ_n^{(i)}) → z: for each cylinder depth m there is N with
    // r(γ_n) in Z(z(0,m)) for all window indices beyond N.
    let z = fam.limit(target);
    let mut convergence_ok = true;
    let mut max_onset = 0usize;
    'conv: for m in 0..cylinders {
        let alpha = z.segment(&stage, family, 0, m).expect("limit segment");
        let cyl = BasisSet::diagonal(alpha);
        for i in 1..=k {
            let mut onset = None;
            for n in (0..window).rev() {
                let r = witness(i, n).range();
                if basis_member(&stage, family, &r, &cyl) {
                    onset = Some(n);
                } else {
                    break;
                }
            }
            match onset {
                Some(n0) if window - n0 >= 2 => max_onset = max_onset.max(n0),
                _ => {
                    convergence_ok = false;
                    break 'conv;
                }
            }
        }
    }
    let convergence = ConditionReport {
        holds: convergence_ok,
        certified: convergence_ok && contract,
        detail: format!("membership onset at most index {max_onset} per cylinder"),
    };

    // (iii) γ_n^{(j)}(γ_n^{(i)})⁻¹ → ∞: eventual escape from every basis set
    // of the cover.
    let mut escape_ok = true;
    let mut detail = String::new();
    'esc: for i in 1..=k {
        for j in (i + 1)..=k {
            for (zi, zset) in escape_cover.iter().enumerate() {
                let mut last_inside = None;
                for n in 0..window {
                    let gi = witness(i, n);
                    let gj = witness(j, n);
                    let prod = gj.compose(&gi.inverse()).expect("common source");
                    if basis_member(&stage, family, &prod, zset) {
                        last_inside = Some(n);
                    }
                }
                match last_inside {
                    Some(n) if n + 2 >= window => {
                        escape_ok = false;
                        detail = format!(
                            "product of witnesses {j} and {i} stays in cover set {zi} through the window end"
                        );
                        break 'esc;
                    }
                    _ => {}
                }
            }
        }
    }
    if escape_ok {
        detail = format!(
            "all pairwise products leave every cover set before index {}",
            window.saturating_sub(2)
        );
    }
    let escape = ConditionReport { holds: escape_ok, certified: contract, detail };

    let passes = sources.holds && convergence.holds && escape.holds;
    WitnessReport {
        family: fam.name.clone(),
        target,
        k,
        choice,
        sources,
        convergence,
        escape,
        passes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SequenceFamily;

    fn two_times() -> SequenceFamily {
        SequenceFamily::new("thesis:2times").unwrap()
    }

    #[test]
    fn unit_laws_hold() {
        let fam = two_times();
        let g = GroupoidElement::new(fam.diversion(0, 2, 3), 0, fam.member(3)).unwrap();
        let unit = g.compose(&g.inverse()).unwrap();
        assert!(unit.is_unit());
        assert_eq!(unit, g.range());
        assert_eq!(g.inverse().compose(&g).unwrap(), g.source());
    }

    #[test]
    fn lag_arithmetic_in_composition() {
        let fam = two_times();
        let family = &fam.graph;
        let x = fam.member(2);
        let sx = {
            let g = family.stage(8);
            x.shift(&g, family, 1)
        };
        let a = GroupoidElement::new(x.clone(), 1, sx.clone()).unwrap();
        let b = GroupoidElement::new(sx, -1, x.clone()).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.lag, 0);
        assert!(c.is_unit());
    }

    #[test]
    fn basis_membership_by_construction() {
        let fam = two_times();
        let family = &fam.graph;
        let stage = family.stage(8);
        let x = fam.diversion(0, 1, 2);
        let y = fam.diversion(0, 2, 2);
        let alpha = x.segment(&stage, family, 0, 3).unwrap();
        let beta = y.segment(&stage, family, 0, 3).unwrap();
        let g = GroupoidElement::new(x.clone(), 0, y.clone()).unwrap();
        let z = BasisSet::new(&stage, alpha, beta).unwrap();
        assert!(basis_member(&stage, family, &g, &z));
        // Lag mismatch fails.
        let bad = GroupoidElement { x, lag: 1, y };
        assert!(!basis_member(&stage, family, &bad, &z));
    }

    #[test]
    fn two_times_cylinder_counts() {
        let fam = two_times();
        let family = &fam.graph;
        let stage = family.stage(10);
        let z = fam.limit(0);
        for (m, n, expect) in [(1usize, 3usize, 2u64), (2, 3, 2), (3, 1, 0)] {
            let alpha = z.segment(&stage, family, 0, m).unwrap();
            let x = fam.member(n);
            match count_shift_class_in_cylinder(family, &x, &alpha, 8) {
                Stabilized::Certified(Count::Finite(c)) => assert_eq!(c, expect, "m={m} n={n}"),
                other => panic!("expected certified count, got {other:?}"),
            }
        }
        // λ_z = 1 in every cylinder.
        let alpha = z.segment(&stage, family, 0, 2).unwrap();
        match count_shift_class_in_cylinder(family, &z, &alpha, 8) {
            Stabilized::Certified(Count::Finite(1)) => {}
            other => panic!("expected 1, got {other:?}"),
        }
    }

    #[test]
    fn profiles_of_builtin_families() {
        let p = multiplicity_profile(&two_times(), 0, 4, 10, 10);
        assert!(p.certified, "{:?}", p.notes);
        assert_eq!((p.m_l, p.m_u), (2, 2));
        let p3 = multiplicity_profile(&SequenceFamily::new("thesis:ktimes:3").unwrap(), 0, 4, 10, 10);
        assert_eq!((p3.m_l, p3.m_u), (3, 3));
        let pm = multiplicity_profile(&SequenceFamily::new("thesis:ml2mu3").unwrap(), 0, 4, 12, 12);
        assert!(pm.certified, "{:?}", pm.notes);
        assert_eq!((pm.m_l, pm.m_u), (2, 3));
    }

    #[test]
    fn witness_checks() {
        let fam = two_times();
        let cover = default_escape_cover(&fam, 4, 10);
        let report =
            k_times_witness_check(&fam, 0, 2, WitnessChoice::Canonical, 12, 4, &cover, 12);
        assert!(report.passes, "{report:?}");
        assert!(report.sources.certified && report.convergence.certified);
        let dup = k_times_witness_check(&fam, 0, 2, WitnessChoice::Duplicated, 12, 4, &cover, 12);
        assert!(!dup.passes);
        assert!(dup.sources.holds && dup.convergence.holds && !dup.escape.holds);
    }

    #[test]
    fn non_hausdorff_converges_to_both_targets() {
        let fam = SequenceFamily::new("thesis:nonhausdorff").unwrap();
        let cover = default_escape_cover(&fam, 3, 10);
        for target in [0, 1] {
            let report =
                k_times_witness_check(&fam, target, 2, WitnessChoice::Canonical, 12, 3, &cover, 12);
            assert!(report.passes, "target {target}: {report:?}");
        }
    }
}

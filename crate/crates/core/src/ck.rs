//! Cuntz-Krieger relation checking over exact rational matrices.
//!
//! Matrices have real rational entries, so the adjoint is the transpose.
//! Directed-graph families carry one projection per vertex and one partial
//! isometry per edge; k-graph families give vertex and edge generators and
//! derive every other morphism matrix multiplicatively from the normal form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::KGraphError;
use crate::graph::DirectedGraph;
use crate::kgraph::{Degree, KGraph, Morphism};
use crate::kpaths::{boundary_member, morphism_label, KPath};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub dim: usize,
    /// Row-major entries.
    pub entries: Vec<BigRational>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Matrix {
        Matrix { dim, entries: vec![BigRational::from_integer(BigInt::from(0)); dim * dim] }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix::zero(dim);
        for i in 0..dim {
            *m.at_mut(i, i) = BigRational::from_integer(BigInt::from(1));
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.entries[i * self.dim + j]
    }

    pub fn set_int(&mut self, i: usize, j: usize, v: i64) {
        *self.at_mut(i, j) = BigRational::from_integer(BigInt::from(v));
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let mut out = Matrix::zero(self.dim);
        for i in 0..self.dim {
            for l in 0..self.dim {
                let a = self.at(i, l);
                if a.numer().sign() == num_bigint::Sign::NoSign {
                    continue;
                }
                for j in 0..self.dim {
                    let add = a * other.at(l, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.numer().sign() == num_bigint::Sign::NoSign)
    }

    /// Largest absolute entry, as a display of the residual size.
    pub fn max_abs(&self) -> String {
        self.entries
            .iter()
            .map(|e| if e.numer().sign() == num_bigint::Sign::Minus { -e.clone() } else { e.clone() })
            .max()
            .map(|m| m.to_string())
            .unwrap_or_else(|| "0".into())
    }
}

/// Matrices assigned to the generators (vertices and edges, by name).
#[derive(Clone, Debug, Default)]
pub struct CKFamily {
    pub dim: usize,
    pub vertex_ops: BTreeMap<String, Matrix>,
    pub edge_ops: BTreeMap<String, Matrix>,
}

/// One violated relation, with the residual matrix magnitude.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Violation {
    pub relation: String,
    pub detail: String,
    pub residual: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, relation: &str, detail: String, residual: &Matrix) {
        self.violations.push(Violation {
            relation: relation.to_string(),
            detail,
            residual: residual.max_abs(),
        });
    }
}

fn check_projections(
    report: &mut ViolationReport,
    ops: &BTreeMap<String, Matrix>,
) {
    let names: Vec<&String> = ops.keys().collect();
    for (i, v) in names.iter().enumerate() {
        let p = &ops[*v];
        let idem = p.mul(p).sub(p);
        if !idem.is_zero() {
            report.push("projection", format!("P_{v} is not idempotent"), &idem);
        }
        let sym = p.transpose().sub(p);
        if !sym.is_zero() {
            report.push("projection", format!("P_{v} is not self-adjoint"), &sym);
        }
        for w in names.iter().skip(i + 1) {
            let prod = p.mul(&ops[w.as_str()]);
            if !prod.is_zero() {
                report.push(
                    "projection",
                    format!("P_{v} and P_{w} are not orthogonal"),
                    &prod,
                );
            }
        }
    }
}

/// Checks a directed-graph family: (i) `S_f^* S_f = P_{s(f)}`, and (ii)
/// `P_v = Σ_{f ∈ vE¹} S_f S_f^*` at every non-source vertex, plus the
/// mutual-orthogonality bookkeeping.
pub fn ck_verify_digraph(graph: &DirectedGraph, family: &CKFamily) -> Result<ViolationReport, KGraphError> {
    let mut report = ViolationReport::default();
    for v in graph.vertices() {
        if !family.vertex_ops.contains_key(graph.vertex_name(v)) {
            return Err(KGraphError::DimensionMismatch(format!(
                "missing matrix for vertex {}",
                graph.vertex_name(v)
            )));
        }
    }
    for e in graph.edge_ids() {
        if !family.edge_ops.contains_key(graph.edge_name(e)) {
            return Err(KGraphError::DimensionMismatch(format!(
                "missing matrix for edge {}",
                graph.edge_name(e)
            )));
        }
    }
    for m in family.vertex_ops.values().chain(family.edge_ops.values()) {
        if m.dim != family.dim {
            return Err(KGraphError::DimensionMismatch(format!(
                "expected dimension {}, found {}",
                family.dim, m.dim
            )));
        }
    }
    check_projections(&mut report, &family.vertex_ops);
    for e in graph.edge_ids() {
        let s = &family.edge_ops[graph.edge_name(e)];
        let p = &family.vertex_ops[graph.vertex_name(graph.source(e))];
        let lhs = s.transpose().mul(s);
        let res = lhs.sub(p);
        if !res.is_zero() {
            report.push(
                "CK(i)",
                format!("S_{}^* S_{} != P_{}", graph.edge_name(e), graph.edge_name(e),
                    graph.vertex_name(graph.source(e))),
                &res,
            );
        }
    }
    for v in graph.vertices() {
        if graph.is_source(v) {
            continue;
        }
        let mut sum = Matrix::zero(family.dim);
        for &e in graph.edges_with_range(v) {
            let s = &family.edge_ops[graph.edge_name(e)];
            sum = sum.add(&s.mul(&s.transpose()));
        }
        let res = sum.sub(&family.vertex_ops[graph.vertex_name(v)]);
        if !res.is_zero() {
            report.push(
                "CK(ii)",
                format!("P_{} != sum of S_f S_f^* over f in vE1", graph.vertex_name(v)),
                &res,
            );
        }
    }
    Ok(report)
}

/// Derives `t_μ` multiplicatively from the generator matrices (this is CK2).
fn derive(kg: &KGraph, family: &CKFamily, m: &Morphism) -> Matrix {
    let mut out = family.vertex_ops[kg.vertex_name(m.at)].clone();
    for &e in &m.edges {
        out = out.mul(&family.edge_ops[kg.edge_name(e)]);
    }
    out
}

/// Checks a k-graph family: CK1 (orthogonal vertex projections), CK2
/// (square consistency of the multiplicative extension), CK3 over all
/// morphism pairs with degree ≤ `deg_bound`, and CK4 over every finite
/// exhaustive set within the bound.
pub fn ck_verify_kgraph(
    kg: &KGraph,
    family: &CKFamily,
    deg_bound: u32,
) -> Result<ViolationReport, KGraphError> {
    let mut report = ViolationReport::default();
    for v in kg.skeleton().vertices() {
        if !family.vertex_ops.contains_key(kg.vertex_name(v)) {
            return Err(KGraphError::DimensionMismatch(format!(
                "missing matrix for vertex {}",
                kg.vertex_name(v)
            )));
        }
    }
    for e in kg.skeleton().edge_ids() {
        if !family.edge_ops.contains_key(kg.edge_name(e)) {
            return Err(KGraphError::DimensionMismatch(format!(
                "missing matrix for edge {}",
                kg.edge_name(e)
            )));
        }
    }
    check_projections(&mut report, &family.vertex_ops);
    // CK2: the derived matrices must agree across each factorization square,
    // otherwise t_μ is not well defined.
    for e in kg.skeleton().edge_ids() {
        for &f in kg.skeleton().edges_with_range(kg.skeleton().source(e)) {
            if kg.color(e) == kg.color(f) {
                continue;
            }
            let word = kg
                .compose(&kg.edge_morphism(e), &kg.edge_morphism(f))
                .expect("composable");
            let a = &family.edge_ops[kg.edge_name(e)];
            let b = &family.edge_ops[kg.edge_name(f)];
            let direct = a.mul(b);
            let via_nf = word
                .edges
                .iter()
                .fold(Matrix::identity(family.dim), |acc, &g| {
                    acc.mul(&family.edge_ops[kg.edge_name(g)])
                });
            let res = direct.sub(&via_nf);
            if !res.is_zero() {
                report.push(
                    "CK2",
                    format!(
                        "t is not multiplicative across the square at {}·{}",
                        kg.edge_name(e),
                        kg.edge_name(f)
                    ),
                    &res,
                );
            }
        }
    }
    let bound = Degree(vec![deg_bound; kg.k]);
    // CK3: t_μ^* t_ν = Σ_{(α,β) ∈ Λ^min(μ,ν)} t_α t_β^*.
    for v in kg.skeleton().vertices() {
        let pool = kg.morphisms_from_up_to(v, &bound);
        for mu in &pool {
            for nu in &pool {
                let lhs = derive(kg, family, mu).transpose().mul(&derive(kg, family, nu));
                let mut rhs = Matrix::zero(family.dim);
                for (alpha, beta) in kg.lambda_min(mu, nu) {
                    rhs = rhs.add(
                        &derive(kg, family, &alpha).mul(&derive(kg, family, &beta).transpose()),
                    );
                }
                let res = lhs.sub(&rhs);
                if !res.is_zero() {
                    report.push(
                        "CK3",
                        format!(
                            "t_mu^* t_nu != sum over minimal extensions for mu={}, nu={}",
                            morphism_label(kg, mu),
                            morphism_label(kg, nu)
                        ),
                        &res,
                    );
                }
            }
        }
    }
    // CK4: ∏_{μ∈D}(t_v − t_μ t_μ^*) = 0 over finite exhaustive sets.
    for v in kg.skeleton().vertices() {
        let p_v = &family.vertex_ops[kg.vertex_name(v)];
        for d_set in kg.finite_exhaustive_sets(v, &bound, 16) {
            let mut prod = Matrix::identity(family.dim);
            for mu in &d_set {
                let t = derive(kg, family, mu);
                prod = prod.mul(&p_v.sub(&t.mul(&t.transpose())));
            }
            if !prod.is_zero() {
                report.push(
                    "CK4",
                    format!(
                        "product over D = {{{}}} at {} is nonzero",
                        d_set
                            .iter()
                            .map(|m| morphism_label(kg, m))
                            .collect::<Vec<_>>()
                            .join(", "),
                        kg.vertex_name(v)
                    ),
                    &prod,
                );
            }
        }
    }
    Ok(report)
}

/// The boundary-path representation of a finite k-graph with finite `∂Λ`
/// (for example any finite acyclic k-graph): basis indexed by boundary
/// paths, `t_λ · δ_x = δ_{λx}`. Satisfies CK1–CK4 exactly.
pub fn boundary_representation(kg: &KGraph, budget: u32) -> Result<CKFamily, KGraphError> {
    if kg.has_cycle() {
        return Err(KGraphError::Invalid(
            "boundary representation needs a finite path space (acyclic k-graph)".into(),
        ));
    }
    let mut basis: Vec<Morphism> = Vec::new();
    for v in kg.skeleton().vertices() {
        let cap = Degree(vec![budget; kg.k]);
        for m in kg.morphisms_from_up_to(v, &cap) {
            if boundary_member(kg, &KPath::Finite(m.clone()), budget).is_yes() {
                basis.push(m);
            }
        }
    }
    basis.sort();
    basis.dedup();
    let dim = basis.len();
    let index: BTreeMap<&Morphism, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut family = CKFamily { dim, ..Default::default() };
    for v in kg.skeleton().vertices() {
        let mut p = Matrix::zero(dim);
        for (i, x) in basis.iter().enumerate() {
            if x.at == v {
                p.set_int(i, i, 1);
            }
        }
        family.vertex_ops.insert(kg.vertex_name(v).to_string(), p);
    }
    for e in kg.skeleton().edge_ids() {
        let mut s = Matrix::zero(dim);
        for (j, x) in basis.iter().enumerate() {
            if x.at == kg.skeleton().source(e) {
                let ex = kg.compose(&kg.edge_morphism(e), x).expect("composable");
                if let Some(&i) = index.get(&ex) {
                    s.set_int(i, j, 1);
                }
            }
        }
        family.edge_ops.insert(kg.edge_name(e).to_string(), s);
    }
    Ok(family)
}

/// The same construction specialised to directed graphs, indexing the basis
/// by `E^{≤∞}` (finite for finite acyclic graphs).
pub fn boundary_representation_digraph(graph: &DirectedGraph) -> Result<CKFamily, KGraphError> {
    if !graph.find_cycles().is_empty() {
        return Err(KGraphError::Invalid(
            "boundary representation needs an acyclic graph".into(),
        ));
    }
    // All paths ending at a source.
    let mut basis: Vec<Vec<crate::graph::EdgeId>> = Vec::new();
    let mut ranges: Vec<crate::graph::VertexId> = Vec::new();
    for v in graph.vertices() {
        let mut stack = vec![(v, Vec::new())];
        while let Some((u, path)) = stack.pop() {
            if graph.is_source(u) {
                ranges.push(v);
                basis.push(path.clone());
            }
            for &e in graph.edges_with_range(u) {
                let mut next = path.clone();
                next.push(e);
                stack.push((graph.source(e), next));
            }
        }
    }
    let dim = basis.len();
    let mut family = CKFamily { dim, ..Default::default() };
    for v in graph.vertices() {
        let mut p = Matrix::zero(dim);
        for i in 0..dim {
            if ranges[i] == v {
                p.set_int(i, i, 1);
            }
        }
        family.vertex_ops.insert(graph.vertex_name(v).to_string(), p);
    }
    for e in graph.edge_ids() {
        let mut s = Matrix::zero(dim);
        for (j, path) in basis.iter().enumerate() {
            if ranges[j] == graph.source(e) {
                let mut ext = vec![e];
                ext.extend(path.iter().copied());
                if let Some(i) = basis
                    .iter()
                    .enumerate()
                    .position(|(i, b)| ranges[i] == graph.range(e) && b == &ext)
                {
                    s.set_int(i, j, 1);
                }
            }
        }
        family.edge_ops.insert(graph.edge_name(e).to_string(), s);
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{acyclic_chain, single_loop};
    use crate::kgraph::omega;

    #[test]
    fn single_vertex_loop_scalar_family() {
        let g = single_loop();
        let mut fam = CKFamily { dim: 1, ..Default::default() };
        fam.vertex_ops.insert("u".into(), Matrix::identity(1));
        fam.edge_ops.insert("g".into(), Matrix::identity(1));
        assert!(ck_verify_digraph(&g, &fam).unwrap().is_valid());
        // Zeroing the isometry breaks CK(i).
        fam.edge_ops.insert("g".into(), Matrix::zero(1));
        let report = ck_verify_digraph(&g, &fam).unwrap();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.relation == "CK(i)"));
    }

    #[test]
    fn two_parallel_edges_rank_one_isometries() {
        // Two edges v ← u; boundary paths: u, f·u, g·u — a 3-dim family.
        let mut g = DirectedGraph::new(crate::graph::GraphKind::Finite);
        g.add_vertex("v").unwrap();
        g.add_vertex("u").unwrap();
        g.add_edge("f", "v", "u").unwrap();
        g.add_edge("g", "v", "u").unwrap();
        let fam = boundary_representation_digraph(&g).unwrap();
        assert_eq!(fam.dim, 3);
        let report = ck_verify_digraph(&g, &fam).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn chain_boundary_representation_is_valid() {
        let g = acyclic_chain(3);
        let fam = boundary_representation_digraph(&g).unwrap();
        assert!(ck_verify_digraph(&g, &fam).unwrap().is_valid());
    }

    #[test]
    fn omega_boundary_representation_passes_all_relations() {
        let kg = omega(2, &[2, 1]);
        let fam = boundary_representation(&kg, 3).unwrap();
        let report = ck_verify_kgraph(&kg, &fam, 2).unwrap();
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn omega_family_mutations_are_flagged() {
        let kg = omega(2, &[1, 1]);
        let fam = boundary_representation(&kg, 2).unwrap();
        assert!(ck_verify_kgraph(&kg, &fam, 2).unwrap().is_valid());
        // Swap one edge matrix for another: some relation must break.
        let mut bad = fam.clone();
        let names: Vec<String> = bad.edge_ops.keys().cloned().collect();
        let first = bad.edge_ops[&names[0]].clone();
        bad.edge_ops.insert(names[1].clone(), first);
        let report = ck_verify_kgraph(&kg, &bad, 2).unwrap();
        assert!(!report.is_valid());
    }
}

//! Discrete invariants of transverse maps into a degenerate fibre, the
//! pre-logarithmic conditions, base order, the compatibility group `G` and the
//! number of logarithmic enhancements.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::{BaseMap, ConeComplex};
use crate::curve::{CombType, Edge, Leg, UnionFind, Vertex};
use crate::error::structural;
use crate::lattice::{dot, integral_length, sublattice_index, IntMatrix, LatticeIndex};
use crate::Result;

/// An irreducible component of the domain curve. `target` names the
/// component of `X₀` containing its image and `mu` that component's
/// multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub target: String,
    pub mu: BigInt,
    pub genus: u32,
}

/// A node mapping to a codimension-one stratum of `X₀`. `P_q` is the monoid
/// of the stratum in a `ℤ²` chart, spanned by `m1` (killed at the first
/// branch) and `m2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedNode {
    pub id: String,
    pub branches: (usize, usize),
    pub m1: Vec<BigInt>,
    pub m2: Vec<BigInt>,
    pub rho: Vec<BigInt>,
    pub w: (BigInt, BigInt),
}

/// A node mapping to the smooth locus of `X₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeNode {
    pub id: String,
    pub branches: (usize, usize),
}

/// A marked point on a stratum of `X₀^[1]`, with the chart of its monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedMarking {
    pub id: String,
    pub component: usize,
    pub m1: Vec<BigInt>,
    pub m2: Vec<BigInt>,
    pub rho: Vec<BigInt>,
    pub w: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsorFlag {
    Yes,
    No,
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransverseMapData {
    pub components: Vec<Component>,
    pub nodes: Vec<ConstrainedNode>,
    pub free_nodes: Vec<FreeNode>,
    pub markings: Vec<ConstrainedMarking>,
    pub torsor: TorsorFlag,
}

/// The rank-two chart data: `n1 ⊥ m1`, `n2 ⊥ m2` primitive in the dual,
/// `ind = ⟨n1, m2⟩ = ⟨n2, m1⟩` and `mu_i = ⟨n_i, ρ⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTwoChart {
    pub n1: Vec<BigInt>,
    pub n2: Vec<BigInt>,
    pub ind: BigInt,
    pub mu1: BigInt,
    pub mu2: BigInt,
}

fn perp_towards(m: &[BigInt], other: &[BigInt]) -> Vec<BigInt> {
    let n = vec![-&m[1], m[0].clone()];
    if dot(&n, other).is_negative() { n.iter().map(|x| -x).collect() } else { n }
}

/// Chart data of `P = cone(m1, m2) ∩ ℤ²` with the distinguished `ρ`.
pub fn rank_two_chart(m1: &[BigInt], m2: &[BigInt], rho: &[BigInt]) -> Result<RankTwoChart> {
    if m1.len() != 2 || m2.len() != 2 || rho.len() != 2 {
        return Err(structural!("node monoids are given in a ℤ² chart"));
    }
    if !integral_length(m1).is_one() || !integral_length(m2).is_one() {
        return Err(structural!("extremal generators must be primitive"));
    }
    let n1 = perp_towards(m1, m2);
    let n2 = perp_towards(m2, m1);
    let ind = dot(&n1, m2);
    if ind.is_zero() {
        return Err(structural!("extremal generators are parallel"));
    }
    debug_assert_eq!(ind, dot(&n2, m1));
    let (mu1, mu2) = (dot(&n1, rho), dot(&n2, rho));
    if mu1.is_negative() || mu2.is_negative() {
        return Err(structural!("ρ is not in the monoid"));
    }
    Ok(RankTwoChart { n1, n2, ind, mu1, mu2 })
}

impl TransverseMapData {
    /// Structural checks: indices, positivity, charts, and agreement of the
    /// component multiplicities with `⟨n_i, ρ⟩`.
    pub fn validate(&self) -> Result<()> {
        let n = self.components.len();
        if n == 0 {
            return Err(structural!("no components"));
        }
        let mut mu_of: BTreeMap<&str, &BigInt> = BTreeMap::new();
        for c in &self.components {
            if !c.mu.is_positive() {
                return Err(structural!("component {:?} has non-positive multiplicity", c.id));
            }
            if let Some(m) = mu_of.insert(&c.target, &c.mu) {
                if m != &c.mu {
                    return Err(structural!("components on {:?} disagree on its multiplicity", c.target));
                }
            }
        }
        let mut uf = UnionFind::new(n);
        for q in &self.nodes {
            let (a, b) = q.branches;
            if a >= n || b >= n {
                return Err(structural!("node {:?} has a branch outside the components", q.id));
            }
            if !q.w.0.is_positive() || !q.w.1.is_positive() {
                return Err(structural!("node {:?} has a non-positive intersection number", q.id));
            }
            let ch = rank_two_chart(&q.m1, &q.m2, &q.rho)?;
            if ch.mu1.is_zero() || ch.mu2.is_zero() {
                return Err(structural!("ρ at node {:?} is not interior", q.id));
            }
            if ch.mu1 != self.components[a].mu || ch.mu2 != self.components[b].mu {
                return Err(structural!("multiplicities at node {:?} disagree with ⟨n_i, ρ⟩", q.id));
            }
            uf.union(a, b);
        }
        for f in &self.free_nodes {
            let (a, b) = f.branches;
            if a >= n || b >= n {
                return Err(structural!("free node {:?} has a branch outside the components", f.id));
            }
            if self.components[a].target != self.components[b].target {
                return Err(structural!("free node {:?} joins different components of the fibre", f.id));
            }
            uf.union(a, b);
        }
        if (1..n).any(|i| uf.find(i) != uf.find(0)) {
            return Err(structural!("domain curve is disconnected"));
        }
        for p in &self.markings {
            if p.component >= n {
                return Err(structural!("marking {:?} lies on no component", p.id));
            }
            if !p.w.is_positive() {
                return Err(structural!("marking {:?} has a non-positive intersection number", p.id));
            }
            let ch = rank_two_chart(&p.m1, &p.m2, &p.rho)?;
            if ch.mu1 != self.components[p.component].mu {
                return Err(structural!("multiplicity at marking {:?} disagrees with ⟨n1, ρ⟩", p.id));
            }
        }
        Ok(())
    }
}

/// `(Ind_q, λ(q))` with `λ(q) = ℓ(ρ_q)·Ind_q/(μ₁μ₂)`.
pub fn index_and_length(q: &ConstrainedNode) -> Result<(BigInt, BigRational)> {
    if q.rho.iter().all(Zero::is_zero) {
        return Err(structural!("ρ at node {:?} is zero", q.id));
    }
    let ch = rank_two_chart(&q.m1, &q.m2, &q.rho)?;
    if ch.mu1.is_zero() || ch.mu2.is_zero() {
        return Err(structural!("ρ at node {:?} is not interior", q.id));
    }
    let lambda = BigRational::new(integral_length(&q.rho) * &ch.ind, &ch.mu1 * &ch.mu2);
    Ok((ch.ind, lambda))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrelogProblem {
    /// Both branches of a constrained node map to one component of `X₀`.
    SameComponent,
    /// `μ₁w₂ ≠ μ₂w₁`.
    Unbalanced,
    /// `(w_i/μ_i)·ℓ(ρ_q)` is not an integer.
    FractionalBranching,
    /// A constrained marking sits on a singular point of `X₀`.
    MarkingNotSmooth,
    /// `Ind_p` does not divide `w`.
    MarkingIndex,
}

impl PrelogProblem {
    pub fn kind(&self) -> &'static str {
        match self {
            PrelogProblem::SameComponent => "same-component",
            PrelogProblem::Unbalanced => "unbalanced",
            PrelogProblem::FractionalBranching => "fractional-branching",
            PrelogProblem::MarkingNotSmooth => "marking-not-smooth",
            PrelogProblem::MarkingIndex => "marking-index",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrelogIssue {
    pub site: String,
    pub problem: PrelogProblem,
}

/// Every violated pre-logarithmic condition; empty when the map is
/// pre-logarithmic. Expects validated data.
pub fn check_prelog(d: &TransverseMapData) -> Vec<PrelogIssue> {
    let mut out = Vec::new();
    let mut issue = |site: &str, problem| out.push(PrelogIssue { site: site.to_string(), problem });
    for q in &d.nodes {
        let (a, b) = q.branches;
        if d.components[a].target == d.components[b].target {
            issue(&q.id, PrelogProblem::SameComponent);
        }
        let (mu1, mu2) = (&d.components[a].mu, &d.components[b].mu);
        if mu1 * &q.w.1 != mu2 * &q.w.0 {
            issue(&q.id, PrelogProblem::Unbalanced);
        } else if !(&q.w.0 * integral_length(&q.rho)).is_multiple_of(mu1) {
            issue(&q.id, PrelogProblem::FractionalBranching);
        }
    }
    for p in &d.markings {
        let ch = rank_two_chart(&p.m1, &p.m2, &p.rho).expect("validated");
        if !ch.mu2.is_zero() {
            issue(&p.id, PrelogProblem::MarkingNotSmooth);
        }
        if !p.w.is_multiple_of(&ch.ind) {
            issue(&p.id, PrelogProblem::MarkingIndex);
        }
    }
    out
}

/// `w̄_q = (w₁/μ₁)·ℓ(ρ_q)`.
pub fn reduced_branching_order(d: &TransverseMapData, q: &ConstrainedNode) -> BigRational {
    BigRational::new(&q.w.0 * integral_length(&q.rho), d.components[q.branches.0].mu.clone())
}

/// `u_q = (w₁n₂ − w₂n₁)/Ind_q` and its integral length.
pub fn node_contact_order(q: &ConstrainedNode) -> Result<(Vec<BigInt>, BigInt)> {
    let ch = rank_two_chart(&q.m1, &q.m2, &q.rho)?;
    let mut u = Vec::with_capacity(2);
    for i in 0..2 {
        let x = &q.w.0 * &ch.n2[i] - &q.w.1 * &ch.n1[i];
        if !x.is_multiple_of(&ch.ind) {
            return Err(structural!("contact order at node {:?} is not integral", q.id));
        }
        u.push(x / &ch.ind);
    }
    let len = integral_length(&u);
    Ok((u, len))
}

/// The least common multiple of the touched multiplicities and of
/// `μ₁w₂/gcd(Ind_q, μ₁w₂)` over constrained nodes.
pub fn base_order(d: &TransverseMapData) -> Result<BigInt> {
    let mut b = BigInt::one();
    for c in &d.components {
        b = b.lcm(&c.mu);
    }
    for q in &d.nodes {
        let (ind, _) = index_and_length(q)?;
        let x = &d.components[q.branches.0].mu * &q.w.1;
        b = b.lcm(&(&x / x.gcd(&ind)));
    }
    Ok(b)
}

/// `e_q = b·Ind_q/(μ₁w₂)` for every constrained node.
pub fn edge_lengths(d: &TransverseMapData, b: &BigInt) -> Result<Vec<BigInt>> {
    d.nodes
        .iter()
        .map(|q| {
            let (ind, _) = index_and_length(q)?;
            let den = &d.components[q.branches.0].mu * &q.w.1;
            let num = b * ind;
            if !num.is_multiple_of(&den) {
                return Err(structural!("edge length at node {:?} is not integral for b = {b}", q.id));
            }
            Ok(num / den)
        })
        .collect()
}

fn node_lengths(d: &TransverseMapData) -> Vec<BigInt> {
    d.nodes.iter().map(|q| integral_length(&q.rho)).collect()
}

/// `|G|` for `G = ker(∏_η ℤ/μ_η → ∏_q ℤ/ℓ(ρ_q))`. The cyclic groups are the
/// roots of unity, so the map at `q` sends `(k_η)` to `k_{η(q)} − k_{η'(q)}`
/// reduced mod `ℓ(ρ_q)`. The order is `|domain|·[ℤ^q : im]/∏ℓ(ρ_q)` with the
/// index from a Smith normal form.
pub fn group_order(d: &TransverseMapData) -> BigInt {
    let dom: BigInt = d.components.iter().map(|c| c.mu.clone()).product();
    let ell = node_lengths(d);
    let nq = d.nodes.len();
    if nq == 0 {
        return dom;
    }
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for (ci, _) in d.components.iter().enumerate() {
        let mut col = vec![BigInt::zero(); nq];
        for (k, q) in d.nodes.iter().enumerate() {
            if q.branches.0 == ci {
                col[k] += 1;
            }
            if q.branches.1 == ci {
                col[k] -= 1;
            }
        }
        gens.push(col);
    }
    for (k, l) in ell.iter().enumerate() {
        let mut col = vec![BigInt::zero(); nq];
        col[k] = l.clone();
        gens.push(col);
    }
    let index = match sublattice_index(&gens, nq) {
        LatticeIndex::Finite(i) => i,
        LatticeIndex::Infinite => unreachable!("ℓ(ρ_q) > 0 spans a full-rank sublattice"),
    };
    let codomain: BigInt = ell.iter().product();
    let image = &codomain / &index;
    debug_assert!(dom.is_multiple_of(&image));
    dom / image
}

/// `|G|` by listing the whole domain, when it has at most `limit` elements.
pub fn group_order_brute(d: &TransverseMapData, limit: u64) -> Option<BigInt> {
    let mus: Vec<u64> = d.components.iter().map(|c| c.mu.to_u64()).collect::<Option<_>>()?;
    let size = mus.iter().try_fold(1u64, |a, &m| a.checked_mul(m))?;
    if size > limit {
        return None;
    }
    let ell: Vec<u64> = node_lengths(d).iter().map(|l| l.to_u64().unwrap()).collect();
    let mut count = 0u64;
    let mut k = vec![0u64; mus.len()];
    for mut x in 0..size {
        for (ki, &m) in k.iter_mut().zip(&mus) {
            *ki = x % m;
            x /= m;
        }
        let ok = d.nodes.iter().zip(&ell).all(|(q, &l)| {
            let (a, b) = q.branches;
            (k[a] % l + l - k[b] % l).is_multiple_of(l)
        });
        count += ok as u64;
    }
    Some(BigInt::from(count))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Torsor {
    Yes,
    No,
    Unknown,
}

/// Whether the torsor of compatible roots has a section: yes when the fibre
/// is reduced along the image or the domain is a tree of rational curves,
/// otherwise whatever the data asserts.
pub fn torsor_nonempty(d: &TransverseMapData) -> (Torsor, String) {
    if d.components.iter().all(|c| c.mu.is_one()) {
        return (Torsor::Yes, "all touched components are reduced".into());
    }
    let edges = d.nodes.len() + d.free_nodes.len();
    if d.components.iter().all(|c| c.genus == 0) && edges + 1 == d.components.len() {
        return (Torsor::Yes, "domain is a tree of rational curves".into());
    }
    match d.torsor {
        TorsorFlag::Yes => (Torsor::Yes, "asserted by the input".into()),
        TorsorFlag::No => (Torsor::No, "asserted by the input".into()),
        TorsorFlag::Auto => (Torsor::Unknown, "neither reduced nor a rational tree; existence of roots is not decidable from the data".into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeReport {
    pub id: String,
    pub index: BigInt,
    pub length: BigRational,
    pub contact_order: Vec<BigInt>,
    pub contact_length: BigInt,
    pub reduced_branching: BigInt,
    pub edge_length: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Count(BigInt),
    /// No enhancement exists.
    Empty(String),
    /// The data do not decide whether an enhancement exists.
    Refused(String),
    /// The map is not pre-logarithmic.
    NotPrelog,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancementReport {
    pub issues: Vec<PrelogIssue>,
    pub nodes: Vec<NodeReport>,
    pub base_order: Option<BigInt>,
    pub group_order: BigInt,
    pub torsor: Torsor,
    pub torsor_reason: String,
    pub outcome: Outcome,
}

/// The number of pairwise non-isomorphic basic enhancements,
/// `|G|/b · ∏ w̄_q`, together with every intermediate quantity.
pub fn enhancement_count(d: &TransverseMapData) -> Result<EnhancementReport> {
    d.validate()?;
    let issues = check_prelog(d);
    let group_order = group_order(d);
    let (torsor, torsor_reason) = torsor_nonempty(d);
    if !issues.is_empty() {
        return Ok(EnhancementReport {
            issues,
            nodes: vec![],
            base_order: None,
            group_order,
            torsor,
            torsor_reason,
            outcome: Outcome::NotPrelog,
        });
    }
    let b = base_order(d)?;
    let lengths = edge_lengths(d, &b)?;
    let mut nodes = Vec::new();
    let mut product = BigInt::one();
    for (q, e) in d.nodes.iter().zip(lengths) {
        let (index, length) = index_and_length(q)?;
        let (u, ul) = node_contact_order(q)?;
        let wbar = reduced_branching_order(d, q);
        debug_assert!(wbar.is_integer() && wbar.to_integer() == ul);
        product *= wbar.to_integer();
        nodes.push(NodeReport {
            id: q.id.clone(),
            index,
            length,
            contact_order: u,
            contact_length: ul,
            reduced_branching: wbar.to_integer(),
            edge_length: e,
        });
    }
    let outcome = match torsor {
        Torsor::Yes => {
            let num = &group_order * product;
            if !num.is_multiple_of(&b) {
                return Err(structural!("enhancement count {num}/{b} is not an integer"));
            }
            Outcome::Count(num / &b)
        }
        Torsor::No => Outcome::Empty("the torsor of compatible roots has no section".into()),
        Torsor::Unknown => Outcome::Refused(torsor_reason.clone()),
    };
    Ok(EnhancementReport { issues, nodes, base_order: Some(b), group_order, torsor, torsor_reason, outcome })
}

/// The tropical side of a transverse map: the local cone complex of the
/// strata it meets, the base map, and its combinatorial type.
#[derive(Clone, Debug)]
pub struct TransverseType {
    pub complex: ConeComplex,
    pub rho: BaseMap,
    pub t: CombType,
}

/// Cells are `O`, a ray `D:<target>` per component of `X₀`, a cone
/// `S:<node>` per constrained node and `P:<marking>` plus its horizontal ray
/// `H:<marking>` per constrained marking, all in the dual charts of the
/// given monoids. Expects pre-logarithmic data.
pub fn transverse_type(d: &TransverseMapData) -> Result<TransverseType> {
    d.validate()?;
    if let Some(i) = check_prelog(d).first() {
        return Err(structural!("not pre-logarithmic at {:?}: {}", i.site, i.problem.kind()));
    }
    let ray = |id: String| (id, 1usize, vec![vec![BigInt::one()]]);
    let col = |v: &[BigInt]| IntMatrix::from_cols(2, &[v.to_vec()]);
    let mut cells = vec![("O".to_string(), 0usize, Vec::new())];
    let mut maps: Vec<(String, String, IntMatrix)> = Vec::new();
    let mut covectors: BTreeMap<String, Vec<BigInt>> = BTreeMap::new();
    covectors.insert("O".into(), vec![]);
    let mut targets: Vec<&str> = d.components.iter().map(|c| c.target.as_str()).collect();
    targets.sort();
    targets.dedup();
    for tg in &targets {
        let id = format!("D:{tg}");
        let mu = &d.components.iter().find(|c| c.target == *tg).unwrap().mu;
        cells.push(ray(id.clone()));
        maps.push(("O".into(), id.clone(), IntMatrix::zeros(1, 0)));
        covectors.insert(id, vec![mu.clone()]);
    }
    for p in &d.markings {
        let h = format!("H:{}", p.id);
        cells.push(ray(h.clone()));
        maps.push(("O".into(), h.clone(), IntMatrix::zeros(1, 0)));
        covectors.insert(h, vec![BigInt::zero()]);
    }
    let mut two_cell = |id: String, n1: &[BigInt], n2: &[BigInt], r1: String, r2: String, rho: &[BigInt]| {
        cells.push((id.clone(), 2, vec![n1.to_vec(), n2.to_vec()]));
        maps.push(("O".into(), id.clone(), IntMatrix::zeros(2, 0)));
        maps.push((r1, id.clone(), col(n1)));
        maps.push((r2, id.clone(), col(n2)));
        covectors.insert(id, rho.to_vec());
    };
    for q in &d.nodes {
        let ch = rank_two_chart(&q.m1, &q.m2, &q.rho)?;
        let (a, b) = q.branches;
        let r1 = format!("D:{}", d.components[a].target);
        let r2 = format!("D:{}", d.components[b].target);
        two_cell(format!("S:{}", q.id), &ch.n1, &ch.n2, r1, r2, &q.rho);
    }
    for p in &d.markings {
        let ch = rank_two_chart(&p.m1, &p.m2, &p.rho)?;
        let h = format!("H:{}", p.id);
        let r1 = format!("D:{}", d.components[p.component].target);
        two_cell(format!("P:{}", p.id), &ch.n1, &ch.n2, r1, h, &p.rho);
    }
    let complex = ConeComplex::new(&cells, &maps)?;
    let rho = BaseMap::new(&complex, &covectors)?;
    let idx = |id: String| complex.index(&id).expect("cell was just added");
    let vertices = d
        .components
        .iter()
        .map(|c| Vertex { id: c.id.clone(), cell: idx(format!("D:{}", c.target)), genus: c.genus, class: None })
        .collect();
    let mut edges = Vec::new();
    for q in &d.nodes {
        let (u, _) = node_contact_order(q)?;
        edges.push(Edge { id: q.id.clone(), from: q.branches.0, to: q.branches.1, cell: idx(format!("S:{}", q.id)), u });
    }
    for f in &d.free_nodes {
        let cell = idx(format!("D:{}", d.components[f.branches.0].target));
        edges.push(Edge { id: f.id.clone(), from: f.branches.0, to: f.branches.1, cell, u: vec![BigInt::zero()] });
    }
    let mut legs = Vec::new();
    for p in &d.markings {
        let ch = rank_two_chart(&p.m1, &p.m2, &p.rho)?;
        let k = &p.w / &ch.ind;
        let u = ch.n2.iter().map(|x| x * &k).collect();
        legs.push(Leg { id: p.id.clone(), vertex: p.component, cell: idx(format!("P:{}", p.id)), u });
    }
    let t = CombType::new(&complex, vertices, edges, legs)?;
    Ok(TransverseType { complex, rho, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;
    use crate::monoid::{base_pullback, basic_monoid, free_coordinates};
    use proptest::prelude::*;

    fn comp(id: &str, target: &str, mu: i64) -> Component {
        Component { id: id.into(), target: target.into(), mu: mu.into(), genus: 0 }
    }

    fn node(id: &str, a: usize, b: usize, m1: &[i64], m2: &[i64], rho: &[i64], w: (i64, i64)) -> ConstrainedNode {
        ConstrainedNode { id: id.into(), branches: (a, b), m1: ivec(m1), m2: ivec(m2), rho: ivec(rho), w: (w.0.into(), w.1.into()) }
    }

    fn data(components: Vec<Component>, nodes: Vec<ConstrainedNode>) -> TransverseMapData {
        TransverseMapData { components, nodes, free_nodes: vec![], markings: vec![], torsor: TorsorFlag::Auto }
    }

    // three lines meeting the multiplicity-3 exceptional plane, each node
    // with P_q = ℕ² and ρ = (1, 3)
    fn cubic_exceptional() -> TransverseMapData {
        let mut cs: Vec<Component> = (1..=3).map(|i| comp(&format!("C{i}"), &format!("H{i}"), 1)).collect();
        cs.push(comp("C4", "E", 3));
        let ns = (0..3).map(|i| node(&format!("q{}", i + 1), i, 3, &[1, 0], &[0, 1], &[3, 1], (1, 3))).collect();
        data(cs, ns)
    }

    fn rational_length(v: &[BigRational]) -> BigRational {
        let l = crate::lattice::linalg::denominator_lcm(v);
        let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
        BigRational::new(integral_length(&ints), l)
    }

    // the integral length of ρ⁻¹(1) inside P^∨, from its two endpoints
    fn slice_length(m1: &[i64], m2: &[i64], rho: &[i64]) -> BigRational {
        let ch = rank_two_chart(&ivec(m1), &ivec(m2), &ivec(rho)).unwrap();
        let a: Vec<BigRational> = ch.n1.iter().map(|x| BigRational::new(x.clone(), ch.mu1.clone())).collect();
        let b: Vec<BigRational> = ch.n2.iter().map(|x| BigRational::new(x.clone(), ch.mu2.clone())).collect();
        let diff: Vec<BigRational> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        rational_length(&diff)
    }

    #[test]
    fn index_and_length_examples() {
        let q = node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (1, 1));
        assert_eq!(index_and_length(&q).unwrap(), (BigInt::one(), BigRational::one()));
        let q = node("q", 0, 1, &[1, 0], &[1, 3], &[1, 1], (1, 1));
        let ch = rank_two_chart(&q.m1, &q.m2, &q.rho).unwrap();
        assert_eq!((ch.mu1.clone(), ch.mu2.clone()), (BigInt::from(1), BigInt::from(2)));
        let (ind, lambda) = index_and_length(&q).unwrap();
        assert_eq!(ind, BigInt::from(3));
        assert_eq!(lambda, BigRational::new(3.into(), 2.into()));
        assert_eq!(lambda, slice_length(&[1, 0], &[1, 3], &[1, 1]));
        // the slice ρ⁻¹(1) shrinks when ρ is scaled
        let q = node("q", 0, 1, &[1, 0], &[1, 3], &[2, 2], (1, 1));
        assert_eq!(index_and_length(&q).unwrap().1, BigRational::new(3.into(), 4.into()));
        assert!(index_and_length(&node("q", 0, 1, &[1, 0], &[0, 1], &[0, 0], (1, 1))).is_err());
    }

    #[test]
    fn cubic_exceptional_count() {
        let d = cubic_exceptional();
        d.validate().unwrap();
        assert!(check_prelog(&d).is_empty());
        assert_eq!(base_order(&d).unwrap(), BigInt::from(3));
        assert_eq!(group_order(&d), BigInt::from(3));
        assert_eq!(group_order_brute(&d, 10_000), Some(BigInt::from(3)));
        let r = enhancement_count(&d).unwrap();
        assert_eq!(r.torsor, Torsor::Yes);
        assert_eq!(r.outcome, Outcome::Count(BigInt::one()));
        for n in &r.nodes {
            assert_eq!((n.index.clone(), n.reduced_branching.clone(), n.edge_length.clone()), (1.into(), 1.into(), 1.into()));
            assert_eq!(n.contact_length, BigInt::one());
        }
    }

    #[test]
    fn prelog_verdicts() {
        let reduced = |w: i64| data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (w, w))]);
        assert!(check_prelog(&reduced(4)).is_empty());
        assert_eq!(reduced_branching_order(&reduced(4), &reduced(4).nodes[0]), BigRational::from_integer(4.into()));
        let (u, l) = node_contact_order(&reduced(2).nodes[0]).unwrap();
        assert_eq!((u, l), (ivec(&[2, -2]), BigInt::from(2)));

        let bad = data(vec![comp("a", "X", 1), comp("b", "Y", 2)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[2, 1], (1, 1))]);
        assert_eq!(check_prelog(&bad)[0].problem, PrelogProblem::Unbalanced);
        assert_eq!(enhancement_count(&bad).unwrap().outcome, Outcome::NotPrelog);

        let same = data(vec![comp("a", "X", 1), comp("b", "X", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (1, 1))]);
        assert_eq!(check_prelog(&same)[0].problem, PrelogProblem::SameComponent);

        // P = cone((1,0), (1,2)), ρ = (3, 2): μ = (2, 4), ℓ(ρ) = 1 and w̄ = 1/2
        let frac = data(vec![comp("a", "X", 2), comp("b", "Y", 4)], vec![node("q", 0, 1, &[1, 0], &[1, 2], &[3, 2], (1, 2))]);
        frac.validate().unwrap();
        assert_eq!(check_prelog(&frac)[0].problem, PrelogProblem::FractionalBranching);

        let mut m = reduced(3);
        m.markings.push(ConstrainedMarking { id: "p".into(), component: 0, m1: ivec(&[1, 0]), m2: ivec(&[1, 2]), rho: ivec(&[1, 2]), w: 3.into() });
        // ⟨n1, ρ⟩ = ⟨(2,−1), (1,2)⟩ = 0 ≠ 1
        assert!(m.validate().is_err());
        m.markings[0].rho = ivec(&[0, 0]);
        assert!(m.validate().is_err());
        m.markings[0].m1 = ivec(&[0, 1]);
        m.markings[0].m2 = ivec(&[2, 1]);
        m.markings[0].rho = ivec(&[2, 1]);
        // n1 = (1, 0), n2 = (−1, 2), Ind = 2: μ1 = 2 disagrees with the component
        assert!(m.validate().is_err());
        m.markings[0].rho = ivec(&[1, 0]);
        m.markings[0].m2 = ivec(&[1, 0]);
        // P = ℕ², ρ on the ray of m2, Ind = 1
        m.validate().unwrap();
        assert!(check_prelog(&m).is_empty());
        m.markings[0].rho = ivec(&[1, 1]);
        assert_eq!(check_prelog(&m)[0].problem, PrelogProblem::MarkingNotSmooth);
    }

    #[test]
    fn base_orders_and_lengths() {
        let reduced5 = data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (5, 5))]);
        assert_eq!(base_order(&reduced5).unwrap(), BigInt::from(5));
        let mut loose = data(vec![comp("a", "X", 2), comp("b", "X", 4)], vec![]);
        assert!(loose.validate().is_err());
        loose.components[1].target = "Y".into();
        loose.free_nodes.push(FreeNode { id: "f".into(), branches: (0, 0) });
        loose.components.truncate(1);
        assert_eq!(base_order(&loose).unwrap(), BigInt::from(2));
        let two = data(vec![comp("a", "X", 2), comp("b", "Y", 4)], vec![]);
        assert_eq!(base_order(&two).unwrap(), BigInt::from(4));

        let reduced2 = data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (2, 2))]);
        assert_eq!(edge_lengths(&reduced2, &BigInt::from(2)).unwrap(), vec![BigInt::one()]);
        assert_eq!(edge_lengths(&cubic_exceptional(), &BigInt::from(3)).unwrap(), vec![BigInt::one(); 3]);
    }

    #[test]
    fn counts() {
        let single = data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (3, 3))]);
        assert_eq!(enhancement_count(&single).unwrap().outcome, Outcome::Count(BigInt::one()));
        let q = |id: &str| node(id, 0, 1, &[1, 0], &[0, 1], &[1, 1], (2, 2));
        let parallel = data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![q("q1"), q("q2")]);
        let r = enhancement_count(&parallel).unwrap();
        assert_eq!((r.group_order.clone(), r.base_order.clone()), (BigInt::one(), Some(BigInt::from(2))));
        assert_eq!(r.outcome, Outcome::Count(BigInt::from(2)));
    }

    #[test]
    fn group_of_a_cycle() {
        // μ = (2, 2), two nodes with ℓ(ρ) = 2
        let q = |id: &str| node(id, 0, 1, &[1, 0], &[0, 1], &[2, 2], (1, 1));
        let d = data(vec![comp("a", "X", 2), comp("b", "Y", 2)], vec![q("q1"), q("q2")]);
        assert_eq!(group_order(&d), BigInt::from(2));
        assert_eq!(group_order_brute(&d, 10_000), Some(BigInt::from(2)));
        let all_reduced = data(vec![comp("a", "X", 1), comp("b", "Y", 1)], vec![node("q", 0, 1, &[1, 0], &[0, 1], &[1, 1], (1, 1))]);
        assert_eq!(group_order(&all_reduced), BigInt::one());
    }

    #[test]
    fn torsor_flags() {
        assert_eq!(torsor_nonempty(&cubic_exceptional()).0, Torsor::Yes);
        // a multiple fibre of multiplicity 2 and an elliptic domain
        let mut e = data(vec![Component { genus: 1, ..comp("C", "X", 2) }], vec![]);
        assert_eq!(torsor_nonempty(&e).0, Torsor::Unknown);
        assert!(matches!(enhancement_count(&e).unwrap().outcome, Outcome::Refused(_)));
        e.torsor = TorsorFlag::No;
        assert!(matches!(enhancement_count(&e).unwrap().outcome, Outcome::Empty(_)));
        e.torsor = TorsorFlag::Yes;
        assert_eq!(enhancement_count(&e).unwrap().outcome, Outcome::Count(BigInt::one()));
        let mut reduced = e.clone();
        reduced.components[0].mu = BigInt::one();
        reduced.torsor = TorsorFlag::No;
        assert_eq!(torsor_nonempty(&reduced).0, Torsor::Yes);
    }

    #[test]
    fn transverse_basic_monoid() {
        let mut d = cubic_exceptional();
        d.free_nodes.push(FreeNode { id: "f".into(), branches: (3, 3) });
        let tt = transverse_type(&d).unwrap();
        let b = basic_monoid(&tt.complex, &tt.t).unwrap();
        assert!(b.q.is_free() && b.q.rank() == 2);
        let r = base_pullback(&tt.rho, &tt.t, &b).unwrap();
        let mut r = free_coordinates(&b.q, &r).unwrap();
        r.sort();
        assert_eq!(r, ivec(&[0, 3]));
    }

    // A node chart in the normal form m1 = (1, 0), m2 = (r, s) moved by a
    // unimodular matrix, with ρ = (a, c) in the normal form.
    fn node_strategy() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
        (1i64..6, 1i64..6, 1i64..5, 1i64..5, -2i64..=2, any::<bool>()).prop_filter_map("chart", |(r, s, a, c, k, flip)| {
            if num_integer::gcd(r, s) != 1 || a * s - c * r <= 0 {
                return None;
            }
            let g = |v: [i64; 2]| -> Vec<i64> {
                let w = [v[0] + k * v[1], v[1]];
                if flip { vec![w[1], w[0]] } else { w.to_vec() }
            };
            Some((g([1, 0]), g([r, s]), g([a, c])))
        })
    }

    proptest! {
        #[test]
        fn chart_identities((m1, m2, rho) in node_strategy()) {
            let ch = rank_two_chart(&ivec(&m1), &ivec(&m2), &ivec(&rho)).unwrap();
            for i in 0..2 {
                prop_assert_eq!(&ch.ind * BigInt::from(rho[i]), &ch.mu2 * BigInt::from(m1[i]) + &ch.mu1 * BigInt::from(m2[i]));
            }
            let q = node("q", 0, 1, &m1, &m2, &rho, (1, 1));
            let (_, lambda) = index_and_length(&q).unwrap();
            prop_assert_eq!(lambda, slice_length(&m1, &m2, &rho));
            let scaled: Vec<i64> = rho.iter().map(|x| 3 * x).collect();
            let (_, l3) = index_and_length(&node("q", 0, 1, &m1, &m2, &scaled, (1, 1))).unwrap();
            prop_assert_eq!(l3.clone(), slice_length(&m1, &m2, &scaled));
            prop_assert_eq!(l3 * BigRational::from_integer(3.into()), slice_length(&m1, &m2, &rho));
        }

        #[test]
        fn contact_orders((m1, m2, rho) in node_strategy(), k in 1i64..4) {
            let ch = rank_two_chart(&ivec(&m1), &ivec(&m2), &ivec(&rho)).unwrap();
            let g = ch.mu1.gcd(&ch.mu2);
            let ell = integral_length(&ivec(&rho));
            // smallest balanced weights with integral w̄, times k
            let base = &g / g.gcd(&ell);
            let w1 = &ch.mu1 / &g * &base * k;
            let w2 = &ch.mu2 / &g * &base * k;
            let d = data(
                vec![Component { mu: ch.mu1.clone(), ..comp("a", "X", 1) }, Component { mu: ch.mu2.clone(), ..comp("b", "Y", 1) }],
                vec![ConstrainedNode { id: "q".into(), branches: (0, 1), m1: ivec(&m1), m2: ivec(&m2), rho: ivec(&rho), w: (w1.clone(), w2.clone()) }],
            );
            d.validate().unwrap();
            prop_assert!(check_prelog(&d).is_empty());
            let (u, len) = node_contact_order(&d.nodes[0]).unwrap();
            prop_assert_eq!(dot(&u, &ivec(&m1)), w1);
            prop_assert_eq!(dot(&u, &ivec(&m2)), -w2);
            prop_assert!(dot(&u, &ivec(&rho)).is_zero());
            prop_assert_eq!(BigRational::from_integer(len), reduced_branching_order(&d, &d.nodes[0]));
            let r = enhancement_count(&d).unwrap();
            prop_assert!(matches!(r.outcome, Outcome::Count(_)));
            prop_assert_eq!(Some(group_order(&d)), group_order_brute(&d, 10_000));
        }
    }
}

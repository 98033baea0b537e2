//! Genus-weighted graphs, combinatorial types of tropical curves in a cone
//! complex, contractions and isomorphisms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::{ConeComplex, DegreeData};
use crate::error::{argument, structural};
use crate::Result;

/// A connected graph with ordered legs; loops and parallel edges allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    /// Ordered endpoint pairs; the order fixes the edge orientation.
    pub edges: Vec<(usize, usize)>,
    /// Vertex carrying each leg, in leg order.
    pub legs: Vec<usize>,
}

impl Graph {
    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return false;
        }
        let mut uf = UnionFind::new(self.vertices);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        (0..self.vertices).all(|v| uf.find(v) == uf.find(0))
    }

    /// First Betti number `#E − #V + 1` of a connected graph.
    pub fn betti(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(structural!("graph is not connected"));
        }
        Ok(self.edges.len() + 1 - self.vertices)
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as the representative
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub cell: usize,
    pub genus: u32,
    /// Curve class in the degree group of the cell's closed stratum.
    pub class: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub cell: usize,
    /// Contact order for the orientation `from → to`, in the cell's lattice.
    pub u: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub id: String,
    pub vertex: usize,
    pub cell: usize,
    pub u: Vec<BigInt>,
}

/// A combinatorial type `(G, g, σ, u)`, optionally decorated with classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombType {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub legs: Vec<Leg>,
}

impl CombType {
    /// Checks connectivity, face incidences and the shape of contact orders.
    pub fn new(c: &ConeComplex, vertices: Vec<Vertex>, edges: Vec<Edge>, legs: Vec<Leg>) -> Result<CombType> {
        let t = CombType { vertices, edges, legs };
        t.validate(c)?;
        Ok(t)
    }

    pub fn validate(&self, c: &ConeComplex) -> Result<()> {
        let n = c.cells().len();
        let nv = self.vertices.len();
        for v in &self.vertices {
            if v.cell >= n {
                return Err(structural!("vertex {:?} has an unknown cell", v.id));
            }
        }
        for e in &self.edges {
            if e.from >= nv || e.to >= nv || e.cell >= n {
                return Err(structural!("edge {:?} refers to a missing vertex or cell", e.id));
            }
            if e.u.len() != c.cell(e.cell).rank() {
                return Err(structural!("edge {:?}: contact order has length {}, cell {:?} has rank {}", e.id, e.u.len(), c.id(e.cell), c.cell(e.cell).rank()));
            }
            for end in [e.from, e.to] {
                let vc = self.vertices[end].cell;
                if !c.is_face(vc, e.cell) {
                    return Err(structural!(
                        "edge {:?}: cell {:?} of vertex {:?} is not a face of {:?}",
                        e.id,
                        c.id(vc),
                        self.vertices[end].id,
                        c.id(e.cell)
                    ));
                }
            }
        }
        for l in &self.legs {
            if l.vertex >= nv || l.cell >= n {
                return Err(structural!("leg {:?} refers to a missing vertex or cell", l.id));
            }
            if l.u.len() != c.cell(l.cell).rank() {
                return Err(structural!("leg {:?}: contact order has the wrong length", l.id));
            }
            let vc = self.vertices[l.vertex].cell;
            if !c.is_face(vc, l.cell) {
                return Err(structural!("leg {:?}: vertex cell {:?} is not a face of {:?}", l.id, c.id(vc), c.id(l.cell)));
            }
            if !c.cell(l.cell).cone.contains(&l.u) {
                return Err(structural!("leg {:?}: contact order is not in the cone {:?}", l.id, c.id(l.cell)));
            }
        }
        if !self.graph().is_connected() {
            return Err(structural!("graph is not connected"));
        }
        Ok(())
    }

    pub fn graph(&self) -> Graph {
        Graph {
            vertices: self.vertices.len(),
            edges: self.edges.iter().map(|e| (e.from, e.to)).collect(),
            legs: self.legs.iter().map(|l| l.vertex).collect(),
        }
    }

    pub fn is_decorated(&self) -> bool {
        self.vertices.iter().any(|v| v.class.is_some())
    }

    pub fn edges_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == v || e.to == v).map(|(i, _)| i)
    }

    pub fn legs_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.legs.iter().enumerate().filter(move |(_, l)| l.vertex == v).map(|(i, _)| i)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }
}

/// `b₁(Γ) + Σ g(v)`.
pub fn genus(t: &CombType) -> Result<u64> {
    let b = t.graph().betti()? as u64;
    Ok(b + t.vertices.iter().map(|v| v.genus as u64).sum::<u64>())
}

/// `Σ_v A(v)` pushed to the total degree group.
pub fn total_class(t: &CombType, deg: &DegreeData) -> Result<Vec<BigInt>> {
    let mut total = vec![BigInt::zero(); deg.total_rank()];
    for v in &t.vertices {
        let Some(a) = &v.class else {
            return Err(argument!("vertex {:?} carries no class", v.id));
        };
        if a.len() != deg.rank(v.cell) {
            return Err(structural!(
                "class of vertex {:?} has length {}, its degree group has rank {}",
                v.id,
                a.len(),
                deg.rank(v.cell)
            ));
        }
        for (t, x) in total.iter_mut().zip(deg.to_total(v.cell).mul_vec(a)) {
            *t += x;
        }
    }
    Ok(total)
}

/// Contracts the edges in `subset`. Each merged vertex goes to `targets[v]`
/// when supplied (keyed by any original vertex of the fibre), otherwise to the
/// largest common face of the cells of the fibre, which must be unique.
pub fn contract(
    c: &ConeComplex,
    t: &CombType,
    subset: &[usize],
    targets: &BTreeMap<usize, usize>,
    deg: Option<&DegreeData>,
) -> Result<CombType> {
    let nv = t.vertices.len();
    if let Some(&e) = subset.iter().find(|&&e| e >= t.edges.len()) {
        return Err(argument!("edge index {e} out of range"));
    }
    let mut uf = UnionFind::new(nv);
    for &e in subset {
        uf.union(t.edges[e].from, t.edges[e].to);
    }
    let mut reps: Vec<usize> = (0..nv).filter(|&v| uf.find(v) == v).collect();
    reps.sort();
    let new_index: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut vertices = Vec::new();
    for &r in &reps {
        let fibre: Vec<usize> = (0..nv).filter(|&v| uf.find(v) == r).collect();
        let inner: Vec<usize> =
            subset.iter().copied().filter(|&e| uf.find(t.edges[e].from) == r).collect();
        let mut inner_dedup = inner.clone();
        inner_dedup.sort();
        inner_dedup.dedup();
        let genus = (inner_dedup.len() + 1 - fibre.len()) as u32
            + fibre.iter().map(|&v| t.vertices[v].genus).sum::<u32>();
        let cells: Vec<usize> = fibre.iter().map(|&v| t.vertices[v].cell).collect();
        let supplied: Vec<usize> = fibre.iter().filter_map(|v| targets.get(v).copied()).collect();
        let cell = if let Some(&cell) = supplied.first() {
            if supplied.iter().any(|&x| x != cell) {
                return Err(argument!("conflicting target cells for the fibre of {:?}", t.vertices[r].id));
            }
            if !cells.iter().all(|&s| c.is_face(cell, s)) {
                return Err(argument!("contraction infeasible: {:?} is not a common face of the fibre of {:?}", c.id(cell), t.vertices[r].id));
            }
            cell
        } else {
            let common = c.common_faces(&cells);
            let maximal: Vec<usize> =
                common.iter().copied().filter(|&f| common.iter().all(|&g| c.is_face(g, f))).collect();
            match maximal.as_slice() {
                [f] => *f,
                [] if common.is_empty() => {
                    return Err(argument!("contraction infeasible: the fibre of {:?} has no common face", t.vertices[r].id))
                }
                _ => {
                    return Err(argument!("contraction infeasible: no unique largest common face for the fibre of {:?}", t.vertices[r].id))
                }
            }
        };
        let class = if t.vertices[fibre[0]].class.is_some() || fibre.iter().any(|&v| t.vertices[v].class.is_some()) {
            let deg = deg.ok_or_else(|| argument!("contracting decorated vertices needs degree data"))?;
            let mut sum = vec![BigInt::zero(); deg.rank(cell)];
            for &v in &fibre {
                let a = t.vertices[v]
                    .class
                    .as_ref()
                    .ok_or_else(|| argument!("vertex {:?} has no class", t.vertices[v].id))?;
                let p = deg.push(cell, t.vertices[v].cell).ok_or_else(|| {
                    argument!("no degree pushforward from {:?} to {:?}", c.id(t.vertices[v].cell), c.id(cell))
                })?;
                for (s, x) in sum.iter_mut().zip(p.mul_vec(a)) {
                    *s += x;
                }
            }
            Some(sum)
        } else {
            None
        };
        vertices.push(Vertex { id: t.vertices[r].id.clone(), cell, genus, class });
    }
    let mut edges = Vec::new();
    for (i, e) in t.edges.iter().enumerate() {
        if subset.contains(&i) {
            continue;
        }
        edges.push(Edge {
            from: new_index[&uf.find(e.from)],
            to: new_index[&uf.find(e.to)],
            ..e.clone()
        });
    }
    let legs = t.legs.iter().map(|l| Leg { vertex: new_index[&uf.find(l.vertex)], ..l.clone() }).collect();
    CombType::new(c, vertices, edges, legs)
}

/// How legs enter comparisons of types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LegMode {
    /// Legs are compared in order as given.
    #[default]
    AsGiven,
    /// Legs with zero contact order are dropped before comparing.
    DropZeroContact,
}

/// A graph isomorphism: vertex images, and for each edge its image and
/// whether the orientation is reversed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Isomorphism {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, bool)>,
}

impl Isomorphism {
    /// `self` after `other`.
    pub fn compose(&self, other: &Isomorphism) -> Isomorphism {
        Isomorphism {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            edges: other.edges.iter().map(|&(e, f)| (self.edges[e].0, f ^ self.edges[e].1)).collect(),
        }
    }
}

fn drop_zero_legs(t: &CombType) -> CombType {
    CombType {
        vertices: t.vertices.clone(),
        edges: t.edges.clone(),
        legs: t.legs.iter().filter(|l| l.u.iter().any(|x| !x.is_zero())).cloned().collect(),
    }
}

/// All isomorphisms `t1 → t2` respecting genus, cells, classes, contact
/// orders (with the sign rule for reversed edges) and the leg order.
pub fn isomorphisms(t1: &CombType, t2: &CombType, mode: LegMode) -> Vec<Isomorphism> {
    let (a, b);
    let (t1, t2) = if mode == LegMode::DropZeroContact {
        a = drop_zero_legs(t1);
        b = drop_zero_legs(t2);
        (&a, &b)
    } else {
        (t1, t2)
    };
    let n = t1.vertices.len();
    if n != t2.vertices.len() || t1.edges.len() != t2.edges.len() || t1.legs.len() != t2.legs.len() {
        return Vec::new();
    }
    for (l1, l2) in t1.legs.iter().zip(&t2.legs) {
        if l1.cell != l2.cell || l1.u != l2.u {
            return Vec::new();
        }
    }
    let sig = |t: &CombType, v: usize| {
        let legs: Vec<usize> = t.legs_at(v).collect();
        (t.vertices[v].cell, t.vertices[v].genus, t.vertices[v].class.clone(), legs, t.edges_at(v).count())
    };
    let s1: Vec<_> = (0..n).map(|v| sig(t1, v)).collect();
    let s2: Vec<_> = (0..n).map(|v| sig(t2, v)).collect();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    vertex_search(t1, t2, &s1, &s2, 0, &mut map, &mut used, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn vertex_search<S: PartialEq>(
    t1: &CombType,
    t2: &CombType,
    s1: &[S],
    s2: &[S],
    v: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Isomorphism>,
) {
    let n = map.len();
    if v == n {
        edge_matchings(t1, t2, map, out);
        return;
    }
    for w in 0..n {
        if used[w] || s1[v] != s2[w] {
            continue;
        }
        // adjacency counts with already mapped vertices must agree
        let ok = (0..v).chain(core::iter::once(v)).all(|x| {
            let y = if x == v { w } else { map[x] };
            count_between(t1, v, x) == count_between(t2, w, y)
        });
        if !ok {
            continue;
        }
        map[v] = w;
        used[w] = true;
        vertex_search(t1, t2, s1, s2, v + 1, map, used, out);
        used[w] = false;
        map[v] = usize::MAX;
    }
}

fn count_between(t: &CombType, a: usize, b: usize) -> usize {
    t.edges.iter().filter(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a)).count()
}

/// Extends a vertex bijection to all compatible edge bijections.
fn edge_matchings(t1: &CombType, t2: &CombType, map: &[usize], out: &mut Vec<Isomorphism>) {
    let m = t1.edges.len();
    // candidate images of each edge
    let cands: Vec<Vec<(usize, bool)>> = t1
        .edges
        .iter()
        .map(|e| {
            let (a, b) = (map[e.from], map[e.to]);
            let neg: Vec<BigInt> = e.u.iter().map(|x| -x).collect();
            let mut c = Vec::new();
            for (j, f) in t2.edges.iter().enumerate() {
                if f.cell != e.cell {
                    continue;
                }
                if f.from == a && f.to == b && f.u == e.u {
                    c.push((j, false));
                }
                if f.from == b && f.to == a && f.u == neg {
                    c.push((j, true));
                }
            }
            c
        })
        .collect();
    let mut chosen = vec![(usize::MAX, false); m];
    let mut used = vec![false; m];
    fn go(
        i: usize,
        cands: &[Vec<(usize, bool)>],
        chosen: &mut Vec<(usize, bool)>,
        used: &mut Vec<bool>,
        map: &[usize],
        out: &mut Vec<Isomorphism>,
    ) {
        if i == cands.len() {
            out.push(Isomorphism { vertices: map.to_vec(), edges: chosen.clone() });
            return;
        }
        for &(j, f) in &cands[i] {
            if used[j] {
                continue;
            }
            used[j] = true;
            chosen[i] = (j, f);
            go(i + 1, cands, chosen, used, map, out);
            used[j] = false;
        }
    }
    go(0, &cands, &mut chosen, &mut used, map, out);
}

pub fn automorphism_count(t: &CombType, mode: LegMode) -> usize {
    isomorphisms(t, t, mode).len()
}

pub fn are_isomorphic(t1: &CombType, t2: &CombType, mode: LegMode) -> bool {
    !isomorphisms(t1, t2, mode).is_empty()
}

/// Contact order of a leg in the class: a vector in a cell, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LegContact {
    Zero,
    In { cell: usize, u: Vec<BigInt> },
}

/// A class `β`: genus, leg contact orders and, optionally, the total curve class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassBeta {
    pub genus: u64,
    pub legs: Vec<LegContact>,
    pub total: Option<Vec<BigInt>>,
}

impl ClassBeta {
    /// Checks that every nonzero contact order is an integral point of its cone.
    pub fn validate(&self, c: &ConeComplex) -> Result<()> {
        for (i, l) in self.legs.iter().enumerate() {
            if let LegContact::In { cell, u } = l {
                if *cell >= c.cells().len() || !c.cell(*cell).cone.contains(u) || u.len() != c.cell(*cell).rank() {
                    return Err(structural!("leg {i}: contact order is not an integral point of its cell"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::{ivec, IntMatrix};
    use alloc::string::ToString;
    use proptest::prelude::*;

    pub(crate) fn point_complex() -> ConeComplex {
        ConeComplex::new(&[("p".to_string(), 0, vec![])], &[]).unwrap()
    }

    pub(crate) fn v(id: &str, cell: usize, genus: u32) -> Vertex {
        Vertex { id: id.to_string(), cell, genus, class: None }
    }

    pub(crate) fn e(id: &str, from: usize, to: usize, cell: usize, u: &[i64]) -> Edge {
        Edge { id: id.to_string(), from, to, cell, u: ivec(u) }
    }

    /// A line: cells O, R = ℝ≥0 with ray (1); edges in R may carry ±u.
    fn line() -> ConeComplex {
        ConeComplex::new(
            &[("O".to_string(), 0, vec![]), ("R".to_string(), 1, vec![ivec(&[1])])],
            &[("O".to_string(), "R".to_string(), IntMatrix::zeros(1, 0))],
        )
        .unwrap()
    }

    #[test]
    fn genus_examples() {
        let c = point_complex();
        let tree = CombType::new(&c, vec![v("a", 0, 0), v("b", 0, 0)], vec![e("e", 0, 1, 0, &[])], vec![]).unwrap();
        assert_eq!(genus(&tree).unwrap(), 0);
        let loop1 = CombType::new(&c, vec![v("a", 0, 0)], vec![e("e", 0, 0, 0, &[])], vec![]).unwrap();
        assert_eq!(genus(&loop1).unwrap(), 1);
        let cyc = CombType::new(
            &c,
            vec![v("a", 0, 0), v("b", 0, 0), v("c", 0, 1), v("d", 0, 0)],
            vec![e("1", 0, 1, 0, &[]), e("2", 1, 2, 0, &[]), e("3", 2, 3, 0, &[]), e("4", 3, 0, 0, &[])],
            vec![],
        )
        .unwrap();
        assert_eq!(genus(&cyc).unwrap(), 2);
        let disc = CombType { vertices: vec![v("a", 0, 0), v("b", 0, 0)], edges: vec![], legs: vec![] };
        assert!(genus(&disc).is_err());
    }

    #[test]
    fn classes_and_contraction() {
        let c = point_complex();
        let deg = DegreeData::uniform(&c, 2);
        let mut t = CombType::new(&c, vec![v("a", 0, 0), v("b", 0, 0)], vec![e("e", 0, 1, 0, &[])], vec![]).unwrap();
        t.vertices[0].class = Some(ivec(&[1, 0]));
        t.vertices[1].class = Some(ivec(&[2, 1]));
        assert_eq!(total_class(&t, &deg).unwrap(), ivec(&[3, 1]));
        let same = contract(&c, &t, &[], &BTreeMap::new(), Some(&deg)).unwrap();
        assert_eq!(same, t);
        let merged = contract(&c, &t, &[0], &BTreeMap::new(), Some(&deg)).unwrap();
        assert_eq!(merged.vertices.len(), 1);
        assert_eq!(merged.vertices[0].genus, 0);
        assert_eq!(merged.vertices[0].class, Some(ivec(&[3, 1])));
        let zero = CombType {
            vertices: vec![Vertex { class: Some(ivec(&[0, 0])), ..v("a", 0, 0) }],
            edges: vec![],
            legs: vec![],
        };
        assert_eq!(total_class(&zero, &deg).unwrap(), ivec(&[0, 0]));
        let mut bad = t.clone();
        bad.vertices[1].class = Some(ivec(&[1]));
        assert!(total_class(&bad, &deg).is_err());
    }

    #[test]
    fn contract_loop_raises_genus() {
        let c = point_complex();
        let t = CombType::new(&c, vec![v("a", 0, 0), v("b", 0, 1)], vec![e("e", 0, 1, 0, &[]), e("l", 0, 0, 0, &[])], vec![]).unwrap();
        let t2 = contract(&c, &t, &[1], &BTreeMap::new(), None).unwrap();
        assert_eq!(t2.vertices[0].genus, 1);
        assert_eq!(genus(&t2).unwrap(), genus(&t).unwrap());
    }

    #[test]
    fn contraction_needs_common_face() {
        // two rays of the quadrant only share the origin; without it there is no common face
        let c = ConeComplex::new(
            &[
                ("x".to_string(), 1, vec![ivec(&[1])]),
                ("y".to_string(), 1, vec![ivec(&[1])]),
                ("Q".to_string(), 2, vec![ivec(&[1, 0]), ivec(&[0, 1])]),
            ],
            &[
                ("x".to_string(), "Q".to_string(), IntMatrix::from_i64(2, 1, &[1, 0])),
                ("y".to_string(), "Q".to_string(), IntMatrix::from_i64(2, 1, &[0, 1])),
            ],
        )
        .unwrap();
        let t = CombType::new(&c, vec![v("a", 0, 0), v("b", 1, 0)], vec![e("e", 0, 1, 2, &[-1, 1])], vec![]).unwrap();
        assert!(matches!(contract(&c, &t, &[0], &BTreeMap::new(), None), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn loop_automorphisms() {
        let c = line();
        let zero = CombType::new(&c, vec![v("a", 1, 0)], vec![e("l", 0, 0, 1, &[0])], vec![]).unwrap();
        assert_eq!(automorphism_count(&zero, LegMode::AsGiven), 2);
        let nonzero = CombType::new(&c, vec![v("a", 1, 0)], vec![e("l", 0, 0, 1, &[1])], vec![]).unwrap();
        assert_eq!(automorphism_count(&nonzero, LegMode::AsGiven), 1);
    }

    #[test]
    fn parallel_edges() {
        let c = line();
        let t = CombType::new(
            &c,
            vec![v("a", 0, 0), v("b", 1, 0)],
            vec![e("1", 0, 1, 1, &[1]), e("2", 0, 1, 1, &[1])],
            vec![],
        )
        .unwrap();
        assert_eq!(automorphism_count(&t, LegMode::AsGiven), 2);
        let mut t2 = t.clone();
        t2.edges[1].u = ivec(&[2]);
        assert_eq!(automorphism_count(&t2, LegMode::AsGiven), 1);
    }

    #[test]
    fn leg_modes() {
        let c = line();
        let base = CombType::new(&c, vec![v("a", 1, 0)], vec![], vec![]).unwrap();
        let mut with_leg = base.clone();
        with_leg.legs.push(Leg { id: "p".to_string(), vertex: 0, cell: 1, u: ivec(&[0]) });
        assert!(!are_isomorphic(&base, &with_leg, LegMode::AsGiven));
        assert!(are_isomorphic(&base, &with_leg, LegMode::DropZeroContact));
    }

    /// Random small types over the line complex.
    fn arb_type() -> impl Strategy<Value = CombType> {
        (1usize..=4, proptest::collection::vec((0usize..4, 0usize..4, -1i64..=1, 0u32..2), 0..3), proptest::collection::vec(0u32..2, 4))
            .prop_map(|(n, es, gs)| {
                let vertices: Vec<Vertex> = (0..n).map(|i| v(&alloc::format!("v{i}"), 1, gs[i])).collect();
                let mut edges: Vec<Edge> = Vec::new();
                // spanning path keeps the graph connected
                for i in 1..n {
                    edges.push(e(&alloc::format!("p{i}"), i - 1, i, 1, &[1]));
                }
                for (k, (a, b, u, _)) in es.into_iter().enumerate() {
                    edges.push(e(&alloc::format!("x{k}"), a % n, b % n, 1, &[u]));
                }
                CombType { vertices, edges, legs: vec![] }
            })
    }

    /// All automorphisms by trying every vertex permutation and every edge
    /// permutation with every choice of flips.
    fn brute_aut(t: &CombType) -> usize {
        let n = t.vertices.len();
        let m = t.edges.len();
        let mut count = 0;
        for vp in permutations(n) {
            if (0..n).any(|i| t.vertices[i].genus != t.vertices[vp[i]].genus) {
                continue;
            }
            for ep in permutations(m) {
                for flips in 0u32..(1 << m) {
                    let ok = (0..m).all(|i| {
                        let (x, y) = (&t.edges[i], &t.edges[ep[i]]);
                        let flip = flips & (1 << i) != 0;
                        let neg: Vec<BigInt> = x.u.iter().map(|a| -a).collect();
                        if flip {
                            y.from == vp[x.to] && y.to == vp[x.from] && y.u == neg
                        } else {
                            y.from == vp[x.from] && y.to == vp[x.to] && y.u == x.u
                        }
                    });
                    if ok {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn automorphisms_match_brute_force(t in arb_type()) {
            prop_assert_eq!(automorphism_count(&t, LegMode::AsGiven), brute_aut(&t));
        }

        #[test]
        fn automorphisms_form_a_group(t in arb_type()) {
            let auts = isomorphisms(&t, &t, LegMode::AsGiven);
            let id = Isomorphism {
                vertices: (0..t.vertices.len()).collect(),
                edges: (0..t.edges.len()).map(|e| (e, false)).collect(),
            };
            prop_assert!(auts.contains(&id));
            for a in &auts {
                for b in &auts {
                    prop_assert!(auts.contains(&a.compose(b)));
                }
            }
        }

        #[test]
        fn contraction_is_functorial(t in arb_type(), s in proptest::collection::vec(any::<bool>(), 6), r in proptest::collection::vec(any::<bool>(), 6)) {
            let c = line();
            let m = t.edges.len();
            let first: Vec<usize> = (0..m).filter(|&i| s[i]).collect();
            let second_ids: Vec<String> = (0..m).filter(|&i| !s[i] && r[i]).map(|i| t.edges[i].id.clone()).collect();
            let both: Vec<usize> = (0..m).filter(|&i| s[i] || r[i]).collect();
            let none = BTreeMap::new();
            let a = contract(&c, &t, &first, &none, None).unwrap();
            let second: Vec<usize> = second_ids.iter().map(|id| a.edge_index(id).unwrap()).collect();
            let ab = contract(&c, &a, &second, &none, None).unwrap();
            let direct = contract(&c, &t, &both, &none, None).unwrap();
            prop_assert_eq!(&ab, &direct);
            prop_assert_eq!(genus(&direct).unwrap(), genus(&t).unwrap());
        }
    }
}

//! Basic monoids of combinatorial types, the canonical map to the base of a
//! log map, and tropicalization of log maps over a log point.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::complex::{BaseMap, ConeComplex, DegreeData};
use crate::curve::{contract, CombType, Edge, Leg, UnionFind};
use crate::error::{argument, structural};
use crate::lattice::linalg::{rdot, solve_unique, to_rat, RVec};
use crate::lattice::{dot, dual_cone, integer_kernel, Cone, IntMatrix, MonoidHom, ToricMonoid};
use crate::tropmap::lp::{feasible_point, Ineq};
use crate::tropmap::{validate_map, TropicalMap};
use crate::Result;

/// `Q∨` for a type: tuples `((V_η), (e_q))` with `V_η ∈ σ(v_η)`, `e_q ≥ 0`
/// and `V_{η₂} − V_{η₁} = e_q u_q` inside `σ(E_q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicDual {
    /// Start of each vertex block in the variables; edge lengths follow.
    pub offsets: Vec<usize>,
    pub vars: usize,
    /// Columns form a basis of the lattice spanned by `Q∨`, in the variables.
    pub basis: IntMatrix,
    /// `Q∨` in the coordinates of `basis`.
    pub dual_cone: Cone,
    /// `Q` in the dual coordinates.
    pub cone: Cone,
}

impl BasicDual {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    fn vertex_rows(&self, v: usize) -> core::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    fn edge_row(&self, q: usize) -> usize {
        self.offsets[self.offsets.len() - 1] + q
    }
}

type Rows = Vec<Vec<BigInt>>;

/// Variable offsets, variable count, the node equations and the face inequalities.
fn face_rows(c: &ConeComplex, t: &CombType) -> (Vec<usize>, usize, Rows, Rows) {
    let mut offsets = vec![0];
    for v in &t.vertices {
        offsets.push(offsets.last().unwrap() + c.cell(v.cell).rank());
    }
    let base = *offsets.last().unwrap();
    let vars = base + t.edges.len();
    let mut eqs = Vec::new();
    for (k, e) in t.edges.iter().enumerate() {
        let m1 = c.embedding(t.vertices[e.from].cell, e.cell).unwrap();
        let m2 = c.embedding(t.vertices[e.to].cell, e.cell).unwrap();
        for i in 0..c.cell(e.cell).rank() {
            let mut row = vec![BigInt::zero(); vars];
            for j in 0..m2.cols() {
                row[offsets[e.to] + j] += &m2[(i, j)];
            }
            for j in 0..m1.cols() {
                row[offsets[e.from] + j] -= &m1[(i, j)];
            }
            row[base + k] -= &e.u[i];
            eqs.push(row);
        }
    }
    let mut ineqs = Vec::new();
    for (v, vx) in t.vertices.iter().enumerate() {
        for f in c.cell(vx.cell).cone.facets() {
            let mut row = vec![BigInt::zero(); vars];
            row[offsets[v]..offsets[v + 1]].clone_from_slice(f);
            ineqs.push(row);
        }
    }
    for k in 0..t.edges.len() {
        let mut row = vec![BigInt::zero(); vars];
        row[base + k] = BigInt::from(1);
        ineqs.push(row);
    }
    (offsets, vars, eqs, ineqs)
}

fn kernel_basis(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    if rows.iter().all(|r| r.iter().all(Zero::is_zero)) {
        return IntMatrix::identity(cols).col_vecs();
    }
    integer_kernel(&IntMatrix::from_rows(cols, rows))
}

/// Pulls each row back along the basis given as columns.
fn pull(rows: &[Vec<BigInt>], basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| basis.iter().map(|b| dot(r, b)).collect()).collect()
}

/// Rows `a` with `a·y = 0` on the whole cone `{y : A y ≥ 0}`.
fn implicit_equalities(a: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let weak: Vec<Ineq> = a.iter().map(|r| Ineq::ge(to_rat(r), BigRational::zero())).collect();
    a.iter()
        .filter(|r| {
            let mut sys = weak.clone();
            sys.push(Ineq::gt(to_rat(r), BigRational::zero()));
            feasible_point(&sys, dim).is_none()
        })
        .cloned()
        .collect()
}

pub fn basic_dual(c: &ConeComplex, t: &CombType) -> Result<BasicDual> {
    c.require_usable()?;
    t.validate(c)?;
    let (offsets, vars, eqs, ineqs) = face_rows(c, t);
    let mut basis = kernel_basis(&eqs, vars);
    let implicit = implicit_equalities(&pull(&ineqs, &basis), basis.len());
    if !implicit.is_empty() {
        let inner = kernel_basis(&implicit, basis.len());
        basis = inner
            .iter()
            .map(|w| {
                let mut x = vec![BigInt::zero(); vars];
                for (wi, b) in w.iter().zip(&basis) {
                    for (xj, bj) in x.iter_mut().zip(b) {
                        *xj += wi * bj;
                    }
                }
                x
            })
            .collect();
    }
    let k = basis.len();
    let gens: Vec<Vec<BigInt>> =
        pull(&ineqs, &basis).into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let cone = if k == 0 { Cone::zero(0) } else { Cone::new(k, &gens)? };
    let dual = if k == 0 { Cone::zero(0) } else { dual_cone(&cone)? };
    let basis = if k == 0 { IntMatrix::zeros(vars, 0) } else { IntMatrix::from_cols(vars, &basis) };
    Ok(BasicDual { offsets, vars, basis, dual_cone: dual, cone })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicMonoid {
    pub dual: BasicDual,
    pub q: ToricMonoid,
}

/// `Q = Hom(Q∨, ℕ)` with its Hilbert basis.
pub fn basic_monoid(c: &ConeComplex, t: &CombType) -> Result<BasicMonoid> {
    let dual = basic_dual(c, t)?;
    let q = if dual.rank() == 0 { ToricMonoid::free(0) } else { ToricMonoid::from_cone(&dual.cone)? };
    Ok(BasicMonoid { dual, q })
}

/// The pull-back of the generator of `ℕ` under the base map, as an element of
/// `Q` in dual coordinates: `ρ` read off at the vertices.
pub fn base_pullback(rho: &BaseMap, t: &CombType, b: &BasicMonoid) -> Result<Vec<BigInt>> {
    let d = &b.dual;
    let rows = d.basis.row_vecs();
    let mut out: Option<Vec<BigInt>> = None;
    for (v, vx) in t.vertices.iter().enumerate() {
        let r = rho.covector(vx.cell);
        let x: Vec<BigInt> = (0..d.rank())
            .map(|j| d.vertex_rows(v).zip(r).map(|(i, ri)| ri * &rows[i][j]).sum())
            .collect();
        match &out {
            Some(y) if y != &x => return Err(structural!("ρ is not constant along the type")),
            _ => out = Some(x),
        }
    }
    out.ok_or_else(|| structural!("type has no vertices"))
}

/// Coordinates of `x` in the Hilbert basis of a free monoid.
pub fn free_coordinates(q: &ToricMonoid, x: &[BigInt]) -> Result<Vec<BigInt>> {
    if !q.is_free() {
        return Err(argument!("monoid is not free"));
    }
    let cols = IntMatrix::from_cols(q.rank(), q.generators());
    let rows: Vec<RVec> = cols.row_vecs().iter().map(|r| to_rat(r)).collect();
    let y = solve_unique(&rows, &to_rat(x), q.rank()).ok_or_else(|| argument!("element is outside the monoid's group"))?;
    if !y.iter().all(BigRational::is_integer) {
        return Err(argument!("element is outside the monoid's group"));
    }
    Ok(y.iter().map(BigRational::to_integer).collect())
}

/// A log map over a log point seen through its type: `φ_η: P_η → Q'` for
/// every vertex, `ρ_q ∈ Q'` for every edge, and the base monoid `Q'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogMapSkeleton {
    pub t: CombType,
    /// `rank Q' × rank σ(v)`, acting on `P_η` in the dual chart of `σ(v)`.
    pub phi: Vec<IntMatrix>,
    pub rho: Vec<Vec<BigInt>>,
    pub base: ToricMonoid,
}

fn cell_monoid(c: &ConeComplex, cell: usize) -> Result<ToricMonoid> {
    let cone = &c.cell(cell).cone;
    if cone.rank() == 0 {
        return Ok(ToricMonoid::free(0));
    }
    ToricMonoid::from_cone(&dual_cone(cone)?)
}

impl LogMapSkeleton {
    /// Checks that every `φ_η` is a local homomorphism into `Q'`, every `ρ_q`
    /// is a nonzero element of `Q'`, and the node relations hold.
    pub fn new(
        c: &ConeComplex,
        t: CombType,
        phi: Vec<IntMatrix>,
        rho: Vec<Vec<BigInt>>,
        base: ToricMonoid,
    ) -> Result<LogMapSkeleton> {
        t.validate(c)?;
        let r = base.rank();
        if phi.len() != t.vertices.len() || rho.len() != t.edges.len() {
            return Err(structural!("skeleton needs one φ per vertex and one ρ per edge"));
        }
        if !base.is_sharp() {
            return Err(argument!("base monoid is not sharp"));
        }
        for (v, p) in t.vertices.iter().zip(&phi) {
            if p.rows() != r || p.cols() != c.cell(v.cell).rank() {
                return Err(structural!("φ for vertex {:?} has the wrong shape", v.id));
            }
            for h in cell_monoid(c, v.cell)?.generators() {
                let img = p.mul_vec(h);
                if !base.contains(&img) {
                    return Err(argument!("φ for vertex {:?} does not map into the base", v.id));
                }
                if img.iter().all(Zero::is_zero) {
                    return Err(argument!("φ for vertex {:?} is not local", v.id));
                }
            }
        }
        for (e, rq) in t.edges.iter().zip(&rho) {
            if rq.len() != r || !base.contains(rq) || rq.iter().all(Zero::is_zero) {
                return Err(argument!("ρ for edge {:?} is not a nonzero element of the base", e.id));
            }
            let m1 = c.embedding(t.vertices[e.from].cell, e.cell).unwrap();
            let m2 = c.embedding(t.vertices[e.to].cell, e.cell).unwrap();
            let lhs2 = phi[e.to].mul(&m2.transpose());
            let lhs1 = phi[e.from].mul(&m1.transpose());
            for i in 0..r {
                for j in 0..c.cell(e.cell).rank() {
                    if &lhs2[(i, j)] - &lhs1[(i, j)] != &rq[i] * &e.u[j] {
                        return Err(argument!("node relation fails at edge {:?}", e.id));
                    }
                }
            }
        }
        Ok(LogMapSkeleton { t, phi, rho, base })
    }
}

/// The skeleton over the basic monoid itself.
pub fn universal_skeleton(c: &ConeComplex, t: &CombType) -> Result<(BasicMonoid, LogMapSkeleton)> {
    let b = basic_monoid(c, t)?;
    let d = &b.dual;
    let rows = d.basis.row_vecs();
    let phi = (0..t.vertices.len())
        .map(|v| {
            let block: Vec<Vec<BigInt>> = rows[d.vertex_rows(v)].to_vec();
            IntMatrix::from_rows(d.rank(), &block).transpose()
        })
        .collect();
    let rho = (0..t.edges.len()).map(|q| rows[d.edge_row(q)].clone()).collect();
    let s = LogMapSkeleton::new(c, t.clone(), phi, rho, b.q.clone())?;
    Ok((b, s))
}

/// `Q → Q'`, dual to `n ↦ ((φ_η^t n), (n(ρ_q)))`.
pub fn canonical_map(c: &ConeComplex, t: &CombType, target: &LogMapSkeleton) -> Result<MonoidHom> {
    if &target.t != t {
        return Err(argument!("skeleton has a different combinatorial type"));
    }
    let b = basic_monoid(c, t)?;
    let d = &b.dual;
    let r = target.base.rank();
    // T: variables × r
    let mut tm: Vec<Vec<BigInt>> = Vec::new();
    for p in &target.phi {
        tm.extend(p.transpose().row_vecs());
    }
    tm.extend(target.rho.iter().cloned());
    let brows: Vec<RVec> = d.basis.row_vecs().iter().map(|x| to_rat(x)).collect();
    let mut s = IntMatrix::zeros(d.rank(), r);
    for j in 0..r {
        let col: RVec = tm.iter().map(|row| BigRational::from_integer(row[j].clone())).collect();
        let x = solve_unique(&brows, &col, d.rank())
            .filter(|x| x.iter().all(BigRational::is_integer))
            .ok_or_else(|| structural!("skeleton does not factor through the basic monoid"))?;
        for (i, xi) in x.iter().enumerate() {
            s[(i, j)] = xi.to_integer();
        }
    }
    MonoidHom::new(s.transpose(), &b.q, &target.base)
}

/// Whether the canonical map is an isomorphism.
pub fn is_basic(c: &ConeComplex, s: &LogMapSkeleton) -> Result<bool> {
    let h = canonical_map(c, &s.t, s)?;
    Ok(h.matrix.rows() == h.matrix.cols() && h.matrix.is_unimodular())
}

/// The tropical map over the point `m` of `Q'∨` (dual coordinates). Edges with
/// `m(ρ_q) = 0` are contracted and every vertex, edge and leg moves to the
/// smallest cell containing it.
pub fn tropicalize_fibre(
    c: &ConeComplex,
    s: &LogMapSkeleton,
    m: &[BigRational],
    deg: Option<&DegreeData>,
) -> Result<TropicalMap> {
    let t = &s.t;
    if m.len() != s.base.rank() {
        return Err(argument!("point has {} coordinates, base has rank {}", m.len(), s.base.rank()));
    }
    if s.base.generators().iter().any(|g| rdot(&to_rat(g), m).is_negative()) {
        return Err(argument!("point is not in the dual of the base monoid"));
    }
    let pos: Vec<RVec> = s
        .phi
        .iter()
        .map(|p| p.transpose().row_vecs().iter().map(|col| rdot(&to_rat(col), m)).collect())
        .collect();
    let len: Vec<BigRational> = s.rho.iter().map(|r| rdot(&to_rat(r), m)).collect();

    let zero: Vec<usize> = (0..t.edges.len()).filter(|&q| len[q].is_zero()).collect();
    let located: Vec<(usize, RVec)> =
        t.vertices.iter().zip(&pos).map(|(v, p)| c.locate(v.cell, p)).collect::<Result<_>>()?;
    let targets: BTreeMap<usize, usize> = located.iter().map(|(cell, _)| *cell).enumerate().collect();
    let ct = contract(c, t, &zero, &targets, deg)?;

    let mut uf = UnionFind::new(t.vertices.len());
    for &q in &zero {
        uf.union(t.edges[q].from, t.edges[q].to);
    }
    let new_pos: Vec<RVec> = ct
        .vertices
        .iter()
        .map(|nv| {
            let old = t.vertex_index(&nv.id).expect("contraction keeps vertex ids");
            located[old].1.clone()
        })
        .collect();
    let kept: Vec<usize> = (0..t.edges.len()).filter(|q| !zero.contains(q)).collect();
    let new_len: Vec<BigRational> = kept.iter().map(|&q| len[q].clone()).collect();

    let embed = |small: usize, big: usize, x: &[BigRational]| -> RVec {
        let e = c.embedding(small, big).unwrap();
        e.row_vecs().iter().map(|r| rdot(&to_rat(r), x)).collect()
    };
    // moves `u` from `big` to the smallest cell containing `x` and `x + ε u`
    let shrink = |big: usize, x: RVec, u: &[BigInt]| -> Result<(usize, Vec<BigInt>)> {
        let (cell, _) = c.locate(big, &x)?;
        if cell == big {
            return Ok((big, u.to_vec()));
        }
        let e = c.embedding(cell, big).unwrap();
        let rows: Vec<RVec> = e.row_vecs().iter().map(|r| to_rat(r)).collect();
        let y = solve_unique(&rows, &to_rat(u), e.cols()).ok_or_else(|| structural!("segment leaves its face"))?;
        Ok((cell, y.iter().map(BigRational::to_integer).collect()))
    };
    let mut edges: Vec<Edge> = Vec::new();
    for e in &ct.edges {
        let a = embed(ct.vertices[e.from].cell, e.cell, &new_pos[e.from]);
        let b = embed(ct.vertices[e.to].cell, e.cell, &new_pos[e.to]);
        let mid: RVec = a.iter().zip(&b).map(|(x, y)| (x + y) / BigRational::from_integer(2.into())).collect();
        let (cell, u) = shrink(e.cell, mid, &e.u)?;
        edges.push(Edge { cell, u, ..e.clone() });
    }
    let mut legs: Vec<Leg> = Vec::new();
    for l in &ct.legs {
        let p = embed(ct.vertices[l.vertex].cell, l.cell, &new_pos[l.vertex]);
        let tip: RVec = p.iter().zip(&l.u).map(|(x, u)| x + BigRational::from_integer(u.clone())).collect();
        let (cell, u) = shrink(l.cell, tip, &l.u)?;
        legs.push(Leg { cell, u, ..l.clone() });
    }
    let nt = CombType::new(c, ct.vertices, edges, legs)?;
    let map = TropicalMap { t: nt, pos: new_pos, len: new_len };
    if let Some(v) = validate_map(c, None, &map)? {
        return Err(structural!("fibre is not a tropical map: {v}"));
    }
    Ok(map)
}

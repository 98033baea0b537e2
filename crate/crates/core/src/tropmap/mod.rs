//! Tropical maps of a combinatorial type into a cone complex: validity,
//! balancing, the moduli polyhedron, rigidity and multiplicity.

mod enumerate;
pub(crate) mod lp;

pub use enumerate::{enumerate_rigid, Caps, EnumeratedType, Enumeration, LegData, Rejected};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::complex::{BaseMap, ConeComplex, DegreeData};
use crate::curve::{automorphism_count, are_isomorphic, total_class, CombType, LegMode};
use crate::error::argument;
use crate::lattice::dot;
use crate::lattice::linalg::{denominator_lcm, rdot, solve_affine, to_rat, RVec};
use crate::Result;

use lp::Ineq;

/// A tropical map: a position per vertex in its cell's chart and a length per
/// edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalMap {
    pub t: CombType,
    pub pos: Vec<RVec>,
    pub len: Vec<BigRational>,
}

/// The first failed condition of a tropical map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    VertexNotInterior { vertex: String, cell: String },
    VertexHeight { vertex: String },
    EdgeLength { edge: String },
    EdgeSegment { edge: String },
    EdgeNotInterior { edge: String, cell: String },
    LegNotInterior { leg: String, cell: String },
    LegHeight { leg: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexNotInterior { vertex, cell } => {
                write!(f, "vertex {vertex:?} is not in the relative interior of {cell:?}")
            }
            Violation::VertexHeight { vertex } => write!(f, "vertex {vertex:?} does not lie at height one"),
            Violation::EdgeLength { edge } => write!(f, "edge {edge:?} has nonpositive length"),
            Violation::EdgeSegment { edge } => write!(f, "edge {edge:?}: endpoint difference is not len·u"),
            Violation::EdgeNotInterior { edge, cell } => {
                write!(f, "edge {edge:?} does not run through the interior of {cell:?}")
            }
            Violation::LegNotInterior { leg, cell } => {
                write!(f, "leg {leg:?} does not run through the interior of {cell:?}")
            }
            Violation::LegHeight { leg } => write!(f, "leg {leg:?} leaves the height-one slice"),
        }
    }
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::VertexNotInterior { .. } => "vertex-not-interior",
            Violation::VertexHeight { .. } => "vertex-height",
            Violation::EdgeLength { .. } => "edge-length",
            Violation::EdgeSegment { .. } => "edge-segment",
            Violation::EdgeNotInterior { .. } => "edge-not-interior",
            Violation::LegNotInterior { .. } => "leg-not-interior",
            Violation::LegHeight { .. } => "leg-height",
        }
    }
}

fn embed(c: &ConeComplex, small: usize, big: usize, x: &[BigRational]) -> RVec {
    let m = c.embedding(small, big).expect("face relation checked by type validation");
    (0..m.rows()).map(|r| rdot(&to_rat(&m.row(r)), x)).collect()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Checks vertices, then edges, then legs, returning the first violation.
/// With `rho`, the map must also lie in the height-one slice.
pub fn validate_map(c: &ConeComplex, rho: Option<&BaseMap>, m: &TropicalMap) -> Result<Option<Violation>> {
    let t = &m.t;
    t.validate(c)?;
    if m.pos.len() != t.vertices.len() || m.len.len() != t.edges.len() {
        return Err(argument!("map has {} positions and {} lengths", m.pos.len(), m.len.len()));
    }
    for (v, p) in t.vertices.iter().zip(&m.pos) {
        let r = c.cell(v.cell).rank();
        if p.len() != r {
            return Err(argument!(
                "position of vertex {:?} has {} coordinates, cell {:?} has rank {}",
                v.id,
                p.len(),
                c.id(v.cell),
                r
            ));
        }
    }
    for (v, p) in t.vertices.iter().zip(&m.pos) {
        if !c.cell(v.cell).cone.relint_contains_rat(p) {
            return Ok(Some(Violation::VertexNotInterior { vertex: v.id.clone(), cell: c.id(v.cell).to_string() }));
        }
        if let Some(rho) = rho {
            if !rho.eval(v.cell, p).is_one() {
                return Ok(Some(Violation::VertexHeight { vertex: v.id.clone() }));
            }
        }
    }
    for (e, l) in t.edges.iter().zip(&m.len) {
        if !l.is_positive() {
            return Ok(Some(Violation::EdgeLength { edge: e.id.clone() }));
        }
        let a = embed(c, t.vertices[e.from].cell, e.cell, &m.pos[e.from]);
        let b = embed(c, t.vertices[e.to].cell, e.cell, &m.pos[e.to]);
        let seg = b.iter().zip(&a).zip(&e.u).all(|((y, x), u)| y - x == l * BigRational::from_integer(u.clone()));
        if !seg {
            return Ok(Some(Violation::EdgeSegment { edge: e.id.clone() }));
        }
        let mid: RVec = a.iter().zip(&b).map(|(x, y)| (x + y) / rat(2)).collect();
        if !c.cell(e.cell).cone.relint_contains_rat(&mid) {
            return Ok(Some(Violation::EdgeNotInterior { edge: e.id.clone(), cell: c.id(e.cell).to_string() }));
        }
    }
    for l in &t.legs {
        let vc = t.vertices[l.vertex].cell;
        let p = embed(c, vc, l.cell, &m.pos[l.vertex]);
        let u = to_rat(&l.u);
        let ok = c.cell(l.cell).cone.facets().iter().all(|f| {
            let f = to_rat(f);
            let (fu, fp) = (rdot(&f, &u), rdot(&f, &p));
            !fu.is_negative() && (fp.is_positive() || fu.is_positive())
        });
        if !ok {
            return Ok(Some(Violation::LegNotInterior { leg: l.id.clone(), cell: c.id(l.cell).to_string() }));
        }
        if let Some(rho) = rho {
            if !dot(rho.covector(l.cell), &l.u).is_zero() {
                return Ok(Some(Violation::LegHeight { leg: l.id.clone() }));
            }
        }
    }
    Ok(None)
}

/// Sum of the outgoing contact orders at `v`, in the smallest cell containing
/// every incident edge and leg cell. `None` when no such cell exists or the
/// smallest one is not unique.
pub fn balancing_defect(c: &ConeComplex, t: &CombType, v: usize) -> Option<(usize, Vec<BigInt>)> {
    let mut cells = vec![t.vertices[v].cell];
    let mut outgoing: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for e in t.edges_at(v) {
        let e = &t.edges[e];
        cells.push(e.cell);
        if e.from == v {
            outgoing.push((e.cell, e.u.clone()));
        }
        if e.to == v {
            outgoing.push((e.cell, e.u.iter().map(|x| -x).collect()));
        }
    }
    for l in t.legs_at(v) {
        let l = &t.legs[l];
        cells.push(l.cell);
        outgoing.push((l.cell, l.u.clone()));
    }
    let co = c.common_cofaces(&cells);
    let tau = *co.first()?;
    let r = c.cell(tau).rank();
    if co.iter().skip(1).any(|&x| c.cell(x).rank() == r) {
        return None;
    }
    let mut sum = vec![BigInt::zero(); r];
    for (cell, u) in outgoing {
        let m = c.embedding(cell, tau)?;
        for (s, x) in sum.iter_mut().zip(m.mul_vec(&u)) {
            *s += x;
        }
    }
    Some((tau, sum))
}

/// A point condition: the vertex of `leg` maps to `point`, given in the chart
/// of `cell`. The leg must have zero contact order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCondition {
    pub leg: usize,
    pub cell: usize,
    pub point: RVec,
}

/// Equalities `a·x = b` and open conditions `a·x > b` in the variables
/// (vertex coordinates in their charts, then edge lengths).
#[derive(Clone, Debug)]
pub struct ModuliPolyhedron {
    pub offsets: Vec<usize>,
    pub vars: usize,
    pub equalities: Vec<(RVec, BigRational)>,
    pub open: Vec<(RVec, BigRational)>,
    /// Why the polyhedron is empty before any solving, e.g. a point condition
    /// located in the wrong cell.
    pub obstruction: Option<String>,
    solution: Option<(RVec, Vec<RVec>)>,
    interior: Option<RVec>,
}

impl ModuliPolyhedron {
    pub fn is_empty(&self) -> bool {
        self.interior.is_none()
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.interior.as_ref().map(|_| self.solution.as_ref().unwrap().1.len())
    }

    /// Basis of the directions of the affine hull of the equalities.
    pub fn directions(&self) -> &[RVec] {
        self.solution.as_ref().map_or(&[], |s| &s.1)
    }

    /// A point of the open polyhedron.
    pub fn interior_point(&self) -> Option<&RVec> {
        self.interior.as_ref()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.obstruction.is_none()
            && self.equalities.iter().all(|(a, b)| &rdot(a, x) == b)
            && self.open.iter().all(|(a, b)| &rdot(a, x) > b)
    }

    /// The map of type `t` at the variable vector `x`.
    pub fn map_at(&self, t: &CombType, x: &[BigRational]) -> TropicalMap {
        let pos = (0..t.vertices.len())
            .map(|v| x[self.offsets[v]..self.offsets[v + 1]].to_vec())
            .collect();
        let base = self.offsets[t.vertices.len()];
        let len = (0..t.edges.len()).map(|e| x[base + e].clone()).collect();
        TropicalMap { t: t.clone(), pos, len }
    }

    fn with_solution(mut self) -> ModuliPolyhedron {
        if self.obstruction.is_some() {
            return self;
        }
        let (a, b): (Vec<RVec>, Vec<BigRational>) = self.equalities.iter().cloned().unzip();
        self.solution = solve_affine(&a, &b, self.vars);
        let Some((x0, dirs)) = &self.solution else { return self };
        // substitute x = x0 + Σ t_i d_i
        let sys: Vec<Ineq> = self
            .open
            .iter()
            .map(|(a, b)| Ineq::gt(dirs.iter().map(|d| rdot(a, d)).collect(), b - rdot(a, x0)))
            .collect();
        self.interior = lp::feasible_point(&sys, dirs.len()).map(|t| {
            let mut x = x0.clone();
            for (ti, d) in t.iter().zip(dirs) {
                for (xj, dj) in x.iter_mut().zip(d) {
                    *xj += ti * dj;
                }
            }
            x
        });
        self
    }
}

fn unit(n: usize, i: usize) -> RVec {
    let mut v = vec![BigRational::zero(); n];
    v[i] = BigRational::one();
    v
}

/// The moduli polyhedron of `t`, in the height-one slice when `rho` is given,
/// with the point conditions appended as equations on the leg vertices.
pub fn moduli_polyhedron(
    c: &ConeComplex,
    rho: Option<&BaseMap>,
    t: &CombType,
    points: &[PointCondition],
) -> Result<ModuliPolyhedron> {
    c.require_usable()?;
    t.validate(c)?;
    let mut offsets = vec![0];
    for v in &t.vertices {
        offsets.push(offsets.last().unwrap() + c.cell(v.cell).rank());
    }
    let base = *offsets.last().unwrap();
    let vars = base + t.edges.len();
    let mut eqs = Vec::new();
    let mut open = Vec::new();
    let mut obstruction = None;

    // a·(M x_v) as a row over the variables
    let pulled = |row: &mut RVec, f: &[BigRational], v: usize, cell: usize, sign: i64| {
        let m = c.embedding(t.vertices[v].cell, cell).expect("face relation checked by type validation");
        for j in 0..m.cols() {
            let mut s = BigRational::zero();
            for i in 0..m.rows() {
                s += &f[i] * BigRational::from_integer(m[(i, j)].clone());
            }
            row[offsets[v] + j] += s * rat(sign);
        }
    };

    for (v, vx) in t.vertices.iter().enumerate() {
        let cone = &c.cell(vx.cell).cone;
        for f in cone.facets() {
            let mut row = vec![BigRational::zero(); vars];
            pulled(&mut row, &to_rat(f), v, vx.cell, 1);
            open.push((row, BigRational::zero()));
        }
        if let Some(rho) = rho {
            let mut row = vec![BigRational::zero(); vars];
            pulled(&mut row, &to_rat(rho.covector(vx.cell)), v, vx.cell, 1);
            eqs.push((row, BigRational::one()));
        }
    }
    for (k, e) in t.edges.iter().enumerate() {
        let r = c.cell(e.cell).rank();
        for i in 0..r {
            let mut row = vec![BigRational::zero(); vars];
            let ei = unit(r, i);
            pulled(&mut row, &ei, e.to, e.cell, 1);
            pulled(&mut row, &ei, e.from, e.cell, -1);
            row[base + k] -= BigRational::from_integer(e.u[i].clone());
            eqs.push((row, BigRational::zero()));
        }
        open.push((unit(vars, base + k), BigRational::zero()));
        for f in c.cell(e.cell).cone.facets() {
            let mut row = vec![BigRational::zero(); vars];
            let f = to_rat(f);
            pulled(&mut row, &f, e.to, e.cell, 1);
            pulled(&mut row, &f, e.from, e.cell, 1);
            open.push((row, BigRational::zero()));
        }
    }
    for l in &t.legs {
        for f in c.cell(l.cell).cone.facets() {
            let fu = dot(f, &l.u);
            if fu.is_negative() {
                obstruction.get_or_insert_with(|| format!("leg {:?} points out of {:?}", l.id, c.id(l.cell)));
            } else if fu.is_zero() {
                let mut row = vec![BigRational::zero(); vars];
                pulled(&mut row, &to_rat(f), l.vertex, l.cell, 1);
                open.push((row, BigRational::zero()));
            }
        }
        if let Some(rho) = rho {
            if !dot(rho.covector(l.cell), &l.u).is_zero() {
                obstruction.get_or_insert_with(|| format!("leg {:?} leaves the height-one slice", l.id));
            }
        }
    }
    for pc in points {
        let leg = t.legs.get(pc.leg).ok_or_else(|| argument!("point condition on missing leg {}", pc.leg))?;
        if leg.u.iter().any(|x| !x.is_zero()) {
            return Err(argument!("point condition on leg {:?} with nonzero contact order", leg.id));
        }
        if pc.cell >= c.cells().len() {
            return Err(argument!("point condition in unknown cell {}", pc.cell));
        }
        let (cell, y) = c.locate(pc.cell, &pc.point)?;
        let v = leg.vertex;
        if cell != t.vertices[v].cell {
            obstruction.get_or_insert_with(|| {
                format!("point for leg {:?} lies in {:?}, its vertex is in {:?}", leg.id, c.id(cell), c.id(t.vertices[v].cell))
            });
            continue;
        }
        for (j, yj) in y.into_iter().enumerate() {
            eqs.push((unit(vars, offsets[v] + j), yj));
        }
    }
    let p = ModuliPolyhedron { offsets, vars, equalities: eqs, open, obstruction, solution: None, interior: None };
    Ok(p.with_solution())
}

/// Outcome of a rigidity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rigidity {
    Rigid(TropicalMap),
    /// A member of a positive-dimensional family and one direction of it.
    Family { dimension: usize, member: TropicalMap, direction: RVec },
    Empty { reason: String },
}

impl Rigidity {
    pub fn is_rigid(&self) -> bool {
        matches!(self, Rigidity::Rigid(_))
    }
}

pub fn is_rigid(c: &ConeComplex, rho: Option<&BaseMap>, t: &CombType, points: &[PointCondition]) -> Result<Rigidity> {
    let p = moduli_polyhedron(c, rho, t, points)?;
    if let Some(o) = &p.obstruction {
        return Ok(Rigidity::Empty { reason: o.clone() });
    }
    let Some(x) = p.interior_point() else {
        let reason = if p.solution.is_none() { "equations are inconsistent" } else { "open conditions fail" };
        return Ok(Rigidity::Empty { reason: reason.to_string() });
    };
    let member = p.map_at(t, x);
    match p.directions().first() {
        None => Ok(Rigidity::Rigid(member)),
        Some(d) => Ok(Rigidity::Family { dimension: p.directions().len(), member, direction: d.clone() }),
    }
}

/// Least positive integer clearing every denominator of a rigid map.
pub fn map_multiplicity(m: &TropicalMap) -> BigInt {
    denominator_lcm(m.pos.iter().flatten().chain(&m.len))
}

pub fn multiplicity(c: &ConeComplex, rho: Option<&BaseMap>, t: &CombType, points: &[PointCondition]) -> Result<BigInt> {
    match is_rigid(c, rho, t, points)? {
        Rigidity::Rigid(m) => Ok(map_multiplicity(&m)),
        _ => Err(argument!("type is not rigid")),
    }
}

/// One input row of the decomposition ledger.
#[derive(Clone, Debug)]
pub struct LedgerEntry {
    pub label: String,
    pub t: CombType,
    pub points: Vec<PointCondition>,
    pub count: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerTerm {
    pub labels: Vec<String>,
    pub multiplicity: BigInt,
    pub automorphisms: usize,
    pub coefficient: BigRational,
    pub count: BigRational,
    pub contribution: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    pub terms: Vec<LedgerTerm>,
    pub total: BigRational,
    pub notes: Vec<String>,
}

/// Per isomorphism class of rigid types: `m`, `|Aut|`, `m/|Aut|` and its
/// product with the supplied count. Isomorphic entries with equal counts are
/// merged with a note; with differing counts they are an error. With `classes`,
/// every decorated type must have total class `A`.
pub fn decomposition_terms(
    c: &ConeComplex,
    rho: Option<&BaseMap>,
    classes: Option<(&DegreeData, &[BigInt])>,
    entries: &[LedgerEntry],
) -> Result<Ledger> {
    let mut terms: Vec<(usize, LedgerTerm)> = Vec::new();
    let mut notes = Vec::new();
    for (i, en) in entries.iter().enumerate() {
        if let Some((deg, a)) = classes {
            if en.t.is_decorated() && total_class(&en.t, deg)? != a {
                return Err(argument!("decoration of {:?} does not sum to the total class", en.label));
            }
        }
        let m = match is_rigid(c, rho, &en.t, &en.points)? {
            Rigidity::Rigid(m) => map_multiplicity(&m),
            _ => return Err(argument!("type {:?} is not rigid", en.label)),
        };
        if let Some((_, term)) = terms.iter_mut().find(|(j, _)| are_isomorphic(&entries[*j].t, &en.t, LegMode::AsGiven)) {
            if term.count != en.count {
                return Err(argument!(
                    "{:?} is isomorphic to {:?} but has a different count",
                    en.label,
                    term.labels[0]
                ));
            }
            notes.push(format!("{:?} merged into {:?}", en.label, term.labels[0]));
            term.labels.push(en.label.clone());
            continue;
        }
        let aut = automorphism_count(&en.t, LegMode::AsGiven);
        let coefficient = BigRational::new(m.clone(), BigInt::from(aut));
        let contribution = &coefficient * &en.count;
        terms.push((
            i,
            LedgerTerm {
                labels: vec![en.label.clone()],
                multiplicity: m,
                automorphisms: aut,
                coefficient,
                count: en.count.clone(),
                contribution,
            },
        ));
    }
    let terms: Vec<LedgerTerm> = terms.into_iter().map(|(_, t)| t).collect();
    let total = terms.iter().fold(BigRational::zero(), |s, t| s + &t.contribution);
    Ok(Ledger { terms, total, notes })
}

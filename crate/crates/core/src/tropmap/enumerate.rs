//! Bounded enumeration of rigid types in the height-one slice, with point
//! conditions and class decorations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{is_rigid, map_multiplicity, PointCondition, Rigidity, TropicalMap};
use crate::complex::{BaseMap, ConeComplex, DegreeData};
use crate::curve::{are_isomorphic, automorphism_count, ClassBeta, CombType, Edge, Leg, LegContact, LegMode, Vertex};
use crate::error::{argument, structural};
use crate::lattice::linalg::{solve_unique, to_rat, RVec};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Bound on the absolute value of each coordinate of an edge contact order.
    pub max_u: u32,
}

/// Enumeration data for one leg of the class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LegData {
    pub id: String,
    /// Point condition `(cell, point)`; the contact order must be zero.
    pub point: Option<(usize, RVec)>,
    /// Index of a leg that must sit on the same vertex.
    pub with: Option<usize>,
    /// Contribution to the class of the carrying vertex, in the total degree group.
    pub class: Option<Vec<BigInt>>,
    /// Class of the stratum curve through the point. A vertex of class zero
    /// carrying this leg needs a neighbour whose class minus this one is
    /// nonnegative in the chosen basis of the total degree group.
    pub support: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedType {
    pub t: CombType,
    pub map: TropicalMap,
    pub multiplicity: BigInt,
    pub automorphisms: usize,
}

/// A rigid type excluded by the class constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejected {
    pub t: CombType,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub rigid: Vec<EnumeratedType>,
    pub rejected: Vec<Rejected>,
    /// Number of candidate types tested for rigidity.
    pub candidates: usize,
}

struct Ctx<'a> {
    c: &'a ConeComplex,
    rho: &'a BaseMap,
    beta: &'a ClassBeta,
    legs: &'a [LegData],
    deg: Option<&'a DegreeData>,
    caps: Caps,
    points: Vec<PointCondition>,
    pinned: Vec<Option<usize>>,
    slice_cells: Vec<usize>,
    out: Enumeration,
}

/// All rigid types of class `beta` in the slice of `rho` within the caps, up
/// to isomorphism fixing the legs.
pub fn enumerate_rigid(
    c: &ConeComplex,
    rho: &BaseMap,
    beta: &ClassBeta,
    legs: &[LegData],
    deg: Option<&DegreeData>,
    caps: Caps,
) -> Result<Enumeration> {
    c.require_usable()?;
    beta.validate(c)?;
    if legs.len() != beta.legs.len() {
        return Err(structural!("{} leg records for {} legs", legs.len(), beta.legs.len()));
    }
    let mut points = Vec::new();
    let mut pinned = Vec::new();
    for (i, l) in legs.iter().enumerate() {
        if let Some(w) = l.with {
            if w >= legs.len() {
                return Err(structural!("leg {:?} is tied to missing leg {w}", l.id));
            }
        }
        match &l.point {
            Some((cell, p)) => {
                if beta.legs[i] != LegContact::Zero {
                    return Err(argument!("point condition on leg {:?} with nonzero contact order", l.id));
                }
                if *cell >= c.cells().len() {
                    return Err(structural!("point of leg {:?} in unknown cell", l.id));
                }
                pinned.push(Some(c.locate(*cell, p)?.0));
                points.push(PointCondition { leg: i, cell: *cell, point: p.clone() });
            }
            None => pinned.push(None),
        }
    }
    if let Some(deg) = deg {
        let mut sum = vec![BigInt::zero(); deg.total_rank()];
        for l in legs {
            if let Some(a) = &l.class {
                if a.len() != sum.len() {
                    return Err(structural!("class of leg {:?} has the wrong length", l.id));
                }
                for (s, x) in sum.iter_mut().zip(a) {
                    *s += x;
                }
            }
        }
        if let Some(total) = &beta.total {
            if &sum != total {
                return Err(argument!("leg classes do not sum to the total class"));
            }
        }
    }
    let slice_cells = (0..c.cells().len()).filter(|&i| !rho.vanishes_on(i)).collect();
    let mut ctx = Ctx {
        c,
        rho,
        beta,
        legs,
        deg,
        caps,
        points,
        pinned,
        slice_cells,
        out: Enumeration { rigid: Vec::new(), rejected: Vec::new(), candidates: 0 },
    };
    for n in 1..=caps.max_vertices {
        let mut place = vec![0; legs.len()];
        ctx.placements(n, 0, 0, &mut place)?;
    }
    Ok(ctx.out)
}

impl Ctx<'_> {
    /// Legs go to vertices in first-use order; vertices after the last used
    /// one carry no legs.
    fn placements(&mut self, n: usize, i: usize, used: usize, place: &mut Vec<usize>) -> Result<()> {
        if i == self.legs.len() {
            return self.with_placement(n, used, place);
        }
        for v in 0..(used + 1).min(n) {
            place[i] = v;
            self.placements(n, i + 1, used.max(v + 1), place)?;
        }
        Ok(())
    }

    fn with_placement(&mut self, n: usize, used: usize, place: &[usize]) -> Result<()> {
        if self.legs.iter().enumerate().any(|(i, l)| l.with.is_some_and(|w| place[w] != place[i])) {
            return Ok(());
        }
        let mut cells: Vec<Option<usize>> = vec![None; n];
        for (i, p) in self.pinned.iter().enumerate() {
            if let Some(cell) = p {
                match cells[place[i]] {
                    Some(x) if x != *cell => return Ok(()),
                    _ => cells[place[i]] = Some(*cell),
                }
            }
        }
        let mut cells_now = vec![0; n];
        self.cell_choices(n, 0, &cells, &mut cells_now, used, place)
    }

    fn cell_choices(
        &mut self,
        n: usize,
        v: usize,
        fixed: &[Option<usize>],
        cells: &mut Vec<usize>,
        used: usize,
        place: &[usize],
    ) -> Result<()> {
        if v == n {
            return self.with_cells(n, cells, place);
        }
        // free vertices without legs are interchangeable: choose their cells in order
        let start = if v > used && fixed[v].is_none() { Some(cells[v - 1]) } else { None };
        match fixed[v] {
            Some(cell) => {
                cells[v] = cell;
                self.cell_choices(n, v + 1, fixed, cells, used, place)
            }
            None => {
                for k in 0..self.slice_cells.len() {
                    let cell = self.slice_cells[k];
                    if start.is_some_and(|s| cell < s) {
                        continue;
                    }
                    cells[v] = cell;
                    self.cell_choices(n, v + 1, fixed, cells, used, place)?;
                }
                Ok(())
            }
        }
    }

    fn with_cells(&mut self, n: usize, cells: &[usize], place: &[usize]) -> Result<()> {
        let c = self.c;
        let mut legs = Vec::new();
        for (i, contact) in self.beta.legs.iter().enumerate() {
            let vc = cells[place[i]];
            let (cell, u) = match contact {
                LegContact::Zero => (vc, vec![BigInt::zero(); c.cell(vc).rank()]),
                LegContact::In { cell, u } => {
                    let co = c.common_cofaces(&[vc, *cell]);
                    let Some(&lc) = co.first() else { return Ok(()) };
                    if co.iter().skip(1).any(|&x| c.cell(x).rank() == c.cell(lc).rank()) {
                        return Ok(());
                    }
                    (lc, c.embedding(*cell, lc).unwrap().mul_vec(u))
                }
            };
            legs.push(Leg { id: self.legs[i].id.clone(), vertex: place[i], cell, u });
        }
        let g = self.beta.genus;
        let mut genera = vec![0u32; n];
        self.genus_choices(n, 0, g, cells, &legs, &mut genera)
    }

    fn genus_choices(
        &mut self,
        n: usize,
        v: usize,
        left: u64,
        cells: &[usize],
        legs: &[Leg],
        genera: &mut Vec<u32>,
    ) -> Result<()> {
        if v == n {
            let edges = n - 1 + left as usize;
            if edges > self.caps.max_edges {
                return Ok(());
            }
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
            let mut chosen = Vec::new();
            return self.edge_multisets(n, &pairs, 0, edges, &mut chosen, cells, legs, genera);
        }
        for gv in 0..=left {
            genera[v] = gv as u32;
            self.genus_choices(n, v + 1, left - gv, cells, legs, genera)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn edge_multisets(
        &mut self,
        n: usize,
        pairs: &[(usize, usize)],
        from: usize,
        left: usize,
        chosen: &mut Vec<(usize, usize)>,
        cells: &[usize],
        legs: &[Leg],
        genera: &[u32],
    ) -> Result<()> {
        if left == 0 {
            let g = crate::curve::Graph { vertices: n, edges: chosen.clone(), legs: Vec::new() };
            if !g.is_connected() {
                return Ok(());
            }
            let options: Vec<Vec<(usize, Vec<BigInt>)>> =
                chosen.iter().map(|&(a, b)| self.edge_options(cells[a], cells[b])).collect();
            if options.iter().any(Vec::is_empty) {
                return Ok(());
            }
            let mut pick = vec![0; options.len()];
            loop {
                let edges: Vec<Edge> = chosen
                    .iter()
                    .zip(&pick)
                    .enumerate()
                    .map(|(k, (&(a, b), &p))| Edge {
                        id: format!("e{k}"),
                        from: a,
                        to: b,
                        cell: options[k][p].0,
                        u: options[k][p].1.clone(),
                    })
                    .collect();
                let vertices = (0..n)
                    .map(|v| Vertex { id: format!("v{v}"), cell: cells[v], genus: genera[v], class: None })
                    .collect();
                let t = CombType { vertices, edges, legs: legs.to_vec() };
                self.consider(t)?;
                // odometer over the option lists
                let mut k = 0;
                while k < pick.len() {
                    pick[k] += 1;
                    if pick[k] < options[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    return Ok(());
                }
            }
        }
        for i in from..pairs.len() {
            chosen.push(pairs[i]);
            self.edge_multisets(n, pairs, i, left - 1, chosen, cells, legs, genera)?;
            chosen.pop();
        }
        Ok(())
    }

    /// Cells containing both endpoint cells, with every contact order of
    /// height zero inside the cap.
    fn edge_options(&self, a: usize, b: usize) -> Vec<(usize, Vec<BigInt>)> {
        let cap = self.caps.max_u as i64;
        let mut out = Vec::new();
        for cell in self.c.common_cofaces(&[a, b]) {
            let r = self.c.cell(cell).rank();
            let mut u = vec![-cap; r];
            loop {
                let uv: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
                if crate::lattice::dot(self.rho.covector(cell), &uv).is_zero() {
                    out.push((cell, uv));
                }
                let mut k = 0;
                while k < r {
                    u[k] += 1;
                    if u[k] <= cap {
                        break;
                    }
                    u[k] = -cap;
                    k += 1;
                }
                if k == r {
                    break;
                }
            }
        }
        out
    }

    fn consider(&mut self, t: CombType) -> Result<()> {
        self.out.candidates += 1;
        let Rigidity::Rigid(map) = is_rigid(self.c, Some(self.rho), &t, &self.points)? else { return Ok(()) };
        let t = match self.decorate(&t) {
            Ok(t) => t,
            Err(reason) => {
                if !self.out.rejected.iter().any(|r| are_isomorphic(&r.t, &t, LegMode::AsGiven)) {
                    self.out.rejected.push(Rejected { t, reason });
                }
                return Ok(());
            }
        };
        if self.out.rigid.iter().any(|r| are_isomorphic(&r.t, &t, LegMode::AsGiven)) {
            return Ok(());
        }
        let map = TropicalMap { t: t.clone(), ..map };
        let multiplicity = map_multiplicity(&map);
        let automorphisms = automorphism_count(&t, LegMode::AsGiven);
        self.out.rigid.push(EnumeratedType { t, map, multiplicity, automorphisms });
        Ok(())
    }

    /// Assigns each vertex the sum of its legs' classes and applies the
    /// support rule for class-zero vertices carrying a point condition.
    fn decorate(&self, t: &CombType) -> core::result::Result<CombType, String> {
        let Some(deg) = self.deg else { return Ok(t.clone()) };
        let n = t.vertices.len();
        let mut totals = vec![vec![BigInt::zero(); deg.total_rank()]; n];
        for (l, data) in t.legs.iter().zip(self.legs) {
            if let Some(a) = &data.class {
                for (s, x) in totals[l.vertex].iter_mut().zip(a) {
                    *s += x;
                }
            }
        }
        let mut out = t.clone();
        for (v, total) in totals.iter().enumerate() {
            let m = deg.to_total(t.vertices[v].cell);
            let rows: Vec<RVec> = (0..m.rows()).map(|r| to_rat(&m.row(r))).collect();
            let class = if m.cols() == 0 {
                total.iter().all(Zero::is_zero).then(Vec::new)
            } else {
                solve_unique(&rows, &to_rat(total), m.cols())
                    .filter(|x| x.iter().all(BigRational::is_integer))
                    .map(|x| x.iter().map(BigRational::to_integer).collect())
            };
            let Some(class) = class else {
                return Err(format!("class of vertex {:?} is not supported on its stratum", t.vertices[v].id));
            };
            out.vertices[v].class = Some(class);
        }
        for (l, data) in t.legs.iter().zip(self.legs) {
            let (Some(_), Some(s)) = (&data.point, &data.support) else { continue };
            let v = l.vertex;
            if totals[v].iter().any(|x| !x.is_zero()) {
                continue;
            }
            let ok = t.edges.iter().any(|e| {
                let w = if e.from == v { e.to } else if e.to == v { e.from } else { return false };
                w != v && totals[w].iter().zip(s).all(|(a, b)| !(a - b).is_negative())
            });
            if !ok {
                return Err(format!(
                    "leg {:?}: vertex {:?} has class zero and no neighbour's class contains the stratum through its point",
                    l.id, t.vertices[v].id
                ));
            }
        }
        Ok(out)
    }
}

//! Generalized cone complexes given as finite diagrams of cones and face
//! morphisms, the map to `ℝ≥0`, and the height-one slice.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{argument, structural};
use crate::lattice::linalg::{rank_int, solve_unique, to_rat, RVec};
use crate::lattice::{dot, primitive, smith_normal_form, Cone, IntMatrix};
use crate::Result;

/// A cone of the complex. The cone is full dimensional in `ℤ^rank`.
#[derive(Clone, Debug)]
pub struct Cell {
    pub id: String,
    pub cone: Cone,
}

impl Cell {
    pub fn rank(&self) -> usize {
        self.cone.rank()
    }
}

/// An embedding of `small` onto a proper face of `big`; `matrix` is
/// `rank(big) × rank(small)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceMap {
    pub small: usize,
    pub big: usize,
    pub matrix: IntMatrix,
    /// Image of each ray of `small`, as a ray index of `big`.
    ray_map: Vec<usize>,
}

impl FaceMap {
    pub fn ray_map(&self) -> &[usize] {
        &self.ray_map
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    /// Injective on the interior of each face but not on each cone.
    MonodromyFree,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    /// Faces of listed cones that no face map realizes: (cell id, rays of the face).
    pub missing_faces: Vec<(String, Vec<Vec<BigInt>>)>,
    /// Face maps whose image lattice is not saturated: (small id, big id).
    pub unsaturated: Vec<(String, String)>,
    pub simplicity: Simplicity,
    /// Human-readable reason when not simple.
    pub simplicity_witness: Option<String>,
}

impl ComplexReport {
    pub fn closed_under_faces(&self) -> bool {
        self.missing_faces.is_empty()
    }

    pub fn saturated(&self) -> bool {
        self.unsaturated.is_empty()
    }

    /// What downstream modules require.
    pub fn is_usable(&self) -> bool {
        self.closed_under_faces() && self.saturated() && self.simplicity == Simplicity::Simple
    }
}

/// A finite diagram of cones with face morphisms. Face maps are stored
/// closed under composition.
#[derive(Clone, Debug)]
pub struct ConeComplex {
    cells: Vec<Cell>,
    ids: BTreeMap<String, usize>,
    maps: Vec<FaceMap>,
    report: ComplexReport,
}

/// Raw cell description: id, lattice rank, ray generators.
pub type CellSpec = (String, usize, Vec<Vec<BigInt>>);
/// Raw face map description: small id, big id, matrix.
pub type FaceMapSpec = (String, String, IntMatrix);

impl ConeComplex {
    pub fn new(cells: &[CellSpec], face_maps: &[FaceMapSpec]) -> Result<ConeComplex> {
        let mut out_cells = Vec::new();
        let mut ids = BTreeMap::new();
        for (id, rank, rays) in cells {
            if ids.insert(id.clone(), out_cells.len()).is_some() {
                return Err(structural!("duplicate cell id {id:?}"));
            }
            let cone = Cone::new(*rank, rays).map_err(|e| structural!("cell {id:?}: {e}"))?;
            if !cone.is_full_dimensional() {
                return Err(structural!(
                    "cell {id:?} spans a {}-dimensional subspace of its rank {} lattice",
                    cone.dim(),
                    rank
                ));
            }
            out_cells.push(Cell { id: id.clone(), cone });
        }
        let lookup = |id: &String| ids.get(id).copied().ok_or_else(|| structural!("unknown cell id {id:?}"));
        let mut maps: Vec<FaceMap> = Vec::new();
        for (s, b, m) in face_maps {
            let (si, bi) = (lookup(s)?, lookup(b)?);
            if si == bi {
                return Err(structural!("face map ({s}, {b}): self-maps are not allowed"));
            }
            let fm = make_face_map(&out_cells, si, bi, m.clone())
                .map_err(|e| structural!("face map ({s}, {b}): {e}"))?;
            if !maps.contains(&fm) {
                maps.push(fm);
            }
        }
        // close under composition; ranks strictly increase so this terminates
        loop {
            let mut added = Vec::new();
            for f in &maps {
                for g in &maps {
                    if f.big != g.small {
                        continue;
                    }
                    let m = g.matrix.mul(&f.matrix);
                    let ray_map = f.ray_map.iter().map(|&i| g.ray_map[i]).collect();
                    let h = FaceMap { small: f.small, big: g.big, matrix: m, ray_map };
                    if !maps.contains(&h) && !added.contains(&h) {
                        added.push(h);
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            maps.extend(added);
        }
        maps.sort_by_key(|m| (m.small, m.big));
        let mut c = ConeComplex { cells: out_cells, ids, maps, report: dummy_report() };
        c.report = c.compute_report();
        Ok(c)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index(id).ok_or_else(|| structural!("unknown cell id {id:?}"))
    }

    pub fn id(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    /// All face maps, closed under composition.
    pub fn face_maps(&self) -> &[FaceMap] {
        &self.maps
    }

    pub fn report(&self) -> &ComplexReport {
        &self.report
    }

    /// Fails unless closed under faces, saturated and simple.
    pub fn require_usable(&self) -> Result<()> {
        let r = &self.report;
        if let Some((id, _)) = r.missing_faces.first() {
            return Err(structural!("complex is not closed under faces (cell {id:?})"));
        }
        if let Some((s, b)) = r.unsaturated.first() {
            return Err(structural!("face map ({s}, {b}) is not a saturated embedding"));
        }
        if r.simplicity != Simplicity::Simple {
            return Err(structural!(
                "complex is not simple: {}",
                r.simplicity_witness.clone().unwrap_or_default()
            ));
        }
        Ok(())
    }

    /// The embedding of `small` into `big`: the identity when equal, the
    /// unique face map otherwise. `None` when `small` is not a face of `big`.
    pub fn embedding(&self, small: usize, big: usize) -> Option<IntMatrix> {
        if small == big {
            return Some(IntMatrix::identity(self.cells[small].rank()));
        }
        self.maps.iter().find(|f| f.small == small && f.big == big).map(|f| f.matrix.clone())
    }

    pub fn is_face(&self, small: usize, big: usize) -> bool {
        small == big || self.maps.iter().any(|f| f.small == small && f.big == big)
    }

    /// Cells having `i` as a face, including `i`.
    pub fn star(&self, i: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&j| self.is_face(i, j)).collect()
    }

    /// Cells that are faces of every cell in `cells`, largest first.
    pub fn common_faces(&self, cells: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.cells.len()).filter(|&f| cells.iter().all(|&c| self.is_face(f, c))).collect();
        out.sort_by_key(|&f| core::cmp::Reverse(self.cells[f].rank()));
        out
    }

    /// Cells containing every cell in `cells` as a face, smallest first.
    pub fn common_cofaces(&self, cells: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> =
            (0..self.cells.len()).filter(|&f| cells.iter().all(|&c| self.is_face(c, f))).collect();
        out.sort_by_key(|&f| self.cells[f].rank());
        out
    }

    /// The cell realizing the face of `big` spanned by the given rays.
    fn face_cell(&self, big: usize, rays: &[usize]) -> Option<(usize, IntMatrix)> {
        if rays.len() == self.cells[big].cone.rays().len() {
            return Some((big, IntMatrix::identity(self.cells[big].rank())));
        }
        let want: BTreeSet<usize> = rays.iter().copied().collect();
        self.maps
            .iter()
            .find(|f| f.big == big && f.ray_map.iter().copied().collect::<BTreeSet<_>>() == want)
            .map(|f| (f.small, f.matrix.clone()))
    }

    /// Smallest cell containing the point `x` of cell `i`, with the point's
    /// coordinates in that cell.
    pub fn locate(&self, i: usize, x: &[BigRational]) -> Result<(usize, RVec)> {
        let cone = &self.cells[i].cone;
        if x.len() != cone.rank() {
            return Err(argument!("point of length {} in cell {:?} of rank {}", x.len(), self.id(i), cone.rank()));
        }
        let rays = cone.minimal_face_rays(x).map_err(|_| argument!("point is not in cell {:?}", self.id(i)))?;
        let (f, m) = self
            .face_cell(i, &rays)
            .ok_or_else(|| structural!("face of {:?} missing from the complex", self.id(i)))?;
        let a: Vec<RVec> = (0..m.rows()).map(|r| to_rat(&m.row(r))).collect();
        let y = solve_unique(&a, x, m.cols()).expect("point lies in the image of the face");
        Ok((f, y))
    }

    fn compute_report(&self) -> ComplexReport {
        let mut missing_faces = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            for face in c.cone.face_ray_sets() {
                if face.len() == c.cone.rays().len() {
                    continue;
                }
                if self.face_cell(i, &face).is_none() {
                    let rays = face.iter().map(|&r| c.cone.rays()[r].clone()).collect();
                    missing_faces.push((c.id.clone(), rays));
                }
            }
        }
        let mut unsaturated = Vec::new();
        for f in &self.maps {
            let s = smith_normal_form(&f.matrix);
            if s.invariants().iter().any(|d| !d.is_one()) {
                unsaturated.push((self.id(f.small).to_string(), self.id(f.big).to_string()));
            }
        }
        let (simplicity, simplicity_witness) = self.simplicity();
        ComplexReport { missing_faces, unsaturated, simplicity, simplicity_witness }
    }

    /// Follows zigzags of face maps starting from each face of each cell and
    /// records how the face comes back to its own cell.
    fn simplicity(&self) -> (Simplicity, Option<String>) {
        let mut verdict = (Simplicity::Simple, None);
        for (i, c) in self.cells.iter().enumerate() {
            for face in c.cone.face_ray_sets() {
                if face.is_empty() {
                    continue;
                }
                let mut seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
                let mut queue = VecDeque::from([(i, face.clone())]);
                while let Some((cell, rays)) = queue.pop_front() {
                    if !seen.insert((cell, rays.clone())) {
                        continue;
                    }
                    if cell == i && rays != face {
                        let same: BTreeSet<usize> = rays.iter().copied().collect();
                        let orig: BTreeSet<usize> = face.iter().copied().collect();
                        if same == orig {
                            let w = alloc::format!("a face of {:?} is glued to itself nontrivially", c.id);
                            return (Simplicity::Neither, Some(w));
                        }
                        if verdict.0 == Simplicity::Simple {
                            let w = alloc::format!("two distinct faces of {:?} are identified", c.id);
                            verdict = (Simplicity::MonodromyFree, Some(w));
                        }
                    }
                    for f in &self.maps {
                        if f.small == cell {
                            queue.push_back((f.big, rays.iter().map(|&r| f.ray_map[r]).collect()));
                        }
                        if f.big == cell {
                            let pre: Option<Vec<usize>> =
                                rays.iter().map(|&r| f.ray_map.iter().position(|&x| x == r)).collect();
                            if let Some(pre) = pre {
                                queue.push_back((f.small, pre));
                            }
                        }
                    }
                }
            }
        }
        verdict
    }
}

fn dummy_report() -> ComplexReport {
    ComplexReport {
        missing_faces: Vec::new(),
        unsaturated: Vec::new(),
        simplicity: Simplicity::Simple,
        simplicity_witness: None,
    }
}

fn make_face_map(cells: &[Cell], small: usize, big: usize, m: IntMatrix) -> Result<FaceMap> {
    let (sc, bc) = (&cells[small].cone, &cells[big].cone);
    if m.rows() != bc.rank() || m.cols() != sc.rank() {
        return Err(structural!(
            "matrix is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            bc.rank(),
            sc.rank()
        ));
    }
    if rank_int(&m.row_vecs(), m.cols()) != m.cols() {
        return Err(structural!("not injective"));
    }
    if sc.rank() >= bc.rank() {
        return Err(structural!("image is not a proper face"));
    }
    let mut ray_map = Vec::new();
    for r in sc.rays() {
        let img = primitive(&m.mul_vec(r));
        match bc.rays().iter().position(|x| *x == img) {
            Some(j) => ray_map.push(j),
            None => return Err(structural!("ray {:?} does not map to a ray", r)),
        }
    }
    let img: BTreeSet<usize> = ray_map.iter().copied().collect();
    let is_face = bc.face_ray_sets().iter().any(|f| f.iter().copied().collect::<BTreeSet<_>>() == img);
    if !is_face || img.len() != ray_map.len() {
        return Err(structural!("image is not a face"));
    }
    Ok(FaceMap { small, big, matrix: m, ray_map })
}

/// The map `ρ: Σ → ℝ≥0` as one integer covector per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMap {
    covectors: Vec<Vec<BigInt>>,
}

impl BaseMap {
    /// Checks compatibility with every face map and nonnegativity on rays.
    pub fn new(c: &ConeComplex, covectors: &BTreeMap<String, Vec<BigInt>>) -> Result<BaseMap> {
        let mut out = Vec::new();
        for cell in c.cells() {
            let v = covectors
                .get(&cell.id)
                .ok_or_else(|| structural!("base map has no covector for cell {:?}", cell.id))?;
            if v.len() != cell.rank() {
                return Err(structural!("covector for {:?} has length {}", cell.id, v.len()));
            }
            if let Some(r) = cell.cone.rays().iter().find(|r| dot(v, r).is_negative()) {
                return Err(structural!("base map is negative on ray {:?} of {:?}", r, cell.id));
            }
            out.push(v.clone());
        }
        for k in covectors.keys() {
            c.require(k)?;
        }
        for f in c.face_maps() {
            if f.matrix.vec_mul(&out[f.big]) != out[f.small] {
                return Err(structural!(
                    "base map incompatible with face map ({}, {})",
                    c.id(f.small),
                    c.id(f.big)
                ));
            }
        }
        Ok(BaseMap { covectors: out })
    }

    pub fn covector(&self, cell: usize) -> &[BigInt] {
        &self.covectors[cell]
    }

    pub fn eval(&self, cell: usize, x: &[BigRational]) -> BigRational {
        crate::lattice::linalg::rdot(&to_rat(&self.covectors[cell]), x)
    }

    /// Whether ρ vanishes identically on the cell.
    pub fn vanishes_on(&self, cell: usize) -> bool {
        self.covectors[cell].iter().all(Zero::is_zero)
    }
}

/// A cell of the height-one slice: a rational polyhedron given by vertices and
/// recession rays, in the coordinates of the originating cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCell {
    pub cone: usize,
    pub id: String,
    pub vertices: Vec<RVec>,
    pub recession: Vec<Vec<BigInt>>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyComplex {
    pub cells: Vec<PolyCell>,
    /// Face incidences between sliced cells, as indices into `cells`.
    pub faces: Vec<(usize, usize)>,
}

/// The slice `ρ⁻¹(1)`: one polyhedron per cone on which ρ is not identically 0.
pub fn slice(c: &ConeComplex, rho: &BaseMap) -> PolyComplex {
    let mut cells = Vec::new();
    let mut of_cone = BTreeMap::new();
    for (i, cell) in c.cells().iter().enumerate() {
        let w = rho.covector(i);
        let mut vertices = Vec::new();
        let mut recession = Vec::new();
        for r in cell.cone.rays() {
            let h = dot(w, r);
            if h.is_zero() {
                recession.push(r.clone());
            } else {
                let h = BigRational::from_integer(h);
                vertices.push(r.iter().map(|x| BigRational::from_integer(x.clone()) / &h).collect());
            }
        }
        if vertices.is_empty() {
            continue;
        }
        of_cone.insert(i, cells.len());
        cells.push(PolyCell { cone: i, id: cell.id.clone(), vertices, recession, dim: cell.rank() - 1 });
    }
    let faces = c
        .face_maps()
        .iter()
        .filter_map(|f| Some((*of_cone.get(&f.small)?, *of_cone.get(&f.big)?)))
        .collect();
    PolyComplex { cells, faces }
}

/// Value of ρ on the primitive generator of a ray cell.
pub fn ray_multiplicity(c: &ConeComplex, rho: &BaseMap, ray_id: &str) -> Result<BigInt> {
    let i = c.require(ray_id)?;
    let cell = c.cell(i);
    if cell.rank() != 1 {
        return Err(argument!("cell {ray_id:?} has rank {}, not a ray", cell.rank()));
    }
    Ok(dot(rho.covector(i), &cell.cone.rays()[0]))
}

/// User-declared degree groups: a free abelian group `H₂` of finite rank per
/// cell (for the closed stratum), pushforwards to the total group, and
/// pushforwards along stratum inclusions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeData {
    total_rank: usize,
    ranks: Vec<usize>,
    to_total: Vec<IntMatrix>,
    /// `(small, big) ↦ H₂(big) → H₂(small)`; the stratum of `big` lies in the
    /// closure of the stratum of `small`.
    push: BTreeMap<(usize, usize), IntMatrix>,
}

impl DegreeData {
    pub fn new(
        c: &ConeComplex,
        total_rank: usize,
        to_total: &BTreeMap<String, IntMatrix>,
        push: &[(String, String, IntMatrix)],
    ) -> Result<DegreeData> {
        let mut ranks = Vec::new();
        let mut totals = Vec::new();
        for cell in c.cells() {
            let m = to_total
                .get(&cell.id)
                .ok_or_else(|| structural!("degree data has no entry for cell {:?}", cell.id))?;
            if m.rows() != total_rank {
                return Err(structural!("pushforward of {:?} has {} rows, expected {}", cell.id, m.rows(), total_rank));
            }
            ranks.push(m.cols());
            totals.push(m.clone());
        }
        let mut pm = BTreeMap::new();
        for (s, b, m) in push {
            let (si, bi) = (c.require(s)?, c.require(b)?);
            if !c.is_face(si, bi) {
                return Err(structural!("degree pushforward ({s}, {b}) is not along a face relation"));
            }
            if m.rows() != ranks[si] || m.cols() != ranks[bi] {
                return Err(structural!("degree pushforward ({s}, {b}) has the wrong shape"));
            }
            if totals[si].mul(m) != totals[bi] {
                return Err(structural!("degree pushforward ({s}, {b}) does not commute with the total pushforward"));
            }
            pm.insert((si, bi), m.clone());
        }
        Ok(DegreeData { total_rank, ranks, to_total: totals, push: pm })
    }

    /// Every cell carries `H₂ = ℤ^rank` and all pushforwards are identities.
    pub fn uniform(c: &ConeComplex, rank: usize) -> DegreeData {
        let n = c.cells().len();
        let id = IntMatrix::identity(rank);
        let mut push = BTreeMap::new();
        for f in c.face_maps() {
            push.insert((f.small, f.big), id.clone());
        }
        DegreeData { total_rank: rank, ranks: alloc::vec![rank; n], to_total: alloc::vec![id; n], push }
    }

    pub fn total_rank(&self) -> usize {
        self.total_rank
    }

    pub fn rank(&self, cell: usize) -> usize {
        self.ranks[cell]
    }

    pub fn to_total(&self, cell: usize) -> &IntMatrix {
        &self.to_total[cell]
    }

    /// Pushforward from the stratum of `big` to the closure of the stratum of
    /// `small`.
    pub fn push(&self, small: usize, big: usize) -> Option<IntMatrix> {
        if small == big {
            return Some(IntMatrix::identity(self.ranks[small]));
        }
        self.push.get(&(small, big)).cloned()
    }
}

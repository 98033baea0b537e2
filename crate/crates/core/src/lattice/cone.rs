use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::linalg::{clear_denominators, nullspace, rank_int, rdot, to_rat, RVec};
use super::matrix::{dot, primitive, IntMatrix};
use super::snf::integer_kernel;
use crate::error::{argument, structural};
use crate::Result;

/// A strictly convex rational polyhedral cone in `ℝ^rank` with lattice `ℤ^rank`.
///
/// Stored by its sorted primitive ray generators. The inequality description
/// (facet normals chosen inside the linear span, plus a basis of the
/// orthogonal complement as equations) is computed at construction.
#[derive(Clone, Debug)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<BigInt>>,
    facets: Vec<Vec<BigInt>>,
    equations: Vec<Vec<BigInt>>,
}

impl PartialEq for Cone {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays
    }
}

impl Eq for Cone {}

/// Facet normals and equations of the cone spanned by `gens`.
///
/// The dual cone is `cone(facets) + span(equations)`.
pub(crate) struct Polar {
    pub facets: Vec<Vec<BigInt>>,
    pub equations: Vec<Vec<BigInt>>,
    pub dim: usize,
}

pub(crate) fn polar(gens: &[Vec<BigInt>], rank: usize) -> Polar {
    let gens: Vec<Vec<BigInt>> = dedup_primitive(gens);
    let equations = if gens.is_empty() {
        IntMatrix::identity(rank).row_vecs()
    } else {
        integer_kernel(&IntMatrix::from_rows(rank, &gens))
    };
    let dim = rank - equations.len();
    let mut facets: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    if dim > 0 {
        // rational basis of the span, as rows
        let span: Vec<RVec> = nullspace(&equations.iter().map(|e| to_rat(e)).collect::<Vec<_>>(), rank);
        let rgens: Vec<RVec> = gens.iter().map(|g| to_rat(g)).collect();
        for subset in subsets(gens.len(), dim - 1) {
            // y = Σ c_j span_j with ⟨g, y⟩ = 0 for g in the subset
            let rows: Vec<RVec> = subset
                .iter()
                .map(|&i| span.iter().map(|b| rdot(&rgens[i], b)).collect())
                .collect();
            let ns = nullspace(&rows, dim);
            if ns.len() != 1 {
                continue;
            }
            let mut y: RVec = alloc::vec![BigRational::zero(); rank];
            for (c, b) in ns[0].iter().zip(&span) {
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += c * bi;
                }
            }
            let y = clear_denominators(&y);
            let signs: Vec<BigInt> = gens.iter().map(|g| dot(g, &y)).collect();
            if signs.iter().all(|s| !s.is_negative()) {
                facets.insert(y);
            } else if signs.iter().all(|s| !s.is_positive()) {
                facets.insert(y.iter().map(|x| -x).collect());
            }
        }
    }
    Polar { facets: facets.into_iter().collect(), equations, dim }
}

fn dedup_primitive(gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let set: BTreeSet<Vec<BigInt>> =
        gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).map(|g| primitive(g)).collect();
    set.into_iter().collect()
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Cone {
    /// Cone spanned by `generators` in `ℝ^rank`; fails unless strictly convex.
    pub fn new(rank: usize, generators: &[Vec<BigInt>]) -> Result<Cone> {
        if let Some(g) = generators.iter().find(|g| g.len() != rank) {
            return Err(structural!("generator of length {} in a rank {} lattice", g.len(), rank));
        }
        let p = polar(generators, rank);
        if rank_int(&p.facets, rank) != p.dim {
            return Err(argument!("cone contains a line"));
        }
        let gens = dedup_primitive(generators);
        let rays: Vec<Vec<BigInt>> = gens
            .into_iter()
            .filter(|g| {
                let tight: Vec<Vec<BigInt>> =
                    p.facets.iter().filter(|f| dot(f, g).is_zero()).cloned().collect();
                rank_int(&tight, rank) + 1 == p.dim
            })
            .collect();
        Ok(Cone { rank, rays, facets: p.facets, equations: p.equations })
    }

    pub fn zero(rank: usize) -> Cone {
        Cone::new(rank, &[]).expect("zero cone")
    }

    /// The positive orthant of `ℝ^rank`.
    pub fn orthant(rank: usize) -> Cone {
        Cone::new(rank, &IntMatrix::identity(rank).row_vecs()).expect("orthant")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.rank - self.equations.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    /// Inward facet normals, chosen inside the linear span.
    pub fn facets(&self) -> &[Vec<BigInt>] {
        &self.facets
    }

    /// Basis of the orthogonal complement of the span.
    pub fn equations(&self) -> &[Vec<BigInt>] {
        &self.equations
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.contains_rat(&to_rat(x))
    }

    pub fn contains_rat(&self, x: &[BigRational]) -> bool {
        self.equations.iter().all(|e| rdot(&to_rat(e), x).is_zero())
            && self.facets.iter().all(|f| !rdot(&to_rat(f), x).is_negative())
    }

    /// Membership in the relative interior.
    pub fn relint_contains_rat(&self, x: &[BigRational]) -> bool {
        self.equations.iter().all(|e| rdot(&to_rat(e), x).is_zero())
            && self.facets.iter().all(|f| rdot(&to_rat(f), x).is_positive())
    }

    pub fn relint_contains(&self, x: &[BigInt]) -> bool {
        self.relint_contains_rat(&to_rat(x))
    }

    /// Indices of the rays spanning the smallest face containing `x`.
    pub fn minimal_face_rays(&self, x: &[BigRational]) -> Result<Vec<usize>> {
        if !self.contains_rat(x) {
            return Err(argument!("point is not in the cone"));
        }
        let tight: Vec<&Vec<BigInt>> =
            self.facets.iter().filter(|f| rdot(&to_rat(f), x).is_zero()).collect();
        Ok((0..self.rays.len())
            .filter(|&i| tight.iter().all(|f| dot(f, &self.rays[i]).is_zero()))
            .collect())
    }

    /// All faces, as sorted sets of ray indices, including `{}` and the cone itself.
    pub fn face_ray_sets(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack = alloc::vec![all];
        while let Some(face) = stack.pop() {
            if !seen.insert(face.clone()) {
                continue;
            }
            for f in &self.facets {
                let sub: Vec<usize> =
                    face.iter().copied().filter(|&i| dot(f, &self.rays[i]).is_zero()).collect();
                if sub.len() < face.len() && !seen.contains(&sub) {
                    stack.push(sub);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn faces(&self) -> Vec<Cone> {
        self.face_ray_sets()
            .iter()
            .map(|s| {
                let gens: Vec<Vec<BigInt>> = s.iter().map(|&i| self.rays[i].clone()).collect();
                Cone::new(self.rank, &gens).expect("face of a strictly convex cone")
            })
            .collect()
    }

    /// Generators of the dual cone `{m : ⟨m, σ⟩ ≥ 0}`, which contains a line
    /// unless the cone is full dimensional.
    pub fn dual_generators(&self) -> Vec<Vec<BigInt>> {
        let mut g = self.facets.clone();
        for e in &self.equations {
            g.push(e.clone());
            g.push(e.iter().map(|x| -x).collect());
        }
        g
    }

    /// Saturated basis of the lattice `span(σ) ∩ ℤ^rank`.
    pub fn lattice_basis(&self) -> Vec<Vec<BigInt>> {
        if self.equations.is_empty() {
            return IntMatrix::identity(self.rank).row_vecs();
        }
        integer_kernel(&IntMatrix::from_rows(self.rank, &self.equations))
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    /// Simplicial with rays forming a basis of `span(σ) ∩ ℤ^rank`.
    pub fn is_unimodular(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        let basis = self.lattice_basis();
        let coords = coordinates_in(&basis, &self.rays, self.rank);
        let m = IntMatrix::from_rows(self.dim(), &coords);
        m.det().abs() == BigInt::from(1)
    }
}

/// Dual cone of a strictly convex cone. The result is strictly convex only
/// when the input is full dimensional; otherwise this is an argument error and
/// [`Cone::dual_generators`] gives the generators.
pub fn dual_cone(c: &Cone) -> Result<Cone> {
    if !c.is_full_dimensional() {
        return Err(argument!(
            "dual of a {}-dimensional cone in rank {} contains a line",
            c.dim(),
            c.rank
        ));
    }
    Cone::new(c.rank, &c.facets)
}

/// Integer coordinates of each vector of `xs` in the given lattice basis.
/// Panics when a vector is not in the lattice.
pub(crate) fn coordinates_in(basis: &[Vec<BigInt>], xs: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    xs.iter()
        .map(|x| {
            let c = rational_coordinates(basis, &to_rat(x), rank).expect("vector outside the span");
            c.iter()
                .map(|q| {
                    assert!(q.is_integer(), "vector outside the lattice");
                    q.to_integer()
                })
                .collect()
        })
        .collect()
}

pub(crate) fn rational_coordinates(basis: &[Vec<BigInt>], x: &[BigRational], rank: usize) -> Option<RVec> {
    let cols = basis.len();
    let a: Vec<RVec> = (0..rank).map(|i| basis.iter().map(|b| BigRational::from_integer(b[i].clone())).collect()).collect();
    super::linalg::solve_unique(&a, x, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::ivec;
    use proptest::prelude::*;

    fn rays(c: &Cone) -> Vec<Vec<i64>> {
        c.rays().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), alloc::vec![Vec::<usize>::new()]);
        assert_eq!(subsets(3, 3).len(), 1);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn quadrant_self_dual() {
        let q = Cone::orthant(2);
        assert_eq!(dual_cone(&q).unwrap(), q);
        assert_eq!(q.face_ray_sets().len(), 4);
    }

    #[test]
    fn ray_dual_is_halfplane() {
        let r = Cone::new(2, &[ivec(&[1, 0])]).unwrap();
        assert!(dual_cone(&r).is_err());
        let mut g = r.dual_generators();
        g.sort();
        let mut want = alloc::vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[0, -1])];
        want.sort();
        assert_eq!(g, want);
    }

    #[test]
    fn dual_of_skew_cone() {
        let c = Cone::new(2, &[ivec(&[1, 0]), ivec(&[1, 2])]).unwrap();
        let d = dual_cone(&c).unwrap();
        assert_eq!(rays(&d), alloc::vec![alloc::vec![0, 1], alloc::vec![2, -1]]);
        // lattice points of a box: nonnegative pairing with c exactly when in d
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let m = ivec(&[x, y]);
                let nonneg = c.rays().iter().all(|r| !dot(r, &m).is_negative());
                assert_eq!(nonneg, d.contains(&m));
            }
        }
    }

    #[test]
    fn non_strictly_convex_rejected() {
        assert!(Cone::new(2, &[ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1])]).is_err());
    }

    #[test]
    fn redundant_generators_dropped() {
        let c = Cone::new(3, &[ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[2, 2, 0]), ivec(&[0, 0, 1])]).unwrap();
        assert_eq!(c.rays().len(), 3);
        assert_eq!(c.faces().len(), 8);
        let x = to_rat(&ivec(&[1, 1, 0]));
        assert_eq!(c.minimal_face_rays(&x).unwrap().len(), 2);
    }

    #[test]
    fn lower_dimensional() {
        let c = Cone::new(3, &[ivec(&[1, 1, 0]), ivec(&[0, 1, 1])]).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&ivec(&[1, 2, 1])));
        assert!(!c.contains(&ivec(&[1, 2, 2])));
        assert!(c.relint_contains(&ivec(&[1, 2, 1])));
        assert!(!c.relint_contains(&ivec(&[1, 1, 0])));
        assert!(c.is_unimodular());
    }

    fn cone_2d() -> impl Strategy<Value = Vec<Vec<BigInt>>> {
        // rays in the open upper half plane, hence strictly convex
        proptest::collection::vec((-5i64..=5, 1i64..=5), 1..5)
            .prop_map(|v| v.into_iter().map(|(a, b)| ivec(&[a, b])).collect())
    }

    fn cone_3d() -> impl Strategy<Value = Vec<Vec<BigInt>>> {
        proptest::collection::vec((-3i64..=3, -3i64..=3, 1i64..=3), 3..6)
            .prop_map(|v| v.into_iter().map(|(a, b, c)| ivec(&[a, b, c])).collect())
    }

    proptest! {
        #[test]
        fn double_dual_2d(g in cone_2d()) {
            let c = Cone::new(2, &g).unwrap();
            if c.is_full_dimensional() {
                let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
                prop_assert_eq!(dd, c);
            }
        }

        #[test]
        fn double_dual_3d(g in cone_3d()) {
            let c = Cone::new(3, &g).unwrap();
            if c.is_full_dimensional() {
                let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
                prop_assert_eq!(dd, c);
            }
        }

        #[test]
        fn generators_inside(g in cone_3d()) {
            let c = Cone::new(3, &g).unwrap();
            for x in &g {
                prop_assert!(c.contains(x));
            }
            for r in c.rays() {
                prop_assert!(g.iter().any(|x| primitive(x) == *r));
            }
        }
    }
}

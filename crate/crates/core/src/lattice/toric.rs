use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::cone::{coordinates_in, dual_cone, Cone};
use super::matrix::{dot, IntMatrix};
use super::snf::span_basis;
use crate::error::{argument, capability, structural};
use crate::Result;

/// Largest cone dimension handled by lattice-point enumeration.
pub const HILBERT_RANK_CAP: usize = 3;
/// Largest number of box points scanned by the enumeration.
const BOX_CAP: u64 = 4_000_000;

/// Hilbert basis of `σ ∩ ℤ^rank`, sorted.
///
/// Unimodular cones of any dimension return their rays. Otherwise the cone is
/// rewritten in a basis of `span(σ) ∩ ℤ^rank` and, if its dimension is at most
/// [`HILBERT_RANK_CAP`], the zonotope spanned by the rays is scanned.
pub fn hilbert_basis(c: &Cone) -> Result<Vec<Vec<BigInt>>> {
    if c.is_unimodular() {
        return Ok(c.rays().to_vec());
    }
    let d = c.dim();
    if d > HILBERT_RANK_CAP {
        return Err(capability!(
            "Hilbert basis of a non-unimodular cone of dimension {} (cap {})",
            d,
            HILBERT_RANK_CAP
        ));
    }
    let basis = c.lattice_basis();
    let rays = coordinates_in(&basis, c.rays(), c.rank());
    let local = Cone::new(d, &rays)?;
    let hb = full_dim_hilbert_basis(&local)?;
    let emb = IntMatrix::from_cols(c.rank(), &basis);
    let mut out: Vec<Vec<BigInt>> = hb.iter().map(|h| emb.mul_vec(h)).collect();
    out.sort();
    Ok(out)
}

fn full_dim_hilbert_basis(c: &Cone) -> Result<Vec<Vec<BigInt>>> {
    let d = c.rank();
    let mut lo = vec![BigInt::zero(); d];
    let mut hi = vec![BigInt::zero(); d];
    for r in c.rays() {
        for i in 0..d {
            if r[i].is_negative() {
                lo[i] += &r[i];
            } else {
                hi[i] += &r[i];
            }
        }
    }
    let mut volume: u64 = 1;
    for i in 0..d {
        let side = (&hi[i] - &lo[i] + 1u32).to_u64().unwrap_or(u64::MAX);
        volume = volume.saturating_mul(side);
    }
    if volume > BOX_CAP {
        return Err(capability!("Hilbert basis enumeration box of {} points exceeds cap", volume));
    }
    // grading strictly positive on σ ∖ {0}
    let grading: Vec<BigInt> = (0..d).map(|i| c.facets().iter().map(|f| &f[i]).sum()).collect();
    let mut candidates: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut x = lo.clone();
    loop {
        if x.iter().any(|v| !v.is_zero()) && c.contains(&x) {
            candidates.push((dot(&grading, &x), x.clone()));
        }
        let mut i = 0;
        loop {
            if i == d {
                candidates.sort();
                let mut hb: Vec<Vec<BigInt>> = Vec::new();
                for (_, x) in candidates {
                    let reducible = hb.iter().any(|h| {
                        let diff: Vec<BigInt> = x.iter().zip(h).map(|(a, b)| a - b).collect();
                        c.contains(&diff)
                    });
                    if !reducible {
                        hb.push(x);
                    }
                }
                return Ok(hb);
            }
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i].clone();
            i += 1;
        }
    }
}

/// A fine, saturated, sharp monoid `P = σ ∩ ℤ^rank` given by its Hilbert basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricMonoid {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
}

impl ToricMonoid {
    pub fn from_cone(c: &Cone) -> Result<ToricMonoid> {
        Ok(ToricMonoid { rank: c.rank(), generators: hilbert_basis(c)? })
    }

    /// `ℕ^n`.
    pub fn free(n: usize) -> ToricMonoid {
        let mut generators = IntMatrix::identity(n).row_vecs();
        generators.sort();
        ToricMonoid { rank: n, generators }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn cone(&self) -> Cone {
        Cone::new(self.rank, &self.generators).expect("toric monoid cone")
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.rank && self.cone().contains(x)
    }

    /// Isomorphic to `ℕ^k` for some `k`.
    pub fn is_free(&self) -> bool {
        self.cone().is_unimodular()
    }

    /// `P ∩ (−P) = {0}`; always true for monoids built here, checked directly.
    pub fn is_sharp(&self) -> bool {
        let c = self.cone();
        self.generators.iter().all(|g| {
            let neg: Vec<BigInt> = g.iter().map(|x| -x).collect();
            !c.contains(&neg)
        })
    }
}

/// A homomorphism of toric monoids given by an integer matrix acting on
/// column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    pub matrix: IntMatrix,
}

impl MonoidHom {
    /// Checks that every Hilbert basis element of `source` lands in `target`.
    pub fn new(matrix: IntMatrix, source: &ToricMonoid, target: &ToricMonoid) -> Result<MonoidHom> {
        if matrix.cols() != source.rank() || matrix.rows() != target.rank() {
            return Err(structural!(
                "{}x{} matrix cannot map rank {} to rank {}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            ));
        }
        let tc = target.cone();
        for g in source.generators() {
            if !tc.contains(&matrix.mul_vec(g)) {
                return Err(argument!("generator {:?} does not map into the target monoid", g));
            }
        }
        Ok(MonoidHom { matrix })
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }
}

/// Saturation of the monoid generated by `generators` inside its own
/// groupification: the lattice points of `gp` lying in the real cone.
///
/// Returns the monoid in coordinates of a basis of `gp`, together with the
/// embedding (columns = that basis) into `ℤ^rank`.
pub fn saturation(generators: &[Vec<BigInt>], rank: usize) -> Result<(ToricMonoid, IntMatrix)> {
    if let Some(g) = generators.iter().find(|g| g.len() != rank) {
        return Err(structural!("generator of length {} in rank {}", g.len(), rank));
    }
    let basis = span_basis(generators, rank);
    let local = coordinates_in(&basis, generators, rank);
    let cone = Cone::new(basis.len(), &local)?;
    let m = ToricMonoid::from_cone(&cone)?;
    let emb = if basis.is_empty() { IntMatrix::zeros(rank, 0) } else { IntMatrix::from_cols(rank, &basis) };
    Ok((m, emb))
}

/// The monoid `cone(generators) ∩ ℤ^rank`.
pub fn normalization(generators: &[Vec<BigInt>], rank: usize) -> Result<ToricMonoid> {
    ToricMonoid::from_cone(&Cone::new(rank, generators)?)
}

/// `P^∨ = Hom(P, ℕ)` in dual coordinates. `P` must have full rank so that the
/// dual is sharp.
pub fn monoid_dual(p: &ToricMonoid) -> Result<ToricMonoid> {
    let c = p.cone();
    let d = dual_cone(&c)?;
    ToricMonoid::from_cone(&d)
}

/// Distinct sorted vectors; used when comparing generator lists.
pub fn vector_set(xs: &[Vec<BigInt>]) -> BTreeSet<Vec<BigInt>> {
    xs.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::ivec;
    use num_rational::BigRational;
    use proptest::prelude::*;

    /// Irreducible lattice points of `c` found by brute force in a box.
    fn brute_hilbert(c: &Cone, bound: i64) -> BTreeSet<Vec<BigInt>> {
        let d = c.rank();
        let mut pts: Vec<Vec<BigInt>> = Vec::new();
        let mut x = vec![-bound; d];
        loop {
            let v = ivec(&x);
            if x.iter().any(|&a| a != 0) && c.contains(&v) {
                pts.push(v);
            }
            let mut i = 0;
            while i < d && x[i] == bound {
                x[i] = -bound;
                i += 1;
            }
            if i == d {
                break;
            }
            x[i] += 1;
        }
        pts.iter()
            .filter(|p| {
                !pts.iter().any(|q| {
                    let diff: Vec<BigInt> = p.iter().zip(q.iter()).map(|(a, b)| a - b).collect();
                    *q != **p && c.contains(&diff)
                })
            })
            .cloned()
            .collect()
    }

    #[test]
    fn quadrant_and_line() {
        assert_eq!(monoid_dual(&ToricMonoid::free(2)).unwrap(), ToricMonoid::free(2));
        assert_eq!(monoid_dual(&ToricMonoid::free(1)).unwrap(), ToricMonoid::free(1));
    }

    #[test]
    fn a1_singularity() {
        let c = Cone::new(2, &[ivec(&[1, 0]), ivec(&[1, 2])]).unwrap();
        let hb = hilbert_basis(&c).unwrap();
        assert_eq!(vector_set(&hb), brute_hilbert(&c, 3));
        assert_eq!(hb.len(), 3);
    }

    #[test]
    fn saturation_in_group() {
        let gens = [ivec(&[2, 0]), ivec(&[1, 1]), ivec(&[0, 2])];
        let (m, emb) = saturation(&gens, 2).unwrap();
        // the group has index 2 in ℤ² and the three generators already
        // saturate it, so the image is {(a, b) ≥ 0 : a + b even}
        assert_eq!(m.generators().len(), 3);
        let img: BTreeSet<Vec<BigInt>> = m.generators().iter().map(|g| emb.mul_vec(g)).collect();
        assert_eq!(img, vector_set(&gens));
        // its dual is again an A1 singularity; in the rational dual coordinates
        // of ℤ² the generators are (1,0), (0,1) and (1/2,1/2)
        let dual = monoid_dual(&m).unwrap();
        assert_eq!(dual.generators().len(), 3);
        let half = BigRational::new(1.into(), 2.into());
        let inv_t = invert_transpose_2x2(&emb);
        let mut got: Vec<Vec<BigRational>> =
            dual.generators().iter().map(|g| apply_rat(&inv_t, g)).collect();
        got.sort();
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::zero();
        let mut want = vec![vec![one.clone(), zero.clone()], vec![zero, one], vec![half.clone(), half]];
        want.sort();
        assert_eq!(got, want);
    }

    fn invert_transpose_2x2(m: &IntMatrix) -> [[BigRational; 2]; 2] {
        let det = BigRational::from_integer(m.det());
        let e = |i, j| BigRational::from_integer(m[(i, j)].clone()) / &det;
        // (Mᵗ)⁻¹ = adj(Mᵗ) / det
        [[e(1, 1), -e(1, 0)], [-e(0, 1), e(0, 0)]]
    }

    fn apply_rat(m: &[[BigRational; 2]; 2], v: &[BigInt]) -> Vec<BigRational> {
        (0..2)
            .map(|i| (0..2).map(|j| &m[i][j] * BigRational::from_integer(v[j].clone())).sum())
            .collect()
    }

    #[test]
    fn normalization_examples() {
        let n = normalization(&[ivec(&[2, 0]), ivec(&[1, 1]), ivec(&[0, 2])], 2).unwrap();
        assert_eq!(n, ToricMonoid::free(2));
        let n = normalization(&[ivec(&[3]), ivec(&[5])], 1).unwrap();
        assert_eq!(n, ToricMonoid::free(1));
        // ⟨3,5⟩ has gaps 1,2,4,7 but its cone is all of ℝ≥0
        let (s, emb) = saturation(&[ivec(&[3]), ivec(&[5])], 1).unwrap();
        assert_eq!(s, ToricMonoid::free(1));
        assert_eq!(emb.det().abs(), BigInt::from(1));
    }

    #[test]
    fn rank_cap() {
        let c = Cone::new(4, &[ivec(&[1, 0, 0, 0]), ivec(&[0, 1, 0, 0]), ivec(&[0, 0, 1, 0]), ivec(&[1, 1, 1, 2])]).unwrap();
        assert!(matches!(hilbert_basis(&c), Err(crate::Error::Capability(_))));
        assert_eq!(hilbert_basis(&Cone::orthant(5)).unwrap().len(), 5);
    }

    #[test]
    fn hom_checked() {
        let p = ToricMonoid::free(2);
        let q = ToricMonoid::free(1);
        assert!(MonoidHom::new(IntMatrix::from_i64(1, 2, &[1, 2]), &p, &q).is_ok());
        assert!(MonoidHom::new(IntMatrix::from_i64(1, 2, &[1, -1]), &p, &q).is_err());
    }

    proptest! {
        #[test]
        fn hilbert_2d_matches_brute(a in -3i64..=3, b in 1i64..=3, c in -3i64..=3, d in 1i64..=3) {
            prop_assume!(a * d - b * c != 0);
            let cone = Cone::new(2, &[ivec(&[a, b]), ivec(&[c, d])]).unwrap();
            let hb = hilbert_basis(&cone).unwrap();
            prop_assert_eq!(vector_set(&hb), brute_hilbert(&cone, 7));
        }

        #[test]
        fn hilbert_3d_matches_brute(v in proptest::collection::vec((-1i64..=1, -1i64..=1, 1i64..=2), 3..5)) {
            let gens: Vec<Vec<BigInt>> = v.into_iter().map(|(a, b, c)| ivec(&[a, b, c])).collect();
            let cone = Cone::new(3, &gens).unwrap();
            prop_assume!(cone.is_full_dimensional());
            let hb = hilbert_basis(&cone).unwrap();
            prop_assert_eq!(vector_set(&hb), brute_hilbert(&cone, 6));
        }

        #[test]
        fn double_dual_monoid(a in -3i64..=3, b in 1i64..=3, c in -3i64..=3, d in 1i64..=3) {
            prop_assume!(a * d - b * c != 0);
            let p = ToricMonoid::from_cone(&Cone::new(2, &[ivec(&[a, b]), ivec(&[c, d])]).unwrap()).unwrap();
            let pdd = monoid_dual(&monoid_dual(&p).unwrap()).unwrap();
            prop_assert_eq!(pdd, p);
        }
    }
}

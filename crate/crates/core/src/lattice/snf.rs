use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Smith normal form `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn invariants(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..c {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_in_cross(&a, t);
                a.swap_rows(t, pi);
                u.swap_rows(t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // row and column are clear; enforce divisibility of the rest
            let p = a[(t, t)].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a[(i, j)].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    a.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.neg_row(t);
            u.neg_row(t);
        }
    }
    Snf { u, d: a, v }
}

fn min_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            if a[(i, j)].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let consider = |i: usize, j: usize, best: &mut (usize, usize)| {
        let x = &a[(i, j)];
        if !x.is_zero() && (a[*best].is_zero() || x.abs() < a[*best].abs()) {
            *best = (i, j);
        }
    };
    for i in t..a.rows() {
        consider(i, t, &mut best);
    }
    for j in t..a.cols() {
        consider(t, j, &mut best);
    }
    best
}

/// Index of a sublattice: finite, or infinite when the generators do not span
/// a full-rank sublattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

/// Index of the sublattice spanned by `generators` inside `ℤ^rank`.
pub fn sublattice_index(generators: &[Vec<BigInt>], rank: usize) -> LatticeIndex {
    if rank == 0 {
        return LatticeIndex::Finite(BigInt::one());
    }
    if generators.is_empty() {
        return LatticeIndex::Infinite;
    }
    let m = IntMatrix::from_cols(rank, generators);
    let s = smith_normal_form(&m);
    let inv = s.invariants();
    if inv.len() < rank {
        return LatticeIndex::Infinite;
    }
    LatticeIndex::Finite(inv.iter().product())
}

/// A basis of the saturated kernel `{x ∈ ℤ^cols : m x = 0}`, as vectors.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let r = s.rank();
    (r..m.cols()).map(|j| s.v.col(j)).collect()
}

/// A basis of the ℤ-span of `generators` in `ℤ^rank`.
pub fn span_basis(generators: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_cols(rank, generators);
    let s = smith_normal_form(&m);
    // m V = U⁻¹ D, so the span is generated by d_i times the columns of U⁻¹
    let uinv = unimodular_inverse(&s.u);
    let inv = s.invariants();
    inv.iter()
        .enumerate()
        .map(|(i, d)| uinv.col(i).iter().map(|x| x * d).collect())
        .collect()
}

/// Inverse of a unimodular matrix, computed through its adjugate.
pub fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    let n = u.rows();
    let det = u.det();
    assert!(det.abs().is_one(), "matrix is not unimodular");
    let mut inv = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = minor(u, j, i).det();
            let sign = if (i + j) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            inv[(i, j)] = sign * minor * &det;
        }
    }
    inv
}

fn minor(m: &IntMatrix, skip_r: usize, skip_c: usize) -> IntMatrix {
    let n = m.rows();
    let mut out = IntMatrix::zeros(n - 1, n - 1);
    for (oi, i) in (0..n).filter(|&i| i != skip_r).enumerate() {
        for (oj, j) in (0..n).filter(|&j| j != skip_c).enumerate() {
            out[(oi, oj)] = m[(i, j)].clone();
        }
    }
    out
}

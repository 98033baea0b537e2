//! Exact linear algebra over ℚ.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type RVec = Vec<BigRational>;

pub fn to_rat(v: &[BigInt]) -> RVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    assert_eq!(a.len(), b.len());
    let mut s = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [RVec], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[RVec], cols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, cols).len()
}

pub fn rank_int(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let m: Vec<RVec> = rows.iter().map(|r| to_rat(r)).collect();
    rank(&m, cols)
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[RVec], cols: usize) -> Vec<RVec> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn nullspace_int(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let m: Vec<RVec> = rows.iter().map(|r| to_rat(r)).collect();
    nullspace(&m, cols).iter().map(|v| clear_denominators(v)).collect()
}

/// Affine solution set of `a x = b`: a particular solution and a basis of
/// the directions, or `None` when inconsistent.
pub fn solve_affine(a: &[RVec], b: &[BigRational], cols: usize) -> Option<(RVec, Vec<RVec>)> {
    assert_eq!(a.len(), b.len());
    let mut m: Vec<RVec> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = m[i][cols].clone();
    }
    Some((x, nullspace(a, cols)))
}

/// Unique solution of a square or overdetermined consistent system.
pub fn solve_unique(a: &[RVec], b: &[BigRational], cols: usize) -> Option<RVec> {
    match solve_affine(a, b, cols) {
        Some((x, dirs)) if dirs.is_empty() => Some(x),
        _ => None,
    }
}

/// Smallest positive integer multiple, made primitive.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    super::matrix::primitive(&ints)
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

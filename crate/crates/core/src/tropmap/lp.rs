//! Feasibility of systems of strict and weak linear inequalities, by an exact
//! two-phase simplex method with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::linalg::{rdot, RVec};

/// `coeffs · t > rhs`, or `≥` when not strict.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Ineq {
    pub coeffs: RVec,
    pub rhs: BigRational,
    pub strict: bool,
}

impl Ineq {
    pub fn gt(coeffs: RVec, rhs: BigRational) -> Ineq {
        Ineq { coeffs, rhs, strict: true }
    }

    pub fn ge(coeffs: RVec, rhs: BigRational) -> Ineq {
        Ineq { coeffs, rhs, strict: false }
    }

    fn holds(&self, t: &[BigRational]) -> bool {
        let v = rdot(&self.coeffs, t);
        if self.strict { v > self.rhs } else { v >= self.rhs }
    }
}

/// Rows `Σ a_j x_j = b` with the last entry the right-hand side, `x ≥ 0`.
struct Tableau {
    rows: Vec<RVec>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pr = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pr) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj · x` using only the first `allowed` columns as entering
    /// variables. Returns `false` when unbounded.
    fn maximize(&mut self, obj: &[BigRational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = obj[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !obj[b].is_zero() {
                        d -= &obj[b] * &row[j];
                    }
                }
                d.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[j];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else { return false };
            self.pivot(i, j);
        }
    }

    fn value(&self, j: usize) -> BigRational {
        self.basis.iter().position(|&b| b == j).map_or_else(BigRational::zero, |i| self.rows[i][self.cols].clone())
    }
}

/// Maximizes `obj · x` subject to `A x ≤ b`, `x ≥ 0`. `None` when infeasible;
/// the objective must be bounded on the polyhedron.
fn maximize(a: &[RVec], b: &[BigRational], obj: &[BigRational]) -> Option<RVec> {
    let (m, n) = (a.len(), obj.len());
    let arts: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let cols = n + m + arts.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![BigRational::zero(); cols + 1];
        let sign = if b[i].is_negative() { -BigRational::one() } else { BigRational::one() };
        for j in 0..n {
            row[j] = &a[i][j] * &sign;
        }
        row[n + i] = sign.clone();
        row[cols] = &b[i] * &sign;
        match arts.iter().position(|&k| k == i) {
            Some(k) => {
                row[n + m + k] = BigRational::one();
                basis.push(n + m + k);
            }
            None => basis.push(n + i),
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, cols };
    if !arts.is_empty() {
        let mut phase1 = vec![BigRational::zero(); cols];
        for k in 0..arts.len() {
            phase1[n + m + k] = -BigRational::one();
        }
        t.maximize(&phase1, cols);
        if (0..arts.len()).any(|k| !t.value(n + m + k).is_zero()) {
            return None;
        }
        // drive the remaining (zero) artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let mut full = obj.to_vec();
    full.resize(cols, BigRational::zero());
    let bounded = t.maximize(&full, n + m);
    debug_assert!(bounded, "objective is bounded by construction");
    Some((0..n).map(|j| t.value(j)).collect())
}

/// A point satisfying every inequality, or `None` when there is none.
pub(crate) fn feasible_point(sys: &[Ineq], vars: usize) -> Option<RVec> {
    // variables t⁺, t⁻ and a common slack s ≤ 1 for the strict rows:
    // −a·t⁺ + a·t⁻ + [strict]·s ≤ −rhs
    let n = 2 * vars + 1;
    let mut a = Vec::with_capacity(sys.len() + 1);
    let mut b = Vec::with_capacity(sys.len() + 1);
    for s in sys {
        let mut row = vec![BigRational::zero(); n];
        for (j, c) in s.coeffs.iter().enumerate() {
            row[j] = -c;
            row[vars + j] = c.clone();
        }
        if s.strict {
            row[2 * vars] = BigRational::one();
        }
        a.push(row);
        b.push(-&s.rhs);
    }
    let mut cap = vec![BigRational::zero(); n];
    cap[2 * vars] = BigRational::one();
    a.push(cap.clone());
    b.push(BigRational::one());
    let x = maximize(&a, &b, &cap)?;
    if sys.iter().any(|s| s.strict) && x[2 * vars].is_zero() {
        return None;
    }
    let t: RVec = (0..vars).map(|j| &x[j] - &x[vars + j]).collect();
    debug_assert!(sys.iter().all(|s| s.holds(&t)));
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ivec, linalg::to_rat};
    use proptest::prelude::*;

    fn s(c: &[i64], r: i64) -> Ineq {
        Ineq::gt(to_rat(&ivec(c)), BigRational::from_integer(r.into()))
    }

    #[test]
    fn open_interval() {
        assert!(feasible_point(&[s(&[1], 0), s(&[-1], -1)], 1).is_some());
        assert!(feasible_point(&[s(&[1], 0), s(&[-1], 0)], 1).is_none());
        // x > 0, y > 0, x + y < 1
        assert!(feasible_point(&[s(&[1, 0], 0), s(&[0, 1], 0), s(&[-1, -1], -1)], 2).is_some());
        assert!(feasible_point(&[s(&[0, 0], 0)], 2).is_none());
        // x ≥ 0, −x ≥ 0 has the single point 0
        let w = |c: &[i64]| Ineq::ge(to_rat(&ivec(c)), BigRational::zero());
        assert_eq!(feasible_point(&[w(&[1]), w(&[-1])], 1), Some(vec![BigRational::zero()]));
        assert!(feasible_point(&[w(&[1]), w(&[-1]), s(&[1], 0)], 1).is_none());
        assert_eq!(feasible_point(&[], 2), Some(vec![BigRational::zero(); 2]));
    }

    #[test]
    fn long_chain_of_open_conditions() {
        // 0 < x₀ < x₁ < … < x₁₁ < 1
        let n = 12;
        let mut sys = vec![s(&[1], 0)];
        sys[0].coeffs.resize(n, BigRational::zero());
        for i in 0..n - 1 {
            let mut c = vec![0; n];
            c[i + 1] = 1;
            c[i] = -1;
            sys.push(s(&c, 0));
        }
        let mut c = vec![0; n];
        c[n - 1] = -1;
        sys.push(s(&c, -1));
        let t = feasible_point(&sys, n).unwrap();
        assert!(sys.iter().all(|q| q.holds(&t)));
        sys.push(s(&{ let mut c = vec![0; n]; c[0] = -1; c[n - 1] = 1; c }, 1));
        assert!(feasible_point(&sys, n).is_none());
    }

    proptest! {
        // Compared against a grid search over points with denominator 4.
        #[test]
        fn agrees_with_grid(rows in proptest::collection::vec((-2i64..=2, -2i64..=2, -3i64..=3, any::<bool>()), 1..6)) {
            let sys: Vec<Ineq> = rows
                .iter()
                .map(|&(a, b, r, strict)| Ineq { strict, ..s(&[a, b], r) })
                .collect();
            let found = feasible_point(&sys, 2);
            if let Some(t) = &found {
                prop_assert!(sys.iter().all(|q| q.holds(t)));
            }
            let mut grid = false;
            for x in -40i64..=40 {
                for y in -40i64..=40 {
                    let t = vec![BigRational::new(x.into(), 4.into()), BigRational::new(y.into(), 4.into())];
                    if sys.iter().all(|q| q.holds(&t)) {
                        grid = true;
                    }
                }
            }
            if grid {
                prop_assert!(found.is_some());
            }
        }
    }
}

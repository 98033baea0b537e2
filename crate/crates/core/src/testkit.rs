//! Complexes shared by unit tests.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::complex::{BaseMap, ConeComplex, DegreeData};
use crate::lattice::IntMatrix;

/// A complex of orthants: each cell lists its rays, its chart has those rays
/// as basis, and face maps are the subset inclusions.
pub(crate) fn orthants(cells: &[(&str, &[&str])]) -> ConeComplex {
    let specs: Vec<_> = cells
        .iter()
        .map(|(id, rays)| {
            let n = rays.len();
            let gens = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
            (id.to_string(), n, gens)
        })
        .collect();
    let mut maps = Vec::new();
    for (s, sr) in cells {
        for (b, br) in cells {
            if sr.len() < br.len() && sr.iter().all(|r| br.contains(r)) {
                let mut m = IntMatrix::zeros(br.len(), sr.len());
                for (j, r) in sr.iter().enumerate() {
                    let i = br.iter().position(|x| x == r).unwrap();
                    m[(i, j)] = BigInt::from(1);
                }
                maps.push((s.to_string(), b.to_string(), m));
            }
        }
    }
    ConeComplex::new(&specs, &maps).unwrap()
}

/// The base map taking the given value on each named ray.
pub(crate) fn ray_base(c: &ConeComplex, cells: &[(&str, &[&str])], values: &[(&str, i64)]) -> BaseMap {
    let val: BTreeMap<&str, i64> = values.iter().copied().collect();
    let m: BTreeMap<String, Vec<BigInt>> = cells
        .iter()
        .map(|(id, rays)| (id.to_string(), rays.iter().map(|r| BigInt::from(val[r])).collect()))
        .collect();
    BaseMap::new(c, &m).unwrap()
}

/// `ℝ²≥0` with rays `x`, `y`.
pub(crate) const QUADRANT: &[(&str, &[&str])] = &[("O", &[]), ("x", &["x"]), ("y", &["y"]), ("Q", &["x", "y"])];

/// `ℝ³≥0`; its slice under the sum of coordinates is the standard triangle.
pub(crate) const SIMPLEX: &[(&str, &[&str])] = &[
    ("O", &[]),
    ("r1", &["e1"]),
    ("r2", &["e2"]),
    ("r3", &["e3"]),
    ("f12", &["e1", "e2"]),
    ("f13", &["e1", "e3"]),
    ("f23", &["e2", "e3"]),
    ("T", &["e1", "e2", "e3"]),
];

/// The star subdivision of `ℝ³≥0` at `w = e1 + e2 + e3`.
pub(crate) const STAR: &[(&str, &[&str])] = &[
    ("O", &[]),
    ("r1", &["e1"]),
    ("r2", &["e2"]),
    ("r3", &["e3"]),
    ("rw", &["w"]),
    ("f12", &["e1", "e2"]),
    ("f13", &["e1", "e3"]),
    ("f23", &["e2", "e3"]),
    ("g1", &["e1", "w"]),
    ("g2", &["e2", "w"]),
    ("g3", &["e3", "w"]),
    ("T12", &["e1", "e2", "w"]),
    ("T13", &["e1", "e3", "w"]),
    ("T23", &["e2", "e3", "w"]),
];

/// `Σ(Y) × ℝ≥0` for `Y = 𝔽₂` with divisor `f₀ + C∞ + f∞`; `h` is the base
/// direction.
pub(crate) const F2: &[(&str, &[&str])] = &[
    ("o", &[]),
    ("f0", &["f0"]),
    ("ci", &["ci"]),
    ("fi", &["fi"]),
    ("q0", &["f0", "ci"]),
    ("q1", &["ci", "fi"]),
    ("h", &["h"]),
    ("f0h", &["f0", "h"]),
    ("cih", &["ci", "h"]),
    ("fih", &["fi", "h"]),
    ("q0h", &["f0", "ci", "h"]),
    ("q1h", &["ci", "fi", "h"]),
];

/// Degree data for [`F2`] in the basis `(f, C₀)` of `H₂(𝔽₂)`.
pub(crate) fn f2_degrees(c: &ConeComplex) -> DegreeData {
    let col = |xs: &[i64]| IntMatrix::from_i64(2, xs.len() / 2, xs);
    let mut m = BTreeMap::new();
    for cell in c.cells() {
        let id = cell.id.as_str();
        let x = match id {
            "o" | "h" => IntMatrix::identity(2),
            "f0" | "fi" | "f0h" | "fih" => col(&[1, 0]),
            "ci" | "cih" => col(&[2, 1]),
            _ => IntMatrix::zeros(2, 0),
        };
        m.insert(id.to_string(), x);
    }
    DegreeData::new(c, 2, &m, &[]).unwrap()
}

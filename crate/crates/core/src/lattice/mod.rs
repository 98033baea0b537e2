//! Integer and rational linear algebra: matrices, Smith normal form, cones,
//! duality and toric monoids.

mod cone;
pub mod linalg;
mod matrix;
mod snf;
mod toric;

pub use cone::{dual_cone, Cone};
pub use matrix::{dot, integral_length, ivec, primitive, IntMatrix};
pub use snf::{integer_kernel, smith_normal_form, span_basis, sublattice_index, unimodular_inverse, LatticeIndex, Snf};
pub use toric::{
    hilbert_basis, monoid_dual, normalization, saturation, vector_set, MonoidHom, ToricMonoid, HILBERT_RANK_CAP,
};

/// `ℤ^rank`, the lattice `N` of a cone or the dual lattice `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub rank: usize,
}

//! Exact rational arithmetic and integer-lattice linear algebra.

mod lattice;
mod mat;
mod normal;
mod rat;

pub use lattice::{
    lattice_basis, lattice_eq, lattice_intersect, lattice_member, q_coordinates, q_rank, right_nullspace, rref,
    solve_echelon, span_intersection,
};
pub use mat::{IntMat, JsonInt};
pub use normal::{det, hnf, is_unimodular, left_kernel, rank, snf, SnfResult};
pub use rat::{int_at, int_vec_cmp, Int, Rat, RatVec};

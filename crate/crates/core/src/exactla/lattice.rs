//! Integer lattices spanned by rational vectors, plus the rational linear algebra
//! the group backends need (spans, coordinates, complements).

use num_integer::Integer;
use num_traits::{One, Zero};

use super::mat::IntMat;
use super::normal::{hnf, left_kernel};
use super::rat::{Int, Rat, RatVec};
use crate::error::{Error, Result};

fn check_dims<'a>(vs: impl IntoIterator<Item = &'a RatVec>, dim: usize) -> Result<()> {
    for v in vs {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

fn common_denominator<'a>(vs: impl IntoIterator<Item = &'a RatVec>) -> Int {
    vs.into_iter().fold(Int::one(), |acc, v| acc.lcm(&v.denominator()))
}

fn scaled_rows(vs: &[RatVec], den: &Int, dim: usize) -> IntMat {
    let rows: Vec<Vec<Int>> = vs
        .iter()
        .map(|v| v.scale_int(den).to_ints().expect("denominator cleared"))
        .collect();
    IntMat::from_rows(&rows, dim).expect("dimensions checked")
}

/// Solves `y * h = t` for a matrix in row Hermite form.
pub fn solve_echelon(h: &IntMat, t: &[Int]) -> Option<Vec<Int>> {
    let mut rest = t.to_vec();
    let mut y = vec![Int::zero(); h.rows()];
    for i in 0..h.rows() {
        let Some(p) = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()) else {
            break;
        };
        let (q, r) = rest[p].div_rem(&h[(i, p)]);
        if !r.is_zero() {
            return None;
        }
        for (j, x) in rest.iter_mut().enumerate() {
            *x -= &q * &h[(i, j)];
        }
        y[i] = q;
    }
    rest.iter().all(Zero::is_zero).then_some(y)
}

/// Integer coefficients `c` with `sum c_i * gens_i = x`, or `None` when `x` is not in
/// the integer span of `gens`.
pub fn lattice_member(gens: &[RatVec], x: &RatVec) -> Result<Option<Vec<Int>>> {
    let dim = x.dim();
    check_dims(gens, dim)?;
    if gens.is_empty() {
        return Ok(x.is_zero().then(Vec::new));
    }
    let den = common_denominator(gens.iter().chain(std::iter::once(x)));
    let m = scaled_rows(gens, &den, dim);
    let t = x.scale_int(&den).to_ints().expect("denominator cleared");
    let (h, u) = hnf(&m);
    Ok(solve_echelon(&h, &t).map(|y| u.left_apply(&y)))
}

/// Canonical basis (Hermite form rows) of the integer span of `gens`.
pub fn lattice_basis(gens: &[RatVec], dim: usize) -> Result<Vec<RatVec>> {
    check_dims(gens, dim)?;
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    let den = common_denominator(gens);
    let (h, _) = hnf(&scaled_rows(gens, &den, dim));
    let inv = Rat::new(1, den);
    Ok((0..h.rows())
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .map(|i| RatVec::from_int_vec(h.row(i)).scale(&inv))
        .collect())
}

/// Generators of `span_Z(a) ∩ span_Z(b)`, returned as a canonical basis.
pub fn lattice_intersect(a: &[RatVec], b: &[RatVec], dim: usize) -> Result<Vec<RatVec>> {
    check_dims(a.iter().chain(b), dim)?;
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let den = common_denominator(a.iter().chain(b));
    let stacked: Vec<RatVec> = a.iter().chain(b).cloned().collect();
    let m = scaled_rows(&stacked, &den, dim);
    let kernel = left_kernel(&m);
    let elems: Vec<RatVec> = kernel
        .iter()
        .map(|k| {
            a.iter()
                .zip(k)
                .fold(RatVec::zeros(dim), |acc, (v, c)| acc.add(&v.scale_int(c)))
        })
        .collect();
    lattice_basis(&elems, dim)
}

/// True iff the integer spans of `a` and `b` coincide.
pub fn lattice_eq(a: &[RatVec], b: &[RatVec], dim: usize) -> Result<bool> {
    Ok(lattice_basis(a, dim)? == lattice_basis(b, dim)?)
}

/// Reduced row echelon form over Q; returns pivot columns.
pub fn rref(rows: &mut [Vec<Rat>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Dimension of the Q-span.
pub fn q_rank(vs: &[RatVec]) -> usize {
    let mut rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.0.clone()).collect();
    rref(&mut rows).len()
}

/// Rational coefficients `c` with `sum c_i * basis_i = x`, if `x` lies in the Q-span.
/// Unique when `basis` is linearly independent.
pub fn q_coordinates(basis: &[RatVec], x: &RatVec) -> Result<Option<Vec<Rat>>> {
    let dim = x.dim();
    check_dims(basis, dim)?;
    let k = basis.len();
    // augmented system: rows are coordinates, columns are basis vectors then x
    let mut rows: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b.0[i].clone()).collect();
            row.push(x.0[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&k) {
        return Ok(None);
    }
    let mut c = vec![Rat::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = rows[r][k].clone();
    }
    Ok(Some(c))
}

/// Basis of `{ y : M y = 0 }` where the rows of `M` are `rows`, in dimension `dim`.
pub fn right_nullspace(rows: &[RatVec], dim: usize) -> Vec<RatVec> {
    let mut m: Vec<Vec<Rat>> = rows.iter().map(|v| v.0.clone()).collect();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut y = vec![Rat::zero(); dim];
            y[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                y[p] = -&m[r][f];
            }
            RatVec(y)
        })
        .collect()
}

/// Q-basis of `span_Q(a) ∩ span_Q(b)`.
pub fn span_intersection(a: &[RatVec], b: &[RatVec], dim: usize) -> Result<Vec<RatVec>> {
    check_dims(a.iter().chain(b), dim)?;
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let den = common_denominator(a.iter().chain(b));
    let stacked: Vec<RatVec> = a.iter().chain(b).cloned().collect();
    let kernel = left_kernel(&scaled_rows(&stacked, &den, dim));
    let elems: Vec<RatVec> = kernel
        .iter()
        .map(|k| {
            a.iter()
                .zip(k)
                .fold(RatVec::zeros(dim), |acc, (v, c)| acc.add(&v.scale_int(c)))
        })
        .collect();
    lattice_basis(&elems, dim)
}

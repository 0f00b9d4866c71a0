//! Hermite and Smith normal forms, determinants.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::mat::IntMat;
use super::rat::Int;
use crate::error::{Error, Result};

/// Row Hermite normal form `h = u * m` with `u` unimodular.
///
/// `h` is in row echelon form, pivots are positive and the entries above each
/// pivot lie in `[0, pivot)`. Zero rows come last.
pub fn hnf(m: &IntMat) -> (IntMat, IntMat) {
    let rows = m.rows();
    let mut h = m.clone();
    let mut u = IntMat::identity(rows);
    let mut pr = 0;
    for c in 0..m.cols() {
        if pr == rows {
            break;
        }
        loop {
            // smallest nonzero entry at or below the pivot row
            let best = (pr..rows)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&a, &b| h[(a, c)].abs().cmp(&h[(b, c)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(pr, best);
            u.swap_rows(pr, best);
            let mut clean = true;
            for i in pr + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(pr, c)]);
                h.sub_row_multiple(i, pr, &q);
                u.sub_row_multiple(i, pr, &q);
                if !h[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(pr, c)].is_zero() {
            continue;
        }
        if h[(pr, c)].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for i in 0..pr {
            let q = h[(i, c)].div_floor(&h[(pr, c)]);
            h.sub_row_multiple(i, pr, &q);
            u.sub_row_multiple(i, pr, &q);
        }
        pr += 1;
    }
    (h, u)
}

/// Number of nonzero rows of the Hermite form, i.e. the rank over Q.
pub fn rank(m: &IntMat) -> usize {
    let (h, _) = hnf(m);
    (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
}

/// Rows `k` with `k * m = 0`, forming a basis of the integer left kernel.
pub fn left_kernel(m: &IntMat) -> Vec<Vec<Int>> {
    let (h, u) = hnf(m);
    (0..h.rows())
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| u.row(i).to_vec())
        .collect()
}

/// Result of a Smith normal form computation: `u * m * v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl SnfResult {
    /// Diagonal entries `d[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

/// Smith normal form by alternating row and column Hermite passes, followed by a
/// gcd/lcm sweep that establishes `d1 | d2 | ...`. Entries are non-negative and
/// zeros come last.
pub fn snf(m: &IntMat) -> SnfResult {
    let mut d = m.clone();
    let mut u = IntMat::identity(m.rows());
    let mut v = IntMat::identity(m.cols());
    loop {
        let (h, uu) = hnf(&d);
        d = h;
        u = uu.mul(&u).expect("square transform");
        if d.is_diagonal() {
            break;
        }
        let (ht, vv) = hnf(&d.transpose());
        d = ht.transpose();
        v = v.mul(&vv.transpose()).expect("square transform");
        if d.is_diagonal() {
            break;
        }
    }
    let n = d.rows().min(d.cols());
    for i in 0..n {
        if d[(i, i)].is_negative() {
            d.negate_row(i);
            u.negate_row(i);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = d[(i, i)].clone();
            let b = d[(j, j)].clone();
            if b.is_zero() || (!a.is_zero() && b.is_multiple_of(&a)) {
                continue;
            }
            // [[s, t], [-b/g, a/g]] * diag(a, b) * [[1, -t b/g], [1, s a/g]] = diag(g, ab/g)
            let e = a.extended_gcd(&b);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let bg = &b / &g;
            let ag = &a / &g;
            u.combine_rows(i, j, &s, &t, &(-&bg), &ag);
            v.combine_cols(i, j, &Int::one(), &(-(&t * &bg)), &Int::one(), &(&s * &ag));
            d[(i, i)] = g;
            d[(j, j)] = &a * &bg;
        }
    }
    SnfResult { d, u, v }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMat) -> Result<Int> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = val / &prev;
            }
            a[(i, k)] = Int::zero();
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * &a[(n - 1, n - 1)])
}

/// True iff `det(n) = ±1`.
pub fn is_unimodular(n: &IntMat) -> Result<bool> {
    Ok(det(n)?.abs().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64(rows)
    }

    fn is_hermite(h: &IntMat) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let piv = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
            match piv {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last_pivot.is_some_and(|lp| p <= lp) {
                        return false;
                    }
                    if !h[(i, p)].is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        if h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)] {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_identity_is_fixed() {
        let (h, u) = hnf(&IntMat::identity(2));
        assert_eq!(h, IntMat::identity(2));
        assert_eq!(u, IntMat::identity(2));
    }

    #[test]
    fn hnf_of_unimodular_is_identity() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMat::identity(2));
        assert_eq!(u.mul(&a).unwrap(), h);
    }

    #[test]
    fn hnf_of_zero() {
        let (h, u) = hnf(&IntMat::zeros(2, 2));
        assert_eq!(h, IntMat::zeros(2, 2));
        assert_eq!(u, IntMat::identity(2));
    }

    #[test]
    fn hnf_shape() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (h, u) = hnf(&a);
        assert!(is_hermite(&h), "{h}");
        assert_eq!(u.mul(&a).unwrap(), h);
        assert!(is_unimodular(&u).unwrap());
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&IntMat::identity(3)).d, IntMat::identity(3));
        let r = snf(&m(&[&[2, 4], &[6, 8]]));
        assert_eq!(r.diagonal(), vec![Int::from(2), Int::from(4)]);
        let r = snf(&m(&[&[4, 0], &[0, 6]]));
        assert_eq!(r.diagonal(), vec![Int::from(2), Int::from(12)]);
        let a = m(&[&[4, 0], &[0, 6]]);
        assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.d);
    }

    #[test]
    fn snf_rectangular_zeros_last() {
        let a = m(&[&[0, 2, 0], &[0, 0, 0]]);
        let r = snf(&a);
        assert_eq!(r.diagonal(), vec![Int::from(2), Int::zero()]);
        assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.d);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det(&IntMat::identity(3)).unwrap(), Int::one());
        assert_eq!(det(&m(&[&[2, 5], &[1, 2]])).unwrap(), Int::from(-1));
        assert_eq!(det(&IntMat::zeros(2, 2)).unwrap(), Int::zero());
        assert_eq!(det(&m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]])).unwrap(), Int::from(-2));
        assert!(matches!(det(&IntMat::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn unimodularity() {
        assert!(is_unimodular(&IntMat::identity(2)).unwrap());
        assert!(is_unimodular(&m(&[&[1, 1], &[1, 2]])).unwrap());
        assert!(!is_unimodular(&m(&[&[2, 0], &[0, 1]])).unwrap());
        assert!(is_unimodular(&IntMat::zeros(1, 2)).is_err());
    }

    #[test]
    fn kernel_rows_annihilate() {
        let a = m(&[&[1, 2], &[2, 4], &[0, 1]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(a.left_apply(&k[0]).iter().all(Zero::is_zero));
        assert_eq!(rank(&a), 2);
    }
}

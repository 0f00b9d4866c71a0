use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{hnf, q_coordinates, solve_echelon, Int, IntMat, RatVec};

/// `Z^m` modulo the lattice generated by the columns of `relations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedGroup {
    rank: usize,
    relations: IntMat,
    /// Hermite basis of the relation lattice, one row per generator.
    basis: IntMat,
}

impl PresentedGroup {
    pub fn new(rank: usize, relations: IntMat) -> Result<Self> {
        if relations.rows() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: relations.rows(),
            });
        }
        let (h, _) = hnf(&relations.transpose());
        let nonzero: Vec<Vec<Int>> = (0..h.rows())
            .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
            .map(|i| h.row(i).to_vec())
            .collect();
        let basis = IntMat::from_rows(&nonzero, rank)?;
        Ok(PresentedGroup { rank, relations, basis })
    }

    /// `Z^m` with no relations.
    pub fn free(rank: usize) -> Self {
        Self::new(rank, IntMat::zeros(rank, 0)).expect("well-formed")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &IntMat {
        &self.relations
    }

    /// Hermite basis rows of the relation lattice.
    pub fn relation_basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn relation_rows(&self) -> Vec<Vec<Int>> {
        self.basis.row_vecs()
    }

    pub fn check(&self, x: &[Int]) -> Result<()> {
        if x.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Unique representative of `x + L`: each pivot coordinate reduced into `[0, pivot)`.
    pub fn canon(&self, x: &[Int]) -> Vec<Int> {
        let mut v = x.to_vec();
        for i in 0..self.basis.rows() {
            let row = self.basis.row(i);
            let p = row.iter().position(|c| !c.is_zero()).expect("nonzero basis row");
            let q = v[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &q * b;
                }
            }
        }
        v
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        solve_echelon(&self.basis, x).is_some()
    }

    /// Order of `x + L`, `None` when infinite.
    pub fn order(&self, x: &[Int]) -> Option<Int> {
        if self.is_zero(x) {
            return Some(Int::one());
        }
        let basis: Vec<RatVec> = self.basis.row_vecs().iter().map(|r| RatVec::from_int_vec(r)).collect();
        let coords = q_coordinates(&basis, &RatVec::from_int_vec(x)).expect("same dimension")?;
        Some(coords.iter().fold(Int::one(), |acc, c| acc.lcm(c.den())))
    }
}

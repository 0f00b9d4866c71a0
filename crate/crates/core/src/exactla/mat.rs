use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rat::Int;
use crate::error::{Error, Result};

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn diag(entries: &[Int]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    /// An empty row list gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[Vec<Int>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().cloned());
        }
        Ok(IntMat {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        Self::from_rows(&rows, cols).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMat) -> Result<IntMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = IntMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let p = a * &rhs[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[Int]) -> Vec<Int> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![Int::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * &self[(i, j)];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] -= k * row[src]`
    pub fn sub_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = k * &self[(src, j)];
            self[(dst, j)] -= t;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Replaces rows `i, j` by `[[a, b], [c, d]] * [row_i; row_j]`.
    pub fn combine_rows(&mut self, i: usize, j: usize, a: &Int, b: &Int, c: &Int, d: &Int) {
        for col in 0..self.cols {
            let x = self[(i, col)].clone();
            let y = self[(j, col)].clone();
            self[(i, col)] = a * &x + b * &y;
            self[(j, col)] = c * &x + d * &y;
        }
    }

    /// Replaces columns `i, j` by `[col_i, col_j] * [[a, b], [c, d]]`.
    pub fn combine_cols(&mut self, i: usize, j: usize, a: &Int, b: &Int, c: &Int, d: &Int) {
        for row in 0..self.rows {
            let x = self[(row, i)].clone();
            let y = self[(row, j)].clone();
            self[(row, i)] = &x * a + &y * c;
            self[(row, j)] = &x * b + &y * d;
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Integer that serializes as a JSON number when it fits in `i64`, else as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(JsonInt(Int::from(v))),
            Raw::Str(s) => s.trim().parse().map(JsonInt).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatFile {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<JsonInt>>,
}

impl Serialize for IntMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(JsonInt).collect())
            .collect();
        MatFile {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = MatFile::deserialize(d)?;
        if f.entries.len() != f.rows {
            return Err(serde::de::Error::custom(format!(
                "declared {} rows, found {}",
                f.rows,
                f.entries.len()
            )));
        }
        let rows: Vec<Vec<Int>> = f
            .entries
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        IntMat::from_rows(&rows, f.cols).map_err(serde::de::Error::custom)
    }
}

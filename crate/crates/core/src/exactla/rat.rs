//! Reduced rationals and rational vectors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;

/// An exact rational number `num/den` with `den >= 1` and `gcd(|num|, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<Int>, den: impl Into<Int>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num.into(), den))
    }

    pub fn int(n: impl Into<Int>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn num(&self) -> &Int {
        self.0.numer()
    }

    pub fn den(&self) -> &Int {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<Int> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn mul_int(&self, k: &Int) -> Rat {
        Rat(&self.0 * BigRational::from_integer(k.clone()))
    }

    pub fn div(&self, other: &Rat) -> Rat {
        Rat(&self.0 / &other.0)
    }

    /// `max(|num|, den)`; finitely many rationals share each height.
    pub fn height(&self) -> Int {
        let n = self.num().abs();
        if &n > self.den() {
            n
        } else {
            self.den().clone()
        }
    }

    /// Enumeration key: height, then denominator, then `|num|`, positive before negative.
    pub fn canonical_key(&self) -> (Int, Int, Int, bool) {
        (
            self.height(),
            self.den().clone(),
            self.num().abs(),
            self.num().is_negative(),
        )
    }

    pub fn canonical_cmp(&self, other: &Rat) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl From<Int> for Rat {
    fn from(n: Int) -> Self {
        Rat::int(n)
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        Rat(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse(format!("rational {s:?}"), m);
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: Int = n.parse().map_err(|_| bad("bad numerator"))?;
        let den: Int = d.parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(Rat::new(num, den))
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A fixed-dimension vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RatVec(pub Vec<Rat>);

impl RatVec {
    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVec(v.iter().map(|&x| Rat::int(x)).collect())
    }

    pub fn from_int_vec(v: &[Int]) -> Self {
        RatVec(v.iter().cloned().map(Rat::int).collect())
    }

    /// Parses `["1/2", "0", ...]`-style coordinates.
    pub fn parse(coords: &[&str]) -> Result<Self> {
        coords.iter().map(|c| c.parse()).collect::<Result<Vec<_>>>().map(RatVec)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        debug_assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        debug_assert_eq!(self.dim(), other.dim());
        RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> RatVec {
        RatVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|a| a * k).collect())
    }

    pub fn scale_int(&self, k: &Int) -> RatVec {
        RatVec(self.0.iter().map(|a| a.mul_int(k)).collect())
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self) -> Int {
        self.0.iter().fold(Int::one(), |acc, r| acc.lcm(r.den()))
    }

    /// Integer coordinates, if every coordinate is integral.
    pub fn to_ints(&self) -> Option<Vec<Int>> {
        self.0.iter().map(Rat::to_integer).collect()
    }

    pub fn height(&self) -> Int {
        self.0.iter().map(Rat::height).max().unwrap_or_else(Int::one)
    }

    /// Vector enumeration order: maximum coordinate height, then coordinates lexicographically
    /// by [`Rat::canonical_key`].
    pub fn canonical_cmp(&self, other: &RatVec) -> Ordering {
        self.height().cmp(&other.height()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                match a.canonical_cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            self.dim().cmp(&other.dim())
        })
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if r.is_integer() {
                write!(f, "{}", r.num())?;
            } else {
                write!(f, "{r}")?;
            }
        }
        write!(f, ")")
    }
}

/// Integers in enumeration order `0, 1, -1, 2, -2, ...`.
pub fn int_at(index: usize) -> Int {
    let k = Int::from((index + 1) / 2);
    if index % 2 == 1 {
        k
    } else {
        -k
    }
}

/// Vector order for integer vectors, consistent with [`RatVec::canonical_cmp`].
pub fn int_vec_cmp(a: &[Int], b: &[Int]) -> Ordering {
    let h = |v: &[Int]| v.iter().map(|x| x.abs().max(Int::one())).max().unwrap_or_else(Int::one);
    h(a).cmp(&h(b)).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let kx = (x.abs(), x.is_negative());
            let ky = (y.abs(), y.is_negative());
            match kx.cmp(&ky) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    })
}

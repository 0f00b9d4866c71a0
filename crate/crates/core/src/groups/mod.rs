//! Concrete representations of the groups in a direct-sum instance.

mod descriptor;
mod enumerate;
mod instance;
mod presented;
mod quotient;
mod subgroup;

use std::cmp::Ordering;
use std::fmt;

pub use descriptor::{GroupDescriptor, LocalizedSlot};
pub use enumerate::Elements;
pub use instance::{split, validate_instance, Backend, DirectSumInstance, Side, ValidationReport};
pub use presented::PresentedGroup;
pub use quotient::Quotient;
pub use subgroup::{RationalGroup, Subgroup};

use crate::error::{Error, Result};
use crate::exactla::{int_vec_cmp, Int, Rat, RatVec};

/// An element of a presented group (integer coordinates) or of `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElem {
    Int(Vec<Int>),
    Rat(RatVec),
}

impl GroupElem {
    pub fn dim(&self) -> usize {
        match self {
            GroupElem::Int(v) => v.len(),
            GroupElem::Rat(v) => v.dim(),
        }
    }

    pub fn as_int(&self) -> Result<&[Int]> {
        match self {
            GroupElem::Int(v) => Ok(v),
            GroupElem::Rat(_) => Err(Error::BackendMismatch("expected an integer vector".into())),
        }
    }

    pub fn as_rat(&self) -> Result<&RatVec> {
        match self {
            GroupElem::Rat(v) => Ok(v),
            GroupElem::Int(_) => Err(Error::BackendMismatch("expected a rational vector".into())),
        }
    }

    /// Coordinates as a rational vector, for either backend.
    pub fn to_rat_vec(&self) -> RatVec {
        match self {
            GroupElem::Int(v) => RatVec::from_int_vec(v),
            GroupElem::Rat(v) => v.clone(),
        }
    }

    pub fn ints(v: &[i64]) -> Self {
        GroupElem::Int(v.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn rats(v: &[i64]) -> Self {
        GroupElem::Rat(RatVec::from_ints(v))
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Int(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            GroupElem::Rat(v) => write!(f, "{v}"),
        }
    }
}

/// The group all elements of an instance live in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    Presented(PresentedGroup),
    /// `Q^n`
    Rational(usize),
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Presented(p) => p.rank(),
            Ambient::Rational(n) => *n,
        }
    }

    pub fn zero(&self) -> GroupElem {
        match self {
            Ambient::Presented(p) => GroupElem::Int(vec![Int::from(0); p.rank()]),
            Ambient::Rational(n) => GroupElem::Rat(RatVec::zeros(*n)),
        }
    }

    pub fn check(&self, x: &GroupElem) -> Result<()> {
        match (self, x) {
            (Ambient::Presented(_), GroupElem::Int(_)) | (Ambient::Rational(_), GroupElem::Rat(_)) => {}
            _ => return Err(Error::BackendMismatch(format!("element {x} does not match ambient"))),
        }
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    pub fn canon(&self, x: &GroupElem) -> GroupElem {
        match (self, x) {
            (Ambient::Presented(p), GroupElem::Int(v)) => GroupElem::Int(p.canon(v)),
            _ => x.clone(),
        }
    }

    pub fn add(&self, x: &GroupElem, y: &GroupElem) -> Result<GroupElem> {
        match (x, y) {
            (GroupElem::Int(a), GroupElem::Int(b)) => {
                let s: Vec<Int> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                Ok(self.canon(&GroupElem::Int(s)))
            }
            (GroupElem::Rat(a), GroupElem::Rat(b)) => Ok(GroupElem::Rat(a.add(b))),
            _ => Err(Error::BackendMismatch("mixed element kinds".into())),
        }
    }

    pub fn neg(&self, x: &GroupElem) -> GroupElem {
        self.scale(x, &Int::from(-1))
    }

    pub fn sub(&self, x: &GroupElem, y: &GroupElem) -> Result<GroupElem> {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &GroupElem, k: &Int) -> GroupElem {
        match x {
            GroupElem::Int(a) => self.canon(&GroupElem::Int(a.iter().map(|p| p * k).collect())),
            GroupElem::Rat(a) => GroupElem::Rat(a.scale_int(k)),
        }
    }

    pub fn scale_rat(&self, x: &GroupElem, t: &Rat) -> Result<GroupElem> {
        match x {
            GroupElem::Rat(a) => Ok(GroupElem::Rat(a.scale(t))),
            GroupElem::Int(_) => match t.to_integer() {
                Some(k) => Ok(self.scale(x, &k)),
                None => Err(Error::BackendMismatch(
                    "fractional multiple in a presented group".into(),
                )),
            },
        }
    }

    pub fn is_zero(&self, x: &GroupElem) -> bool {
        match (self, x) {
            (Ambient::Presented(p), GroupElem::Int(v)) => p.is_zero(v),
            (_, GroupElem::Rat(v)) => v.is_zero(),
            (_, GroupElem::Int(v)) => v.iter().all(|c| c == &Int::from(0)),
        }
    }

    pub fn equal(&self, x: &GroupElem, y: &GroupElem) -> Result<bool> {
        Ok(self.is_zero(&self.sub(x, y)?))
    }

    /// Canonical enumeration order on canonical representatives.
    pub fn canonical_cmp(&self, x: &GroupElem, y: &GroupElem) -> Ordering {
        match (self.canon(x), self.canon(y)) {
            (GroupElem::Int(a), GroupElem::Int(b)) => int_vec_cmp(&a, &b),
            (GroupElem::Rat(a), GroupElem::Rat(b)) => a.canonical_cmp(&b),
            (GroupElem::Int(_), GroupElem::Rat(_)) => Ordering::Less,
            (GroupElem::Rat(_), GroupElem::Int(_)) => Ordering::Greater,
        }
    }
}

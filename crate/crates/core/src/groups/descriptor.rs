use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactla::{lattice_basis, left_kernel, q_coordinates, q_rank, right_nullspace, Int, IntMat, Rat, RatVec};

/// `Z_P * direction`: rational multiples whose denominators avoid every prime in `forbidden`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalizedSlot {
    pub direction: RatVec,
    pub forbidden: BTreeSet<u64>,
}

impl LocalizedSlot {
    pub fn new(direction: RatVec, forbidden: impl IntoIterator<Item = u64>) -> Self {
        LocalizedSlot {
            direction,
            forbidden: forbidden.into_iter().collect(),
        }
    }

    /// Whether `t` is an allowed coefficient.
    pub fn admits(&self, t: &Rat) -> bool {
        self.forbidden.iter().all(|&p| !t.den().is_multiple_of(&Int::from(p)))
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// A subgroup of `Q^n` of the form `L ⊕ Z_{P_1} d_1 ⊕ ... ⊕ Z_{P_k} d_k`, with `L` a
/// finitely generated lattice and the lattice basis and directions linearly independent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    dim: usize,
    lattice: Vec<RatVec>,
    localized: Vec<LocalizedSlot>,
}

impl GroupDescriptor {
    pub fn new(dim: usize, lattice_gens: &[RatVec], localized: Vec<LocalizedSlot>) -> Result<Self> {
        let lattice = lattice_basis(lattice_gens, dim)?;
        for slot in &localized {
            if slot.direction.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: slot.direction.dim(),
                });
            }
            if slot.direction.is_zero() {
                return Err(Error::Unsupported("localized slot with zero direction".into()));
            }
            if let Some(&p) = slot.forbidden.iter().find(|&&p| !is_prime(p)) {
                return Err(Error::Unsupported(format!("forbidden entry {p} is not prime")));
            }
        }
        let all: Vec<RatVec> = lattice
            .iter()
            .cloned()
            .chain(localized.iter().map(|s| s.direction.clone()))
            .collect();
        if q_rank(&all) != all.len() {
            return Err(Error::Unsupported(
                "lattice part and localized directions must be linearly independent".into(),
            ));
        }
        Ok(GroupDescriptor {
            dim,
            lattice,
            localized,
        })
    }

    pub fn lattice(dim: usize, gens: &[RatVec]) -> Result<Self> {
        Self::new(dim, gens, Vec::new())
    }

    pub fn trivial(dim: usize) -> Self {
        GroupDescriptor {
            dim,
            lattice: Vec::new(),
            localized: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical basis of the lattice part.
    pub fn lattice_basis(&self) -> &[RatVec] {
        &self.lattice
    }

    pub fn localized(&self) -> &[LocalizedSlot] {
        &self.localized
    }

    pub fn is_lattice(&self) -> bool {
        self.localized.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.lattice.is_empty() && self.localized.is_empty()
    }

    /// Lattice basis followed by slot directions: a Q-basis of the Q-span.
    pub fn span_basis(&self) -> Vec<RatVec> {
        self.lattice
            .iter()
            .cloned()
            .chain(self.localized.iter().map(|s| s.direction.clone()))
            .collect()
    }

    /// Coordinates of `x`: integer lattice coefficients and rational slot coefficients.
    /// `None` when `x` is outside the group.
    pub fn coordinates(&self, x: &RatVec) -> Result<Option<(Vec<Int>, Vec<Rat>)>> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let Some(c) = q_coordinates(&self.span_basis(), x)? else {
            return Ok(None);
        };
        let (lat, loc) = c.split_at(self.lattice.len());
        let Some(lat) = lat.iter().map(Rat::to_integer).collect::<Option<Vec<_>>>() else {
            return Ok(None);
        };
        if loc.iter().zip(&self.localized).any(|(t, s)| !s.admits(t)) {
            return Ok(None);
        }
        Ok(Some((lat, loc.to_vec())))
    }

    pub fn member(&self, x: &RatVec) -> Result<bool> {
        Ok(self.coordinates(x)?.is_some())
    }

    pub fn combine(&self, lat: &[Int], loc: &[Rat]) -> RatVec {
        let mut v = RatVec::zeros(self.dim);
        for (b, c) in self.lattice.iter().zip(lat) {
            v = v.add(&b.scale_int(c));
        }
        for (s, t) in self.localized.iter().zip(loc) {
            v = v.add(&s.direction.scale(t));
        }
        v
    }

    /// Whether every element of `other` lies in `self`.
    pub fn contains(&self, other: &GroupDescriptor) -> Result<bool> {
        for b in &other.lattice {
            if !self.member(b)? {
                return Ok(false);
            }
        }
        for slot in &other.localized {
            if !self.contains_slot(slot)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn contains_slot(&self, slot: &LocalizedSlot) -> Result<bool> {
        let Some(c) = q_coordinates(&self.span_basis(), &slot.direction)? else {
            return Ok(false);
        };
        let (lat, loc) = c.split_at(self.lattice.len());
        // Z_P contains 1/q for infinitely many q, so no lattice component survives
        if lat.iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
        Ok(loc
            .iter()
            .zip(&self.localized)
            .all(|(t, mine)| t.is_zero() || (mine.admits(t) && mine.forbidden.is_subset(&slot.forbidden))))
    }

    pub fn equals(&self, other: &GroupDescriptor) -> Result<bool> {
        Ok(self.contains(other)? && other.contains(self)?)
    }

    /// Internal sum, valid when the Q-spans meet only in zero.
    pub fn direct_sum(&self, other: &GroupDescriptor) -> Result<GroupDescriptor> {
        let gens: Vec<RatVec> = self.lattice.iter().chain(&other.lattice).cloned().collect();
        let slots = self.localized.iter().chain(&other.localized).cloned().collect();
        GroupDescriptor::new(self.dim, &gens, slots)
    }

    /// `self ∩ V` for a subspace `V` containing every slot direction of `self`.
    pub fn restrict_to_subspace(&self, subspace: &[RatVec]) -> Result<GroupDescriptor> {
        let ann = right_nullspace(subspace, self.dim);
        let dot = |a: &RatVec, b: &RatVec| a.0.iter().zip(&b.0).fold(Rat::zero(), |acc, (x, y)| &acc + &(x * y));
        for s in &self.localized {
            if ann.iter().any(|n| !dot(&s.direction, n).is_zero()) {
                return Err(Error::Unsupported(
                    "localized direction outside the intersection subspace".into(),
                ));
            }
        }
        if ann.is_empty() || self.lattice.is_empty() {
            return Ok(self.clone());
        }
        // integer combinations of the lattice basis annihilated by every n in ann
        let values: Vec<Vec<Rat>> = self
            .lattice
            .iter()
            .map(|b| ann.iter().map(|n| dot(b, n)).collect())
            .collect();
        let den = values.iter().flatten().fold(Int::one(), |acc, r| acc.lcm(r.den()));
        let rows: Vec<Vec<Int>> = values
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.mul_int(&den).to_integer().expect("cleared"))
                    .collect()
            })
            .collect();
        let kernel = left_kernel(&IntMat::from_rows(&rows, ann.len())?);
        let gens: Vec<RatVec> = kernel.iter().map(|k| self.combine(k, &[])).collect();
        GroupDescriptor::new(self.dim, &gens, self.localized.clone())
    }
}

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::{One, Signed};

use super::descriptor::{GroupDescriptor, LocalizedSlot};
use super::quotient::Quotient;
use super::subgroup::Subgroup;
use super::{Ambient, GroupElem};
use crate::error::Result;
use crate::exactla::{Int, Rat};

/// One coordinate of an enumeration frame.
#[derive(Clone, Debug)]
enum Axis {
    Free,
    /// Residues in `(-d/2, d/2]`.
    Cyclic(Int),
    Local(LocalizedSlot),
}

impl Axis {
    /// Values whose rank is exactly `h`.
    fn values_at(&self, h: u64) -> Vec<Rat> {
        let hi = Int::from(h);
        match self {
            Axis::Free if h == 0 => vec![Rat::zero()],
            Axis::Free => vec![Rat::int(hi.clone()), Rat::int(-hi)],
            Axis::Cyclic(d) => {
                let mut out = Vec::new();
                if &(&hi * 2u32) <= d {
                    out.push(Rat::int(hi.clone()));
                }
                if h > 0 && &(&hi * 2u32) < d {
                    out.push(Rat::int(-hi));
                }
                out
            }
            Axis::Local(slot) => {
                // rationals of height exactly h + 1
                let top = hi + 1u32;
                let mut out = Vec::new();
                let mut den = Int::one();
                while den <= top {
                    let mut num = -top.clone();
                    while num <= top {
                        let height = num.abs().max(den.clone());
                        if height == top && num.gcd(&den).is_one() {
                            let r = Rat::new(num.clone(), den.clone());
                            if slot.admits(&r) {
                                out.push(r);
                            }
                        }
                        num += 1u32;
                    }
                    den += 1u32;
                }
                out
            }
        }
    }

    /// Largest rank with values, `None` when unbounded.
    fn max_rank(&self) -> Option<u64> {
        match self {
            Axis::Cyclic(d) => Some(u64::try_from(d / 2u32).unwrap_or(u64::MAX)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Lifter {
    Quotient(Quotient),
    Descriptor(GroupDescriptor),
}

/// Elements of a subgroup in canonical order: blocks of increasing coordinate height, each
/// block sorted by the canonical element order. Every element appears exactly once.
#[derive(Clone, Debug)]
pub struct Elements {
    ambient: Ambient,
    axes: Vec<Axis>,
    lifter: Lifter,
    height: u64,
    done: bool,
    pending: VecDeque<GroupElem>,
}

impl Elements {
    pub(crate) fn new(sub: &Subgroup) -> Result<Self> {
        let ambient = sub.ambient();
        let (axes, lifter) = match sub {
            Subgroup::Presented(_) => {
                let q = Quotient::new(sub, &Subgroup::trivial(&ambient))?;
                let mut axes: Vec<Axis> = q.factors().iter().cloned().map(Axis::Cyclic).collect();
                axes.extend((0..q.free_rank()).map(|_| Axis::Free));
                (axes, Lifter::Quotient(q))
            }
            Subgroup::Rational(r) => {
                let d = r.descriptor().clone();
                let mut axes: Vec<Axis> = d.lattice_basis().iter().map(|_| Axis::Free).collect();
                axes.extend(d.localized().iter().cloned().map(Axis::Local));
                (axes, Lifter::Descriptor(d))
            }
        };
        Ok(Elements {
            ambient,
            axes,
            lifter,
            height: 0,
            done: false,
            pending: VecDeque::new(),
        })
    }

    fn lift(&self, c: &[Rat]) -> GroupElem {
        match &self.lifter {
            Lifter::Quotient(q) => {
                let ints: Vec<Int> = c.iter().map(|x| x.to_integer().expect("integral")).collect();
                q.lift(&ints)
            }
            Lifter::Descriptor(d) => {
                let nl = d.lattice_basis().len();
                let lat: Vec<Int> = c[..nl].iter().map(|x| x.to_integer().expect("integral")).collect();
                GroupElem::Rat(d.combine(&lat, &c[nl..]))
            }
        }
    }

    fn fill_block(&mut self) {
        let h = self.height;
        if self.axes.iter().all(|a| a.max_rank().is_some_and(|m| m < h)) && h > 0 {
            self.done = true;
            return;
        }
        // per axis: (values of rank < h, values of rank == h)
        let per_axis: Vec<(Vec<Rat>, Vec<Rat>)> = self
            .axes
            .iter()
            .map(|a| {
                let lower: Vec<Rat> = (0..h).flat_map(|k| a.values_at(k)).collect();
                (lower, a.values_at(h))
            })
            .collect();
        let mut block: Vec<GroupElem> = Vec::new();
        let mut current: Vec<Rat> = Vec::with_capacity(self.axes.len());
        self.cartesian(&per_axis, 0, false, &mut current, &mut block);
        let amb = self.ambient.clone();
        block.sort_by(|x, y| amb.canonical_cmp(x, y));
        self.pending.extend(block);
        self.height += 1;
    }

    fn cartesian(
        &self,
        per_axis: &[(Vec<Rat>, Vec<Rat>)],
        i: usize,
        hit: bool,
        current: &mut Vec<Rat>,
        out: &mut Vec<GroupElem>,
    ) {
        if i == per_axis.len() {
            if hit || (self.height == 0 && per_axis.is_empty()) {
                out.push(self.lift(current));
            }
            return;
        }
        let (lower, top) = &per_axis[i];
        for (vals, top_hit) in [(lower, false), (top, true)] {
            for v in vals {
                current.push(v.clone());
                self.cartesian(per_axis, i + 1, hit || top_hit, current, out);
                current.pop();
            }
        }
    }
}

impl Iterator for Elements {
    type Item = GroupElem;

    fn next(&mut self) -> Option<GroupElem> {
        while self.pending.is_empty() {
            if self.done {
                return None;
            }
            if self.axes.is_empty() && self.height > 0 {
                self.done = true;
                return None;
            }
            self.fill_block();
        }
        self.pending.pop_front()
    }
}

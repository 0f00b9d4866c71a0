use num_traits::Zero;

use super::descriptor::GroupDescriptor;
use super::enumerate::Elements;
use super::presented::PresentedGroup;
use super::{Ambient, GroupElem};
use crate::error::{Error, Result};
use crate::exactla::{
    hnf, lattice_basis, lattice_intersect, q_rank, solve_echelon, span_intersection, Int, IntMat, RatVec,
};

/// A descriptor group together with the stages at which its generators are enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGroup {
    descriptor: GroupDescriptor,
    schedule: Vec<(u64, RatVec)>,
}

impl RationalGroup {
    pub fn new(descriptor: GroupDescriptor, mut schedule: Vec<(u64, RatVec)>) -> Result<Self> {
        for (stage, g) in &schedule {
            if !descriptor.member(g)? {
                return Err(Error::InvalidInstance(vec![format!(
                    "scheduled generator {g} (stage {stage}) is outside its group"
                )]));
            }
        }
        schedule.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(RationalGroup { descriptor, schedule })
    }

    pub fn unscheduled(descriptor: GroupDescriptor) -> Self {
        RationalGroup {
            descriptor,
            schedule: Vec::new(),
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn schedule(&self) -> &[(u64, RatVec)] {
        &self.schedule
    }

    /// Subgroup generated by the arrivals at stages `<= s`.
    pub fn stage_group(&self, s: u64) -> Result<GroupDescriptor> {
        let gens: Vec<RatVec> = self
            .schedule
            .iter()
            .filter(|(t, _)| *t <= s)
            .map(|(_, g)| g.clone())
            .collect();
        GroupDescriptor::lattice(self.descriptor.dim(), &gens)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedSub {
    ambient: PresentedGroup,
    gens: Vec<Vec<Int>>,
    /// Hermite basis of the preimage lattice `span(gens) + L` in `Z^m`.
    lift: IntMat,
}

/// A subgroup of an [`Ambient`] group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    Presented(PresentedSub),
    Rational(RationalGroup),
}

fn nonzero_rows(h: &IntMat) -> Vec<Vec<Int>> {
    (0..h.rows())
        .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
        .map(|i| h.row(i).to_vec())
        .collect()
}

impl Subgroup {
    pub fn presented(ambient: &PresentedGroup, gens: Vec<Vec<Int>>) -> Result<Self> {
        for g in &gens {
            ambient.check(g)?;
        }
        let mut rows: Vec<Vec<Int>> = gens.clone();
        rows.extend(ambient.relation_rows());
        let (h, _) = hnf(&IntMat::from_rows(&rows, ambient.rank())?);
        let lift = IntMat::from_rows(&nonzero_rows(&h), ambient.rank())?;
        let gens = gens.iter().map(|g| ambient.canon(g)).collect();
        Ok(Subgroup::Presented(PresentedSub {
            ambient: ambient.clone(),
            gens,
            lift,
        }))
    }

    /// The whole presented group.
    pub fn whole(ambient: &PresentedGroup) -> Self {
        let gens = IntMat::identity(ambient.rank()).row_vecs();
        Self::presented(ambient, gens).expect("identity generators")
    }

    pub fn rational(descriptor: GroupDescriptor) -> Self {
        Subgroup::Rational(RationalGroup::unscheduled(descriptor))
    }

    pub fn trivial(ambient: &Ambient) -> Self {
        match ambient {
            Ambient::Presented(p) => Self::presented(p, Vec::new()).expect("no generators"),
            Ambient::Rational(n) => Self::rational(GroupDescriptor::trivial(*n)),
        }
    }

    /// Subgroup generated by finitely many elements.
    pub fn generated(ambient: &Ambient, gens: &[GroupElem]) -> Result<Self> {
        match ambient {
            Ambient::Presented(p) => {
                let gens = gens
                    .iter()
                    .map(|g| g.as_int().map(<[Int]>::to_vec))
                    .collect::<Result<_>>()?;
                Self::presented(p, gens)
            }
            Ambient::Rational(n) => {
                let gens: Vec<RatVec> = gens.iter().map(|g| g.as_rat().cloned()).collect::<Result<_>>()?;
                Ok(Self::rational(GroupDescriptor::lattice(*n, &gens)?))
            }
        }
    }

    pub fn ambient(&self) -> Ambient {
        match self {
            Subgroup::Presented(s) => Ambient::Presented(s.ambient.clone()),
            Subgroup::Rational(r) => Ambient::Rational(r.descriptor.dim()),
        }
    }

    pub fn descriptor(&self) -> Option<&GroupDescriptor> {
        match self {
            Subgroup::Rational(r) => Some(&r.descriptor),
            Subgroup::Presented(_) => None,
        }
    }

    pub fn rational_group(&self) -> Option<&RationalGroup> {
        match self {
            Subgroup::Rational(r) => Some(r),
            Subgroup::Presented(_) => None,
        }
    }

    /// Hermite basis of the preimage lattice, presented backend only.
    pub fn lift_basis(&self) -> Option<&IntMat> {
        match self {
            Subgroup::Presented(s) => Some(&s.lift),
            Subgroup::Rational(_) => None,
        }
    }

    pub fn is_finitely_generated(&self) -> bool {
        match self {
            Subgroup::Presented(_) => true,
            Subgroup::Rational(r) => r.descriptor.is_lattice(),
        }
    }

    /// Generators: the given ones for presented subgroups, the lattice basis otherwise.
    /// Localized slots are not finitely generated and are not included.
    pub fn gens(&self) -> Vec<GroupElem> {
        match self {
            Subgroup::Presented(s) => s.gens.iter().cloned().map(GroupElem::Int).collect(),
            Subgroup::Rational(r) => r
                .descriptor
                .lattice_basis()
                .iter()
                .cloned()
                .map(GroupElem::Rat)
                .collect(),
        }
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        match (self, other) {
            (Subgroup::Presented(a), Subgroup::Presented(b)) if a.ambient == b.ambient => Ok(()),
            (Subgroup::Rational(a), Subgroup::Rational(b)) if a.descriptor.dim() == b.descriptor.dim() => Ok(()),
            _ => Err(Error::BackendMismatch("subgroups of different ambient groups".into())),
        }
    }

    pub fn member(&self, x: &GroupElem) -> Result<bool> {
        self.ambient().check(x)?;
        match (self, x) {
            (Subgroup::Presented(s), GroupElem::Int(v)) => Ok(solve_echelon(&s.lift, v).is_some()),
            (Subgroup::Rational(r), GroupElem::Rat(v)) => r.descriptor.member(v),
            _ => unreachable!("checked by ambient"),
        }
    }

    pub fn contains(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        match (self, other) {
            (Subgroup::Rational(a), Subgroup::Rational(b)) => a.descriptor.contains(&b.descriptor),
            (Subgroup::Presented(a), Subgroup::Presented(b)) => {
                Ok(b.lift.row_vecs().iter().all(|r| solve_echelon(&a.lift, r).is_some()))
            }
            _ => unreachable!(),
        }
    }

    pub fn equals(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        match (self, other) {
            (Subgroup::Presented(a), Subgroup::Presented(b)) => Ok(a.lift == b.lift),
            _ => Ok(self.contains(other)? && other.contains(self)?),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Subgroup::Presented(s) => s.lift == *s.ambient.relation_basis(),
            Subgroup::Rational(r) => r.descriptor.is_trivial(),
        }
    }

    /// Dimension of the Q-span (the rank for finitely generated groups).
    pub fn span_rank(&self) -> usize {
        match self {
            Subgroup::Presented(s) => s.lift.rows() - s.ambient.relation_basis().rows(),
            Subgroup::Rational(r) => r.descriptor.span_basis().len(),
        }
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        match (self, other) {
            (Subgroup::Presented(a), Subgroup::Presented(b)) => {
                let gens = a.gens.iter().chain(&b.gens).cloned().collect();
                Self::presented(&a.ambient, gens)
            }
            (Subgroup::Rational(a), Subgroup::Rational(b)) => {
                let (s, t) = (&a.descriptor, &b.descriptor);
                let joint: Vec<RatVec> = s.span_basis().into_iter().chain(t.span_basis()).collect();
                if q_rank(&joint) == joint.len() {
                    return Ok(Self::rational(s.direct_sum(t)?));
                }
                if s.is_lattice() && t.is_lattice() {
                    let gens: Vec<RatVec> = s.lattice_basis().iter().chain(t.lattice_basis()).cloned().collect();
                    return Ok(Self::rational(GroupDescriptor::lattice(s.dim(), &gens)?));
                }
                if s.contains(t)? {
                    return Ok(self.clone());
                }
                if t.contains(s)? {
                    return Ok(other.clone());
                }
                Err(Error::Unsupported("sum of overlapping localized groups".into()))
            }
            _ => unreachable!(),
        }
    }

    pub fn intersection(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        match (self, other) {
            (Subgroup::Presented(a), Subgroup::Presented(b)) => {
                let m = a.ambient.rank();
                let to_rat =
                    |l: &IntMat| -> Vec<RatVec> { l.row_vecs().iter().map(|r| RatVec::from_int_vec(r)).collect() };
                let meet = lattice_intersect(&to_rat(&a.lift), &to_rat(&b.lift), m)?;
                let gens = meet.iter().map(|v| v.to_ints().expect("integral lattice")).collect();
                Self::presented(&a.ambient, gens)
            }
            (Subgroup::Rational(a), Subgroup::Rational(b)) => {
                Ok(Self::rational(descriptor_intersection(&a.descriptor, &b.descriptor)?))
            }
            _ => unreachable!(),
        }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Result<Elements> {
        Elements::new(self)
    }
}

/// Intersection of two descriptor groups.
///
/// Both groups are cut down to `V = span(S) ∩ span(T)`; when the pieces agree (or one contains
/// the other) that piece is the intersection.
pub fn descriptor_intersection(s: &GroupDescriptor, t: &GroupDescriptor) -> Result<GroupDescriptor> {
    let dim = s.dim();
    if s.is_lattice() && t.is_lattice() {
        let meet = lattice_intersect(s.lattice_basis(), t.lattice_basis(), dim)?;
        return GroupDescriptor::lattice(dim, &lattice_basis(&meet, dim)?);
    }
    let v = span_intersection(&s.span_basis(), &t.span_basis(), dim)?;
    let ds = s.restrict_to_subspace(&v)?;
    let dt = t.restrict_to_subspace(&v)?;
    if dt.contains(&ds)? {
        Ok(ds)
    } else if ds.contains(&dt)? {
        Ok(dt)
    } else {
        Err(Error::Unsupported(
            "intersection of incomparable localized groups".into(),
        ))
    }
}

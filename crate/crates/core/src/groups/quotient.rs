use num_integer::Integer;
use num_traits::{One, Zero};

use super::subgroup::Subgroup;
use super::{Ambient, GroupElem};
use crate::error::{Error, Result};
use crate::exactla::{
    hnf, lattice_basis, lattice_member, q_rank, right_nullspace, snf, solve_echelon, Int, IntMat, Rat, RatVec,
};

/// Integer coordinates on a group (modulo an invisible part, for projections).
#[derive(Clone, Debug)]
enum Frame {
    /// Hermite basis rows of a preimage lattice in `Z^m`.
    Presented(IntMat),
    Lattice(Vec<RatVec>),
    /// `x -> (x . n_j)` followed by lattice coordinates in `basis`; `lifts[i]` maps to `basis[i]`.
    Projected {
        ann: Vec<RatVec>,
        basis: Vec<RatVec>,
        lifts: Vec<RatVec>,
    },
}

fn dot(a: &RatVec, b: &RatVec) -> Rat {
    a.0.iter().zip(&b.0).fold(Rat::zero(), |acc, (x, y)| &acc + &(x * y))
}

impl Frame {
    fn len(&self) -> usize {
        match self {
            Frame::Presented(b) => b.rows(),
            Frame::Lattice(b) => b.len(),
            Frame::Projected { basis, .. } => basis.len(),
        }
    }

    fn coords(&self, x: &GroupElem) -> Result<Option<Vec<Int>>> {
        match (self, x) {
            (Frame::Presented(b), GroupElem::Int(v)) => Ok(solve_echelon(b, v)),
            (Frame::Lattice(b), GroupElem::Rat(v)) => lattice_member(b, v),
            (Frame::Projected { ann, basis, .. }, GroupElem::Rat(v)) => {
                let p = RatVec(ann.iter().map(|n| dot(v, n)).collect());
                lattice_member(basis, &p)
            }
            _ => Err(Error::BackendMismatch("element kind does not match quotient".into())),
        }
    }

    fn lift(&self, c: &[Int]) -> GroupElem {
        match self {
            Frame::Presented(b) => GroupElem::Int(b.left_apply(c)),
            Frame::Lattice(b) => GroupElem::Rat(combine(b, c, b.first().map_or(0, RatVec::dim))),
            Frame::Projected { lifts, ann, .. } => {
                let dim = lifts
                    .first()
                    .map_or_else(|| ann.first().map_or(0, RatVec::dim), RatVec::dim);
                GroupElem::Rat(combine(lifts, c, dim))
            }
        }
    }
}

fn combine(vs: &[RatVec], c: &[Int], dim: usize) -> RatVec {
    vs.iter()
        .zip(c)
        .fold(RatVec::zeros(dim), |acc, (v, k)| acc.add(&v.scale_int(k)))
}

/// The quotient `G / D` in invariant-factor coordinates `Z_{d_1} + ... + Z_{d_k} + Z^f`.
#[derive(Clone, Debug)]
pub struct Quotient {
    ambient: Ambient,
    frame: Frame,
    v: IntMat,
    vinv: IntMat,
    /// SNF diagonal padded with zeros to the frame length.
    diag: Vec<Int>,
    factors: Vec<Int>,
    free_rank: usize,
}

impl Quotient {
    /// Requires `D ⊆ G`. For localized groups every slot of `G` must lie in `span(D)` and
    /// `D = G ∩ span(D)`, so that `G/D` is finitely generated.
    pub fn new(g: &Subgroup, d: &Subgroup) -> Result<Quotient> {
        if !g.contains(d)? {
            return Err(Error::DomainViolation(
                "quotient by a subgroup not contained in G".into(),
            ));
        }
        let (frame, rel) = match (g, d) {
            (Subgroup::Presented(_), Subgroup::Presented(_)) => {
                let b = g.lift_basis().expect("presented").clone();
                let rel: Vec<Vec<Int>> = d
                    .lift_basis()
                    .expect("presented")
                    .row_vecs()
                    .iter()
                    .map(|r| solve_echelon(&b, r).expect("D inside G"))
                    .collect();
                (Frame::Presented(b), rel)
            }
            (Subgroup::Rational(_), Subgroup::Rational(_)) => {
                let gd = g.descriptor().expect("rational");
                let dd = d.descriptor().expect("rational");
                if gd.is_lattice() && dd.is_lattice() {
                    let b = gd.lattice_basis().to_vec();
                    let rel = dd
                        .lattice_basis()
                        .iter()
                        .map(|r| Ok(lattice_member(&b, r)?.expect("D inside G")))
                        .collect::<Result<Vec<_>>>()?;
                    (Frame::Lattice(b), rel)
                } else {
                    (projected_frame(gd, dd)?, Vec::new())
                }
            }
            _ => return Err(Error::BackendMismatch("quotient across backends".into())),
        };
        let k = frame.len();
        let r = IntMat::from_rows(&rel, k)?;
        let s = snf(&r);
        let n = r.rows().min(k);
        let diag: Vec<Int> = (0..k)
            .map(|i| if i < n { s.d[(i, i)].clone() } else { Int::zero() })
            .collect();
        let (_, vinv) = hnf(&s.v);
        let factors: Vec<Int> = diag.iter().filter(|x| !x.is_zero() && !x.is_one()).cloned().collect();
        let free_rank = diag.iter().filter(|x| x.is_zero()).count();
        Ok(Quotient {
            ambient: g.ambient(),
            frame,
            v: s.v,
            vinv,
            diag,
            factors,
            free_rank,
        })
    }

    /// Torsion invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub fn factors(&self) -> &[Int] {
        &self.factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of elements of the torsion part.
    pub fn torsion_order(&self) -> Int {
        self.factors.iter().product()
    }

    /// Coordinates of `x + D`: torsion coordinates reduced into `[0, d_i)`, then free ones.
    /// `None` when `x` is not in `G`.
    pub fn coords(&self, x: &GroupElem) -> Result<Option<Vec<Int>>> {
        let Some(c) = self.frame.coords(x)? else {
            return Ok(None);
        };
        let c = self.v.left_apply(&c);
        Ok(Some(
            c.into_iter()
                .zip(&self.diag)
                .filter(|(_, d)| !d.is_one())
                .map(|(x, d)| if d.is_zero() { x } else { x.mod_floor(d) })
                .collect(),
        ))
    }

    /// An element of `G` with the given coordinates.
    pub fn lift(&self, coords: &[Int]) -> GroupElem {
        let mut it = coords.iter();
        let full: Vec<Int> = self
            .diag
            .iter()
            .map(|d| {
                if d.is_one() {
                    Int::zero()
                } else {
                    it.next().cloned().unwrap_or_default()
                }
            })
            .collect();
        let c = self.vinv.left_apply(&full);
        self.ambient.canon(&self.frame.lift(&c))
    }

    /// Order of `x + D`; `None` when infinite.
    pub fn order(&self, x: &GroupElem) -> Result<Option<Int>> {
        let c = self
            .coords(x)?
            .ok_or_else(|| Error::NotInAmbient(format!("{x} is not in G")))?;
        let (tors, free) = c.split_at(self.factors.len());
        if free.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        Ok(Some(
            tors.iter()
                .zip(&self.factors)
                .fold(Int::one(), |acc, (x, d)| acc.lcm(&(d / x.gcd(d)))),
        ))
    }

    pub fn is_zero(&self, x: &GroupElem) -> Result<bool> {
        Ok(self.order(x)?.is_some_and(|o| o.is_one()))
    }
}

fn projected_frame(g: &super::GroupDescriptor, d: &super::GroupDescriptor) -> Result<Frame> {
    let w = d.span_basis();
    for s in g.localized() {
        let mut ext = w.clone();
        ext.push(s.direction.clone());
        if q_rank(&ext) != w.len() {
            return Err(Error::Unsupported(
                "quotient with a localized direction outside the subgroup span".into(),
            ));
        }
    }
    if !g.restrict_to_subspace(&w)?.equals(d)? {
        return Err(Error::Unsupported(
            "quotient G/D with torsion of infinite exponent".into(),
        ));
    }
    let dim = g.dim();
    let ann = right_nullspace(&w, dim);
    let images: Vec<RatVec> = g
        .lattice_basis()
        .iter()
        .map(|l| RatVec(ann.iter().map(|n| dot(l, n)).collect()))
        .collect();
    let basis = lattice_basis(&images, ann.len())?;
    let lifts = basis
        .iter()
        .map(|b| {
            let c = lattice_member(&images, b)?.expect("basis of the image lattice");
            Ok(combine(g.lattice_basis(), &c, dim))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Frame::Projected { ann, basis, lifts })
}

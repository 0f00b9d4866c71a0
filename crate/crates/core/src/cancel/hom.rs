use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactla::{int_at, Int};
use crate::groups::{Ambient, GroupDescriptor, GroupElem, LocalizedSlot, Quotient, Subgroup};
use crate::oracle::express;

/// `f(k·u + d) = k·v + d` on `⟨u⟩ + D`. When `u + D` has finite order `n` the map needs
/// `n·u = n·v`; `⟨u⟩` may meet `D`.
#[derive(Clone, Debug)]
pub struct CyclicPiece {
    u: GroupElem,
    v: GroupElem,
    d: Subgroup,
    /// Order of `u + D` (and of `v + D`); `None` when infinite.
    order: Option<Int>,
    domain: Subgroup,
    codomain: Subgroup,
    quotient: Quotient,
}

impl CyclicPiece {
    pub fn new(u: GroupElem, v: GroupElem, d: Subgroup) -> Result<Self> {
        let amb = d.ambient();
        amb.check(&u)?;
        amb.check(&v)?;
        let domain = Subgroup::generated(&amb, std::slice::from_ref(&u))?.sum(&d)?;
        let codomain = Subgroup::generated(&amb, std::slice::from_ref(&v))?.sum(&d)?;
        let quotient = Quotient::new(&domain, &d)?;
        let ou = quotient.order(&u)?;
        let ov = Quotient::new(&codomain, &d)?.order(&v)?;
        if ou != ov {
            let show = |o: &Option<Int>| o.as_ref().map_or("infinite".to_string(), Int::to_string);
            return Err(Error::OrderMismatch(show(&ou), show(&ov)));
        }
        if let Some(n) = &ou {
            // k·u + d ↦ k·v + d is well defined iff n·u = n·v
            if !amb.equal(&amb.scale(&u, n), &amb.scale(&v, n))? {
                return Err(Error::DomainViolation(format!("{n}·{u} ≠ {n}·{v}")));
            }
        }
        Ok(CyclicPiece {
            u: amb.canon(&u),
            v: amb.canon(&v),
            d,
            order: ou,
            domain,
            codomain,
            quotient,
        })
    }

    pub fn u(&self) -> &GroupElem {
        &self.u
    }

    pub fn v(&self) -> &GroupElem {
        &self.v
    }

    pub fn d(&self) -> &Subgroup {
        &self.d
    }

    pub fn order(&self) -> Option<&Int> {
        self.order.as_ref()
    }

    /// `⟨u⟩ + D`
    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    /// `⟨v⟩ + D`
    pub fn codomain(&self) -> &Subgroup {
        &self.codomain
    }

    /// The unique `k` (in `[0, n)` for finite order `n`) with `g − k·u ∈ D`, solved from
    /// quotient coordinates.
    pub fn coefficient(&self, g: &GroupElem) -> Result<Int> {
        let outside = || Error::DomainViolation(format!("{g} is not in ⟨{}⟩ ⊕ D", self.u));
        let cg = self.quotient.coords(g)?.ok_or_else(outside)?;
        let cu = self.quotient.coords(&self.u)?.expect("u in its own domain");
        Ok(match (cg.as_slice(), &self.order) {
            ([], _) => Int::zero(),
            ([x], None) => {
                let (k, r) = x.div_rem(&cu[0]);
                if !r.is_zero() {
                    return Err(outside());
                }
                k
            }
            ([x], Some(n)) => {
                let e = cu[0].extended_gcd(n);
                (x * e.x).mod_floor(n)
            }
            _ => return Err(Error::DomainViolation("quotient by D is not cyclic".into())),
        })
    }

    /// The same coefficient found by trying `k = 0, 1, −1, 2, …` (or `0..n`) for at most
    /// `bound` values.
    pub fn coefficient_by_search(&self, g: &GroupElem, bound: usize) -> Result<Option<Int>> {
        let amb = self.d.ambient();
        for i in 0..bound {
            let k = match &self.order {
                Some(n) => {
                    let k = Int::from(i);
                    if &k >= n {
                        return Ok(None);
                    }
                    k
                }
                None => int_at(i),
            };
            if self.d.member(&amb.sub(g, &amb.scale(&self.u, &k))?)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn eval(&self, g: &GroupElem) -> Result<GroupElem> {
        let amb = self.d.ambient();
        amb.check(g)?;
        let k = self.coefficient(g)?;
        let rest = amb.sub(g, &amb.scale(&self.u, &k))?;
        debug_assert!(self.d.member(&rest)?);
        amb.add(&amb.scale(&self.v, &k), &rest)
    }

    pub fn inverse(&self) -> Result<CyclicPiece> {
        CyclicPiece::new(self.v.clone(), self.u.clone(), self.d.clone())
    }
}

/// `g ↦ Σ c_i · images_i` where `g = Σ c_i · domain_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub ambient: Ambient,
    pub domain: Vec<GroupElem>,
    pub images: Vec<GroupElem>,
}

impl LinearMap {
    pub fn new(ambient: Ambient, domain: Vec<GroupElem>, images: Vec<GroupElem>) -> Result<Self> {
        if domain.len() != images.len() {
            return Err(Error::DimensionMismatch {
                expected: domain.len(),
                found: images.len(),
            });
        }
        for x in domain.iter().chain(&images) {
            ambient.check(x)?;
        }
        Ok(LinearMap {
            ambient,
            domain,
            images,
        })
    }

    pub fn identity(sub: &Subgroup) -> Self {
        let gens = sub.gens();
        LinearMap {
            ambient: sub.ambient(),
            domain: gens.clone(),
            images: gens,
        }
    }

    pub fn eval(&self, g: &GroupElem) -> Result<GroupElem> {
        let c = express(&self.ambient, &self.domain, g)?
            .ok_or_else(|| Error::DomainViolation(format!("{g} is not generated by the domain basis")))?;
        let mut out = self.ambient.zero();
        for (k, y) in c.iter().zip(&self.images) {
            out = self.ambient.add(&out, &self.ambient.scale(y, k))?;
        }
        Ok(out)
    }
}

/// An evaluable homomorphism. Composition parts are applied first to last; the empty
/// composition is the identity.
#[derive(Clone, Debug)]
pub enum GroupHom {
    Cyclic(CyclicPiece),
    Linear(LinearMap),
    Composition(Vec<GroupHom>),
}

impl GroupHom {
    pub fn identity() -> Self {
        GroupHom::Composition(Vec::new())
    }

    /// An inverse candidate, when one is available without search.
    pub fn inverse(&self) -> Option<GroupHom> {
        match self {
            GroupHom::Cyclic(c) => c.inverse().ok().map(GroupHom::Cyclic),
            GroupHom::Linear(_) => None,
            GroupHom::Composition(parts) => {
                let inv: Option<Vec<GroupHom>> = parts.iter().rev().map(GroupHom::inverse).collect();
                inv.map(GroupHom::Composition)
            }
        }
    }
}

/// Evaluates `f` at `g`.
pub fn hom_eval(f: &GroupHom, g: &GroupElem) -> Result<GroupElem> {
    match f {
        GroupHom::Cyclic(c) => c.eval(g),
        GroupHom::Linear(l) => l.eval(g),
        GroupHom::Composition(parts) => {
            let mut x = g.clone();
            for p in parts {
                x = hom_eval(p, &x)?;
            }
            Ok(x)
        }
    }
}

/// Image `f(S)`: generated by the images of the lattice generators, with each localized slot
/// `Z_P·d` carried to `Z_P·f(d)`.
pub fn pushforward(f: &GroupHom, s: &Subgroup) -> Result<Subgroup> {
    let amb = s.ambient();
    let images = s.gens().iter().map(|g| hom_eval(f, g)).collect::<Result<Vec<_>>>()?;
    match s.descriptor() {
        Some(desc) if !desc.is_lattice() => {
            let lattice = images.iter().map(|x| x.as_rat().cloned()).collect::<Result<Vec<_>>>()?;
            let slots = desc
                .localized()
                .iter()
                .map(|slot| {
                    let img = hom_eval(f, &GroupElem::Rat(slot.direction.clone()))?;
                    Ok(LocalizedSlot {
                        direction: img.as_rat()?.clone(),
                        forbidden: slot.forbidden.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Subgroup::rational(GroupDescriptor::new(desc.dim(), &lattice, slots)?))
        }
        _ => Subgroup::generated(&amb, &images),
    }
}

/// `true` iff `g − k·u ∈ D`.
pub fn is_coefficient(piece: &CyclicPiece, g: &GroupElem, k: &Int) -> Result<bool> {
    let amb = piece.d.ambient();
    piece.d.member(&amb.sub(g, &amb.scale(&piece.u, k))?)
}

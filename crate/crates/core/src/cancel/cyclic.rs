use super::hom::{CyclicPiece, GroupHom};
use super::self_check;
use crate::error::{Error, Result};
use num_integer::Integer;
use num_traits::One;

use crate::exactla::{Int, Rat};
use crate::groups::{Ambient, DirectSumInstance, GroupElem, Quotient, Subgroup};
use crate::oracle::{express, Answer, Oracle, Query, Witness};

/// Candidates tried for `u` before giving up.
pub const CANDIDATE_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `G/D` is finite and nontrivial, with a witness from the oracle.
    FiniteNontrivial(Witness),
    InfiniteOrTrivial,
}

/// `D = G ∩ H`
pub fn intersect_d(g: &Subgroup, h: &Subgroup) -> Result<Subgroup> {
    g.intersection(h)
}

pub fn quotient_finite_nontrivial(g: &Subgroup, d: &Subgroup, oracle: &Oracle) -> Result<Branch> {
    match oracle.ask(&Query::QuotientFiniteNontrivial {
        g: g.clone(),
        d: d.clone(),
    })? {
        Answer::True(w) => Ok(Branch::FiniteNontrivial(w)),
        _ => Ok(Branch::InfiniteOrTrivial),
    }
}

/// The first `u ∈ (G − H) ∪ {0}` in canonical order whose non-generator query is false,
/// i.e. with `u + D` generating `G/D`.
pub fn find_coset_generator(
    g: &Subgroup,
    d: &Subgroup,
    h: &Subgroup,
    branch: &Branch,
    oracle: &Oracle,
) -> Result<GroupElem> {
    let amb = g.ambient();
    let mut tried = 0usize;
    for x in g.elements()? {
        if !amb.is_zero(&x) && h.member(&x)? {
            continue;
        }
        if tried == CANDIDATE_CAP {
            break;
        }
        tried += 1;
        let (u, g, d, h) = (x.clone(), g.clone(), d.clone(), h.clone());
        let q = match branch {
            Branch::FiniteNontrivial(_) => Query::NonGeneratorFinite { u, g, d, h },
            Branch::InfiniteOrTrivial => Query::NonGeneratorInfinite { u, g, d, h },
        };
        if oracle.ask(&q)? == Answer::False {
            return Ok(x);
        }
    }
    Err(Error::Unsupported(format!(
        "no coset generator among the first {tried} candidates"
    )))
}

/// Some `y ∈ D` with `n·y = x`.
fn divide_in(d: &Subgroup, x: &GroupElem, n: &Int) -> Result<Option<GroupElem>> {
    let amb = d.ambient();
    if let Ambient::Rational(_) = amb {
        let y = amb.scale_rat(x, &Rat::new(1, n.clone()))?;
        return Ok(if d.member(&y)? { Some(y) } else { None });
    }
    let gens = d.gens();
    let scaled: Vec<GroupElem> = gens.iter().map(|g| amb.scale(g, n)).collect();
    let Some(c) = express(&amb, &scaled, x)? else {
        return Ok(None);
    };
    let mut y = amb.zero();
    for (k, g) in c.iter().zip(&gens) {
        y = amb.add(&y, &amb.scale(g, k))?;
    }
    Ok(Some(y))
}

/// Replaces the coset generator `v` of `H/D` by `j·v + y` (`j` a unit mod `n`, `y ∈ D`)
/// so that `n·v = n·u`, where `n` is the order of `u + D`. Both `n·u` and `n·v` lie in
/// `D` and generate the same subgroup of `D/nD`, so such `j` and `y` exist.
pub fn align_generator(u: &GroupElem, v: &GroupElem, d: &Subgroup, n: &Int) -> Result<GroupElem> {
    let amb = d.ambient();
    let nu = amb.scale(u, n);
    let nv = amb.scale(v, n);
    let mut j = Int::one();
    while &j < n {
        if j.gcd(n).is_one() {
            let rest = amb.sub(&nu, &amb.scale(&nv, &j))?;
            if let Some(y) = divide_in(d, &rest, n)? {
                return amb.add(&amb.scale(v, &j), &y);
            }
        }
        j += 1u32;
    }
    Err(Error::DomainViolation(format!(
        "no unit multiple of {v} matches {n}·{u} modulo {n}·D"
    )))
}

pub fn build_cyclic_iso(u: &GroupElem, v: &GroupElem, d: &Subgroup) -> Result<GroupHom> {
    Ok(GroupHom::Cyclic(CyclicPiece::new(u.clone(), v.clone(), d.clone())?))
}

/// The data behind one cyclic cancellation.
#[derive(Clone, Debug)]
pub struct CyclicTrace {
    pub u: GroupElem,
    pub v: GroupElem,
    pub d: Subgroup,
    pub g: Subgroup,
    pub h: Subgroup,
    pub order: Option<Int>,
}

/// Cancels a cyclic `A ≅ B`.
pub fn cancel_cyclic(inst: &DirectSumInstance, oracle: &Oracle) -> Result<GroupHom> {
    cancel_cyclic_traced(inst, oracle).map(|(f, _)| f)
}

pub fn cancel_cyclic_traced(inst: &DirectSumInstance, oracle: &Oracle) -> Result<(GroupHom, CyclicTrace)> {
    let trivial = Subgroup::trivial(&inst.ambient);
    for (name, s) in [("A", &inst.a), ("B", &inst.b)] {
        if !s.is_finitely_generated() {
            return Err(Error::InvalidInstance(vec![format!(
                "{name} is not finitely generated"
            )]));
        }
        let q = Quotient::new(s, &trivial)?;
        if q.factors().len() + q.free_rank() > 1 {
            return Err(Error::InvalidInstance(vec![format!("{name} is not cyclic")]));
        }
    }
    let d = intersect_d(&inst.g, &inst.h)?;
    // G/D and H/D are cyclic of the same order, so one branch serves both sides
    let branch = quotient_finite_nontrivial(&inst.g, &d, oracle)?;
    let mut u = find_coset_generator(&inst.g, &d, &inst.h, &branch, oracle)?;
    let mut v = find_coset_generator(&inst.h, &d, &inst.g, &branch, oracle)?;
    if let Branch::FiniteNontrivial(_) = branch {
        let amb = &inst.ambient;
        let n = Quotient::new(&Subgroup::generated(amb, std::slice::from_ref(&u))?.sum(&d)?, &d)?
            .order(&u)?
            .ok_or_else(|| Error::Unsupported("finite branch with an element of infinite order".into()))?;
        // a cyclic complement of D exists iff n·u ∈ n·D; shift u onto it when it does
        if let Some(y) = divide_in(&d, &amb.scale(&u, &n), &n)? {
            u = amb.canon(&amb.sub(&u, &y)?);
        }
        v = amb.canon(&align_generator(&u, &v, &d, &n)?);
    }
    let piece = CyclicPiece::new(u.clone(), v.clone(), d.clone())?;
    let order = piece.order().cloned();
    let f = GroupHom::Cyclic(piece);
    self_check(&inst.g, &inst.h, &f)?;
    Ok((
        f,
        CyclicTrace {
            u,
            v,
            d,
            g: inst.g.clone(),
            h: inst.h.clone(),
            order,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cancel::hom_eval;
    use crate::exactla::IntMat;
    use crate::groups::{Ambient, PresentedGroup};

    fn sub(p: &PresentedGroup, gens: &[&[i64]]) -> Subgroup {
        let gens = gens.iter().map(|g| g.iter().map(|&x| Int::from(x)).collect()).collect();
        Subgroup::presented(p, gens).unwrap()
    }

    // Z ⊕ Z/3 with G = ⟨(1,0)⟩, H = ⟨(1,1)⟩: D = ⟨(3,0)⟩ has no cyclic complement in G
    #[test]
    fn no_complement() {
        let p = PresentedGroup::new(2, IntMat::from_i64(&[&[0], &[3]])).unwrap();
        let inst = DirectSumInstance {
            ambient: Ambient::Presented(p.clone()),
            e: Subgroup::whole(&p),
            a: sub(&p, &[&[0, 1]]),
            b: sub(&p, &[&[0, 1]]),
            g: sub(&p, &[&[1, 0]]),
            h: sub(&p, &[&[1, 1]]),
            rank: 0,
            generators: None,
        };
        let (f, t) = cancel_cyclic_traced(&inst, &Oracle::exact()).unwrap();
        assert!(t.d.equals(&sub(&p, &[&[3, 0]])).unwrap());
        assert_eq!(t.order, Some(Int::from(3)));
        let amb = &inst.ambient;
        let three = Int::from(3);
        assert!(amb.equal(&amb.scale(&t.u, &three), &amb.scale(&t.v, &three)).unwrap());
        let y = hom_eval(&f, &GroupElem::ints(&[1, 0])).unwrap();
        assert!(inst.h.member(&y).unwrap());
        assert!(amb
            .equal(
                &hom_eval(&f, &GroupElem::ints(&[3, 0])).unwrap(),
                &GroupElem::ints(&[3, 0])
            )
            .unwrap());
    }

    #[test]
    fn alignment_uses_a_unit() {
        // u = 1, v = −1 over D = 3Z: j = 1 leaves 6 ∉ 3·D, j = 2 gives y = 3
        let z = PresentedGroup::free(1);
        let d = sub(&z, &[&[3]]);
        let v = align_generator(&GroupElem::ints(&[1]), &GroupElem::ints(&[-1]), &d, &Int::from(3)).unwrap();
        let amb = d.ambient();
        assert!(amb
            .equal(&amb.scale(&v, &Int::from(3)), &GroupElem::ints(&[3]))
            .unwrap());
    }
}

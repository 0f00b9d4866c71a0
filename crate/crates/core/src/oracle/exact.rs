use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{check, express, Answer, Query, Witness};
use crate::error::{Error, Result};
use crate::exactla::{det, Int, IntMat};
use crate::groups::{Ambient, GroupElem, Quotient, Subgroup};

/// Decides `q` from the structure of `G/D` (or of `A`). Never returns `Exhausted`.
pub fn decide_exact(q: &Query) -> Result<Answer> {
    let amb = q.ambient()?;
    let ans = match q {
        Query::QuotientFiniteNontrivial { g, d } => quotient_finite_nontrivial(g, d)?,
        Query::NonGeneratorFinite { u, g, d, h } => non_generator_finite(&amb, u, g, d, h)?,
        Query::NonGeneratorInfinite { u, g, d, .. } => non_generator_infinite(&amb, u, g, d)?,
        Query::TorsionRemains { a, found } => torsion_remains(&amb, a, found)?,
        Query::NonGeneratingSet {
            a,
            torsion_gens,
            candidates,
        } => non_generating_set(&amb, a, torsion_gens, candidates)?,
    };
    if let Answer::True(w) = &ans {
        if !check(q, w)? {
            return Err(Error::VerificationFailed(format!(
                "{} witness {w} does not satisfy its predicate",
                q.name()
            )));
        }
    }
    Ok(ans)
}

fn unit(len: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); len];
    v[i] = Int::one();
    v
}

/// A generator of `G/D` of maximal order.
fn quotient_finite_nontrivial(g: &Subgroup, d: &Subgroup) -> Result<Answer> {
    let q = Quotient::new(g, d)?;
    let k = q.factors().len();
    if k == 0 {
        return Ok(Answer::False);
    }
    let len = k + q.free_rank();
    let x = q.lift(&unit(len, k - 1));
    Ok(Answer::True(Witness::QuotientFiniteNontrivial {
        x,
        n: q.factors()[k - 1].clone(),
    }))
}

fn non_generator_finite(amb: &Ambient, u: &GroupElem, g: &Subgroup, d: &Subgroup, _h: &Subgroup) -> Result<Answer> {
    let q = Quotient::new(g, d)?;
    let Some(n) = q.order(u)? else { return Ok(Answer::False) };
    let du = d.sum(&Subgroup::generated(amb, std::slice::from_ref(u))?)?;
    let rest = Quotient::new(g, &du)?;
    if rest.is_trivial() {
        return Ok(Answer::False);
    }
    let len = q.factors().len() + q.free_rank();
    for i in 0..len {
        let x = q.lift(&unit(len, i));
        if !rest.is_zero(&x)? {
            return Ok(Answer::True(Witness::NonGeneratorFinite { u_tilde: x, n }));
        }
    }
    unreachable!("some generator of G/D lies outside <u> + D")
}

fn non_generator_infinite(amb: &Ambient, u: &GroupElem, g: &Subgroup, d: &Subgroup) -> Result<Answer> {
    let q = Quotient::new(g, d)?;
    let c = q
        .coords(u)?
        .ok_or_else(|| Error::NotInAmbient(format!("{u} is not in G")))?;
    let k = q.factors().len();
    let len = c.len();
    match q.order(u)? {
        Some(o) if o.is_one() => {
            if q.is_trivial() {
                return Ok(Answer::False);
            }
            Ok(Answer::True(Witness::NonGeneratorInfinite {
                u_tilde: q.lift(&unit(len, 0)),
                n: Int::zero(),
            }))
        }
        Some(o) => Ok(Answer::True(Witness::NonGeneratorInfinite {
            u_tilde: amb.canon(u),
            n: o + 1u32,
        })),
        None => {
            let (tors, free) = c.split_at(k);
            let g0 = free.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
            for p in prime_divisors(&g0) {
                let ok = tors.iter().zip(q.factors()).all(|(x, dd)| x.is_multiple_of(&p.gcd(dd)));
                if !ok {
                    continue;
                }
                let mut y: Vec<Int> = tors
                    .iter()
                    .zip(q.factors())
                    .map(|(x, dd)| {
                        if p.gcd(dd).is_one() {
                            (x * mod_inverse(&p, dd)).mod_floor(dd)
                        } else {
                            x / &p
                        }
                    })
                    .collect();
                y.extend(free.iter().map(|f| f / &p));
                return Ok(Answer::True(Witness::NonGeneratorInfinite {
                    u_tilde: q.lift(&y),
                    n: p,
                }));
            }
            Ok(Answer::False)
        }
    }
}

fn prime_divisors(n: &Int) -> Vec<Int> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = Int::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > Int::one() {
        out.push(n);
    }
    out
}

fn mod_inverse(a: &Int, m: &Int) -> Int {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}

/// All torsion elements of `A`, in canonical order.
pub(crate) fn torsion_elements(amb: &Ambient, a: &Subgroup) -> Result<Vec<GroupElem>> {
    let q = Quotient::new(a, &Subgroup::trivial(amb))?;
    let k = q.factors().len();
    let len = k + q.free_rank();
    let mut out = Vec::new();
    let mut c = vec![Int::zero(); len];
    loop {
        out.push(q.lift(&c));
        let mut i = 0;
        loop {
            if i == k {
                out.sort_by(|x, y| amb.canonical_cmp(x, y));
                return Ok(out);
            }
            c[i] += 1u32;
            if c[i] < q.factors()[i] {
                break;
            }
            c[i] = Int::zero();
            i += 1;
        }
    }
}

fn torsion_remains(amb: &Ambient, a: &Subgroup, found: &[GroupElem]) -> Result<Answer> {
    let q = Quotient::new(a, &Subgroup::trivial(amb))?;
    let seen: HashSet<GroupElem> = found.iter().map(|y| amb.canon(y)).collect();
    for x in torsion_elements(amb, a)? {
        if !seen.contains(&amb.canon(&x)) {
            let n = q.order(&x)?.expect("torsion element");
            return Ok(Answer::True(Witness::TorsionRemains { a: x, n }));
        }
    }
    Ok(Answer::False)
}

fn non_generating_set(
    amb: &Ambient,
    a: &Subgroup,
    torsion_gens: &[GroupElem],
    candidates: &[GroupElem],
) -> Result<Answer> {
    let q = Quotient::new(a, &Subgroup::trivial(amb))?;
    let r = q.free_rank();
    if candidates.len() != r {
        return Err(Error::RankMismatch {
            declared: candidates.len(),
            computed: r,
        });
    }
    let k = q.factors().len();
    let mut n_rows = Vec::with_capacity(r);
    for c in candidates {
        let co = q
            .coords(c)?
            .ok_or_else(|| Error::NotInAmbient(format!("{c} is not in A")))?;
        n_rows.push(co[k..].to_vec());
    }
    let n = IntMat::from_rows(&n_rows, r)?;
    if det(&n)?.abs().is_one() {
        return Ok(Answer::False);
    }
    let a_tilde: Vec<GroupElem> = (0..r).map(|j| q.lift(&unit(k + r, k + j))).collect();
    let mut m_rows = Vec::with_capacity(r);
    for (l, c) in candidates.iter().enumerate() {
        let mut t = c.clone();
        for (j, at) in a_tilde.iter().enumerate() {
            t = amb.sub(&t, &amb.scale(at, &n[(l, j)]))?;
        }
        let coef = express(amb, torsion_gens, &t)?
            .ok_or_else(|| Error::DomainViolation("torsion generators do not generate the torsion subgroup".into()))?;
        m_rows.push(coef);
    }
    let m = IntMat::from_rows(&m_rows, torsion_gens.len())?;
    Ok(Answer::True(Witness::NonGeneratingSet { a_tilde, m, n }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::PresentedGroup;

    fn ints(x: &[i64]) -> Vec<Int> {
        x.iter().map(|&a| Int::from(a)).collect()
    }

    fn sub(p: &PresentedGroup, gens: &[&[i64]]) -> Subgroup {
        Subgroup::presented(p, gens.iter().map(|g| ints(g)).collect()).unwrap()
    }

    #[test]
    fn free_quotient_is_not_finite() {
        let z2 = PresentedGroup::free(2);
        let q = Query::QuotientFiniteNontrivial {
            g: sub(&z2, &[&[0, 1]]),
            d: sub(&z2, &[]),
        };
        assert_eq!(decide_exact(&q).unwrap(), Answer::False);
        let g = sub(&z2, &[&[0, 1]]);
        let q = Query::QuotientFiniteNontrivial { g: g.clone(), d: g };
        assert_eq!(decide_exact(&q).unwrap(), Answer::False);
    }

    #[test]
    fn z4_mod_2() {
        let z4 = PresentedGroup::new(1, IntMat::from_i64(&[&[4]])).unwrap();
        let q = Query::QuotientFiniteNontrivial {
            g: Subgroup::whole(&z4),
            d: sub(&z4, &[&[2]]),
        };
        match decide_exact(&q).unwrap() {
            Answer::True(Witness::QuotientFiniteNontrivial { x, n }) => {
                assert_eq!(n, Int::from(2));
                assert_eq!(x, GroupElem::ints(&[1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn torsion_witness() {
        let p = PresentedGroup::new(2, IntMat::from_i64(&[&[2], &[0]])).unwrap();
        let q = Query::TorsionRemains {
            a: Subgroup::whole(&p),
            found: vec![GroupElem::ints(&[0, 0])],
        };
        assert_eq!(
            decide_exact(&q).unwrap(),
            Answer::True(Witness::TorsionRemains {
                a: GroupElem::ints(&[1, 0]),
                n: Int::from(2)
            })
        );
        let q = Query::TorsionRemains {
            a: Subgroup::whole(&p),
            found: vec![GroupElem::ints(&[0, 0]), GroupElem::ints(&[1, 0])],
        };
        assert_eq!(decide_exact(&q).unwrap(), Answer::False);
    }

    #[test]
    fn zero_is_rejected_when_quotient_is_infinite() {
        let z2 = PresentedGroup::free(2);
        let q = Query::NonGeneratorInfinite {
            u: GroupElem::ints(&[0, 0]),
            g: sub(&z2, &[&[0, 1]]),
            d: sub(&z2, &[]),
            h: sub(&z2, &[&[1, 0]]),
        };
        assert!(matches!(decide_exact(&q).unwrap(), Answer::True(_)));
        let q = Query::NonGeneratorInfinite {
            u: GroupElem::ints(&[0, 2]),
            g: sub(&z2, &[&[0, 1]]),
            d: sub(&z2, &[]),
            h: sub(&z2, &[&[1, 0]]),
        };
        assert!(matches!(
            decide_exact(&q).unwrap(),
            Answer::True(Witness::NonGeneratorInfinite { .. })
        ));
        let q = Query::NonGeneratorInfinite {
            u: GroupElem::ints(&[0, -1]),
            g: sub(&z2, &[&[0, 1]]),
            d: sub(&z2, &[]),
            h: sub(&z2, &[&[1, 0]]),
        };
        assert_eq!(decide_exact(&q).unwrap(), Answer::False);
    }

    #[test]
    fn claim_examples() {
        let z2 = PresentedGroup::free(2);
        let a = Subgroup::whole(&z2);
        let ask = |c: &[&[i64]]| {
            let candidates = c.iter().map(|x| GroupElem::ints(x)).collect();
            decide_exact(&Query::NonGeneratingSet {
                a: a.clone(),
                torsion_gens: vec![],
                candidates,
            })
            .unwrap()
        };
        assert_eq!(ask(&[&[1, 0], &[0, 1]]), Answer::False);
        assert_eq!(ask(&[&[1, 1], &[0, 1]]), Answer::False);
        match ask(&[&[2, 0], &[0, 1]]) {
            Answer::True(Witness::NonGeneratingSet { n, .. }) => assert_eq!(det(&n).unwrap().abs(), Int::from(2)),
            other => panic!("{other:?}"),
        }
    }
}

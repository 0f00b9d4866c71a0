use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::Int;
use crate::groups::{GroupElem, Quotient, Subgroup};
use crate::oracle::{Answer, Oracle, Query, Witness};

use super::cyclic::CANDIDATE_CAP;

/// Generators realizing `A ≅ Z_{q_1} ⊕ … ⊕ Z_{q_k} ⊕ Z^r` with `q_1 | … | q_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors {
    /// Torsion generators with their orders, in divisibility order.
    pub torsion: Vec<(GroupElem, Int)>,
    pub free: Vec<GroupElem>,
}

impl InvariantFactors {
    pub fn k(&self) -> usize {
        self.torsion.len()
    }

    pub fn r(&self) -> usize {
        self.free.len()
    }

    pub fn factors(&self) -> Vec<Int> {
        self.torsion.iter().map(|(_, q)| q.clone()).collect()
    }

    pub fn torsion_gens(&self) -> Vec<GroupElem> {
        self.torsion.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Cyclic pieces, torsion first; `None` marks infinite order.
    pub fn pieces(&self) -> Vec<(GroupElem, Option<Int>)> {
        let t = self.torsion.iter().map(|(x, q)| (x.clone(), Some(q.clone())));
        t.chain(self.free.iter().map(|x| (x.clone(), None))).collect()
    }
}

/// All torsion elements of `A`, collected one oracle witness at a time and sorted
/// canonically.
pub fn torsion_subgroup(a: &Subgroup, oracle: &Oracle) -> Result<Vec<GroupElem>> {
    let amb = a.ambient();
    let mut found = vec![amb.zero()];
    loop {
        let q = Query::TorsionRemains {
            a: a.clone(),
            found: found.clone(),
        };
        match oracle.ask(&q)? {
            Answer::True(Witness::TorsionRemains { a: x, .. }) => found.push(amb.canon(&x)),
            Answer::True(w) => return Err(Error::VerificationFailed(format!("unexpected witness {w}"))),
            _ => break,
        }
    }
    found.sort_by(|x, y| amb.canonical_cmp(x, y));
    Ok(found)
}

pub fn not_generating_set(
    a: &Subgroup,
    torsion_gens: &[GroupElem],
    candidates: &[GroupElem],
    oracle: &Oracle,
) -> Result<Answer> {
    oracle.ask(&Query::NonGeneratingSet {
        a: a.clone(),
        torsion_gens: torsion_gens.to_vec(),
        candidates: candidates.to_vec(),
    })
}

/// Visits the `k`-subsets of `0..n` in lexicographic order while `visit` returns `true`.
fn combinations(
    n: usize,
    k: usize,
    prune: &mut dyn FnMut(&[usize]) -> bool,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        prune: &mut dyn FnMut(&[usize]) -> bool,
        visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if cur.len() == k {
            return visit(cur);
        }
        for i in start..n {
            cur.push(i);
            let go = if prune(cur) {
                true
            } else {
                rec(i + 1, n, k, cur, prune, visit)?
            };
            cur.pop();
            if !go {
                return Ok(false);
            }
        }
        Ok(true)
    }
    rec(0, n, k, &mut Vec::with_capacity(k), prune, visit)
}

/// The smallest subset of `A_f`, first in canonical order, whose orders form a divisibility
/// chain with product `|A_f|` and which generates `A_f`.
fn torsion_basis(a: &Subgroup, tors: &[GroupElem], orders: &[Int]) -> Result<Vec<(GroupElem, Int)>> {
    let amb = a.ambient();
    let size = Int::from(tors.len());
    let nonzero: Vec<usize> = (0..tors.len()).filter(|&i| !amb.is_zero(&tors[i])).collect();
    let trivial = Subgroup::trivial(&amb);
    for k in 0..=nonzero.len() {
        let mut hit = None;
        let mut prune = |s: &[usize]| {
            let p = s.iter().fold(Int::one(), |acc, &i| acc * &orders[nonzero[i]]);
            !(&size % &p).is_zero()
        };
        let mut visit = |s: &[usize]| -> Result<bool> {
            let mut idx: Vec<usize> = s.iter().map(|&i| nonzero[i]).collect();
            idx.sort_by(|&x, &y| orders[x].cmp(&orders[y]).then(x.cmp(&y)));
            let qs: Vec<&Int> = idx.iter().map(|&i| &orders[i]).collect();
            let chain = qs.windows(2).all(|w| w[1].is_multiple_of(w[0]));
            let product = qs.iter().fold(Int::one(), |acc, q| acc * *q);
            if !chain || product != size {
                return Ok(true);
            }
            let gens: Vec<GroupElem> = idx.iter().map(|&i| tors[i].clone()).collect();
            let q = Quotient::new(&Subgroup::generated(&amb, &gens)?, &trivial)?;
            if q.free_rank() == 0 && q.torsion_order() == size {
                hit = Some(idx.iter().map(|&i| (tors[i].clone(), orders[i].clone())).collect());
                return Ok(false);
            }
            Ok(true)
        };
        combinations(nonzero.len(), k, &mut prune, &mut visit)?;
        if let Some(basis) = hit {
            return Ok(basis);
        }
    }
    Err(Error::VerificationFailed(
        "torsion subgroup has no invariant-factor basis".into(),
    ))
}

/// Strictly increasing `r`-tuples ordered by (maximum, lexicographic).
fn increasing_tuples(r: usize) -> impl Iterator<Item = Vec<usize>> {
    (r.saturating_sub(1)..).flat_map(move |m| {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(r);
        fn rec(start: usize, m: usize, need: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if need == 0 {
                let mut t = cur.clone();
                t.push(m);
                out.push(t);
                return;
            }
            for i in start..m {
                cur.push(i);
                rec(i + 1, m, need - 1, cur, out);
                cur.pop();
            }
        }
        rec(0, m, r - 1, &mut cur, &mut out);
        out
    })
}

/// Invariant-factor generators of a finitely generated `A` of rank `r`.
pub fn invariant_factors(a: &Subgroup, r: usize, oracle: &Oracle) -> Result<InvariantFactors> {
    if !a.is_finitely_generated() {
        return Err(Error::InvalidInstance(vec!["group is not finitely generated".into()]));
    }
    let amb = a.ambient();
    let q0 = Quotient::new(a, &Subgroup::trivial(&amb))?;
    if q0.free_rank() != r {
        return Err(Error::RankMismatch {
            declared: r,
            computed: q0.free_rank(),
        });
    }
    let tors = torsion_subgroup(a, oracle)?;
    let orders = tors
        .iter()
        .map(|x| {
            q0.order(x)?
                .ok_or_else(|| Error::VerificationFailed(format!("{x} has infinite order")))
        })
        .collect::<Result<Vec<_>>>()?;
    let torsion = torsion_basis(a, &tors, &orders)?;
    let torsion_gens: Vec<GroupElem> = torsion.iter().map(|(x, _)| x.clone()).collect();
    if r == 0 {
        return Ok(InvariantFactors {
            torsion,
            free: Vec::new(),
        });
    }
    let mut pool: Vec<GroupElem> = Vec::new();
    let mut source = a.elements()?.filter(|x| !tors.iter().any(|t| t == x));
    for (tried, idx) in increasing_tuples(r).enumerate() {
        if tried == CANDIDATE_CAP {
            break;
        }
        let top = idx[r - 1];
        while pool.len() <= top {
            pool.push(source.next().expect("a group of positive rank is infinite"));
        }
        let cand: Vec<GroupElem> = idx.iter().map(|&i| pool[i].clone()).collect();
        if not_generating_set(a, &torsion_gens, &cand, oracle)? == Answer::False {
            return Ok(InvariantFactors { torsion, free: cand });
        }
    }
    Err(Error::Unsupported(format!(
        "no free basis among the first {CANDIDATE_CAP} candidate sets"
    )))
}

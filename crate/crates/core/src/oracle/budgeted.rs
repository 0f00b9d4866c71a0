use super::exact::torsion_elements;
use super::{check, express, Answer, Query, Witness};
use crate::error::Result;
use num_traits::{One, Signed};

use crate::exactla::{det, int_at, Int, IntMat};
use crate::groups::{Ambient, GroupElem, Subgroup};

#[derive(Clone, Debug)]
enum Val {
    Elem(GroupElem),
    Int(Int),
}

impl Val {
    fn elem(&self) -> &GroupElem {
        match self {
            Val::Elem(x) => x,
            Val::Int(_) => unreachable!("stream kinds fixed per query"),
        }
    }

    fn int(&self) -> &Int {
        match self {
            Val::Int(x) => x,
            Val::Elem(_) => unreachable!("stream kinds fixed per query"),
        }
    }
}

/// A lazily materialized candidate stream.
struct Stream {
    cache: Vec<Val>,
    src: Box<dyn Iterator<Item = Val>>,
    finished: bool,
}

impl Stream {
    fn new(src: impl Iterator<Item = Val> + 'static) -> Self {
        Stream {
            cache: Vec::new(),
            src: Box::new(src),
            finished: false,
        }
    }

    fn get(&mut self, i: usize) -> Option<Val> {
        while self.cache.len() <= i && !self.finished {
            match self.src.next() {
                Some(v) => self.cache.push(v),
                None => self.finished = true,
            }
        }
        self.cache.get(i).cloned()
    }

    /// Known length, once the stream has run out.
    fn len_if_finished(&self) -> Option<usize> {
        self.finished.then_some(self.cache.len())
    }
}

fn elems(sub: &Subgroup, keep: impl Fn(&GroupElem) -> bool + 'static) -> Result<Stream> {
    Ok(Stream::new(sub.elements()?.filter(move |x| keep(x)).map(Val::Elem)))
}

fn ints_from(start: i64, skip_one: bool) -> Stream {
    Stream::new(
        (start..)
            .filter(move |&n| !(skip_one && n == 1))
            .map(|n| Val::Int(Int::from(n))),
    )
}

fn all_ints() -> Stream {
    Stream::new((0..).map(|i| Val::Int(int_at(i))))
}

/// Index tuples with maximum `level`, in lexicographic order. `caps[p]` bounds position
/// `p` when its stream is known to be finite.
fn level_tuples(caps: &[Option<usize>], level: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        t: &mut Vec<usize>,
        caps: &[Option<usize>],
        level: usize,
        hit: bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let p = t.len();
        if p == caps.len() {
            return visit(t);
        }
        let top = caps[p].map_or(level, |c| c.min(level));
        // the last position must reach `level` unless an earlier one did
        let start = if p + 1 == caps.len() && !hit { level } else { 0 };
        for i in start..=top {
            t.push(i);
            let go = rec(t, caps, level, hit || i == level, visit);
            t.pop();
            if !go {
                return false;
            }
        }
        true
    }
    rec(&mut Vec::with_capacity(caps.len()), caps, level, false, &mut visit)
}

enum Outcome {
    Found(Witness),
    SpaceExhausted,
    BudgetExhausted(u64),
}

/// Dovetails over the product of `streams` in order of (maximum index, lexicographic),
/// testing each tuple with `test`; the budget counts tested tuples.
fn dovetail(
    streams: &mut [Stream],
    budget: u64,
    mut test: impl FnMut(&[Val]) -> Result<Option<Witness>>,
) -> Result<Outcome> {
    let width = streams.len();
    if width == 0 {
        if budget == 0 {
            return Ok(Outcome::BudgetExhausted(0));
        }
        return Ok(match test(&[])? {
            Some(w) => Outcome::Found(w),
            None => Outcome::SpaceExhausted,
        });
    }
    let mut used = 0u64;
    let mut level = 0usize;
    loop {
        if streams.iter().any(|s| s.len_if_finished() == Some(0)) {
            return Ok(Outcome::SpaceExhausted);
        }
        let bound = streams.iter().map(|s| s.len_if_finished()).collect::<Option<Vec<_>>>();
        if let Some(lens) = &bound {
            if lens.iter().all(|&l| l <= level) {
                return Ok(Outcome::SpaceExhausted);
            }
        }
        let caps: Vec<Option<usize>> = streams.iter().map(|s| s.len_if_finished().map(|l| l - 1)).collect();
        let mut result: Result<Option<Outcome>> = Ok(None);
        level_tuples(&caps, level, |idx| {
            let mut vals = Vec::with_capacity(width);
            for (s, &i) in streams.iter_mut().zip(idx) {
                match s.get(i) {
                    Some(v) => vals.push(v),
                    None => return true,
                }
            }
            if used == budget {
                result = Ok(Some(Outcome::BudgetExhausted(used)));
                return false;
            }
            used += 1;
            match test(&vals) {
                Ok(Some(w)) => {
                    result = Ok(Some(Outcome::Found(w)));
                    false
                }
                Ok(None) => true,
                Err(e) => {
                    result = Err(e);
                    false
                }
            }
        });
        if let Some(out) = result? {
            return Ok(out);
        }
        level += 1;
    }
}

fn not_in(h: &Subgroup) -> impl Fn(&GroupElem) -> bool + 'static {
    let h = h.clone();
    move |x| !h.member(x).unwrap_or(true)
}

/// `G − H` as a stream. An empty difference is detected up front, since filtering an
/// infinite `G ⊆ H` would never yield.
fn difference(g: &Subgroup, h: &Subgroup) -> Result<Stream> {
    if h.contains(g)? {
        return Ok(Stream::new(std::iter::empty()));
    }
    elems(g, not_in(h))
}

/// Runs the search behind `q` over at most `budget` candidate tuples.
///
/// A found witness gives `True`. Otherwise the answer is `False` when the search space ran
/// out or `truth` says the search never succeeds, and `Exhausted` when nothing is known.
pub fn decide_budgeted(q: &Query, budget: u64, truth: Option<bool>) -> Result<Answer> {
    let amb = q.ambient()?;
    let candidate = |w: Witness| -> Result<Option<Witness>> { Ok(check(q, &w)?.then_some(w)) };
    let outcome = match q {
        Query::QuotientFiniteNontrivial { g, .. } => {
            let mut s = [elems(g, |_| true)?, ints_from(1, false)];
            dovetail(&mut s, budget, |v| {
                candidate(Witness::QuotientFiniteNontrivial {
                    x: v[0].elem().clone(),
                    n: v[1].int().clone(),
                })
            })?
        }
        Query::NonGeneratorFinite { g, h, .. } => {
            let mut s = [difference(g, h)?, ints_from(1, false)];
            dovetail(&mut s, budget, |v| {
                candidate(Witness::NonGeneratorFinite {
                    u_tilde: v[0].elem().clone(),
                    n: v[1].int().clone(),
                })
            })?
        }
        Query::NonGeneratorInfinite { g, h, .. } => {
            let mut s = [difference(g, h)?, ints_from(0, true)];
            dovetail(&mut s, budget, |v| {
                candidate(Witness::NonGeneratorInfinite {
                    u_tilde: v[0].elem().clone(),
                    n: v[1].int().clone(),
                })
            })?
        }
        Query::TorsionRemains { a, .. } => {
            let mut s = [elems(a, |_| true)?, ints_from(1, false)];
            dovetail(&mut s, budget, |v| {
                candidate(Witness::TorsionRemains {
                    a: v[0].elem().clone(),
                    n: v[1].int().clone(),
                })
            })?
        }
        Query::NonGeneratingSet {
            a,
            torsion_gens,
            candidates,
        } => non_generating_search(&amb, q, a, torsion_gens, candidates, budget)?,
    };
    Ok(match outcome {
        Outcome::Found(w) => Answer::True(w),
        Outcome::SpaceExhausted => Answer::False,
        Outcome::BudgetExhausted(used) => match truth {
            Some(false) => Answer::False,
            _ => Answer::Exhausted { budget_used: used },
        },
    })
}

/// Search form of the generating-set criterion: tuples `(ã_1..ã_r, N)` with `M` recovered
/// by solving inside the torsion subgroup.
fn non_generating_search(
    amb: &Ambient,
    q: &Query,
    a: &Subgroup,
    torsion_gens: &[GroupElem],
    candidates: &[GroupElem],
    budget: u64,
) -> Result<Outcome> {
    let r = candidates.len();
    let torsion = torsion_elements(amb, a)?;
    let free_part = {
        let amb = amb.clone();
        move |x: &GroupElem| !torsion.iter().any(|t| amb.equal(x, t).unwrap_or(false))
    };
    let mut streams: Vec<Stream> = Vec::with_capacity(r + r * r);
    for _ in 0..r {
        let keep = free_part.clone();
        streams.push(elems(a, keep)?);
    }
    for _ in 0..r * r {
        streams.push(all_ints());
    }
    dovetail(&mut streams, budget, |v| {
        let a_tilde: Vec<GroupElem> = v[..r].iter().map(|x| x.elem().clone()).collect();
        let n_rows: Vec<Vec<Int>> = (0..r)
            .map(|l| (0..r).map(|j| v[r + l * r + j].int().clone()).collect())
            .collect();
        let n = IntMat::from_rows(&n_rows, r)?;
        if det(&n)?.abs().is_one() {
            return Ok(None);
        }
        let mut m_rows = Vec::with_capacity(r);
        for (l, c) in candidates.iter().enumerate() {
            let mut t = c.clone();
            for (j, at) in a_tilde.iter().enumerate() {
                t = amb.sub(&t, &amb.scale(at, &n[(l, j)]))?;
            }
            match express(amb, torsion_gens, &t)? {
                Some(coef) => m_rows.push(coef),
                None => return Ok(None),
            }
        }
        let m = IntMat::from_rows(&m_rows, torsion_gens.len())?;
        let w = Witness::NonGeneratingSet { a_tilde, m, n };
        Ok(check(q, &w)?.then_some(w))
    })
}

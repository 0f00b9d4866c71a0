//! Simulated halting-set oracle for the five existential searches of the cancellation
//! algorithm.
//!
//! Every query asks whether a search over group elements and integers ever succeeds.
//! [`decide_exact`] answers from the structure of the quotient groups; [`decide_budgeted`]
//! runs the search itself for a bounded number of candidate tuples and falls back on a
//! ground-truth flag.

mod budgeted;
mod exact;

use std::fmt;

use num_traits::{One, Signed, Zero};

pub use budgeted::decide_budgeted;
pub use exact::decide_exact;

use crate::error::{Error, Result};
use crate::exactla::{det, lattice_member, Int, IntMat, RatVec};
use crate::groups::{Ambient, GroupElem, Quotient, Subgroup};

#[derive(Clone, Debug)]
pub enum Query {
    /// `∃x ∈ G ∃n > 0 [n·x ∈ D ∧ x ∉ D]`
    QuotientFiniteNontrivial { g: Subgroup, d: Subgroup },
    /// `∃ũ ∈ G − H ∃n ≥ 1 [n·u ∈ D ∧ ∀m < n (ũ − m·u) ∉ D]`
    NonGeneratorFinite {
        u: GroupElem,
        g: Subgroup,
        d: Subgroup,
        h: Subgroup,
    },
    /// `∃ũ ∈ G − H ∃n [(u − n·ũ) ∈ D ∧ (n > 1 ∨ n = 0)]`
    NonGeneratorInfinite {
        u: GroupElem,
        g: Subgroup,
        d: Subgroup,
        h: Subgroup,
    },
    /// `∃a ∈ A − found ∃n > 0 [n·a = 0]`
    TorsionRemains { a: Subgroup, found: Vec<GroupElem> },
    /// `∃ã ∈ (A − A_f)^r ∃M ∃N [a = M·a^f + N·ã ∧ det N ≠ ±1]`
    NonGeneratingSet {
        a: Subgroup,
        torsion_gens: Vec<GroupElem>,
        candidates: Vec<GroupElem>,
    },
}

impl Query {
    pub fn name(&self) -> &'static str {
        match self {
            Query::QuotientFiniteNontrivial { .. } => "QuotientFiniteNontrivial",
            Query::NonGeneratorFinite { .. } => "NonGeneratorFinite",
            Query::NonGeneratorInfinite { .. } => "NonGeneratorInfinite",
            Query::TorsionRemains { .. } => "TorsionRemains",
            Query::NonGeneratingSet { .. } => "NonGeneratingSet",
        }
    }

    fn groups(&self) -> Vec<&Subgroup> {
        match self {
            Query::QuotientFiniteNontrivial { g, d } => vec![g, d],
            Query::NonGeneratorFinite { g, d, h, .. } | Query::NonGeneratorInfinite { g, d, h, .. } => {
                vec![g, d, h]
            }
            Query::TorsionRemains { a, .. } | Query::NonGeneratingSet { a, .. } => vec![a],
        }
    }

    fn elems(&self) -> Vec<&GroupElem> {
        match self {
            Query::NonGeneratorFinite { u, .. } | Query::NonGeneratorInfinite { u, .. } => vec![u],
            Query::TorsionRemains { found, .. } => found.iter().collect(),
            Query::NonGeneratingSet {
                torsion_gens,
                candidates,
                ..
            } => torsion_gens.iter().chain(candidates).collect(),
            Query::QuotientFiniteNontrivial { .. } => Vec::new(),
        }
    }

    /// The ambient group shared by every payload handle.
    pub fn ambient(&self) -> Result<Ambient> {
        let groups = self.groups();
        let amb = groups[0].ambient();
        if groups.iter().any(|g| g.ambient() != amb) {
            return Err(Error::BackendMismatch(format!(
                "{}: payload groups differ",
                self.name()
            )));
        }
        for x in self.elems() {
            amb.check(x)?;
        }
        Ok(amb)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    QuotientFiniteNontrivial {
        x: GroupElem,
        n: Int,
    },
    NonGeneratorFinite {
        u_tilde: GroupElem,
        n: Int,
    },
    NonGeneratorInfinite {
        u_tilde: GroupElem,
        n: Int,
    },
    TorsionRemains {
        a: GroupElem,
        n: Int,
    },
    NonGeneratingSet {
        a_tilde: Vec<GroupElem>,
        m: IntMat,
        n: IntMat,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::QuotientFiniteNontrivial { x, n } => write!(f, "x = {x}, n = {n}"),
            Witness::NonGeneratorFinite { u_tilde, n } | Witness::NonGeneratorInfinite { u_tilde, n } => {
                write!(f, "ũ = {u_tilde}, n = {n}")
            }
            Witness::TorsionRemains { a, n } => write!(f, "a = {a}, n = {n}"),
            Witness::NonGeneratingSet { a_tilde, m, n } => {
                write!(f, "ã = [")?;
                for (i, x) in a_tilde.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "], M = {m}, N = {n}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    True(Witness),
    False,
    Exhausted { budget_used: u64 },
}

impl Answer {
    /// The verdict, `None` for an exhausted budget.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Answer::True(_) => Some(true),
            Answer::False => Some(false),
            Answer::Exhausted { .. } => None,
        }
    }

    pub fn into_verdict(self) -> Result<bool> {
        match self {
            Answer::True(_) => Ok(true),
            Answer::False => Ok(false),
            Answer::Exhausted { budget_used } => Err(Error::OracleExhausted { budget_used }),
        }
    }
}

/// How queries get answered.
pub trait TruthSource {
    /// Whether the search behind `q` ever succeeds, when known.
    fn truth(&self, q: &Query) -> Result<Option<bool>>;
}

/// No ground truth.
pub struct NoTruth;

impl TruthSource for NoTruth {
    fn truth(&self, _: &Query) -> Result<Option<bool>> {
        Ok(None)
    }
}

/// Ground truth from the exact decision procedure.
pub struct ExactTruth;

impl TruthSource for ExactTruth {
    fn truth(&self, q: &Query) -> Result<Option<bool>> {
        Ok(decide_exact(q)?.verdict())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    Exact,
    Budgeted { budget: u64 },
}

/// An oracle configuration used by the cancellation pipeline.
pub struct Oracle<'a> {
    pub mode: OracleMode,
    pub truth: &'a dyn TruthSource,
}

impl<'a> Oracle<'a> {
    pub fn exact() -> Oracle<'static> {
        Oracle {
            mode: OracleMode::Exact,
            truth: &NoTruth,
        }
    }

    pub fn budgeted(budget: u64, truth: &'a dyn TruthSource) -> Self {
        Oracle {
            mode: OracleMode::Budgeted { budget },
            truth,
        }
    }

    /// Answers `q`; an exhausted budget is an error here.
    pub fn ask(&self, q: &Query) -> Result<Answer> {
        let ans = match self.mode {
            OracleMode::Exact => decide_exact(q)?,
            OracleMode::Budgeted { budget } => decide_budgeted(q, budget, self.truth.truth(q)?)?,
        };
        if let Answer::Exhausted { budget_used } = ans {
            return Err(Error::OracleExhausted { budget_used });
        }
        Ok(ans)
    }
}

/// Integer coefficients expressing `x` in the subgroup generated by `gens` (modulo the
/// relations for presented groups).
pub fn express(ambient: &Ambient, gens: &[GroupElem], x: &GroupElem) -> Result<Option<Vec<Int>>> {
    let mut rows: Vec<RatVec> = gens.iter().map(GroupElem::to_rat_vec).collect();
    if let Ambient::Presented(p) = ambient {
        rows.extend(p.relation_rows().iter().map(|r| RatVec::from_int_vec(r)));
    }
    if rows.is_empty() {
        return Ok(ambient.is_zero(x).then(Vec::new));
    }
    Ok(lattice_member(&rows, &x.to_rat_vec())?.map(|mut c| {
        c.truncate(gens.len());
        c
    }))
}

fn contains_elem(amb: &Ambient, set: &[GroupElem], x: &GroupElem) -> Result<bool> {
    for y in set {
        if amb.equal(x, y)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Re-validates a witness against the defining predicate of `q`.
pub fn check(q: &Query, w: &Witness) -> Result<bool> {
    let amb = q.ambient()?;
    match (q, w) {
        (Query::QuotientFiniteNontrivial { g, d }, Witness::QuotientFiniteNontrivial { x, n }) => {
            Ok(n.is_positive() && g.member(x)? && d.member(&amb.scale(x, n))? && !d.member(x)?)
        }
        (Query::NonGeneratorFinite { u, g, d, h }, Witness::NonGeneratorFinite { u_tilde, n }) => {
            if !(n.is_positive() && g.member(u_tilde)? && !h.member(u_tilde)? && d.member(&amb.scale(u, n))?) {
                return Ok(false);
            }
            let mut m = Int::zero();
            while &m < n {
                if d.member(&amb.sub(u_tilde, &amb.scale(u, &m))?)? {
                    return Ok(false);
                }
                m += 1u32;
            }
            Ok(true)
        }
        (Query::NonGeneratorInfinite { u, g, d, h }, Witness::NonGeneratorInfinite { u_tilde, n }) => {
            let n_ok = n.is_zero() || n > &Int::one();
            Ok(n_ok && g.member(u_tilde)? && !h.member(u_tilde)? && d.member(&amb.sub(u, &amb.scale(u_tilde, n))?)?)
        }
        (Query::TorsionRemains { a, found }, Witness::TorsionRemains { a: x, n }) => {
            Ok(n.is_positive() && a.member(x)? && !contains_elem(&amb, found, x)? && amb.is_zero(&amb.scale(x, n)))
        }
        (
            Query::NonGeneratingSet {
                a,
                torsion_gens,
                candidates,
            },
            Witness::NonGeneratingSet { a_tilde, m, n },
        ) => {
            let r = candidates.len();
            let k = torsion_gens.len();
            if a_tilde.len() != r || m.rows() != r || m.cols() != k || n.rows() != r || n.cols() != r {
                return Ok(false);
            }
            let q0 = Quotient::new(a, &Subgroup::trivial(&amb))?;
            for t in a_tilde {
                if !a.member(t)? || q0.order(t)?.is_some() {
                    return Ok(false);
                }
            }
            for (l, cand) in candidates.iter().enumerate() {
                let mut s = amb.zero();
                for (i, af) in torsion_gens.iter().enumerate() {
                    s = amb.add(&s, &amb.scale(af, &m[(l, i)]))?;
                }
                for (j, t) in a_tilde.iter().enumerate() {
                    s = amb.add(&s, &amb.scale(t, &n[(l, j)]))?;
                }
                if !amb.equal(&s, cand)? {
                    return Ok(false);
                }
            }
            Ok(!det(n)?.abs().is_one())
        }
        _ => Err(Error::BackendMismatch(format!(
            "witness does not match query {}",
            q.name()
        ))),
    }
}

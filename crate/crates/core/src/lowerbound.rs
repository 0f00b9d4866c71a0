//! Stagewise instances in `Q^2` and `Q^3` whose isomorphisms reveal whether a simulated
//! computation halts, together with the procedures that read the answer back off a map.

use std::fmt;

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Int, IntMat, Rat, RatVec};
use crate::groups::{Ambient, DirectSumInstance, GroupDescriptor, GroupElem, LocalizedSlot, RationalGroup, Subgroup};
use crate::oracle::{decide_exact, Query, TruthSource};

/// When (if ever) index `e` enters the simulated halting set, and how many stages to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltSchedule {
    pub e: u64,
    pub halt_stage: Option<u64>,
    pub horizon: u64,
}

impl HaltSchedule {
    pub fn new(e: u64, halt_stage: Option<u64>, horizon: u64) -> Result<Self> {
        if let Some(s) = halt_stage {
            if s == 0 || s > horizon {
                return Err(Error::InvalidInstance(vec![format!(
                    "halt stage {s} must lie in 1..={horizon}"
                )]));
            }
        }
        Ok(HaltSchedule { e, halt_stage, horizon })
    }

    pub fn never(e: u64, horizon: u64) -> Self {
        HaltSchedule {
            e,
            halt_stage: None,
            horizon,
        }
    }

    pub fn halts(&self) -> bool {
        self.halt_stage.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Q2,
    Q3,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Q2 => "q2",
            Construction::Q3 => "q3",
        })
    }
}

/// An emitted instance with the schedule it codes.
#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub construction: Construction,
    pub schedule: HaltSchedule,
    pub instance: DirectSumInstance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Halts,
    Never,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Halts => "halts",
            Verdict::Never => "never",
        })
    }
}

/// A decoded verdict. For `Q^3` with `f(g_2)` on the third axis, `f(g_1) = m·h_1 + (0,0,p/q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeReport {
    pub verdict: Verdict,
    pub m: Option<Int>,
    pub p: Option<Int>,
    pub q: Option<Int>,
}

fn rv(entries: &[(i64, i64)]) -> RatVec {
    RatVec(entries.iter().map(|&(p, q)| Rat::new(p, q)).collect())
}

fn ri(entries: &[i64]) -> RatVec {
    RatVec::from_ints(entries)
}

fn group(desc: GroupDescriptor, schedule: Vec<(u64, RatVec)>) -> Result<Subgroup> {
    Ok(Subgroup::Rational(RationalGroup::new(desc, schedule)?))
}

fn lattice(dim: usize, gens: &[RatVec]) -> Result<GroupDescriptor> {
    GroupDescriptor::lattice(dim, gens)
}

fn merged(parts: &[&[(u64, RatVec)]]) -> Vec<(u64, RatVec)> {
    let mut all: Vec<(u64, RatVec)> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
    all.sort_by(|x, y| x.0.cmp(&y.0));
    all
}

/// The `Q^2` instance: `A = H` and `B = G` on the axes; halting halves `A = H`.
pub fn build_q2(s: HaltSchedule) -> Result<CorpusInstance> {
    let halt = s.halt_stage.unwrap_or(u64::MAX);
    let mut ah = vec![(0, ri(&[1, 0]))];
    let mut bg = vec![(0, ri(&[0, 1]))];
    for t in 1..=s.horizon {
        if t < halt {
            ah.push((t, ri(&[t as i64, 0])));
        } else {
            if t == halt {
                ah.push((t, rv(&[(1, 2), (0, 1)])));
            }
            ah.push((t, rv(&[(t as i64, 2), (0, 1)])));
        }
        bg.push((t, ri(&[0, t as i64])));
    }
    let x = if s.halts() { rv(&[(1, 2), (0, 1)]) } else { ri(&[1, 0]) };
    let ah_desc = lattice(2, &[x.clone()])?;
    let bg_desc = lattice(2, &[ri(&[0, 1])])?;
    let e_desc = lattice(2, &[x, ri(&[0, 1])])?;
    let instance = DirectSumInstance {
        ambient: Ambient::Rational(2),
        e: group(e_desc, merged(&[&ah, &bg]))?,
        a: group(ah_desc.clone(), ah.clone())?,
        b: group(bg_desc.clone(), bg.clone())?,
        g: group(bg_desc, bg)?,
        h: group(ah_desc, ah)?,
        rank: 1,
        generators: None,
    };
    Ok(CorpusInstance {
        construction: Construction::Q2,
        schedule: s,
        instance,
    })
}

/// `n_i`: the `i`-th positive integer not divisible by 5 (1-based).
pub fn n_seq(i: u64) -> u64 {
    let i = i - 1;
    (i / 4) * 5 + i % 4 + 1
}

/// `∏_{i ≤ s} n_i`
pub fn n_product(s: u64) -> Int {
    (1..=s).fold(Int::one(), |acc, i| acc * Int::from(n_seq(i)))
}

/// `N_s = (0, 0, 1/∏_{i ≤ s} n_i)`
pub fn big_n(s: u64) -> RatVec {
    RatVec(vec![Rat::zero(), Rat::zero(), Rat::new(1, n_product(s))])
}

/// The fixed elements `a, b, g_1, g_2, h_1, h_2`.
pub fn q3_fixed() -> [RatVec; 6] {
    [
        ri(&[1, 0, 0]),
        ri(&[2, 1, 2]),
        ri(&[0, 1, 0]),
        ri(&[0, 0, 1]),
        ri(&[5, 2, 5]),
        ri(&[0, 0, 1]),
    ]
}

/// `(ĝ_1, ĝ_2, ĥ_1, ĥ_2)` for a halt at `stage`, with `n = 5·∏_{i<stage} n_i`.
pub fn q3_hats(stage: u64) -> (Int, [RatVec; 4]) {
    let n = n_product(stage - 1) * 5u32;
    let r = |p: Int, q: Int| Rat::new(p, q);
    let z = Rat::zero;
    let five_n = &n * 5u32;
    let g1 = RatVec(vec![z(), Rat::new(1, 5), r(Int::one(), five_n.clone())]);
    let g2 = RatVec(vec![z(), z(), r(Int::one(), n.clone())]);
    let h1 = RatVec(vec![Rat::one(), Rat::new(2, 5), r(&five_n + 2u32, five_n.clone())]);
    let h2 = g2.clone();
    (n, [g1, g2, h1, h2])
}

/// The `Q^3` instance with fixed generators `a` of `A` and `b` of `B`.
pub fn build_q3(s: HaltSchedule) -> Result<CorpusInstance> {
    let [a, b, g1, g2, h1, h2] = q3_fixed();
    let last = s.halt_stage.map_or(s.horizon, |h| h - 1);
    let mut gs = vec![(0, g1.clone()), (0, g2.clone())];
    let mut hs = vec![(0, h1.clone()), (0, h2.clone())];
    for t in 1..=last {
        gs.push((t, big_n(t)));
        hs.push((t, big_n(t)));
    }
    let a_desc = lattice(3, &[a.clone()])?;
    let b_desc = lattice(3, &[b.clone()])?;
    let (e_desc, g_desc, h_desc) = match s.halt_stage {
        None => {
            let slot = || vec![LocalizedSlot::new(ri(&[0, 0, 1]), [5])];
            (
                GroupDescriptor::new(3, &[ri(&[1, 0, 0]), ri(&[0, 1, 0])], slot())?,
                GroupDescriptor::new(3, &[g1], slot())?,
                GroupDescriptor::new(3, &[h1], slot())?,
            )
        }
        Some(stage) => {
            let (_, [gh1, gh2, hh1, hh2]) = q3_hats(stage);
            gs.push((stage, gh1.clone()));
            gs.push((stage, gh2.clone()));
            hs.push((stage, hh1.clone()));
            hs.push((stage, hh2.clone()));
            (
                lattice(3, &[a.clone(), gh1.clone(), gh2.clone()])?,
                lattice(3, &[gh1, gh2])?,
                lattice(3, &[hh1, hh2])?,
            )
        }
    };
    let sa = vec![(0, a.clone())];
    let sb = vec![(0, b.clone())];
    let instance = DirectSumInstance {
        ambient: Ambient::Rational(3),
        e: group(e_desc, merged(&[&sa, &gs, &hs, &sb]))?,
        a: group(a_desc, sa)?,
        b: group(b_desc, sb)?,
        g: group(g_desc, gs)?,
        h: group(h_desc, hs)?,
        rank: 1,
        generators: Some((vec![GroupElem::Rat(a)], vec![GroupElem::Rat(b)])),
    };
    Ok(CorpusInstance {
        construction: Construction::Q3,
        schedule: s,
        instance,
    })
}

pub fn build(construction: Construction, s: HaltSchedule) -> Result<CorpusInstance> {
    match construction {
        Construction::Q2 => build_q2(s),
        Construction::Q3 => build_q3(s),
    }
}

fn impossible(what: &str, x: &GroupElem) -> Error {
    Error::ImpossibleImage(format!("{what} = {x} fits neither instance"))
}

/// Reads the verdict from `f((0,1))`.
pub fn decode_q2(f01: &GroupElem) -> Result<DecodeReport> {
    let v = f01.as_rat()?;
    let report = |verdict| DecodeReport {
        verdict,
        m: None,
        p: None,
        q: None,
    };
    if v.dim() != 2 || !v.0[1].is_zero() {
        return Err(impossible("f((0,1))", f01));
    }
    let x = v.0[0].abs();
    if x == Rat::one() {
        Ok(report(Verdict::Never))
    } else if x == Rat::new(1, 2) {
        Ok(report(Verdict::Halts))
    } else {
        Err(impossible("f((0,1))", f01))
    }
}

/// Reads the verdict from `f(g_1)` and `f(g_2)`.
pub fn decode_q3(f_g1: &GroupElem, f_g2: &GroupElem) -> Result<DecodeReport> {
    let (x1, x2) = (f_g1.as_rat()?, f_g2.as_rat()?);
    if x1.dim() != 3 || x2.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: x1.dim().min(x2.dim()),
        });
    }
    if !x2.0[0].is_zero() || !x2.0[1].is_zero() {
        return Ok(DecodeReport {
            verdict: Verdict::Halts,
            m: None,
            p: None,
            q: None,
        });
    }
    let m = x1.0[1].div(&Rat::int(2));
    let m = m
        .to_integer()
        .filter(|m| x1.0[0] == Rat::int(m * 5u32))
        .ok_or_else(|| impossible("f(g_1)", f_g1))?;
    let rest = &x1.0[2] - &Rat::int(&m * 5u32);
    let (p, q) = (rest.num().clone(), rest.den().clone());
    let verdict = if q.is_multiple_of(&Int::from(5)) {
        Verdict::Halts
    } else {
        Verdict::Never
    };
    Ok(DecodeReport {
        verdict,
        m: Some(m),
        p: Some(p),
        q: Some(q),
    })
}

/// Named exact identities of the `Q^3` construction; the halted-case ones use `stage`.
pub fn q3_identities(stage: Option<u64>) -> Vec<(&'static str, bool)> {
    let [a, b, g1, _, h1, h2] = q3_fixed();
    let mut out = vec![
        ("a = h1 - 2b - h2", a == h1.sub(&b.scale_int(&Int::from(2))).sub(&h2)),
        (
            "g1 = 5b - 2h1",
            g1 == b.scale_int(&Int::from(5)).sub(&h1.scale_int(&Int::from(2))),
        ),
    ];
    let Some(stage) = stage else { return out };
    let (n, [gh1, gh2, hh1, hh2]) = q3_hats(stage);
    let fifth = Rat::new(1, 5);
    let five = Int::from(5);
    out.push(("ĝ1 = (g1 + ĝ2)/5", gh1 == g1.add(&gh2).scale(&fifth)));
    out.push((
        "ĥ1 = (h1 + 2ĥ2)/5",
        hh1 == h1.add(&hh2.scale_int(&Int::from(2))).scale(&fifth),
    ));
    let prev = big_n(stage - 1);
    out.push((
        "N_{s-1} = 5ĝ2 = 5ĥ2",
        prev == gh2.scale_int(&five) && prev == hh2.scale_int(&five),
    ));
    let (m1, m2) = q3_matrices(&n);
    let apply = |m: &IntMat, rows: &[RatVec; 3]| -> Vec<RatVec> {
        (0..3)
            .map(|i| (0..3).fold(RatVec::zeros(3), |acc, j| acc.add(&rows[j].scale_int(&m[(i, j)]))))
            .collect()
    };
    let bh = [b.clone(), hh1.clone(), hh2.clone()];
    let ag = [a.clone(), gh1.clone(), gh2.clone()];
    out.push(("(a,ĝ1,ĝ2) = M1·(b,ĥ1,ĥ2)", apply(&m1, &bh) == ag.to_vec()));
    out.push(("(b,ĥ1,ĥ2) = M2·(a,ĝ1,ĝ2)", apply(&m2, &ag) == bh.to_vec()));
    out.push(("M1·M2 = I", m1.mul(&m2).map_or(false, |p| p == IntMat::identity(3))));
    out
}

/// The change-of-basis pair of the halted case.
pub fn q3_matrices(n: &Int) -> (IntMat, IntMat) {
    let i = |x: i64| Int::from(x);
    let m1 = vec![
        vec![i(-2), i(5), -n - 2u32],
        vec![i(1), i(-2), i(1)],
        vec![i(0), i(0), i(1)],
    ];
    let m2 = vec![
        vec![i(2), i(5), n * 2u32 - 1u32],
        vec![i(1), i(2), n.clone()],
        vec![i(0), i(0), i(1)],
    ];
    (
        IntMat::from_rows(&m1, 3).expect("3x3"),
        IntMat::from_rows(&m2, 3).expect("3x3"),
    )
}

/// Ground truth from a corpus truth block: every query is answered on the rebuilt limit
/// instance.
pub struct CorpusTruth {
    limit: DirectSumInstance,
}

impl CorpusTruth {
    pub fn new(construction: Construction, schedule: HaltSchedule) -> Result<Self> {
        Ok(CorpusTruth {
            limit: build(construction, schedule)?.instance,
        })
    }
}

impl TruthSource for CorpusTruth {
    fn truth(&self, q: &Query) -> Result<Option<bool>> {
        if q.ambient()? != self.limit.ambient {
            return Err(Error::BackendMismatch(
                "query is not posed in the corpus ambient".into(),
            ));
        }
        Ok(decide_exact(q)?.verdict())
    }
}

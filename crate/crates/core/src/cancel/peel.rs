use super::classify::invariant_factors;
use super::cyclic::{cancel_cyclic_traced, CyclicTrace};
use super::hom::{hom_eval, pushforward, GroupHom};
use super::self_check;
use crate::error::{Error, Result};
use crate::groups::{validate_instance, DirectSumInstance, GroupElem, Subgroup};
use crate::oracle::Oracle;

/// Cancels a finitely generated `A ≅ B` one cyclic summand at a time.
pub fn cancel_fg(inst: &DirectSumInstance, oracle: &Oracle) -> Result<GroupHom> {
    cancel_fg_traced(inst, oracle).map(|(f, _)| f)
}

/// As [`cancel_fg`], also returning the data of every cyclic step.
///
/// With `A = ⟨a_1⟩ ⊕ … ⊕ ⟨a_n⟩` and `B = ⟨b_1⟩ ⊕ … ⊕ ⟨b_n⟩` paired by order, step `i`
/// cancels `⟨F(a_i)⟩` against `⟨b_i⟩` inside `H_{i−1}`, where `F = f_{i−1} ∘ … ∘ f_1` and
/// `H_i = ⟨b_{i+1}⟩ ⊕ … ⊕ ⟨b_n⟩ ⊕ H`.
pub fn cancel_fg_traced(inst: &DirectSumInstance, oracle: &Oracle) -> Result<(GroupHom, Vec<CyclicTrace>)> {
    validate_instance(inst).into_result()?;
    let amb = &inst.ambient;
    let ia = invariant_factors(&inst.a, inst.rank, oracle)?;
    let ib = invariant_factors(&inst.b, inst.rank, oracle)?;
    if ia.factors() != ib.factors() {
        return Err(Error::FactorMismatch(format!(
            "{:?} vs {:?}",
            ia.factors(),
            ib.factors()
        )));
    }
    let pa = ia.pieces();
    let pb = ib.pieces();
    let n = pa.len();
    let cyclic = |x: &GroupElem| Subgroup::generated(amb, std::slice::from_ref(x));

    let mut a_imgs: Vec<GroupElem> = pa.iter().map(|(x, _)| x.clone()).collect();
    let mut g_cur = inst.g.clone();
    let mut e_cur = inst.e.clone();
    let mut steps = Vec::with_capacity(n);
    let mut traces = Vec::with_capacity(n);
    for i in 0..n {
        let mut g_step = g_cur.clone();
        for x in &a_imgs[i + 1..] {
            g_step = cyclic(x)?.sum(&g_step)?;
        }
        let mut h_step = inst.h.clone();
        for (y, _) in &pb[i + 1..] {
            h_step = cyclic(y)?.sum(&h_step)?;
        }
        let step = DirectSumInstance {
            ambient: amb.clone(),
            e: e_cur,
            a: cyclic(&a_imgs[i])?,
            b: cyclic(&pb[i].0)?,
            g: g_step,
            h: h_step.clone(),
            rank: usize::from(pa[i].1.is_none()),
            generators: None,
        };
        let (f, trace) = cancel_cyclic_traced(&step, oracle)?;
        for x in &mut a_imgs[i + 1..] {
            *x = hom_eval(&f, x)?;
        }
        g_cur = pushforward(&f, &g_cur)?;
        e_cur = h_step;
        steps.push(f);
        traces.push(trace);
    }
    let f = GroupHom::Composition(steps);
    self_check(&inst.g, &inst.h, &f)?;
    Ok((f, traces))
}

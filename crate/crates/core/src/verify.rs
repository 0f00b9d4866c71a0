//! Independent checks that a homomorphism is an isomorphism `G → H`.

use serde::Serialize;

use crate::cancel::{hom_eval, GroupHom};
use crate::error::{Error, Result};
use num_traits::{Signed, Zero};

use crate::exactla::{left_kernel, Int, IntMat};
use crate::groups::{Ambient, DirectSumInstance, GroupElem, Subgroup};
use crate::oracle::express;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Generators and relations; needs finitely generated `G` and `H`.
    Exact,
    /// Canonical samples up to a bound.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// `f(x) = y` lies outside `H`, or `f` is undefined at `x` (then `y = x`).
    Image,
    /// `f(x + y) ≠ f(x) + f(y)`
    Additivity,
    /// `x ≠ y` but `f(x) = f(y)`
    Injectivity,
    /// `y = x ∈ H` has no preimage.
    Surjectivity,
}

fn display<S: serde::Serializer>(x: &GroupElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// A concrete failure; [`replay`] re-checks it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub kind: FailureKind,
    #[serde(serialize_with = "display")]
    pub x: GroupElem,
    #[serde(serialize_with = "display")]
    pub y: GroupElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub additivity_ok: bool,
    pub injective_ok: bool,
    pub surjective_ok: bool,
    pub image_in_codomain_ok: bool,
    pub samples_checked: usize,
    /// The first failure found.
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.additivity_ok && self.injective_ok && self.surjective_ok && self.image_in_codomain_ok
    }

    fn new() -> Self {
        VerifyReport {
            additivity_ok: true,
            injective_ok: true,
            surjective_ok: true,
            image_in_codomain_ok: true,
            samples_checked: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, kind: FailureKind, x: &GroupElem, y: &GroupElem) {
        *match kind {
            FailureKind::Image => &mut self.image_in_codomain_ok,
            FailureKind::Additivity => &mut self.additivity_ok,
            FailureKind::Injectivity => &mut self.injective_ok,
            FailureKind::Surjectivity => &mut self.surjective_ok,
        } = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample {
                kind,
                x: x.clone(),
                y: y.clone(),
            });
        }
    }
}

use FailureKind::{Additivity, Image, Injectivity, Surjectivity};

fn eval_opt(f: &GroupHom, x: &GroupElem) -> Result<Option<GroupElem>> {
    match hom_eval(f, x) {
        Ok(y) => Ok(Some(y)),
        Err(Error::DomainViolation(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Whether `f(x + y) ≠ f(x) + f(y)`; an undefined value counts as a failure.
fn breaks_additivity(f: &GroupHom, amb: &Ambient, x: &GroupElem, y: &GroupElem) -> Result<bool> {
    let (Some(fx), Some(fy), Some(fs)) = (eval_opt(f, x)?, eval_opt(f, y)?, eval_opt(f, &amb.add(x, y)?)?) else {
        return Ok(true);
    };
    Ok(!amb.equal(&fs, &amb.add(&fx, &fy)?)?)
}

/// A pair breaking additivity when `f(Σ c_i·x_i) ≠ Σ c_i·f(x_i)`: the sum is rebuilt one
/// `±x_i` at a time, after checking `f(0) = 0` and `f(−x_i) = −f(x_i)`.
fn additivity_pair(f: &GroupHom, amb: &Ambient, c: &[Int], xs: &[GroupElem]) -> Result<Option<(GroupElem, GroupElem)>> {
    let zero = amb.zero();
    if breaks_additivity(f, amb, &zero, &zero)? {
        return Ok(Some((zero.clone(), zero)));
    }
    for (k, x) in c.iter().zip(xs) {
        if k.is_negative() && breaks_additivity(f, amb, x, &amb.neg(x))? {
            return Ok(Some((x.clone(), amb.neg(x))));
        }
    }
    let mut acc = zero;
    for (k, x) in c.iter().zip(xs) {
        let step = if k.is_negative() { amb.neg(x) } else { x.clone() };
        let mut left = k.abs();
        while !left.is_zero() {
            if breaks_additivity(f, amb, &acc, &step)? {
                return Ok(Some((acc, step)));
            }
            acc = amb.add(&acc, &step)?;
            left -= 1u32;
        }
    }
    Ok(None)
}

/// Re-checks a counterexample against `f`; true when it still exhibits the failure.
/// Surjectivity is re-checked against the subgroup generated by the images of `G`'s
/// generators, or by a search over `4·bound` elements of `G` when `G` is not finitely
/// generated.
pub fn replay(g: &Subgroup, h: &Subgroup, f: &GroupHom, cx: &Counterexample, bound: usize) -> Result<bool> {
    let amb = g.ambient();
    let Counterexample { kind, x, y } = cx;
    match kind {
        Image => Ok(g.member(x)? && eval_opt(f, x)?.map_or(Ok(true), |fx| h.member(&fx).map(|m| !m))?),
        Additivity => Ok(g.member(x)? && g.member(y)? && breaks_additivity(f, &amb, x, y)?),
        Injectivity => {
            let (Some(fx), Some(fy)) = (eval_opt(f, x)?, eval_opt(f, y)?) else {
                return Ok(false);
            };
            Ok(!amb.equal(x, y)? && amb.equal(&fx, &fy)?)
        }
        Surjectivity => {
            if !h.member(x)? {
                return Ok(false);
            }
            if g.is_finitely_generated() {
                let images: Option<Vec<GroupElem>> = g.gens().iter().map(|z| eval_opt(f, z)).collect::<Result<_>>()?;
                let Some(images) = images else { return Ok(false) };
                return Ok(!Subgroup::generated(&amb, &images)?.member(x)?);
            }
            let search: Vec<GroupElem> = g.elements()?.take(4 * bound).collect();
            Ok(!has_preimage(f, f.inverse().as_ref(), g, &search, x)?)
        }
    }
}

/// Checks that `f` restricts to an isomorphism from `inst.g` onto `inst.h`.
pub fn check_isomorphism(
    inst: &DirectSumInstance,
    f: &GroupHom,
    mode: VerifyMode,
    bound: usize,
) -> Result<VerifyReport> {
    check_between(&inst.g, &inst.h, f, mode, bound)
}

/// Checks that `f` restricts to an isomorphism `g → h`.
pub fn check_between(g: &Subgroup, h: &Subgroup, f: &GroupHom, mode: VerifyMode, bound: usize) -> Result<VerifyReport> {
    if g.ambient() != h.ambient() {
        return Err(Error::BackendMismatch(
            "domain and codomain live in different groups".into(),
        ));
    }
    match mode {
        VerifyMode::Exact => {
            if !g.is_finitely_generated() || !h.is_finitely_generated() {
                return Err(Error::BackendMismatch(
                    "exact verification needs finitely generated groups".into(),
                ));
            }
            exact(g, h, f, bound)
        }
        VerifyMode::Sampled => sampled(g, h, f, bound),
    }
}

/// Integer relations among `gens`: a basis of `{c : Σ c_i·gens_i = 0}`.
fn relations(amb: &Ambient, gens: &[GroupElem]) -> Result<Vec<Vec<Int>>> {
    let s = gens.len();
    if s == 0 {
        return Ok(Vec::new());
    }
    let vecs: Vec<_> = gens.iter().map(GroupElem::to_rat_vec).collect();
    let den = vecs
        .iter()
        .fold(Int::from(1), |acc, v| num_integer::lcm(acc, v.denominator()));
    let mut rows: Vec<Vec<Int>> = vecs
        .iter()
        .map(|v| v.scale_int(&den).to_ints().expect("cleared denominators"))
        .collect();
    if let Ambient::Presented(p) = amb {
        rows.extend(p.relation_rows().iter().cloned());
    }
    let m = IntMat::from_rows(&rows, amb.dim())?;
    Ok(left_kernel(&m)
        .into_iter()
        .map(|mut c| {
            c.truncate(s);
            c
        })
        .collect())
}

fn combine(amb: &Ambient, c: &[Int], xs: &[GroupElem]) -> Result<GroupElem> {
    let mut out = amb.zero();
    for (k, x) in c.iter().zip(xs) {
        out = amb.add(&out, &amb.scale(x, k))?;
    }
    Ok(out)
}

fn exact(g: &Subgroup, h: &Subgroup, f: &GroupHom, bound: usize) -> Result<VerifyReport> {
    let amb = g.ambient();
    let mut rep = VerifyReport::new();
    let gens = g.gens();
    let mut images = Vec::with_capacity(gens.len());
    for x in &gens {
        match eval_opt(f, x)? {
            Some(y) => {
                if !h.member(&y)? {
                    rep.fail(Image, x, &y);
                }
                images.push(y);
            }
            None => {
                rep.fail(Image, x, x);
                return Ok(rep);
            }
        }
    }
    let broken = |rep: &mut VerifyReport, c: &[Int], xs: &[GroupElem]| -> Result<()> {
        match additivity_pair(f, &amb, c, xs)? {
            Some((x, y)) => rep.fail(Additivity, &x, &y),
            None => rep.additivity_ok = false,
        }
        Ok(())
    };
    for c in relations(&amb, &gens)? {
        if !amb.is_zero(&combine(&amb, &c, &images)?) {
            broken(&mut rep, &c, &gens)?;
        }
    }
    // f must agree with its linear extension, checked on canonical samples
    for x in g.elements()?.take(bound) {
        rep.samples_checked += 1;
        let c = express(&amb, &gens, &x)?.expect("sample lies in G");
        let fx = eval_opt(f, &x)?;
        if fx.map_or(Ok(false), |fx| amb.equal(&fx, &combine(&amb, &c, &images)?))? {
            continue;
        }
        // x − Σ c_i·g_i = 0, so f(x) ≠ Σ c_i·f(g_i) breaks additivity somewhere
        let cs: Vec<Int> = c.iter().map(|k| -k).chain([Int::from(1)]).collect();
        let xs: Vec<GroupElem> = gens.iter().cloned().chain([x.clone()]).collect();
        broken(&mut rep, &cs, &xs)?;
    }
    for c in relations(&amb, &images)? {
        let x = combine(&amb, &c, &gens)?;
        if amb.is_zero(&x) {
            continue;
        }
        match eval_opt(f, &x)? {
            Some(fx) if amb.is_zero(&fx) => rep.fail(Injectivity, &x, &amb.zero()),
            _ => {
                rep.injective_ok = false;
                broken(&mut rep, &c, &gens)?;
            }
        }
    }
    let img = Subgroup::generated(&amb, &images)?;
    for y in h.gens() {
        if !img.member(&y)? {
            rep.fail(Surjectivity, &y, &y);
        }
    }
    Ok(rep)
}

/// Index pairs in order of (maximum, lexicographic).
fn pairs(n: usize, limit: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|m| (0..m).map(move |i| (i, m)).chain((0..=m).map(move |j| (m, j))))
        .take(limit)
        .collect()
}

fn sampled(g: &Subgroup, h: &Subgroup, f: &GroupHom, bound: usize) -> Result<VerifyReport> {
    let amb = g.ambient();
    let mut rep = VerifyReport::new();
    let samples: Vec<GroupElem> = g.elements()?.take(bound).collect();
    let mut images = Vec::with_capacity(samples.len());
    for x in &samples {
        rep.samples_checked += 1;
        let Some(y) = eval_opt(f, x)? else {
            rep.fail(Image, x, x);
            return Ok(rep);
        };
        if !h.member(&y)? {
            rep.fail(Image, x, &y);
        }
        if !amb.is_zero(x) && amb.is_zero(&y) {
            rep.fail(Injectivity, x, &amb.zero());
        }
        images.push(y);
    }
    for (i, j) in pairs(samples.len(), bound) {
        if breaks_additivity(f, &amb, &samples[i], &samples[j])? {
            rep.fail(Additivity, &samples[i], &samples[j]);
        }
        if i != j && amb.equal(&images[i], &images[j])? && !amb.equal(&samples[i], &samples[j])? {
            rep.fail(Injectivity, &samples[i], &samples[j]);
        }
    }
    let inverse = f.inverse();
    let search: Vec<GroupElem> = g.elements()?.take(4 * bound).collect();
    for y in h.elements()?.take(bound) {
        if !has_preimage(f, inverse.as_ref(), g, &search, &y)? {
            rep.fail(Surjectivity, &y, &y);
        }
    }
    Ok(rep)
}

fn has_preimage(
    f: &GroupHom,
    inverse: Option<&GroupHom>,
    g: &Subgroup,
    search: &[GroupElem],
    y: &GroupElem,
) -> Result<bool> {
    let amb = g.ambient();
    let hits = |x: &GroupElem| -> Result<bool> {
        Ok(match hom_eval(f, x) {
            Ok(fx) => amb.equal(&fx, y)?,
            Err(Error::DomainViolation(_)) => false,
            Err(e) => return Err(e),
        })
    };
    if let Some(inv) = inverse {
        if let Ok(x) = hom_eval(inv, y) {
            if g.member(&x)? && hits(&x)? {
                return Ok(true);
            }
        }
    }
    for x in search {
        if hits(x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks `x + y` decompositions used by the cyclic step: `⟨u⟩ ⊕ D = G`.
pub fn is_internal_direct_sum(u: &GroupElem, d: &Subgroup, g: &Subgroup) -> Result<bool> {
    let amb = g.ambient();
    let cu = Subgroup::generated(&amb, std::slice::from_ref(u))?;
    let meet = match (cu.descriptor(), d.descriptor()) {
        (Some(s), Some(t)) => {
            let joint: Vec<_> = s.span_basis().into_iter().chain(t.span_basis()).collect();
            crate::exactla::q_rank(&joint) == joint.len()
        }
        _ => cu.intersection(d)?.is_trivial(),
    };
    Ok(meet && cu.sum(d)?.equals(g)?)
}

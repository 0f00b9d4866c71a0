use std::fmt;

use super::quotient::Quotient;
use super::subgroup::Subgroup;
use super::{Ambient, GroupElem};
use crate::error::{Error, Result};
use crate::exactla::{lattice_member, q_coordinates, q_rank, Int, RatVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Presented,
    Rational,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Presented => "presented",
            Backend::Rational => "rational",
        })
    }
}

/// `E = A ⊕ G = B ⊕ H` with `A ≅ B` finitely generated of rank `rank`.
#[derive(Clone, Debug)]
pub struct DirectSumInstance {
    pub ambient: Ambient,
    pub e: Subgroup,
    pub a: Subgroup,
    pub b: Subgroup,
    pub g: Subgroup,
    pub h: Subgroup,
    pub rank: usize,
    /// Optional generator tuples for `A` and `B`.
    pub generators: Option<(Vec<GroupElem>, Vec<GroupElem>)>,
}

impl DirectSumInstance {
    pub fn backend(&self) -> Backend {
        match self.ambient {
            Ambient::Presented(_) => Backend::Presented,
            Ambient::Rational(_) => Backend::Rational,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    AG,
    BH,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(self.violations))
        }
    }
}

fn trivially_meet(x: &Subgroup, y: &Subgroup) -> Result<bool> {
    match (x.descriptor(), y.descriptor()) {
        // subgroups of Q^n meet trivially iff their Q-spans do
        (Some(s), Some(t)) => {
            let joint: Vec<RatVec> = s.span_basis().into_iter().chain(t.span_basis()).collect();
            Ok(q_rank(&joint) == joint.len())
        }
        _ => Ok(x.intersection(y)?.is_trivial()),
    }
}

fn check_sum(report: &mut ValidationReport, e: &Subgroup, x: &Subgroup, y: &Subgroup, names: (&str, &str)) {
    let (nx, ny) = names;
    match trivially_meet(x, y) {
        Ok(true) => {}
        Ok(false) => report.violations.push(format!("{nx} ∩ {ny} is not trivial")),
        Err(err) => report.violations.push(format!("{nx} ∩ {ny}: {err}")),
    }
    match x.sum(y).and_then(|s| s.equals(e)) {
        Ok(true) => {}
        Ok(false) => report.violations.push(format!("{nx} + {ny} ≠ E")),
        Err(err) => report.violations.push(format!("{nx} + {ny}: {err}")),
    }
}

fn shape(s: &Subgroup) -> Result<(Vec<Int>, usize)> {
    if !s.is_finitely_generated() {
        return Err(Error::Unsupported("not finitely generated".into()));
    }
    let q = Quotient::new(s, &Subgroup::trivial(&s.ambient()))?;
    Ok((q.factors().to_vec(), q.free_rank()))
}

/// Checks both direct-sum decompositions and the declared rank; lists every violation.
pub fn validate_instance(inst: &DirectSumInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let parts = [
        ("E", &inst.e),
        ("A", &inst.a),
        ("B", &inst.b),
        ("G", &inst.g),
        ("H", &inst.h),
    ];
    for (name, s) in parts {
        if s.ambient() != inst.ambient {
            report
                .violations
                .push(format!("{name} does not live in the instance ambient"));
        }
    }
    if !report.is_valid() {
        return report;
    }
    for (name, s) in &parts[1..] {
        match inst.e.contains(s) {
            Ok(true) => {}
            Ok(false) => report.violations.push(format!("{name} is not contained in E")),
            Err(err) => report.violations.push(format!("{name} ⊆ E: {err}")),
        }
    }
    check_sum(&mut report, &inst.e, &inst.a, &inst.g, ("A", "G"));
    check_sum(&mut report, &inst.e, &inst.b, &inst.h, ("B", "H"));
    let sa = shape(&inst.a);
    let sb = shape(&inst.b);
    for (name, s) in [("A", &sa), ("B", &sb)] {
        match s {
            Ok((_, r)) if *r != inst.rank => report
                .violations
                .push(format!("rank of {name} is {r}, declared {}", inst.rank)),
            Ok(_) => {}
            Err(err) => report.violations.push(format!("{name}: {err}")),
        }
    }
    if let (Ok((fa, _)), Ok((fb, _))) = (&sa, &sb) {
        if fa != fb {
            report
                .violations
                .push(format!("torsion of A {fa:?} differs from torsion of B {fb:?}"));
        }
    }
    if let Some((ga, gb)) = &inst.generators {
        for (name, gens, sub) in [("A", ga, &inst.a), ("B", gb, &inst.b)] {
            let ok = Subgroup::generated(&inst.ambient, gens).and_then(|s| s.equals(sub));
            match ok {
                Ok(true) => {}
                Ok(false) => report
                    .violations
                    .push(format!("listed generators do not generate {name}")),
                Err(err) => report.violations.push(format!("generators of {name}: {err}")),
            }
        }
    }
    report
}

/// The unique decomposition `x = first + second` along `A ⊕ G` or `B ⊕ H`.
pub fn split(inst: &DirectSumInstance, x: &GroupElem, side: Side) -> Result<(GroupElem, GroupElem)> {
    let (p, q) = match side {
        Side::AG => (&inst.a, &inst.g),
        Side::BH => (&inst.b, &inst.h),
    };
    let amb = &inst.ambient;
    amb.check(x)?;
    let first = match (p, q) {
        (Subgroup::Presented(_), Subgroup::Presented(_)) => {
            let pg: Vec<RatVec> = p
                .lift_basis()
                .expect("presented")
                .row_vecs()
                .iter()
                .map(|r| RatVec::from_int_vec(r))
                .collect();
            let qg: Vec<RatVec> = q
                .lift_basis()
                .expect("presented")
                .row_vecs()
                .iter()
                .map(|r| RatVec::from_int_vec(r))
                .collect();
            let all: Vec<RatVec> = pg.iter().chain(&qg).cloned().collect();
            let c = lattice_member(&all, &x.to_rat_vec())?
                .ok_or_else(|| Error::InvalidInstance(vec![format!("{x} does not split")]))?;
            let part = pg
                .iter()
                .zip(&c)
                .fold(RatVec::zeros(amb.dim()), |acc, (v, k)| acc.add(&v.scale_int(k)));
            amb.canon(&GroupElem::Int(part.to_ints().expect("integral")))
        }
        (Subgroup::Rational(_), Subgroup::Rational(_)) => {
            let pb = p.descriptor().expect("rational").span_basis();
            let qb = q.descriptor().expect("rational").span_basis();
            let all: Vec<RatVec> = pb.iter().chain(&qb).cloned().collect();
            let c = q_coordinates(&all, x.as_rat()?)?
                .ok_or_else(|| Error::InvalidInstance(vec![format!("{x} does not split")]))?;
            let part = pb
                .iter()
                .zip(&c)
                .fold(RatVec::zeros(amb.dim()), |acc, (v, t)| acc.add(&v.scale(t)));
            GroupElem::Rat(part)
        }
        _ => return Err(Error::BackendMismatch("mixed subgroups".into())),
    };
    let second = amb.sub(x, &first)?;
    if !p.member(&first)? || !q.member(&second)? {
        return Err(Error::InvalidInstance(vec![format!("{x} does not split")]));
    }
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::PresentedGroup;

    fn sub(z: &PresentedGroup, gens: &[&[i64]]) -> Subgroup {
        let gens = gens.iter().map(|g| g.iter().map(|&x| Int::from(x)).collect()).collect();
        Subgroup::presented(z, gens).unwrap()
    }

    fn z2_instance(a: &[&[i64]], g: &[&[i64]]) -> DirectSumInstance {
        let z2 = PresentedGroup::free(2);
        DirectSumInstance {
            ambient: Ambient::Presented(z2.clone()),
            e: Subgroup::whole(&z2),
            a: sub(&z2, a),
            b: sub(&z2, &[&[1, 0]]),
            g: sub(&z2, g),
            h: sub(&z2, &[&[0, 1]]),
            rank: 1,
            generators: None,
        }
    }

    #[test]
    fn validation_examples() {
        assert!(validate_instance(&z2_instance(&[&[1, 0]], &[&[0, 1]])).is_valid());
        assert!(validate_instance(&z2_instance(&[&[1, 0]], &[&[1, 1]])).is_valid());
        let bad = validate_instance(&z2_instance(&[&[2, 0]], &[&[0, 1]]));
        assert!(bad.violations.iter().any(|v| v.contains("A + G")), "{bad:?}");
    }

    #[test]
    fn rank_mismatch_reported() {
        let mut inst = z2_instance(&[&[1, 0]], &[&[0, 1]]);
        inst.rank = 2;
        assert!(!validate_instance(&inst).is_valid());
    }

    #[test]
    fn split_examples() {
        let inst = z2_instance(&[&[1, 0]], &[&[0, 1]]);
        let (a, g) = split(&inst, &GroupElem::ints(&[3, 4]), Side::AG).unwrap();
        assert_eq!((a, g), (GroupElem::ints(&[3, 0]), GroupElem::ints(&[0, 4])));
        let inst = z2_instance(&[&[1, 0]], &[&[1, 1]]);
        let (a, g) = split(&inst, &GroupElem::ints(&[3, 4]), Side::AG).unwrap();
        assert_eq!((a, g), (GroupElem::ints(&[-1, 0]), GroupElem::ints(&[4, 4])));
        let (a, g) = split(&inst, &GroupElem::ints(&[0, 0]), Side::AG).unwrap();
        assert_eq!((a, g), (GroupElem::ints(&[0, 0]), GroupElem::ints(&[0, 0])));
    }
}

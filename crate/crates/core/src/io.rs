//! JSON file formats. Every file carries `"format_version": 1`; rationals are `"p/q"`
//! strings and presented coordinates are integers.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cancel::{CyclicPiece, GroupHom, LinearMap};
use crate::error::{Error, Result};
use crate::exactla::{Int, IntMat, JsonInt, Rat, RatVec};
use crate::groups::{
    Ambient, Backend, DirectSumInstance, GroupDescriptor, GroupElem, LocalizedSlot, PresentedGroup, RationalGroup,
    Subgroup,
};
use crate::lowerbound::{Construction, HaltSchedule};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AmbientFile {
    Presented { rank: usize, relations: IntMat },
    Rational { dim: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotFile {
    pub direction: RatVec,
    pub forbidden_primes: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageFile {
    pub stage: u64,
    pub element: RatVec,
}

/// A subgroup: `gens` for presented ambients; `lattice`, `localized` and `schedule` for
/// rational ones.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<Vec<JsonInt>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<RatVec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub localized: Vec<SlotFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<StageFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    #[serde(rename = "A")]
    pub a: Vec<Value>,
    #[serde(rename = "B")]
    pub b: Vec<Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthFile {
    pub halts: bool,
    pub stage: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionFile {
    pub kind: Construction,
    pub index: u64,
    pub horizon: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub backend: Backend,
    pub ambient: AmbientFile,
    #[serde(rename = "E")]
    pub e: GroupFile,
    #[serde(rename = "A")]
    pub a: GroupFile,
    #[serde(rename = "B")]
    pub b: GroupFile,
    #[serde(rename = "G")]
    pub g: GroupFile,
    #[serde(rename = "H")]
    pub h: GroupFile,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HomNode {
    Cyclic {
        u: Value,
        v: Value,
        #[serde(rename = "D", alias = "d")]
        d: GroupFile,
    },
    Linear {
        domain: Vec<Value>,
        matrix: Vec<Value>,
    },
    Composition {
        parts: Vec<HomNode>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomFile {
    pub format_version: u32,
    pub ambient: AmbientFile,
    pub hom: HomNode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInputFile {
    pub format_version: u32,
    pub ambient: AmbientFile,
    /// The whole ambient when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub matrix: IntMat,
}

/// An instance together with its optional corpus metadata.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub instance: DirectSumInstance,
    pub truth: Option<TruthFile>,
    pub construction: Option<ConstructionFile>,
}

impl LoadedInstance {
    pub fn schedule(&self) -> Option<(Construction, HaltSchedule)> {
        let c = self.construction?;
        let t = self.truth?;
        Some((
            c.kind,
            HaltSchedule {
                e: c.index,
                halt_stage: if t.halts { t.stage } else { None },
                horizon: c.horizon,
            },
        ))
    }
}

fn check_version(v: u32, loc: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::parse(
            format!("{loc}.format_version"),
            format!("unsupported version {v}"),
        ));
    }
    Ok(())
}

pub fn ambient_to_file(a: &Ambient) -> AmbientFile {
    match a {
        Ambient::Presented(p) => AmbientFile::Presented {
            rank: p.rank(),
            relations: p.relations().clone(),
        },
        Ambient::Rational(n) => AmbientFile::Rational { dim: *n },
    }
}

pub fn ambient_from_file(f: &AmbientFile) -> Result<Ambient> {
    Ok(match f {
        AmbientFile::Presented { rank, relations } => Ambient::Presented(
            PresentedGroup::new(*rank, relations.clone())
                .map_err(|e| Error::parse("ambient.relations", e.to_string()))?,
        ),
        AmbientFile::Rational { dim } => Ambient::Rational(*dim),
    })
}

pub fn elem_to_json(x: &GroupElem) -> Value {
    match x {
        GroupElem::Int(v) => serde_json::to_value(v.iter().cloned().map(JsonInt).collect::<Vec<_>>()),
        GroupElem::Rat(v) => serde_json::to_value(v),
    }
    .expect("elements serialize")
}

pub fn elem_from_json(amb: &Ambient, v: &Value, loc: &str) -> Result<GroupElem> {
    let bad = |m: String| Error::parse(loc, m);
    let x = match amb {
        Ambient::Presented(_) => {
            let ints: Vec<JsonInt> = serde_json::from_value(v.clone()).map_err(|e| bad(e.to_string()))?;
            GroupElem::Int(ints.into_iter().map(|x| x.0).collect())
        }
        Ambient::Rational(_) => {
            let entries = v.as_array().ok_or_else(|| bad("expected an array".into()))?;
            let rats = entries
                .iter()
                .map(|e| match e {
                    Value::String(s) => s.parse::<Rat>().map_err(|err| bad(err.to_string())),
                    Value::Number(n) => n
                        .as_i64()
                        .map(Rat::from)
                        .ok_or_else(|| bad(format!("{n} is not an integer"))),
                    other => Err(bad(format!("unexpected {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            GroupElem::Rat(RatVec(rats))
        }
    };
    amb.check(&x).map_err(|e| bad(e.to_string()))?;
    Ok(x)
}

pub fn group_to_file(s: &Subgroup) -> GroupFile {
    match s {
        Subgroup::Presented(_) => GroupFile {
            gens: Some(
                s.gens()
                    .iter()
                    .map(|g| g.as_int().expect("presented").iter().cloned().map(JsonInt).collect())
                    .collect(),
            ),
            ..GroupFile::default()
        },
        Subgroup::Rational(r) => {
            let d = r.descriptor();
            GroupFile {
                gens: None,
                lattice: Some(d.lattice_basis().to_vec()),
                localized: d
                    .localized()
                    .iter()
                    .map(|s| SlotFile {
                        direction: s.direction.clone(),
                        forbidden_primes: s.forbidden.iter().copied().collect(),
                    })
                    .collect(),
                schedule: r
                    .schedule()
                    .iter()
                    .map(|(t, x)| StageFile {
                        stage: *t,
                        element: x.clone(),
                    })
                    .collect(),
            }
        }
    }
}

pub fn group_from_file(amb: &Ambient, f: &GroupFile, loc: &str) -> Result<Subgroup> {
    let wrap = |e: Error| Error::parse(loc, e.to_string());
    match amb {
        Ambient::Presented(p) => {
            if f.lattice.is_some() || !f.localized.is_empty() || !f.schedule.is_empty() {
                return Err(Error::parse(loc, "presented groups take only \"gens\""));
            }
            let gens = f.gens.as_ref().ok_or_else(|| Error::parse(loc, "missing \"gens\""))?;
            let gens: Vec<Vec<Int>> = gens.iter().map(|g| g.iter().map(|x| x.0.clone()).collect()).collect();
            Subgroup::presented(p, gens).map_err(wrap)
        }
        Ambient::Rational(dim) => {
            if f.gens.is_some() {
                return Err(Error::parse(loc, "rational groups take \"lattice\", not \"gens\""));
            }
            let lattice = f.lattice.clone().unwrap_or_default();
            let slots = f
                .localized
                .iter()
                .map(|s| LocalizedSlot::new(s.direction.clone(), s.forbidden_primes.iter().copied()))
                .collect();
            let desc = GroupDescriptor::new(*dim, &lattice, slots).map_err(wrap)?;
            let sched = f.schedule.iter().map(|s| (s.stage, s.element.clone())).collect();
            Ok(Subgroup::Rational(RationalGroup::new(desc, sched).map_err(wrap)?))
        }
    }
}

pub fn instance_to_file(
    inst: &DirectSumInstance,
    truth: Option<TruthFile>,
    construction: Option<ConstructionFile>,
) -> InstanceFile {
    InstanceFile {
        format_version: FORMAT_VERSION,
        backend: inst.backend(),
        ambient: ambient_to_file(&inst.ambient),
        e: group_to_file(&inst.e),
        a: group_to_file(&inst.a),
        b: group_to_file(&inst.b),
        g: group_to_file(&inst.g),
        h: group_to_file(&inst.h),
        rank: inst.rank,
        generators: inst.generators.as_ref().map(|(a, b)| GeneratorsFile {
            a: a.iter().map(elem_to_json).collect(),
            b: b.iter().map(elem_to_json).collect(),
        }),
        truth,
        construction,
    }
}

pub fn instance_from_file(f: &InstanceFile) -> Result<LoadedInstance> {
    check_version(f.format_version, "instance")?;
    let ambient = ambient_from_file(&f.ambient)?;
    let declared = match ambient {
        Ambient::Presented(_) => Backend::Presented,
        Ambient::Rational(_) => Backend::Rational,
    };
    if declared != f.backend {
        return Err(Error::parse(
            "backend",
            format!("\"{}\" does not match a {declared} ambient", f.backend),
        ));
    }
    let generators = match &f.generators {
        None => None,
        Some(g) => {
            let parse = |xs: &[Value], name: &str| {
                xs.iter()
                    .enumerate()
                    .map(|(i, v)| elem_from_json(&ambient, v, &format!("generators.{name}[{i}]")))
                    .collect::<Result<Vec<_>>>()
            };
            Some((parse(&g.a, "A")?, parse(&g.b, "B")?))
        }
    };
    let instance = DirectSumInstance {
        e: group_from_file(&ambient, &f.e, "E")?,
        a: group_from_file(&ambient, &f.a, "A")?,
        b: group_from_file(&ambient, &f.b, "B")?,
        g: group_from_file(&ambient, &f.g, "G")?,
        h: group_from_file(&ambient, &f.h, "H")?,
        rank: f.rank,
        generators,
        ambient,
    };
    Ok(LoadedInstance {
        instance,
        truth: f.truth,
        construction: f.construction,
    })
}

fn hom_node(f: &GroupHom) -> HomNode {
    match f {
        GroupHom::Cyclic(c) => HomNode::Cyclic {
            u: elem_to_json(c.u()),
            v: elem_to_json(c.v()),
            d: group_to_file(c.d()),
        },
        GroupHom::Linear(l) => HomNode::Linear {
            domain: l.domain.iter().map(elem_to_json).collect(),
            matrix: l.images.iter().map(elem_to_json).collect(),
        },
        GroupHom::Composition(parts) => HomNode::Composition {
            parts: parts.iter().map(hom_node).collect(),
        },
    }
}

fn hom_from_node(amb: &Ambient, n: &HomNode, loc: &str) -> Result<GroupHom> {
    Ok(match n {
        HomNode::Cyclic { u, v, d } => {
            let u = elem_from_json(amb, u, &format!("{loc}.u"))?;
            let v = elem_from_json(amb, v, &format!("{loc}.v"))?;
            let d = group_from_file(amb, d, &format!("{loc}.d"))?;
            GroupHom::Cyclic(CyclicPiece::new(u, v, d).map_err(|e| Error::parse(loc, e.to_string()))?)
        }
        HomNode::Linear { domain, matrix } => {
            let parse = |xs: &[Value], name: &str| {
                xs.iter()
                    .enumerate()
                    .map(|(i, x)| elem_from_json(amb, x, &format!("{loc}.{name}[{i}]")))
                    .collect::<Result<Vec<_>>>()
            };
            let map = LinearMap::new(amb.clone(), parse(domain, "domain")?, parse(matrix, "matrix")?)
                .map_err(|e| Error::parse(loc, e.to_string()))?;
            GroupHom::Linear(map)
        }
        HomNode::Composition { parts } => GroupHom::Composition(
            parts
                .iter()
                .enumerate()
                .map(|(i, p)| hom_from_node(amb, p, &format!("{loc}.parts[{i}]")))
                .collect::<Result<Vec<_>>>()?,
        ),
    })
}

pub fn hom_to_file(amb: &Ambient, f: &GroupHom) -> HomFile {
    HomFile {
        format_version: FORMAT_VERSION,
        ambient: ambient_to_file(amb),
        hom: hom_node(f),
    }
}

pub fn hom_from_file(f: &HomFile) -> Result<(Ambient, GroupHom)> {
    check_version(f.format_version, "hom")?;
    let amb = ambient_from_file(&f.ambient)?;
    let hom = hom_from_node(&amb, &f.hom, "hom")?;
    Ok((amb, hom))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("{source}:{}:{}", e.line(), e.column()), e.to_string()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    from_json(&text, &path.display().to_string())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

//! Command-line surface. Every command reads and writes JSON files and is deterministic.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cancel::{cancel_fg, hom_eval, invariant_factors};
use crate::error::{Error, Result};
use crate::exactla::{hnf, rank, snf, IntMat, JsonInt};
use crate::groups::{GroupElem, Subgroup};
use crate::io::{self, ConstructionFile, GroupInputFile, HomFile, InstanceFile, MatrixFile, TruthFile, FORMAT_VERSION};
use crate::lowerbound::{build, decode_q2, decode_q3, Construction, CorpusTruth, HaltSchedule};
use crate::oracle::{NoTruth, Oracle, TruthSource};
use crate::verify::{check_isomorphism, VerifyMode};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "wct",
    version,
    about = "Cancellation of finitely generated summands in abelian groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OracleKind {
    Exact,
    Budgeted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConstructionArg {
    Q2,
    Q3,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::Q2 => Construction::Q2,
            ConstructionArg::Q3 => Construction::Q3,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute an isomorphism G → H and write it as a hom file.
    Cancel {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: OracleKind,
        /// Candidate tuples per query for the budgeted oracle.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Do not consult the instance's truth block.
        #[arg(long)]
        ignore_truth: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a hom file is an isomorphism G → H of an instance.
    Verify {
        instance: PathBuf,
        hom: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, default_value_t = 64)]
        bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant-factor generators of a finitely generated group of the given rank.
    Classify {
        group: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: OracleKind,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a lower-bound instance with its truth block.
    Corpus {
        #[arg(value_enum)]
        construction: ConstructionArg,
        /// A positive stage, or `never`.
        #[arg(long)]
        halt_stage: String,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read the halting verdict off an isomorphism, ignoring any truth block.
    Decode {
        instance: PathBuf,
        hom: PathBuf,
        /// Overrides the construction named in the instance file.
        #[arg(long, value_enum)]
        construction: Option<ConstructionArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smith and Hermite normal forms of an integer matrix.
    Snf {
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => io::write_text(p, text),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| Error::parse("stdout", e.to_string()))
        }
    }
}

fn load_instance(path: &Path) -> Result<io::LoadedInstance> {
    io::instance_from_file(&io::read_json::<InstanceFile>(path)?)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OracleExhausted { .. } => EXIT_EXHAUSTED,
        Error::VerificationFailed(_) | Error::ImpossibleImage(_) => EXIT_FAIL,
        _ => EXIT_INVALID,
    }
}

#[derive(Serialize)]
struct ClassifyOut {
    format_version: u32,
    factors: Vec<JsonInt>,
    rank: usize,
    torsion_gens: Vec<serde_json::Value>,
    free_gens: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct DecodeOut {
    format_version: u32,
    verdict: String,
    m: Option<JsonInt>,
    p: Option<JsonInt>,
    q: Option<JsonInt>,
}

#[derive(Serialize)]
struct SnfOut {
    format_version: u32,
    diagonal: Vec<JsonInt>,
    rank: usize,
    d: IntMat,
    u: IntMat,
    v: IntMat,
    hnf: IntMat,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    format_version: u32,
    passed: bool,
    #[serde(flatten)]
    report: &'a crate::verify::VerifyReport,
}

fn with_oracle<T>(
    kind: OracleKind,
    budget: u64,
    truth: &dyn TruthSource,
    f: impl FnOnce(&Oracle) -> Result<T>,
) -> Result<T> {
    match kind {
        OracleKind::Exact => f(&Oracle::exact()),
        OracleKind::Budgeted => f(&Oracle::budgeted(budget, truth)),
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Cancel {
            instance,
            oracle,
            budget,
            ignore_truth,
            out,
        } => {
            let loaded = load_instance(&instance)?;
            let corpus_truth = match (ignore_truth, loaded.schedule()) {
                (false, Some((c, s))) => Some(CorpusTruth::new(c, s)?),
                _ => None,
            };
            let truth: &dyn TruthSource = match &corpus_truth {
                Some(t) => t,
                None => &NoTruth,
            };
            let f = with_oracle(oracle, budget, truth, |o| cancel_fg(&loaded.instance, o))?;
            emit(
                out.as_deref(),
                &io::to_json(&io::hom_to_file(&loaded.instance.ambient, &f)),
            )?;
            Ok(EXIT_PASS)
        }
        Command::Verify {
            instance,
            hom,
            mode,
            bound,
            out,
        } => {
            let loaded = load_instance(&instance)?;
            let (amb, f) = io::hom_from_file(&io::read_json::<HomFile>(&hom)?)?;
            if amb != loaded.instance.ambient {
                return Err(Error::BackendMismatch(
                    "hom and instance use different ambient groups".into(),
                ));
            }
            let mode = match mode {
                ModeArg::Exact => VerifyMode::Exact,
                ModeArg::Sampled => VerifyMode::Sampled,
            };
            let report = check_isomorphism(&loaded.instance, &f, mode, bound)?;
            let passed = report.passed();
            emit(
                out.as_deref(),
                &io::to_json(&VerifyOut {
                    format_version: FORMAT_VERSION,
                    passed,
                    report: &report,
                }),
            )?;
            Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Classify {
            group,
            rank,
            oracle,
            budget,
            out,
        } => {
            let file: GroupInputFile = io::read_json(&group)?;
            if file.format_version != FORMAT_VERSION {
                return Err(Error::parse(
                    "group.format_version",
                    format!("unsupported version {}", file.format_version),
                ));
            }
            let amb = io::ambient_from_file(&file.ambient)?;
            let sub = match &file.group {
                Some(g) => io::group_from_file(&amb, g, "group")?,
                None => match &amb {
                    crate::groups::Ambient::Presented(p) => Subgroup::whole(p),
                    crate::groups::Ambient::Rational(_) => {
                        return Err(Error::parse("group", "a rational ambient needs an explicit group"))
                    }
                },
            };
            let inv = with_oracle(oracle, budget, &NoTruth, |o| invariant_factors(&sub, rank, o))?;
            let res = ClassifyOut {
                format_version: FORMAT_VERSION,
                factors: inv.factors().into_iter().map(JsonInt).collect(),
                rank: inv.r(),
                torsion_gens: inv.torsion_gens().iter().map(io::elem_to_json).collect(),
                free_gens: inv.free.iter().map(io::elem_to_json).collect(),
            };
            emit(out.as_deref(), &io::to_json(&res))?;
            Ok(EXIT_PASS)
        }
        Command::Corpus {
            construction,
            halt_stage,
            horizon,
            index,
            out,
        } => {
            let halt = match halt_stage.trim() {
                "never" => None,
                s => Some(
                    s.parse::<u64>()
                        .map_err(|_| Error::parse("--halt-stage", format!("expected a stage or `never`, got {s:?}")))?,
                ),
            };
            let sched = HaltSchedule::new(index, halt, horizon)?;
            let c = build(construction.into(), sched)?;
            let file = io::instance_to_file(
                &c.instance,
                Some(TruthFile {
                    halts: sched.halts(),
                    stage: sched.halt_stage,
                }),
                Some(ConstructionFile {
                    kind: c.construction,
                    index,
                    horizon,
                }),
            );
            emit(out.as_deref(), &io::to_json(&file))?;
            Ok(EXIT_PASS)
        }
        Command::Decode {
            instance,
            hom,
            construction,
            out,
        } => {
            let loaded = load_instance(&instance)?;
            let kind = construction
                .map(Construction::from)
                .or(loaded.construction.map(|c| c.kind))
                .ok_or_else(|| Error::parse("construction", "instance names no construction; pass --construction"))?;
            let (_, f) = io::hom_from_file(&io::read_json::<HomFile>(&hom)?)?;
            let report = match kind {
                Construction::Q2 => decode_q2(&hom_eval(&f, &GroupElem::rats(&[0, 1]))?)?,
                Construction::Q3 => {
                    let g1 = hom_eval(&f, &GroupElem::rats(&[0, 1, 0]))?;
                    let g2 = hom_eval(&f, &GroupElem::rats(&[0, 0, 1]))?;
                    decode_q3(&g1, &g2)?
                }
            };
            let res = DecodeOut {
                format_version: FORMAT_VERSION,
                verdict: report.verdict.to_string(),
                m: report.m.map(JsonInt),
                p: report.p.map(JsonInt),
                q: report.q.map(JsonInt),
            };
            emit(out.as_deref(), &io::to_json(&res))?;
            Ok(EXIT_PASS)
        }
        Command::Snf { matrix, out } => {
            let m = io::read_json::<MatrixFile>(&matrix)?;
            if m.format_version != FORMAT_VERSION {
                return Err(Error::parse(
                    "matrix.format_version",
                    format!("unsupported version {}", m.format_version),
                ));
            }
            let s = snf(&m.matrix);
            let (h, _) = hnf(&m.matrix);
            let res = SnfOut {
                format_version: FORMAT_VERSION,
                diagonal: s.diagonal().into_iter().map(JsonInt).collect(),
                rank: rank(&m.matrix),
                d: s.d,
                u: s.u,
                v: s.v,
                hnf: h,
            };
            emit(out.as_deref(), &io::to_json(&res))?;
            Ok(EXIT_PASS)
        }
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

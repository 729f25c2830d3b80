use std::io::Read as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginzburg_core::algebra::{preprojective, HilbertSeries};
use ginzburg_core::ginzburg::{build_ginzburg, truncate_dg, BlockComplex};
use ginzburg_core::mesh::{knit, nakayama_and_n};
use ginzburg_core::quiver::Quiver;
use ginzburg_core::transfer::{check_ainf_relations, homology_and_retraction, transfer, verify_contraction, AInfinityTable, DgStructure, Retraction};
use ginzburg_core::translation::{
    arrow_classes, build_twisted, build_u, compare_homology_with_preprojective, compare_homology_with_u, compare_twisted_with_u,
    normalize_dynkin_model, BigradedAlgebra, TranslationAlgebraU,
};
use ginzburg_core::Error;
use serde::Serialize;

use crate::parser::parse_quiver;
use crate::report::{render_text, CompareJson, DumpJson, FragmentJson, HilbertJson, RelationsJson, TableJson};

#[derive(Debug, Parser)]
#[command(name = "ginzburg", version, about = "Minimal A-infinity models of Ginzburg dg algebras of acyclic quivers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Quiver file; stdin when omitted or `-`.
    #[arg(long)]
    pub quiver: Option<PathBuf>,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub wmax: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Thm42,
    Thm55,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HilbertOf {
    /// Homology of the Ginzburg dg algebra.
    Homology,
    /// The Ginzburg dg algebra itself.
    Chains,
    Preprojective,
    /// The derived translation algebra built from the AR quiver.
    Translation,
    /// The twisted polynomial algebra over the preprojective algebra (Dynkin only).
    Twisted,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transfer to the homology of the Ginzburg algebra and check the Stasheff relations.
    MinimalModel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        nmax: u64,
        /// For Dynkin quivers, apply the gauge making μ3 commute with u and
        /// removing higher products where possible.
        #[arg(long)]
        normalize: bool,
    },
    /// d² = 0, Leibniz, retraction identities and Stasheff relations.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(2..))]
        nmax: u64,
        /// Check a stored minimal-model JSON instead of a fresh transfer.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Compare bigraded algebras block by block.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Knit the AR quiver of the derived category (JSON, or DOT with `--format text`).
    ArQuiver {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Hilbert series as (weight, degree) -> dimension.
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = HilbertOf::Homology)]
        of: HilbertOf,
    },
    /// Basis, differential and arrow products of the truncated Ginzburg algebra.
    Dump {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::MinimalModel { common, .. }
            | Command::Check { common, .. }
            | Command::Compare { common, .. }
            | Command::ArQuiver { common, .. }
            | Command::Hilbert { common, .. }
            | Command::Dump { common } => common,
        }
    }
}

/// Exit status and rendered report. Codes: 0 success, 1 violations or
/// mismatches, 2 bad input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error(transparent)]
    Parse(#[from] crate::parser::ParseError),
    #[error("{0}")]
    Core(Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError::Core(e)
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, InputError> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

pub fn load_quiver(text: &str) -> Result<Quiver, InputError> {
    let q = parse_quiver(text)?;
    if q.vertex_count() == 0 {
        return Err(InputError::Other("empty quiver".into()));
    }
    if !q.is_acyclic() {
        return Err(Error::NotAcyclic.into());
    }
    Ok(q)
}

/// The truncated Ginzburg algebra with its retraction onto homology.
pub struct Pipeline {
    pub quiver: Quiver,
    pub complex: BlockComplex,
    pub retraction: Retraction,
}

impl Pipeline {
    pub fn new(q: &Quiver, max_weight: u32) -> Result<Self, Error> {
        let complex = truncate_dg(&build_ginzburg(q)?, max_weight)?;
        let retraction = homology_and_retraction(&complex)?;
        Ok(Pipeline { quiver: q.clone(), complex, retraction })
    }

    pub fn transfer(&self, n_max: usize) -> Result<AInfinityTable, Error> {
        transfer(&self.complex, &self.retraction, n_max)
    }
}

fn emit<T: Serialize>(code: i32, report: &T, format: Format) -> Outcome {
    let value = serde_json::to_value(report).expect("reports serialize");
    let output = match format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize") + "\n",
        Format::Text => render_text(&value),
    };
    Outcome { code, output }
}

fn input_failure(e: InputError) -> Outcome {
    let code = match e {
        InputError::Core(Error::Inconsistent(_)) => 1,
        _ => 2,
    };
    Outcome { code, output: format!("error: {e}\n") }
}

/// Runs one subcommand on quiver text already read from the input.
pub fn run_on_text(cmd: &Command, text: &str) -> Outcome {
    match dispatch(cmd, text) {
        Ok(o) => o,
        Err(e) => input_failure(e),
    }
}

/// Reads the quiver named by the command line, then runs.
pub fn run(cmd: &Command) -> Outcome {
    match read_input(&cmd.common().quiver) {
        Ok(text) => run_on_text(cmd, &text),
        Err(e) => input_failure(e),
    }
}

fn dispatch(cmd: &Command, text: &str) -> Result<Outcome, InputError> {
    let common = cmd.common();
    let q = load_quiver(text)?;
    let w = common.wmax;
    match cmd {
        Command::MinimalModel { nmax, normalize, .. } => minimal_model(&q, w, *nmax as usize, *normalize, common.format),
        Command::Check { nmax, table, .. } => check(&q, w, *nmax as usize, table.as_ref(), common.format),
        Command::Compare { mode, .. } => compare(&q, w, *mode, common.format),
        Command::ArQuiver { depth, .. } => {
            if *depth == 0 {
                return Err(InputError::Other("depth must be at least 1".into()));
            }
            let f = knit(&q, *depth)?;
            let report = FragmentJson::new(&f);
            Ok(match common.format {
                Format::Json => emit(0, &report, Format::Json),
                Format::Text => Outcome { code: 0, output: report.to_dot() },
            })
        }
        Command::Hilbert { of, .. } => {
            let h = hilbert(&q, w, *of)?;
            Ok(emit(0, &HilbertJson::from(&h), common.format))
        }
        Command::Dump { .. } => {
            let c = truncate_dg(&build_ginzburg(&q)?, w)?;
            Ok(emit(0, &DumpJson::new(&c), common.format))
        }
    }
}

pub fn hilbert(q: &Quiver, w: u32, of: HilbertOf) -> Result<HilbertSeries, Error> {
    let blocks = match of {
        HilbertOf::Homology => {
            let p = Pipeline::new(q, w)?;
            p.retraction.homology_dims()
        }
        HilbertOf::Chains => {
            let c = truncate_dg(&build_ginzburg(q)?, w)?;
            c.keys().map(|k| (*k, c.dim(k))).collect()
        }
        HilbertOf::Preprojective => preprojective(q, w)?.block_dims(),
        HilbertOf::Translation => build_u(q, w)?.block_dims(),
        HilbertOf::Twisted => build_twisted(q, w)?.algebra.block_dims(),
    };
    Ok(HilbertSeries::from_blocks(blocks.iter().map(|(k, d)| (k, *d))))
}

fn minimal_model(q: &Quiver, w: u32, n_max: usize, normalize: bool, format: Format) -> Result<Outcome, InputError> {
    let p = Pipeline::new(q, w)?;
    let mut table = p.transfer(n_max)?;
    let mut obstructed = None;
    if normalize {
        let d = nakayama_and_n(q)?;
        let m = normalize_dynkin_model(&table, &d)?;
        table = m.table;
        obstructed = Some(m.obstructed);
    }
    let rel = check_ainf_relations(&table, n_max);
    let labels = |x: usize| table.basis.label(x).to_string();
    let relations = RelationsJson::new(&labels, &rel);
    let violations = relations.violations;
    let report = ModelReport { table: TableJson::new(&p.quiver, &table), relations, normalized: normalize, obstructed_arities: obstructed, violations };
    Ok(emit(i32::from(violations > 0), &report, format))
}

#[derive(Serialize)]
pub struct ModelReport {
    pub table: TableJson,
    pub relations: RelationsJson,
    pub normalized: bool,
    /// Arities whose products survive every gauge; only with `--normalize`.
    pub obstructed_arities: Option<Vec<usize>>,
    pub violations: usize,
}

#[derive(Serialize)]
struct CheckReport {
    suites: Vec<Suite>,
    relations: RelationsJson,
    ok: bool,
}

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn suite(name: &'static str, r: Result<String, Error>) -> Suite {
    match r {
        Ok(detail) => Suite { name, ok: true, detail },
        Err(e) => Suite { name, ok: false, detail: e.to_string() },
    }
}

fn check(q: &Quiver, w: u32, n_max: usize, stored: Option<&PathBuf>, format: Format) -> Result<Outcome, InputError> {
    let p = Pipeline::new(q, w)?;
    let c = &p.complex;
    let mut suites = vec![
        suite("d_squared", c.verify_d_squared().map(|_| format!("{} blocks", c.keys().count()))),
        suite("leibniz", c.verify_leibniz().map(|_| "generator pairs".into())),
        suite("dg_relations", {
            let r = check_ainf_relations(&DgStructure::new(c), 3);
            if r.is_ok() { Ok(format!("{:?}", r.checked)) } else { Err(Error::Inconsistent(format!("{} violations", r.violations.len()))) }
        }),
        suite("retraction", verify_contraction(c, &p.retraction).map(|_| "qj = 1, dφ + φd = 1 - jq, φj = 0, qφ = 0, φφ = 0".into())),
    ];
    let table = match stored {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| InputError::Other(format!("table: {e}")))?;
            let tj: TableJson = serde_json::from_value(doc.get("table").cloned().unwrap_or(doc))
                .map_err(|e| InputError::Other(format!("table: {e}")))?;
            let basis = ginzburg_core::transfer::HomologyBasis::new(c, &p.retraction);
            tj.to_table(&basis).map_err(InputError::Other)?
        }
        None => p.transfer(n_max)?,
    };
    let rel = check_ainf_relations(&table, n_max);
    let labels = |x: usize| table.basis.label(x).to_string();
    let relations = RelationsJson::new(&labels, &rel);
    suites.push(Suite { name: "stasheff", ok: rel.is_ok(), detail: format!("{} violations", relations.violations) });
    let ok = suites.iter().all(|s| s.ok);
    let report = CheckReport { suites, relations, ok };
    Ok(emit(i32::from(!ok), &report, format))
}

fn compare(q: &Quiver, w: u32, mode: Mode, format: Format) -> Result<Outcome, InputError> {
    let (name, report) = match mode {
        Mode::Thm55 => {
            let t = build_twisted(q, w)?;
            let u = build_u(q, w)?;
            ("thm55", compare_twisted_with_u(&t, &u, w)?)
        }
        Mode::Thm42 => {
            let p = Pipeline::new(q, w)?;
            let table = p.transfer(2)?;
            let classes = arrow_classes(&p.complex, &p.retraction, 2 * q.arrow_count());
            let class = |a: usize| classes.get(a).cloned().flatten();
            let report = match build_u(q, w)? {
                TranslationAlgebraU::Preprojective(pi) => compare_homology_with_preprojective(&table, &class, &pi, w)?,
                u => compare_homology_with_u(&table, &class, &build_twisted(q, w)?, &u, w)?,
            };
            ("thm42", report)
        }
    };
    let ok = report.is_ok();
    Ok(emit(i32::from(!ok), &CompareJson::new(name, q, &report), format))
}

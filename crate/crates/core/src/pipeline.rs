//! End-to-end runs: enumerate semifields, list their pseudo-irreducible
//! quadratics, build functions, evaluate, filter and rank.
//!
//! A search walks the semifields in partitions sharing the same `A_2`. Each
//! finished partition is written to `chunks/` under the output directory so
//! an interrupted run can resume. Results are sorted after merging, so the
//! worker count never changes the output.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::builtins;
use crate::criteria::{
    algebraic_degree, differential_invariant, evaluate_all, linear_invariant, transparency,
    CriteriaReport, VectorialFn,
};
use crate::extension::{
    build_pseudo_cube_fn, build_pseudo_inverse_sbox, is_pseudo_irreducible,
    list_pseudo_irreducible, ExtensionError, Grouping, InverseConvention, PseudoPoly, Scaling,
};
use crate::format::{self, FormatError, Provenance, ReportRecord, SboxDocument, TableFormat};
use crate::gf2::{DetLadder, Gf2Error, DEFAULT_MAX_TABLE_DIM};
use crate::semifield::{enumerate_semifields, InverseSide, Semifield, SemifieldError, SemifieldRecord};

/// Transparency printed for AES in the reference table, used by one of the
/// breakdown counters.
pub const REFERENCE_AES_TRANSPARENCY: f64 = 7.85319;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("no semifield with id {0}")]
    UnknownId(u64),
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Semifield(#[from] SemifieldError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

impl PipelineError {
    /// Errors that mean a construction broke a property it is supposed to
    /// guarantee, as opposed to bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, PipelineError::Extension(ExtensionError::NotBijective { .. }))
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Writes through a temporary file and a rename, so readers never see a
/// partial file.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

// ---------------------------------------------------------------------------
// semifield files

/// One JSON record per line.
pub fn write_semifields(path: &Path, semifields: &[Semifield]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for s in semifields {
        let line = serde_json::to_string(&s.to_record()).expect("plain data serializes");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a semifield file written one record per line or as a JSON array.
/// Every tuple is revalidated.
pub fn read_semifields(path: &Path) -> Result<Vec<Semifield>> {
    let text = read_text(path)?;
    let records: Vec<SemifieldRecord> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| {
                serde_json::from_str(l).map_err(|e| {
                    PipelineError::Data(format!("{}:{}: {e}", path.display(), n + 1))
                })
            })
            .collect::<Result<_>>()?
    };
    records
        .par_iter()
        .map(|r| Semifield::from_record(r).map_err(PipelineError::from))
        .collect()
}

fn find_semifield(semifields: &[Semifield], id: u64) -> Result<&Semifield> {
    semifields
        .iter()
        .find(|s| s.id() == id)
        .ok_or(PipelineError::UnknownId(id))
}

// ---------------------------------------------------------------------------
// enumerate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerateSummary {
    pub dim: usize,
    pub semifields: u64,
    /// XORs spent building each determinant table level, lowest first.
    pub det_xor_counts: Vec<u64>,
    pub wall_time_secs: f64,
}

pub fn cmd_enumerate(dim: usize, out: &Path, det_table_max: usize) -> Result<EnumerateSummary> {
    if !(2..=4).contains(&dim) {
        return Err(PipelineError::Config(format!(
            "semifields can be enumerated for dimensions 2 to 4, not {dim}"
        )));
    }
    if det_table_max < dim {
        return Err(PipelineError::Config(format!(
            "dimension {dim} needs determinant tables up to {dim}, but the limit is {det_table_max}"
        )));
    }
    let start = Instant::now();
    let ladder = DetLadder::build(dim, false)?;
    let semifields = enumerate_semifields(dim, ladder.top())?;
    write_semifields(out, &semifields)?;
    Ok(EnumerateSummary {
        dim,
        semifields: semifields.len() as u64,
        det_xor_counts: (1..=dim)
            .map(|d| ladder.level(d).expect("built").xor_count())
            .collect(),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Default for `--det-table-max`.
pub const DEFAULT_DET_TABLE_MAX: usize = DEFAULT_MAX_TABLE_DIM;

// ---------------------------------------------------------------------------
// polys

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyListing {
    pub id: u64,
    pub count: usize,
    pub polys: Vec<PseudoPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyStats {
    pub semifields: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub total: usize,
    /// Number of semifields per pseudo-irreducible count.
    pub histogram: BTreeMap<usize, usize>,
}

pub fn cmd_polys(semifields: &[Semifield], id: u64) -> Result<PolyListing> {
    let s = find_semifield(semifields, id)?;
    let polys = list_pseudo_irreducible(s);
    Ok(PolyListing {
        id,
        count: polys.len(),
        polys,
    })
}

pub fn poly_stats(semifields: &[Semifield]) -> Result<PolyStats> {
    if semifields.is_empty() {
        return Err(PipelineError::Data("semifield file is empty".into()));
    }
    let counts: Vec<usize> = semifields
        .par_iter()
        .map(|s| list_pseudo_irreducible(s).len())
        .collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let total: usize = counts.iter().sum();
    Ok(PolyStats {
        semifields: counts.len(),
        min: *counts.iter().min().unwrap(),
        max: *counts.iter().max().unwrap(),
        mean: total as f64 / counts.len() as f64,
        total,
        histogram,
    })
}

// ---------------------------------------------------------------------------
// build

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    #[default]
    Inverse,
    Cube,
}

impl std::fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FunctionKind::Inverse => "inverse",
            FunctionKind::Cube => "cube",
        })
    }
}

impl std::str::FromStr for FunctionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inverse" => Ok(FunctionKind::Inverse),
            "cube" => Ok(FunctionKind::Cube),
            other => Err(format!("unknown kind {other:?} (expected inverse or cube)")),
        }
    }
}

/// Everything needed to turn a (semifield, polynomial) pair into a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildOptions {
    pub kind: FunctionKind,
    pub convention: InverseConvention,
    pub grouping: Grouping,
    /// Constant XORed onto every output.
    pub whiten: Option<u8>,
}

impl BuildOptions {
    fn provenance(&self, s: &Semifield, p: PseudoPoly) -> Provenance {
        let mut prov = Provenance {
            kind: Some(self.kind.to_string()),
            semifield_id: Some(s.id()),
            semifield_digest: Some(s.digest().to_string()),
            alpha: Some(p.alpha),
            beta: Some(p.beta),
            whitening: self.whiten,
            ..Default::default()
        };
        match self.kind {
            FunctionKind::Inverse => {
                prov.inverse_side = Some(self.convention.side.to_string());
                prov.scaling = Some(self.convention.scaling.to_string());
            }
            FunctionKind::Cube => prov.grouping = Some(self.grouping.to_string()),
        }
        prov
    }
}

pub fn build_function(s: &Semifield, p: PseudoPoly, opts: &BuildOptions) -> Result<VectorialFn> {
    let f = match opts.kind {
        FunctionKind::Inverse => build_pseudo_inverse_sbox(s, p, opts.convention)?,
        FunctionKind::Cube => build_pseudo_cube_fn(s, p, opts.grouping)?,
    };
    Ok(match opts.whiten {
        Some(c) if c != 0 => f.map_output(|y| y ^ c),
        _ => f,
    })
}

/// Builds one function and writes it as a grid to `out` and as a JSON
/// document with provenance to `out` + `.json`.
pub fn cmd_build(
    semifields: &[Semifield],
    id: u64,
    poly: PseudoPoly,
    opts: &BuildOptions,
    out: &Path,
) -> Result<(VectorialFn, Provenance)> {
    let s = find_semifield(semifields, id)?;
    if opts.kind == FunctionKind::Inverse && !is_pseudo_irreducible(s, poly) {
        return Err(ExtensionError::NotPseudoIrreducible(poly).into());
    }
    let f = build_function(s, poly, opts)?;
    let prov = opts.provenance(s, poly);
    write_atomic(out, format::to_grid(&f).as_bytes())?;
    write_atomic(&sidecar(out), format::to_json(&f, &prov).as_bytes())?;
    Ok((f, prov))
}

/// Path of the JSON document written next to a grid file.
pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

// ---------------------------------------------------------------------------
// evaluate

pub fn load_table(path: &Path) -> Result<(VectorialFn, Provenance)> {
    Ok(format::parse_table(&read_text(path)?)?)
}

pub fn load_builtin(name: &str) -> Result<(VectorialFn, Provenance)> {
    let f = builtins::builtin(name).ok_or_else(|| PipelineError::UnknownBuiltin(name.into()))?;
    Ok((f, Provenance::named(name)))
}

pub fn cmd_evaluate(f: &VectorialFn, provenance: Provenance) -> Result<ReportRecord> {
    let report = evaluate_all(f).map_err(|e| PipelineError::Data(e.to_string()))?;
    Ok(ReportRecord { report, provenance })
}

// ---------------------------------------------------------------------------
// search

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub max_delta: Option<u32>,
    pub max_lambda: Option<u32>,
    pub min_alg_degree: Option<u32>,
    #[serde(default)]
    pub require_no_fixed_points: bool,
    pub max_avalanche: Option<u32>,
    pub max_bit_independence: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKey {
    Avalanche,
    Transparency,
    BitIndependence,
    Delta,
    Lambda,
}

fn default_rank() -> Vec<RankKey> {
    vec![RankKey::Avalanche, RankKey::Transparency]
}

/// Which quadratics are tried for each semifield.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolySet {
    #[default]
    PseudoIrreducible,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default)]
    pub kind: FunctionKind,
    /// Semifield file; when absent the dimension-4 semifields are enumerated.
    pub semifields: Option<PathBuf>,
    /// Only the first `limit` semifields are searched.
    pub limit: Option<usize>,
    #[serde(default)]
    pub polys: PolySet,
    #[serde(default)]
    pub inverse_side: InverseSide,
    #[serde(default)]
    pub scaling: Scaling,
    #[serde(default)]
    pub grouping: Grouping,
    pub whiten: Option<u8>,
    /// Worker threads; 0 or absent uses every core.
    pub jobs: Option<usize>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default = "default_rank")]
    pub rank: Vec<RankKey>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            kind: FunctionKind::Inverse,
            semifields: None,
            limit: None,
            polys: PolySet::PseudoIrreducible,
            inverse_side: InverseSide::Right,
            scaling: Scaling::Chained,
            grouping: Grouping::Printed,
            whiten: None,
            jobs: None,
            filter: FilterConfig::default(),
            rank: default_rank(),
        }
    }
}

impl SearchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SearchConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&read_text(path)?)?;
        // relative semifield paths are taken from the config's directory
        if let (Some(sf), Some(dir)) = (&cfg.semifields, path.parent()) {
            if sf.is_relative() {
                cfg.semifields = Some(dir.join(sf));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.filter;
        if let Some(d) = f.max_delta {
            if d < 2 {
                return Err(PipelineError::Config(format!(
                    "max_delta = {d} admits nothing: every function has delta >= 2"
                )));
            }
        }
        if let Some(d) = f.min_alg_degree {
            if d > 8 {
                return Err(PipelineError::Config(format!(
                    "min_alg_degree = {d} exceeds the 8-bit maximum"
                )));
            }
        }
        if self.kind == FunctionKind::Inverse && self.polys == PolySet::All {
            return Err(PipelineError::Config(
                "the pseudo-inverse needs pseudo-irreducible polynomials; polys = \"all\" only applies to kind = \"cube\"".into(),
            ));
        }
        if self.limit == Some(0) {
            return Err(PipelineError::Config("limit must be positive".into()));
        }
        let mut seen = Vec::new();
        for k in &self.rank {
            if seen.contains(k) {
                return Err(PipelineError::Config(format!("rank key {k:?} repeated")));
            }
            seen.push(*k);
        }
        Ok(())
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            kind: self.kind,
            convention: InverseConvention::new(self.inverse_side, self.scaling),
            grouping: self.grouping,
            whiten: self.whiten,
        }
    }

    /// Hash of every setting that affects results; `jobs` is left out.
    pub fn digest(&self) -> String {
        let mut view = self.clone();
        view.jobs = None;
        let json = serde_json::to_string(&view).expect("plain data serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Counts for one filter stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: String,
    pub survivors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub config_digest: String,
    pub semifields: u64,
    pub polys_tested: u64,
    pub functions_built: u64,
    pub build_failures: u64,
    /// Builds rejected because the table was not a permutation.
    pub bijectivity_violations: u64,
    pub stages: Vec<StageCount>,
    pub breakdown: BTreeMap<String, u64>,
    pub chunks: u64,
    pub chunks_resumed: u64,
    pub wall_time_secs: f64,
}

impl RunLedger {
    pub fn survivors(&self) -> u64 {
        self.stages.last().map_or(self.functions_built, |s| s.survivors)
    }
}

/// One surviving function with its full report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub table: String,
    #[serde(flatten)]
    pub report: CriteriaReport,
    #[serde(flatten)]
    pub provenance: Provenance,
}

impl SearchHit {
    pub fn function(&self) -> Result<VectorialFn> {
        Ok(format::parse_table(&self.table)?.0)
    }
}

const STAGES: [&str; 7] = [
    "built",
    "max_delta",
    "max_lambda",
    "min_alg_degree",
    "no_fixed_points",
    "max_avalanche",
    "max_bit_independence",
];

/// Per-partition results, also the checkpoint file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Chunk {
    config_digest: String,
    index: u64,
    first_id: u64,
    semifields: u64,
    polys_tested: u64,
    build_failures: u64,
    bijectivity_violations: u64,
    /// Survivors after each entry of `STAGES`.
    stages: Vec<u64>,
    hits: Vec<SearchHit>,
}

enum Outcome {
    Failed { bijectivity: bool },
    Survived(Vec<bool>, Option<SearchHit>),
}

fn evaluate_pair(s: &Semifield, p: PseudoPoly, opts: &BuildOptions, flt: &FilterConfig) -> Outcome {
    let f = match build_function(s, p, opts) {
        Ok(f) => f,
        Err(e) => {
            return Outcome::Failed {
                bijectivity: e.is_invariant_violation(),
            }
        }
    };
    // cheap criteria first; the full report only for survivors
    let mut passed = vec![true];
    let checks: [&dyn Fn() -> bool; 3] = [
        &|| flt.max_delta.map_or(true, |m| differential_invariant(&f) <= m),
        &|| flt.max_lambda.map_or(true, |m| linear_invariant(&f) <= m),
        &|| flt.min_alg_degree.map_or(true, |m| algebraic_degree(&f) >= m),
    ];
    for check in checks {
        if !check() {
            return Outcome::Survived(passed, None);
        }
        passed.push(true);
    }
    let report = evaluate_all(&f).expect("8-bit table");
    let late = [
        !flt.require_no_fixed_points || report.fixed_points == 0,
        flt.max_avalanche.map_or(true, |m| report.avalanche <= m),
        flt.max_bit_independence.map_or(true, |m| report.bit_independence <= m),
    ];
    for ok in late {
        if !ok {
            return Outcome::Survived(passed, None);
        }
        passed.push(true);
    }
    Outcome::Survived(
        passed,
        Some(SearchHit {
            table: format::to_line(&f),
            report,
            provenance: opts.provenance(s, p),
        }),
    )
}

fn run_chunk(
    index: u64,
    semifields: &[Semifield],
    cfg: &SearchConfig,
    digest: &str,
) -> Chunk {
    let opts = cfg.build_options();
    let pairs: Vec<(&Semifield, PseudoPoly)> = semifields
        .iter()
        .flat_map(|s| {
            let polys = match cfg.polys {
                PolySet::PseudoIrreducible => list_pseudo_irreducible(s),
                PolySet::All => (0..16u8)
                    .flat_map(|a| (0..16u8).map(move |b| PseudoPoly::new(a, b)))
                    .collect(),
            };
            polys.into_iter().map(move |p| (s, p))
        })
        .collect();
    let outcomes: Vec<Outcome> = pairs
        .par_iter()
        .map(|&(s, p)| evaluate_pair(s, p, &opts, &cfg.filter))
        .collect();

    let mut chunk = Chunk {
        config_digest: digest.to_string(),
        index,
        first_id: semifields.first().map_or(0, |s| s.id()),
        semifields: semifields.len() as u64,
        polys_tested: pairs.len() as u64,
        build_failures: 0,
        bijectivity_violations: 0,
        stages: vec![0; STAGES.len()],
        hits: Vec::new(),
    };
    for o in outcomes {
        match o {
            Outcome::Failed { bijectivity } => {
                chunk.build_failures += 1;
                chunk.bijectivity_violations += bijectivity as u64;
            }
            Outcome::Survived(passed, hit) => {
                for (slot, _) in chunk.stages.iter_mut().zip(&passed) {
                    *slot += 1;
                }
                chunk.hits.extend(hit);
            }
        }
    }
    chunk
}

/// Consecutive runs of semifields sharing `A_2`.
fn partitions(semifields: &[Semifield]) -> Vec<&[Semifield]> {
    let key = |s: &Semifield| s.matrix_indices().get(1).copied();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=semifields.len() {
        if i == semifields.len() || key(&semifields[i]) != key(&semifields[start]) {
            out.push(&semifields[start..i]);
            start = i;
        }
    }
    out
}

fn compare_hits(a: &SearchHit, b: &SearchHit, keys: &[RankKey]) -> Ordering {
    for k in keys {
        let (ra, rb) = (&a.report, &b.report);
        let ord = match k {
            RankKey::Avalanche => ra.avalanche.cmp(&rb.avalanche),
            RankKey::Transparency => ra.transparency.total_cmp(&rb.transparency),
            RankKey::BitIndependence => ra.bit_independence.cmp(&rb.bit_independence),
            RankKey::Delta => ra.delta.cmp(&rb.delta),
            RankKey::Lambda => ra.lambda.cmp(&rb.lambda),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    let pa = &a.provenance;
    let pb = &b.provenance;
    (pa.semifield_id, pa.alpha, pa.beta, &a.table).cmp(&(pb.semifield_id, pb.alpha, pb.beta, &b.table))
}

/// Named counts over the survivors, for comparison with published tallies.
pub fn breakdown(hits: &[SearchHit], aes_transparency: f64) -> BTreeMap<String, u64> {
    let count = |pred: &dyn Fn(&CriteriaReport) -> bool| {
        hits.iter().filter(|h| pred(&h.report)).count() as u64
    };
    let no_fp = |r: &CriteriaReport| r.fixed_points == 0;
    let good_av = |r: &CriteriaReport| no_fp(r) && (r.avalanche == 8 || r.avalanche == 6);
    let mut m = BTreeMap::new();
    m.insert("with_fixed_points".into(), count(&|r| r.fixed_points > 0));
    m.insert("without_fixed_points".into(), count(&no_fp));
    m.insert("no_fixed_points_avalanche_8".into(), count(&|r| no_fp(r) && r.avalanche == 8));
    m.insert("no_fixed_points_avalanche_6".into(), count(&|r| no_fp(r) && r.avalanche == 6));
    m.insert(
        "avalanche_8_or_6_transparency_below_aes".into(),
        count(&|r| good_av(r) && r.transparency < aes_transparency),
    );
    m.insert(
        "avalanche_at_most_6_transparency_below_reference".into(),
        count(&|r| r.avalanche <= 6 && r.transparency < REFERENCE_AES_TRANSPARENCY),
    );
    m.insert("apn".into(), count(&|r| r.delta == 2));
    m.insert(
        "perfect_avalanche".into(),
        count(&|r| r.avalanche == 0 && r.bit_independence == 0),
    );
    m.insert("bijective".into(), count(&|r| r.bijective));
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub ledger: RunLedger,
    pub hits: Vec<SearchHit>,
}

pub const RESULTS_FILE: &str = "results.jsonl";
pub const RESULTS_CSV: &str = "results.csv";
pub const LEDGER_FILE: &str = "ledger.json";
pub const CHUNK_DIR: &str = "chunks";

fn chunk_path(out: &Path, index: u64) -> PathBuf {
    out.join(CHUNK_DIR).join(format!("chunk-{index:05}.json"))
}

/// Runs a search, writing `results.jsonl`, `results.csv`, `ledger.json` and
/// per-partition checkpoints under `out`. With `resume`, checkpoints from an
/// earlier run with the same configuration are reused.
pub fn cmd_search(cfg: &SearchConfig, out: &Path, resume: bool) -> Result<SearchOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let semifields = match &cfg.semifields {
        Some(path) => read_semifields(path)?,
        None => {
            let ladder = DetLadder::build(4, false)?;
            enumerate_semifields(4, ladder.top())?
        }
    };
    let semifields = match cfg.limit {
        Some(n) => &semifields[..n.min(semifields.len())],
        None => &semifields[..],
    };
    fs::create_dir_all(out.join(CHUNK_DIR)).map_err(io_err(out))?;
    let digest = cfg.digest();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;

    let mut chunks = Vec::new();
    let mut resumed = 0;
    for (i, part) in partitions(semifields).into_iter().enumerate() {
        let path = chunk_path(out, i as u64);
        if resume {
            if let Some(c) = load_chunk(&path, &digest, i as u64, part)? {
                chunks.push(c);
                resumed += 1;
                continue;
            }
        }
        let c = pool.install(|| run_chunk(i as u64, part, cfg, &digest));
        let json = serde_json::to_vec(&c).expect("plain data serializes");
        write_atomic(&path, &json)?;
        chunks.push(c);
    }

    let mut ledger = RunLedger {
        config_digest: digest,
        semifields: semifields.len() as u64,
        polys_tested: 0,
        functions_built: 0,
        build_failures: 0,
        bijectivity_violations: 0,
        stages: Vec::new(),
        breakdown: BTreeMap::new(),
        chunks: chunks.len() as u64,
        chunks_resumed: resumed,
        wall_time_secs: 0.0,
    };
    let mut stage_totals = vec![0u64; STAGES.len()];
    let mut hits = Vec::new();
    for c in chunks {
        ledger.polys_tested += c.polys_tested;
        ledger.build_failures += c.build_failures;
        ledger.bijectivity_violations += c.bijectivity_violations;
        for (t, v) in stage_totals.iter_mut().zip(&c.stages) {
            *t += v;
        }
        hits.extend(c.hits);
    }
    ledger.functions_built = stage_totals[0];
    ledger.stages = STAGES
        .iter()
        .zip(&stage_totals)
        .skip(1)
        .map(|(name, &n)| StageCount {
            stage: name.to_string(),
            survivors: n,
        })
        .collect();
    let keys = &cfg.rank;
    hits.par_sort_by(|a, b| compare_hits(a, b, keys));
    let aes = builtins::builtin("aes").expect("aes is built in");
    ledger.breakdown = breakdown(&hits, transparency(&aes));
    ledger.wall_time_secs = start.elapsed().as_secs_f64();

    write_results(out, &hits)?;
    let ledger_json = serde_json::to_string_pretty(&ledger).expect("plain data serializes");
    write_atomic(&out.join(LEDGER_FILE), ledger_json.as_bytes())?;
    Ok(SearchOutcome { ledger, hits })
}

fn load_chunk(path: &Path, digest: &str, index: u64, part: &[Semifield]) -> Result<Option<Chunk>> {
    if !path.exists() {
        return Ok(None);
    }
    let chunk: Chunk = serde_json::from_str(&read_text(path)?)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?;
    let first = part.first().map_or(0, |s| s.id());
    if chunk.config_digest != digest
        || chunk.index != index
        || chunk.first_id != first
        || chunk.semifields != part.len() as u64
    {
        return Ok(None);
    }
    Ok(Some(chunk))
}

fn write_results(out: &Path, hits: &[SearchHit]) -> Result<()> {
    let mut jsonl = String::new();
    let mut csv = ReportRecord::csv_header();
    csv.push_str(",table\n");
    for h in hits {
        jsonl.push_str(&serde_json::to_string(h).expect("plain data serializes"));
        jsonl.push('\n');
        let rec = ReportRecord {
            report: h.report.clone(),
            provenance: h.provenance.clone(),
        };
        csv.push_str(&rec.csv_row());
        csv.push(',');
        csv.push_str(&h.table);
        csv.push('\n');
    }
    write_atomic(&out.join(RESULTS_FILE), jsonl.as_bytes())?;
    write_atomic(&out.join(RESULTS_CSV), csv.as_bytes())
}

pub fn read_results(path: &Path) -> Result<Vec<SearchHit>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l)
                .map_err(|e| PipelineError::Data(format!("{}:{}: {e}", path.display(), n + 1)))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// export

/// Reads a single table (any text form) or a `results.jsonl` file.
pub fn load_tables(path: &Path) -> Result<Vec<(VectorialFn, Provenance)>> {
    let text = read_text(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let is_results = first.trim_start().starts_with('{')
        && serde_json::from_str::<SearchHit>(first).is_ok();
    if is_results {
        return read_results(path)?
            .into_iter()
            .map(|h| Ok((h.function()?, h.provenance)))
            .collect();
    }
    Ok(vec![format::parse_table(&text)?])
}

/// Renders every table of `path` in `format`. Grid and line forms separate
/// tables with a blank line; JSON is a single document or an array; CSV
/// evaluates each table.
pub fn cmd_export(path: &Path, fmt: TableFormat) -> Result<String> {
    let tables = load_tables(path)?;
    Ok(match fmt {
        TableFormat::Grid => tables
            .iter()
            .map(|(f, _)| format::to_grid(f))
            .collect::<Vec<_>>()
            .join("\n"),
        TableFormat::Line => tables
            .iter()
            .map(|(f, _)| format::to_line(f) + "\n")
            .collect(),
        TableFormat::Json => {
            if let [(f, p)] = &tables[..] {
                format::to_json(f, p) + "\n"
            } else {
                let docs: Vec<SboxDocument> = tables
                    .iter()
                    .map(|(f, p)| SboxDocument {
                        table: format::to_line(f),
                        provenance: p.clone(),
                    })
                    .collect();
                serde_json::to_string_pretty(&docs).expect("plain data serializes") + "\n"
            }
        }
        TableFormat::Csv => {
            let mut s = ReportRecord::csv_header() + "\n";
            for (f, p) in tables {
                s.push_str(&cmd_evaluate(&f, p)?.csv_row());
                s.push('\n');
            }
            s
        }
    })
}

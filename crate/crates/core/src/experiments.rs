//! Quality experiments over corpora of contexts: ε/δ sweeps and stability runs,
//! reported as CSV.
//!
//! Every run's seed is derived from a master seed and the run's position in
//! the job grid, so a spec and its master seed determine the whole output.
//! Jobs run in parallel; rows are emitted in grid order.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::context::FormalContext;
use crate::cxt::{read_context_file, ContextFormat};
use crate::datagen::{corpus, star_alliance, GenSpec};
use crate::error::{Error, Result};
use crate::implication::{canonical_basis, ImplicationList};
use crate::learn::{context_membership_oracle, derive_seed, pac_basis, PacParams};
use crate::metrics::{precision, ratio_to_f64, recall_against, ModelTable};

pub const CSV_HEADER: [&str; 12] = [
    "context_id",
    "epsilon",
    "delta",
    "repetition",
    "seed",
    "basis_size",
    "canonical_size",
    "horn_distance",
    "precision",
    "recall",
    "membership_queries",
    "samples_drawn",
];

/// Where a sweep's contexts come from.
#[derive(Clone, Debug)]
pub enum CorpusSource {
    /// Every `.cxt` / `.csv` file in a directory, by file name.
    Dir(PathBuf),
    Generate {
        gen: GenSpec,
        count: usize,
        min_basis_size: usize,
    },
    Contexts(Vec<(String, FormalContext)>),
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    pub repetitions: usize,
    pub source: CorpusSource,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct StabilitySpec {
    pub context_id: String,
    pub context: FormalContext,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub runs: usize,
    pub seed: u64,
}

fn parse_key_values(text: &str) -> Result<HashMap<String, (usize, String)>> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, format!("expected key=value, found {line:?}")))?;
        if map.insert(k.trim().to_string(), (i + 1, v.trim().to_string())).is_some() {
            return Err(Error::parse(i + 1, format!("duplicate key {:?}", k.trim())));
        }
    }
    Ok(map)
}

struct Fields {
    map: HashMap<String, (usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(line, format!("bad value {v:?} for {key}"))),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::parse(0, format!("missing key {key}")))
    }

    fn unit_list(&mut self, key: &str) -> Result<Vec<f64>> {
        let (line, v) = self
            .take(key)
            .ok_or_else(|| Error::parse(0, format!("missing key {key}")))?;
        let values = v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| *x > 0.0 && *x <= 1.0)
                    .ok_or_else(|| Error::parse(line, format!("{key}: {s:?} is not in (0, 1]")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::parse(line, format!("{key} is empty")));
        }
        Ok(values)
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((k, (line, _))) => Err(Error::parse(line, format!("unknown key {k:?}"))),
        }
    }
}

impl SweepSpec {
    /// Reads a `key=value` spec. Relative `corpus_dir` paths resolve against
    /// `base_dir`.
    ///
    /// Keys: `epsilons`, `deltas` (comma lists), `repetitions`, `seed`, and
    /// either `corpus_dir` or the generator keys `attributes`, `count`,
    /// `min_basis_size`, `objects_min`, `objects_max`, `density_min`,
    /// `density_max`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut f = Fields {
            map: parse_key_values(text)?,
        };
        let epsilons = f.unit_list("epsilons")?;
        let deltas = f.unit_list("deltas")?;
        let repetitions: usize = f.parse("repetitions")?.unwrap_or(1);
        let seed: u64 = f.parse("seed")?.unwrap_or(0);
        let source = if let Some((_, dir)) = f.take("corpus_dir") {
            CorpusSource::Dir(base_dir.join(dir))
        } else {
            let mut gen = GenSpec::new(f.require("attributes")?, seed);
            let count: usize = f.require("count")?;
            let min_basis_size: usize = f.parse("min_basis_size")?.unwrap_or(0);
            gen.objects.0 = f.parse("objects_min")?.unwrap_or(gen.objects.0);
            gen.objects.1 = f.parse("objects_max")?.unwrap_or(gen.objects.1);
            gen.density.0 = f.parse("density_min")?.unwrap_or(gen.density.0);
            gen.density.1 = f.parse("density_max")?.unwrap_or(gen.density.1);
            CorpusSource::Generate {
                gen,
                count,
                min_basis_size,
            }
        };
        f.finish()?;
        let spec = SweepSpec {
            epsilons,
            deltas,
            repetitions,
            source,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions must be at least 1"));
        }
        for &v in self.epsilons.iter().chain(&self.deltas) {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{v} is not in (0, 1]")));
            }
        }
        if self.epsilons.is_empty() || self.deltas.is_empty() {
            return Err(Error::invalid("epsilon and delta lists must be nonempty"));
        }
        Ok(())
    }
}

impl StabilitySpec {
    /// Keys: `context` (path, or `star-alliance` for the bundled context),
    /// `epsilons`, `delta`, `runs`, `seed`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut f = Fields {
            map: parse_key_values(text)?,
        };
        let (_, context_ref) = f
            .take("context")
            .ok_or_else(|| Error::parse(0, "missing key context"))?;
        let (context_id, context) = if context_ref == "star-alliance" {
            (context_ref, star_alliance())
        } else {
            let path = base_dir.join(&context_ref);
            (context_id_of(&path), read_context_file(&path)?)
        };
        let epsilons = f.unit_list("epsilons")?;
        let delta = *f
            .unit_list("delta")?
            .first()
            .expect("unit_list is nonempty");
        let runs = f.require("runs")?;
        let seed = f.parse("seed")?.unwrap_or(0);
        f.finish()?;
        Ok(Self {
            context_id,
            context,
            epsilons,
            delta,
            runs,
            seed,
        })
    }
}

fn context_id_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// A context with its canonical basis and intent table computed once for all
/// jobs that evaluate against it.
struct Prepared {
    id: String,
    context: FormalContext,
    canonical: ImplicationList,
    table: ModelTable,
}

impl Prepared {
    fn new(id: String, context: FormalContext) -> Result<Self> {
        let canonical = canonical_basis(&context)?;
        let table = ModelTable::new(crate::metrics::Target::Context(&context))?;
        Ok(Self {
            id,
            context,
            canonical,
            table,
        })
    }
}

fn load_corpus(source: &CorpusSource) -> Result<Vec<(String, FormalContext)>> {
    let contexts = match source {
        CorpusSource::Contexts(list) => list.clone(),
        CorpusSource::Generate {
            gen,
            count,
            min_basis_size,
        } => corpus(gen, *count, *min_basis_size)?
            .into_iter()
            .map(|e| (format!("ctx{:04}", e.index), e.context))
            .collect(),
        CorpusSource::Dir(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            paths.retain(|p| {
                p.is_file()
                    && matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("cxt") | Some("csv")
                    )
                    && !(ContextFormat::from_path(p) == ContextFormat::CsvBinary
                        && p.file_stem().is_some_and(|s| s == "manifest"))
            });
            paths.sort();
            paths
                .iter()
                .map(|p| Ok((context_id_of(p), read_context_file(p)?)))
                .collect::<Result<_>>()?
        }
    };
    if contexts.is_empty() {
        return Err(Error::Data("corpus is empty".into()));
    }
    Ok(contexts)
}

/// One PAC run and its evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub context_id: String,
    pub epsilon: f64,
    pub delta: f64,
    pub repetition: usize,
    pub seed: u64,
    pub basis_size: usize,
    pub canonical_size: usize,
    /// Ratios are stored rounded to 6 significant digits, as written.
    pub horn_distance: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub membership_queries: u64,
    pub samples_drawn: u64,
}

/// Mean or population standard deviation of the rows of one (ε, δ) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub basis_size: f64,
    pub canonical_size: f64,
    pub horn_distance: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub membership_queries: f64,
    pub samples_drawn: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub epsilon: f64,
    pub delta: f64,
    pub rows: usize,
    pub mean: CellSummary,
    pub std: CellSummary,
    /// Rows whose precision (recall) was undefined and left out of the average.
    pub precision_skipped: usize,
    pub recall_skipped: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<RunRow>,
    pub aggregates: Vec<Aggregate>,
}

/// Rounds to 6 significant decimal digits.
pub fn round_sig6(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

fn run_one(p: &Prepared, epsilon: f64, delta: f64, repetition: usize, seed: u64) -> Result<RunRow> {
    let params = PacParams::new(epsilon, delta, seed)?;
    let mut member = context_membership_oracle(&p.context);
    let (basis, stats) = pac_basis(p.context.attribute_count(), &mut member, &params)?;
    let distance = p.table.horn_distance(&basis)?;
    Ok(RunRow {
        context_id: p.id.clone(),
        epsilon,
        delta,
        repetition,
        seed,
        basis_size: basis.len(),
        canonical_size: p.canonical.len(),
        horn_distance: round_sig6(ratio_to_f64(distance)),
        precision: precision(&p.context, &basis)?.map(|r| round_sig6(ratio_to_f64(r))),
        recall: recall_against(&p.canonical, &basis)?.map(|r| round_sig6(ratio_to_f64(r))),
        membership_queries: stats.membership_queries,
        samples_drawn: stats.samples_drawn,
    })
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

fn aggregate(epsilon: f64, delta: f64, rows: &[&RunRow]) -> Aggregate {
    let stat = |f: &dyn Fn(&RunRow) -> f64| {
        mean_std(&rows.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap_or((f64::NAN, f64::NAN))
    };
    let optional = |f: &dyn Fn(&RunRow) -> Option<f64>| {
        let values: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
        (mean_std(&values), rows.len() - values.len())
    };
    let basis = stat(&|r| r.basis_size as f64);
    let canonical = stat(&|r| r.canonical_size as f64);
    let distance = stat(&|r| r.horn_distance);
    let mq = stat(&|r| r.membership_queries as f64);
    let samples = stat(&|r| r.samples_drawn as f64);
    let (precision, precision_skipped) = optional(&|r| r.precision);
    let (recall, recall_skipped) = optional(&|r| r.recall);
    Aggregate {
        epsilon,
        delta,
        rows: rows.len(),
        mean: CellSummary {
            basis_size: basis.0,
            canonical_size: canonical.0,
            horn_distance: distance.0,
            precision: precision.map(|p| p.0),
            recall: recall.map(|p| p.0),
            membership_queries: mq.0,
            samples_drawn: samples.0,
        },
        std: CellSummary {
            basis_size: basis.1,
            canonical_size: canonical.1,
            horn_distance: distance.1,
            precision: precision.map(|p| p.1),
            recall: recall.map(|p| p.1),
            membership_queries: mq.1,
            samples_drawn: samples.1,
        },
        precision_skipped,
        recall_skipped,
    }
}

struct Job<'a> {
    context: &'a Prepared,
    epsilon: f64,
    delta: f64,
    repetition: usize,
    seed: u64,
}

fn run_jobs(jobs: Vec<Job<'_>>, cells: &[(f64, f64)]) -> Result<ExperimentReport> {
    let rows = jobs
        .par_iter()
        .map(|j| run_one(j.context, j.epsilon, j.delta, j.repetition, j.seed))
        .collect::<Result<Vec<_>>>()?;
    let aggregates = cells
        .iter()
        .map(|&(e, d)| {
            let cell: Vec<&RunRow> = rows.iter().filter(|r| r.epsilon == e && r.delta == d).collect();
            aggregate(e, d, &cell)
        })
        .collect();
    Ok(ExperimentReport { rows, aggregates })
}

/// Runs every (context, ε, δ, repetition) combination of the spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let prepared = load_corpus(&spec.source)?
        .into_par_iter()
        .map(|(id, ctx)| Prepared::new(id, ctx))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    let mut cells = Vec::new();
    for &e in &spec.epsilons {
        for &d in &spec.deltas {
            cells.push((e, d));
        }
    }
    for p in &prepared {
        for &(epsilon, delta) in &cells {
            for repetition in 0..spec.repetitions {
                let seed = derive_seed(spec.seed, jobs.len() as u64);
                jobs.push(Job {
                    context: p,
                    epsilon,
                    delta,
                    repetition,
                    seed,
                });
            }
        }
    }
    run_jobs(jobs, &cells)
}

/// Repeated PAC runs on one context, with run `r` seeded by
/// `derive_seed(master_seed, r)` for every ε.
pub fn run_stability(
    context_id: &str,
    ctx: &FormalContext,
    epsilons: &[f64],
    delta: f64,
    runs: usize,
    master_seed: u64,
) -> Result<ExperimentReport> {
    if runs < 2 {
        return Err(Error::invalid("stability needs at least 2 runs"));
    }
    let seeds: Vec<u64> = (0..runs as u64).map(|r| derive_seed(master_seed, r)).collect();
    run_stability_with_seeds(context_id, ctx, epsilons, delta, &seeds)
}

pub fn run_stability_with_seeds(
    context_id: &str,
    ctx: &FormalContext,
    epsilons: &[f64],
    delta: f64,
    seeds: &[u64],
) -> Result<ExperimentReport> {
    if epsilons.is_empty() || seeds.is_empty() {
        return Err(Error::invalid("need at least one epsilon and one run"));
    }
    let prepared = Prepared::new(context_id.to_string(), ctx.clone())?;
    let mut jobs = Vec::new();
    let cells: Vec<(f64, f64)> = epsilons.iter().map(|&e| (e, delta)).collect();
    for &(epsilon, delta) in &cells {
        for (repetition, &seed) in seeds.iter().enumerate() {
            jobs.push(Job {
                context: &prepared,
                epsilon,
                delta,
                repetition,
                seed,
            });
        }
    }
    run_jobs(jobs, &cells)
}

impl StabilitySpec {
    pub fn run(&self) -> Result<ExperimentReport> {
        run_stability(
            &self.context_id,
            &self.context,
            &self.epsilons,
            self.delta,
            self.runs,
            self.seed,
        )
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_fields(s: &CellSummary) -> [String; 7] {
    [
        s.basis_size.to_string(),
        s.canonical_size.to_string(),
        s.horn_distance.to_string(),
        opt(s.precision),
        opt(s.recall),
        s.membership_queries.to_string(),
        s.samples_drawn.to_string(),
    ]
}

impl ExperimentReport {
    /// Data rows in grid order, then a `mean` and a `std` row per (ε, δ)
    /// cell. In aggregate rows `repetition` holds the number of data rows in
    /// the cell and `seed` is empty. Undefined values are empty cells.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.context_id.clone(),
                r.epsilon.to_string(),
                r.delta.to_string(),
                r.repetition.to_string(),
                r.seed.to_string(),
                r.basis_size.to_string(),
                r.canonical_size.to_string(),
                r.horn_distance.to_string(),
                opt(r.precision),
                opt(r.recall),
                r.membership_queries.to_string(),
                r.samples_drawn.to_string(),
            ])?;
        }
        for a in &self.aggregates {
            for (label, summary) in [("mean", &a.mean), ("std", &a.std)] {
                let mut record = vec![
                    label.to_string(),
                    a.epsilon.to_string(),
                    a.delta.to_string(),
                    a.rows.to_string(),
                    String::new(),
                ];
                record.extend(summary_fields(summary));
                w.write_record(&record)?;
            }
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn aggregate(&self, epsilon: f64, delta: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.epsilon == epsilon && a.delta == delta)
    }
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fca_pac::datagen::{corpus, manifest_csv, star_alliance, GenSpec, STAR_ALLIANCE_COARSE_BASIS};
use fca_pac::experiments::{run_sweep, ExperimentReport, StabilitySpec, SweepSpec};
use fca_pac::learn::{context_membership_oracle, SamplerKind};
use fca_pac::metrics::{ratio_to_f64, EvalMode, EvalReport};
use fca_pac::{
    canonical_basis, evaluate, pac_basis, parse_implications, read_context_file, write_context, ContextFormat,
    Error, FormalContext, ImplicationList, PacParams,
};
use num_rational::Ratio;

/// Canonical and PAC implication bases of formal contexts.
#[derive(Parser)]
#[command(name = "fca-pac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical basis of a context.
    CanonicalBasis {
        /// `.cxt` or `.csv` file, or `star-alliance` for the bundled context.
        context: String,
    },
    /// Learn a PAC basis with HORN1 and a sampling equivalence oracle.
    PacBasis {
        context: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `uniform` or `biased:<p1>,<p2>,...` with one probability per attribute.
        #[arg(long, default_value = "uniform")]
        sampler: String,
    },
    /// Horn-distance, precision and recall of an implication file.
    Eval {
        context: String,
        implications: PathBuf,
        /// Estimate Horn-distance from this many uniform samples.
        #[arg(long)]
        sampled: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a corpus of random contexts.
    Gen {
        #[arg(long)]
        attributes: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        min_basis_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        objects_min: usize,
        #[arg(long, default_value_t = 400)]
        objects_max: usize,
        #[arg(long, default_value_t = 0.1)]
        density_min: f64,
        #[arg(long, default_value_t = 0.9)]
        density_max: f64,
    },
    /// Run a sweep or stability experiment and write CSV.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Canonical basis, PAC bases and distances on the bundled Star-Alliance context.
    CaseStudy {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ExperimentKind {
    Sweep,
    Stability,
}

fn load_context(name: &str) -> fca_pac::Result<FormalContext> {
    let path = Path::new(name);
    if name == "star-alliance" && !path.exists() {
        return Ok(star_alliance());
    }
    read_context_file(path)
}

fn read_text(path: &Path) -> fca_pac::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn fmt_ratio(r: Ratio<u64>) -> String {
    fca_pac::experiments::round_sig6(ratio_to_f64(r)).to_string()
}

fn fmt_opt(r: Option<Ratio<u64>>) -> String {
    r.map(fmt_ratio).unwrap_or_else(|| "undefined".into())
}

fn print_report(out: &mut impl Write, report: &EvalReport, prefix: &str) -> std::io::Result<()> {
    let d = report.horn_distance;
    writeln!(out, "{prefix}horn_distance={}", fmt_ratio(d))?;
    writeln!(out, "{prefix}horn_distance_ratio={}/{}", d.numer(), d.denom())?;
    writeln!(out, "{prefix}precision={}", fmt_opt(report.precision))?;
    writeln!(out, "{prefix}recall={}", fmt_opt(report.recall))?;
    writeln!(out, "{prefix}basis_size={}", report.basis_size)?;
    match report.canonical_size {
        Some(n) => writeln!(out, "{prefix}canonical_size={n}")?,
        None => writeln!(out, "{prefix}canonical_size=undefined")?,
    }
    match report.mode {
        EvalMode::Exact => writeln!(out, "{prefix}mode=exact"),
        EvalMode::Sampled { samples, seed } => writeln!(out, "{prefix}mode=sampled:{samples}:{seed}"),
    }
}

fn learn(ctx: &FormalContext, params: &PacParams) -> fca_pac::Result<(ImplicationList, fca_pac::RunStats)> {
    let mut member = context_membership_oracle(ctx);
    pac_basis(ctx.attribute_count(), &mut member, params)
}

fn write_experiment(report: &ExperimentReport, out: &Path) -> fca_pac::Result<()> {
    std::fs::write(out, report.to_csv()?)?;
    for a in &report.aggregates {
        if a.precision_skipped > 0 || a.recall_skipped > 0 {
            eprintln!(
                "epsilon={} delta={}: {} of {} rows without precision, {} without recall",
                a.epsilon, a.delta, a.precision_skipped, a.rows, a.recall_skipped
            );
        }
    }
    Ok(())
}

fn run(command: Command) -> fca_pac::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::CanonicalBasis { context } => {
            let ctx = load_context(&context)?;
            let can = canonical_basis(&ctx)?;
            write!(out, "{}", can.display(ctx.universe()))?;
        }
        Command::PacBasis {
            context,
            epsilon,
            delta,
            seed,
            sampler,
        } => {
            let ctx = load_context(&context)?;
            let sampler: SamplerKind = sampler.parse()?;
            let params = PacParams::new(epsilon, delta, seed)?.with_sampler(sampler);
            let (basis, stats) = learn(&ctx, &params)?;
            write!(out, "{}", basis.display(ctx.universe()))?;
            for (k, v) in stats.to_record() {
                writeln!(out, "# {k}={v}")?;
            }
        }
        Command::Eval {
            context,
            implications,
            sampled,
            seed,
        } => {
            let ctx = load_context(&context)?;
            let text = read_text(&implications)?;
            let h = parse_implications(&text, ctx.universe())?;
            let mode = match sampled {
                Some(samples) => EvalMode::Sampled { samples, seed },
                None => EvalMode::Exact,
            };
            print_report(&mut out, &evaluate(&ctx, &h, mode)?, "")?;
        }
        Command::Gen {
            attributes,
            count,
            min_basis_size,
            seed,
            out_dir,
            objects_min,
            objects_max,
            density_min,
            density_max,
        } => {
            let spec = GenSpec {
                objects: (objects_min, objects_max),
                density: (density_min, density_max),
                ..GenSpec::new(attributes, seed)
            };
            let entries = corpus(&spec, count, min_basis_size)?;
            std::fs::create_dir_all(&out_dir)?;
            for e in &entries {
                let path = out_dir.join(format!("ctx{:04}.cxt", e.index));
                std::fs::write(path, write_context(&e.context, ContextFormat::Burmeister))?;
            }
            std::fs::write(out_dir.join("manifest.csv"), manifest_csv(&entries)?)?;
            std::fs::write(
                out_dir.join("generator.txt"),
                format!(
                    "attributes={attributes}\ncount={count}\nmin_basis_size={min_basis_size}\nseed={seed}\n\
                     objects_min={objects_min}\nobjects_max={objects_max}\n\
                     density_min={density_min}\ndensity_max={density_max}\n"
                ),
            )?;
            writeln!(out, "wrote {} contexts to {}", entries.len(), out_dir.display())?;
        }
        Command::Experiment { kind, spec, out: path } => {
            let text = read_text(&spec)?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let report = match kind {
                ExperimentKind::Sweep => run_sweep(&SweepSpec::parse(&text, base)?)?,
                ExperimentKind::Stability => StabilitySpec::parse(&text, base)?.run()?,
            };
            write_experiment(&report, &path)?;
        }
        Command::CaseStudy { seed } => {
            let sa = star_alliance();
            let u = sa.universe();
            let can = canonical_basis(&sa)?;
            writeln!(
                out,
                "# star-alliance: {} objects, {} attributes",
                sa.object_count(),
                sa.attribute_count()
            )?;
            writeln!(out, "# canonical basis ({} implications)", can.len())?;
            write!(out, "{}", can.display(u))?;
            for epsilon in [0.1, 0.5] {
                let params = PacParams::new(epsilon, 0.1, seed)?;
                let (basis, _) = learn(&sa, &params)?;
                writeln!(
                    out,
                    "# pac basis epsilon={epsilon} delta=0.1 seed={seed} ({} implications)",
                    basis.len()
                )?;
                write!(out, "{}", basis.display(u))?;
                print_report(&mut out, &evaluate(&sa, &basis, EvalMode::Exact)?, "# ")?;
            }
            let coarse = parse_implications(STAR_ALLIANCE_COARSE_BASIS, u)?;
            writeln!(out, "# coarse basis ({} implications)", coarse.len())?;
            write!(out, "{}", coarse.display(u))?;
            print_report(&mut out, &evaluate(&sa, &coarse, EvalMode::Exact)?, "# ")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

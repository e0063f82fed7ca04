//! Artificial context generation and the bundled Star-Alliance context.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attrs::{AttributeSet, AttributeUniverse};
use crate::context::FormalContext;
use crate::cxt::{parse_context, ContextFormat};
use crate::error::{Error, Result};
use crate::implication::canonical_basis;
use crate::learn::derive_seed;

/// Star Alliance members (before 2002) and the regions they serve, in
/// Burmeister format.
pub const STAR_ALLIANCE_CXT: &str = include_str!("../data/star-alliance.cxt");

pub fn star_alliance() -> FormalContext {
    parse_context(STAR_ALLIANCE_CXT.as_bytes(), ContextFormat::Burmeister).expect("bundled context is well-formed")
}

/// A coarse five-implication approximation of the Star-Alliance theory, as a
/// PAC run with a large ε may return it.
pub const STAR_ALLIANCE_COARSE_BASIS: &str = "Caribbean -> ⊥
Asia Pacific, Mexico -> ⊥
Asia Pacific, Europe -> ⊥
Middle East -> ⊥
Latin America -> Mexico, United States, Canada
";

pub const DEFAULT_MAX_OBJECTS: usize = 4096;

/// Parameters of the biased-coin context generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub num_attributes: usize,
    /// Inclusive range the object count is drawn from uniformly.
    pub objects: (usize, usize),
    /// Range the cross probability is drawn from uniformly.
    pub density: (f64, f64),
    pub seed: u64,
    pub max_objects: usize,
}

impl GenSpec {
    pub fn new(num_attributes: usize, seed: u64) -> Self {
        Self {
            num_attributes,
            objects: (1, 400),
            density: (0.1, 0.9),
            seed,
            max_objects: DEFAULT_MAX_OBJECTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.objects;
        if lo < 1 || lo > hi || hi > self.max_objects {
            return Err(Error::invalid(format!(
                "object range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= {}",
                self.max_objects
            )));
        }
        let (dlo, dhi) = self.density;
        if !(0.0..=1.0).contains(&dlo) || !(0.0..=1.0).contains(&dhi) || dlo > dhi {
            return Err(Error::invalid(format!("density range [{dlo}, {dhi}] must lie in [0, 1]")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedContext {
    pub context: FormalContext,
    pub density: f64,
    pub seed: u64,
}

/// One context: object count and cross probability `p` drawn uniformly from
/// their ranges, then every incidence set independently with probability `p`.
pub fn random_context(spec: &GenSpec) -> Result<GeneratedContext> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let count = rng.gen_range(spec.objects.0..=spec.objects.1);
    let (dlo, dhi) = spec.density;
    let density = if dlo == dhi { dlo } else { rng.gen_range(dlo..=dhi) };
    let n = spec.num_attributes;
    let universe = AttributeUniverse::new((1..=n).map(|i| format!("m{i}")))?;
    let objects = (1..=count)
        .map(|g| {
            let row = AttributeSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(density)));
            (format!("g{g}"), row)
        })
        .collect();
    Ok(GeneratedContext {
        context: FormalContext::new(universe, objects)?,
        density,
        seed: spec.seed,
    })
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub index: usize,
    pub seed: u64,
    pub density: f64,
    pub canonical_size: usize,
    pub context: FormalContext,
}

/// Attempts allowed per requested context before giving up.
pub const GIVE_UP_FACTOR: usize = 100;

/// Generates contexts until `count` of them have a canonical basis of at
/// least `min_basis_size` implications. Attempt `k` uses seed
/// `derive_seed(spec.seed, k)`.
pub fn corpus(spec: &GenSpec, count: usize, min_basis_size: usize) -> Result<Vec<CorpusEntry>> {
    if count == 0 {
        return Err(Error::invalid("corpus size must be at least 1"));
    }
    spec.validate()?;
    let max_attempts = GIVE_UP_FACTOR * count;
    let mut out = Vec::with_capacity(count);
    for attempt in 0..max_attempts {
        let seed = derive_seed(spec.seed, attempt as u64);
        let generated = random_context(&GenSpec { seed, ..spec.clone() })?;
        let canonical_size = canonical_basis(&generated.context)?.len();
        if canonical_size >= min_basis_size {
            out.push(CorpusEntry {
                index: out.len(),
                seed,
                density: generated.density,
                canonical_size,
                context: generated.context,
            });
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(Error::GenerationExhausted {
        attempts: max_attempts,
        accepted: out.len(),
        wanted: count,
    })
}

/// `index,seed,objects,density,canonical_size` with one row per entry.
pub fn manifest_csv(entries: &[CorpusEntry]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["index", "seed", "objects", "density", "canonical_size"])?;
    for e in entries {
        w.write_record([
            e.index.to_string(),
            e.seed.to_string(),
            e.context.object_count().to_string(),
            e.density.to_string(),
            e.canonical_size.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

//! Quality measures of a hypothesis against a context or theory: Horn-distance,
//! precision and recall.

use num_rational::Ratio;

use crate::attrs::AttributeSet;
use crate::context::FormalContext;
use crate::error::{check_cap, check_cap_hint, Error, Result, DEFAULT_ENUMERATION_CAP};
use crate::implication::{canonical_basis, ImplicationList};
use crate::learn::uniform_sampler;

/// What a hypothesis is compared against: `Int(K)` or `Mod(L)`.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Context(&'a FormalContext),
    Theory(&'a ImplicationList),
}

impl Target<'_> {
    pub fn universe_len(&self) -> usize {
        match self {
            Target::Context(ctx) => ctx.attribute_count(),
            Target::Theory(list) => list.universe_len(),
        }
    }

    fn contains(&self, x: &AttributeSet) -> bool {
        match self {
            Target::Context(ctx) => ctx.is_intent_unchecked(x),
            Target::Theory(list) => list.is_model_unchecked(x),
        }
    }
}

/// Target membership tabulated over all `2^|M|` subsets, indexed by lectic rank.
#[derive(Clone, Debug)]
pub struct ModelTable {
    universe_len: usize,
    members: Vec<bool>,
}

impl ModelTable {
    pub fn new(target: Target<'_>) -> Result<Self> {
        let n = target.universe_len();
        check_cap_hint(
            "exact Horn-distance",
            n,
            DEFAULT_ENUMERATION_CAP,
            "; use the sampled estimator instead",
        )?;
        let mut members = vec![false; 1 << n];
        match target {
            Target::Context(ctx) => {
                for intent in ctx.enumerate_intents()? {
                    members[intent.lectic_rank() as usize] = true;
                }
            }
            Target::Theory(list) => {
                for (k, slot) in members.iter_mut().enumerate() {
                    *slot = list.is_model_unchecked(&AttributeSet::from_lectic_rank(n, k as u64));
                }
            }
        }
        Ok(Self { universe_len: n, members })
    }

    pub fn universe_len(&self) -> usize {
        self.universe_len
    }

    pub fn model_count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    /// `|Mod(h) △ T|` over every subset of the universe.
    pub fn symmetric_difference_count(&self, h: &ImplicationList) -> Result<u64> {
        check_same(h.universe_len(), self.universe_len)?;
        let n = self.universe_len;
        Ok(self
            .members
            .iter()
            .enumerate()
            .filter(|(k, &t)| h.is_model_unchecked(&AttributeSet::from_lectic_rank(n, *k as u64)) != t)
            .count() as u64)
    }

    pub fn horn_distance(&self, h: &ImplicationList) -> Result<Ratio<u64>> {
        Ok(Ratio::new(self.symmetric_difference_count(h)?, 1u64 << self.universe_len))
    }
}

fn check_same(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "hypothesis over {found} attributes, target over {expected}"
        )))
    }
}

/// `|Mod(h) △ T| / 2^|M|`, counted exhaustively.
pub fn horn_distance(h: &ImplicationList, target: Target<'_>) -> Result<Ratio<u64>> {
    check_same(h.universe_len(), target.universe_len())?;
    ModelTable::new(target)?.horn_distance(h)
}

/// Monte-Carlo estimate of the Horn-distance from `n` uniform subsets.
pub fn horn_distance_sampled(h: &ImplicationList, target: Target<'_>, n: u64, seed: u64) -> Result<Ratio<u64>> {
    check_same(h.universe_len(), target.universe_len())?;
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let mut sampler = uniform_sampler(target.universe_len(), seed);
    let hits = (0..n)
        .filter(|_| {
            let x = sampler.draw();
            h.is_model_unchecked(&x) != target.contains(&x)
        })
        .count() as u64;
    Ok(Ratio::new(hits, n))
}

/// Fraction of `h` valid in `ctx`; `None` for an empty hypothesis.
pub fn precision(ctx: &FormalContext, h: &ImplicationList) -> Result<Option<Ratio<u64>>> {
    check_same(h.universe_len(), ctx.attribute_count())?;
    check_cap("precision", ctx.attribute_count(), DEFAULT_ENUMERATION_CAP)?;
    if h.is_empty() {
        return Ok(None);
    }
    let valid = h
        .iter()
        .filter(|imp| imp.conclusion.is_subset(&ctx.close_unchecked(&imp.premise)))
        .count() as u64;
    Ok(Some(Ratio::new(valid, h.len() as u64)))
}

/// Fraction of the canonical basis of `ctx` entailed by `h`; `None` when the
/// canonical basis is empty.
pub fn recall(ctx: &FormalContext, h: &ImplicationList) -> Result<Option<Ratio<u64>>> {
    check_same(h.universe_len(), ctx.attribute_count())?;
    let canonical = canonical_basis(ctx)?;
    recall_against(&canonical, h)
}

/// Recall against an already computed canonical basis.
pub fn recall_against(canonical: &ImplicationList, h: &ImplicationList) -> Result<Option<Ratio<u64>>> {
    check_same(h.universe_len(), canonical.universe_len())?;
    if canonical.is_empty() {
        return Ok(None);
    }
    let entailed = canonical
        .iter()
        .filter(|imp| imp.conclusion.is_subset(&h.close_unchecked(&imp.premise)))
        .count() as u64;
    Ok(Some(Ratio::new(entailed, canonical.len() as u64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

/// Horn-distance, precision and recall of one hypothesis against a context.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub horn_distance: Ratio<u64>,
    pub precision: Option<Ratio<u64>>,
    pub recall: Option<Ratio<u64>>,
    pub basis_size: usize,
    /// `None` when the context is too wide to compute its canonical basis.
    pub canonical_size: Option<usize>,
    pub mode: EvalMode,
}

pub fn evaluate(ctx: &FormalContext, h: &ImplicationList, mode: EvalMode) -> Result<EvalReport> {
    check_same(h.universe_len(), ctx.attribute_count())?;
    let within_cap = ctx.attribute_count() <= DEFAULT_ENUMERATION_CAP;
    if mode == EvalMode::Exact && !within_cap {
        check_cap_hint(
            "exact Horn-distance",
            ctx.attribute_count(),
            DEFAULT_ENUMERATION_CAP,
            "; use the sampled estimator instead",
        )?;
    }
    let horn_distance = match mode {
        EvalMode::Exact => horn_distance(h, Target::Context(ctx))?,
        EvalMode::Sampled { samples, seed } => horn_distance_sampled(h, Target::Context(ctx), samples, seed)?,
    };
    let (precision, recall, canonical_size) = if within_cap {
        let canonical = canonical_basis(ctx)?;
        (
            precision(ctx, h)?,
            recall_against(&canonical, h)?,
            Some(canonical.len()),
        )
    } else {
        (None, None, None)
    };
    Ok(EvalReport {
        horn_distance,
        precision,
        recall,
        basis_size: h.len(),
        canonical_size,
        mode,
    })
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

//! Query learning of implication theories: HORN1 with membership and
//! equivalence oracles, and PAC bases via a sampling equivalence oracle.

mod oracle;
mod sampler;

use std::fmt;

pub use oracle::{
    context_membership_oracle, exact_equivalence_oracle, make_sampling_equivalence_oracle,
    ContextMembershipOracle, Counterexample, CounterexampleKind, EquivalenceOracle,
    ExactEquivalenceOracle, MembershipOracle, SamplingEquivalenceOracle, TheoryMembershipOracle,
    Verdict,
};
pub use sampler::{
    biased_sampler, derive_seed, splitmix64, uniform_sampler, SamplerKind, SubsetSampler,
};

use crate::attrs::AttributeSet;
use crate::error::{Error, Result};
use crate::implication::{Implication, ImplicationList};

/// Values within this distance above an integer are treated as that integer
/// before taking the ceiling.
const CEIL_SLACK: f64 = 1.0 / (1u64 << 40) as f64;

/// Number of samples for the `i`-th equivalence query:
/// `⌈(1/ε)·(i − log₂ δ)⌉`.
///
/// ```
/// use fca_pac::learn::sample_count;
/// assert_eq!(sample_count(0.1, 0.1, 1).unwrap(), 44);
/// ```
pub fn sample_count(epsilon: f64, delta: f64, i: u64) -> Result<u64> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    if i == 0 {
        return Err(Error::invalid("query index starts at 1"));
    }
    let value = (i as f64 - delta.log2()) / epsilon;
    let floor = value.floor();
    let rounded = if value - floor < CEIL_SLACK { floor } else { value.ceil() };
    Ok(rounded as u64)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, 1], got {v}")))
    }
}

/// Accuracy, confidence, RNG seed and sampling distribution of a PAC run.
#[derive(Clone, Debug, PartialEq)]
pub struct PacParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub sampler: SamplerKind,
}

impl PacParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        let params = Self {
            epsilon,
            delta,
            seed,
            sampler: SamplerKind::Uniform,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_sampler(mut self, sampler: SamplerKind) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("epsilon", self.epsilon)?;
        check_unit("delta", self.delta)
    }
}

/// Bookkeeping of one `pac_basis` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    /// Number of equivalence queries asked, including the final accepted one.
    pub i_final: u64,
    pub membership_queries: u64,
    pub samples_drawn: u64,
    pub basis_size: usize,
}

impl RunStats {
    pub fn to_record(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.seed.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("delta", self.delta.to_string()),
            ("i_final", self.i_final.to_string()),
            ("membership_queries", self.membership_queries.to_string()),
            ("samples_drawn", self.samples_drawn.to_string()),
            ("basis_size", self.basis_size.to_string()),
        ]
    }
}

/// One `key=value` pair per line.
impl fmt::Display for RunStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_record() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// HORN1 over a universe of `universe_len` attributes.
///
/// With exact oracles for a theory `L` the result is the canonical basis of
/// `L` (premises pseudo-closed, in the order they were discovered).
pub fn horn1(
    universe_len: usize,
    member: &mut dyn MembershipOracle,
    equiv: &mut dyn EquivalenceOracle,
) -> Result<ImplicationList> {
    let mut hypothesis = ImplicationList::new(universe_len);
    let full = AttributeSet::full(universe_len);
    loop {
        let Counterexample { set: c, kind } = match equiv.check(&hypothesis, member) {
            Verdict::Equivalent => return Ok(hypothesis),
            Verdict::Counterexample(ce) => ce,
        };
        if c.universe_len() != universe_len {
            return Err(protocol(&c, "counterexample over a different universe"));
        }

        let violated = hypothesis.iter().any(|imp| !imp.is_respected_by(&c));
        if violated {
            if kind != CounterexampleKind::Positive {
                return Err(protocol(&c, "reported negative but the hypothesis rejects it"));
            }
            for imp in hypothesis.items_mut() {
                if !imp.is_respected_by(&c) {
                    imp.conclusion.intersect_with(&c);
                }
            }
            continue;
        }

        if kind != CounterexampleKind::Negative {
            return Err(protocol(&c, "reported positive but it is a model of the hypothesis"));
        }
        if c == full {
            return Err(protocol(&c, "the full attribute set is a model of every theory"));
        }
        let mut refined = None;
        for (idx, imp) in hypothesis.iter().enumerate() {
            let shrunk = c.intersection(&imp.premise);
            if shrunk != imp.premise && !member.is_member(&shrunk) {
                refined = Some((idx, shrunk));
                break;
            }
        }
        match refined {
            Some((idx, shrunk)) => {
                let imp = &mut hypothesis.items_mut()[idx];
                let dropped = imp.premise.difference(&c);
                imp.conclusion.union_with(&dropped);
                imp.premise = shrunk;
            }
            None => hypothesis.items_mut().push(Implication {
                premise: c,
                conclusion: full.clone(),
            }),
        }
    }
}

fn protocol(c: &AttributeSet, message: &str) -> Error {
    Error::Protocol {
        counterexample: c.to_string(),
        message: message.to_string(),
    }
}

/// HORN1 driven by the sampling equivalence oracle.
pub fn pac_basis(
    universe_len: usize,
    member: &mut dyn MembershipOracle,
    params: &PacParams,
) -> Result<(ImplicationList, RunStats)> {
    let mut equiv = SamplingEquivalenceOracle::new(params, universe_len)?;
    let before = member.queries();
    let basis = horn1(universe_len, member, &mut equiv)?;
    let stats = RunStats {
        seed: params.seed,
        epsilon: params.epsilon,
        delta: params.delta,
        i_final: equiv.calls(),
        membership_queries: member.queries() - before,
        samples_drawn: equiv.samples_drawn(),
        basis_size: basis.len(),
    };
    Ok((basis, stats))
}

//! Membership and equivalence oracles.

use crate::attrs::AttributeSet;
use crate::context::FormalContext;
use crate::error::{check_cap, Result, DEFAULT_ENUMERATION_CAP};
use crate::implication::ImplicationList;

use super::sampler::SubsetSampler;
use super::{sample_count, PacParams};

/// Answers whether a set is a model of the hidden theory.
pub trait MembershipOracle {
    /// Must be deterministic in `x`. Implementations count every call.
    fn is_member(&mut self, x: &AttributeSet) -> bool;

    fn queries(&self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterexampleKind {
    /// A model of the target that the hypothesis rejects.
    Positive,
    /// A model of the hypothesis that the target rejects.
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub set: AttributeSet,
    pub kind: CounterexampleKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    Counterexample(Counterexample),
}

/// Answers whether a hypothesis is equivalent to the hidden theory.
///
/// The learner's membership oracle is passed along so that oracles which
/// classify candidate sets can share its query counter.
pub trait EquivalenceOracle {
    fn check(&mut self, hypothesis: &ImplicationList, member: &mut dyn MembershipOracle) -> Verdict;

    fn calls(&self) -> u64;
}

/// Membership in `Int(K)`: `X` is a member iff `X = X''`.
pub struct ContextMembershipOracle<'a> {
    ctx: &'a FormalContext,
    queries: u64,
    // 0 = unknown, 1 = intent, 2 = not an intent; indexed by the packed bits.
    memo: Option<Vec<u8>>,
}

/// Universes up to this size get a memo table of `2^n` bytes.
const MEMO_LIMIT: usize = 20;

impl<'a> ContextMembershipOracle<'a> {
    pub fn new(ctx: &'a FormalContext) -> Self {
        let n = ctx.attribute_count();
        Self {
            ctx,
            queries: 0,
            memo: (n <= MEMO_LIMIT).then(|| vec![0u8; 1 << n]),
        }
    }
}

pub fn context_membership_oracle(ctx: &FormalContext) -> ContextMembershipOracle<'_> {
    ContextMembershipOracle::new(ctx)
}

impl MembershipOracle for ContextMembershipOracle<'_> {
    fn is_member(&mut self, x: &AttributeSet) -> bool {
        self.queries += 1;
        match &mut self.memo {
            Some(memo) => {
                let slot = &mut memo[x.words().first().copied().unwrap_or(0) as usize];
                if *slot == 0 {
                    *slot = if self.ctx.is_intent_unchecked(x) { 1 } else { 2 };
                }
                *slot == 1
            }
            None => self.ctx.is_intent_unchecked(x),
        }
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Membership in `Mod(L)` for an explicit implication list.
pub struct TheoryMembershipOracle<'a> {
    theory: &'a ImplicationList,
    queries: u64,
}

impl<'a> TheoryMembershipOracle<'a> {
    pub fn new(theory: &'a ImplicationList) -> Self {
        Self { theory, queries: 0 }
    }
}

impl MembershipOracle for TheoryMembershipOracle<'_> {
    fn is_member(&mut self, x: &AttributeSet) -> bool {
        self.queries += 1;
        self.theory.is_model_unchecked(x)
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Exact equivalence by exhaustive comparison against a tabulated target.
///
/// Counterexamples are the lectically smallest element of the symmetric
/// difference between `Mod(H)` and the target's models.
pub struct ExactEquivalenceOracle {
    universe_len: usize,
    // Target membership indexed by lectic rank.
    target: Vec<bool>,
    calls: u64,
}

impl ExactEquivalenceOracle {
    pub fn for_context(ctx: &FormalContext) -> Result<Self> {
        let n = ctx.attribute_count();
        check_cap("exact equivalence oracle", n, DEFAULT_ENUMERATION_CAP)?;
        let mut target = vec![false; 1 << n];
        for intent in ctx.enumerate_intents()? {
            target[intent.lectic_rank() as usize] = true;
        }
        Ok(Self {
            universe_len: n,
            target,
            calls: 0,
        })
    }

    pub fn for_theory(theory: &ImplicationList) -> Result<Self> {
        let n = theory.universe_len();
        check_cap("exact equivalence oracle", n, DEFAULT_ENUMERATION_CAP)?;
        let target = (0..1u64 << n)
            .map(|k| theory.is_model_unchecked(&AttributeSet::from_lectic_rank(n, k)))
            .collect();
        Ok(Self {
            universe_len: n,
            target,
            calls: 0,
        })
    }
}

pub fn exact_equivalence_oracle(ctx: &FormalContext) -> Result<ExactEquivalenceOracle> {
    ExactEquivalenceOracle::for_context(ctx)
}

impl EquivalenceOracle for ExactEquivalenceOracle {
    fn check(&mut self, hypothesis: &ImplicationList, _member: &mut dyn MembershipOracle) -> Verdict {
        self.calls += 1;
        let n = self.universe_len;
        for (rank, &in_target) in self.target.iter().enumerate() {
            let x = AttributeSet::from_lectic_rank(n, rank as u64);
            let in_h = hypothesis.is_model_unchecked(&x);
            if in_h != in_target {
                let kind = if in_target {
                    CounterexampleKind::Positive
                } else {
                    CounterexampleKind::Negative
                };
                return Verdict::Counterexample(Counterexample { set: x, kind });
            }
        }
        Verdict::Equivalent
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Simulates equivalence queries by sampling: the `i`-th call draws up to
/// `ℓ_i` subsets and returns the first one on which hypothesis and target
/// disagree.
pub struct SamplingEquivalenceOracle {
    epsilon: f64,
    delta: f64,
    sampler: SubsetSampler,
    calls: u64,
    samples_drawn: u64,
}

impl SamplingEquivalenceOracle {
    pub fn new(params: &PacParams, universe_len: usize) -> Result<Self> {
        params.validate()?;
        let sampler = SubsetSampler::new(params.sampler.clone(), universe_len, params.seed)?;
        Ok(Self {
            epsilon: params.epsilon,
            delta: params.delta,
            sampler,
            calls: 0,
            samples_drawn: 0,
        })
    }

    pub fn samples_drawn(&self) -> u64 {
        self.samples_drawn
    }
}

pub fn make_sampling_equivalence_oracle(
    params: &PacParams,
    universe_len: usize,
) -> Result<SamplingEquivalenceOracle> {
    SamplingEquivalenceOracle::new(params, universe_len)
}

impl EquivalenceOracle for SamplingEquivalenceOracle {
    fn check(&mut self, hypothesis: &ImplicationList, member: &mut dyn MembershipOracle) -> Verdict {
        self.calls += 1;
        let budget = sample_count(self.epsilon, self.delta, self.calls).expect("parameters validated at construction");
        for _ in 0..budget {
            let x = self.sampler.draw();
            self.samples_drawn += 1;
            // One membership query per draw; the answer decides the kind.
            let in_target = member.is_member(&x);
            if in_target != hypothesis.is_model_unchecked(&x) {
                let kind = if in_target {
                    CounterexampleKind::Positive
                } else {
                    CounterexampleKind::Negative
                };
                return Verdict::Counterexample(Counterexample { set: x, kind });
            }
        }
        Verdict::Equivalent
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::star_alliance;
    use crate::implication::{canonical_basis, parse_implications, Implication};

    #[test]
    fn context_membership_examples() {
        let sa = star_alliance();
        let u = sa.universe();
        let mut m = context_membership_oracle(&sa);
        let lh = sa.row(sa.object_index("Lufthansa").unwrap()).clone();
        assert!(m.is_member(&lh));
        let lh_refuted = u
            .set_of(["Africa", "Latin America", "Asia Pacific", "Mexico", "Europe", "United States", "Canada"])
            .unwrap();
        assert!(!m.is_member(&lh_refuted));
        assert!(m.is_member(&u.full_set()));
        // Memoized answers still count.
        assert!(m.is_member(&lh));
        assert_eq!(m.queries(), 4);
    }

    #[test]
    fn memoized_and_direct_answers_agree() {
        let sa = star_alliance();
        let mut m = context_membership_oracle(&sa);
        for k in 0..512 {
            let x = AttributeSet::from_lectic_rank(9, k);
            assert_eq!(m.is_member(&x), sa.is_intent(&x).unwrap());
        }
    }

    #[test]
    fn exact_oracle_examples() {
        let sa = star_alliance();
        let mut eq = exact_equivalence_oracle(&sa).unwrap();
        let mut m = context_membership_oracle(&sa);
        let can = canonical_basis(&sa).unwrap();
        assert_eq!(eq.check(&can, &mut m), Verdict::Equivalent);

        // Same models, different syntax.
        let mut shuffled = can.as_slice().to_vec();
        shuffled.reverse();
        shuffled.push(can.as_slice()[0].clone());
        let shuffled = ImplicationList::from_vec(9, shuffled).unwrap();
        assert_eq!(eq.check(&shuffled, &mut m), Verdict::Equivalent);
        assert_eq!(eq.calls(), 2);

        let one = FormalContext::from_cross_table(&["a", "b", "c"], &[("g1", "XX.")]).unwrap();
        let mut eq = exact_equivalence_oracle(&one).unwrap();
        let mut m = context_membership_oracle(&one);
        assert_eq!(
            eq.check(&ImplicationList::new(3), &mut m),
            Verdict::Counterexample(Counterexample {
                set: AttributeSet::empty(3),
                kind: CounterexampleKind::Negative
            })
        );
    }

    fn params(seed: u64) -> PacParams {
        PacParams::new(0.5, 0.5, seed).unwrap()
    }

    #[test]
    fn sampling_oracle_accepts_equivalent_hypothesis() {
        let sa = star_alliance();
        let can = canonical_basis(&sa).unwrap();
        for seed in 0..20 {
            let mut eq = make_sampling_equivalence_oracle(&params(seed), 9).unwrap();
            let mut m = context_membership_oracle(&sa);
            for _ in 0..5 {
                assert_eq!(eq.check(&can, &mut m), Verdict::Equivalent);
            }
            assert_eq!(m.queries(), eq.samples_drawn());
        }
    }

    #[test]
    fn sampling_oracle_counterexamples_are_sound() {
        // L = [∅ -> M], H = []: every proper subset is a negative counterexample.
        let u = crate::attrs::AttributeUniverse::new(["a", "b", "c", "d"]).unwrap();
        let target = ImplicationList::from_vec(4, vec![Implication::new(u.empty_set(), u.full_set()).unwrap()]).unwrap();
        let h = ImplicationList::new(4);
        for seed in 0..50 {
            let mut eq = make_sampling_equivalence_oracle(&params(seed), 4).unwrap();
            let mut m = TheoryMembershipOracle::new(&target);
            if let Verdict::Counterexample(c) = eq.check(&h, &mut m) {
                assert_ne!(c.set, u.full_set());
                assert_eq!(c.kind, CounterexampleKind::Negative);
            }
        }

        // Mixed hypothesis on the bundled context: each counterexample lies in
        // exactly one side of the symmetric difference, as its kind says.
        let sa = star_alliance();
        let h = parse_implications("Caribbean -> ⊥\nMiddle East -> ⊥\n", sa.universe()).unwrap();
        let mut eq = make_sampling_equivalence_oracle(&params(3), 9).unwrap();
        let mut m = context_membership_oracle(&sa);
        for _ in 0..30 {
            if let Verdict::Counterexample(c) = eq.check(&h, &mut m) {
                let in_h = crate::implication::closure(&h, &c.set).unwrap() == c.set;
                let member = sa.is_intent(&c.set).unwrap();
                assert!(member != in_h);
                let expected = if member { CounterexampleKind::Positive } else { CounterexampleKind::Negative };
                assert_eq!(c.kind, expected);
            }
        }
    }

    #[test]
    fn sampling_oracle_is_deterministic() {
        let sa = star_alliance();
        let h = ImplicationList::new(9);
        let run = || {
            let mut eq = make_sampling_equivalence_oracle(&PacParams::new(0.1, 0.1, 42).unwrap(), 9).unwrap();
            let mut m = context_membership_oracle(&sa);
            (0..10).map(|_| eq.check(&h, &mut m)).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn sampling_oracle_draws_the_scheduled_number_of_samples() {
        // Against an equivalent hypothesis no draw stops early.
        let sa = star_alliance();
        let can = canonical_basis(&sa).unwrap();
        let mut eq = make_sampling_equivalence_oracle(&PacParams::new(0.1, 0.1, 1).unwrap(), 9).unwrap();
        let mut m = context_membership_oracle(&sa);
        eq.check(&can, &mut m);
        assert_eq!(eq.samples_drawn(), 44);
        eq.check(&can, &mut m);
        assert_eq!(eq.samples_drawn(), 44 + 54);
    }
}

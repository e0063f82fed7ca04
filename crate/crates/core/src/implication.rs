//! Implications over an attribute universe: models, closure, entailment and
//! the canonical (Duquenne–Guigues) basis.

use std::fmt;

use crate::attrs::{check_universe, AttributeSet, AttributeUniverse};
use crate::context::{next_closure, FormalContext};
use crate::error::{check_cap, Error, Result, DEFAULT_ENUMERATION_CAP};

/// `premise -> conclusion`, stored exactly as given.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Implication {
    pub premise: AttributeSet,
    pub conclusion: AttributeSet,
}

impl Implication {
    pub fn new(premise: AttributeSet, conclusion: AttributeSet) -> Result<Self> {
        check_universe(&conclusion, premise.universe_len(), "conclusion")?;
        Ok(Self { premise, conclusion })
    }

    pub fn universe_len(&self) -> usize {
        self.premise.universe_len()
    }

    /// `a` respects the implication: premise not contained or conclusion contained.
    pub fn is_respected_by(&self, a: &AttributeSet) -> bool {
        !self.premise.is_subset(a) || self.conclusion.is_subset(a)
    }

    pub fn display<'a>(&'a self, universe: &'a AttributeUniverse) -> DisplayImplication<'a> {
        DisplayImplication { imp: self, universe }
    }
}

/// Renders `a, b -> c`, dropping premise attributes from the conclusion and
/// printing a conclusion equal to `M` as `⊥`.
pub struct DisplayImplication<'a> {
    imp: &'a Implication,
    universe: &'a AttributeUniverse,
}

impl fmt::Display for DisplayImplication<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Implication { premise, conclusion } = self.imp;
        if premise.is_empty() {
            write!(f, "{{}}")?;
        } else {
            write!(f, "{}", self.universe.format_set(premise))?;
        }
        write!(f, " -> ")?;
        let rest = conclusion.difference(premise);
        if conclusion.is_full() && !rest.is_empty() {
            write!(f, "⊥")
        } else if rest.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", self.universe.format_set(&rest))
        }
    }
}

/// An ordered list of implications over one universe. Order matters to the
/// learner and duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationList {
    universe_len: usize,
    items: Vec<Implication>,
}

impl ImplicationList {
    pub fn new(universe_len: usize) -> Self {
        Self {
            universe_len,
            items: Vec::new(),
        }
    }

    pub fn from_vec(universe_len: usize, items: Vec<Implication>) -> Result<Self> {
        let mut list = Self::new(universe_len);
        for imp in items {
            list.push(imp)?;
        }
        Ok(list)
    }

    pub fn push(&mut self, imp: Implication) -> Result<()> {
        check_universe(&imp.premise, self.universe_len, "implication")?;
        self.items.push(imp);
        Ok(())
    }

    pub fn universe_len(&self) -> usize {
        self.universe_len
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Implication> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Implication] {
        &self.items
    }

    pub(crate) fn items_mut(&mut self) -> &mut Vec<Implication> {
        &mut self.items
    }

    /// `x` respects every implication; equivalent to `closure(x) == x`.
    pub fn is_model_unchecked(&self, x: &AttributeSet) -> bool {
        self.items.iter().all(|imp| imp.is_respected_by(x))
    }

    /// Least superset of `x` closed under the list, by repeated passes.
    pub fn close_unchecked(&self, x: &AttributeSet) -> AttributeSet {
        let mut acc = x.clone();
        let mut fired = vec![false; self.items.len()];
        loop {
            let mut changed = false;
            for (imp, done) in self.items.iter().zip(fired.iter_mut()) {
                if !*done && imp.premise.is_subset(&acc) {
                    *done = true;
                    if !imp.conclusion.is_subset(&acc) {
                        acc.union_with(&imp.conclusion);
                        changed = true;
                    }
                }
            }
            if !changed {
                return acc;
            }
        }
    }

    fn check(&self, x: &AttributeSet) -> Result<()> {
        check_universe(x, self.universe_len, "attribute set")
    }

    pub fn display<'a>(&'a self, universe: &'a AttributeUniverse) -> DisplayList<'a> {
        DisplayList { list: self, universe }
    }

    /// The set of `(premise, closure of premise ∪ conclusion under the list)`
    /// pairs, sorted. Two lists with equal normal forms agree syntactically up
    /// to order and redundant conclusion attributes.
    pub fn normal_form(&self) -> Vec<(AttributeSet, AttributeSet)> {
        let mut pairs: Vec<_> = self
            .items
            .iter()
            .map(|imp| {
                let closed = self.close_unchecked(&imp.premise.union(&imp.conclusion));
                (imp.premise.clone(), closed)
            })
            .collect();
        pairs.sort();
        pairs.dedup();
        pairs
    }
}

impl<'a> IntoIterator for &'a ImplicationList {
    type Item = &'a Implication;
    type IntoIter = std::slice::Iter<'a, Implication>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

pub struct DisplayList<'a> {
    list: &'a ImplicationList,
    universe: &'a AttributeUniverse,
}

impl fmt::Display for DisplayList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for imp in self.list {
            writeln!(f, "{}", imp.display(self.universe))?;
        }
        Ok(())
    }
}

pub fn is_model(a: &AttributeSet, imp: &Implication) -> Result<bool> {
    check_universe(a, imp.universe_len(), "attribute set")?;
    Ok(imp.is_respected_by(a))
}

pub fn closure(list: &ImplicationList, x: &AttributeSet) -> Result<AttributeSet> {
    list.check(x)?;
    Ok(list.close_unchecked(x))
}

pub fn entails(list: &ImplicationList, imp: &Implication) -> Result<bool> {
    list.check(&imp.premise)?;
    Ok(imp.conclusion.is_subset(&list.close_unchecked(&imp.premise)))
}

/// `Mod(L)` in lectic order.
pub fn enumerate_models(list: &ImplicationList) -> Result<Vec<AttributeSet>> {
    enumerate_models_with_cap(list, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_models_with_cap(list: &ImplicationList, cap: usize) -> Result<Vec<AttributeSet>> {
    check_cap("model enumeration", list.universe_len(), cap)?;
    Ok(crate::context::all_closures(list.universe_len(), |x| list.close_unchecked(x)))
}

/// Whether the implication holds in every object row, i.e. `Y ⊆ X''`.
pub fn is_valid_in(ctx: &FormalContext, imp: &Implication) -> Result<bool> {
    check_universe(&imp.premise, ctx.attribute_count(), "implication")?;
    Ok(imp.conclusion.is_subset(&ctx.close_unchecked(&imp.premise)))
}

/// `{P -> P'' : P pseudo-intent}` with premises in lectic order.
pub fn canonical_basis(ctx: &FormalContext) -> Result<ImplicationList> {
    canonical_basis_with_cap(ctx, DEFAULT_ENUMERATION_CAP)
}

pub fn canonical_basis_with_cap(ctx: &FormalContext, cap: usize) -> Result<ImplicationList> {
    check_cap("canonical basis", ctx.attribute_count(), cap)?;
    let n = ctx.attribute_count();
    let mut basis = ImplicationList::new(n);

    // Walk the closed sets of X ↦ X ∪ ⋃{P'' : P ⊊ X} (fixpoint) in lectic
    // order; each one that is not an intent is the next pseudo-intent.
    let mut current = pseudo_close(&basis, &AttributeSet::empty(n));
    loop {
        let closed = ctx.close_unchecked(&current);
        if closed != current {
            basis.items.push(Implication {
                premise: current.clone(),
                conclusion: closed,
            });
        }
        match next_closure(&current, |x| pseudo_close(&basis, x)) {
            Some(next) => current = next,
            None => break,
        }
    }
    Ok(basis)
}

fn pseudo_close(basis: &ImplicationList, x: &AttributeSet) -> AttributeSet {
    let mut acc = x.clone();
    loop {
        let mut changed = false;
        for imp in basis {
            if imp.premise.is_proper_subset(&acc) && !imp.conclusion.is_subset(&acc) {
                acc.union_with(&imp.conclusion);
                changed = true;
            }
        }
        if !changed {
            return acc;
        }
    }
}

/// Model equality of two lists.
pub fn equivalent(l1: &ImplicationList, l2: &ImplicationList) -> Result<bool> {
    if l1.universe_len() != l2.universe_len() {
        return Err(Error::invalid(format!(
            "lists over {} and {} attributes",
            l1.universe_len(),
            l2.universe_len()
        )));
    }
    check_cap("equivalence check", l1.universe_len(), DEFAULT_ENUMERATION_CAP)?;
    // Each list's implications must hold in the other's closure system.
    let sound = |a: &ImplicationList, b: &ImplicationList| {
        a.iter()
            .all(|imp| imp.conclusion.is_subset(&b.close_unchecked(&imp.premise)))
    };
    Ok(sound(l1, l2) && sound(l2, l1))
}

/// Parses one implication per line: `a, b -> c`. `{}` denotes the empty
/// set, `⊥` a conclusion of all attributes; blank lines and `#` comments are
/// skipped.
pub fn parse_implications(text: &str, universe: &AttributeUniverse) -> Result<ImplicationList> {
    let mut list = ImplicationList::new(universe.len());
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| Error::parse(line_no, "missing \"->\""))?;
        let premise = parse_side(lhs, universe).map_err(|m| Error::parse(line_no, m))?;
        let conclusion = if rhs.trim() == "⊥" {
            universe.full_set()
        } else {
            parse_side(rhs, universe).map_err(|m| Error::parse(line_no, m))?
        };
        list.items.push(Implication { premise, conclusion });
    }
    Ok(list)
}

fn parse_side(side: &str, universe: &AttributeUniverse) -> Result<AttributeSet, String> {
    let side = side.trim();
    let mut set = universe.empty_set();
    if side.is_empty() || side == "{}" {
        return Ok(set);
    }
    for label in side.split(',') {
        let label = label.trim();
        let i = universe
            .position(label)
            .ok_or_else(|| format!("unknown attribute {label:?}"))?;
        set.insert(i);
    }
    Ok(set)
}

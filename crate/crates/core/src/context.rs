//! Formal contexts, derivation operators and intent enumeration.

use std::collections::HashSet;
use std::sync::Arc;

use crate::attrs::{check_universe, AttributeSet, AttributeUniverse};
use crate::error::{check_cap, Error, Result, DEFAULT_ENUMERATION_CAP};

/// A formal context `(G, M, I)`: labelled object rows over one attribute universe.
///
/// Immutable once built. Duplicate rows are kept as given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    universe: Arc<AttributeUniverse>,
    objects: Vec<String>,
    rows: Vec<AttributeSet>,
}

impl FormalContext {
    pub fn new(universe: AttributeUniverse, objects: Vec<(String, AttributeSet)>) -> Result<Self> {
        Self::with_shared_universe(Arc::new(universe), objects)
    }

    pub fn with_shared_universe(
        universe: Arc<AttributeUniverse>,
        objects: Vec<(String, AttributeSet)>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(objects.len());
        let mut names = Vec::with_capacity(objects.len());
        let mut rows = Vec::with_capacity(objects.len());
        for (name, row) in objects {
            if name.is_empty() {
                return Err(Error::invalid("object label is empty"));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::invalid(format!("duplicate object label {name:?}")));
            }
            check_universe(&row, universe.len(), &format!("row of object {name:?}"))?;
            names.push(name);
            rows.push(row);
        }
        Ok(Self {
            universe,
            objects: names,
            rows,
        })
    }

    /// Builds a context from a cross table, one string of `X`/`.` per object.
    ///
    /// ```
    /// use fca_pac::FormalContext;
    /// let ctx = FormalContext::from_cross_table(&["a", "b", "c"], &[("g1", "XX.")]).unwrap();
    /// assert_eq!(ctx.object_count(), 1);
    /// ```
    pub fn from_cross_table(attributes: &[&str], rows: &[(&str, &str)]) -> Result<Self> {
        let universe = AttributeUniverse::new(attributes.iter().copied())?;
        let n = universe.len();
        let mut objects = Vec::with_capacity(rows.len());
        for (name, crosses) in rows {
            let cells: Vec<char> = crosses.chars().collect();
            if cells.len() != n {
                return Err(Error::invalid(format!(
                    "row of {name:?} has {} cells, expected {n}",
                    cells.len()
                )));
            }
            let mut row = AttributeSet::empty(n);
            for (i, c) in cells.into_iter().enumerate() {
                match c {
                    'X' | 'x' => row.insert(i),
                    '.' => {}
                    other => return Err(Error::invalid(format!("unexpected cell {other:?}"))),
                }
            }
            objects.push((name.to_string(), row));
        }
        Self::new(universe, objects)
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn shared_universe(&self) -> &Arc<AttributeUniverse> {
        &self.universe
    }

    pub fn attribute_count(&self) -> usize {
        self.universe.len()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// `{g}'` for the object at `index`.
    pub fn row(&self, index: usize) -> &AttributeSet {
        &self.rows[index]
    }

    pub fn rows(&self) -> &[AttributeSet] {
        &self.rows
    }

    /// Number of crosses in the incidence relation.
    pub fn incidence_count(&self) -> usize {
        self.rows.iter().map(AttributeSet::count).sum()
    }

    fn check(&self, b: &AttributeSet) -> Result<()> {
        check_universe(b, self.attribute_count(), "attribute set")
    }

    /// `B'`: indices of the objects whose rows contain `b`.
    pub fn derive_objects(&self, b: &AttributeSet) -> Result<Vec<usize>> {
        self.check(b)?;
        Ok(self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| b.is_subset(row))
            .map(|(i, _)| i)
            .collect())
    }

    /// `B''`: the intersection of all rows containing `b`, or `M` if none does.
    pub fn close_attributes(&self, b: &AttributeSet) -> Result<AttributeSet> {
        self.check(b)?;
        Ok(self.close_unchecked(b))
    }

    pub(crate) fn close_unchecked(&self, b: &AttributeSet) -> AttributeSet {
        let mut acc = AttributeSet::full(self.attribute_count());
        for row in &self.rows {
            if b.is_subset(row) {
                acc.intersect_with(row);
            }
        }
        acc
    }

    /// Whether `b = b''`, i.e. whether `b` is a model of the theory of the context.
    pub fn is_intent(&self, b: &AttributeSet) -> Result<bool> {
        self.check(b)?;
        Ok(self.is_intent_unchecked(b))
    }

    pub(crate) fn is_intent_unchecked(&self, b: &AttributeSet) -> bool {
        // b'' = b iff every attribute outside b is missed by some row containing b.
        let mut acc = AttributeSet::full(self.attribute_count());
        for row in &self.rows {
            if b.is_subset(row) {
                acc.intersect_with(row);
                if acc == *b {
                    return true;
                }
            }
        }
        acc == *b
    }

    /// All intents in lectic order, using the default enumeration cap.
    pub fn enumerate_intents(&self) -> Result<Vec<AttributeSet>> {
        self.enumerate_intents_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_intents_with_cap(&self, cap: usize) -> Result<Vec<AttributeSet>> {
        check_cap("intent enumeration", self.attribute_count(), cap)?;
        Ok(all_closures(self.attribute_count(), |x| self.close_unchecked(x)))
    }
}

/// The lectically next closed set after `current`, or `None` if `current` is `M`.
///
/// `close` must be a closure operator on the power set of a universe of
/// `current.universe_len()` attributes; `current` must be closed under it.
pub fn next_closure<F>(current: &AttributeSet, mut close: F) -> Option<AttributeSet>
where
    F: FnMut(&AttributeSet) -> AttributeSet,
{
    let n = current.universe_len();
    let mut a = current.clone();
    for i in (0..n).rev() {
        if a.contains(i) {
            a.remove(i);
        } else {
            let mut seed = a.clone();
            seed.insert(i);
            let b = close(&seed);
            // `a` holds only positions below i at this point.
            if b.agrees_below(&a, i) {
                return Some(b);
            }
        }
    }
    None
}

/// Every closed set of `close`, in lectic order.
pub fn all_closures<F>(universe_len: usize, mut close: F) -> Vec<AttributeSet>
where
    F: FnMut(&AttributeSet) -> AttributeSet,
{
    let mut out = Vec::new();
    let mut current = close(&AttributeSet::empty(universe_len));
    loop {
        let next = next_closure(&current, &mut close);
        out.push(current);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    out
}

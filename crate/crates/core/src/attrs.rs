//! Attribute universes and bit-packed attribute sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// The ordered attribute set `M` of a context.
///
/// Label order is fixed at construction and defines bit positions as well as
/// the lectic order used by every enumeration in this crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl AttributeUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invalid(format!("attribute {} has an empty label", i + 1)));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate attribute label {name:?}")));
            }
        }
        Ok(Self { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Builds a set from labels; unknown labels are an error.
    pub fn set_of<I, S>(&self, labels: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = AttributeSet::empty(self.len());
        for label in labels {
            let label = label.as_ref();
            let i = self
                .position(label)
                .ok_or_else(|| Error::invalid(format!("unknown attribute {label:?}")))?;
            set.insert(i);
        }
        Ok(set)
    }

    pub fn empty_set(&self) -> AttributeSet {
        AttributeSet::empty(self.len())
    }

    pub fn full_set(&self) -> AttributeSet {
        AttributeSet::full(self.len())
    }

    /// Comma-separated labels in universe order.
    pub fn format_set(&self, set: &AttributeSet) -> String {
        set.iter().map(|i| self.name(i)).collect::<Vec<_>>().join(", ")
    }
}

/// A subset of an attribute universe of fixed size.
///
/// Position `i` corresponds to the `i`-th attribute of the universe. Bits at
/// positions `>= universe_len` are always clear. Set operations between sets
/// over universes of different size are a logic error; the checked entry
/// points elsewhere in the crate reject them before reaching this type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AttributeSet {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

impl AttributeSet {
    pub fn empty(universe_len: usize) -> Self {
        Self {
            len: universe_len,
            words: SmallVec::from_elem(0, universe_len.div_ceil(WORD)),
        }
    }

    pub fn full(universe_len: usize) -> Self {
        let mut s = Self::empty(universe_len);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.clear_tail();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe_len: usize, indices: I) -> Self {
        let mut s = Self::empty(universe_len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// The set whose lectic rank among all subsets of the universe is `rank`.
    ///
    /// Attribute 0 is the most significant position, so ranks `0..2^n` walk
    /// the power set in lectic order.
    pub fn from_lectic_rank(universe_len: usize, rank: u64) -> Self {
        debug_assert!(universe_len <= 64);
        let mut s = Self::empty(universe_len);
        for j in 0..universe_len {
            if (rank >> (universe_len - 1 - j)) & 1 == 1 {
                s.insert(j);
            }
        }
        s
    }

    /// Inverse of [`AttributeSet::from_lectic_rank`].
    pub fn lectic_rank(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.iter()
            .fold(0u64, |acc, j| acc | 1u64 << (self.len - 1 - j))
    }

    /// Builds a set directly from packed words; stray high bits are masked off.
    pub fn from_words(universe_len: usize, words: &[u64]) -> Self {
        let mut s = Self::empty(universe_len);
        for (dst, src) in s.words.iter_mut().zip(words) {
            *dst = *src;
        }
        s.clear_tail();
        s
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "attribute {i} outside universe of size {}", self.len);
        self.words[i / WORD] |= 1u64 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1u64 << (i % WORD));
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len, other.len);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        s
    }

    /// Complement within the universe.
    pub fn complement(&self) -> Self {
        Self::full(self.len).difference(self)
    }

    /// Indices of members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    /// Members with index strictly below `i`.
    pub fn prefix(&self, i: usize) -> Self {
        let mut s = self.clone();
        for j in i..self.len {
            s.remove(j);
        }
        s
    }

    /// Whether `self` and `other` agree on every position below `i`.
    pub fn agrees_below(&self, other: &Self, i: usize) -> bool {
        let full_words = i / WORD;
        if self.words[..full_words] != other.words[..full_words] {
            return false;
        }
        let rem = i % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full_words] ^ other.words[full_words]) & mask == 0
    }
}

/// Lectic order: the set containing the first (lowest-index) differing
/// attribute is the larger one.
impl Ord for AttributeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let t = diff.trailing_zeros();
                return if (a >> t) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for AttributeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Rejects a set whose universe size differs from `expected`.
pub(crate) fn check_universe(set: &AttributeSet, expected: usize, what: &str) -> Result<()> {
    if set.universe_len() == expected {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} is over {} attributes, expected {expected}",
            set.universe_len()
        )))
    }
}

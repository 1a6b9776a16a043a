//! Exact mixed partials of `F = ln det A` when every directional derivative
//! of `A` is a constant matrix.
//!
//! With `B = A^-1` and constant `D_a = dA/da`,
//!
//! ```text
//! dF/da        = tr(B D_a)
//! d(B)/db      = -B D_b B
//! ```
//!
//! so every higher derivative is an integer combination of traces
//! `tr(B D_{a1} B D_{a2} ... B D_{ak})`. A term is stored as its cyclic word
//! `a1 a2 ... ak`; words equal up to rotation are merged.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub const MAX_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Z,
    ZBar,
    T,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Z, Direction::ZBar, Direction::T];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Z => "z",
            Direction::ZBar => "zbar",
            Direction::T => "t",
        })
    }
}

/// An ordered list of differentiation directions, order 1 through 5.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivativeIndex(Vec<Direction>);

impl DerivativeIndex {
    pub fn new(dirs: impl Into<Vec<Direction>>) -> Result<Self> {
        let dirs = dirs.into();
        if dirs.is_empty() || dirs.len() > MAX_ORDER {
            return Err(Error::InvalidIndex(dirs.len()));
        }
        Ok(Self(dirs))
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.0
    }

    /// Sorted copy; the derivative only depends on the multiset.
    pub fn multiset(&self) -> Vec<Direction> {
        let mut v = self.0.clone();
        v.sort();
        v
    }
}

/// `coefficient * tr(B D_{w0} B D_{w1} ...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTerm {
    pub coefficient: i64,
    pub word: Vec<Direction>,
}

fn canonical_rotation(word: &[Direction]) -> Vec<Direction> {
    (0..word.len())
        .map(|r| {
            let mut w = word[r..].to_vec();
            w.extend_from_slice(&word[..r]);
            w
        })
        .min()
        .unwrap_or_default()
}

/// Expands the derivative for an ordered list of directions.
pub fn expand_terms(dirs: &[Direction]) -> Vec<TraceTerm> {
    let Some((&first, rest)) = dirs.split_first() else {
        return Vec::new();
    };
    let mut terms: HashMap<Vec<Direction>, i64> = HashMap::from([(vec![first], 1)]);
    for &b in rest {
        let mut next: HashMap<Vec<Direction>, i64> = HashMap::new();
        for (word, coef) in &terms {
            // each B in the cyclic word is hit once by d/db
            for pos in 0..word.len() {
                let mut w = word[..pos].to_vec();
                w.push(b);
                w.extend_from_slice(&word[pos..]);
                *next.entry(canonical_rotation(&w)).or_insert(0) -= coef;
            }
        }
        next.retain(|_, c| *c != 0);
        terms = next;
    }
    let mut out: Vec<TraceTerm> = terms
        .into_iter()
        .map(|(word, coefficient)| TraceTerm { coefficient, word })
        .collect();
    out.sort_by(|a, b| a.word.cmp(&b.word));
    out
}

type TermCache = Mutex<HashMap<Vec<Direction>, Arc<[TraceTerm]>>>;

fn cache() -> &'static TermCache {
    static CACHE: OnceLock<TermCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached term list for an index, keyed by its multiset.
pub fn terms_for(idx: &DerivativeIndex) -> Arc<[TraceTerm]> {
    let key = idx.multiset();
    let mut guard = cache().lock().expect("term cache poisoned");
    guard
        .entry(key.clone())
        .or_insert_with(|| expand_terms(&key).into())
        .clone()
}

/// The matrices `B D_a` for one point, ready for trace evaluation.
#[derive(Debug, Clone)]
pub struct TraceContext {
    scaled: [CMatrix; 3],
}

impl TraceContext {
    /// `inverse` is `A^-1`; `directions[a]` is the diagonal of `D_a`
    /// in the order z, zbar, t.
    pub fn new(inverse: &CMatrix, directions: [&[C64]; 3]) -> Self {
        Self {
            scaled: directions.map(|d| inverse.scale_columns(d)),
        }
    }

    fn scaled(&self, d: Direction) -> &CMatrix {
        &self.scaled[d.slot()]
    }

    pub fn trace_word(&self, word: &[Direction]) -> C64 {
        match word {
            [] => C64::new(0.0, 0.0),
            [a] => self.scaled(*a).trace(),
            [head @ .., last] => {
                let mut prod = self.scaled(head[0]).clone();
                for d in &head[1..] {
                    prod = &prod * self.scaled(*d);
                }
                prod.trace_of_product(self.scaled(*last))
            }
        }
    }

    pub fn derivative(&self, idx: &DerivativeIndex) -> C64 {
        terms_for(idx)
            .iter()
            .map(|t| self.trace_word(&t.word) * t.coefficient as f64)
            .sum()
    }
}

//! Exact sparse row echelon form over the rationals.
//!
//! Rows are sparse vectors keyed by any ordered index type. Each stored row
//! is tagged with its expression in terms of the inserted originals, so a
//! solved target comes back as a combination of the inserted vectors.

use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{One, Zero};

use crate::poly::Scalar;

pub type SparseVec<K> = BTreeMap<K, Scalar>;

#[derive(Clone, Debug)]
struct Row<K> {
    vec: SparseVec<K>,
    combo: BTreeMap<usize, Scalar>,
}

#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    /// keyed by pivot, which is the largest key of the row
    rows: BTreeMap<K, Row<K>>,
    inserted: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: BTreeMap::new(),
            inserted: 0,
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut vec: SparseVec<K>, mut combo: BTreeMap<usize, Scalar>) -> Row<K> {
        let mut upper: Option<K> = None;
        loop {
            let range = match &upper {
                Some(u) => vec.range((Bound::Unbounded, Bound::Excluded(u.clone()))),
                None => vec.range(..),
            };
            let hit = range
                .rev()
                .find(|(k, _)| self.rows.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            let Some((key, c)) = hit else {
                return Row { vec, combo };
            };
            let row = &self.rows[&key];
            for (k, v) in &row.vec {
                axpy(&mut vec, k.clone(), -(&c * v));
            }
            for (k, v) in &row.combo {
                axpy(&mut combo, *k, -(&c * v));
            }
            upper = Some(key);
        }
    }

    /// Adds a vector; returns false when it already lies in the span.
    /// The vector is tagged with the running insertion count.
    pub fn insert(&mut self, vec: SparseVec<K>) -> bool {
        let tag = self.inserted;
        self.inserted += 1;
        let mut combo = BTreeMap::new();
        combo.insert(tag, Scalar::one());
        let mut row = self.reduce(vec, combo);
        let Some((pivot, lead)) = row
            .vec
            .iter()
            .next_back()
            .map(|(k, c)| (k.clone(), c.clone()))
        else {
            return false;
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for v in row.vec.values_mut() {
                *v *= &inv;
            }
            for v in row.combo.values_mut() {
                *v *= &inv;
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    pub fn contains(&self, vec: &SparseVec<K>) -> bool {
        self.reduce(vec.clone(), BTreeMap::new()).vec.is_empty()
    }

    /// Expresses `target` as a combination of inserted vectors (by tag), or
    /// `None` when it is outside the span.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<BTreeMap<usize, Scalar>> {
        let row = self.reduce(target.clone(), BTreeMap::new());
        if !row.vec.is_empty() {
            return None;
        }
        Some(
            row.combo
                .into_iter()
                .map(|(k, v)| (k, -v))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        )
    }
}

fn axpy<K: Ord>(vec: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match vec.get_mut(&k) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                vec.remove(&k);
            }
        }
        None => {
            vec.insert(k, c);
        }
    }
}

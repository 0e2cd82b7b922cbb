//! Validated score vectors and strict rankings.
//!
//! `ScoreVector` is a non-empty vector of finite review scores, one per paper.
//! `Ranking` is a strict total order over positions `0..n`, best first; ties
//! are unrepresentable by construction. Both types validate on entry so the
//! numeric kernels never have to re-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-empty vector of finite scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("score vector must be non-empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "score at index {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(ScoreVector(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Copy of the entries sorted largest first.
    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.partial_cmp(a).expect("finite by construction"));
        v
    }

    /// True iff the entries are non-increasing left to right.
    pub fn is_descending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

impl std::ops::Index<usize> for ScoreVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<ScoreVector> for Vec<f64> {
    fn from(v: ScoreVector) -> Vec<f64> {
        v.0
    }
}

/// Permutation of `0..n` read as "position -> item": `order()[0]` is the item
/// ranked best.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking(Vec<usize>);

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::invalid("ranking must be non-empty"));
        }
        let n = order.len();
        let mut seen = vec![false; n];
        for &item in &order {
            if item >= n {
                return Err(Error::invalid(format!(
                    "ranking entry {item} out of range for length {n}"
                )));
            }
            if seen[item] {
                return Err(Error::invalid(format!(
                    "ranking lists item {item} more than once"
                )));
            }
            seen[item] = true;
        }
        Ok(Ranking(order))
    }

    /// The order `[0, 1, .., n-1]`: item 0 ranked best.
    pub fn identity(n: usize) -> Result<Self> {
        Ranking::new((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// `inverse()[item]` is the 0-based position of `item` in the order.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.0.len()];
        for (pos, &item) in self.0.iter().enumerate() {
            inv[item] = pos;
        }
        inv
    }
}

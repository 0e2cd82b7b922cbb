//! Euclidean projection onto the descending cone.
//!
//! `pava_descending` computes the closest (least-squares) non-increasing
//! vector to the input in one left-to-right pass using pool adjacent
//! violators: each input starts as its own block, and while the block to the
//! left has a *smaller* mean than the block to the right the two are merged
//! and replaced by their weighted mean. `project_onto_ranking` conjugates the
//! same projection with a permutation: scores are rearranged into an asserted
//! best-first order, projected, and scattered back.
//!
//! Reported blocks carry strictly decreasing means. The pass itself only
//! merges on strict violations, so exact ties in the input leave adjacent
//! blocks with equal means; those are coalesced when the fit is assembled,
//! which changes no fitted value (the mean of the union of equal-mean blocks
//! is that same mean).

use crate::error::{Error, Result};
use crate::score::{Ranking, ScoreVector};

/// Result of projecting onto the descending cone.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicFit {
    /// The projected vector, non-increasing left to right.
    pub fitted: ScoreVector,
    /// Half-open `[start, end)` index ranges of the constant pieces, in order.
    pub blocks: Vec<(usize, usize)>,
    /// Mean of the input over each block; strictly decreasing across blocks.
    pub block_means: Vec<f64>,
}

impl IsotonicFit {
    /// Number of constant pieces.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// Project `y` onto `{ r : r[0] >= r[1] >= .. >= r[n-1] }`.
///
/// Emptiness and non-finite entries are ruled out by `ScoreVector`, so this
/// cannot fail. Runs in O(n): every merge retires one candidate block.
pub fn pava_descending(y: &ScoreVector) -> IsotonicFit {
    let v = y.values();

    // Candidate blocks as parallel stacks: start index, running mean, weight.
    let mut start: Vec<usize> = Vec::with_capacity(v.len());
    let mut mean: Vec<f64> = Vec::with_capacity(v.len());
    let mut weight: Vec<f64> = Vec::with_capacity(v.len());

    for (i, &yi) in v.iter().enumerate() {
        start.push(i);
        mean.push(yi);
        weight.push(1.0);
        // A smaller mean to the left of a larger one violates the descending
        // constraint; pooling replaces both by their weighted mean.
        while mean.len() > 1 && mean[mean.len() - 2] < mean[mean.len() - 1] {
            let m_right = mean.pop().expect("stack non-empty");
            let w_right = weight.pop().expect("stack non-empty");
            start.pop();
            let top = mean.len() - 1;
            let w = weight[top] + w_right;
            mean[top] = (weight[top] * mean[top] + w_right * m_right) / w;
            weight[top] = w;
        }
    }

    // Coalesce adjacent blocks whose means came out exactly equal (input
    // ties): reported means must strictly decrease.
    let mut blocks: Vec<(usize, usize)> = Vec::with_capacity(mean.len());
    let mut block_means: Vec<f64> = Vec::with_capacity(mean.len());
    for (idx, &m) in mean.iter().enumerate() {
        let end = if idx + 1 < start.len() { start[idx + 1] } else { v.len() };
        match block_means.last() {
            Some(&prev) if prev == m => {
                blocks.last_mut().expect("non-empty").1 = end;
            }
            _ => {
                blocks.push((start[idx], end));
                block_means.push(m);
            }
        }
    }

    let mut fitted = vec![0.0; v.len()];
    for (&(s, e), &m) in blocks.iter().zip(&block_means) {
        fitted[s..e].fill(m);
    }

    IsotonicFit {
        fitted: ScoreVector::new(fitted).expect("projection of finite input is finite"),
        blocks,
        block_means,
    }
}

/// Project `y` onto the cone of vectors consistent with `pi`: rearrange into
/// the asserted best-first order, project descending, and scatter back.
///
/// The result `r` satisfies `r[pi.order()[0]] >= r[pi.order()[1]] >= ..` and
/// is the closest such vector to `y`.
pub fn project_onto_ranking(y: &ScoreVector, pi: &Ranking) -> Result<ScoreVector> {
    if y.len() != pi.len() {
        return Err(Error::invalid(format!(
            "ranking length {} does not match score length {}",
            pi.len(),
            y.len()
        )));
    }
    let order = pi.order();
    let permuted: Vec<f64> = order.iter().map(|&p| y[p]).collect();
    let fit = pava_descending(&ScoreVector::new(permuted).expect("permutation of valid scores"));
    let mut out = vec![0.0; y.len()];
    for (pos, &p) in order.iter().enumerate() {
        out[p] = fit.fitted[pos];
    }
    ScoreVector::new(out)
}

//! Majorization predicates and T-transforms.
//!
//! `a` majorizes `b` when, after sorting both largest-first, every prefix sum
//! of `a` dominates the matching prefix sum of `b` and the totals agree. The
//! weak variant drops the total-equality clause; the natural-order variant
//! compares prefixes as given, without sorting. A T-transform averages two
//! coordinates toward each other and is the elementary move connecting a
//! vector to anything it majorizes.
//!
//! All predicates share an absolute tolerance of 1e-9 on prefix-sum and total
//! comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::ScoreVector;

/// Absolute slack applied to every prefix-sum and total comparison.
pub const TOLERANCE: f64 = 1e-9;

fn check_same_length(a: &ScoreVector, b: &ScoreVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "majorization compares equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn prefix_dominates(a: &[f64], b: &[f64]) -> bool {
    let mut pa = 0.0;
    let mut pb = 0.0;
    for (x, y) in a.iter().zip(b) {
        pa += x;
        pb += y;
        if pa < pb - TOLERANCE {
            return false;
        }
    }
    true
}

/// Sorted prefix-sum dominance plus equal totals.
pub fn majorizes(a: &ScoreVector, b: &ScoreVector) -> Result<bool> {
    check_same_length(a, b)?;
    let sa = a.sorted_descending();
    let sb = b.sorted_descending();
    Ok(prefix_dominates(&sa, &sb) && (a.sum() - b.sum()).abs() <= TOLERANCE)
}

/// Sorted prefix-sum dominance only; totals are free.
pub fn weakly_majorizes(a: &ScoreVector, b: &ScoreVector) -> Result<bool> {
    check_same_length(a, b)?;
    let sa = a.sorted_descending();
    let sb = b.sorted_descending();
    Ok(prefix_dominates(&sa, &sb))
}

/// Prefix-sum dominance in the given coordinate order plus equal totals.
pub fn majorizes_natural_order(a: &ScoreVector, b: &ScoreVector) -> Result<bool> {
    check_same_length(a, b)?;
    Ok(prefix_dominates(a.values(), b.values())
        && (a.sum() - b.sum()).abs() <= TOLERANCE)
}

/// One averaging step: coordinates `i` and `j` move toward each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
}

/// Replace `x[i]` with `lambda*x[i] + (1-lambda)*x[j]` and `x[j]` with
/// `lambda*x[j] + (1-lambda)*x[i]`. The output is always majorized by `x`.
pub fn t_transform(x: &ScoreVector, i: usize, j: usize, lambda: f64) -> Result<ScoreVector> {
    if i >= x.len() || j >= x.len() {
        return Err(Error::invalid(format!(
            "t-transform indices ({i}, {j}) out of range for length {}",
            x.len()
        )));
    }
    if i == j {
        return Err(Error::invalid("t-transform needs two distinct coordinates"));
    }
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "t-transform lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let mut out = x.values().to_vec();
    let (xi, xj) = (out[i], out[j]);
    out[i] = lambda * xi + (1.0 - lambda) * xj;
    out[j] = lambda * xj + (1.0 - lambda) * xi;
    ScoreVector::new(out)
}

/// Apply a chain of transforms left to right.
pub fn apply_chain(x: &ScoreVector, chain: &[TTransform]) -> Result<ScoreVector> {
    let mut cur = x.clone();
    for t in chain {
        cur = t_transform(&cur, t.i, t.j, t.lambda)?;
    }
    Ok(cur)
}

/// Constructive witness that `a` majorizes `b`: a chain of T-transforms whose
/// replay on `a` reproduces `b` (within 1e-9).
///
/// For descending `a` and `b` this is the classic construction — take the
/// largest index `j` with `a[j] > b[j]` and the smallest `k > j` with
/// `a[k] < b[k]`, and average the pair until one of them reaches its target —
/// which fixes at least one coordinate per step (at most `n - 1` transforms)
/// and keeps every intermediate vector descending. Inputs that are not
/// descending are handled by running the same construction along their sorted
/// views and appending `lambda = 0` swaps to land the coordinates of `b`, so
/// up to `2(n - 1)` transforms in total.
///
/// Errors with a precondition violation when `a` does not majorize `b`.
pub fn t_transform_chain(a: &ScoreVector, b: &ScoreVector) -> Result<Vec<TTransform>> {
    if !majorizes(a, b)? {
        return Err(Error::precondition("t-transform chain requires a to majorize b"));
    }
    if a == b {
        return Ok(Vec::new());
    }
    if a.is_descending() && b.is_descending() {
        let identity: Vec<usize> = (0..a.len()).collect();
        return Ok(descending_chain(a.values().to_vec(), b.values(), &identity));
    }

    // Sorted views: positions p of the sorted problem live at coordinate
    // map[p] of the real vector.
    let n = a.len();
    let mut map: Vec<usize> = (0..n).collect();
    map.sort_by(|&p, &q| a[q].partial_cmp(&a[p]).expect("finite").then(p.cmp(&q)));
    let sorted_a: Vec<f64> = map.iter().map(|&p| a[p]).collect();
    let sorted_b = b.sorted_descending();

    let mut chain = descending_chain(sorted_a, &sorted_b, &map);

    // The chain so far leaves sorted_b's p-th value at coordinate map[p];
    // swap coordinates until each value sits where b wants it.
    let mut cur: Vec<f64> = {
        let played = apply_chain(a, &chain).expect("indices and lambdas are valid");
        played.values().to_vec()
    };
    for i in 0..n {
        if (cur[i] - b[i]).abs() <= TOLERANCE {
            continue;
        }
        // Closest match wins so that clustered values pair off exactly.
        let j = (i + 1..n)
            .min_by(|&p, &q| {
                (cur[p] - b[i])
                    .abs()
                    .partial_cmp(&(cur[q] - b[i]).abs())
                    .expect("finite")
            })
            .expect("b is a rearrangement of the chained values");
        cur.swap(i, j);
        chain.push(TTransform { i, j, lambda: 0.0 });
    }
    Ok(chain)
}

/// Core construction for descending `target`, operating on `cur` (descending)
/// and emitting indices through `map` (position -> real coordinate).
fn descending_chain(mut cur: Vec<f64>, target: &[f64], map: &[usize]) -> Vec<TTransform> {
    let n = cur.len();
    let mut chain = Vec::new();
    // Progress is guaranteed: each pass fixes j or k exactly, so n - 1 passes
    // suffice. The tolerance absorbs rounding from the lambda arithmetic.
    for _ in 0..n {
        let Some(j) = (0..n).rev().find(|&j| cur[j] > target[j] + TOLERANCE) else {
            break;
        };
        // The smallest deficit index keeps intermediates descending (every
        // coordinate strictly between j and k already equals its target).
        // Matching totals guarantee a deficit; if rounding hides it behind
        // the tolerance, fall back to the deepest strict deficit.
        let k = match (j + 1..n).find(|&k| cur[k] < target[k] - TOLERANCE) {
            Some(k) => k,
            None => {
                let Some(k) = (j + 1..n)
                    .filter(|&k| cur[k] < target[k])
                    .min_by(|&p, &q| {
                        (cur[p] - target[p])
                            .partial_cmp(&(cur[q] - target[q]))
                            .expect("finite")
                    })
                else {
                    break;
                };
                k
            }
        };
        let delta = (cur[j] - target[j]).min(target[k] - cur[k]);
        // cur[j] > target[j] >= target[k] > cur[k], so the gap is positive.
        let lambda = (1.0 - delta / (cur[j] - cur[k])).clamp(0.0, 1.0);
        let (xj, xk) = (cur[j], cur[k]);
        cur[j] = lambda * xj + (1.0 - lambda) * xk;
        cur[k] = lambda * xk + (1.0 - lambda) * xj;
        chain.push(TTransform {
            i: map[j],
            j: map[k],
            lambda,
        });
    }
    chain
}

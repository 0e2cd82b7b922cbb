//! Do historical award decisions reward higher scores convexly?
//!
//! The incentive guarantees need the chance of a good outcome to be a convex,
//! nondecreasing function of the review score — at least over the score range
//! that matters. This module builds the empirical outcome-vs-score curve from
//! historical records, fits a ridge-penalized logistic model, and reports
//! where the fitted curve stops being convex (it always does once the success
//! probability passes 1/2: the second derivative of a logistic curve is
//! `slope^2 * p(1-p)(1-2p)`, which changes sign exactly at `p = 1/2`).
//!
//! Scores from different years live on different scales, so records carry
//! their own scale bounds and are affinely normalized (by default onto 0..9)
//! before bucketing or fitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::{sigmoid, softplus};

/// Review outcome, ordered from worst to best. "Best" stands for any award
/// tier (best paper, runner-up, honorable mention alike).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeTier {
    Rejected,
    Accepted,
    Spotlight,
    Oral,
    Best,
}

impl OutcomeTier {
    pub fn parse(s: &str) -> Result<OutcomeTier> {
        match s {
            "rejected" => Ok(OutcomeTier::Rejected),
            "accepted" => Ok(OutcomeTier::Accepted),
            "spotlight" => Ok(OutcomeTier::Spotlight),
            "oral" => Ok(OutcomeTier::Oral),
            "best" => Ok(OutcomeTier::Best),
            other => Err(Error::invalid(format!(
                "unknown outcome '{other}' (expected rejected, accepted, spotlight, oral, best)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OutcomeTier::Rejected => "rejected",
            OutcomeTier::Accepted => "accepted",
            OutcomeTier::Spotlight => "spotlight",
            OutcomeTier::Oral => "oral",
            OutcomeTier::Best => "best",
        }
    }
}

/// One paper's score and decision, with the scale the score was given on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub paper_id: u64,
    pub score: f64,
    pub outcome: OutcomeTier,
    pub year: String,
    pub scale_lo: f64,
    pub scale_hi: f64,
}

impl ReviewRecord {
    pub fn new(
        paper_id: u64,
        score: f64,
        outcome: OutcomeTier,
        year: impl Into<String>,
        scale_lo: f64,
        scale_hi: f64,
    ) -> Result<Self> {
        if !scale_lo.is_finite() || !scale_hi.is_finite() || scale_lo >= scale_hi {
            return Err(Error::invalid(format!(
                "score scale [{scale_lo}, {scale_hi}] is not a proper interval"
            )));
        }
        if !score.is_finite() || score < scale_lo || score > scale_hi {
            return Err(Error::invalid(format!(
                "score {score} outside its scale [{scale_lo}, {scale_hi}]"
            )));
        }
        Ok(ReviewRecord {
            paper_id,
            score,
            outcome,
            year: year.into(),
            scale_lo,
            scale_hi,
        })
    }
}

/// Affinely map every record's score onto one common scale (0..9 by default
/// in the CLI), using each record's own bounds.
pub fn normalize_scores(
    records: &[ReviewRecord],
    target_lo: f64,
    target_hi: f64,
) -> Result<Vec<ReviewRecord>> {
    if !target_lo.is_finite() || !target_hi.is_finite() || target_lo >= target_hi {
        return Err(Error::invalid(format!(
            "target scale [{target_lo}, {target_hi}] is not a proper interval"
        )));
    }
    records
        .iter()
        .map(|r| {
            let unit = (r.score - r.scale_lo) / (r.scale_hi - r.scale_lo);
            ReviewRecord::new(
                r.paper_id,
                target_lo + unit * (target_hi - target_lo),
                r.outcome,
                r.year.clone(),
                target_lo,
                target_hi,
            )
        })
        .collect()
}

/// Uniform bucket edges `lo, lo+width, .., hi` (the last edge lands on `hi`).
pub fn uniform_edges(lo: f64, hi: f64, width: f64) -> Result<Vec<f64>> {
    if !width.is_finite() || width <= 0.0 || !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::invalid("bucket edges need lo < hi and positive width"));
    }
    let mut edges = Vec::new();
    let mut e = lo;
    while e < hi - 1e-12 {
        edges.push(e);
        e += width;
    }
    edges.push(hi);
    Ok(edges)
}

/// Coarse below the midfield, fine at the top, on the 0..9 scale: width 1.0
/// below 5, width 0.5 on [5, 7), width 0.25 above 7. High scores are where
/// award decisions happen, so that is where resolution goes.
pub fn nonuniform_preset_edges() -> Vec<f64> {
    let mut edges: Vec<f64> = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 5.5, 6.0, 6.5, 7.0];
    let mut e = 7.25;
    while e < 9.0 - 1e-12 {
        edges.push(e);
        e += 0.25;
    }
    edges.push(9.0);
    edges
}

/// One score bucket. `p` and `sem` are `None` when the bucket is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub successes: usize,
    pub p: Option<f64>,
    pub sem: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCurve {
    pub buckets: Vec<Bucket>,
}

/// Per-bucket success frequency for "outcome at least `threshold`", with the
/// binomial standard error `sqrt(p(1-p)/n)`.
///
/// Buckets are `[e_i, e_{i+1})`; the topmost additionally includes its right
/// edge, so a maximal score is not dropped. Records outside the edge range
/// are ignored.
pub fn bucket_probabilities(
    records: &[ReviewRecord],
    edges: &[f64],
    threshold: OutcomeTier,
) -> Result<EmpiricalCurve> {
    if edges.len() < 2 {
        return Err(Error::invalid("need at least two bucket edges"));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("bucket edges must be finite and strictly increasing"));
    }
    let mut n = vec![0usize; edges.len() - 1];
    let mut successes = vec![0usize; edges.len() - 1];
    for r in records {
        let idx = match edges.windows(2).position(|w| r.score >= w[0] && r.score < w[1]) {
            Some(i) => i,
            None if r.score == edges[edges.len() - 1] => edges.len() - 2,
            None => continue,
        };
        n[idx] += 1;
        if r.outcome >= threshold {
            successes[idx] += 1;
        }
    }
    let buckets = edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let (p, sem) = if n[i] > 0 {
                let p = successes[i] as f64 / n[i] as f64;
                (Some(p), Some((p * (1.0 - p) / n[i] as f64).sqrt()))
            } else {
                (None, None)
            };
            Bucket {
                lo: w[0],
                hi: w[1],
                n: n[i],
                successes: successes[i],
                p,
                sem,
            }
        })
        .collect();
    Ok(EmpiricalCurve { buckets })
}

/// Ridge-penalized logistic fit `p(s) = sigmoid(intercept + slope * s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub lambda: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Fit by damped Newton on the cross-entropy loss plus `lambda/2 * slope^2`
/// (the intercept is not penalized). Starts from (0, 0); every accepted step
/// decreases the loss; stops when the gradient norm drops below 1e-8 or
/// after 100 iterations (then flagged unconverged).
pub fn fit_logistic(
    records: &[ReviewRecord],
    threshold: OutcomeTier,
    lambda: f64,
) -> Result<LogisticFit> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid(format!(
            "ridge penalty must be finite and non-negative, got {lambda}"
        )));
    }
    if records.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two records, got {}",
            records.len()
        )));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
    let labels: Vec<f64> = records
        .iter()
        .map(|r| if r.outcome >= threshold { 1.0 } else { 0.0 })
        .collect();
    let positives = labels.iter().sum::<f64>() as usize;
    if positives == 0 || positives == records.len() {
        return Err(Error::DegenerateFit(format!(
            "all {} records are on one side of '{}'",
            records.len(),
            threshold.name()
        )));
    }

    let loss = |b0: f64, b1: f64| -> f64 {
        let ce: f64 = scores
            .iter()
            .zip(&labels)
            .map(|(&s, &y)| {
                let z = b0 + b1 * s;
                softplus(z) - y * z
            })
            .sum();
        ce + 0.5 * lambda * b1 * b1
    };
    let grad_norm_sq = |b0: f64, b1: f64| -> f64 {
        let (mut g0, mut g1) = (0.0f64, 0.0f64);
        for (&s, &y) in scores.iter().zip(&labels) {
            let d = sigmoid(b0 + b1 * s) - y;
            g0 += d;
            g1 += d * s;
        }
        g1 += lambda * b1;
        g0 * g0 + g1 * g1
    };

    let (mut b0, mut b1) = (0.0f64, 0.0f64);
    let mut current = loss(b0, b1);
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=100 {
        iterations = iter;
        let (mut g0, mut g1) = (0.0f64, 0.0f64);
        let (mut h00, mut h01, mut h11) = (0.0f64, 0.0f64, 0.0f64);
        for (&s, &y) in scores.iter().zip(&labels) {
            let p = sigmoid(b0 + b1 * s);
            let d = p - y;
            let w = p * (1.0 - p);
            g0 += d;
            g1 += d * s;
            h00 += w;
            h01 += w * s;
            h11 += w * s * s;
        }
        g1 += lambda * b1;
        h11 += lambda;

        let gsq = g0 * g0 + g1 * g1;
        if gsq.sqrt() < 1e-8 {
            converged = true;
            break;
        }

        let det = h00 * h11 - h01 * h01;
        if !det.is_finite() || det.abs() < f64::MIN_POSITIVE {
            return Err(Error::DegenerateFit("singular Hessian".into()));
        }
        let step0 = (h11 * g0 - h01 * g1) / det;
        let step1 = (h00 * g1 - h01 * g0) / det;

        // Halve the step until the loss decreases. Near the optimum the
        // true decrease falls below float resolution, so a step that
        // strictly shrinks the gradient norm while leaving the loss
        // unchanged up to rounding is accepted too — that keeps Newton's
        // quadratic endgame going down to the 1e-8 threshold.
        let resolution = 1e-12 * current.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1e-12 {
            let (c0, c1) = (b0 - t * step0, b1 - t * step1);
            let candidate = loss(c0, c1);
            if candidate < current
                || (candidate <= current + resolution && grad_norm_sq(c0, c1) < gsq)
            {
                b0 = c0;
                b1 = c1;
                current = candidate;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    Ok(LogisticFit {
        intercept: b0,
        slope: b1,
        lambda,
        converged,
        iterations,
    })
}

/// Closed-form second derivative of the fitted curve at score `s`:
/// `slope^2 * p(1-p)(1-2p)` with `p = sigmoid(intercept + slope*s)`. Its
/// sign is the sign of `1 - 2p` whenever the slope is nonzero.
pub fn second_derivative(fit: &LogisticFit, s: f64) -> f64 {
    let p = sigmoid(fit.intercept + fit.slope * s);
    fit.slope * fit.slope * p * (1.0 - p) * (1.0 - 2.0 * p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConvexityVerdict {
    /// Second derivative non-negative across the whole range.
    Convex,
    /// First grid score where the second derivative turns negative.
    NonConvex { first_negative: f64 },
    /// Zero slope: the curve carries no score information at all.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub range: (f64, f64),
    #[serde(flatten)]
    pub verdict: ConvexityVerdict,
    /// Score where the fitted probability crosses 1/2 (`-intercept/slope`);
    /// convexity can only hold below it for a rising curve. `None` for a
    /// flat fit.
    pub saturation: Option<f64>,
    /// True when the saturation score lies beyond the examined range.
    pub saturation_beyond_range: Option<bool>,
}

/// Check the fitted curve's second derivative on a 1000-point grid over
/// `[lo, hi]`.
pub fn convexity_report(fit: &LogisticFit, lo: f64, hi: f64) -> Result<ConvexityReport> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::invalid(format!(
            "convexity range [{lo}, {hi}] is not a proper interval"
        )));
    }
    if fit.slope == 0.0 {
        return Ok(ConvexityReport {
            range: (lo, hi),
            verdict: ConvexityVerdict::Flat,
            saturation: None,
            saturation_beyond_range: None,
        });
    }
    let saturation = -fit.intercept / fit.slope;
    let step = (hi - lo) / 999.0;
    let first_negative = (0..1000)
        .map(|i| lo + step * i as f64)
        .find(|&s| second_derivative(fit, s) < 0.0);
    let verdict = match first_negative {
        Some(s) => ConvexityVerdict::NonConvex { first_negative: s },
        None => ConvexityVerdict::Convex,
    };
    Ok(ConvexityReport {
        range: (lo, hi),
        verdict,
        saturation: Some(saturation),
        saturation_beyond_range: Some(saturation > hi),
    })
}

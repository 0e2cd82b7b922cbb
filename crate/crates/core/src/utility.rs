//! Author utility over award outcomes.
//!
//! An author cares about some scalar transform of the scores their papers
//! end up with. The incentive guarantees depend only on shape properties of
//! that transform — nondecreasing, and for quotas above one also convex — so
//! rather than trusting a caller-supplied label, construction *measures* the
//! flags on a declared domain grid: first differences at least `-1e-9` means
//! nondecreasing, second differences at least `-1e-9` means convex.
//!
//! Two aggregate forms exist. A blind utility applies one scalar transform
//! to each of the author's `k` best scores. An informed utility applies a
//! per-position transform `U_1 .. U_k` to the best, second best, and so on;
//! that form is only admissible when earlier positions grow at least as fast
//! as later ones (derivative dominance), checked on the same grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::ScoreVector;

/// Slack for the grid checks of monotonicity, convexity, and dominance.
pub const FLAG_TOLERANCE: f64 = 1e-9;
/// Domain used when the caller does not declare one.
pub const DEFAULT_DOMAIN: (f64, f64) = (-5.0, 15.0);
/// Number of grid points used for flag and dominance checks.
pub const GRID_POINTS: usize = 2001;

/// Scalar transform families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilityKind {
    /// `slope * x + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `exp(rate * x)`
    Exponential { rate: f64 },
    /// `softplus(x)^power = ln(1 + e^x)^power`
    SoftplusPower { power: f64 },
    /// Logistic CDF `1 / (1 + exp(-steepness * (x - center)))`: saturates,
    /// so it is monotone but not convex past the center.
    ThresholdSigmoid { center: f64, steepness: f64 },
}

impl UtilityKind {
    fn params(&self) -> Vec<f64> {
        match *self {
            UtilityKind::Linear { slope, intercept } => vec![slope, intercept],
            UtilityKind::Exponential { rate } => vec![rate],
            UtilityKind::SoftplusPower { power } => vec![power],
            UtilityKind::ThresholdSigmoid { center, steepness } => vec![center, steepness],
        }
    }

    fn eval(&self, x: f64) -> f64 {
        match *self {
            UtilityKind::Linear { slope, intercept } => slope * x + intercept,
            UtilityKind::Exponential { rate } => (rate * x).exp(),
            UtilityKind::SoftplusPower { power } => softplus(x).powf(power),
            UtilityKind::ThresholdSigmoid { center, steepness } => {
                sigmoid(steepness * (x - center))
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            UtilityKind::Linear { slope, intercept } => format!("linear({slope}x+{intercept})"),
            UtilityKind::Exponential { rate } => format!("exp({rate}x)"),
            UtilityKind::SoftplusPower { power } => format!("softplus^{power}"),
            UtilityKind::ThresholdSigmoid { center, steepness } => {
                format!("sigmoid(center={center},steepness={steepness})")
            }
        }
    }
}

pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// A scalar transform with measured shape flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarUtility {
    kind: UtilityKind,
    domain: (f64, f64),
    nondecreasing: bool,
    convex: bool,
}

impl ScalarUtility {
    pub fn new(kind: UtilityKind) -> Result<Self> {
        Self::with_domain(kind, DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1)
    }

    pub fn with_domain(kind: UtilityKind, lo: f64, hi: f64) -> Result<Self> {
        if let Some(p) = kind.params().iter().find(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("utility parameter {p} is not finite")));
        }
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::invalid(format!(
                "utility domain must be a finite interval, got [{lo}, {hi}]"
            )));
        }
        let values = grid(lo, hi).map(|x| kind.eval(x)).collect::<Vec<f64>>();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "utility {} overflows on [{lo}, {hi}]",
                kind.label()
            )));
        }
        let nondecreasing = values.windows(2).all(|w| w[1] - w[0] >= -FLAG_TOLERANCE);
        let convex = values
            .windows(3)
            .all(|w| w[2] - 2.0 * w[1] + w[0] >= -FLAG_TOLERANCE);
        Ok(ScalarUtility {
            kind,
            domain: (lo, hi),
            nondecreasing,
            convex,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.kind.eval(x)
    }

    pub fn kind(&self) -> &UtilityKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Measured on the domain grid, not asserted by the caller.
    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// Measured on the domain grid, not asserted by the caller.
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn label(&self) -> String {
        self.kind.label()
    }

    fn first_differences(&self) -> Vec<f64> {
        let values: Vec<f64> = grid(self.domain.0, self.domain.1)
            .map(|x| self.kind.eval(x))
            .collect();
        values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(move |i| lo + step * i as f64)
}

/// Sum of one transform over the author's `k` best scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlindUtility {
    quota: usize,
    u: ScalarUtility,
}

impl BlindUtility {
    pub fn new(quota: usize, u: ScalarUtility) -> Result<Self> {
        if quota < 1 {
            return Err(Error::invalid("blind utility quota must be at least 1"));
        }
        Ok(BlindUtility { quota, u })
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn scalar(&self) -> &ScalarUtility {
        &self.u
    }
}

/// Position-dependent transforms over the author's `k` best scores.
///
/// Construction enforces what the incentive analysis needs: every component
/// nondecreasing; for `k >= 2` also convex, with earlier components growing
/// at least as fast as later ones on the shared domain grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InformedUtility {
    components: Vec<ScalarUtility>,
}

impl InformedUtility {
    pub fn new(components: Vec<ScalarUtility>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("informed utility needs at least one component"));
        }
        let domain = components[0].domain();
        for (i, c) in components.iter().enumerate() {
            if c.domain() != domain {
                return Err(Error::invalid(
                    "informed utility components must share one domain",
                ));
            }
            if !c.is_nondecreasing() {
                return Err(Error::invalid(format!(
                    "informed utility component {i} ({}) is not nondecreasing",
                    c.label()
                )));
            }
            if components.len() >= 2 && !c.is_convex() {
                return Err(Error::invalid(format!(
                    "informed utility component {i} ({}) is not convex",
                    c.label()
                )));
            }
        }
        for i in 0..components.len().saturating_sub(1) {
            let earlier = components[i].first_differences();
            let later = components[i + 1].first_differences();
            if earlier
                .iter()
                .zip(&later)
                .any(|(e, l)| e < &(l - FLAG_TOLERANCE))
            {
                return Err(Error::invalid(format!(
                    "informed utility component {} must grow at least as fast as component {}",
                    i,
                    i + 1
                )));
            }
        }
        Ok(InformedUtility { components })
    }

    pub fn quota(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarUtility] {
        &self.components
    }
}

/// Either aggregate form behind one evaluation entry point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuthorUtility {
    Blind(BlindUtility),
    Informed(InformedUtility),
}

impl AuthorUtility {
    pub fn quota(&self) -> usize {
        match self {
            AuthorUtility::Blind(b) => b.quota(),
            AuthorUtility::Informed(i) => i.quota(),
        }
    }

    pub fn eval(&self, x: &ScoreVector) -> Result<f64> {
        match self {
            AuthorUtility::Blind(b) => eval_blind(b, x),
            AuthorUtility::Informed(i) => eval_informed(i, x),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AuthorUtility::Blind(b) => format!("blind(k={}, {})", b.quota(), b.scalar().label()),
            AuthorUtility::Informed(i) => format!(
                "informed({})",
                i.components()
                    .iter()
                    .map(|c| c.label())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

/// Sum of the `k` largest entries.
pub fn top_k_sum(x: &ScoreVector, k: usize) -> Result<f64> {
    if k < 1 || k > x.len() {
        return Err(Error::invalid(format!(
            "top-k sum needs 1 <= k <= {}, got {k}",
            x.len()
        )));
    }
    Ok(x.sorted_descending()[..k].iter().sum())
}

/// `sum_{i=1..k} u(x_(i))` over the `k` largest entries of `x`.
pub fn eval_blind(u: &BlindUtility, x: &ScoreVector) -> Result<f64> {
    if u.quota() > x.len() {
        return Err(Error::invalid(format!(
            "quota {} exceeds number of scores {}",
            u.quota(),
            x.len()
        )));
    }
    let sorted = x.sorted_descending();
    Ok(sorted[..u.quota()].iter().map(|&s| u.u.eval(s)).sum())
}

/// `sum_{i=1..k} U_i(x_(i))` over the `k` largest entries of `x`.
pub fn eval_informed(u: &InformedUtility, x: &ScoreVector) -> Result<f64> {
    if u.quota() > x.len() {
        return Err(Error::invalid(format!(
            "quota {} exceeds number of scores {}",
            u.quota(),
            x.len()
        )));
    }
    let sorted = x.sorted_descending();
    Ok(sorted[..u.quota()]
        .iter()
        .zip(&u.components)
        .map(|(&s, c)| c.eval(s))
        .sum())
}

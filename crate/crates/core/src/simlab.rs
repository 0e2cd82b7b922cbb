//! Monte-Carlo lab: protocol sweeps over synthetic conferences and
//! brute-force verifiers for the mechanism's guarantees.
//!
//! Determinism contract: every round `r` of a sweep derives its seed as
//! `sub_seed(master, r)`, so results are bit-identical no matter how many
//! threads execute the rounds or in what order. The review-noise variance
//! deliberately does not enter the seed derivation: all variance cells of a
//! round share the same underlying standard-normal draws (common random
//! numbers), which tightens cross-cell comparisons.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isotonic::{pava_descending, project_onto_ranking};
use crate::majorization::majorizes;
use crate::mechanism::{adjusted_scores, greedy_partition};
use crate::score::{Ranking, ScoreVector};
use crate::seeding::{self, sub_seed, TAG_NETWORK, TAG_QUALITY, TAG_REVIEWS};
use crate::selection::{select, Protocol, ProtocolSpec};
use crate::synthesis::{
    gen_network, gen_quality, gen_reviews, truthful_rankings, NetworkModel, NoiseModel,
    QualityModel, SyntheticConference,
};
use crate::utility::{AuthorUtility, ScalarUtility};

/// Mean true quality of `selected` divided by the mean true quality of the
/// best `winners` papers. When any quality is non-positive, all qualities
/// are first shifted by `1 - min(q)` so the ratio stays within (0, 1]; the
/// shift preserves the quality ordering.
pub fn normalized_quality(selected: &[usize], q: &ScoreVector, winners: usize) -> Result<f64> {
    if winners == 0 || winners > q.len() {
        return Err(Error::invalid(format!(
            "cannot norm against the top {winners} of {} papers",
            q.len()
        )));
    }
    if selected.len() != winners {
        return Err(Error::invalid(format!(
            "{} papers selected but {winners} winners expected",
            selected.len()
        )));
    }
    if let Some(&p) = selected.iter().find(|&&p| p >= q.len()) {
        return Err(Error::invalid(format!("selected paper {p} out of range")));
    }
    let min = q.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let shift = if min > 0.0 { 0.0 } else { min - 1.0 };
    let selected_mean =
        selected.iter().map(|&p| q[p] - shift).sum::<f64>() / winners as f64;
    let top_mean = q
        .sorted_descending()
        .iter()
        .take(winners)
        .map(|v| v - shift)
        .sum::<f64>()
        / winners as f64;
    Ok(selected_mean / top_mean)
}

/// Grid of experiment cells: every combination of noise variance, quota,
/// winner count, and protocol, each estimated over `rounds` conferences.
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub network: NetworkModel,
    pub quality: QualityModel,
    /// Review-error variances.
    pub epsilons: Vec<f64>,
    pub quotas: Vec<usize>,
    pub winners: Vec<usize>,
    pub protocols: Vec<Protocol>,
    pub rounds: usize,
    pub master_seed: u64,
    /// Draw a fresh network each round instead of reusing one draw for the
    /// whole sweep. Defaults to true for the uniform model and false for
    /// file-loaded networks (a real conference's network is a fixed fact).
    pub redraw_network: bool,
}

impl SweepConfig {
    /// Default grid: variances {0.25, 0.5, 1, 2, 4}, quotas {1, 5},
    /// winners {1, 10}, all four protocols, 200 rounds.
    pub fn new(network: NetworkModel, quality: QualityModel, master_seed: u64) -> Self {
        let redraw_network = matches!(network, NetworkModel::Uniform { .. });
        SweepConfig {
            network,
            quality,
            epsilons: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            quotas: vec![1, 5],
            winners: vec![1, 10],
            protocols: vec![
                Protocol::Benchmark,
                Protocol::Blind,
                Protocol::InformedMax,
                Protocol::InformedMin,
            ],
            rounds: 200,
            master_seed,
            redraw_network,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.quality.validate()?;
        if self.rounds < 2 {
            return Err(Error::invalid(
                "a sweep needs at least two rounds for the standard error",
            ));
        }
        if self.epsilons.is_empty()
            || self.quotas.is_empty()
            || self.winners.is_empty()
            || self.protocols.is_empty()
        {
            return Err(Error::invalid("every sweep grid dimension must be nonempty"));
        }
        for &eps in &self.epsilons {
            NoiseModel::new(eps)?;
        }
        if self.quotas.iter().any(|&k| k == 0) || self.winners.iter().any(|&f| f == 0) {
            return Err(Error::invalid("quotas and winner counts must be at least 1"));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(f64, usize, usize, Protocol)> {
        let mut cells = Vec::new();
        for &eps in &self.epsilons {
            for &k in &self.quotas {
                for &f in &self.winners {
                    for &p in &self.protocols {
                        cells.push((eps, k, f, p));
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub epsilon: f64,
    pub quota: usize,
    pub winners: usize,
    pub protocol: Protocol,
    pub mean_norm_quality: f64,
    pub sem: f64,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub master_seed: u64,
}

impl SweepResult {
    pub fn cell(
        &self,
        epsilon: f64,
        quota: usize,
        winners: usize,
        protocol: Protocol,
    ) -> Option<&SweepCell> {
        self.cells.iter().find(|c| {
            c.epsilon == epsilon && c.quota == quota && c.winners == winners && c.protocol == protocol
        })
    }
}

/// Run every grid cell for `cfg.rounds` independent rounds and aggregate
/// the per-round normalized quality into mean ± SEM (sample standard
/// deviation over √rounds). Within a round, all cells score the same
/// conference draw per variance.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let fixed_network = if cfg.redraw_network {
        None
    } else {
        Some(gen_network(
            &cfg.network,
            sub_seed(cfg.master_seed, TAG_NETWORK),
        )?)
    };
    let cells = cfg.cells();

    // Rounds are embarrassingly parallel; collecting by round index keeps
    // the later reduction order fixed regardless of thread count.
    let per_round: Vec<Vec<f64>> = (0..cfg.rounds)
        .into_par_iter()
        .map(|round| round_values(cfg, fixed_network.as_ref(), &cells, round))
        .collect::<Result<_>>()?;

    let aggregated = cells
        .iter()
        .enumerate()
        .map(|(i, &(epsilon, quota, winners, protocol))| {
            let values: Vec<f64> = per_round.iter().map(|r| r[i]).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (values.len() - 1) as f64;
            SweepCell {
                epsilon,
                quota,
                winners,
                protocol,
                mean_norm_quality: mean,
                sem: (var / values.len() as f64).sqrt(),
                rounds: cfg.rounds,
            }
        })
        .collect();
    Ok(SweepResult {
        cells: aggregated,
        master_seed: cfg.master_seed,
    })
}

fn round_values(
    cfg: &SweepConfig,
    fixed_network: Option<&crate::network::AuthorshipNetwork>,
    cells: &[(f64, usize, usize, Protocol)],
    round: usize,
) -> Result<Vec<f64>> {
    let round_seed = sub_seed(cfg.master_seed, round as u64);
    let mut values = Vec::with_capacity(cells.len());
    for &eps in &cfg.epsilons {
        let noise = NoiseModel::new(eps)?;
        let network = match fixed_network {
            Some(net) => net.clone(),
            None => gen_network(&cfg.network, sub_seed(round_seed, TAG_NETWORK))?,
        };
        let quality = gen_quality(&network, &cfg.quality, sub_seed(round_seed, TAG_QUALITY))?;
        let reviews = gen_reviews(&quality, &noise, sub_seed(round_seed, TAG_REVIEWS))?;
        let rankings = truthful_rankings(&network, &quality);
        let conf = SyntheticConference {
            network,
            quality,
            reviews,
            rankings,
        };

        let partition = greedy_partition(&conf.network);
        let adjusted = adjusted_scores(&conf.network, &conf.rankings, &conf.reviews, &partition)?;
        for &(cell_eps, quota, winners, protocol) in cells {
            if cell_eps != eps {
                continue;
            }
            let spec = ProtocolSpec::new(protocol, quota, winners)?;
            let picked = select(&spec, &conf.network, &conf.rankings, &conf.reviews, &adjusted.values)?;
            let ids: Vec<usize> = picked.entries.iter().map(|e| e.paper).collect();
            let nq = normalized_quality(&ids, &conf.quality, winners)?;
            debug_assert!(nq > 0.0 && nq <= 1.0 + 1e-12, "normalized quality {nq} outside (0,1]");
            values.push(nq);
        }
    }
    Ok(values)
}

/// Estimated expected utility for one reported ranking, with the paired
/// difference against the truthful report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationStat {
    /// Reported order: position `i` holds the paper placed at rank `i+1`.
    pub permutation: Vec<usize>,
    pub mean_utility: f64,
    pub sem_utility: f64,
    /// Mean of (this report's utility − truthful report's utility), paired
    /// per trial.
    pub mean_gap: f64,
    pub sem_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthfulnessReport {
    pub n: usize,
    pub utility: String,
    pub noise_variance: f64,
    pub trials: usize,
    pub seed: u64,
    /// All n! reports, truthful (identity) first, then lexicographic.
    pub permutations: Vec<PermutationStat>,
    /// Largest mean_gap / sem_gap among the alternatives (0 if every gap
    /// is deterministically zero).
    pub max_gap_z: f64,
    /// True when no alternative report beats the truthful one by more than
    /// three standard errors of the paired difference.
    pub truthful: bool,
}

/// Monte-Carlo check that the truthful report maximizes expected utility.
///
/// For each trial, one noise vector is drawn and every permutation is scored
/// against it (common random numbers), so the per-permutation differences
/// are paired. `n` is capped at 6 to keep full enumeration of n! reports
/// tractable; `trials` must be at least 10^4 for the 3-sigma verdict to
/// mean anything.
pub fn verify_truthfulness(
    n: usize,
    true_scores: &ScoreVector,
    utility: &AuthorUtility,
    noise_variance: f64,
    trials: usize,
    seed: u64,
) -> Result<TruthfulnessReport> {
    if n > 6 {
        return Err(Error::UnsupportedSize(format!(
            "{n} papers means {} reports to enumerate; 6 is the cap",
            (1..=n).product::<usize>()
        )));
    }
    if n == 0 || true_scores.len() != n {
        return Err(Error::invalid(format!(
            "need n ≥ 1 scores, got n={n} with {} scores",
            true_scores.len()
        )));
    }
    if !true_scores.is_descending() {
        return Err(Error::invalid("true scores must be sorted descending"));
    }
    if trials < 10_000 {
        return Err(Error::invalid(format!(
            "{trials} trials is too few for a stable 3-sigma verdict (need ≥ 10000)"
        )));
    }
    if utility.quota() > n {
        return Err(Error::invalid(format!(
            "utility quota {} exceeds the {n} papers",
            utility.quota()
        )));
    }
    let noise = NoiseModel::new(noise_variance)?;

    let perms: Vec<Ranking> = (0..n)
        .permutations(n)
        .map(|p| Ranking::new(p).expect("permutation by construction"))
        .collect();
    let mut sum = vec![0.0f64; perms.len()];
    let mut sumsq = vec![0.0f64; perms.len()];
    let mut gap_sum = vec![0.0f64; perms.len()];
    let mut gap_sumsq = vec![0.0f64; perms.len()];

    let mut rng = seeding::stream(seed, TAG_REVIEWS);
    let mut utilities = vec![0.0f64; perms.len()];
    for _ in 0..trials {
        let reviews = gen_reviews(true_scores, &noise, rng.random())?;
        for (i, perm) in perms.iter().enumerate() {
            let fitted = project_onto_ranking(&reviews, perm)?;
            utilities[i] = utility.eval(&fitted)?;
        }
        for i in 0..perms.len() {
            let u = utilities[i];
            let gap = u - utilities[0];
            sum[i] += u;
            sumsq[i] += u * u;
            gap_sum[i] += gap;
            gap_sumsq[i] += gap * gap;
        }
    }

    let t = trials as f64;
    let sem = |s: f64, ss: f64| {
        let mean = s / t;
        let var = ((ss / t - mean * mean) * t / (t - 1.0)).max(0.0);
        (var / t).sqrt()
    };
    let permutations: Vec<PermutationStat> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| PermutationStat {
            permutation: p.order().to_vec(),
            mean_utility: sum[i] / t,
            sem_utility: sem(sum[i], sumsq[i]),
            mean_gap: gap_sum[i] / t,
            sem_gap: sem(gap_sum[i], gap_sumsq[i]),
        })
        .collect();
    let max_gap_z = permutations
        .iter()
        .skip(1)
        .map(|p| {
            if p.sem_gap > 0.0 {
                p.mean_gap / p.sem_gap
            } else if p.mean_gap > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0f64, f64::max);
    let truthful = permutations
        .iter()
        .skip(1)
        .all(|p| p.mean_gap <= 3.0 * p.sem_gap);

    Ok(TruthfulnessReport {
        n,
        utility: utility.label(),
        noise_variance,
        trials,
        seed,
        permutations,
        max_gap_z,
        truthful,
    })
}

/// Outcome of a deterministic per-sample check: a single violation fails it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactCheckReport {
    pub trials: usize,
    pub violations: usize,
    pub pass: bool,
    pub seed: u64,
    /// Extra scalar evidence; meaning depends on the check.
    pub diagnostic: f64,
}

/// Sample (sorted scores, permutation, noise), and check that the isotonic
/// fit of the truthfully-ordered noisy scores majorizes the fit of any
/// permuted report of the same scores with the same noise. Sizes are drawn
/// from 2..=8; the check per sample is exact (prefix-sum tolerance 1e-9).
///
/// The diagnostic is the smallest prefix-sum margin observed (negative
/// values within tolerance are rounding, below tolerance are violations).
pub fn verify_majorization_step(trials: usize, seed: u64) -> Result<ExactCheckReport> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut rng = seeding::stream(seed, 0);
    let noise = NoiseModel::new(1.0)?;
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;
    for _ in 0..trials {
        let n = rng.random_range(2..=8usize);
        let mut scores: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        scores.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);

        let truthful = ScoreVector::new(scores.clone())?;
        let permuted = ScoreVector::new(perm.iter().map(|&i| scores[i]).collect())?;
        let eps_seed: u64 = rng.random();
        let noisy_truthful = gen_reviews(&truthful, &noise, eps_seed)?;
        let noisy_permuted = gen_reviews(&permuted, &noise, eps_seed)?;

        let a = pava_descending(&noisy_truthful).fitted;
        let b = pava_descending(&noisy_permuted).fitted;
        if !majorizes(&a, &b)? {
            violations += 1;
        }
        let (sa, sb) = (a.sorted_descending(), b.sorted_descending());
        let mut pa = 0.0;
        let mut pb = 0.0;
        for i in 0..n {
            pa += sa[i];
            pb += sb[i];
            min_margin = min_margin.min(pa - pb);
        }
    }
    Ok(ExactCheckReport {
        trials,
        violations,
        pass: violations == 0,
        seed,
        diagnostic: min_margin,
    })
}

/// Check that isotonic fitting never hurts the extremes: the top fitted
/// score is at least the top raw score and the bottom fitted score at most
/// the bottom raw score, on random vectors of size 1..=8. Exact, zero
/// violations allowed.
///
/// The diagnostic is the mean utility gap `u(fitted[0]) − u(y[0])` for the
/// supplied nondecreasing utility — nonnegative per sample by the bound.
pub fn verify_individual_rationality(
    trials: usize,
    u: &ScalarUtility,
    seed: u64,
) -> Result<ExactCheckReport> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if !u.is_nondecreasing() {
        return Err(Error::invalid(format!(
            "utility {} is not nondecreasing on its domain",
            u.label()
        )));
    }
    let mut rng = seeding::stream(seed, 0);
    let mut violations = 0usize;
    let mut gap_total = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(1..=8usize);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = ScoreVector::new(y)?;
        let fit = pava_descending(&y);
        if fit.fitted[0] < y[0] || fit.fitted[n - 1] > y[n - 1] {
            violations += 1;
        }
        gap_total += u.eval(fit.fitted[0]) - u.eval(y[0]);
    }
    Ok(ExactCheckReport {
        trials,
        violations,
        pass: violations == 0,
        seed,
        diagnostic: gap_total / trials as f64,
    })
}

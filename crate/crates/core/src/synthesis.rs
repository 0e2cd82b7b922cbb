//! Seeded conference generators.
//!
//! Everything here is a pure function of (parameters, seed): networks,
//! qualities, reviews, and the truthful rankings derived from quality. Draws
//! happen in a fixed order (authors by id, then papers by id) so outputs are
//! bit-stable across runs and platforms.
//!
//! The uniform network draws an author count per paper from `U{min..max}`
//! and picks that many distinct authors uniformly. Author quality is
//! `Normal(5, var 2)`; paper quality is the best author's quality plus
//! `Normal(0, var 1)`. The productivity-weighted variant adds a bonus per
//! authored paper — one `Normal(5/16, var 2/256)` draw for each paper, so an
//! author with 16 papers expects a +5 bump. The bonus formula can be read as
//! a single draw independent of productivity; `per_paper_bonus: false`
//! selects that literal reading. Reviews add i.i.d. `Normal(0, var ε)` to
//! true quality.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{AuthorRankings, AuthorshipNetwork};
use crate::score::ScoreVector;
use crate::seeding::{self, TAG_NETWORK, TAG_QUALITY, TAG_REVIEWS};

/// Author/paper counts of the ICLR 2021 network; used by the strict check.
pub const ICLR2021_AUTHORS: usize = 2997;
pub const ICLR2021_PAPERS: usize = 8956;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkModel {
    /// Fixed counts, authors-per-paper uniform on `{min..=max}`, authors
    /// drawn uniformly without replacement.
    Uniform {
        num_authors: usize,
        num_papers: usize,
        min_authors_per_paper: usize,
        max_authors_per_paper: usize,
    },
    /// Load a fixed network from an edge CSV (`paper_id,author_id`). With
    /// `strict_counts` the file must be the ICLR 2021 network shape
    /// (2997 authors, 8956 papers).
    FromFile { path: PathBuf, strict_counts: bool },
}

impl NetworkModel {
    /// 2500 authors, 5000 papers, 1-10 authors per paper.
    pub fn default_uniform() -> Self {
        NetworkModel::Uniform {
            num_authors: 2500,
            num_papers: 5000,
            min_authors_per_paper: 1,
            max_authors_per_paper: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let NetworkModel::Uniform {
            num_authors,
            num_papers,
            min_authors_per_paper,
            max_authors_per_paper,
        } = self
        {
            if *num_authors == 0 || *num_papers == 0 {
                return Err(Error::invalid("network needs positive author and paper counts"));
            }
            if *min_authors_per_paper < 1
                || min_authors_per_paper > max_authors_per_paper
                || max_authors_per_paper > num_authors
            {
                return Err(Error::invalid(format!(
                    "authors-per-paper range [{min_authors_per_paper}, {max_authors_per_paper}] \
                     invalid for {num_authors} authors"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityModel {
    Standard {
        author_mean: f64,
        author_var: f64,
        paper_noise_var: f64,
    },
    ProductivityWeighted {
        author_mean: f64,
        author_var: f64,
        paper_noise_var: f64,
        bonus_mean: f64,
        bonus_var: f64,
        /// Sum one bonus draw per authored paper (default). `false` adds a
        /// single draw regardless of productivity.
        per_paper_bonus: bool,
    },
}

impl QualityModel {
    pub fn default_standard() -> Self {
        QualityModel::Standard {
            author_mean: 5.0,
            author_var: 2.0,
            paper_noise_var: 1.0,
        }
    }

    pub fn default_productivity() -> Self {
        QualityModel::ProductivityWeighted {
            author_mean: 5.0,
            author_var: 2.0,
            paper_noise_var: 1.0,
            bonus_mean: 5.0 / 16.0,
            bonus_var: 2.0 / 256.0,
            per_paper_bonus: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vars = match self {
            QualityModel::Standard {
                author_var,
                paper_noise_var,
                ..
            } => vec![*author_var, *paper_noise_var],
            QualityModel::ProductivityWeighted {
                author_var,
                paper_noise_var,
                bonus_var,
                ..
            } => vec![*author_var, *paper_noise_var, *bonus_var],
        };
        if vars.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("quality variances must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Review noise level: `r = q + Normal(0, var ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(Error::invalid(format!(
                "review noise variance must be finite and non-negative, got {variance}"
            )));
        }
        Ok(NoiseModel { variance })
    }
}

/// One fully generated conference.
#[derive(Debug, Clone)]
pub struct SyntheticConference {
    pub network: AuthorshipNetwork,
    pub quality: ScoreVector,
    pub reviews: ScoreVector,
    pub rankings: AuthorRankings,
}

/// Zero variance degenerates to the mean, exactly.
fn draw_normal(rng: &mut ChaCha12Rng, mean: f64, var: f64) -> f64 {
    if var == 0.0 {
        mean
    } else {
        Normal::new(mean, var.sqrt())
            .expect("validated variance")
            .sample(rng)
    }
}

pub fn gen_network(model: &NetworkModel, seed: u64) -> Result<AuthorshipNetwork> {
    model.validate()?;
    match model {
        NetworkModel::Uniform {
            num_authors,
            num_papers,
            min_authors_per_paper,
            max_authors_per_paper,
        } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut papers_by_author: Vec<Vec<usize>> = vec![Vec::new(); *num_authors];
            for paper in 0..*num_papers {
                let count = rng.random_range(*min_authors_per_paper..=*max_authors_per_paper);
                let mut chosen =
                    rand::seq::index::sample(&mut rng, *num_authors, count).into_vec();
                chosen.sort_unstable();
                for author in chosen {
                    papers_by_author[author].push(paper);
                }
            }
            // Isolated authors are legal; orphaned papers are not, and the
            // sampler always assigns at least one author per paper.
            AuthorshipNetwork::from_ownership(*num_papers, papers_by_author)
        }
        NetworkModel::FromFile {
            path,
            strict_counts,
        } => {
            let (network, _) = crate::io::read_network_csv(path)?;
            if *strict_counts
                && (network.num_authors() != ICLR2021_AUTHORS
                    || network.num_papers() != ICLR2021_PAPERS)
            {
                return Err(Error::invalid(format!(
                    "strict counts: expected {ICLR2021_AUTHORS} authors and {ICLR2021_PAPERS} \
                     papers, file has {} and {}",
                    network.num_authors(),
                    network.num_papers()
                )));
            }
            Ok(network)
        }
    }
}

pub fn gen_quality(
    net: &AuthorshipNetwork,
    model: &QualityModel,
    seed: u64,
) -> Result<ScoreVector> {
    model.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (author_mean, author_var, paper_noise_var) = match *model {
        QualityModel::Standard {
            author_mean,
            author_var,
            paper_noise_var,
        } => (author_mean, author_var, paper_noise_var),
        QualityModel::ProductivityWeighted {
            author_mean,
            author_var,
            paper_noise_var,
            ..
        } => (author_mean, author_var, paper_noise_var),
    };

    let mut author_quality: Vec<f64> = (0..net.num_authors())
        .map(|_| draw_normal(&mut rng, author_mean, author_var))
        .collect();
    if let QualityModel::ProductivityWeighted {
        bonus_mean,
        bonus_var,
        per_paper_bonus,
        ..
    } = *model
    {
        for (author, q) in author_quality.iter_mut().enumerate() {
            let draws = if per_paper_bonus {
                net.papers_of(author).len()
            } else {
                1
            };
            for _ in 0..draws {
                *q += draw_normal(&mut rng, bonus_mean, bonus_var);
            }
        }
    }

    let quality: Vec<f64> = (0..net.num_papers())
        .map(|p| {
            let best = net
                .authors_of(p)
                .iter()
                .map(|&a| author_quality[a])
                .fold(f64::NEG_INFINITY, f64::max);
            best + draw_normal(&mut rng, 0.0, paper_noise_var)
        })
        .collect();
    ScoreVector::new(quality)
}

pub fn gen_reviews(quality: &ScoreVector, noise: &NoiseModel, seed: u64) -> Result<ScoreVector> {
    NoiseModel::new(noise.variance)?;
    if noise.variance == 0.0 {
        return Ok(quality.clone());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let reviews = quality
        .values()
        .iter()
        .map(|&q| q + draw_normal(&mut rng, 0.0, noise.variance))
        .collect();
    ScoreVector::new(reviews)
}

/// Every author ranks their own papers by true quality, best first, ties to
/// the lower paper id. No randomness involved.
pub fn truthful_rankings(net: &AuthorshipNetwork, quality: &ScoreVector) -> AuthorRankings {
    let by_author = (0..net.num_authors())
        .map(|a| {
            let mut papers = net.papers_of(a).to_vec();
            papers.sort_by(|&p, &q| {
                quality[q]
                    .partial_cmp(&quality[p])
                    .expect("finite")
                    .then(p.cmp(&q))
            });
            Some(papers)
        })
        .collect();
    AuthorRankings::new(net, by_author).expect("sorted own papers form a valid ranking")
}

/// Generate a full conference from one master seed, using the documented
/// stream tags for the network, quality, and review draws.
pub fn gen_conference(
    network_model: &NetworkModel,
    quality_model: &QualityModel,
    noise: &NoiseModel,
    seed: u64,
) -> Result<SyntheticConference> {
    let network = gen_network(network_model, seeding::sub_seed(seed, TAG_NETWORK))?;
    let quality = gen_quality(&network, quality_model, seeding::sub_seed(seed, TAG_QUALITY))?;
    let reviews = gen_reviews(&quality, noise, seeding::sub_seed(seed, TAG_REVIEWS))?;
    let rankings = truthful_rankings(&network, &quality);
    Ok(SyntheticConference {
        network,
        quality,
        reviews,
        rankings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_network_is_reproducible_and_validated() {
        let model = NetworkModel::Uniform {
            num_authors: 50,
            num_papers: 120,
            min_authors_per_paper: 1,
            max_authors_per_paper: 10,
        };
        let a = gen_network(&model, 7).unwrap();
        let b = gen_network(&model, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_network(&model, 8).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.num_papers(), 120);
        assert_eq!(a.num_authors(), 50);

        let bad = NetworkModel::Uniform {
            num_authors: 5,
            num_papers: 10,
            min_authors_per_paper: 1,
            max_authors_per_paper: 10,
        };
        assert!(gen_network(&bad, 0).is_err());
    }

    #[test]
    fn authors_per_paper_matches_its_distribution() {
        let model = NetworkModel::Uniform {
            num_authors: 2500,
            num_papers: 10_000,
            min_authors_per_paper: 1,
            max_authors_per_paper: 10,
        };
        let net = gen_network(&model, 2024).unwrap();
        let sizes: Vec<usize> = (0..net.num_papers()).map(|p| net.authors_of(p).len()).collect();
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        assert!((mean - 5.5).abs() < 0.1, "mean authors/paper {mean}");

        // Chi-square goodness of fit against U{1..10}: 9 degrees of freedom,
        // upper 1% critical value 21.666.
        let mut counts = [0usize; 10];
        for s in sizes {
            counts[s - 1] += 1;
        }
        let expected = 10_000.0 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 21.666, "chi-square statistic {chi2}");
    }

    #[test]
    fn standard_quality_centers_on_the_author_mean() {
        // 100k single-author papers: paper quality is one author draw plus
        // zero-mean noise, so the empirical mean sits near 5.
        let n = 100_000;
        let net = AuthorshipNetwork::from_ownership(n, (0..n).map(|p| vec![p]).collect()).unwrap();
        let q = gen_quality(&net, &QualityModel::default_standard(), 11).unwrap();
        let mean = q.sum() / n as f64;
        assert!((mean - 5.0).abs() < 0.05, "mean quality {mean}");
    }

    #[test]
    fn degenerate_variances_collapse_to_constants() {
        let net =
            AuthorshipNetwork::from_ownership(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let model = QualityModel::Standard {
            author_mean: 4.25,
            author_var: 0.0,
            paper_noise_var: 0.0,
        };
        let q = gen_quality(&net, &model, 99).unwrap();
        assert_eq!(q.values(), &[4.25, 4.25, 4.25]);
    }

    #[test]
    fn productivity_bonus_accumulates_per_paper() {
        // 2000 authors with 16 papers each, no other randomness: the mean
        // excess over the base quality estimates the total bonus, 16 * 5/16.
        let authors = 2000;
        let papers = authors * 16;
        let ownership: Vec<Vec<usize>> =
            (0..authors).map(|a| (a * 16..(a + 1) * 16).collect()).collect();
        let net = AuthorshipNetwork::from_ownership(papers, ownership).unwrap();
        let model = QualityModel::ProductivityWeighted {
            author_mean: 5.0,
            author_var: 0.0,
            paper_noise_var: 0.0,
            bonus_mean: 5.0 / 16.0,
            bonus_var: 2.0 / 256.0,
            per_paper_bonus: true,
        };
        let q = gen_quality(&net, &model, 3).unwrap();
        let mean_excess = q.values().iter().map(|v| v - 5.0).sum::<f64>() / papers as f64;
        assert!((mean_excess - 5.0).abs() < 0.05, "mean bonus {mean_excess}");

        // Literal single-draw reading: expectation 5/16 regardless of count.
        let literal = QualityModel::ProductivityWeighted {
            author_mean: 5.0,
            author_var: 0.0,
            paper_noise_var: 0.0,
            bonus_mean: 5.0 / 16.0,
            bonus_var: 2.0 / 256.0,
            per_paper_bonus: false,
        };
        let q = gen_quality(&net, &literal, 3).unwrap();
        let mean_excess = q.values().iter().map(|v| v - 5.0).sum::<f64>() / papers as f64;
        assert!((mean_excess - 5.0 / 16.0).abs() < 0.02, "mean bonus {mean_excess}");
    }

    #[test]
    fn reviews_add_noise_of_the_requested_variance() {
        let n = 100_000;
        let quality = ScoreVector::new(vec![5.0; n]).unwrap();
        let noise = NoiseModel::new(1.0).unwrap();
        let r = gen_reviews(&quality, &noise, 17).unwrap();
        let residuals: Vec<f64> = r.values().iter().map(|v| v - 5.0).collect();
        let mean = residuals.iter().sum::<f64>() / n as f64;
        let var = residuals.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() < 0.02, "noise variance {var}");

        // Zero noise copies the qualities exactly.
        let exact = gen_reviews(&quality, &NoiseModel::new(0.0).unwrap(), 17).unwrap();
        assert_eq!(exact.values(), quality.values());
        assert!(NoiseModel::new(-1.0).is_err());
    }

    #[test]
    fn truthful_rankings_sort_by_quality_with_id_ties() {
        let net = AuthorshipNetwork::from_ownership(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let q = ScoreVector::new(vec![2.0, 9.0, 2.0, 7.0]).unwrap();
        let rk = truthful_rankings(&net, &q);
        assert_eq!(rk.ranking_of(0), Some(&[1, 3, 0, 2][..]));
    }

    #[test]
    fn conference_generation_is_deterministic() {
        let model = NetworkModel::Uniform {
            num_authors: 20,
            num_papers: 40,
            min_authors_per_paper: 1,
            max_authors_per_paper: 4,
        };
        let noise = NoiseModel::new(2.0).unwrap();
        let a = gen_conference(&model, &QualityModel::default_standard(), &noise, 5).unwrap();
        let b = gen_conference(&model, &QualityModel::default_standard(), &noise, 5).unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.quality, b.quality);
        assert_eq!(a.reviews, b.reviews);
        assert_eq!(a.rankings, b.rankings);
    }
}

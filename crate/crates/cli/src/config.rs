//! TOML run configuration.
//!
//! One file can describe everything a batch run needs; each command reads
//! only the sections it uses. Unknown keys are rejected so a typo in an
//! experiment definition fails loudly instead of silently falling back to a
//! default.

use std::fs;
use std::path::{Path, PathBuf};

use isomech::selection::Protocol;
use isomech::simlab::SweepConfig;
use isomech::synthesis::{NetworkModel, NoiseModel, QualityModel};
use isomech::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: Option<u64>,
    pub network: Option<NetworkSection>,
    pub quality: Option<QualitySection>,
    pub noise: Option<NoiseSection>,
    pub protocol: Option<ProtocolSection>,
    pub sweep: Option<SweepSection>,
    pub audit: Option<AuditSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
    }

    pub fn network(&self) -> Result<NetworkModel> {
        self.network
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("config has no [network] section".into()))?
            .to_model()
    }

    pub fn quality(&self) -> Result<QualityModel> {
        match &self.quality {
            Some(section) => section.to_model(),
            None => Ok(QualityModel::default_standard()),
        }
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        let section = self
            .noise
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("config has no [noise] section".into()))?;
        NoiseModel::new(section.variance)
    }
}

/// `model = "uniform"` takes the author/paper counts and the per-paper
/// author range; `model = "from_file"` takes an edge CSV path.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub model: String,
    pub num_authors: Option<usize>,
    pub num_papers: Option<usize>,
    pub min_authors_per_paper: Option<usize>,
    pub max_authors_per_paper: Option<usize>,
    pub path: Option<PathBuf>,
    pub strict_counts: Option<bool>,
}

impl NetworkSection {
    pub fn to_model(&self) -> Result<NetworkModel> {
        match self.model.as_str() {
            "uniform" => {
                if self.path.is_some() || self.strict_counts.is_some() {
                    return Err(Error::InvalidArgument(
                        "network: path/strict_counts only apply to model = \"from_file\"".into(),
                    ));
                }
                let num_authors = require(self.num_authors, "network.num_authors")?;
                let num_papers = require(self.num_papers, "network.num_papers")?;
                Ok(NetworkModel::Uniform {
                    num_authors,
                    num_papers,
                    min_authors_per_paper: self.min_authors_per_paper.unwrap_or(1),
                    max_authors_per_paper: self.max_authors_per_paper.unwrap_or(10),
                })
            }
            "from_file" => {
                if self.num_authors.is_some()
                    || self.num_papers.is_some()
                    || self.min_authors_per_paper.is_some()
                    || self.max_authors_per_paper.is_some()
                {
                    return Err(Error::InvalidArgument(
                        "network: count keys only apply to model = \"uniform\"".into(),
                    ));
                }
                Ok(NetworkModel::FromFile {
                    path: require(self.path.clone(), "network.path")?,
                    strict_counts: self.strict_counts.unwrap_or(false),
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "network: unknown model \"{other}\" (expected uniform or from_file)"
            ))),
        }
    }
}

/// `model = "standard"` (the default) or `model = "productivity"`; omitted
/// keys keep the built-in defaults.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualitySection {
    pub model: Option<String>,
    pub author_mean: Option<f64>,
    pub author_var: Option<f64>,
    pub paper_noise_var: Option<f64>,
    pub bonus_mean: Option<f64>,
    pub bonus_var: Option<f64>,
    pub per_paper_bonus: Option<bool>,
}

impl QualitySection {
    pub fn to_model(&self) -> Result<QualityModel> {
        let model = self.model.as_deref().unwrap_or("standard");
        match model {
            "standard" => {
                if self.bonus_mean.is_some()
                    || self.bonus_var.is_some()
                    || self.per_paper_bonus.is_some()
                {
                    return Err(Error::InvalidArgument(
                        "quality: bonus keys only apply to model = \"productivity\"".into(),
                    ));
                }
                let QualityModel::Standard {
                    author_mean,
                    author_var,
                    paper_noise_var,
                } = QualityModel::default_standard()
                else {
                    unreachable!()
                };
                Ok(QualityModel::Standard {
                    author_mean: self.author_mean.unwrap_or(author_mean),
                    author_var: self.author_var.unwrap_or(author_var),
                    paper_noise_var: self.paper_noise_var.unwrap_or(paper_noise_var),
                })
            }
            "productivity" => {
                let QualityModel::ProductivityWeighted {
                    author_mean,
                    author_var,
                    paper_noise_var,
                    bonus_mean,
                    bonus_var,
                    per_paper_bonus,
                } = QualityModel::default_productivity()
                else {
                    unreachable!()
                };
                Ok(QualityModel::ProductivityWeighted {
                    author_mean: self.author_mean.unwrap_or(author_mean),
                    author_var: self.author_var.unwrap_or(author_var),
                    paper_noise_var: self.paper_noise_var.unwrap_or(paper_noise_var),
                    bonus_mean: self.bonus_mean.unwrap_or(bonus_mean),
                    bonus_var: self.bonus_var.unwrap_or(bonus_var),
                    per_paper_bonus: self.per_paper_bonus.unwrap_or(per_paper_bonus),
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "quality: unknown model \"{other}\" (expected standard or productivity)"
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub variance: f64,
}

/// Defaults for `select`; command-line flags override these.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub protocol: Option<String>,
    pub quota: Option<usize>,
    pub winners: Option<usize>,
}

/// Grid overrides for `sweep`; omitted keys keep the built-in defaults.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub epsilons: Option<Vec<f64>>,
    pub quotas: Option<Vec<usize>>,
    pub winners: Option<Vec<usize>>,
    pub protocols: Option<Vec<String>>,
    pub rounds: Option<usize>,
    pub redraw_network: Option<bool>,
}

impl SweepSection {
    /// Overlay this section on a default grid for the given models.
    pub fn to_sweep_config(
        &self,
        network: NetworkModel,
        quality: QualityModel,
        master_seed: u64,
    ) -> Result<SweepConfig> {
        let mut cfg = SweepConfig::new(network, quality, master_seed);
        if let Some(e) = &self.epsilons {
            cfg.epsilons = e.clone();
        }
        if let Some(q) = &self.quotas {
            cfg.quotas = q.clone();
        }
        if let Some(w) = &self.winners {
            cfg.winners = w.clone();
        }
        if let Some(p) = &self.protocols {
            cfg.protocols = p.iter().map(|s| Protocol::parse(s)).collect::<Result<_>>()?;
        }
        if let Some(r) = self.rounds {
            cfg.rounds = r;
        }
        if let Some(redraw) = self.redraw_network {
            cfg.redraw_network = redraw;
        }
        Ok(cfg)
    }
}

/// Defaults for `audit`; command-line flags override these.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    pub outcome: Option<String>,
    pub lambda: Option<f64>,
    pub buckets: Option<String>,
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("config key {key} is required")))
}

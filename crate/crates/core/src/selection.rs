//! Award selection protocols.
//!
//! Authors nominate their top `quota` papers; the candidate pool is the
//! union of the nominations. Benchmark ignores all of that and takes the top
//! raw scores over every paper. Blind takes the top adjusted scores over the
//! pool. The informed variants sort the pool by the nominating authors'
//! stated positions first — worst contributing position for the cautious
//! reading, best for the optimistic one — and break ties by adjusted score.
//! All remaining ties go to the lowest paper id, so selection is a total
//! order and deterministic.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::{AuthorRankings, AuthorshipNetwork};
use crate::score::ScoreVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Top raw scores over all papers; rankings are ignored entirely.
    Benchmark,
    /// Top adjusted scores over the nominated pool.
    Blind,
    /// Worst contributing rank first, adjusted score second.
    InformedMax,
    /// Best contributing rank first, adjusted score second.
    InformedMin,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Benchmark => "benchmark",
            Protocol::Blind => "blind",
            Protocol::InformedMax => "informed_max",
            Protocol::InformedMin => "informed_min",
        }
    }

    pub fn parse(s: &str) -> Result<Protocol> {
        match s {
            "benchmark" => Ok(Protocol::Benchmark),
            "blind" => Ok(Protocol::Blind),
            "informed_max" => Ok(Protocol::InformedMax),
            "informed_min" => Ok(Protocol::InformedMin),
            other => Err(Error::invalid(format!(
                "unknown protocol '{other}' (expected benchmark, blind, informed_max, informed_min)"
            ))),
        }
    }
}

/// A protocol with its quota (nominations per author) and number of winners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub protocol: Protocol,
    pub quota: usize,
    pub winners: usize,
}

impl ProtocolSpec {
    pub fn new(protocol: Protocol, quota: usize, winners: usize) -> Result<Self> {
        if quota < 1 {
            return Err(Error::invalid("quota must be at least 1"));
        }
        if winners < 1 {
            return Err(Error::invalid("number of winners must be at least 1"));
        }
        Ok(ProtocolSpec {
            protocol,
            quota,
            winners,
        })
    }
}

/// Sort keys recorded for one selected paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub paper: usize,
    pub raw: f64,
    pub adjusted: f64,
    /// Primary key: raw (benchmark), adjusted (blind), or contributing rank
    /// (informed variants).
    pub key1: f64,
    /// Secondary key where one exists (adjusted score for the informed
    /// variants).
    pub key2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub protocol: Protocol,
    /// Winning papers, best first.
    pub selected: Vec<usize>,
    /// Number of eligible papers the winners were drawn from.
    pub pool_size: usize,
    pub entries: Vec<SelectionEntry>,
}

/// Union of every submitting author's `min(quota, |their papers|)` best
/// papers. Abstaining authors nominate nothing.
pub fn candidate_pool(
    net: &AuthorshipNetwork,
    rankings: &AuthorRankings,
    quota: usize,
) -> Result<BTreeSet<usize>> {
    if quota < 1 {
        return Err(Error::invalid("quota must be at least 1"));
    }
    if rankings.num_authors() != net.num_authors() {
        return Err(Error::invalid(format!(
            "got rankings for {} authors, network has {}",
            rankings.num_authors(),
            net.num_authors()
        )));
    }
    let mut pool = BTreeSet::new();
    for author in 0..net.num_authors() {
        if let Some(order) = rankings.ranking_of(author) {
            pool.extend(order.iter().take(quota).copied());
        }
    }
    Ok(pool)
}

/// Run one protocol. `raw` and `adjusted` are indexed by paper id.
pub fn select(
    spec: &ProtocolSpec,
    net: &AuthorshipNetwork,
    rankings: &AuthorRankings,
    raw: &ScoreVector,
    adjusted: &ScoreVector,
) -> Result<SelectionResult> {
    ProtocolSpec::new(spec.protocol, spec.quota, spec.winners)?;
    if raw.len() != net.num_papers() || adjusted.len() != net.num_papers() {
        return Err(Error::invalid(format!(
            "scores must cover all {} papers",
            net.num_papers()
        )));
    }

    let descending =
        |a: f64, b: f64| b.partial_cmp(&a).expect("scores are finite by construction");

    let (candidates, pool_size): (Vec<usize>, usize) = if spec.protocol == Protocol::Benchmark {
        ((0..net.num_papers()).collect(), net.num_papers())
    } else {
        let pool = candidate_pool(net, rankings, spec.quota)?;
        let size = pool.len();
        (pool.into_iter().collect(), size)
    };
    if spec.winners > pool_size {
        return Err(Error::invalid(format!(
            "cannot pick {} winners from {} eligible papers",
            spec.winners, pool_size
        )));
    }

    let mut order = candidates;
    match spec.protocol {
        Protocol::Benchmark => {
            order.sort_by(|&p, &q| descending(raw[p], raw[q]).then(p.cmp(&q)));
        }
        Protocol::Blind => {
            order.sort_by(|&p, &q| descending(adjusted[p], adjusted[q]).then(p.cmp(&q)));
        }
        Protocol::InformedMax | Protocol::InformedMin => {
            let key: Vec<usize> = order
                .iter()
                .map(|&p| contributing_rank(net, rankings, spec, p))
                .collect();
            let rank_of: std::collections::BTreeMap<usize, usize> =
                order.iter().copied().zip(key).collect();
            order.sort_by(|&p, &q| {
                rank_of[&p]
                    .cmp(&rank_of[&q])
                    .then(descending(adjusted[p], adjusted[q]))
                    .then(p.cmp(&q))
            });
        }
    }
    order.truncate(spec.winners);

    let entries = order
        .iter()
        .map(|&p| {
            let (key1, key2) = match spec.protocol {
                Protocol::Benchmark => (raw[p], None),
                Protocol::Blind => (adjusted[p], None),
                Protocol::InformedMax | Protocol::InformedMin => (
                    contributing_rank(net, rankings, spec, p) as f64,
                    Some(adjusted[p]),
                ),
            };
            SelectionEntry {
                paper: p,
                raw: raw[p],
                adjusted: adjusted[p],
                key1,
                key2,
            }
        })
        .collect();

    Ok(SelectionResult {
        protocol: spec.protocol,
        selected: order,
        pool_size,
        entries,
    })
}

/// Worst (max) or best (min) 1-based position of `paper` among the authors
/// who placed it within their quota. Pool membership guarantees at least one
/// such author.
fn contributing_rank(
    net: &AuthorshipNetwork,
    rankings: &AuthorRankings,
    spec: &ProtocolSpec,
    paper: usize,
) -> usize {
    let positions = net.authors_of(paper).iter().filter_map(|&a| {
        rankings
            .rank_of(a, paper)
            .filter(|&r| r <= spec.quota)
    });
    match spec.protocol {
        Protocol::InformedMax => positions.max(),
        _ => positions.min(),
    }
    .expect("pool members have a contributing author")
}

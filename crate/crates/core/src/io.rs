//! CSV input/output.
//!
//! Files use arbitrary (possibly sparse, possibly 1-based) integer ids;
//! everything in memory is densely 0-indexed. [`IdMap`] records the
//! correspondence so outputs can speak the caller's ids again. External ids
//! are densified in ascending numeric order, which keeps all id-based
//! tie-breaking consistent between the file view and the in-memory view.
//!
//! All parse errors carry a 1-based line number that counts the header row.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use csv::StringRecord;

use crate::audit::{EmpiricalCurve, OutcomeTier, ReviewRecord};
use crate::error::{Error, Result};
use crate::mechanism::{AdjustedScores, Partition};
use crate::network::{AuthorRankings, AuthorshipNetwork};
use crate::score::ScoreVector;
use crate::selection::SelectionResult;
use crate::simlab::SweepResult;

/// Dense 0-based internal ids for a set of external integer ids, assigned
/// in ascending external order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    to_internal: BTreeMap<u64, usize>,
    to_external: Vec<u64>,
}

impl IdMap {
    pub fn from_ids(ids: impl IntoIterator<Item = u64>) -> IdMap {
        let set: BTreeSet<u64> = ids.into_iter().collect();
        let to_external: Vec<u64> = set.into_iter().collect();
        let to_internal = to_external
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        IdMap {
            to_internal,
            to_external,
        }
    }

    /// `count` consecutive external ids starting at `base` (internal i ↔
    /// external base + i). Used when exporting generated data.
    pub fn sequential(count: usize, base: u64) -> IdMap {
        IdMap::from_ids((0..count as u64).map(|i| base + i))
    }

    pub fn internal(&self, external: u64) -> Option<usize> {
        self.to_internal.get(&external).copied()
    }

    pub fn external(&self, internal: usize) -> u64 {
        self.to_external[internal]
    }

    pub fn len(&self) -> usize {
        self.to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_external.is_empty()
    }
}

/// The two id maps belonging to one authorship network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkIds {
    pub papers: IdMap,
    pub authors: IdMap,
}

impl NetworkIds {
    /// 1-based consecutive ids, the convention for generated conferences.
    pub fn sequential(num_papers: usize, num_authors: usize) -> NetworkIds {
        NetworkIds {
            papers: IdMap::sequential(num_papers, 1),
            authors: IdMap::sequential(num_authors, 1),
        }
    }
}

fn from_csv(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    let message = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        _ => Error::parse(line, message),
    }
}

fn reader(path: &Path, expected_header: &[&str]) -> Result<csv::Reader<std::fs::File>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(from_csv)?;
    let headers = rdr.headers().map_err(from_csv)?;
    if headers.iter().collect::<Vec<_>>() != expected_header {
        return Err(Error::parse(
            1,
            format!(
                "expected header '{}', found '{}'",
                expected_header.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(rdr)
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(from_csv)
}

fn line_of(record: &StringRecord) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(0)
}

fn field<T: FromStr>(record: &StringRecord, index: usize, name: &str) -> Result<T> {
    let raw = record.get(index).ok_or_else(|| {
        Error::parse(line_of(record), format!("missing column '{name}'"))
    })?;
    raw.parse().map_err(|_| {
        Error::parse(
            line_of(record),
            format!("cannot parse '{raw}' as {name}"),
        )
    })
}

/// Read an authorship network from `paper_id,author_id` edge rows.
pub fn read_network_csv(path: &Path) -> Result<(AuthorshipNetwork, NetworkIds)> {
    let mut rdr = reader(path, &["paper_id", "author_id"])?;
    let mut edges: Vec<(u64, u64)> = Vec::new();
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let paper: u64 = field(&record, 0, "paper_id")?;
        let author: u64 = field(&record, 1, "author_id")?;
        if !seen.insert((paper, author)) {
            return Err(Error::parse(
                line_of(&record),
                format!("duplicate edge: paper {paper}, author {author}"),
            ));
        }
        edges.push((paper, author));
    }
    if edges.is_empty() {
        return Err(Error::parse(1, "network file has no edges"));
    }
    let papers = IdMap::from_ids(edges.iter().map(|&(p, _)| p));
    let authors = IdMap::from_ids(edges.iter().map(|&(_, a)| a));
    let mut papers_by_author: Vec<Vec<usize>> = vec![Vec::new(); authors.len()];
    for &(p, a) in &edges {
        papers_by_author[authors.internal(a).expect("author was indexed")]
            .push(papers.internal(p).expect("paper was indexed"));
    }
    let network = AuthorshipNetwork::from_ownership(papers.len(), papers_by_author)?;
    Ok((network, NetworkIds { papers, authors }))
}

pub fn write_network_csv(path: &Path, net: &AuthorshipNetwork, ids: &NetworkIds) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["paper_id", "author_id"]).map_err(from_csv)?;
    for paper in 0..net.num_papers() {
        for &author in net.authors_of(paper) {
            w.write_record([
                ids.papers.external(paper).to_string(),
                ids.authors.external(author).to_string(),
            ])
            .map_err(from_csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read per-author rankings from `author_id,paper_id,rank` rows. Rank 1 is
/// the author's best paper; each submitting author must rank every one of
/// their papers exactly once. Authors with no rows abstain.
pub fn read_rankings_csv(
    path: &Path,
    net: &AuthorshipNetwork,
    ids: &NetworkIds,
) -> Result<AuthorRankings> {
    let mut rdr = reader(path, &["author_id", "paper_id", "rank"])?;
    // author -> rank -> paper, catching duplicates as we go.
    let mut by_author: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let author_ext: u64 = field(&record, 0, "author_id")?;
        let paper_ext: u64 = field(&record, 1, "paper_id")?;
        let rank: usize = field(&record, 2, "rank")?;
        let author = ids.authors.internal(author_ext).ok_or_else(|| {
            Error::parse(line_of(&record), format!("unknown author id {author_ext}"))
        })?;
        let paper = ids.papers.internal(paper_ext).ok_or_else(|| {
            Error::parse(line_of(&record), format!("unknown paper id {paper_ext}"))
        })?;
        if rank == 0 {
            return Err(Error::parse(line_of(&record), "ranks are 1-based"));
        }
        match by_author.entry(author).or_default().entry(rank) {
            Entry::Vacant(slot) => {
                slot.insert(paper);
            }
            Entry::Occupied(_) => {
                return Err(Error::parse(
                    line_of(&record),
                    format!("author {author_ext} lists rank {rank} twice (ties are not allowed)"),
                ));
            }
        }
    }
    let mut rankings: Vec<Option<Vec<usize>>> = vec![None; net.num_authors()];
    for (author, ranked) in by_author {
        let m = ranked.len();
        if ranked.keys().copied().ne(1..=m) {
            return Err(Error::invalid(format!(
                "author {} must use ranks 1..{} exactly, got {:?}",
                ids.authors.external(author),
                m,
                ranked.keys().collect::<Vec<_>>()
            )));
        }
        rankings[author] = Some(ranked.into_values().collect());
    }
    AuthorRankings::new(net, rankings)
}

pub fn write_rankings_csv(
    path: &Path,
    rankings: &AuthorRankings,
    ids: &NetworkIds,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["author_id", "paper_id", "rank"]).map_err(from_csv)?;
    for author in 0..rankings.num_authors() {
        if let Some(order) = rankings.ranking_of(author) {
            for (i, &paper) in order.iter().enumerate() {
                w.write_record([
                    ids.authors.external(author).to_string(),
                    ids.papers.external(paper).to_string(),
                    (i + 1).to_string(),
                ])
                .map_err(from_csv)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read one score per paper from `paper_id,score` rows; every paper in the
/// network must appear exactly once.
pub fn read_scores_csv(
    path: &Path,
    net: &AuthorshipNetwork,
    ids: &NetworkIds,
) -> Result<ScoreVector> {
    let mut rdr = reader(path, &["paper_id", "score"])?;
    let mut scores: Vec<Option<f64>> = vec![None; net.num_papers()];
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let paper_ext: u64 = field(&record, 0, "paper_id")?;
        let score: f64 = field(&record, 1, "score")?;
        let paper = ids.papers.internal(paper_ext).ok_or_else(|| {
            Error::parse(line_of(&record), format!("unknown paper id {paper_ext}"))
        })?;
        if scores[paper].replace(score).is_some() {
            return Err(Error::parse(
                line_of(&record),
                format!("paper {paper_ext} scored twice"),
            ));
        }
    }
    if let Some(missing) = scores.iter().position(|s| s.is_none()) {
        return Err(Error::invalid(format!(
            "paper {} has no score",
            ids.papers.external(missing)
        )));
    }
    ScoreVector::new(scores.into_iter().map(|s| s.expect("checked")).collect())
}

pub fn write_scores_csv(path: &Path, scores: &ScoreVector, ids: &NetworkIds) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["paper_id", "score"]).map_err(from_csv)?;
    for (paper, &score) in scores.values().iter().enumerate() {
        w.write_record([ids.papers.external(paper).to_string(), score.to_string()])
            .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_adjusted_csv(
    path: &Path,
    raw: &ScoreVector,
    adjusted: &AdjustedScores,
    ids: &NetworkIds,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["paper_id", "raw", "adjusted", "modified"]).map_err(from_csv)?;
    for paper in 0..raw.len() {
        w.write_record([
            ids.papers.external(paper).to_string(),
            raw[paper].to_string(),
            adjusted.values[paper].to_string(),
            adjusted.modified[paper].to_string(),
        ])
        .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a previously written adjusted-scores file.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedRow {
    pub paper_id: u64,
    pub raw: f64,
    pub adjusted: f64,
    pub modified: bool,
}

pub fn read_adjusted_csv(path: &Path) -> Result<Vec<AdjustedRow>> {
    let mut rdr = reader(path, &["paper_id", "raw", "adjusted", "modified"])?;
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let row = AdjustedRow {
            paper_id: field(&record, 0, "paper_id")?,
            raw: field(&record, 1, "raw")?,
            adjusted: field(&record, 2, "adjusted")?,
            modified: field(&record, 3, "modified")?,
        };
        if !seen.insert(row.paper_id) {
            return Err(Error::parse(
                line_of(&record),
                format!("paper {} appears twice", row.paper_id),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Write the partition sidecars: block membership (`block_id,paper_id`) and
/// block ownership (`block_id,owner_author_id`). Block ids are 1-based in
/// the files.
pub fn write_partition_csvs(
    blocks_path: &Path,
    owners_path: &Path,
    partition: &Partition,
    ids: &NetworkIds,
) -> Result<()> {
    let mut w = writer(blocks_path)?;
    w.write_record(["block_id", "paper_id"]).map_err(from_csv)?;
    for b in 0..partition.num_blocks() {
        for &paper in partition.block(b) {
            w.write_record([(b + 1).to_string(), ids.papers.external(paper).to_string()])
                .map_err(from_csv)?;
        }
    }
    w.flush()?;

    let mut w = writer(owners_path)?;
    w.write_record(["block_id", "owner_author_id"]).map_err(from_csv)?;
    for b in 0..partition.num_blocks() {
        for &author in partition.owners(b) {
            w.write_record([(b + 1).to_string(), ids.authors.external(author).to_string()])
                .map_err(from_csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_selection_csv(
    path: &Path,
    result: &SelectionResult,
    ids: &NetworkIds,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "protocol",
        "rank",
        "paper_id",
        "raw_score",
        "adjusted_score",
        "key1",
        "key2",
    ])
    .map_err(from_csv)?;
    for (i, entry) in result.entries.iter().enumerate() {
        w.write_record([
            result.protocol.name().to_string(),
            (i + 1).to_string(),
            ids.papers.external(entry.paper).to_string(),
            entry.raw.to_string(),
            entry.adjusted.to_string(),
            entry.key1.to_string(),
            entry.key2.map(|k| k.to_string()).unwrap_or_default(),
        ])
        .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["epsilon", "k", "F", "protocol", "mean_norm_quality", "sem", "rounds"])
        .map_err(from_csv)?;
    for cell in &result.cells {
        w.write_record([
            cell.epsilon.to_string(),
            cell.quota.to_string(),
            cell.winners.to_string(),
            cell.protocol.name().to_string(),
            cell.mean_norm_quality.to_string(),
            cell.sem.to_string(),
            cell.rounds.to_string(),
        ])
        .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

/// Read historical outcome records. An empty outcome field means the paper
/// was scored but never decided, which counts as rejected.
pub fn read_records_csv(path: &Path) -> Result<Vec<ReviewRecord>> {
    let mut rdr = reader(
        path,
        &["paper_id", "score", "outcome", "year", "scale_lo", "scale_hi"],
    )?;
    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv)?;
        let outcome_raw = record.get(2).unwrap_or_default();
        let outcome = if outcome_raw.is_empty() {
            OutcomeTier::Rejected
        } else {
            OutcomeTier::parse(outcome_raw)
                .map_err(|e| Error::parse(line_of(&record), e.to_string()))?
        };
        let parsed = ReviewRecord::new(
            field(&record, 0, "paper_id")?,
            field(&record, 1, "score")?,
            outcome,
            record.get(3).unwrap_or_default(),
            field(&record, 4, "scale_lo")?,
            field(&record, 5, "scale_hi")?,
        )
        .map_err(|e| Error::parse(line_of(&record), e.to_string()))?;
        records.push(parsed);
    }
    Ok(records)
}

pub fn write_curve_csv(path: &Path, curve: &EmpiricalCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["bucket_lo", "bucket_hi", "n", "p", "sem"]).map_err(from_csv)?;
    for b in &curve.buckets {
        w.write_record([
            b.lo.to_string(),
            b.hi.to_string(),
            b.n.to_string(),
            b.p.map(|p| p.to_string()).unwrap_or_default(),
            b.sem.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

/// Export ground truth next to observed reviews for a generated conference.
pub fn write_truth_csv(
    path: &Path,
    quality: &ScoreVector,
    reviews: &ScoreVector,
    ids: &NetworkIds,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["paper_id", "true_quality", "review_score"]).map_err(from_csv)?;
    for paper in 0..quality.len() {
        w.write_record([
            ids.papers.external(paper).to_string(),
            quality[paper].to_string(),
            reviews[paper].to_string(),
        ])
        .map_err(from_csv)?;
    }
    w.flush()?;
    Ok(())
}

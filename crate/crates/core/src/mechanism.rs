//! Owner-calibrated score adjustment.
//!
//! Multi-author papers make per-author isotonic projection ill-posed: an
//! author may only rank papers they own, and different authors own
//! overlapping sets. The mechanism first partitions the papers into blocks
//! such that each block lies entirely inside at least one author's set
//! (greedily taking the author covering the most not-yet-covered papers),
//! then projects each block's raw scores onto every full owner's restricted
//! ranking and averages the projections with equal weight.
//!
//! Owners who abstained are left out of the average; a block all of whose
//! owners abstained passes through unadjusted and is flagged.

use crate::error::{Error, Result};
use crate::isotonic::project_onto_ranking;
use crate::network::{AuthorRankings, AuthorshipNetwork};
use crate::score::{Ranking, ScoreVector};

/// A score counts as modified when it moved by more than this.
pub const MODIFIED_TOLERANCE: f64 = 1e-9;

/// Disjoint cover of all papers by fully-owned blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    owners: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Papers of one block, sorted ascending.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// Authors owning *every* paper of block `i`, sorted ascending. Never
    /// empty: the author whose set spawned the block is always a full owner.
    pub fn owners(&self, i: usize) -> &[usize] {
        &self.owners[i]
    }

    pub fn block_of(&self, paper: usize) -> usize {
        self.block_of[paper]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Greedily cover the papers: each step takes the author with the most
/// uncovered papers (ties to the lowest author id) and turns their uncovered
/// papers into a block. Block sizes are non-increasing by construction.
pub fn greedy_partition(net: &AuthorshipNetwork) -> Partition {
    let n = net.num_papers();
    let m = net.num_authors();
    let mut covered = vec![false; n];
    let mut uncovered_count: Vec<usize> = (0..m).map(|a| net.papers_of(a).len()).collect();
    let mut num_covered = 0;

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut owners: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];

    while num_covered < n {
        let mut best = 0;
        for a in 1..m {
            if uncovered_count[a] > uncovered_count[best] {
                best = a;
            }
        }
        // Every paper has an owner, so some author still covers new ground.
        debug_assert!(uncovered_count[best] > 0);

        let block: Vec<usize> = net
            .papers_of(best)
            .iter()
            .copied()
            .filter(|&p| !covered[p])
            .collect();
        let idx = blocks.len();
        for &p in &block {
            covered[p] = true;
            block_of[p] = idx;
            for &a in net.authors_of(p) {
                uncovered_count[a] -= 1;
            }
        }
        num_covered += block.len();

        // Full owners: authors present on every paper of the block.
        let mut full: Vec<usize> = net.authors_of(block[0]).to_vec();
        for &p in &block[1..] {
            let here = net.authors_of(p);
            full.retain(|a| here.binary_search(a).is_ok());
        }
        blocks.push(block);
        owners.push(full);
    }

    Partition {
        blocks,
        owners,
        block_of,
    }
}

/// Raw scores moved toward the owners' rankings, block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedScores {
    /// One adjusted score per paper.
    pub values: ScoreVector,
    /// Papers whose score moved by more than [`MODIFIED_TOLERANCE`].
    pub modified: Vec<bool>,
    /// Blocks left untouched because every full owner abstained.
    pub passthrough_blocks: Vec<usize>,
}

/// Project each block onto each submitting full owner's restricted ranking
/// and average the projections.
pub fn adjusted_scores(
    net: &AuthorshipNetwork,
    rankings: &AuthorRankings,
    raw: &ScoreVector,
    partition: &Partition,
) -> Result<AdjustedScores> {
    if raw.len() != net.num_papers() {
        return Err(Error::invalid(format!(
            "got {} scores for {} papers",
            raw.len(),
            net.num_papers()
        )));
    }
    if rankings.num_authors() != net.num_authors() {
        return Err(Error::invalid(format!(
            "got rankings for {} authors, network has {}",
            rankings.num_authors(),
            net.num_authors()
        )));
    }
    if partition.block_of.len() != net.num_papers() {
        return Err(Error::invalid("partition does not match the network"));
    }

    let mut values = raw.values().to_vec();
    let mut modified = vec![false; raw.len()];
    let mut passthrough_blocks = Vec::new();

    for (idx, block) in partition.blocks.iter().enumerate() {
        let submitting: Vec<usize> = partition.owners[idx]
            .iter()
            .copied()
            .filter(|&a| rankings.ranking_of(a).is_some())
            .collect();
        if submitting.is_empty() {
            passthrough_blocks.push(idx);
            continue;
        }

        let block_raw =
            ScoreVector::new(block.iter().map(|&p| raw[p]).collect()).expect("blocks non-empty");
        let mut sum = vec![0.0; block.len()];
        for &owner in &submitting {
            // The owner's list restricted to this block, best first, as
            // positions into the (ascending) block layout.
            let local: Vec<usize> = rankings
                .ranking_of(owner)
                .expect("filtered to submitters")
                .iter()
                .filter_map(|p| block.binary_search(p).ok())
                .collect();
            let ranking = Ranking::new(local).expect("full owner ranks every block paper");
            let projected = project_onto_ranking(&block_raw, &ranking)?;
            for (s, v) in sum.iter_mut().zip(projected.values()) {
                *s += v;
            }
        }
        let weight = submitting.len() as f64;
        for (slot, &p) in block.iter().enumerate() {
            let adjusted = sum[slot] / weight;
            modified[p] = (adjusted - raw[p]).abs() > MODIFIED_TOLERANCE;
            values[p] = adjusted;
        }
    }

    Ok(AdjustedScores {
        values: ScoreVector::new(values).expect("averages of finite scores are finite"),
        modified,
        passthrough_blocks,
    })
}

/// Share of papers whose score the adjustment actually moved.
pub fn fraction_modified(adjusted: &AdjustedScores) -> f64 {
    adjusted.modified.iter().filter(|&&m| m).count() as f64 / adjusted.modified.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three overlapping author sets over twelve papers: {0..5}, {4..9},
    /// {8..11}; raw score of paper p is p + 1; every author ranks their set
    /// by descending latent quality 12 - p, i.e. exactly opposite the raw
    /// scores.
    fn overlapping_fixture() -> (AuthorshipNetwork, AuthorRankings, ScoreVector) {
        let net = AuthorshipNetwork::from_ownership(
            12,
            vec![
                (0..6).collect(),
                (4..10).collect(),
                (8..12).collect(),
            ],
        )
        .unwrap();
        let rankings = AuthorRankings::complete(
            &net,
            vec![(0..6).collect(), (4..10).collect(), (8..12).collect()],
        )
        .unwrap();
        let raw = ScoreVector::new((0..12).map(|p| (p + 1) as f64).collect()).unwrap();
        (net, rankings, raw)
    }

    #[test]
    fn greedy_partition_on_overlapping_sets() {
        let (net, _, _) = overlapping_fixture();
        let part = greedy_partition(&net);
        assert_eq!(part.num_blocks(), 3);
        assert_eq!(part.block(0), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(part.block(1), &[6, 7, 8, 9]);
        assert_eq!(part.block(2), &[10, 11]);
        assert_eq!(part.owners(0), &[0]);
        assert_eq!(part.owners(1), &[1]);
        assert_eq!(part.owners(2), &[2]);
        assert_eq!(part.block_of(5), 0);
        assert_eq!(part.block_of(6), 1);
        // Greedy block sizes never increase.
        for w in part.blocks().windows(2) {
            assert!(w[0].len() >= w[1].len());
        }
    }

    #[test]
    fn disjoint_sets_become_their_own_blocks() {
        let net =
            AuthorshipNetwork::from_ownership(4, vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        let part = greedy_partition(&net);
        assert_eq!(part.num_blocks(), 3);
        assert_eq!(part.block(0), &[0, 1]);
        // Singleton ties resolve to the lower author id.
        assert_eq!(part.block(1), &[2]);
        assert_eq!(part.block(2), &[3]);
    }

    #[test]
    fn single_author_owning_everything_is_one_block() {
        let net = AuthorshipNetwork::from_ownership(3, vec![vec![0, 1, 2]]).unwrap();
        let part = greedy_partition(&net);
        assert_eq!(part.num_blocks(), 1);
        assert_eq!(part.owners(0), &[0]);
    }

    #[test]
    fn adjustment_flattens_each_block_to_its_mean() {
        let (net, rankings, raw) = overlapping_fixture();
        let part = greedy_partition(&net);
        let adj = adjusted_scores(&net, &rankings, &raw, &part).unwrap();
        let expected = [3.5, 3.5, 3.5, 3.5, 3.5, 3.5, 8.5, 8.5, 8.5, 8.5, 11.5, 11.5];
        assert_eq!(adj.values.values(), &expected);
        assert!(adj.modified.iter().all(|&m| m));
        assert_eq!(fraction_modified(&adj), 1.0);
        assert!(adj.passthrough_blocks.is_empty());
        // Sum preserved within each block.
        assert!((adj.values.sum() - raw.sum()).abs() < 1e-9);
    }

    #[test]
    fn consistent_rankings_change_nothing() {
        let net = AuthorshipNetwork::from_ownership(3, vec![vec![0, 1, 2]]).unwrap();
        let raw = ScoreVector::new(vec![9.0, 5.0, 2.0]).unwrap();
        let rankings = AuthorRankings::complete(&net, vec![vec![0, 1, 2]]).unwrap();
        let part = greedy_partition(&net);
        let adj = adjusted_scores(&net, &rankings, &raw, &part).unwrap();
        assert_eq!(adj.values.values(), raw.values());
        assert_eq!(fraction_modified(&adj), 0.0);
    }

    #[test]
    fn co_owners_projections_are_averaged() {
        // Two authors share the same two papers but disagree on the order.
        let net = AuthorshipNetwork::from_ownership(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let raw = ScoreVector::new(vec![1.0, 3.0]).unwrap();
        let rankings =
            AuthorRankings::complete(&net, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let part = greedy_partition(&net);
        assert_eq!(part.owners(0), &[0, 1]);
        let adj = adjusted_scores(&net, &rankings, &raw, &part).unwrap();
        // Author 0 pools to (2,2); author 1 agrees with the raw order.
        assert_eq!(adj.values.values(), &[1.5, 2.5]);
    }

    #[test]
    fn abstaining_owner_drops_out_of_the_average() {
        let net = AuthorshipNetwork::from_ownership(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let raw = ScoreVector::new(vec![1.0, 3.0]).unwrap();
        let rankings =
            AuthorRankings::new(&net, vec![Some(vec![0, 1]), None]).unwrap();
        let part = greedy_partition(&net);
        let adj = adjusted_scores(&net, &rankings, &raw, &part).unwrap();
        assert_eq!(adj.values.values(), &[2.0, 2.0]);
        assert!(adj.passthrough_blocks.is_empty());
    }

    #[test]
    fn fully_abstained_block_passes_through_flagged() {
        let net = AuthorshipNetwork::from_ownership(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let raw = ScoreVector::new(vec![1.0, 3.0]).unwrap();
        let rankings = AuthorRankings::new(&net, vec![None, None]).unwrap();
        let part = greedy_partition(&net);
        let adj = adjusted_scores(&net, &rankings, &raw, &part).unwrap();
        assert_eq!(adj.values.values(), raw.values());
        assert_eq!(adj.passthrough_blocks, vec![0]);
        assert_eq!(fraction_modified(&adj), 0.0);
    }

    #[test]
    fn adjustment_validates_shapes() {
        let (net, rankings, _) = overlapping_fixture();
        let part = greedy_partition(&net);
        let short = ScoreVector::new(vec![1.0; 5]).unwrap();
        assert!(adjusted_scores(&net, &rankings, &short, &part).is_err());
    }
}

//! Randomized invariant checks for the library's algebraic guts: the
//! isotonic projection, the majorization toolkit, utilities, and the
//! partition/adjustment pipeline.

mod common;

use common::oracle_descending_projection;
use proptest::prelude::*;

#[test]
fn oracle_handles_known_cases() {
    assert_eq!(oracle_descending_projection(&[5.0]), vec![5.0]);
    assert_eq!(oracle_descending_projection(&[3.0, 2.0, 1.0]), vec![3.0, 2.0, 1.0]);
    assert_eq!(oracle_descending_projection(&[1.0, 2.0]), vec![1.5, 1.5]);
    assert_eq!(
        oracle_descending_projection(&[5.0, 3.0, 4.0, 1.0]),
        vec![5.0, 3.5, 3.5, 1.0]
    );
}

use isomech::isotonic::{pava_descending, project_onto_ranking};
use isomech::majorization::{apply_chain, majorizes, t_transform, t_transform_chain};
use isomech::mechanism::{adjusted_scores, greedy_partition};
use isomech::network::AuthorshipNetwork;
use isomech::selection::candidate_pool;
use isomech::synthesis::truthful_rankings;
use isomech::utility::top_k_sum;
use isomech::{Ranking, ScoreVector};

fn scores(max_len: usize) -> impl Strategy<Value = ScoreVector> {
    prop::collection::vec(-50.0f64..50.0, 1..=max_len)
        .prop_map(|v| ScoreVector::new(v).expect("finite by construction"))
}

/// Scores with heavy ties, to stress block merging and coalescing.
fn tied_scores(max_len: usize) -> impl Strategy<Value = ScoreVector> {
    prop::collection::vec(-3i32..=3, 1..=max_len)
        .prop_map(|v| ScoreVector::new(v.into_iter().map(f64::from).collect()).expect("finite"))
}

/// A small random network: every paper gets at least one author.
fn network() -> impl Strategy<Value = AuthorshipNetwork> {
    (1usize..=5, 1usize..=8).prop_flat_map(|(num_authors, num_papers)| {
        prop::collection::vec(
            prop::collection::btree_set(0..num_authors, 1..=num_authors.min(3)),
            num_papers,
        )
        .prop_map(move |authors_per_paper| {
            let mut papers_by_author = vec![Vec::new(); num_authors];
            for (paper, authors) in authors_per_paper.iter().enumerate() {
                for &a in authors {
                    papers_by_author[a].push(paper);
                }
            }
            AuthorshipNetwork::from_ownership(num_papers, papers_by_author)
                .expect("constructed networks are valid")
        })
    })
}

proptest! {
    #[test]
    fn pava_output_is_descending_and_sum_preserving(y in scores(10)) {
        let fit = pava_descending(&y);
        prop_assert!(fit.fitted.is_descending());
        prop_assert!((fit.fitted.sum() - y.sum()).abs() <= 1e-9);
        // Fitted values stay inside the hull of the data.
        let lo = y.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(fit.fitted.values().iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn pava_is_idempotent(y in scores(10)) {
        let once = pava_descending(&y);
        let twice = pava_descending(&once.fitted);
        prop_assert_eq!(once.fitted.values(), twice.fitted.values());
    }

    #[test]
    fn pava_blocks_tile_the_range_with_strictly_decreasing_means(y in tied_scores(10)) {
        let fit = pava_descending(&y);
        let mut expected_start = 0;
        for (i, &(start, end)) in fit.blocks.iter().enumerate() {
            prop_assert_eq!(start, expected_start);
            prop_assert!(end > start);
            expected_start = end;
            if i > 0 {
                prop_assert!(fit.block_means[i - 1] > fit.block_means[i]);
            }
        }
        prop_assert_eq!(expected_start, y.len());
    }

    #[test]
    fn pava_matches_the_exhaustive_oracle(y in scores(8), ties in tied_scores(8)) {
        for v in [&y, &ties] {
            let fast = pava_descending(v);
            let slow = oracle_descending_projection(v.values());
            for (a, b) in fast.fitted.values().iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-9, "fast {:?} vs oracle {:?}", fast.fitted, slow);
            }
        }
    }

    #[test]
    fn raw_scores_majorize_their_isotonic_fit(y in scores(10)) {
        let fit = pava_descending(&y);
        prop_assert!(majorizes(&y, &fit.fitted).unwrap());
    }

    #[test]
    fn ranking_projection_is_monotone_along_the_ranking(y in scores(8)) {
        let n = y.len();
        let order: Vec<usize> = (0..n).rev().collect();
        let pi = Ranking::new(order).unwrap();
        let out = project_onto_ranking(&y, &pi).unwrap();
        let along: Vec<f64> = pi.order().iter().map(|&p| out[p]).collect();
        prop_assert!(along.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((out.sum() - y.sum()).abs() <= 1e-9);
        // Projecting again changes nothing: the output already obeys pi.
        let again = project_onto_ranking(&out, &pi).unwrap();
        for (a, b) in out.values().iter().zip(again.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn transform_chains_replay_and_stay_ordered(
        x in scores(7),
        steps in prop::collection::vec((0usize..7, 0usize..7, 0.0f64..=1.0), 0..6),
    ) {
        // Build b from a by mean-preserving transforms, so a ≽ b holds by
        // construction.
        let a = x;
        let mut b = a.clone();
        for (i, j, lambda) in steps {
            let (i, j) = (i % a.len(), j % a.len());
            if i != j {
                b = t_transform(&b, i, j, lambda).unwrap();
            }
        }
        prop_assert!(majorizes(&a, &b).unwrap());

        let chain = t_transform_chain(&a, &b).unwrap();
        let replayed = apply_chain(&a, &chain).unwrap();
        for (r, t) in replayed.values().iter().zip(b.values()) {
            prop_assert!((r - t).abs() <= 1e-7, "replayed {replayed:?} target {b:?}");
        }
        // Every intermediate sits between the endpoints in majorization order.
        let mut cur = a.clone();
        for step in &chain {
            cur = t_transform(&cur, step.i, step.j, step.lambda).unwrap();
            prop_assert!(majorizes(&a, &cur).unwrap());
            prop_assert!(majorizes(&cur, &b).unwrap());
        }
    }

    #[test]
    fn top_k_sum_is_schur_convex(
        x in scores(8),
        k in 1usize..=8,
        steps in prop::collection::vec((0usize..8, 0usize..8, 0.0f64..=1.0), 1..5),
    ) {
        let k = k.min(x.len());
        let mut squeezed = x.clone();
        for (i, j, lambda) in steps {
            let (i, j) = (i % x.len(), j % x.len());
            if i != j {
                squeezed = t_transform(&squeezed, i, j, lambda).unwrap();
            }
        }
        prop_assert!(top_k_sum(&x, k).unwrap() >= top_k_sum(&squeezed, k).unwrap() - 1e-9);
    }

    #[test]
    fn permuted_scores_still_majorize_after_projection(y in scores(8), seed in any::<u64>()) {
        // The same multiset reported in the true order versus any other
        // order: the true order's fit majorizes the alternative's.
        let mut sorted = y.values().to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let truthful = ScoreVector::new(sorted.clone()).unwrap();
        let mut rng_order: Vec<usize> = (0..y.len()).collect();
        // Cheap deterministic shuffle from the seed.
        for i in (1..rng_order.len()).rev() {
            rng_order.swap(i, (seed as usize).wrapping_mul(i + 1) % (i + 1));
        }
        let permuted =
            ScoreVector::new(rng_order.iter().map(|&i| sorted[i]).collect()).unwrap();
        let a = pava_descending(&truthful).fitted;
        let b = pava_descending(&permuted).fitted;
        prop_assert!(majorizes(&a, &b).unwrap());
    }

    #[test]
    fn greedy_partition_tiles_papers_with_nonempty_owners(net in network()) {
        let partition = greedy_partition(&net);
        let mut seen = vec![false; net.num_papers()];
        for b in 0..partition.num_blocks() {
            prop_assert!(!partition.block(b).is_empty());
            prop_assert!(!partition.owners(b).is_empty());
            for &p in partition.block(b) {
                prop_assert!(!seen[p], "paper {p} in two blocks");
                seen[p] = true;
                prop_assert_eq!(partition.block_of(p), b);
            }
            // Every owner owns every paper of the block.
            for &o in partition.owners(b) {
                for &p in partition.block(b) {
                    prop_assert!(net.papers_of(o).contains(&p));
                }
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn adjustment_preserves_block_sums(net in network(), seed in any::<u64>()) {
        let n = net.num_papers();
        let quality = ScoreVector::new(
            (0..n).map(|p| ((seed.rotate_left(p as u32) % 1000) as f64) / 100.0).collect(),
        )
        .unwrap();
        let raw = ScoreVector::new(
            (0..n).map(|p| ((seed.rotate_right(p as u32 + 7) % 1000) as f64) / 100.0).collect(),
        )
        .unwrap();
        let rankings = truthful_rankings(&net, &quality);
        let partition = greedy_partition(&net);
        let adjusted = adjusted_scores(&net, &rankings, &raw, &partition).unwrap();
        for b in 0..partition.num_blocks() {
            let raw_sum: f64 = partition.block(b).iter().map(|&p| raw[p]).sum();
            let adj_sum: f64 = partition.block(b).iter().map(|&p| adjusted.values[p]).sum();
            prop_assert!((raw_sum - adj_sum).abs() <= 1e-9);
        }
    }

    #[test]
    fn candidate_pool_grows_with_the_quota(net in network(), seed in any::<u64>()) {
        let n = net.num_papers();
        let quality = ScoreVector::new(
            (0..n).map(|p| ((seed ^ (p as u64 * 0x9E37)) % 997) as f64).collect(),
        )
        .unwrap();
        let rankings = truthful_rankings(&net, &quality);
        let mut previous = candidate_pool(&net, &rankings, 1).unwrap();
        for quota in 2..=4 {
            let pool = candidate_pool(&net, &rankings, quota).unwrap();
            prop_assert!(previous.is_subset(&pool), "pool shrank when quota rose to {quota}");
            previous = pool;
        }
    }

    #[test]
    fn projection_onto_any_ranking_never_beats_the_raw_top_score(
        y in scores(8),
        seed in any::<u64>(),
    ) {
        // Selection safety: the best fitted value cannot exceed the best
        // raw value, whatever ranking is asserted.
        let n = y.len();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, (seed as usize) % (i + 1));
        }
        let out = project_onto_ranking(&y, &Ranking::new(order).unwrap()).unwrap();
        let max_raw = y.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let max_fit = out.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(max_fit <= max_raw + 1e-12);
    }
}

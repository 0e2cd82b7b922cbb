//! Shared test helpers, most importantly a brute-force oracle for the
//! descending isotonic projection that shares no code with the library's
//! solver.

#![allow(dead_code)]

/// Exhaustive projection of `y` onto the descending cone.
///
/// Any projection onto the monotone cone is constant on consecutive blocks,
/// with each block fitted to its mean. This tries every one of the
/// 2^(n-1) consecutive-block partitions, keeps the feasible ones (block
/// means non-increasing left to right), and returns the fitted vector with
/// the smallest squared distance to `y`. Exponential, so only for n ≤ ~16.
pub fn oracle_descending_projection(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    assert!((1..=16).contains(&n), "oracle is exponential in n");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut fitted = vec![0.0; n];
        let mut feasible = true;
        let mut prev_mean = f64::INFINITY;
        let mut start = 0;
        for i in 0..n {
            let block_ends = i == n - 1 || (mask >> i) & 1 == 1;
            if !block_ends {
                continue;
            }
            let mean = y[start..=i].iter().sum::<f64>() / (i - start + 1) as f64;
            if mean > prev_mean {
                feasible = false;
                break;
            }
            for f in &mut fitted[start..=i] {
                *f = mean;
            }
            prev_mean = mean;
            start = i + 1;
        }
        if !feasible {
            continue;
        }
        let dist: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, fitted));
        }
    }
    best.expect("the single-block partition is always feasible").1
}

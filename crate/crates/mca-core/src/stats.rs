//! Uniformity statistics for extracted coefficient sequences.

use alloc::vec;
use alloc::vec::Vec;

/// Pearson χ² statistic of `samples` (each in [0, 1]) against the uniform
/// law over `bins` equal-width cells: Σ (observed − expected)²/expected.
pub fn chi_square_uniform(samples: &[f64], bins: usize) -> f64 {
    assert!(bins >= 2, "need at least two cells");
    assert!(!samples.is_empty(), "need samples");
    let mut counts = vec![0usize; bins];
    for &x in samples {
        debug_assert!((0.0..=1.0).contains(&x), "sample {x} outside [0, 1]");
        let k = ((x * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Kolmogorov–Smirnov distance of `samples` (each in [0, 1]) from the
/// uniform law: sup |F̂(x) − x| over the empirical step function.
pub fn ks_uniform(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "need samples");
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        debug_assert!((0.0..=1.0).contains(&x), "sample {x} outside [0, 1]");
        let above = (i + 1) as f64 / n - x;
        let below = x - i as f64 / n;
        sup = sup.max(above).max(below);
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfectly_stratified_samples_score_zero_chi_square() {
        // 4 samples per cell, dead centre
        let samples: Vec<f64> = (0..64).map(|i| (i as f64 + 0.5) / 64.0).collect();
        assert_eq!(chi_square_uniform(&samples, 16), 0.0);
    }

    #[test]
    fn a_point_mass_scores_the_degenerate_extreme() {
        let samples = vec![0.5; 160];
        // one cell holds everything: (160−10)²/10 + 15·(0−10)²/10
        let stat = chi_square_uniform(&samples, 16);
        assert_abs_diff_eq!(stat, 150.0 * 150.0 / 10.0 + 15.0 * 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ks_uniform(&samples), 1.0 - 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ks_distance_of_the_exact_grid_is_one_over_n() {
        // x_i = i/n for i = 1..n gives sup = 1/n at each step's left edge
        let n = 100;
        let samples: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        assert_abs_diff_eq!(ks_uniform(&samples), 0.01, epsilon = 1e-12);
    }

    #[test]
    fn top_edge_samples_land_in_the_last_cell() {
        let samples = vec![1.0, 0.999, 0.0];
        let stat = chi_square_uniform(&samples, 2);
        // counts = [1, 2] against expected 1.5 each
        assert_abs_diff_eq!(stat, (0.5 * 0.5 + 0.5 * 0.5) / 1.5, epsilon = 1e-12);
    }
}

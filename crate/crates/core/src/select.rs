//! Weighted order statistics.
//!
//! Both public entry points reduce to one question: what is the smallest
//! value `v` whose cumulative weight (over entries `<= v`) reaches a target?
//! The default implementation answers it in linear time with
//! median-of-medians pivoting, so results never depend on random pivots.
//! Building with the `sorted-selection` feature swaps in a sort-and-scan.

use crate::error::{invalid, Result};

/// Relative slack used by every "holds at least this much weight" test.
///
/// Sums of the same weights taken in different orders differ in the last
/// few ulps; comparisons are made against `target - WEIGHT_SLACK * total`.
pub const WEIGHT_SLACK: f64 = 1e-12;

const SMALL: usize = 16;

/// Smallest value `v` such that entries `<= v` carry at least half the weight.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    let total = validate(values, weights)?;
    let target = 0.5 * total - WEIGHT_SLACK * total;
    Ok(smallest_reaching(pairs(values, weights), target))
}

/// Smallest radius `s` such that entries with distance `<= s` carry at least
/// `alpha` of the total weight. Returns `+inf` when the target cannot be met.
pub fn weighted_quantile_radius(distances: &[f64], weights: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let total = validate(distances, weights)?;
    if let Some(d) = distances.iter().find(|d| **d < 0.0) {
        return invalid(format!("negative distance {d}"));
    }
    Ok(radius_for_weight(distances, weights, alpha * total, total))
}

/// Smallest radius reaching an absolute weight `need`, with slack taken
/// relative to `reference` (usually the original total weight).
/// Inputs are assumed validated.
pub(crate) fn radius_for_weight(distances: &[f64], weights: &[f64], need: f64, reference: f64) -> f64 {
    let target = need - WEIGHT_SLACK * reference;
    let available: f64 = weights.iter().sum();
    if target > available {
        return f64::INFINITY;
    }
    smallest_reaching(pairs(distances, weights), target)
}

fn validate(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return invalid("empty input");
    }
    if values.len() != weights.len() {
        return invalid(format!("length mismatch: {} values, {} weights", values.len(), weights.len()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return invalid("NaN value");
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return invalid("weights must be finite and nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return invalid("total weight must be positive");
    }
    Ok(total)
}

fn pairs(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    values.iter().copied().zip(weights.iter().copied()).collect()
}

#[cfg(feature = "sorted-selection")]
fn smallest_reaching(mut items: Vec<(f64, f64)>, target: f64) -> f64 {
    scan_sorted(&mut items, 0.0, target)
}

#[cfg(not(feature = "sorted-selection"))]
fn smallest_reaching(mut items: Vec<(f64, f64)>, target: f64) -> f64 {
    let mut below = 0.0;
    loop {
        if items.len() <= SMALL {
            return scan_sorted(&mut items, below, target);
        }
        let values: Vec<f64> = items.iter().map(|p| p.0).collect();
        let pivot = median_of_medians(&values);

        let mut less = Vec::new();
        let mut greater = Vec::new();
        let (mut w_less, mut w_equal) = (0.0, 0.0);
        for (v, w) in items {
            if v < pivot {
                w_less += w;
                less.push((v, w));
            } else if v > pivot {
                greater.push((v, w));
            } else {
                w_equal += w;
            }
        }

        if below + w_less >= target && !less.is_empty() {
            items = less;
        } else if below + w_less + w_equal >= target || greater.is_empty() {
            return pivot;
        } else {
            below += w_less + w_equal;
            items = greater;
        }
    }
}

fn scan_sorted(items: &mut [(f64, f64)], mut below: f64, target: f64) -> f64 {
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(v, w) in items.iter() {
        below += w;
        if below >= target {
            return v;
        }
    }
    // Unreachable when the caller checked `target <= total`; rounding lands here.
    items.last().map_or(f64::NAN, |p| p.0)
}

/// Deterministic pivot: median of the medians of groups of five.
fn median_of_medians(values: &[f64]) -> f64 {
    let medians: Vec<f64> = values
        .chunks(5)
        .map(|group| {
            let mut g = group.to_vec();
            g.sort_by(f64::total_cmp);
            g[g.len() / 2]
        })
        .collect();
    let mid = medians.len() / 2;
    select_kth(medians, mid)
}

/// k-th smallest (0-based) by median-of-medians selection.
pub(crate) fn select_kth(mut values: Vec<f64>, mut k: usize) -> f64 {
    debug_assert!(k < values.len());
    loop {
        if values.len() <= SMALL {
            values.sort_by(f64::total_cmp);
            return values[k];
        }
        let pivot = median_of_medians(&values);
        let mut less = Vec::new();
        let mut greater = Vec::new();
        let mut equal = 0usize;
        for v in values {
            if v < pivot {
                less.push(v);
            } else if v > pivot {
                greater.push(v);
            } else {
                equal += 1;
            }
        }
        if k < less.len() {
            values = less;
        } else if k < less.len() + equal {
            return pivot;
        } else {
            k -= less.len() + equal;
            values = greater;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sort-and-scan over the whole sequence, exact comparisons only.
    fn oracle(values: &[f64], weights: &[f64], fraction: f64) -> f64 {
        let total: f64 = weights.iter().sum();
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut acc = 0.0;
        for i in idx {
            acc += weights[i];
            if acc >= fraction * total {
                return values[i];
            }
        }
        unreachable!()
    }

    #[test]
    fn median_small_cases() {
        assert_eq!(weighted_median(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(weighted_median(&[0.0, 10.0], &[3.0, 1.0]).unwrap(), 0.0);
        assert_eq!(weighted_median(&[5.0], &[0.5]).unwrap(), 5.0);
    }

    #[test]
    fn median_rejects_bad_input() {
        assert!(weighted_median(&[], &[]).is_err());
        assert!(weighted_median(&[1.0, 2.0], &[0.0, 0.0]).is_err());
        assert!(weighted_median(&[1.0], &[1.0, 2.0]).is_err());
        assert!(weighted_median(&[f64::NAN], &[1.0]).is_err());
        assert!(weighted_median(&[1.0], &[-1.0]).is_err());
    }

    #[test]
    fn median_matches_sort_and_scan_on_1000_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let values: Vec<f64> = (0..1000).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let weights: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..3.0)).collect();
            assert_eq!(weighted_median(&values, &weights).unwrap(), oracle(&values, &weights, 0.5));
        }
    }

    #[test]
    fn quantile_small_cases() {
        let d = [0.0, 1.0, 2.0];
        let w = [1.0, 1.0, 1.0];
        assert_eq!(weighted_quantile_radius(&d, &w, 0.5).unwrap(), 1.0);
        assert_eq!(weighted_quantile_radius(&d, &w, 1.0).unwrap(), 2.0);
        assert!(weighted_quantile_radius(&d, &w, 0.0).is_err());
        assert!(weighted_quantile_radius(&d, &w, 1.5).is_err());
    }

    #[test]
    fn quantile_matches_sort_and_scan_on_500_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..20 {
            let d: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..10.0)).collect();
            // integer weights keep partial sums exact in every order
            let w: Vec<f64> = (0..500).map(|_| rng.gen_range(0..5) as f64).collect();
            let alpha = 0.05 + 0.9 * (round as f64 / 19.0);
            assert_eq!(weighted_quantile_radius(&d, &w, alpha).unwrap(), oracle(&d, &w, alpha));
        }
    }

    #[test]
    fn kth_selection_matches_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..777).map(|_| rng.gen_range(0..40) as f64).collect();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        for k in [0, 1, 100, 388, 776] {
            assert_eq!(select_kth(v.clone(), k), sorted[k]);
        }
    }

    proptest! {
        #[test]
        fn uniform_weights_give_lower_median(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let w = vec![1.0; values.len()];
            let mut s = values.clone();
            s.sort_by(f64::total_cmp);
            prop_assert_eq!(weighted_median(&values, &w).unwrap(), s[(s.len() - 1) / 2]);
        }

        #[test]
        fn median_is_permutation_invariant(
            entries in prop::collection::vec((-100f64..100.0, 0u32..10), 1..120),
            rot in 0usize..120,
        ) {
            prop_assume!(entries.iter().any(|e| e.1 > 0));
            let (v, w): (Vec<f64>, Vec<f64>) = entries.iter().map(|e| (e.0, e.1 as f64)).unzip();
            let k = rot % v.len();
            let mut v2 = v.clone();
            let mut w2 = w.clone();
            v2.rotate_left(k);
            w2.rotate_left(k);
            v2.reverse();
            w2.reverse();
            prop_assert_eq!(weighted_median(&v, &w).unwrap(), weighted_median(&v2, &w2).unwrap());
        }

        #[test]
        fn quantile_nondecreasing_in_alpha(
            entries in prop::collection::vec((0f64..100.0, 0.01f64..5.0), 1..150),
            a in 0.01f64..1.0,
            b in 0.01f64..1.0,
        ) {
            let (d, w): (Vec<f64>, Vec<f64>) = entries.into_iter().unzip();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(
                weighted_quantile_radius(&d, &w, lo).unwrap()
                    <= weighted_quantile_radius(&d, &w, hi).unwrap()
            );
        }
    }
}

//! External clustering agreement.

use std::collections::HashMap;
use std::hash::Hash;

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index between two labelings of the same items.
///
/// 1 for identical partitions (up to relabeling), about 0 for independent
/// ones. When both labelings are trivial in the same way (one cluster, or
/// all singletons) the index is 1.
///
/// Panics if the slices differ in length.
pub fn adjusted_rand_index<A: Eq + Hash, B: Eq + Hash>(truth: &[A], found: &[B]) -> f64 {
    assert_eq!(
        truth.len(),
        found.len(),
        "labelings must cover the same items"
    );
    let n = truth.len() as u64;
    let mut contingency: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (a, b) in truth.iter().zip(found) {
        *contingency.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: f64 = contingency.values().map(|&c| pairs(c)).sum();
    let row_sum: f64 = rows.values().map(|&c| pairs(c)).sum();
    let col_sum: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    if total == 0.0 {
        return 1.0;
    }
    let expected = row_sum * col_sum / total;
    let max = (row_sum + col_sum) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

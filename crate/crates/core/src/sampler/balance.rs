//! Count-driven balanced sampling.
//!
//! Every balanced factor keeps a table of how often each option has been
//! drawn. Among the currently available options, option `i` is drawn with
//! weight `c_i = n_max - n_i + t`, where `n_max` is the largest count among
//! the available options and `t` a small positive tolerance. The most drawn
//! option keeps a weight of `t`, so nothing is ever excluded outright.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

/// Weights `c_i = n_max - n_i + t` normalised to probabilities.
pub fn balanced_probabilities(counts: &[u64], tolerance: f64) -> Vec<f64> {
    let weights = balanced_weights(counts, tolerance);
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|c| c / total).collect()
}

/// `(max - n_i + t) / t`: proportional to the balanced weights, and exactly
/// one for every option at the maximum, so equal counts normalise exactly.
fn balanced_weights(counts: &[u64], tolerance: f64) -> Vec<f64> {
    let max = counts.iter().copied().max().unwrap_or(0);
    counts.iter().map(|&n| (max - n) as f64 / tolerance + 1.0).collect()
}

/// Draws an index into `counts` with balanced weights.
pub(crate) fn pick_balanced<R: Rng + ?Sized>(counts: &[u64], tolerance: f64, rng: &mut R) -> usize {
    assert!(!counts.is_empty(), "balanced sampling needs at least one option");
    let weights = balanced_weights(counts, tolerance);
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            return i;
        }
        r -= w;
    }
    weights.len() - 1
}

/// Per-factor occurrence counts over a fixed, labelled option set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    factor: String,
    labels: Vec<String>,
    counts: Vec<u64>,
}

impl CountTable {
    pub fn new<S: Into<String>>(factor: impl Into<String>, labels: impl IntoIterator<Item = S>) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let counts = vec![0; labels.len()];
        CountTable { factor: factor.into(), labels, counts }
    }

    pub fn factor(&self) -> &str {
        &self.factor
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn record(&mut self, option: usize) {
        self.counts[option] += 1;
    }

    /// Probabilities over `options` (indices into the table), in the given order.
    pub fn probabilities(&self, options: &[usize], tolerance: f64) -> Vec<f64> {
        let counts: Vec<u64> = options.iter().map(|&i| self.counts[i]).collect();
        balanced_probabilities(&counts, tolerance)
    }

    /// Draws one of `options` without recording it.
    pub fn choose<R: Rng + ?Sized>(&self, options: &[usize], tolerance: f64, rng: &mut R) -> usize {
        let counts: Vec<u64> = options.iter().map(|&i| self.counts[i]).collect();
        options[pick_balanced(&counts, tolerance, rng)]
    }

    /// Draws one of `options` and increments its count.
    pub fn balanced_sample<R: Rng + ?Sized>(&mut self, options: &[usize], tolerance: f64, rng: &mut R) -> usize {
        let chosen = self.choose(options, tolerance, rng);
        self.record(chosen);
        chosen
    }

    /// Draws from the whole table and increments the chosen count.
    pub fn balanced_sample_all<R: Rng + ?Sized>(&mut self, tolerance: f64, rng: &mut R) -> usize {
        let chosen = pick_balanced(&self.counts, tolerance, rng);
        self.record(chosen);
        chosen
    }
}

/// Value counts conditioned on the preceding values of the sequence.
///
/// For each configured order `n`, a row of counts is kept per history of the
/// `n - 1` previous values. At step `i` the highest order `n <= i + 1` is used
/// to draw the next value; every applicable order is updated afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramTable {
    options: usize,
    orders: Vec<usize>,
    rows: HashMap<Vec<usize>, Vec<u64>>,
}

impl NGramTable {
    pub fn new(options: usize, orders: &[usize]) -> Self {
        let mut orders: Vec<usize> = orders.iter().copied().filter(|n| *n >= 1).collect();
        if orders.is_empty() {
            orders.push(1);
        }
        orders.sort_unstable();
        orders.dedup();
        NGramTable { options, orders, rows: HashMap::new() }
    }

    fn active_order(&self, history_len: usize) -> Option<usize> {
        self.orders.iter().copied().filter(|n| *n <= history_len + 1).max()
    }

    /// Counts that govern the draw following `history`.
    pub fn row(&self, history: &[usize]) -> Vec<u64> {
        match self.active_order(history.len()) {
            Some(n) => {
                let key = &history[history.len() + 1 - n..];
                self.rows.get(key).cloned().unwrap_or_else(|| vec![0; self.options])
            }
            // only higher orders configured: fall back to a flat row
            None => vec![0; self.options],
        }
    }

    pub fn record(&mut self, history: &[usize], value: usize) {
        for &n in &self.orders {
            if n <= history.len() + 1 {
                let key = history[history.len() + 1 - n..].to_vec();
                self.rows.entry(key).or_insert_with(|| vec![0; self.options])[value] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_option_probabilities() {
        let p = balanced_probabilities(&[2, 0], 0.1);
        assert!((p[0] - 1.0 / 22.0).abs() < 1e-12);
        assert!((p[1] - 21.0 / 22.0).abs() < 1e-12);
    }

    #[test]
    fn equal_counts_are_uniform() {
        for k in 1..40 {
            let p = balanced_probabilities(&vec![7; k], 0.1);
            assert!(p.iter().all(|x| *x == p[0]));
            assert_eq!(p[0], 1.0 / k as f64);
        }
    }

    #[test]
    fn max_count_gets_minimum_probability() {
        let counts = [5, 9, 1, 9, 3];
        let p = balanced_probabilities(&counts, 0.1);
        let total: f64 = counts.iter().map(|&n| (9 - n) as f64 + 0.1).sum();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[1] - 0.1 / total).abs() < 1e-15);
        assert!(p.iter().all(|x| *x >= p[1]));
    }

    #[test]
    fn simulation_stays_balanced() {
        // oracle: plain frequency count after 10k draws from zero counts
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut table = CountTable::new("demo", ["a", "b", "c", "d"]);
        for _ in 0..10_000 {
            table.balanced_sample_all(0.1, &mut rng);
        }
        let max = *table.counts().iter().max().unwrap() as f64;
        let min = *table.counts().iter().min().unwrap() as f64;
        assert!(max - min <= 0.02 * 2500.0, "{:?}", table.counts());
        assert_eq!(table.counts().iter().sum::<u64>(), 10_000);
    }

    #[test]
    fn restricted_draws_only_return_offered_options() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut table = CountTable::new("demo", ["a", "b", "c"]);
        for _ in 0..100 {
            let c = table.balanced_sample(&[0, 2], 0.1, &mut rng);
            assert_ne!(c, 1);
        }
        assert_eq!(table.counts()[1], 0);
        assert_eq!(table.counts()[0] + table.counts()[2], 100);
    }

    #[test]
    fn ngram_rows_follow_history() {
        let mut table = NGramTable::new(3, &[1, 2]);
        table.record(&[], 0);
        table.record(&[0], 1);
        table.record(&[0, 1], 1);
        assert_eq!(table.row(&[]), vec![1, 2, 0]);
        assert_eq!(table.row(&[0]), vec![0, 1, 0]);
        assert_eq!(table.row(&[5, 1]), vec![0, 1, 0]);
        assert_eq!(table.row(&[2]), vec![0, 0, 0]);
    }

    #[test]
    fn drawn_option_never_becomes_more_likely() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut table = CountTable::new("demo", ["a", "b", "c", "d", "e"]);
        for _ in 0..500 {
            let all = [0, 1, 2, 3, 4];
            let before = table.probabilities(&all, 0.1);
            let chosen = table.balanced_sample(&all, 0.1, &mut rng);
            let after = table.probabilities(&all, 0.1);
            assert!(after[chosen] <= before[chosen] + 1e-15);
        }
    }
}

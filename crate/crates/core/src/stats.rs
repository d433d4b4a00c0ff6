//! Streaming sample moments with an order-fixed merge.
//!
//! Paths are accumulated with Welford's update inside fixed-size blocks and
//! the blocks are merged left to right with Chan's pairwise formula. Block
//! boundaries depend only on the path count, never on the thread count, so a
//! parallel run reproduces the serial result bit for bit.

use serde::{Deserialize, Serialize};

/// Paths per accumulation block.
pub const BLOCK_SIZE: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let weight = other.n as f64 / n as f64;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.n as f64 * weight;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with the `n − 1` denominator; zero for fewer than two points.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std() / (self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Folds per-block partials in index order.
pub fn merge_in_order<'a, I>(parts: I) -> Moments
where
    I: IntoIterator<Item = &'a Moments>,
{
    let mut total = Moments::new();
    for part in parts {
        total.merge(part);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pass(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..1000)
            .map(|i| ((i * 37 % 101) as f64).sin() * 10.0 + 4.0)
            .collect();
        let m: Moments = xs.iter().copied().collect();
        let (mean, var) = two_pass(&xs);
        assert!((m.mean() - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-10);
    }

    #[test]
    fn degenerate_counts() {
        let empty = Moments::new();
        assert_eq!(empty.std(), 0.0);
        assert_eq!(empty.std_error(), 0.0);
        let one: Moments = [3.5].into_iter().collect();
        assert_eq!(one.mean(), 3.5);
        assert_eq!(one.std(), 0.0);
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let m: Moments = [1.0, 2.0, 4.0].into_iter().collect();
        let mut a = m;
        a.merge(&Moments::new());
        assert_eq!(a, m);
        let mut b = Moments::new();
        b.merge(&m);
        assert_eq!(b, m);
    }

    #[test]
    fn groupings_agree() {
        let xs: Vec<f64> = (0..777)
            .map(|i| (i as f64 * 0.37).cos() * 3.0 + 1e3)
            .collect();
        let single: Moments = xs.iter().copied().collect();
        for chunk in [1usize, 7, 64, 256, 500] {
            let parts: Vec<Moments> = xs
                .chunks(chunk)
                .map(|c| c.iter().copied().collect())
                .collect();
            let merged = merge_in_order(&parts);
            assert_eq!(merged.count(), single.count());
            assert!((merged.mean() - single.mean()).abs() <= 1e-12 * single.mean().abs());
            assert!((merged.variance() - single.variance()).abs() <= 1e-9 * single.variance());
        }
    }
}

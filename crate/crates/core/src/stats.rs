//! Finite-sample estimates of ±1 correlations.

use crate::error::{Error, Result};

/// Running tally of ±1 samples.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SampleAccumulator {
    count: u64,
    sum: f64,
    sum_of_squares: f64,
}

impl SampleAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: i8) -> Result<()> {
        if x != 1 && x != -1 {
            return Err(Error::invalid(format!("sample {x} is not ±1")));
        }
        let x = x as f64;
        self.count += 1;
        self.sum += x;
        self.sum_of_squares += x * x;
        Ok(())
    }

    /// Value-style update.
    pub fn accumulate(mut self, x: i8) -> Result<Self> {
        self.push(x)?;
        Ok(self)
    }

    pub fn merge(&self, other: &SampleAccumulator) -> SampleAccumulator {
        SampleAccumulator {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_of_squares: self.sum_of_squares + other.sum_of_squares,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.sum_of_squares
    }

    /// `None` before the first sample.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    /// Standard error of the mean, `sqrt((1 − mean²)/count)` for ±1 variates.
    pub fn std_error(&self) -> Option<f64> {
        let mean = self.mean()?;
        Some(((1.0 - mean * mean).max(0.0) / self.count as f64).sqrt())
    }
}

/// Coefficient of one term in a signed combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Sign pattern `(+, +, +, −)` of a CHSH-type functional.
pub const CHSH_SIGNS: [Sign; 4] = [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Minus];

/// Signed sum of independent estimates; errors add in quadrature.
pub fn combine_terms(means: &[f64; 4], std_errors: &[f64; 4], signs: &[Sign; 4]) -> (f64, f64) {
    let value = means.iter().zip(signs).map(|(m, s)| s.factor() * m).sum();
    let var: f64 = std_errors.iter().map(|e| e * e).sum();
    (value, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn all_plus() {
        let mut acc = SampleAccumulator::new();
        for _ in 0..100 {
            acc.push(1).unwrap();
        }
        assert_eq!(acc.mean(), Some(1.0));
        assert_eq!(acc.std_error(), Some(0.0));
    }

    #[test]
    fn balanced_samples() {
        let acc =
            (0..100).try_fold(SampleAccumulator::new(), |a, i| a.accumulate(if i < 50 { 1 } else { -1 })).unwrap();
        assert_eq!(acc.mean(), Some(0.0));
        assert!((acc.std_error().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_samples() {
        let mut acc = SampleAccumulator::new();
        assert!(acc.push(0).is_err());
        assert!(acc.push(2).is_err());
        assert_eq!(acc.count(), 0);
        assert_eq!(acc.mean(), None);
    }

    #[test]
    fn combine_examples() {
        let h = FRAC_1_SQRT_2;
        let (v, e) = combine_terms(&[h, h, h, -h], &[0.0; 4], &CHSH_SIGNS);
        assert!((v - 2.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(e, 0.0);
        let (v, e) = combine_terms(&[0.0; 4], &[0.1; 4], &CHSH_SIGNS);
        assert_eq!(v, 0.0);
        assert!((e - 0.2).abs() < 1e-15);
        let (v, _) = combine_terms(&[0.5, 0.0, 0.0, 0.0], &[0.0; 4], &CHSH_SIGNS);
        assert_eq!(v, 0.5);
    }

    #[test]
    fn bernoulli_mean_within_four_sigma() {
        let bias = 0.3;
        let p_plus = (1.0 + bias) / 2.0;
        let mut hits = 0;
        for seed in 0..1000 {
            let mut rng = Rng::new(seed);
            let mut acc = SampleAccumulator::new();
            for _ in 0..400 {
                acc.push(if rng.uniform() < p_plus { 1 } else { -1 }).unwrap();
            }
            if (acc.mean().unwrap() - bias).abs() <= 4.0 * acc.std_error().unwrap() {
                hits += 1;
            }
        }
        assert!(hits >= 990, "{hits} of 1000 seeds within 4 sigma");
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(xs in prop::collection::vec(prop::bool::ANY, 0..200), split in 0usize..200) {
            let xs: Vec<i8> = xs.into_iter().map(|b| if b { 1 } else { -1 }).collect();
            let cut = split.min(xs.len());
            let fold = |s: &[i8]| s.iter().try_fold(SampleAccumulator::new(), |a, &x| a.accumulate(x)).unwrap();
            let whole = fold(&xs);
            let (a, b) = (fold(&xs[..cut]), fold(&xs[cut..]));
            for m in [a.merge(&b), b.merge(&a)] {
                prop_assert_eq!(m.count(), whole.count());
                prop_assert!((m.sum() - whole.sum()).abs() <= 1e-12);
                prop_assert!((m.sum_of_squares() - whole.sum_of_squares()).abs() <= 1e-12);
            }
        }
    }
}

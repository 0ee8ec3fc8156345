//! Binomial-proportion intervals and simple summaries.

use serde::Serialize;

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub low: f64,
    pub high: f64,
}

impl Estimate {
    /// Point estimate with its Wilson score interval.
    pub fn wilson(successes: u64, trials: u64) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Estimate { successes, trials, rate: p, low: (centre - half).max(0.0), high: (centre + half).min(1.0) }
    }

    /// Distance from `exact` in standard errors of a mean of `trials`
    /// Bernoulli(`exact`) draws; infinite when the variance vanishes and the
    /// estimate differs.
    pub fn z_score(&self, exact: f64) -> f64 {
        let se = (exact * (1.0 - exact) / self.trials as f64).sqrt();
        let diff = (self.rate - exact).abs();
        if se == 0.0 {
            if diff < 1e-12 { 0.0 } else { f64::INFINITY }
        } else {
            diff / se
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Some(Summary {
            count: v.len(),
            mean,
            sd: var.sqrt(),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    pub fn standard_error(&self) -> f64 {
        self.sd / (self.count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 10 of 20: centre 0.5, half-width from the closed form
        let e = Estimate::wilson(10, 20);
        assert!((e.low - 0.299_298_0).abs() < 1e-6, "{e:?}");
        assert!((e.high - 0.700_702_0).abs() < 1e-6);
        let all = Estimate::wilson(50, 50);
        assert_eq!(all.high, 1.0);
        assert!(all.low > 0.92 && all.low < 0.93);
        let none = Estimate::wilson(0, 50);
        assert_eq!(none.low, 0.0);
    }

    #[test]
    fn z_scores() {
        let e = Estimate::wilson(60, 100);
        assert!((e.z_score(0.5) - 2.0).abs() < 1e-12);
        assert_eq!(Estimate::wilson(100, 100).z_score(1.0), 0.0);
        assert!(Estimate::wilson(99, 100).z_score(1.0).is_infinite());
    }

    #[test]
    fn summary_values() {
        let s = Summary::of([1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!(Summary::of([]).is_none());
    }
}

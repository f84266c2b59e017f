//! Sample moments with compensated summation.

use serde::Serialize;

/// Neumaier running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Mean, unbiased variance, and standardized third and fourth moments.
/// Skewness and kurtosis are NaN for constant samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl Moments {
    /// Two passes: the mean first, then central moments about it.
    pub fn of(xs: &[f64]) -> Moments {
        let count = xs.len();
        if count == 0 {
            return Moments {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                skewness: f64::NAN,
                excess_kurtosis: f64::NAN,
            };
        }
        let n = count as f64;
        let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n;
        let (mut m2, mut m3, mut m4) = (CompensatedSum::default(), CompensatedSum::default(), CompensatedSum::default());
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2.add(d2);
            m3.add(d2 * d);
            m4.add(d2 * d2);
        }
        let (m2, m3, m4) = (m2.value() / n, m3.value() / n, m4.value() / n);
        let variance = if count > 1 { m2 * n / (n - 1.0) } else { 0.0 };
        let (skewness, excess_kurtosis) = if m2 > 0.0 {
            (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (f64::NAN, f64::NAN)
        };
        Moments {
            count,
            mean,
            variance,
            skewness,
            excess_kurtosis,
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `sd / sqrt(count)`.
    pub fn standard_error(&self) -> f64 {
        self.sd() / (self.count as f64).sqrt()
    }
}

/// `(value - predicted) / se`; zero when both the gap and `se` vanish.
pub fn z_score(value: f64, predicted: f64, se: f64) -> f64 {
    let gap = value - predicted;
    if se > 0.0 {
        gap / se
    } else if gap.abs() <= 1e-12 * predicted.abs().max(1.0) {
        0.0
    } else {
        gap.signum() * f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_moments() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!(m.skewness.abs() < 1e-15);
        assert!((m.excess_kurtosis - (-1.36)).abs() < 1e-12);
    }

    #[test]
    fn constant_sample() {
        let m = Moments::of(&[7.0; 10]);
        assert_eq!((m.mean, m.variance), (7.0, 0.0));
        assert!(m.skewness.is_nan());
        assert_eq!(z_score(7.0, 7.0, 0.0), 0.0);
        assert_eq!(z_score(8.0, 7.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn large_offset_is_stable() {
        let xs: Vec<f64> = (0..1000).map(|i| 1e9 + (i % 2) as f64).collect();
        let m = Moments::of(&xs);
        assert!((m.variance - 0.25 * 1000.0 / 999.0).abs() < 1e-9);
    }
}

//! Small statistical helpers: Kolmogorov–Smirnov tests and moments.

use std::cmp::Ordering;

use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Two-sample KS test with the Stephens small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs non-empty samples");
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_q((ne + 0.12 + 0.11 / ne) * d),
    }
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsOutcome {
    assert!(!xs.is_empty(), "KS needs a non-empty sample");
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    let sn = n.sqrt();
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Empirical quantile by linear interpolation on a sorted copy.
pub fn quantiles(xs: &[f64], probs: &[f64]) -> Vec<f64> {
    let v = sorted(xs);
    let last = (v.len() - 1) as f64;
    probs
        .iter()
        .map(|p| {
            let pos = p.clamp(0.0, 1.0) * last;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn kolmogorov_reference_values() {
        // Tabulated critical values of the limiting distribution.
        assert!((kolmogorov_q(1.358) - 0.05).abs() < 5e-4);
        assert!((kolmogorov_q(1.628) - 0.01).abs() < 2e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn identical_samples_have_zero_statistic() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn shifted_samples_are_rejected() {
        let mut rng = crate::par::rng(3);
        let a: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>() + 0.2).collect();
        assert!(ks_two_sample(&a, &b).p_value < 1e-6);
        let r = ks_one_sample(&a, |x| x.clamp(0.0, 1.0));
        assert!(r.p_value > 0.01);
    }

    #[test]
    fn disjoint_samples_statistic_one() {
        let r = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantiles(&[3.0, 1.0, 2.0], &[0.0, 0.5, 1.0, 0.25]), vec![1.0, 2.0, 3.0, 1.5]);
        assert!((variance(&[1.0, 2.0, 3.0, 4.0]) - 5.0 / 3.0).abs() < 1e-15);
    }
}

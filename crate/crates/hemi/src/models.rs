//! Scale families driven by an entropy: symmetric α-stable laws under +,
//! Fréchet laws under ∨ and negated Fréchet laws under ∧. For all three,
//! ξX₀ ∔̈ νY₀ has the law of (ξ∘ν)X₀ with ξ∘ν = (|ξ|^α + |ν|^α)^{1/α},
//! and ⟦ξ⟧ = |ξ|^α.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::stats::{self, ks_two_sample};

pub const DEFAULT_LEVEL: f64 = 0.01;

/// Quantile levels for the tail comparison of heavy-tailed families.
pub const TRIM_QUANTILES: [f64; 9] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// S_α(σ,0,0), merged by +.
    Stable,
    /// Fréchet(α, λ), merged by ∨.
    MaxStable,
    /// −Fréchet(α, λ) on (−∞,0], merged by ∧.
    MinStable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Real,
    Nonneg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Family,
    pub alpha: f64,
    #[serde(alias = "scale")]
    pub base_scale: f64,
    /// ℝ for stable laws, [0,∞) otherwise, unless given.
    #[serde(default)]
    pub carrier: Option<Carrier>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    crate::DEFAULT_SEED
}

impl ModelSpec {
    pub fn new(family: Family, alpha: f64, base_scale: f64, seed: u64) -> Result<Self> {
        let m = ModelSpec {
            family,
            alpha,
            base_scale,
            carrier: None,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Result<Self> {
        Self::new(Family::Stable, 2.0, sigma, seed)
    }

    pub fn frechet(alpha: f64, lambda: f64, seed: u64) -> Result<Self> {
        Self::new(Family::MaxStable, alpha, lambda, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let alpha_ok = match self.family {
            Family::Stable => self.alpha > 0.0 && self.alpha <= 2.0,
            Family::MaxStable | Family::MinStable => self.alpha > 0.0 && self.alpha.is_finite(),
        };
        if !alpha_ok {
            return Err(Error::Config(format!("α = {} is invalid for {:?}", self.alpha, self.family)));
        }
        if !(self.base_scale > 0.0 && self.base_scale.is_finite()) {
            return Err(Error::Config(format!("base scale must be positive, got {}", self.base_scale)));
        }
        if self.family != Family::Stable && self.carrier() == Carrier::Real {
            return Err(Error::Config("extremal families act by nonnegative scales only".into()));
        }
        Ok(())
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier.unwrap_or(match self.family {
            Family::Stable => Carrier::Real,
            _ => Carrier::Nonneg,
        })
    }

    pub fn check_scale(&self, xi: f64) -> Result<()> {
        if !xi.is_finite() || (self.carrier() == Carrier::Nonneg && xi < 0.0) {
            return Err(Error::Domain(format!("scale {xi} is outside the carrier")));
        }
        Ok(())
    }

    /// ⟦ξ⟧ = |ξ|^α.
    pub fn entropy(&self, xi: f64) -> f64 {
        xi.abs().powf(self.alpha)
    }

    /// ξ∘ν = (|ξ|^α + |ν|^α)^{1/α}.
    pub fn combine(&self, xi: f64, nu: f64) -> f64 {
        (self.entropy(xi) + self.entropy(nu)).powf(1.0 / self.alpha)
    }

    /// One draw of X₀.
    pub fn draw_base(&self, rng: &mut dyn RngCore) -> f64 {
        match self.family {
            Family::Stable => stable_symmetric(rng, self.alpha, self.base_scale),
            Family::MaxStable => frechet(rng, self.alpha, self.base_scale),
            Family::MinStable => -frechet(rng, self.alpha, self.base_scale),
        }
    }

    /// x ∔̈ y.
    pub fn merge(&self, x: f64, y: f64) -> f64 {
        match self.family {
            Family::Stable => x + y,
            Family::MaxStable => x.max(y),
            Family::MinStable => x.min(y),
        }
    }
}

/// Chambers–Mallows–Stuck draw of S_α(σ,0,0).
pub fn stable_symmetric(rng: &mut dyn RngCore, alpha: f64, sigma: f64) -> f64 {
    let v = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
    if alpha == 1.0 {
        return sigma * v.tan();
    }
    let w: f64 = -(1.0 - rng.gen::<f64>()).ln();
    let x = (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((v - alpha * v).cos() / w).powf((1.0 - alpha) / alpha);
    sigma * x
}

/// Inverse-CDF draw from Φ(x) = exp(−(x/λ)^{−α}).
pub fn frechet(rng: &mut dyn RngCore, alpha: f64, lambda: f64) -> f64 {
    frechet_quantile(1.0 - rng.gen::<f64>(), alpha, lambda)
}

pub fn frechet_quantile(u: f64, alpha: f64, lambda: f64) -> f64 {
    lambda * (-u.ln()).powf(-1.0 / alpha)
}

pub fn frechet_cdf(x: f64, alpha: f64, lambda: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-(x / lambda).powf(-alpha)).exp()
    }
}

pub fn cauchy_cdf(x: f64, sigma: f64) -> f64 {
    0.5 + (x / sigma).atan() / PI
}

/// `n` draws of ξX₀.
pub fn sample(model: &ModelSpec, xi: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    model.check_scale(xi)?;
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let mut rng = par::rng(seed);
    Ok((0..n).map(|_| xi * model.draw_base(&mut rng)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeTestResult {
    pub xi: f64,
    pub nu: f64,
    pub combined: f64,
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub level: f64,
    pub passed: bool,
    /// Largest relative gap between trimmed quantiles, reported for α < 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantile_gap: Option<f64>,
    pub seed: u64,
}

/// Two-sample KS test of ξX₀ ∔̈ νY₀ against (ξ∘ν)X₀.
pub fn verify_merge_law(model: &ModelSpec, xi: f64, nu: f64, n: usize, level: f64, seed: u64) -> Result<MergeTestResult> {
    model.validate()?;
    model.check_scale(xi)?;
    model.check_scale(nu)?;
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::Config(format!("level must lie in [0,1], got {level}")));
    }
    let combined = model.combine(xi, nu);
    let left = sample(model, xi, n, par::derive_seed(seed, 0))?;
    let right = sample(model, nu, n, par::derive_seed(seed, 1))?;
    let merged: Vec<f64> = left.iter().zip(&right).map(|(x, y)| model.merge(*x, *y)).collect();
    let reference = sample(model, combined, n, par::derive_seed(seed, 2))?;
    let ks = ks_two_sample(&merged, &reference);
    let quantile_gap = (model.alpha < 1.0).then(|| {
        let a = stats::quantiles(&merged, &TRIM_QUANTILES);
        let b = stats::quantiles(&reference, &TRIM_QUANTILES);
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    });
    Ok(MergeTestResult {
        xi,
        nu,
        combined,
        n,
        statistic: ks.statistic,
        p_value: ks.p_value,
        level,
        passed: ks.p_value >= level,
        quantile_gap,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub xi: f64,
    pub nu: f64,
    pub passes: usize,
    pub repetitions: usize,
    pub pass_rate: f64,
}

/// The merge test over scales × scales, `repetitions` seeds per cell. Each
/// task owns its seed, derived from the master seed and its index.
pub fn merge_grid(
    model: &ModelSpec,
    scales: &[f64],
    n: usize,
    level: f64,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<GridCell>> {
    let cells: Vec<(f64, f64)> = scales.iter().flat_map(|x| scales.iter().map(move |y| (*x, *y))).collect();
    let runs = par::map(cells.len() * repetitions, |t| {
        let (xi, nu) = cells[t / repetitions];
        verify_merge_law(model, xi, nu, n, level, par::derive_seed(seed, t as u64)).map(|r| r.passed)
    });
    let runs: Vec<bool> = runs.into_iter().collect::<Result<_>>()?;
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(xi, nu))| {
            let passes = runs[c * repetitions..(c + 1) * repetitions].iter().filter(|p| **p).count();
            GridCell {
                xi,
                nu,
                passes,
                repetitions,
                pass_rate: passes as f64 / repetitions as f64,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleEstimator {
    /// Sample variance over 2σ².
    Variance,
    /// Maximum likelihood for λ^α with α known.
    FrechetMle,
    /// −ln of the empirical characteristic function at t = 1/(|ξ|σ).
    CharacteristicFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub xi: f64,
    pub n: usize,
    pub estimator: ScaleEstimator,
    /// Estimated scale of ξX₀ relative to X₀.
    pub ratio: f64,
    pub standard_error: f64,
    /// |ξ|^α.
    pub expected: f64,
    /// |ratio − expected| / standard_error.
    pub z: f64,
    pub passed: bool,
    /// The same check at −ξ, on a real carrier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mirrored: Option<Box<CalibrationReport>>,
    pub seed: u64,
}

/// Passing threshold for |z|.
pub const CALIBRATION_Z: f64 = 3.0;

fn estimate_ratio(model: &ModelSpec, xi: f64, xs: &[f64]) -> (ScaleEstimator, f64, f64) {
    let n = xs.len() as f64;
    let alpha = model.alpha;
    let sigma = model.base_scale;
    match model.family {
        Family::Stable if alpha == 2.0 => {
            let ratio = stats::variance(xs) / (2.0 * sigma * sigma);
            (ScaleEstimator::Variance, ratio, ratio * (2.0 / (n - 1.0)).sqrt())
        }
        Family::Stable => {
            let t = 1.0 / (xi.abs() * sigma);
            let phi = stats::mean(&xs.iter().map(|x| (t * x).cos()).collect::<Vec<_>>());
            let phi2 = stats::mean(&xs.iter().map(|x| (2.0 * t * x).cos()).collect::<Vec<_>>());
            let norm = (sigma * t).powf(alpha);
            let ratio = -phi.ln() / norm;
            let var_cos = ((1.0 + phi2) / 2.0 - phi * phi).max(0.0);
            (ScaleEstimator::CharacteristicFunction, ratio, (var_cos / n).sqrt() / phi / norm)
        }
        Family::MaxStable | Family::MinStable => {
            let s: f64 = xs.iter().map(|x| x.abs().powf(-alpha)).sum();
            let ratio = n / s / sigma.powf(alpha);
            (ScaleEstimator::FrechetMle, ratio, ratio / n.sqrt())
        }
    }
}

fn calibrate_once(model: &ModelSpec, xi: f64, n: usize, seed: u64) -> Result<CalibrationReport> {
    let expected = model.entropy(xi);
    if xi == 0.0 {
        let xs = sample(model, xi, n, seed)?;
        let ok = xs.iter().all(|x| *x == 0.0);
        return Ok(CalibrationReport {
            xi,
            n,
            estimator: ScaleEstimator::Variance,
            ratio: 0.0,
            standard_error: 0.0,
            expected,
            z: 0.0,
            passed: ok,
            mirrored: None,
            seed,
        });
    }
    let xs = sample(model, xi, n, seed)?;
    let (estimator, ratio, se) = estimate_ratio(model, xi, &xs);
    let z = (ratio - expected).abs() / se;
    Ok(CalibrationReport {
        xi,
        n,
        estimator,
        ratio,
        standard_error: se,
        expected,
        z,
        passed: z.is_finite() && z <= CALIBRATION_Z,
        mirrored: None,
        seed,
    })
}

/// Checks that the estimated scale of ξX₀ relative to X₀ is ⟦ξ⟧, and on a
/// real carrier that −ξ gives the same.
pub fn verify_entropy_calibration(model: &ModelSpec, xi: f64, n: usize, seed: u64) -> Result<CalibrationReport> {
    model.validate()?;
    model.check_scale(xi)?;
    if n < 2 {
        return Err(Error::Config("calibration needs n ≥ 2".into()));
    }
    let mut r = calibrate_once(model, xi, n, seed)?;
    if model.carrier() == Carrier::Real && xi != 0.0 {
        let m = calibrate_once(model, -xi, n, par::derive_seed(seed, 1))?;
        r.passed &= m.passed;
        r.mirrored = Some(Box::new(m));
    }
    Ok(r)
}

/// Calibration at each sample size; the standard error shrinks like n^{−1/2}.
pub fn calibration_convergence(model: &ModelSpec, xi: f64, sizes: &[usize], seed: u64) -> Result<Vec<CalibrationReport>> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| verify_entropy_calibration(model, xi, n, par::derive_seed(seed, i as u64)))
        .collect()
}

//! Poisson variables joined through a shared latent component:
//! X = X₀ + Z, Y = Y₀ + Z with Z ~ Poiss(ν), ν = min{aλ, bμ}.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonMode {
    /// ⟦X⟧ = λ and ⟦X∔Y⟧ = λ + μ − ν.
    Rate,
    /// Shannon entropies of the univariate and bivariate laws.
    Shannon,
}

/// Elements are the rates λ ≥ 0 of univariate Poisson variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoisson {
    pub a: f64,
    pub b: f64,
    pub mode: PoissonMode,
    /// Upper end of the sampled rates.
    #[serde(default = "BivariatePoisson::default_max_rate")]
    pub max_rate: f64,
}

impl BivariatePoisson {
    fn default_max_rate() -> f64 {
        10.0
    }

    pub fn new(a: f64, b: f64, mode: PoissonMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("a = {a}, b = {b} must lie in [0,1]")));
        }
        Ok(BivariatePoisson {
            a,
            b,
            mode,
            max_rate: Self::default_max_rate(),
        })
    }

    pub fn shared_rate(&self, lambda: f64, mu: f64) -> f64 {
        (self.a * lambda).min(self.b * mu)
    }

    /// inf over λ, μ of (λ + μ − ν)/(λ + μ), attained at aλ = bμ.
    pub fn m_g(&self) -> f64 {
        if self.a + self.b == 0.0 {
            1.0
        } else {
            1.0 - self.a * self.b / (self.a + self.b)
        }
    }

    /// a_σ = 1/(1 − m_G) = (a + b)/(ab).
    pub fn a_sigma(&self) -> Result<f64> {
        if self.a * self.b == 0.0 {
            return Err(Error::Config("a_σ is infinite when ab = 0".into()));
        }
        Ok((self.a + self.b) / (self.a * self.b))
    }

    /// Truncation point for a law with the given mean.
    pub fn truncation(mean: f64) -> usize {
        ((mean + 40.0 * mean.sqrt()).ceil() as usize).max(60)
    }

    fn pmf(rate: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        if rate == 0.0 {
            out.push(1.0);
            out.resize(n + 1, 0.0);
            return out;
        }
        let mut log_p = -rate;
        for k in 0..=n {
            if k > 0 {
                log_p += rate.ln() - (k as f64).ln();
            }
            out.push(log_p.exp());
        }
        out
    }

    pub fn shannon_univariate(rate: f64) -> f64 {
        let n = Self::truncation(rate);
        Self::pmf(rate, n)
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Entropy of (X, Y) by convolving the three independent parts.
    pub fn shannon_bivariate(&self, lambda: f64, mu: f64) -> f64 {
        let nu = self.shared_rate(lambda, mu);
        let n = Self::truncation(lambda.max(mu));
        let (px, py, pz) = (
            Self::pmf(lambda - nu, n),
            Self::pmf(mu - nu, n),
            Self::pmf(nu, n),
        );
        let mut h = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let p: f64 = (0..=i.min(j)).map(|k| pz[k] * px[i - k] * py[j - k]).sum();
                if p > 0.0 {
                    h -= p * p.ln();
                }
            }
        }
        h
    }

    /// Sign of H(X,X) − 2H(X) on a grid of (a, b, λ); the paper's claim
    /// that it is −1 rests on numerics, so it is reported, not asserted.
    pub fn sign_grid(ab: &[f64], rates: &[f64]) -> Vec<SignGridCell> {
        let mut out = Vec::new();
        for &a in ab {
            for &b in ab {
                let s = BivariatePoisson {
                    a,
                    b,
                    mode: PoissonMode::Shannon,
                    max_rate: Self::default_max_rate(),
                };
                let defects: Vec<f64> = rates
                    .iter()
                    .map(|&l| s.dotplus_entropy(&l, &l) - 2.0 * s.entropy(&l))
                    .collect();
                out.push(SignGridCell {
                    a,
                    b,
                    max_defect: defects.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    min_defect: defects.iter().copied().fold(f64::INFINITY, f64::min),
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignGridCell {
    pub a: f64,
    pub b: f64,
    pub max_defect: f64,
    pub min_defect: f64,
}

impl EntropyStructure for BivariatePoisson {
    type Element = f64;

    fn name(&self) -> String {
        format!("poisson(a={}, b={}, {:?})", self.a, self.b, self.mode)
    }

    fn entropy(&self, x: &f64) -> f64 {
        match self.mode {
            PoissonMode::Rate => *x,
            PoissonMode::Shannon => Self::shannon_univariate(*x),
        }
    }

    fn validate(&self, x: &f64) -> Result<()> {
        if !(x.is_finite() && *x >= 0.0) {
            return Err(Error::Domain(format!("rate {x} is not a nonnegative number")));
        }
        Ok(())
    }

    fn is_deterministic(&self, x: &f64) -> bool {
        *x == 0.0
    }

    fn deterministic_elements(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        Some(rng.gen_range(0.0..self.max_rate))
    }
}

impl Comparable for BivariatePoisson {
    fn dotplus_entropy(&self, x: &f64, y: &f64) -> f64 {
        match self.mode {
            PoissonMode::Rate => x + y - self.shared_rate(*x, *y),
            PoissonMode::Shannon => self.shannon_bivariate(*x, *y),
        }
    }

    fn undetermined_sign(&self) -> Sign {
        Sign::Minus
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        (self.mode == PoissonMode::Rate).then(|| ClosedForm {
            m_g: self.m_g(),
            big_m_g: 1.0,
            sign: Sign::Minus,
        })
    }
}

//! Tsallis and Sharma–Mittal entropies with ∔ = product pmf.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::pmf;
use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Sign};
use crate::error::{Error, Result};

/// ⟦p⟧ = k/(q−1)·(1 − (Σ p_i^q)^{1/r}); r = 1 is Tsallis, r = k is
/// Sharma–Mittal. Joining interacts:
/// ⟦p×p'⟧ = ⟦p⟧ + ⟦p'⟧ − ((q−1)/k)⟦p⟧⟦p'⟧.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerEntropy {
    pub q: f64,
    pub k: f64,
    /// Exponent applied to the power sum.
    pub root: f64,
    pub max_alphabet: usize,
}

impl PowerEntropy {
    fn build(q: f64, k: f64, root: f64) -> Result<Self> {
        if !q.is_finite() || q == 1.0 {
            return Err(Error::Config("q must be finite and different from 1; use shannon_limit".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("k must be positive, got {k}")));
        }
        Ok(PowerEntropy {
            q,
            k,
            root,
            max_alphabet: 6,
        })
    }

    pub fn tsallis(q: f64, k: f64) -> Result<Self> {
        Self::build(q, k, 1.0)
    }

    pub fn sharma_mittal(q: f64, k: f64) -> Result<Self> {
        Self::build(q, k, k)
    }

    pub fn power_sum(&self, p: &[f64]) -> f64 {
        p.iter().filter(|&&v| v > 0.0).map(|v| v.powf(self.q)).sum()
    }

    /// The q → 1 limit of the Tsallis entropy, k·H(p).
    pub fn shannon_limit(k: f64, p: &[f64]) -> f64 {
        k * pmf::shannon(p)
    }

    /// ⟦p⟧ + ⟦p'⟧ − ((q−1)/k)⟦p⟧⟦p'⟧.
    pub fn interaction(&self, h1: f64, h2: f64) -> f64 {
        h1 + h2 - (self.q - 1.0) / self.k * h1 * h2
    }
}

impl EntropyStructure for PowerEntropy {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        if self.root == 1.0 {
            format!("tsallis(q={}, k={})", self.q, self.k)
        } else {
            format!("sharma_mittal(q={}, k={})", self.q, self.k)
        }
    }

    fn entropy(&self, x: &Vec<f64>) -> f64 {
        let s = self.power_sum(x).powf(1.0 / self.root);
        // Clamp the rounding residue at point masses.
        (self.k / (self.q - 1.0) * (1.0 - s)).max(0.0)
    }

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        pmf::validate(x)
    }

    fn is_deterministic(&self, x: &Vec<f64>) -> bool {
        x.iter().any(|&v| v == 1.0)
    }

    fn deterministic_elements(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        let n = rng.gen_range(1..=self.max_alphabet);
        Some(pmf::random_sparse(rng, n, 0.2))
    }
}

impl Comparable for PowerEntropy {
    fn dotplus_entropy(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        self.entropy(&pmf::product(x, y))
    }

    fn dotplus(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(pmf::product(x, y))
    }

    /// Over all finite alphabets: for q > 1 the entropy is bounded by k/(q−1),
    /// which drives inf ⟦p×p'⟧/(⟦p⟧+⟦p'⟧) to ½; for q < 1 it is unbounded.
    fn closed_form(&self) -> Option<ClosedForm> {
        Some(if self.q > 1.0 {
            ClosedForm {
                m_g: 0.5,
                big_m_g: 1.0,
                sign: Sign::Minus,
            }
        } else {
            ClosedForm {
                m_g: 1.0,
                big_m_g: f64::INFINITY,
                sign: Sign::Plus,
            }
        })
    }
}

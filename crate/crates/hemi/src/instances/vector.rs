//! Vector carriers: the Euclidean space, L_p, and variograms.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Sign};
use crate::error::{Error, Result};

fn check_vector(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::Domain(format!("expected {d} coordinates, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite coordinate".into()));
    }
    Ok(())
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn hadamard(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

fn uniform_box(rng: &mut dyn RngCore, d: usize, half_width: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

/// ℝ^d with ⟦x⟧ = ‖x‖², ∔ = +, and the coordinatewise product as the
/// scale operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Euclidean {
    pub d: usize,
}

impl Euclidean {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(Euclidean { d })
    }
}

impl EntropyStructure for Euclidean {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        format!("euclidean(d={})", self.d)
    }

    fn entropy(&self, x: &Vec<f64>) -> f64 {
        norm_sq(x)
    }

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        check_vector(x, self.d)
    }

    fn is_deterministic(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|v| *v == 0.0)
    }

    fn deterministic_elements(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.d]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(uniform_box(rng, self.d, 1.0))
    }
}

impl Comparable for Euclidean {
    fn dotplus_entropy(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a + b) * (a + b)).sum()
    }

    fn dotplus(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(add(x, y))
    }

    fn negate(&self, x: &Vec<f64>) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| -v).collect())
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 0.0,
            big_m_g: 2.0,
            sign: Sign::Plus,
        })
    }

    fn scale(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(hadamard(x, y))
    }

    fn invariant_candidates(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0; self.d], vec![-1.0; self.d], vec![2.0; self.d]]
    }
}

/// ℝ^d with ⟦x⟧ = ‖x‖_p^p and ∔ = +.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    pub d: usize,
    pub p: f64,
    /// Probability that a sampled pair is a small perturbation of (x, x),
    /// which is where the ratio ⟦x+y⟧/⟦x∘y⟧ peaks.
    #[serde(default = "LpSpace::default_diagonal_share")]
    pub diagonal_share: f64,
}

impl LpSpace {
    fn default_diagonal_share() -> f64 {
        0.5
    }

    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("L_p needs p > 1, got {p}")));
        }
        Ok(LpSpace {
            d,
            p,
            diagonal_share: Self::default_diagonal_share(),
        })
    }

    pub fn norm_p(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.abs().powf(self.p)).sum()
    }

    /// d/dt ⟨tx, y⟩_a at t = 0, which is p Σ x_j y_j |y_j|^{p−2}.
    pub fn gateaux_derivative(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| if b == 0.0 { 0.0 } else { self.p * a * b * b.abs().powf(self.p - 2.0) })
            .sum()
    }
}

impl EntropyStructure for LpSpace {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        format!("lp(d={}, p={})", self.d, self.p)
    }

    fn entropy(&self, x: &Vec<f64>) -> f64 {
        self.norm_p(x)
    }

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        check_vector(x, self.d)
    }

    fn is_deterministic(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|v| *v == 0.0)
    }

    fn deterministic_elements(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.d]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(uniform_box(rng, self.d, 1.0))
    }

    fn sample_pair(&self, rng: &mut dyn RngCore) -> Option<(Vec<f64>, Vec<f64>)> {
        let x = uniform_box(rng, self.d, 1.0);
        if rng.gen::<f64>() < self.diagonal_share {
            let eps = 10f64.powf(rng.gen_range(-6.0..-1.0));
            let y = x.iter().map(|v| v + eps * rng.gen_range(-1.0..1.0)).collect();
            Some((x, y))
        } else {
            Some((x, uniform_box(rng, self.d, 1.0)))
        }
    }
}

impl Comparable for LpSpace {
    fn dotplus_entropy(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a + b).abs().powf(self.p)).sum()
    }

    fn dotplus(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(add(x, y))
    }

    fn negate(&self, x: &Vec<f64>) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| -v).collect())
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 0.0,
            big_m_g: 2f64.powf(self.p - 1.0),
            sign: Sign::Plus,
        })
    }

    fn scale(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(hadamard(x, y))
    }

    fn invariant_candidates(&self) -> Vec<Vec<f64>> {
        vec![vec![1.0; self.d]]
    }
}

/// ℝ^d with ⟦x⟧ = γ(x) = ‖x‖^β and ∔ = subtraction, so that
/// ρ_ca(x, y) = γ(x − y).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variogram {
    pub d: usize,
    pub beta: f64,
}

impl Variogram {
    pub fn new(d: usize, beta: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::Config(format!("variogram exponent must be in (0,2], got {beta}")));
        }
        Ok(Variogram { d, beta })
    }

    pub fn gamma(&self, x: &[f64]) -> f64 {
        norm_sq(x).powf(self.beta / 2.0)
    }
}

impl EntropyStructure for Variogram {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        format!("variogram(d={}, beta={})", self.d, self.beta)
    }

    fn entropy(&self, x: &Vec<f64>) -> f64 {
        self.gamma(x)
    }

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        check_vector(x, self.d)
    }

    fn is_deterministic(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|v| *v == 0.0)
    }

    fn deterministic_elements(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.d]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(uniform_box(rng, self.d, 1.0))
    }
}

impl Comparable for Variogram {
    fn dotplus_entropy(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.gamma(&diff)
    }

    fn dotplus(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 0.0,
            big_m_g: 2f64.powf((self.beta - 1.0).max(0.0)),
            sign: Sign::Minus,
        })
    }

    /// Subtraction is not associative.
    fn hemi_associative(&self) -> bool {
        false
    }
}

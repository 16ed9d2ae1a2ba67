//! Small helpers for finite probability vectors. Logarithms are natural.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

pub const SUM_TOL: f64 = 1e-12;

pub fn validate(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Domain("empty pmf".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::Domain(format!("pmf entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL * (p.len() as f64).max(1.0) {
        return Err(Error::Domain(format!("pmf sums to {s}")));
    }
    Ok(())
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

pub fn shannon(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// −Σ p̃ log p; infinite when p̃ charges an atom that p misses.
pub fn cross_entropy(data: &[f64], model: &[f64]) -> f64 {
    data.iter()
        .zip(model)
        .map(|(&d, &m)| {
            if d == 0.0 {
                0.0
            } else if m == 0.0 {
                f64::INFINITY
            } else {
                -d * m.ln()
            }
        })
        .sum()
}

/// d_KL(p̃ ‖ p) = Σ p̃ log(p̃/p).
pub fn kl(data: &[f64], model: &[f64]) -> f64 {
    cross_entropy(data, model) - shannon(data)
}

/// Row-major p ⊗ p'.
pub fn product(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().flat_map(|&a| q.iter().map(move |&b| a * b)).collect()
}

pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn point_mass(n: usize, at: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[at] = 1.0;
    p
}

/// A flat Dirichlet draw with strictly positive entries.
pub fn random_full(rng: &mut dyn RngCore, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-9).collect();
    normalize(w)
}

/// A flat Dirichlet draw in which each atom is dropped with probability
/// `drop`; at least one atom survives.
pub fn random_sparse(rng: &mut dyn RngCore, n: usize, drop: f64) -> Vec<f64> {
    let keep = rng.gen_range(0..n);
    let w: Vec<f64> = (0..n)
        .map(|i| {
            if i != keep && rng.gen::<f64>() < drop {
                0.0
            } else {
                -(1.0 - rng.gen::<f64>()).ln() + 1e-9
            }
        })
        .collect();
    normalize(w)
}

pub fn normalize(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

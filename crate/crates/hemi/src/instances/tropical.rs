//! Nonnegative functions on a finite grid with ∔ = pointwise addition and
//! ⟦f⟧ = sup f or inf f.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TropicalMode {
    Sup,
    Inf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tropical {
    pub mode: TropicalMode,
    pub grid: usize,
}

impl Tropical {
    pub fn new(mode: TropicalMode, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::Config("grid needs at least one point".into()));
        }
        Ok(Tropical { mode, grid })
    }

    fn reduce(&self, f: impl Iterator<Item = f64>) -> f64 {
        match self.mode {
            TropicalMode::Sup => f.fold(0.0, f64::max),
            TropicalMode::Inf => f.fold(f64::INFINITY, f64::min),
        }
    }

    /// inf(f + g), the (min, +) product.
    pub fn min_plus(f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).map(|(a, b)| a + b).fold(f64::INFINITY, f64::min)
    }
}

impl EntropyStructure for Tropical {
    type Element = Vec<f64>;

    fn name(&self) -> String {
        format!("tropical({:?}, grid={})", self.mode, self.grid)
    }

    fn entropy(&self, x: &Vec<f64>) -> f64 {
        self.reduce(x.iter().copied())
    }

    fn validate(&self, x: &Vec<f64>) -> Result<()> {
        if x.len() != self.grid {
            return Err(Error::Domain(format!("expected {} grid values", self.grid)));
        }
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("functions must be finite and nonnegative".into()));
        }
        Ok(())
    }

    fn is_deterministic(&self, x: &Vec<f64>) -> bool {
        x.iter().all(|v| *v == 0.0)
    }

    fn deterministic_elements(&self) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.grid]]
    }

    /// Each value is zero with probability ¼, so both modes see zero and
    /// positive entropies.
    fn sample(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        let zero_all = rng.gen::<f64>() < 0.05;
        Some(
            (0..self.grid)
                .map(|_| {
                    if zero_all || rng.gen::<f64>() < 0.25 {
                        0.0
                    } else {
                        rng.gen_range(0.0..5.0)
                    }
                })
                .collect(),
        )
    }
}

impl Comparable for Tropical {
    fn dotplus_entropy(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        self.reduce(x.iter().zip(y).map(|(a, b)| a + b))
    }

    fn dotplus(&self, x: &Vec<f64>, y: &Vec<f64>) -> Option<Vec<f64>> {
        Some(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    /// The comparison map vanishes identically in both modes; the sign is
    /// fixed to +1.
    fn closed_form(&self) -> Option<ClosedForm> {
        Some(match self.mode {
            TropicalMode::Sup => ClosedForm {
                m_g: 0.5,
                big_m_g: 1.0,
                sign: Sign::Plus,
            },
            TropicalMode::Inf => ClosedForm {
                m_g: 1.0,
                big_m_g: f64::INFINITY,
                sign: Sign::Plus,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::{rho, rho_infty, scalar_a, ComparisonProfile};

    #[test]
    fn sup_mode() {
        let s = Tropical::new(TropicalMode::Sup, 3).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let c = vec![2.0; 3];
        assert_eq!(scalar_a(&s, &p, &c, &c).unwrap(), 0.0);
        let (f, g) = (vec![3.0, 0.0, 1.0], vec![0.0, 2.0, 1.0]);
        assert_eq!(scalar_a(&s, &p, &f, &g).unwrap(), 3.0 - 5.0);
        // a_σ is −∞; the limit metric is ⟦f⟧ + ⟦g⟧ − ⟦f+g⟧.
        assert_eq!(p.a_sigma, f64::NEG_INFINITY);
        assert_eq!(rho_infty(&s, &p, &f, &g).unwrap(), 2.0);
    }

    #[test]
    fn inf_mode_rho_one_is_min_plus() {
        let s = Tropical::new(TropicalMode::Inf, 4).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        assert_eq!((p.xi.lo, p.xi.hi), (0.0, f64::INFINITY));
        let (f, g) = (vec![0.0, 0.0, 2.0, 3.0], vec![4.0, 1.0, 0.0, 0.0]);
        assert_eq!(rho(&s, &p, 1.0, &f, &g).unwrap(), Tropical::min_plus(&f, &g));
        assert_eq!(Tropical::min_plus(&f, &g), 1.0);
        let (u, v) = (vec![0.0, 0.0, 5.0, 5.0], vec![5.0, 5.0, 0.0, 0.0]);
        assert_eq!(s.entropy(&u), 0.0);
        assert_eq!(s.dotplus_entropy(&u, &v), 5.0);
    }
}

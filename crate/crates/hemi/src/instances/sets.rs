//! Subsets of a finite weighted ground set under union.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::algebra::{ClosedForm, Comparable, EntropyStructure, FiniteStructure, Sample, Sign};
use crate::error::{Error, Result};

/// Subsets as bit masks; ⟦A⟧ = μ(A), A ∔ B = A ∪ B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMeasureSets {
    pub weights: Vec<f64>,
}

impl FiniteMeasureSets {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() > 63 {
            return Err(Error::Config(format!("ground set size {} not in 1..=63", weights.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("weights must be finite and nonnegative".into()));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::Config("weights are all zero".into()));
        }
        Ok(FiniteMeasureSets { weights })
    }

    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn measure(&self, mask: u64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn from_members(members: &[usize]) -> u64 {
        members.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn subsets(&self) -> Vec<u64> {
        (0..1u64 << self.size()).collect()
    }

    /// Exhaustive sample over the whole lattice.
    pub fn all(&self) -> Sample<u64> {
        Sample::exhaustive(self.subsets())
    }

    pub fn to_finite(&self) -> Result<FiniteStructure> {
        FiniteStructure::tabulate(self, &self.subsets(), |a, b| a == b)
    }
}

impl EntropyStructure for FiniteMeasureSets {
    type Element = u64;

    fn name(&self) -> String {
        format!("sets(n={})", self.size())
    }

    fn entropy(&self, x: &u64) -> f64 {
        self.measure(*x)
    }

    fn validate(&self, x: &u64) -> Result<()> {
        if *x >> self.size() != 0 {
            return Err(Error::Domain(format!("mask {x:#b} exceeds the ground set")));
        }
        Ok(())
    }

    fn is_deterministic(&self, x: &u64) -> bool {
        *x == 0
    }

    fn deterministic_elements(&self) -> Vec<u64> {
        vec![0]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<u64> {
        Some(rng.gen_range(0..1u64 << self.size()))
    }

    fn describe(&self, x: &u64) -> String {
        let members: Vec<String> = (0..self.size())
            .filter(|i| x >> i & 1 == 1)
            .map(|i| i.to_string())
            .collect();
        format!("{{{}}}", members.join(","))
    }
}

impl Comparable for FiniteMeasureSets {
    fn dotplus_entropy(&self, x: &u64, y: &u64) -> f64 {
        self.measure(x | y)
    }

    fn dotplus(&self, x: &u64, y: &u64) -> Option<u64> {
        Some(x | y)
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 0.5,
            big_m_g: 1.0,
            sign: Sign::Minus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::{rho, ComparisonProfile};

    #[test]
    fn counting_measure_example() {
        let s = FiniteMeasureSets::counting(4).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let a = FiniteMeasureSets::from_members(&[1, 2]);
        let b = FiniteMeasureSets::from_members(&[2, 3]);
        assert_eq!(rho(&s, &p, 2.0, &a, &b).unwrap(), 2.0);
        assert_eq!(s.describe(&a), "{1,2}");
    }

    #[test]
    fn exhaustive_estimate_matches_registered_constants() {
        let s = FiniteMeasureSets::new(vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        let est = ComparisonProfile::estimate(&s, &s.all()).unwrap();
        let cf = ComparisonProfile::closed_form(&s).unwrap();
        assert_eq!((est.m_g, est.big_m_g, est.sign), (cf.m_g, cf.big_m_g, cf.sign));
    }

    #[test]
    fn tabulated_form_agrees() {
        let s = FiniteMeasureSets::counting(3).unwrap();
        let f = s.to_finite().unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(f.entropy(&7), 3.0);
        assert_eq!(f.dotplus(&1, &2), Some(3));
    }

    #[test]
    fn bad_weights() {
        assert!(FiniteMeasureSets::new(vec![]).is_err());
        assert!(FiniteMeasureSets::new(vec![0.0, 0.0]).is_err());
        assert!(FiniteMeasureSets::new(vec![-1.0]).is_err());
        let s = FiniteMeasureSets::counting(2).unwrap();
        assert!(s.validate(&4).is_err());
    }
}

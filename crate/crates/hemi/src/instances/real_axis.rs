//! Intervals of ℝ with ⟦ξ⟧ = |ξ|^α.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Merged, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Full,
    Nonneg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlusOp {
    Add,
    Max,
    /// The argument of larger modulus, ties to the left.
    SignedMax,
}

/// ∘ is (|ξ|^α + |ν|^α)^{1/α}, the scale operator is multiplication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealAxis {
    pub alpha: f64,
    pub domain: Domain,
    pub plus: PlusOp,
    /// Half-width of the sampling window.
    #[serde(default = "RealAxis::default_range")]
    pub range: f64,
}

impl RealAxis {
    fn default_range() -> f64 {
        3.0
    }

    pub fn new(alpha: f64, domain: Domain, plus: PlusOp) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("α must be positive, got {alpha}")));
        }
        if plus == PlusOp::SignedMax && domain == Domain::Nonneg {
            return Err(Error::Config("signed_max needs the full axis".into()));
        }
        Ok(RealAxis {
            alpha,
            domain,
            plus,
            range: Self::default_range(),
        })
    }

    /// Scales of centred Gaussians: ⟦s⟧ = s², s∘t = √(s²+t²).
    pub fn gaussian_scale() -> Self {
        Self::new(2.0, Domain::Nonneg, PlusOp::Add).expect("valid")
    }

    /// Fréchet scales λ with ⟦λ⟧ = λ^α and ∔ = ∨.
    pub fn frechet_scale(alpha: f64) -> Result<Self> {
        Self::new(alpha, Domain::Nonneg, PlusOp::Max)
    }

    /// Cauchy scales: α = 1 on the full axis under addition.
    pub fn cauchy() -> Self {
        Self::new(1.0, Domain::Full, PlusOp::Add).expect("valid")
    }

    fn merge(&self, x: f64, y: f64) -> f64 {
        match self.plus {
            PlusOp::Add => x + y,
            PlusOp::Max => x.max(y),
            PlusOp::SignedMax => {
                if y.abs() > x.abs() {
                    y
                } else {
                    x
                }
            }
        }
    }

    fn has_zero_partner(&self) -> bool {
        // 0 is ∨-neutral only on the nonnegative half axis.
        !(self.plus == PlusOp::Max && self.domain == Domain::Full)
    }
}

impl EntropyStructure for RealAxis {
    type Element = f64;

    fn name(&self) -> String {
        format!("real_axis(alpha={}, {:?}, {:?})", self.alpha, self.domain, self.plus)
    }

    fn entropy(&self, x: &f64) -> f64 {
        x.abs().powf(self.alpha)
    }

    fn validate(&self, x: &f64) -> Result<()> {
        if !x.is_finite() || (self.domain == Domain::Nonneg && *x < 0.0) {
            return Err(Error::Domain(format!("{x} is outside the carrier")));
        }
        Ok(())
    }

    fn circ(&self, x: &f64, y: &f64) -> Merged<f64> {
        let a = self.alpha;
        Merged::Element((x.abs().powf(a) + y.abs().powf(a)).powf(1.0 / a))
    }

    fn is_deterministic(&self, x: &f64) -> bool {
        self.has_zero_partner() && *x == 0.0
    }

    fn deterministic_elements(&self) -> Vec<f64> {
        if self.has_zero_partner() {
            vec![0.0]
        } else {
            vec![]
        }
    }

    /// Hits 0 with probability 1/50 so that G₀ is represented.
    fn sample(&self, rng: &mut dyn RngCore) -> Option<f64> {
        if rng.gen_range(0..50) == 0 {
            return Some(0.0);
        }
        Some(match self.domain {
            Domain::Full => rng.gen_range(-self.range..self.range),
            Domain::Nonneg => rng.gen_range(0.0..self.range),
        })
    }
}

impl Comparable for RealAxis {
    fn dotplus_entropy(&self, x: &f64, y: &f64) -> f64 {
        self.entropy(&self.merge(*x, *y))
    }

    fn dotplus(&self, x: &f64, y: &f64) -> Option<f64> {
        Some(self.merge(*x, *y))
    }

    fn negate(&self, x: &f64) -> Option<f64> {
        (self.domain == Domain::Full && self.plus == PlusOp::Add).then_some(-x)
    }

    /// The Cauchy case is resolved like α < 1.
    fn undetermined_sign(&self) -> Sign {
        Sign::Minus
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        let a = self.alpha;
        let half = 2f64.powf(a - 1.0);
        let (m_g, big_m_g, sign) = match (self.plus, self.domain) {
            (PlusOp::Add, Domain::Full) if a > 1.0 => (0.0, half, Sign::Plus),
            (PlusOp::Add, Domain::Full) => (0.0, 1.0, Sign::Minus),
            (PlusOp::Add, Domain::Nonneg) if a > 1.0 => (1.0, half, Sign::Plus),
            (PlusOp::Add, Domain::Nonneg) => (half, 1.0, Sign::Minus),
            (PlusOp::Max, Domain::Nonneg) | (PlusOp::SignedMax, _) => (0.5, 1.0, Sign::Minus),
            (PlusOp::Max, Domain::Full) => (0.0, 1.0, Sign::Minus),
        };
        Some(ClosedForm { m_g, big_m_g, sign })
    }

    fn scale(&self, x: &f64, y: &f64) -> Option<f64> {
        Some(x * y)
    }

    fn invariant_candidates(&self) -> Vec<f64> {
        match self.domain {
            Domain::Full => vec![1.0, -1.0],
            Domain::Nonneg => vec![1.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_comparable, entropy_of, Sample, SignCheck};
    use crate::comparison::{canonical_rho, canonical_scalar, ComparisonProfile, Variant};

    #[test]
    fn scale_families() {
        let g = RealAxis::gaussian_scale();
        assert_eq!(entropy_of(&g, &3.0).unwrap(), 9.0);
        assert_eq!(g.circ_entropy(&3.0, &4.0), 25.0);
        let f = RealAxis::frechet_scale(2.0).unwrap();
        assert_eq!(entropy_of(&f, &2.0).unwrap(), 4.0);
        assert!(entropy_of(&f, &-1.0).is_err());
    }

    #[test]
    fn max_metric_example() {
        let s = RealAxis::new(1.0, Domain::Nonneg, PlusOp::Max).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        assert_eq!(canonical_rho(&s, &p, &5.0, &2.0).unwrap(), 3.0);
        assert_eq!(canonical_scalar(&s, &p, &2.0, &3.0, Variant::Half).unwrap(), 2.0);
    }

    #[test]
    fn sublinear_addition_collapses_opposites() {
        let s = RealAxis::new(0.5, Domain::Full, PlusOp::Add).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        assert_eq!(p.a_sigma, 1.0);
        assert_eq!(canonical_rho(&s, &p, &2.0, &-2.0).unwrap(), 0.0);
        assert!(canonical_rho(&s, &p, &2.0, &2.0).unwrap() > 0.0);
    }

    #[test]
    fn signed_max_scalar_is_min_modulus() {
        let s = RealAxis::new(1.5, Domain::Full, PlusOp::SignedMax).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        for &(x, y) in &[(2.0f64, -3.0f64), (-1.0, 0.5), (-2.0, -2.0)] {
            let v = canonical_scalar(&s, &p, &x, &y, Variant::Half).unwrap();
            let expect = x.abs().min(y.abs()).powf(1.5);
            assert!((v - expect).abs() < 1e-12);
        }
        assert!(RealAxis::new(1.0, Domain::Nonneg, PlusOp::SignedMax).is_err());
    }

    #[test]
    fn cauchy_sign_is_undetermined() {
        let s = RealAxis::cauchy();
        let sample = Sample::draw(&s, 200, 1).unwrap();
        assert_eq!(check_comparable(&s, &sample).unwrap(), SignCheck::Undetermined);
        let p = ComparisonProfile::estimate(&s, &sample).unwrap();
        assert!(p.sign_by_convention);
        assert_eq!(p.sign, Sign::Minus);
    }

    #[test]
    fn euclidean_line_agrees() {
        let s = RealAxis::new(2.0, Domain::Full, PlusOp::Add).unwrap();
        let e = super::super::vector::Euclidean::new(1).unwrap();
        let (ps, pe) = (
            ComparisonProfile::closed_form(&s).unwrap(),
            ComparisonProfile::closed_form(&e).unwrap(),
        );
        assert_eq!((ps.m_g, ps.big_m_g, ps.a_sigma), (pe.m_g, pe.big_m_g, pe.a_sigma));
        let (a, b) = (
            canonical_rho(&s, &ps, &1.5, &-0.5).unwrap(),
            canonical_rho(&e, &pe, &vec![1.5], &vec![-0.5]).unwrap(),
        );
        assert!((a - b).abs() < 1e-14);
    }
}

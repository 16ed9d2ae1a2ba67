//! Shannon entropy for dependable systems, and the Kullback–Leibler
//! structure obtained by restricting it to models (p, 0) and data (p̃, 1).

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::pmf;
use crate::algebra::{ClosedForm, Comparable, EntropyStructure, FormalPair, Merged, Sign};
use crate::error::{Error, Result};

/// A pmf `p` with reliabilities `q ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependablePair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl DependablePair {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let d = DependablePair { p, q };
        d.check()?;
        Ok(d)
    }

    pub fn model(p: Vec<f64>) -> Self {
        let n = p.len();
        DependablePair { p, q: vec![0.0; n] }
    }

    pub fn data(p: Vec<f64>) -> Self {
        let n = p.len();
        DependablePair { p, q: vec![1.0; n] }
    }

    fn check(&self) -> Result<()> {
        pmf::validate(&self.p)?;
        if self.q.len() != self.p.len() {
            return Err(Error::Domain("p and q differ in length".into()));
        }
        if self.q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("reliabilities must be finite and nonnegative".into()));
        }
        if !self.unreliable() && self.weight() == 0.0 {
            return Err(Error::ZeroReliability);
        }
        Ok(())
    }

    /// q ≡ 0.
    pub fn unreliable(&self) -> bool {
        self.q.iter().all(|v| *v == 0.0)
    }

    /// Σ q_x p_x.
    pub fn weight(&self) -> f64 {
        self.q.iter().zip(&self.p).map(|(q, p)| q * p).sum()
    }

    /// r_x = q_x p_x / Σ q_y p_y, the law of a value given it is dependable.
    pub fn conditional(&self) -> Option<Vec<f64>> {
        let w = self.weight();
        (w > 0.0).then(|| self.q.iter().zip(&self.p).map(|(q, p)| q * p / w).collect())
    }
}

/// −Σ w_x log p_x / Σ w_x with w = weights; 0 when the weights vanish.
fn weighted_surprise(p: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    pmf::cross_entropy(&w.iter().map(|v| v / total).collect::<Vec<_>>(), p)
}

/// ⟦(p,q)⟧ = −Σ q p log p / Σ q p, with ⟦(p,0)⟧ = 0;
/// (p,q) ∔ (p̃,q̃) = (p, q + q̃ p̃/p); ∘ is the cross product when both
/// reliabilities are nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependableShannon {
    /// Alphabet size used by the sampler and for designated elements.
    pub alphabet: usize,
}

impl DependableShannon {
    pub fn new(alphabet: usize) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::Config("alphabet needs at least two letters".into()));
        }
        Ok(DependableShannon { alphabet })
    }

    fn plus_weights(x: &DependablePair, y: &DependablePair) -> Vec<f64> {
        (0..x.p.len())
            .map(|i| x.q[i] * x.p[i] + y.q[i] * y.p[i])
            .collect()
    }
}

impl EntropyStructure for DependableShannon {
    type Element = DependablePair;

    fn name(&self) -> String {
        format!("dependable_shannon(alphabet={})", self.alphabet)
    }

    fn entropy(&self, x: &DependablePair) -> f64 {
        let w: Vec<f64> = x.q.iter().zip(&x.p).map(|(q, p)| q * p).collect();
        weighted_surprise(&x.p, &w)
    }

    fn validate(&self, x: &DependablePair) -> Result<()> {
        x.check()
    }

    fn circ(&self, x: &DependablePair, y: &DependablePair) -> Merged<DependablePair> {
        if x.unreliable() || y.unreliable() {
            return Merged::Formal(FormalPair {
                left: x.clone(),
                right: y.clone(),
            });
        }
        Merged::Element(DependablePair {
            p: pmf::product(&x.p, &y.p),
            q: pmf::product(&x.q, &y.q),
        })
    }

    fn is_deterministic(&self, x: &DependablePair) -> bool {
        x.unreliable()
    }

    fn deterministic_elements(&self) -> Vec<DependablePair> {
        vec![DependablePair::model(pmf::uniform(self.alphabet))]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<DependablePair> {
        let p = pmf::random_full(rng, self.alphabet);
        let q = if rng.gen::<f64>() < 0.1 {
            vec![0.0; self.alphabet]
        } else {
            (0..self.alphabet).map(|_| rng.gen::<f64>()).collect()
        };
        Some(DependablePair { p, q })
    }
}

impl Comparable for DependableShannon {
    /// Infinite when the right argument charges an atom the left pmf misses.
    fn dotplus_entropy(&self, x: &DependablePair, y: &DependablePair) -> f64 {
        weighted_surprise(&x.p, &Self::plus_weights(x, y))
    }

    fn dotplus(&self, x: &DependablePair, y: &DependablePair) -> Option<DependablePair> {
        let mut q = x.q.clone();
        for i in 0..q.len() {
            let extra = y.q[i] * y.p[i];
            if extra > 0.0 {
                if x.p[i] == 0.0 {
                    return None;
                }
                q[i] += extra / x.p[i];
            }
        }
        Some(DependablePair { p: x.p.clone(), q })
    }

    /// (p_ξ, 0): the deterministic system on ξ's own fibre.
    fn partners(&self, x: &DependablePair) -> Vec<DependablePair> {
        vec![DependablePair::model(x.p.clone())]
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 0.0,
            big_m_g: f64::INFINITY,
            sign: Sign::Minus,
        })
    }
}

/// A model (p, 0) or a data set (p̃, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum KlElement {
    Model(Vec<f64>),
    Data(Vec<f64>),
}

impl KlElement {
    pub fn pmf(&self) -> &[f64] {
        match self {
            KlElement::Model(p) | KlElement::Data(p) => p,
        }
    }

    pub fn as_pair(&self) -> DependablePair {
        match self {
            KlElement::Model(p) => DependablePair::model(p.clone()),
            KlElement::Data(p) => DependablePair::data(p.clone()),
        }
    }
}

/// The restriction under which ⟨Model(p), Data(p̃)⟩_a = d_KL(p̃ ‖ p).
/// The diagonal of p is the pair (Model(p), Data(p)), along which the
/// comparison map vanishes; the sign is fixed to +1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KullbackLeibler {
    pub alphabet: usize,
}

impl KullbackLeibler {
    pub fn new(alphabet: usize) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::Config("alphabet needs at least two letters".into()));
        }
        Ok(KullbackLeibler { alphabet })
    }

    fn base() -> DependableShannon {
        DependableShannon { alphabet: 2 }
    }
}

impl EntropyStructure for KullbackLeibler {
    type Element = KlElement;

    fn name(&self) -> String {
        format!("kl(alphabet={})", self.alphabet)
    }

    fn entropy(&self, x: &KlElement) -> f64 {
        match x {
            KlElement::Model(_) => 0.0,
            KlElement::Data(p) => pmf::shannon(p),
        }
    }

    fn validate(&self, x: &KlElement) -> Result<()> {
        pmf::validate(x.pmf())
    }

    fn is_deterministic(&self, x: &KlElement) -> bool {
        matches!(x, KlElement::Model(_))
    }

    fn deterministic_elements(&self) -> Vec<KlElement> {
        vec![KlElement::Model(pmf::uniform(self.alphabet))]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<KlElement> {
        let p = pmf::random_full(rng, self.alphabet);
        Some(if rng.gen::<bool>() {
            KlElement::Model(p)
        } else {
            KlElement::Data(p)
        })
    }

    fn sample_pair(&self, rng: &mut dyn RngCore) -> Option<(KlElement, KlElement)> {
        Some((
            KlElement::Model(pmf::random_full(rng, self.alphabet)),
            KlElement::Data(pmf::random_full(rng, self.alphabet)),
        ))
    }
}

impl Comparable for KullbackLeibler {
    fn dotplus_entropy(&self, x: &KlElement, y: &KlElement) -> f64 {
        Self::base().dotplus_entropy(&x.as_pair(), &y.as_pair())
    }

    fn diagonal(&self, x: &KlElement) -> (KlElement, KlElement) {
        let p = x.pmf().to_vec();
        (KlElement::Model(p.clone()), KlElement::Data(p))
    }

    fn partners(&self, x: &KlElement) -> Vec<KlElement> {
        vec![KlElement::Model(x.pmf().to_vec())]
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        Some(ClosedForm {
            m_g: 1.0,
            big_m_g: f64::INFINITY,
            sign: Sign::Plus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_dotplus_neutral, check_hemi_group, Sample};
    use crate::comparison::{rho_infty, scalar_a, ComparisonProfile};

    #[test]
    fn scalar_is_negative_kl() {
        let s = DependableShannon::new(2).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let model = DependablePair::model(vec![0.5, 0.5]);
        let data = DependablePair::data(vec![1.0, 0.0]);
        let v = scalar_a(&s, &p, &model, &data).unwrap();
        assert!((v + 2f64.ln()).abs() < 1e-15);
        let same = scalar_a(&s, &p, &model, &DependablePair::data(vec![0.5, 0.5])).unwrap();
        assert!(same.abs() < 1e-15);
    }

    #[test]
    fn idempotent_and_scale_free() {
        let s = DependableShannon::new(3).unwrap();
        let x = DependablePair::new(vec![0.2, 0.3, 0.5], vec![0.9, 0.1, 0.4]).unwrap();
        assert!((s.dotplus_entropy(&x, &x) - s.entropy(&x)).abs() < 1e-15);
        let scaled = DependablePair::new(x.p.clone(), x.q.iter().map(|v| 7.5 * v).collect()).unwrap();
        assert!((s.entropy(&scaled) - s.entropy(&x)).abs() < 1e-15);
        let direct = s.entropy(&s.dotplus(&x, &x).unwrap());
        assert!((direct - s.dotplus_entropy(&x, &x)).abs() < 1e-15);
    }

    #[test]
    fn cross_product_is_additive_and_partners_are_neutral() {
        let s = DependableShannon::new(3).unwrap();
        let sample = Sample::draw(&s, 500, 11).unwrap();
        assert!(check_hemi_group(&s, &sample).passed());
        assert!(check_dotplus_neutral(&s, &sample).passed());
    }

    #[test]
    fn zero_reliability() {
        assert_eq!(
            DependablePair::new(vec![1.0, 0.0], vec![0.0, 1.0]),
            Err(Error::ZeroReliability)
        );
        assert!(DependablePair::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn kl_profile_and_limit_metric() {
        let s = KullbackLeibler::new(2).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        assert!(p.xi.hi.is_infinite());
        let (m, d) = (KlElement::Model(vec![0.5, 0.5]), KlElement::Data(vec![1.0, 0.0]));
        assert!((scalar_a(&s, &p, &m, &d).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((rho_infty(&s, &p, &m, &d).unwrap() - 2f64.ln()).abs() < 1e-15);
        let same = KlElement::Data(vec![0.5, 0.5]);
        assert!(scalar_a(&s, &p, &m, &same).unwrap().abs() < 1e-15);
    }
}

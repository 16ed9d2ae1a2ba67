//! Shannon entropy on joints of discrete variables, on concatenated
//! sources, and on cylinder events of a product space.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::pmf;
use crate::algebra::{ClosedForm, Comparable, EntropyStructure, Merged, Sign};
use crate::error::{Error, Result};

/// Joint pmf of discrete X (rows) and Y (columns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub p: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let cols = p.first().map(|r| r.len()).unwrap_or(0);
        if cols == 0 || p.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("joint table must be a non-empty rectangle".into()));
        }
        pmf::validate(&p.concat())?;
        Ok(JointTable { p })
    }

    pub fn margin_x(&self) -> Vec<f64> {
        self.p.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn margin_y(&self) -> Vec<f64> {
        (0..self.p[0].len()).map(|j| self.p.iter().map(|r| r[j]).sum()).collect()
    }

    /// Σ p log(p / (p_X p_Y)), summed directly.
    pub fn mutual_information(&self) -> f64 {
        let (px, py) = (self.margin_x(), self.margin_y());
        let mut s = 0.0;
        for (i, row) in self.p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > 0.0 {
                    s += v * (v / (px[i] * py[j])).ln();
                }
            }
        }
        s
    }
}

/// A joint pmf of several discrete variables. Elements are subsets of
/// the variables (bit masks); ⟦S⟧ is the entropy of their joint margin and
/// S ∔ T = S ∪ T, so that p_X ∔ p_X = p_X.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiJoint {
    pub shape: Vec<usize>,
    /// Row-major, last variable fastest.
    pub p: Vec<f64>,
}

impl MultiJoint {
    pub fn new(shape: Vec<usize>, p: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 16 || shape.iter().any(|&k| k == 0) {
            return Err(Error::Domain(format!("bad shape {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if p.len() != n {
            return Err(Error::Domain(format!("{} cells for shape {shape:?}", p.len())));
        }
        pmf::validate(&p)?;
        Ok(MultiJoint { shape, p })
    }

    pub fn from_table(t: &JointTable) -> Self {
        MultiJoint {
            shape: vec![t.p.len(), t.p[0].len()],
            p: t.p.concat(),
        }
    }

    /// Flat Dirichlet draw over all cells.
    pub fn random(rng: &mut dyn RngCore, shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        MultiJoint {
            shape,
            p: pmf::random_full(rng, n),
        }
    }

    pub fn variables(&self) -> usize {
        self.shape.len()
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.variables()) - 1
    }

    pub fn margin(&self, mask: u64) -> Vec<f64> {
        let k = self.variables();
        let kept: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let size: usize = kept.iter().map(|&i| self.shape[i]).product();
        let mut out = vec![0.0; size];
        let mut idx = vec![0usize; k];
        for &v in &self.p {
            let mut flat = 0;
            for &i in &kept {
                flat = flat * self.shape[i] + idx[i];
            }
            out[flat] += v;
            for i in (0..k).rev() {
                idx[i] += 1;
                if idx[i] < self.shape[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        out
    }

    pub fn entropy_of_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            0.0
        } else {
            pmf::shannon(&self.margin(mask))
        }
    }

    /// I(S;T) for disjoint or overlapping variable sets.
    pub fn mutual_information(&self, s: u64, t: u64) -> f64 {
        self.entropy_of_mask(s) + self.entropy_of_mask(t) - self.entropy_of_mask(s | t)
    }

    /// 2H(S,T) − H(S) − H(T).
    pub fn variation_of_information(&self, s: u64, t: u64) -> f64 {
        2.0 * self.entropy_of_mask(s | t) - self.entropy_of_mask(s) - self.entropy_of_mask(t)
    }
}

impl EntropyStructure for MultiJoint {
    type Element = u64;

    fn name(&self) -> String {
        format!("mutual_information(shape={:?})", self.shape)
    }

    fn entropy(&self, x: &u64) -> f64 {
        self.entropy_of_mask(*x)
    }

    fn validate(&self, x: &u64) -> Result<()> {
        if x & !self.full_mask() != 0 {
            return Err(Error::Domain(format!("variable set {x:#b} out of range")));
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
        Some(rng.gen_range(0..=self.full_mask()))
    }

    fn describe(&self, x: &u64) -> String {
        let names: Vec<String> = (0..self.variables())
            .filter(|i| x >> i & 1 == 1)
            .map(|i| format!("X{i}"))
            .collect();
        format!("p[{}]", names.join(","))
    }
}

impl Comparable for MultiJoint {
    fn dotplus_entropy(&self, x: &u64, y: &u64) -> f64 {
        self.entropy_of_mask(x | y)
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

/// Independent letters from one or more sources; ∘ concatenates, and the
/// entropy is read off the literal product alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShannonConcat {
    /// Largest product alphabet that is expanded.
    pub max_atoms: usize,
    /// Alphabet size used by the sampler.
    pub alphabet: usize,
}

/// A word: the list of letter distributions, one per position.
pub type Word = Vec<Vec<f64>>;

impl ShannonConcat {
    pub fn new(alphabet: usize) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::Config("alphabet needs at least two letters".into()));
        }
        Ok(ShannonConcat {
            max_atoms: 1 << 20,
            alphabet,
        })
    }

    /// pⁿ as a word.
    pub fn power(p: &[f64], n: usize) -> Word {
        vec![p.to_vec(); n]
    }

    /// The pmf of the extended alphabet of pairs, triples, ….
    pub fn product_pmf(&self, w: &Word) -> Result<Vec<f64>> {
        let atoms = w.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
        match atoms {
            Some(a) if a <= self.max_atoms => {}
            _ => return Err(Error::Config(format!("product alphabet exceeds {} atoms", self.max_atoms))),
        }
        Ok(w.iter().fold(vec![1.0], |acc, p| pmf::product(&acc, p)))
    }
}

impl EntropyStructure for ShannonConcat {
    type Element = Word;

    fn name(&self) -> String {
        format!("shannon_concat(alphabet={})", self.alphabet)
    }

    fn entropy(&self, x: &Word) -> f64 {
        match self.product_pmf(x) {
            Ok(p) => pmf::shannon(&p),
            Err(_) => f64::NAN,
        }
    }

    fn validate(&self, x: &Word) -> Result<()> {
        for p in x {
            pmf::validate(p)?;
        }
        self.product_pmf(x).map(|_| ())
    }

    fn circ(&self, x: &Word, y: &Word) -> Merged<Word> {
        Merged::Element(x.iter().chain(y).cloned().collect())
    }

    fn is_deterministic(&self, x: &Word) -> bool {
        x.iter().all(|p| p.iter().any(|&v| v == 1.0))
    }

    fn deterministic_elements(&self) -> Vec<Word> {
        vec![vec![]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Word> {
        let len = rng.gen_range(1..=3);
        Some(
            (0..len)
                .map(|_| {
                    let k = rng.gen_range(2..=self.alphabet);
                    pmf::random_sparse(rng, k, 0.2)
                })
                .collect(),
        )
    }
}

/// Cylinder events A₁ × A₂ × … × Ω^∞ in a product of copies of a finite
/// probability space. ⟦A⟧ = −Σ log P(A_i); ∘ places the second cylinder
/// on fresh coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpace {
    pub omega: Vec<f64>,
}

/// Coordinate events as bit masks over Ω.
pub type Cylinder = Vec<u64>;

impl ProductSpace {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.len() > 63 {
            return Err(Error::Config("Ω has more than 63 points".into()));
        }
        pmf::validate(&omega)?;
        Ok(ProductSpace { omega })
    }

    pub fn probability(&self, event: u64) -> f64 {
        self.omega
            .iter()
            .enumerate()
            .filter(|(i, _)| event >> i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// Information content −log P(A).
    pub fn information(&self, event: u64) -> f64 {
        let p = self.probability(event);
        if p >= 1.0 {
            0.0
        } else {
            -p.ln()
        }
    }
}

impl EntropyStructure for ProductSpace {
    type Element = Cylinder;

    fn name(&self) -> String {
        format!("product_space(|Ω|={})", self.omega.len())
    }

    /// Infinite for null events; this structure has no ∔.
    fn entropy(&self, x: &Cylinder) -> f64 {
        x.iter().map(|&e| self.information(e)).sum()
    }

    fn validate(&self, x: &Cylinder) -> Result<()> {
        let full = (1u64 << self.omega.len()) - 1;
        match x.iter().find(|&&e| e & !full != 0) {
            Some(e) => Err(Error::Domain(format!("event {e:#b} is not a subset of Ω"))),
            None => Ok(()),
        }
    }

    fn circ(&self, x: &Cylinder, y: &Cylinder) -> Merged<Cylinder> {
        Merged::Element(x.iter().chain(y).copied().collect())
    }

    fn is_deterministic(&self, x: &Cylinder) -> bool {
        x.iter().all(|&e| self.probability(e) >= 1.0)
    }

    fn deterministic_elements(&self) -> Vec<Cylinder> {
        vec![vec![]]
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<Cylinder> {
        let full = (1u64 << self.omega.len()) - 1;
        let len = rng.gen_range(0..=3);
        Some((0..len).map(|_| rng.gen_range(1..=full)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_hemi_group, Sample};
    use crate::comparison::{canonical_rho, canonical_scalar, rho_infty, ComparisonProfile, Variant};

    #[test]
    fn margins_of_three_variables() {
        let mut rng = crate::par::rng(3);
        let j = MultiJoint::random(&mut rng, vec![2, 3, 2]);
        let m = j.margin(0b010);
        assert_eq!(m.len(), 3);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Oracle: sum over the other coordinates by explicit index arithmetic.
        for (b, &mb) in m.iter().enumerate() {
            let direct: f64 = (0..2).flat_map(|a| (0..2).map(move |c| (a, c))).map(|(a, c)| j.p[a * 6 + b * 2 + c]).sum();
            assert!((mb - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_is_mutual_information() {
        let t = JointTable::new(vec![vec![0.3, 0.1], vec![0.2, 0.4]]).unwrap();
        let j = MultiJoint::from_table(&t);
        let p = ComparisonProfile::closed_form(&j).unwrap();
        let half = canonical_scalar(&j, &p, &1, &2, Variant::Half).unwrap();
        assert!((half - t.mutual_information()).abs() < 1e-14);
        let vi = canonical_rho(&j, &p, &1, &2).unwrap();
        assert!((vi - j.variation_of_information(1, 2)).abs() < 1e-14);
        assert!((rho_infty(&j, &p, &1, &2).unwrap() - t.mutual_information()).abs() < 1e-14);
    }

    #[test]
    fn independent_and_identical() {
        let px = [0.25, 0.75];
        let py = [0.5, 0.2, 0.3];
        let t = JointTable::new(px.iter().map(|a| py.iter().map(|b| a * b).collect()).collect()).unwrap();
        assert!(t.mutual_information().abs() < 1e-15);
        let same = JointTable::new(vec![vec![0.4, 0.0], vec![0.0, 0.6]]).unwrap();
        let j = MultiJoint::from_table(&same);
        let p = ComparisonProfile::closed_form(&j).unwrap();
        assert!(canonical_rho(&j, &p, &1, &2).unwrap().abs() < 1e-15);
        assert!(canonical_rho(&j, &p, &1, &1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn concatenation_is_additive() {
        let s = ShannonConcat::new(3).unwrap();
        let u2 = pmf::uniform(2);
        assert!((s.entropy(&vec![u2.clone()]) - 2f64.ln()).abs() < 1e-15);
        assert!((s.entropy(&ShannonConcat::power(&u2, 2)) - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((s.entropy(&vec![u2, pmf::uniform(3)]) - 6f64.ln()).abs() < 1e-14);
        let sample = Sample::draw(&s, 300, 9).unwrap();
        assert!(check_hemi_group(&s, &sample).passed());
    }

    #[test]
    fn product_space_information_adds() {
        let s = ProductSpace::new(vec![0.5, 0.25, 0.25]).unwrap();
        let (a, b) = (vec![0b001u64], vec![0b110u64]);
        let merged = s.circ_entropy(&a, &b);
        assert!((merged - (2f64.ln() + 2f64.ln())).abs() < 1e-15);
        let sample = Sample::draw(&s, 300, 4).unwrap();
        assert!(check_hemi_group(&s, &sample).passed());
        assert!(s.is_deterministic(&vec![0b111]));
    }
}

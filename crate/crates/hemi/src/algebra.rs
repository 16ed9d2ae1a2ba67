//! Entropy-driven structures and checkers for their structural laws.
//!
//! A structure is a carrier with an entropy ⟦·⟧ ≥ 0, an independent merge
//! ∘ whose entropy is additive, and (for [`Comparable`] structures) an
//! interacting merge ∔. When a structure has no natural ∘ the merge lands in
//! the bin as a [`FormalPair`], whose entropy is the sum of its parts.
//!
//! | law                            | checker                    |
//! |--------------------------------|----------------------------|
//! | ⟦ξ∘ν⟧ = ⟦ξ⟧+⟦ν⟧                 | [`check_hemi_group`]       |
//! | ⟦ξ∘ν⟧ = ⟦ν∘ξ⟧                   | [`check_hemi_commutative`] |
//! | sign of ⟦ξ∔ξ⟧−2⟦ξ⟧ is constant  | [`check_comparable`]       |
//! | ⟦ξ∔ε⟧ = ⟦ε∔ξ⟧ = ⟦ξ⟧, ε ∈ G_s    | [`check_dotplus_neutral`]  |
//! | hemi-ring laws (i)–(iv)        | [`check_hemi_ring`]        |
//! | ⟦ξν⟧ = c_ξ⟦ν⟧, c_ξ = c⟦ξ⟧       | [`check_rescaling`]        |

use std::fmt::Debug;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    pub fn slack(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        self.eq_at(a, b, 0.0)
    }

    /// Equality with an extra magnitude that the slack is measured against.
    pub fn eq_at(&self, a: f64, b: f64, scale: f64) -> bool {
        if a == b {
            return true;
        }
        if !a.is_finite() || !b.is_finite() {
            return false;
        }
        (a - b).abs() <= self.slack(a.abs().max(b.abs()).max(scale.abs()))
    }

    pub fn le(&self, a: f64, b: f64, scale: f64) -> bool {
        if a <= b {
            return true;
        }
        if !a.is_finite() || !b.is_finite() {
            return false;
        }
        a - b <= self.slack(a.abs().max(b.abs()).max(scale.abs()))
    }

    pub fn is_zero(&self, a: f64, scale: f64) -> bool {
        a.abs() <= self.slack(scale)
    }
}

/// A value in the bin G*∖G produced by a formal ∘.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormalPair<E> {
    pub left: E,
    pub right: E,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Merged<E> {
    Element(E),
    Formal(FormalPair<E>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

/// Outcome of [`check_comparable`] before the undetermined case is resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignCheck {
    Minus,
    Plus,
    Undetermined,
}

impl SignCheck {
    pub fn resolve(self, fallback: Sign) -> Sign {
        match self {
            SignCheck::Minus => Sign::Minus,
            SignCheck::Plus => Sign::Plus,
            SignCheck::Undetermined => fallback,
        }
    }
}

/// Constants a structure knows analytically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    #[serde(with = "crate::extreal")]
    pub m_g: f64,
    #[serde(with = "crate::extreal")]
    pub big_m_g: f64,
    pub sign: Sign,
}

pub trait EntropyStructure: Send + Sync {
    type Element: Clone + Debug + Send + Sync;

    fn name(&self) -> String;

    fn entropy(&self, x: &Self::Element) -> f64;

    fn validate(&self, _x: &Self::Element) -> Result<()> {
        Ok(())
    }

    fn circ(&self, x: &Self::Element, y: &Self::Element) -> Merged<Self::Element> {
        Merged::Formal(FormalPair {
            left: x.clone(),
            right: y.clone(),
        })
    }

    fn merged_entropy(&self, m: &Merged<Self::Element>) -> f64 {
        match m {
            Merged::Element(e) => self.entropy(e),
            Merged::Formal(p) => self.entropy(&p.left) + self.entropy(&p.right),
        }
    }

    fn circ_entropy(&self, x: &Self::Element, y: &Self::Element) -> f64 {
        self.merged_entropy(&self.circ(x, y))
    }

    fn is_zero(&self, x: &Self::Element) -> bool {
        self.entropy(x) <= self.tolerance().abs
    }

    fn is_deterministic(&self, x: &Self::Element) -> bool;

    /// Designated elements of G_s; the first plays the role of 0·λ.
    fn deterministic_elements(&self) -> Vec<Self::Element>;

    fn sample(&self, _rng: &mut dyn RngCore) -> Option<Self::Element> {
        None
    }

    fn sample_pair(&self, rng: &mut dyn RngCore) -> Option<(Self::Element, Self::Element)> {
        let a = self.sample(rng)?;
        let b = self.sample(rng)?;
        Some((a, b))
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance::default()
    }

    fn describe(&self, x: &Self::Element) -> String {
        format!("{x:?}")
    }
}

/// Structures carrying the interacting merge ∔.
pub trait Comparable: EntropyStructure {
    fn dotplus_entropy(&self, x: &Self::Element, y: &Self::Element) -> f64;

    /// The merged element, or `None` when ξ∔η leaves the carrier.
    fn dotplus(&self, _x: &Self::Element, _y: &Self::Element) -> Option<Self::Element> {
        None
    }

    /// Group inverse, for structures that are groups under ∔.
    fn negate(&self, _x: &Self::Element) -> Option<Self::Element> {
        None
    }

    /// The pair whose ∔ defines "ξ with itself".
    fn diagonal(&self, x: &Self::Element) -> (Self::Element, Self::Element) {
        (x.clone(), x.clone())
    }

    /// Elements of G_s that are paired with `x` in neutrality laws.
    fn partners(&self, _x: &Self::Element) -> Vec<Self::Element> {
        self.deterministic_elements()
    }

    fn undetermined_sign(&self) -> Sign {
        Sign::Plus
    }

    fn closed_form(&self) -> Option<ClosedForm> {
        None
    }

    /// False when (ξ∔η)∔ν and ξ∔(η∔ν) may differ in entropy.
    fn hemi_associative(&self) -> bool {
        true
    }

    /// The · operator of a hemi-ring.
    fn scale(&self, _x: &Self::Element, _y: &Self::Element) -> Option<Self::Element> {
        None
    }

    /// Candidates for left entropy-invariant elements.
    fn invariant_candidates(&self) -> Vec<Self::Element> {
        Vec::new()
    }
}

/// ⟦ξ⟧ after checking membership and the range of the entropy.
pub fn entropy_of<S: EntropyStructure>(s: &S, x: &S::Element) -> Result<f64> {
    s.validate(x)?;
    let h = s.entropy(x);
    if h.is_nan() || h < 0.0 {
        return Err(Error::Domain(format!("entropy {h} at {}", s.describe(x))));
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { n: usize, seed: u64 },
}

/// Cases fed to the checkers.
#[derive(Clone, Debug)]
pub struct Sample<E> {
    pub elements: Vec<E>,
    pub pairs: Vec<(E, E)>,
    pub triples: Vec<(E, E, E)>,
    pub mode: CheckMode,
}

impl<E: Clone> Sample<E> {
    /// Every ordered pair and triple of `elements`.
    pub fn exhaustive(elements: Vec<E>) -> Self {
        let mut pairs = Vec::with_capacity(elements.len() * elements.len());
        let mut triples = Vec::new();
        for a in &elements {
            for b in &elements {
                pairs.push((a.clone(), b.clone()));
                for c in &elements {
                    triples.push((a.clone(), b.clone(), c.clone()));
                }
            }
        }
        Sample {
            elements,
            pairs,
            triples,
            mode: CheckMode::Exhaustive,
        }
    }

    /// `n` elements, pairs and triples from the structure's sampler.
    pub fn draw<S: EntropyStructure<Element = E>>(s: &S, n: usize, seed: u64) -> Result<Self> {
        let mut rng = par::rng(seed);
        let mut elements = Vec::with_capacity(n);
        let mut pairs = Vec::with_capacity(n);
        let mut triples = Vec::with_capacity(n);
        for _ in 0..n {
            elements.push(s.sample(&mut rng).ok_or(Error::NoSampler)?);
        }
        for _ in 0..n {
            pairs.push(s.sample_pair(&mut rng).ok_or(Error::NoSampler)?);
        }
        for _ in 0..n {
            let (a, b) = s.sample_pair(&mut rng).ok_or(Error::NoSampler)?;
            let c = s.sample(&mut rng).ok_or(Error::NoSampler)?;
            triples.push((a, b, c));
        }
        Ok(Sample {
            elements,
            pairs,
            triples,
            mode: CheckMode::Sampled { n, seed },
        })
    }

    /// Sampled pairs and triples built from a fixed element list.
    pub fn resample(elements: Vec<E>, n: usize, seed: u64) -> Self {
        let mut rng = par::rng(seed);
        let k = elements.len();
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| elements[rng.gen_range(0..k)].clone();
        let pairs = (0..n).map(|_| (pick(&mut rng), pick(&mut rng))).collect();
        let triples = (0..n)
            .map(|_| (pick(&mut rng), pick(&mut rng), pick(&mut rng)))
            .collect();
        Sample {
            elements,
            pairs,
            triples,
            mode: CheckMode::Sampled { n, seed },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub case: usize,
    pub elements: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub law: String,
    pub status: Status,
    pub cases: usize,
    pub mode: CheckMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn skipped(law: &str, mode: CheckMode, reason: &str) -> Self {
        AxiomReport {
            law: law.to_string(),
            status: Status::Skipped,
            cases: 0,
            mode,
            counterexample: None,
            note: Some(reason.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Evaluate `n` cases and keep the lowest-index failure.
pub(crate) fn run_law<F>(law: &str, mode: CheckMode, n: usize, f: F) -> AxiomReport
where
    F: Fn(usize) -> Option<Counterexample> + Sync + Send,
{
    let counterexample = par::find_first(n, f);
    AxiomReport {
        law: law.to_string(),
        status: if counterexample.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        cases: n,
        mode,
        counterexample,
        note: None,
    }
}

pub(crate) fn witness<S: EntropyStructure>(
    s: &S,
    case: usize,
    xs: &[&S::Element],
    detail: String,
) -> Counterexample {
    Counterexample {
        case,
        elements: xs.iter().map(|x| s.describe(x)).collect(),
        detail,
    }
}

pub fn check_hemi_group<S: EntropyStructure>(s: &S, sample: &Sample<S::Element>) -> AxiomReport {
    let tol = s.tolerance();
    run_law("hemi_group", sample.mode, sample.pairs.len(), |i| {
        let (x, y) = &sample.pairs[i];
        let lhs = s.circ_entropy(x, y);
        let rhs = s.entropy(x) + s.entropy(y);
        (!tol.eq(lhs, rhs)).then(|| witness(s, i, &[x, y], format!("⟦ξ∘ν⟧ = {lhs}, ⟦ξ⟧+⟦ν⟧ = {rhs}")))
    })
}

pub fn check_hemi_commutative<S: EntropyStructure>(
    s: &S,
    sample: &Sample<S::Element>,
) -> AxiomReport {
    let tol = s.tolerance();
    run_law("hemi_commutative", sample.mode, sample.pairs.len(), |i| {
        let (x, y) = &sample.pairs[i];
        let (l, r) = (s.circ_entropy(x, y), s.circ_entropy(y, x));
        (!tol.eq(l, r)).then(|| witness(s, i, &[x, y], format!("⟦ξ∘ν⟧ = {l}, ⟦ν∘ξ⟧ = {r}")))
    })
}

/// Nonnegativity, G_s ⊆ G₀, and G₀ ≠ ∅, G₀ ≠ carrier on the sample.
pub fn check_entropy_measure<S: EntropyStructure>(
    s: &S,
    sample: &Sample<S::Element>,
) -> Vec<AxiomReport> {
    let els = &sample.elements;
    let nonneg = run_law("entropy_nonnegative", sample.mode, els.len(), |i| {
        let h = s.entropy(&els[i]);
        (h.is_nan() || h < 0.0).then(|| witness(s, i, &[&els[i]], format!("⟦ξ⟧ = {h}")))
    });
    let det = s.deterministic_elements();
    let mut candidates: Vec<S::Element> = det.clone();
    candidates.extend(els.iter().cloned());
    let det_zero = run_law("deterministic_is_zero", sample.mode, candidates.len(), |i| {
        let x = &candidates[i];
        (s.is_deterministic(x) && !s.is_zero(x))
            .then(|| witness(s, i, &[x], format!("deterministic with ⟦ξ⟧ = {}", s.entropy(x))))
    });
    let any_zero = det.iter().chain(els.iter()).any(|x| s.is_zero(x));
    let any_positive = els.iter().any(|x| !s.is_zero(x));
    let proper = AxiomReport {
        law: "zero_set_proper".into(),
        status: if any_zero && any_positive {
            Status::Pass
        } else {
            Status::Fail
        },
        cases: candidates.len(),
        mode: sample.mode,
        counterexample: (!(any_zero && any_positive)).then(|| Counterexample {
            case: 0,
            elements: vec![],
            detail: format!("zero found: {any_zero}, positive found: {any_positive}"),
        }),
        note: None,
    };
    vec![nonneg, det_zero, proper]
}

/// Sign of ξ ↦ ⟦ξ∔ξ⟧ − 2⟦ξ⟧ over the sample.
pub fn check_comparable<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> Result<SignCheck> {
    let tol = s.tolerance();
    let defects: Vec<(f64, f64)> = par::map(sample.elements.len(), |i| {
        let (a, b) = s.diagonal(&sample.elements[i]);
        let merged = s.circ_entropy(&a, &b);
        (s.dotplus_entropy(&a, &b) - merged, merged)
    });
    let pos = defects.iter().position(|&(d, sc)| d > tol.slack(sc));
    let neg = defects.iter().position(|&(d, sc)| d < -tol.slack(sc));
    match (pos, neg) {
        (Some(p), Some(n)) => Err(Error::NotComparable {
            positive: s.describe(&sample.elements[p]),
            negative: s.describe(&sample.elements[n]),
        }),
        (Some(_), None) => Ok(SignCheck::Plus),
        (None, Some(_)) => Ok(SignCheck::Minus),
        (None, None) => Ok(SignCheck::Undetermined),
    }
}

pub fn check_dotplus_neutral<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> AxiomReport {
    let tol = s.tolerance();
    let cases: Vec<(usize, S::Element)> = sample
        .elements
        .iter()
        .enumerate()
        .flat_map(|(i, x)| s.partners(x).into_iter().map(move |e| (i, e)))
        .collect();
    if cases.is_empty() {
        return AxiomReport::skipped("dotplus_neutral", sample.mode, "G_s is empty");
    }
    run_law("dotplus_neutral", sample.mode, cases.len(), |k| {
        let (i, eps) = &cases[k];
        let x = &sample.elements[*i];
        let h = s.entropy(x);
        let right = s.dotplus_entropy(x, eps);
        let left = s.dotplus_entropy(eps, x);
        (!(tol.eq(right, h) && tol.eq(left, h))).then(|| {
            witness(s, k, &[x, eps], format!("⟦ξ∔ε⟧ = {right}, ⟦ε∔ξ⟧ = {left}, ⟦ξ⟧ = {h}"))
        })
    })
}

fn scaled_merged_entropy<S: Comparable>(s: &S, x: &S::Element, m: &Merged<S::Element>) -> Option<f64> {
    Some(match m {
        Merged::Element(e) => s.entropy(&s.scale(x, e)?),
        Merged::Formal(p) => s.entropy(&s.scale(x, &p.left)?) + s.entropy(&s.scale(x, &p.right)?),
    })
}

fn has_scale<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> bool {
    sample
        .elements
        .first()
        .map(|x| s.scale(x, x).is_some())
        .unwrap_or(false)
}

/// ⟦eη∔eν⟧ = ⟦η∔ν⟧ on every sampled pair.
pub fn check_left_invariant<S: Comparable>(
    s: &S,
    e: &S::Element,
    sample: &Sample<S::Element>,
) -> AxiomReport {
    let tol = s.tolerance();
    let law = format!("left_invariant[{}]", s.describe(e));
    if s.scale(e, e).is_none() {
        return AxiomReport::skipped(&law, sample.mode, "no scale operator");
    }
    run_law(&law, sample.mode, sample.pairs.len(), |i| {
        let (eta, nu) = &sample.pairs[i];
        let lhs = s.dotplus_entropy(&s.scale(e, eta)?, &s.scale(e, nu)?);
        let rhs = s.dotplus_entropy(eta, nu);
        (!tol.eq(lhs, rhs)).then(|| witness(s, i, &[e, eta, nu], format!("⟦eη∔eν⟧ = {lhs}, ⟦η∔ν⟧ = {rhs}")))
    })
}

/// The four hemi-ring laws.
pub fn check_hemi_ring<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> Vec<AxiomReport> {
    let mode = sample.mode;
    let names = [
        "deterministic_transformations",
        "deterministic_in_transformations",
        "right_hemi_distributive",
        "left_invariant",
    ];
    if !has_scale(s, sample) {
        return names
            .iter()
            .map(|n| AxiomReport::skipped(n, mode, "no scale operator"))
            .collect();
    }
    let tol = s.tolerance();
    let transformation = |xi: &S::Element, nu: &S::Element, eta: &S::Element| -> Option<(f64, f64)> {
        let lhs = scaled_merged_entropy(s, xi, &s.circ(nu, eta))?;
        let rhs = s.circ_entropy(&s.scale(xi, nu)?, &s.scale(xi, eta)?);
        Some((lhs, rhs))
    };
    let els = &sample.elements;
    let pairs = &sample.pairs;
    let n = pairs.len();
    let r1 = run_law(names[0], mode, n, |i| {
        let xi = &els[i % els.len()];
        let (nu, eta) = &pairs[i];
        let (l, r) = transformation(xi, nu, eta)?;
        (!tol.eq(l, r)).then(|| witness(s, i, &[xi, nu, eta], format!("⟦ξ(ν∘η)⟧ = {l}, ⟦ξν∘ξη⟧ = {r}")))
    });
    let det = s.deterministic_elements();
    let r2 = run_law(names[1], mode, det.len() * n, |k| {
        let eps = &det[k / n];
        let (nu, eta) = &pairs[k % n];
        let (l, r) = transformation(eps, nu, eta)?;
        (!tol.eq(l, r)).then(|| witness(s, k, &[eps, nu, eta], format!("⟦ε(ν∘η)⟧ = {l}, ⟦εν∘εη⟧ = {r}")))
    });
    let triples = &sample.triples;
    let r3 = if triples
        .first()
        .map(|(a, b, _)| s.dotplus(a, b).is_some())
        .unwrap_or(false)
    {
        run_law(names[2], mode, triples.len(), |i| {
            let (xi, nu, eta) = &triples[i];
            let lhs = s.entropy(&s.scale(&s.dotplus(xi, nu)?, eta)?);
            let rhs = s.dotplus_entropy(&s.scale(xi, eta)?, &s.scale(nu, eta)?);
            (!tol.eq(lhs, rhs))
                .then(|| witness(s, i, &[xi, nu, eta], format!("⟦(ξ∔ν)η⟧ = {lhs}, ⟦ξη∔νη⟧ = {rhs}")))
        })
    } else {
        AxiomReport::skipped(names[2], mode, "∔ leaves the carrier")
    };
    let candidates = s.invariant_candidates();
    let r4 = if candidates.is_empty() {
        AxiomReport::skipped(names[3], mode, "no invariant candidates registered")
    } else {
        let reports: Vec<AxiomReport> = candidates
            .iter()
            .map(|e| check_left_invariant(s, e, sample))
            .collect();
        match reports.iter().find(|r| r.status == Status::Pass) {
            Some(r) => AxiomReport {
                law: names[3].into(),
                note: Some(format!("witnessed by {}", r.law)),
                ..r.clone()
            },
            None => AxiomReport {
                law: names[3].into(),
                ..reports[0].clone()
            },
        }
    };
    vec![r1, r2, r3, r4]
}

/// Candidates from [`Comparable::invariant_candidates`] that pass on the sample.
pub fn find_invariant_elements<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> Vec<S::Element> {
    s.invariant_candidates()
        .into_iter()
        .filter(|e| check_left_invariant(s, e, sample).status == Status::Pass)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RescalingReport {
    pub reports: Vec<AxiomReport>,
    /// Global constant c in c_ξ = c⟦ξ⟧, when the law holds.
    #[serde(with = "crate::extreal::opt")]
    pub c: Option<f64>,
    /// Fitted c_ξ, aligned with the sample elements.
    pub c_xi: Vec<f64>,
}

pub fn check_rescaling<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> RescalingReport {
    let mode = sample.mode;
    let laws = ["left_rescaling", "scale_invariance", "invariant_normalization"];
    if !has_scale(s, sample) {
        return RescalingReport {
            reports: laws
                .iter()
                .map(|l| AxiomReport::skipped(l, mode, "no scale operator"))
                .collect(),
            c: None,
            c_xi: vec![],
        };
    }
    let tol = s.tolerance();
    let els = &sample.elements;
    let probes: Vec<&S::Element> = els.iter().filter(|v| !s.is_zero(v)).take(64).collect();
    let Some(nu0) = probes.first() else {
        return RescalingReport {
            reports: laws
                .iter()
                .map(|l| AxiomReport::skipped(l, mode, "no element with positive entropy"))
                .collect(),
            c: None,
            c_xi: vec![],
        };
    };
    let c_xi: Vec<f64> = par::map(els.len(), |i| {
        s.scale(&els[i], nu0)
            .map(|p| s.entropy(&p) / s.entropy(nu0))
            .unwrap_or(f64::NAN)
    });
    let k = probes.len();
    let r1 = run_law(laws[0], mode, els.len() * k, |idx| {
        let (i, j) = (idx / k, idx % k);
        let (xi, nu) = (&els[i], probes[j]);
        let lhs = s.entropy(&s.scale(xi, nu)?);
        let rhs = c_xi[i] * s.entropy(nu);
        (!tol.eq(lhs, rhs)).then(|| witness(s, idx, &[xi, nu], format!("⟦ξν⟧ = {lhs}, c_ξ⟦ν⟧ = {rhs}")))
    });
    let ratios: Vec<(usize, f64)> = els
        .iter()
        .enumerate()
        .filter(|(_, x)| !s.is_zero(x))
        .map(|(i, x)| (i, c_xi[i] / s.entropy(x)))
        .collect();
    let c = ratios.first().map(|&(_, r)| r);
    let r2 = match c {
        None => AxiomReport::skipped(laws[1], mode, "no element with positive entropy"),
        Some(c0) => run_law(laws[1], mode, ratios.len(), |j| {
            let (i, r) = ratios[j];
            (!tol.eq(r, c0))
                .then(|| witness(s, j, &[&els[i]], format!("c_ξ/⟦ξ⟧ = {r}, expected {c0}")))
        }),
    };
    let invariant = find_invariant_elements(s, sample);
    let r3 = match (invariant.first(), c) {
        (Some(e), Some(c0)) if r2.status == Status::Pass => {
            let he = s.entropy(e);
            let ok = he > 0.0 && tol.eq(c0, 1.0 / he);
            AxiomReport {
                law: laws[2].into(),
                status: if ok { Status::Pass } else { Status::Fail },
                cases: 1,
                mode,
                counterexample: (!ok).then(|| witness(s, 0, &[e], format!("c = {c0}, 1/⟦e⟧ = {}", 1.0 / he))),
                note: None,
            }
        }
        (None, _) => AxiomReport::skipped(laws[2], mode, "no left entropy-invariant element"),
        _ => AxiomReport::skipped(laws[2], mode, "scale invariance does not hold"),
    };
    let global = if r1.status == Status::Pass && r2.status == Status::Pass {
        c
    } else {
        None
    };
    RescalingReport {
        reports: vec![r1, r2, r3],
        c: global,
        c_xi,
    }
}

/// Least-squares fit of value = b·|μ|^α in log-log coordinates.
/// Returns (b, α, max relative residual).
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(m, v)| *m != 0.0 && *v > 0.0)
        .map(|(m, v)| (m.abs().ln(), v.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let alpha = sxy / sxx;
    let b = (my - alpha * mx).exp();
    let resid = points
        .iter()
        .map(|(m, v)| {
            let pred = b * m.abs().powf(alpha);
            if *v == 0.0 && pred == 0.0 {
                0.0
            } else {
                (pred - v).abs() / v.abs().max(pred.abs())
            }
        })
        .fold(0.0, f64::max);
    Some((b, alpha, resid))
}

/// Run the construction-time checks every catalog instance must pass.
pub fn self_check<S: Comparable>(s: &S, sample: &Sample<S::Element>) -> Result<Vec<AxiomReport>> {
    let mut reports = vec![check_hemi_group(s, sample), check_hemi_commutative(s, sample)];
    reports.extend(check_entropy_measure(s, sample));
    reports.push(check_dotplus_neutral(s, sample));
    check_comparable(s, sample)?;
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Finite structures

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Index(usize),
    Formal,
}

/// An explicit finite carrier with full operation tables.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteStructure {
    pub labels: Vec<String>,
    pub entropy: Vec<f64>,
    /// `None` means ∘ is formal everywhere.
    pub circ: Option<Vec<Vec<Cell>>>,
    pub dotplus: Vec<Vec<usize>>,
    pub scale: Option<Vec<Vec<usize>>>,
    pub zero: Vec<usize>,
    pub deterministic: Vec<usize>,
    pub tolerance: Tolerance,
    pub fallback_sign: Sign,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FiniteJson {
    elements: Vec<serde_json::Value>,
    #[serde(with = "entropy_vec")]
    entropy: Vec<f64>,
    circ: serde_json::Value,
    dotplus: Vec<Vec<usize>>,
    #[serde(default)]
    scale: Option<Vec<Vec<usize>>>,
    zero: Vec<usize>,
    deterministic: Vec<usize>,
}

mod entropy_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Ext(#[serde(with = "crate::extreal")] f64);

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| Ext(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Ext>::deserialize(d)?.into_iter().map(|e| e.0).collect())
    }
}

impl FiniteStructure {
    pub fn new(
        labels: Vec<String>,
        entropy: Vec<f64>,
        circ: Option<Vec<Vec<Cell>>>,
        dotplus: Vec<Vec<usize>>,
        scale: Option<Vec<Vec<usize>>>,
        zero: Vec<usize>,
        deterministic: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        let schema = |m: String| Err(Error::Schema(m));
        if n == 0 {
            return schema("no elements".into());
        }
        if entropy.len() != n {
            return schema(format!("entropy has {} entries, expected {n}", entropy.len()));
        }
        if let Some(i) = entropy.iter().position(|h| h.is_nan() || *h < 0.0) {
            return schema(format!("entropy[{i}] = {} is not a nonnegative value", entropy[i]));
        }
        let check_table = |name: &str, t: &Vec<Vec<usize>>| -> Result<()> {
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(Error::Schema(format!("{name} must be {n}×{n}")));
            }
            if let Some((i, j)) = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| t[i][j] >= n)
            {
                return Err(Error::Schema(format!("{name}[{i}][{j}] = {} out of range", t[i][j])));
            }
            Ok(())
        };
        check_table("dotplus", &dotplus)?;
        if let Some(sc) = &scale {
            check_table("scale", sc)?;
        }
        if let Some(c) = &circ {
            if c.len() != n || c.iter().any(|r| r.len() != n) {
                return schema(format!("circ must be {n}×{n}"));
            }
            for (i, row) in c.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    if let Cell::Index(k) = cell {
                        if *k >= n {
                            return schema(format!("circ[{i}][{j}] = {k} out of range"));
                        }
                    }
                }
            }
        }
        if let Some(&i) = zero.iter().chain(&deterministic).find(|&&i| i >= n) {
            return schema(format!("index {i} out of range"));
        }
        if let Some(i) = deterministic.iter().find(|i| !zero.contains(i)) {
            return schema(format!("deterministic index {i} is not in the zero set"));
        }
        Ok(FiniteStructure {
            labels,
            entropy,
            circ,
            dotplus,
            scale,
            zero,
            deterministic,
            tolerance: Tolerance::default(),
            fallback_sign: Sign::Plus,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FiniteJson =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_value_parts(raw)
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let raw: FiniteJson = serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_value_parts(raw)
    }

    fn from_value_parts(raw: FiniteJson) -> Result<Self> {
        let labels = raw
            .elements
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        let circ = match &raw.circ {
            serde_json::Value::String(s) if s == "formal" => None,
            serde_json::Value::Array(rows) => {
                let mut table = Vec::with_capacity(rows.len());
                for (i, row) in rows.iter().enumerate() {
                    let cells = row
                        .as_array()
                        .ok_or_else(|| Error::Schema(format!("circ row {i} is not an array")))?;
                    let mut out = Vec::with_capacity(cells.len());
                    for (j, c) in cells.iter().enumerate() {
                        out.push(match c {
                            serde_json::Value::String(m) if m == "*" => Cell::Formal,
                            serde_json::Value::Number(k) if k.as_u64().is_some() => {
                                Cell::Index(k.as_u64().unwrap() as usize)
                            }
                            other => {
                                return Err(Error::Schema(format!("circ[{i}][{j}] = {other} is invalid")))
                            }
                        });
                    }
                    table.push(out);
                }
                Some(table)
            }
            other => return Err(Error::Schema(format!("circ must be \"formal\" or a table, got {other}"))),
        };
        Self::new(labels, raw.entropy, circ, raw.dotplus, raw.scale, raw.zero, raw.deterministic)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let circ = match &self.circ {
            None => serde_json::Value::String("formal".into()),
            Some(t) => serde_json::Value::Array(
                t.iter()
                    .map(|r| {
                        serde_json::Value::Array(
                            r.iter()
                                .map(|c| match c {
                                    Cell::Formal => serde_json::Value::String("*".into()),
                                    Cell::Index(k) => serde_json::Value::from(*k),
                                })
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        };
        serde_json::to_value(FiniteJson {
            elements: self.labels.iter().map(|l| serde_json::Value::String(l.clone())).collect(),
            entropy: self.entropy.clone(),
            circ,
            dotplus: self.dotplus.clone(),
            scale: self.scale.clone(),
            zero: self.zero.clone(),
            deterministic: self.deterministic.clone(),
        })
        .expect("finite structure serializes")
    }

    /// Tabulate a structure on a list of elements closed under ∔.
    pub fn tabulate<S, F>(s: &S, elements: &[S::Element], same: F) -> Result<Self>
    where
        S: Comparable,
        F: Fn(&S::Element, &S::Element) -> bool,
    {
        let find = |x: &S::Element| elements.iter().position(|e| same(e, x));
        let n = elements.len();
        let mut dotplus = vec![vec![0; n]; n];
        let mut circ = vec![vec![Cell::Formal; n]; n];
        let mut natural = false;
        let mut scale: Option<Vec<Vec<usize>>> = Some(vec![vec![0; n]; n]);
        for i in 0..n {
            for j in 0..n {
                let d = s
                    .dotplus(&elements[i], &elements[j])
                    .ok_or_else(|| Error::Domain("∔ leaves the carrier".into()))?;
                dotplus[i][j] = find(&d).ok_or_else(|| {
                    Error::Domain(format!("list is not closed under ∔ at {}", s.describe(&d)))
                })?;
                if let Merged::Element(c) = s.circ(&elements[i], &elements[j]) {
                    if let Some(k) = find(&c) {
                        circ[i][j] = Cell::Index(k);
                        natural = true;
                    }
                }
                scale = match (scale, s.scale(&elements[i], &elements[j]).and_then(|p| find(&p))) {
                    (Some(mut t), Some(k)) => {
                        t[i][j] = k;
                        Some(t)
                    }
                    _ => None,
                };
            }
        }
        let entropy: Vec<f64> = elements.iter().map(|e| s.entropy(e)).collect();
        let zero = (0..n).filter(|&i| s.is_zero(&elements[i])).collect();
        let deterministic = (0..n).filter(|&i| s.is_deterministic(&elements[i])).collect();
        let labels = elements.iter().map(|e| s.describe(e)).collect();
        let mut out = Self::new(
            labels,
            entropy,
            natural.then_some(circ),
            dotplus,
            scale,
            zero,
            deterministic,
        )?;
        out.tolerance = s.tolerance();
        out.fallback_sign = s.undetermined_sign();
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn all(&self) -> Sample<usize> {
        Sample::exhaustive((0..self.len()).collect())
    }

    /// Declared zero set agrees with the entropy vector.
    pub fn check_zero_set(&self) -> AxiomReport {
        let n = self.len();
        run_law("zero_set_consistent", CheckMode::Exhaustive, n, |i| {
            let declared = self.zero.contains(&i);
            let actual = self.entropy[i] <= self.tolerance.abs;
            (declared != actual).then(|| Counterexample {
                case: i,
                elements: vec![self.labels[i].clone()],
                detail: format!("declared zero: {declared}, ⟦ξ⟧ = {}", self.entropy[i]),
            })
        })
    }
}

impl EntropyStructure for FiniteStructure {
    type Element = usize;

    fn name(&self) -> String {
        format!("finite[{}]", self.len())
    }

    fn entropy(&self, x: &usize) -> f64 {
        self.entropy[*x]
    }

    fn validate(&self, x: &usize) -> Result<()> {
        if *x < self.len() {
            Ok(())
        } else {
            Err(Error::Domain(format!("index {x} ≥ {}", self.len())))
        }
    }

    fn circ(&self, x: &usize, y: &usize) -> Merged<usize> {
        match self.circ.as_ref().map(|t| t[*x][*y]) {
            Some(Cell::Index(k)) => Merged::Element(k),
            _ => Merged::Formal(FormalPair { left: *x, right: *y }),
        }
    }

    fn is_zero(&self, x: &usize) -> bool {
        self.zero.contains(x)
    }

    fn is_deterministic(&self, x: &usize) -> bool {
        self.deterministic.contains(x)
    }

    fn deterministic_elements(&self) -> Vec<usize> {
        self.deterministic.clone()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Option<usize> {
        Some(rng.gen_range(0..self.len()))
    }

    fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    fn describe(&self, x: &usize) -> String {
        self.labels
            .get(*x)
            .cloned()
            .unwrap_or_else(|| format!("#{x}"))
    }
}

impl Comparable for FiniteStructure {
    fn dotplus_entropy(&self, x: &usize, y: &usize) -> f64 {
        self.entropy[self.dotplus[*x][*y]]
    }

    fn dotplus(&self, x: &usize, y: &usize) -> Option<usize> {
        Some(self.dotplus[*x][*y])
    }

    fn undetermined_sign(&self) -> Sign {
        self.fallback_sign
    }

    fn scale(&self, x: &usize, y: &usize) -> Option<usize> {
        self.scale.as_ref().map(|t| t[*x][*y])
    }

    fn invariant_candidates(&self) -> Vec<usize> {
        if self.scale.is_some() {
            (0..self.len()).collect()
        } else {
            Vec::new()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Subsets of {0,1} under union, counting measure.
    fn sets2() -> FiniteStructure {
        FiniteStructure::from_json(
            r#"{"elements":["{}","{0}","{1}","{0,1}"],
                "entropy":[0,1,1,2],
                "circ":"formal",
                "dotplus":[[0,1,2,3],[1,1,3,3],[2,3,2,3],[3,3,3,3]],
                "scale":null,
                "zero":[0],
                "deterministic":[0]}"#,
        )
        .unwrap()
    }

    #[test]
    fn tolerance_semantics() {
        let t = Tolerance::default();
        assert!(t.eq(1.0, 1.0 + 1e-10));
        assert!(!t.eq(1.0, 1.0 + 1e-8));
        assert!(t.eq(0.0, 1e-13));
        assert!(t.eq(f64::INFINITY, f64::INFINITY));
        assert!(!t.eq(f64::INFINITY, 1.0));
        assert!(t.le(1.0 + 1e-10, 1.0, 1.0));
        assert!(t.le(1.0, f64::INFINITY, 0.0));
    }

    #[test]
    fn finite_sets_pass_everything() {
        let s = sets2();
        let all = s.all();
        assert_eq!(check_hemi_group(&s, &all).status, Status::Pass);
        assert_eq!(check_hemi_commutative(&s, &all).status, Status::Pass);
        assert_eq!(check_dotplus_neutral(&s, &all).status, Status::Pass);
        assert!(check_entropy_measure(&s, &all).iter().all(|r| r.status == Status::Pass));
        assert_eq!(check_comparable(&s, &all).unwrap(), SignCheck::Minus);
        assert_eq!(s.check_zero_set().status, Status::Pass);
        assert!(check_hemi_ring(&s, &all).iter().all(|r| r.status == Status::Skipped));
    }

    #[test]
    fn exhaustive_reports_are_reproducible() {
        let s = sets2();
        let a = check_dotplus_neutral(&s, &s.all());
        let b = check_dotplus_neutral(&s, &s.all());
        assert_eq!(a, b);
    }

    #[test]
    fn corrupted_table_gives_counterexample() {
        let mut s = sets2();
        s.dotplus[1][0] = 3;
        let r = check_dotplus_neutral(&s, &s.all());
        assert_eq!(r.status, Status::Fail);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.elements, vec!["{0}".to_string(), "{}".to_string()]);
    }

    #[test]
    fn natural_circ_must_be_additive() {
        let mut s = sets2();
        // ∘ sends ({0},{1}) to {0,1}: additive. ({0},{0}) to {0}: not additive.
        let mut circ = vec![vec![Cell::Formal; 4]; 4];
        circ[1][2] = Cell::Index(3);
        s.circ = Some(circ.clone());
        assert_eq!(check_hemi_group(&s, &s.all()).status, Status::Pass);
        circ[1][1] = Cell::Index(1);
        s.circ = Some(circ);
        let r = check_hemi_group(&s, &s.all());
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.counterexample.unwrap().elements, vec!["{0}", "{0}"]);
    }

    #[test]
    fn incomparable_structure_is_reported() {
        let mut s = sets2();
        // {0}∔{0} = {0,1}: defect +0 for {0} would be 2−2 = 0; make {1}∔{1} = {0,1}
        // and {0}∔{0} = {} to get both signs.
        s.dotplus[2][2] = 3;
        s.entropy[3] = 3.0;
        s.dotplus[1][1] = 0;
        match check_comparable(&s, &s.all()) {
            Err(Error::NotComparable { positive, negative }) => {
                assert_eq!(positive, "{1}");
                assert_eq!(negative, "{0}");
            }
            other => panic!("expected NotComparable, got {other:?}"),
        }
    }

    #[test]
    fn json_schema_errors() {
        assert!(matches!(FiniteStructure::from_json("{"), Err(Error::Schema(_))));
        let bad_dims = r#"{"elements":["a","b"],"entropy":[0,1],"circ":"formal",
            "dotplus":[[0,1]],"scale":null,"zero":[0],"deterministic":[0]}"#;
        assert!(matches!(FiniteStructure::from_json(bad_dims), Err(Error::Schema(_))));
        let det_not_zero = r#"{"elements":["a","b"],"entropy":[0,1],"circ":"formal",
            "dotplus":[[0,1],[1,1]],"scale":null,"zero":[0],"deterministic":[1]}"#;
        assert!(matches!(FiniteStructure::from_json(det_not_zero), Err(Error::Schema(_))));
        let unknown = r#"{"elements":["a"],"entropy":[0],"circ":"formal",
            "dotplus":[[0]],"zero":[0],"deterministic":[0],"extra":1}"#;
        assert!(matches!(FiniteStructure::from_json(unknown), Err(Error::Schema(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = sets2();
        let back = FiniteStructure::from_value(s.to_json()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn entropy_of_checks_domain() {
        let s = sets2();
        assert_eq!(entropy_of(&s, &3).unwrap(), 2.0);
        assert!(matches!(entropy_of(&s, &9), Err(Error::Domain(_))));
        assert_eq!(entropy_of(&s, &0).unwrap(), 0.0);
    }

    #[test]
    fn power_law_fit_recovers_parameters() {
        let pts: Vec<(f64, f64)> = [-3.0, -1.5, 0.5, 2.0, 4.0]
            .iter()
            .map(|&m: &f64| (m, 2.5 * m.abs().powf(1.7)))
            .collect();
        let (b, a, r) = fit_power_law(&pts).unwrap();
        assert!((b - 2.5).abs() < 1e-12 && (a - 1.7).abs() < 1e-12 && r < 1e-12);
    }
}

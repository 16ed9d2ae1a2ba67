//! Entropies recovered from kernels, and the two directions between
//! structures and proper scoring rules.
//!
//! Two signs appear here and are kept apart: `kernel_sign` is the e in
//! e⟨ν,η⟩ = ⟦ν∔η⟧ − ⟦ν⟧ − ⟦η⟧, unrelated to entropy-invariant elements.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::algebra::{Comparable, EntropyStructure, Sample, Sign};
use crate::comparison::{rho_raw, scalar_a, ComparisonProfile};
use crate::error::{Error, Result};
use crate::par;

/// Relations whose sup has grown by less than this power of two per
/// doubling of the depth count as bounded.
pub const GROWTH_LIMIT: f64 = 0.05;

/// Default depth of the m, n lattice for one-generator kernels.
pub const DEFAULT_DEPTH: u64 = 256;

// ---------------------------------------------------------------------------
// Series identities

fn sum_to(series: &[f64], upto: usize) -> Result<f64> {
    if upto > series.len() {
        return Err(Error::InsufficientSeries {
            needed: upto,
            have: series.len(),
        });
    }
    Ok(series[..upto].iter().sum())
}

/// ⟨iξ, jξ⟩ from the series s_k = ⟨kξ, ξ⟩ by
/// Σ_{k<i+j} s_k − Σ_{k<j} s_k − Σ_{k<i} s_k.
pub fn kernel_sums(series: &[f64], i: usize, j: usize) -> Result<f64> {
    if i == 0 || j == 0 {
        return Err(Error::Domain("multiples start at 1".into()));
    }
    Ok(sum_to(series, i + j - 1)? - sum_to(series, j - 1)? - sum_to(series, i - 1)?)
}

/// Σ_{n<m} ⟨niξ, iξ⟩ expressed through the series of ξ:
/// Σ_{k<mi} s_k − m Σ_{k<i} s_k.
pub fn multiple_sums(series: &[f64], i: usize, m: usize) -> Result<f64> {
    if i == 0 || m == 0 {
        return Err(Error::Domain("multiples start at 1".into()));
    }
    Ok(sum_to(series, m * i - 1)? - m as f64 * sum_to(series, i - 1)?)
}

// ---------------------------------------------------------------------------
// One-generator kernels

/// mη = nξ, serialized as `[m, n, "label"]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation(pub u64, pub u64, pub String);

impl Relation {
    pub fn m(&self) -> u64 {
        self.0
    }

    pub fn n(&self) -> u64 {
        self.1
    }

    pub fn label(&self) -> &str {
        &self.2
    }

    /// η = (n/m)ξ, labelled by the reduced fraction.
    pub fn multiple(m: u64, n: u64) -> Self {
        let g = gcd(m, n);
        Relation(m, n, format!("{}/{}", n / g, m / g))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Access to the two partial sums the construction needs.
pub trait KernelSource: Sync {
    /// Σ_{k=1}^{upto} ⟨kξ, ξ⟩.
    fn xi_sum(&self, upto: u64) -> Result<f64>;
    /// Σ_{k=1}^{upto} ⟨kη, η⟩ for the η of `rel`.
    fn eta_sum(&self, rel: &Relation, upto: u64) -> Result<f64>;
}

/// A tabulated kernel: `series[k−1] = ⟨kξ,ξ⟩` and, per relation label,
/// the series of η.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub series: Vec<f64>,
    #[serde(default)]
    pub targets: BTreeMap<String, Vec<f64>>,
    pub relations: Vec<Relation>,
    /// The kernel sign e, ±1.
    pub sign: i8,
}

impl KernelSpec {
    pub fn kernel_sign(&self) -> Result<Sign> {
        match self.sign {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            s => Err(Error::Schema(format!("sign must be ±1, got {s}"))),
        }
    }

    /// Tabulates ⟨·,·⟩_a of a structure along ξ and along each target η
    /// with mη = nξ. Multiples are formed by repeated ∔.
    pub fn from_structure<S: Comparable>(
        s: &S,
        profile: &ComparisonProfile,
        xi: &S::Element,
        targets: &[(u64, u64, S::Element)],
    ) -> Result<Self> {
        let longest_n = targets.iter().map(|t| t.1).max().unwrap_or(1);
        let series = structure_series(s, profile, xi, longest_n as usize)?;
        let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut relations = Vec::with_capacity(targets.len());
        for (m, n, eta) in targets {
            let rel = Relation::multiple(*m, *n);
            if !map.contains_key(rel.label()) || map[rel.label()].len() < *m as usize {
                map.insert(rel.label().to_string(), structure_series(s, profile, eta, *m as usize)?);
            }
            relations.push(rel);
        }
        Ok(KernelSpec {
            series,
            targets: map,
            relations,
            sign: if profile.sign == Sign::Plus { 1 } else { -1 },
        })
    }
}

fn structure_series<S: Comparable>(
    s: &S,
    profile: &ComparisonProfile,
    x: &S::Element,
    len: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    let mut acc = x.clone();
    for k in 1..=len {
        if k > 1 {
            acc = s
                .dotplus(&acc, x)
                .ok_or_else(|| Error::NotApplicable(format!("{}∔ξ leaves the carrier", k - 1)))?;
        }
        out.push(scalar_a(s, profile, &acc, x)?);
    }
    Ok(out)
}

impl KernelSource for KernelSpec {
    fn xi_sum(&self, upto: u64) -> Result<f64> {
        sum_to(&self.series, upto as usize)
    }

    fn eta_sum(&self, rel: &Relation, upto: u64) -> Result<f64> {
        if upto == 0 {
            return Ok(0.0);
        }
        let s = self
            .targets
            .get(rel.label())
            .ok_or_else(|| Error::Schema(format!("no series for target {}", rel.label())))?;
        sum_to(s, upto as usize)
    }
}

/// A kernel on the positive rational multiples of one generator,
/// ⟨sξ, tξ⟩ = f(s, t). Relations are η = (n/m)ξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplesKernel {
    /// st·g, the inner product on a line with ⟨ξ,ξ⟩ = g.
    Dot { gram: f64 },
    /// ((s∧t)·ξ)^α.
    MinPower { scale: f64, alpha: f64 },
}

impl MultiplesKernel {
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match *self {
            MultiplesKernel::Dot { gram } => s * t * gram,
            MultiplesKernel::MinPower { scale, alpha } => (s.min(t) * scale).powf(alpha),
        }
    }

    /// All relations with 1 ≤ m, n ≤ depth.
    pub fn lattice(depth: u64) -> Vec<Relation> {
        let mut out = Vec::with_capacity((depth * depth) as usize);
        for m in 1..=depth {
            for n in 1..=depth {
                out.push(Relation::multiple(m, n));
            }
        }
        out
    }
}

impl KernelSource for MultiplesKernel {
    fn xi_sum(&self, upto: u64) -> Result<f64> {
        Ok((1..=upto).map(|k| self.eval(k as f64, 1.0)).sum())
    }

    fn eta_sum(&self, rel: &Relation, upto: u64) -> Result<f64> {
        let r = rel.n() as f64 / rel.m() as f64;
        Ok((1..=upto).map(|k| self.eval(k as f64 * r, r)).sum())
    }
}

// ---------------------------------------------------------------------------
// Consistency constant

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignConsistency {
    pub kernel_sign: Sign,
    /// Sup over relations with m, n ≤ depth.
    pub sup: f64,
    /// The same sup at depth/2, when such relations exist.
    pub sup_half: Option<f64>,
    /// log₂(sup/sup_half).
    pub growth_exponent: Option<f64>,
    /// 2·sup − sup_half, never below `sup`.
    pub estimate: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Consistency {
    pub depth: u64,
    pub relations: usize,
    pub per_sign: Vec<SignConsistency>,
}

impl Consistency {
    pub fn for_sign(&self, e: Sign) -> &SignConsistency {
        self.per_sign.iter().find(|c| c.kernel_sign == e).expect("both signs present")
    }

    /// M_ξ for sign e, if that sign is feasible.
    pub fn m_xi(&self, e: Sign) -> Option<f64> {
        let c = self.for_sign(e);
        c.feasible.then_some(c.estimate)
    }

    pub fn feasible_signs(&self) -> Vec<Sign> {
        self.per_sign.iter().filter(|c| c.feasible).map(|c| c.kernel_sign).collect()
    }
}

/// (1/n)(Σ_{k<m}⟨kη,η⟩ − Σ_{k<n}⟨kξ,ξ⟩), before the sign.
fn relation_term<K: KernelSource + ?Sized>(k: &K, rel: &Relation) -> Result<f64> {
    let (m, n) = (rel.m(), rel.n());
    Ok((k.eta_sum(rel, m - 1)? - k.xi_sum(n - 1)?) / n as f64)
}

/// The sup defining M_ξ, for both signs, over the supplied relations with
/// m, n ≤ depth. The value at depth/2 gives a growth exponent (bounded
/// sups have exponent ≈ 0) and a first-order extrapolation.
pub fn consistency_m<K: KernelSource + ?Sized>(k: &K, relations: &[Relation], depth: u64) -> Result<Consistency> {
    let used: Vec<&Relation> = relations
        .iter()
        .filter(|r| r.m() >= 1 && r.n() >= 1 && r.m() <= depth && r.n() <= depth)
        .collect();
    if used.is_empty() {
        return Err(Error::NoRelations);
    }
    let terms = par::map(used.len(), |i| relation_term(k, used[i]));
    let terms: Vec<f64> = terms.into_iter().collect::<Result<_>>()?;
    let half = depth / 2;
    let mut per_sign = Vec::with_capacity(2);
    for e in [Sign::Plus, Sign::Minus] {
        let mut sup = f64::NEG_INFINITY;
        let mut sup_half = f64::NEG_INFINITY;
        for (r, t) in used.iter().zip(&terms) {
            let v = e.value() * t;
            sup = sup.max(v);
            if r.m() <= half && r.n() <= half {
                sup_half = sup_half.max(v);
            }
        }
        let sup_half = (sup_half > f64::NEG_INFINITY).then_some(sup_half);
        let growth_exponent = sup_half.filter(|h| *h > 0.0 && sup > 0.0).map(|h| (sup / h).log2());
        let estimate = match sup_half {
            Some(h) => (2.0 * sup - h).max(sup),
            None => sup,
        };
        let feasible = sup.is_finite()
            && sup > 1e-12
            && growth_exponent.map_or(sup_half.is_none(), |g| g < GROWTH_LIMIT);
        per_sign.push(SignConsistency {
            kernel_sign: e,
            sup,
            sup_half,
            growth_exponent,
            estimate,
            feasible,
        });
    }
    Ok(Consistency {
        depth,
        relations: used.len(),
        per_sign,
    })
}

/// ⟦η⟧ = (1/m)(n⟦ξ⟧ + e Σ_{k<n}⟨kξ,ξ⟩ − e Σ_{k<m}⟨kη,η⟩) for mη = nξ.
pub fn reconstruct_entropy<K: KernelSource + ?Sized>(
    k: &K,
    kernel_sign: Sign,
    base_entropy: f64,
    m_xi: f64,
    rel: &Relation,
) -> Result<f64> {
    let slack = 1e-9 * m_xi.abs().max(1.0);
    if base_entropy < m_xi - slack {
        return Err(Error::BaseBelowM {
            base: base_entropy,
            bound: m_xi,
        });
    }
    let (m, n) = (rel.m(), rel.n());
    if m == 0 || n == 0 {
        return Err(Error::Domain("relation needs m, n ≥ 1".into()));
    }
    let e = kernel_sign.value();
    let v = (n as f64 * base_entropy + e * k.xi_sum(n - 1)? - e * k.eta_sum(rel, m - 1)?) / m as f64;
    if v < -slack * n as f64 {
        return Err(Error::Range(format!(
            "reconstructed entropy {v} at {} is negative",
            rel.label()
        )));
    }
    Ok(v.max(0.0))
}

/// The entropy built from a multiples kernel, evaluated at rational
/// multiples p/q of the generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneGeneratorEntropy {
    pub kernel: MultiplesKernel,
    pub kernel_sign: Sign,
    pub base_entropy: f64,
    pub m_xi: f64,
}

impl OneGeneratorEntropy {
    /// Uses M_ξ from the lattice of the given depth; `base_entropy`
    /// defaults to M_ξ.
    pub fn build(kernel: MultiplesKernel, kernel_sign: Sign, depth: u64, base_entropy: Option<f64>) -> Result<Self> {
        let c = consistency_m(&kernel, &MultiplesKernel::lattice(depth), depth)?;
        let m_xi = c.m_xi(kernel_sign).ok_or_else(|| {
            Error::NotApplicable(format!("kernel sign {:?} is not feasible", kernel_sign))
        })?;
        Ok(OneGeneratorEntropy {
            kernel,
            kernel_sign,
            base_entropy: base_entropy.unwrap_or(m_xi),
            m_xi,
        })
    }

    /// ⟦(p/q)ξ⟧.
    pub fn at(&self, p: u64, q: u64) -> Result<f64> {
        reconstruct_entropy(&self.kernel, self.kernel_sign, self.base_entropy, self.m_xi, &Relation::multiple(q, p))
    }

    /// ⟦ν∔η⟧ − ⟦ν⟧ − ⟦η⟧ − e⟨ν,η⟩ for ν = (p1/q1)ξ, η = (p2/q2)ξ.
    pub fn additivity_residual(&self, (p1, q1): (u64, u64), (p2, q2): (u64, u64)) -> Result<f64> {
        let (ps, qs) = (p1 * q2 + p2 * q1, q1 * q2);
        let g = gcd(ps, qs);
        let joint = self.at(ps / g, qs / g)?;
        let kern = self.kernel.eval(p1 as f64 / q1 as f64, p2 as f64 / q2 as f64);
        Ok(joint - self.at(p1, q1)? - self.at(p2, q2)? - self.kernel_sign.value() * kern)
    }
}

// ---------------------------------------------------------------------------
// Finitely generated lattices

/// A kernel on ℕᵈ, the commutative semigroup generated by d generators.
/// A kernel on ℕᵈ, the commutative semigroup generated by d generators,
/// evaluated on its divisible hull so that rational multiples of a
/// generator make sense.
pub trait LatticeKernel: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64], v: &[f64]) -> f64;
}

/// ⟨u, v⟩ = uᵀGv.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticKernel {
    pub gram: Vec<Vec<f64>>,
}

impl QuadraticKernel {
    pub fn new(gram: Vec<Vec<f64>>) -> Result<Self> {
        let d = gram.len();
        if d == 0 || gram.iter().any(|r| r.len() != d) {
            return Err(Error::Schema("gram matrix must be square and non-empty".into()));
        }
        Ok(QuadraticKernel { gram })
    }
}

impl LatticeKernel for QuadraticKernel {
    fn dim(&self) -> usize {
        self.gram.len()
    }

    fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                s += u[i] * g * v[j];
            }
        }
        s
    }
}

fn eval_at<K: LatticeKernel>(k: &K, u: &[u64], v: &[u64]) -> f64 {
    let f = |w: &[u64]| w.iter().map(|c| *c as f64).collect::<Vec<f64>>();
    k.eval(&f(u), &f(v))
}

/// One generator's line inside a lattice kernel, with η = (n/m)ξ.
struct GeneratorLine<'a, K: LatticeKernel> {
    kernel: &'a K,
    index: usize,
}

impl<K: LatticeKernel> GeneratorLine<'_, K> {
    fn at(&self, r: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.kernel.dim()];
        v[self.index] = r;
        v
    }
}

impl<K: LatticeKernel> KernelSource for GeneratorLine<'_, K> {
    fn xi_sum(&self, upto: u64) -> Result<f64> {
        let g = self.at(1.0);
        Ok((1..=upto).map(|k| self.kernel.eval(&self.at(k as f64), &g)).sum())
    }

    fn eta_sum(&self, rel: &Relation, upto: u64) -> Result<f64> {
        let r = rel.n() as f64 / rel.m() as f64;
        let eta = self.at(r);
        Ok((1..=upto).map(|k| self.kernel.eval(&self.at(k as f64 * r), &eta)).sum())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    /// `zero_set`, `consistency`, `nonnegative_sum` or `decomposition_independent`.
    pub condition: String,
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Extension {
    Table {
        bases: Vec<f64>,
        entries: Vec<(Vec<u64>, f64)>,
    },
    Obstruction(ObstructionReport),
}

impl Extension {
    pub fn table(&self) -> Option<&[(Vec<u64>, f64)]> {
        match self {
            Extension::Table { entries, .. } => Some(entries),
            Extension::Obstruction(_) => None,
        }
    }
}

fn word(parts: &[Vec<u64>]) -> String {
    let terms: Vec<String> = parts
        .iter()
        .map(|p| {
            let t: Vec<String> = p
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(i, c)| format!("{c}·g{}", i + 1))
                .collect();
            t.join("+")
        })
        .collect();
    terms.join(" ∔ ")
}

fn add(u: &[u64], v: &[u64]) -> Vec<u64> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

/// Σ⟦a_i⟧ + e Σ_{i<ℓ} ⟨a_i, Σ_{j>i} a_j⟩ for a word of single-class parts.
fn word_value<K: LatticeKernel>(
    k: &K,
    e: f64,
    class_entropy: &dyn Fn(usize, u64) -> Result<f64>,
    parts: &[Vec<u64>],
) -> Result<f64> {
    let d = k.dim();
    let mut v = 0.0;
    for p in parts {
        let (i, c) = p.iter().enumerate().find(|(_, c)| **c > 0).map(|(i, c)| (i, *c)).unwrap_or((0, 0));
        if c > 0 {
            v += class_entropy(i, c)?;
        }
    }
    let mut tail = vec![0u64; d];
    for p in parts.iter().rev() {
        v += e * eval_at(k, p, &tail);
        tail = add(&tail, p);
    }
    Ok(v)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Extends per-generator reconstructions over ℕᵈ up to `extent` copies of
/// each generator, or reports the violated condition. `bases` default to
/// M_g per generator (lattice depth `depth`).
pub fn extend_entropy<K: LatticeKernel>(
    k: &K,
    kernel_sign: Sign,
    bases: Option<&[f64]>,
    extent: u64,
    depth: u64,
) -> Result<Extension> {
    let d = k.dim();
    let e = kernel_sign.value();
    let tol = 1e-9;
    let zero = vec![0u64; d];
    let mut points: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..d {
        points = points
            .into_iter()
            .flat_map(|p| {
                (0..=extent).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }

    // Z = {ε : ⟨ε,ε⟩ = 0} must be closed and orthogonal to everything.
    let zset: Vec<&Vec<u64>> = points.iter().filter(|p| eval_at(k, p, p).abs() <= tol).collect();
    for z in &zset {
        for p in &points {
            if eval_at(k, p, z).abs() > tol || eval_at(k, z, p).abs() > tol {
                return Ok(Extension::Obstruction(ObstructionReport {
                    condition: "zero_set".into(),
                    witness: vec![word(&[p.to_vec()]), word(&[z.to_vec()])],
                    detail: format!("⟨ξ,ε⟩ = {} with ⟨ε,ε⟩ = 0", eval_at(k, p, z)),
                }));
            }
        }
        for w in &zset {
            let s = add(z, w);
            if s.iter().all(|c| *c <= extent) && eval_at(k, &s, &s).abs() > tol {
                return Ok(Extension::Obstruction(ObstructionReport {
                    condition: "zero_set".into(),
                    witness: vec![word(&[z.to_vec(), w.to_vec()])],
                    detail: "Z is not closed under ∔".into(),
                }));
            }
        }
    }

    // Per-class bases.
    let mut base = Vec::with_capacity(d);
    for i in 0..d {
        let line = GeneratorLine { kernel: k, index: i };
        let unit = line.at(1.0);
        if k.eval(&unit, &unit).abs() <= tol {
            base.push(0.0);
            continue;
        }
        let c = consistency_m(&line, &MultiplesKernel::lattice(depth), depth)?;
        let m = match c.m_xi(kernel_sign) {
            Some(m) => m,
            None => {
                let growth = c.for_sign(kernel_sign).growth_exponent;
                return Ok(Extension::Obstruction(ObstructionReport {
                    condition: "consistency".into(),
                    witness: vec![format!("g{}", i + 1)],
                    detail: format!("M is not in (0,∞) for this sign (growth exponent {growth:?})"),
                }));
            }
        };
        let b = bases.map_or(m, |b| b[i]);
        if b < m - tol * m.abs().max(1.0) {
            return Err(Error::BaseBelowM { base: b, bound: m });
        }
        base.push(b);
    }

    let class_entropy = |i: usize, c: u64| -> Result<f64> {
        let line = GeneratorLine { kernel: k, index: i };
        Ok(c as f64 * base[i] + e * line.xi_sum(c - 1)?)
    };

    let perms = permutations(d);
    let mut entries = Vec::with_capacity(points.len());
    for p in &points {
        if *p == zero {
            entries.push((p.clone(), 0.0));
            continue;
        }
        let parts: Vec<Vec<u64>> = (0..d)
            .filter(|i| p[*i] > 0)
            .map(|i| {
                let mut v = zero.clone();
                v[i] = p[i];
                v
            })
            .collect();
        let value = word_value(k, e, &class_entropy, &parts)?;
        if value < -tol * value.abs().max(1.0) {
            return Ok(Extension::Obstruction(ObstructionReport {
                condition: "nonnegative_sum".into(),
                witness: vec![word(&parts)],
                detail: format!("constructed sum {value}"),
            }));
        }
        // Other decompositions: reorderings and one split of a class part.
        let mut alternatives: Vec<Vec<Vec<u64>>> = Vec::new();
        for perm in &perms {
            let re: Vec<Vec<u64>> = perm.iter().filter(|i| **i < parts.len()).map(|i| parts[*i].clone()).collect();
            alternatives.push(re);
        }
        for (j, part) in parts.iter().enumerate() {
            let (i, c) = part.iter().enumerate().find(|(_, c)| **c > 0).map(|(i, c)| (i, *c)).expect("nonzero");
            for split in 1..c {
                let (mut a, mut b) = (zero.clone(), zero.clone());
                a[i] = split;
                b[i] = c - split;
                let mut alt = parts.clone();
                alt.splice(j..=j, [a, b]);
                alternatives.push(alt);
            }
        }
        for alt in alternatives {
            let v = word_value(k, e, &class_entropy, &alt)?;
            if (v - value).abs() > tol * value.abs().max(1.0) {
                return Ok(Extension::Obstruction(ObstructionReport {
                    condition: "decomposition_independent".into(),
                    witness: vec![word(&parts), word(&alt)],
                    detail: format!("{value} vs {v}"),
                }));
            }
        }
        entries.push((p.clone(), value));
    }
    Ok(Extension::Table { bases: base, entries })
}

// ---------------------------------------------------------------------------
// Scoring rules

pub trait ScoringRule: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    fn score(&self, eta: &Self::Point, xi: &Self::Point) -> f64;
    fn name(&self) -> String;
}

/// (η − ξ)² on the real line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SquaredError;

impl ScoringRule for SquaredError {
    type Point = f64;

    fn score(&self, eta: &f64, xi: &f64) -> f64 {
        (eta - xi) * (eta - xi)
    }

    fn name(&self) -> String {
        "squared_error".into()
    }
}

/// r_a(η,ξ) − r_a(ξ,ξ) with r_a = ρ_a.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureRule<S> {
    pub structure: S,
    pub a: f64,
}

impl<S: Comparable> ScoringRule for StructureRule<S>
where
    S::Element: PartialEq,
{
    type Point = S::Element;

    fn score(&self, eta: &S::Element, xi: &S::Element) -> f64 {
        rho_raw(&self.structure, self.a, eta, xi) - rho_raw(&self.structure, self.a, xi, xi)
    }

    fn name(&self) -> String {
        format!("rule({}, a={})", self.structure.name(), self.a)
    }
}

/// The rule of a structure at a, after checking the A-membership
/// inequality and non-constancy on the sample pairs.
pub fn scoring_rule_from_structure<S: Comparable>(
    s: S,
    a: f64,
    sample: &Sample<S::Element>,
) -> Result<StructureRule<S>>
where
    S::Element: PartialEq,
{
    let rule = StructureRule { structure: s, a };
    let tol = rule.structure.tolerance();
    let scores = par::map(sample.pairs.len(), |i| {
        let (eta, xi) = &sample.pairs[i];
        let scale = rule.structure.circ_entropy(eta, xi);
        (rule.score(eta, xi), scale)
    });
    if let Some(i) = scores.iter().position(|(v, sc)| v.is_nan() || *v < -tol.slack(*sc)) {
        let (eta, xi) = &sample.pairs[i];
        return Err(Error::NotInA {
            a,
            witness: format!(
                "η = {}, ξ = {} (score {})",
                rule.structure.describe(eta),
                rule.structure.describe(xi),
                scores[i].0
            ),
        });
    }
    if scores.iter().all(|(v, sc)| v.abs() <= tol.slack(*sc)) {
        return Err(Error::NotApplicable("the rule is constant on the sample".into()));
    }
    Ok(rule)
}

/// sup S(η,ξ)/(S(ω,η) + S(ω,ξ)) over the pairs with S(η,ξ) > 0.
pub fn ratio_sup<R: ScoringRule>(rule: &R, omega: &R::Point, pairs: &[(R::Point, R::Point)]) -> f64 {
    let ratios = par::map(pairs.len(), |i| {
        let (eta, xi) = &pairs[i];
        let s = rule.score(eta, xi);
        if s <= 0.0 {
            return 0.0;
        }
        let den = rule.score(omega, eta) + rule.score(omega, xi);
        if den <= 0.0 {
            f64::INFINITY
        } else {
            s / den
        }
    });
    ratios.into_iter().fold(0.0, f64::max)
}

/// Elements of G×G, with G identified with {ω}×G.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedded<R: ScoringRule> {
    pub rule: R,
    pub omega: R::Point,
    pub a: f64,
    pub ratio_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedCheck {
    pub a: f64,
    pub ratio_sup: f64,
    pub pairs: usize,
    pub max_rho_error: f64,
    pub min_entropy: f64,
}

impl<R: ScoringRule> Embedded<R> {
    pub fn embed(&self, x: &R::Point) -> (R::Point, R::Point) {
        (self.omega.clone(), x.clone())
    }

    /// ρ_a(ι η, ι ξ).
    pub fn rho(&self, eta: &R::Point, xi: &R::Point) -> f64 {
        rho_raw(self, self.a, &self.embed(eta), &self.embed(xi))
    }

    /// Compares ρ_a on embedded pairs with the rule and records the
    /// smallest entropy of the merged pairs.
    pub fn verify(&self, pairs: &[(R::Point, R::Point)]) -> EmbedCheck {
        let rows = par::map(pairs.len(), |i| {
            let (eta, xi) = &pairs[i];
            let err = (self.rho(eta, xi) - self.rule.score(eta, xi)).abs();
            let h = self.entropy(&(eta.clone(), xi.clone()));
            (err, h)
        });
        EmbedCheck {
            a: self.a,
            ratio_sup: self.ratio_sup,
            pairs: pairs.len(),
            max_rho_error: rows.iter().map(|r| r.0).fold(0.0, f64::max),
            min_entropy: rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Builds G×G with the left-neutral ∔ and
/// ⟦(η,ξ)⟧ = a⁻¹S(η,ξ) + (1−a⁻¹)(S(ω,η) + S(ω,ξ)), where
/// a = (1 − ratio_sup) − max(½, ratio_sup/20).
pub fn embed_scoring_rule<R: ScoringRule>(
    rule: R,
    omega: R::Point,
    pairs: &[(R::Point, R::Point)],
    cap: f64,
) -> Result<Embedded<R>> {
    let sup = ratio_sup(&rule, &omega, pairs);
    if !(sup <= cap) {
        return Err(Error::SupUnbounded { observed: sup, cap });
    }
    let margin = (0.05 * sup).max(0.5);
    let a = (1.0 - sup) - margin;
    Ok(Embedded {
        rule,
        omega,
        a,
        ratio_sup: sup,
    })
}

impl<R: ScoringRule> EntropyStructure for Embedded<R> {
    type Element = (R::Point, R::Point);

    fn name(&self) -> String {
        format!("embedded({}, a={})", self.rule.name(), self.a)
    }

    fn entropy(&self, x: &Self::Element) -> f64 {
        let (eta, xi) = x;
        let r = &self.rule;
        let v = r.score(eta, xi) / self.a
            + (1.0 - 1.0 / self.a) * (r.score(&self.omega, eta) + r.score(&self.omega, xi));
        // Exact zeros can come out as −0 or a rounding residue.
        if v.abs() < 1e-15 * (1.0 + r.score(&self.omega, eta) + r.score(&self.omega, xi)) {
            0.0
        } else {
            v
        }
    }

    fn is_deterministic(&self, x: &Self::Element) -> bool {
        x.0 == self.omega && x.1 == self.omega
    }

    fn deterministic_elements(&self) -> Vec<Self::Element> {
        vec![(self.omega.clone(), self.omega.clone())]
    }
}

impl<R: ScoringRule> Comparable for Embedded<R> {
    fn dotplus_entropy(&self, x: &Self::Element, y: &Self::Element) -> f64 {
        self.entropy(&self.dotplus(x, y).expect("total"))
    }

    /// (ω,ω) is left neutral; otherwise the first non-ω coordinate of the
    /// left pair meets the right coordinate of the right pair.
    fn dotplus(&self, x: &Self::Element, y: &Self::Element) -> Option<Self::Element> {
        let (nu, eta) = x;
        let (lambda, xi) = y;
        Some(if *nu == self.omega && *eta == self.omega {
            (lambda.clone(), xi.clone())
        } else if *nu != self.omega {
            (nu.clone(), xi.clone())
        } else {
            (eta.clone(), xi.clone())
        })
    }
}

/// Largest |ρ_a^S(η,ξ) − ρ_a^emb(η,ξ)| after structure → rule → embedding.
pub fn round_trip_error<S: Comparable>(
    s: S,
    a: f64,
    omega: S::Element,
    sample: &Sample<S::Element>,
    cap: f64,
) -> Result<f64>
where
    S::Element: PartialEq,
{
    let rule = scoring_rule_from_structure(s, a, sample)?;
    let emb = embed_scoring_rule(rule, omega, &sample.pairs, cap)?;
    let errs = par::map(sample.pairs.len(), |i| {
        let (eta, xi) = &sample.pairs[i];
        (rho_raw(&emb.rule.structure, a, eta, xi) - emb.rho(eta, xi)).abs()
    });
    Ok(errs.into_iter().fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Four-term identities of a hemi-scalar product

/// Residual of
/// ⟨ξ∔η, λ∔ν⟩ = ⟨ξ∔λ, η∔ν⟩ − ⟨ξ,η⟩ + ⟨ξ,λ⟩ + ⟨η,ν⟩ − ⟨λ,ν⟩ + ⟨η,λ⟩ − ⟨λ,η⟩.
pub fn four_term_residual<S: Comparable>(
    s: &S,
    p: &ComparisonProfile,
    xi: &S::Element,
    eta: &S::Element,
    lambda: &S::Element,
    nu: &S::Element,
) -> Result<f64> {
    let plus = |x: &S::Element, y: &S::Element| {
        s.dotplus(x, y).ok_or_else(|| Error::NotApplicable("∔ leaves the carrier".into()))
    };
    let sp = |x: &S::Element, y: &S::Element| scalar_a(s, p, x, y);
    let lhs = sp(&plus(xi, eta)?, &plus(lambda, nu)?)?;
    let rhs = sp(&plus(xi, lambda)?, &plus(eta, nu)?)? - sp(xi, eta)? + sp(xi, lambda)? + sp(eta, nu)?
        - sp(lambda, nu)?
        + sp(eta, lambda)?
        - sp(lambda, eta)?;
    Ok(lhs - rhs)
}

/// Residual of
/// Σ_{k<m}⟨k(ξ∔η), ξ∔η⟩ = ⟨mξ, mη⟩ − m⟨ξ,η⟩ + Σ_{k<m}⟨kη,η⟩ + Σ_{k<m}⟨kξ,ξ⟩.
pub fn multiple_sum_residual<S: Comparable>(
    s: &S,
    p: &ComparisonProfile,
    xi: &S::Element,
    eta: &S::Element,
    m: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m ≥ 1".into()));
    }
    let sum_of = |x: &S::Element| -> Result<(f64, S::Element)> {
        // Returns Σ_{k<m}⟨kx,x⟩ and mx.
        let mut acc = x.clone();
        let mut total = 0.0;
        for _ in 1..m {
            total += scalar_a(s, p, &acc, x)?;
            acc = s.dotplus(&acc, x).ok_or_else(|| Error::NotApplicable("∔ leaves the carrier".into()))?;
        }
        Ok((total, acc))
    };
    let joint = s.dotplus(xi, eta).ok_or_else(|| Error::NotApplicable("∔ leaves the carrier".into()))?;
    let (lhs, _) = sum_of(&joint)?;
    let (sx, mx) = sum_of(xi)?;
    let (se, me) = sum_of(eta)?;
    let rhs = scalar_a(s, p, &mx, &me)? - m as f64 * scalar_a(s, p, xi, eta)? + se + sx;
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{vector::dot, Euclidean, FiniteMeasureSets};

    #[test]
    fn kernel_sum_examples() {
        // Dot kernel with |ξ| = 1: ⟨kξ,ξ⟩ = k.
        let series: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        assert_eq!(kernel_sums(&series, 2, 3).unwrap(), 6.0);
        assert_eq!(kernel_sums(&series, 1, 1).unwrap(), series[0]);
        assert!(matches!(kernel_sums(&series[..3], 2, 3), Err(Error::InsufficientSeries { .. })));
        // Σ_{n<m}⟨niξ,iξ⟩ = i² m(m−1)/2.
        assert_eq!(multiple_sums(&series, 2, 3).unwrap(), 4.0 * 3.0);
    }

    #[test]
    fn min_kernel_telescopes_to_a_constant() {
        // ⟨kξ,ξ⟩ = ξ for every k, so the telescoping sum gives ξ, while
        // (2ξ∧3ξ) = 2ξ: the min kernel is not linear under addition.
        let xi = 1.5;
        let series = vec![xi; 8];
        assert_eq!(kernel_sums(&series, 2, 3).unwrap(), xi);
        let k = MultiplesKernel::MinPower { scale: xi, alpha: 1.0 };
        assert_eq!(k.eval(2.0, 3.0), 2.0 * xi);
    }

    #[test]
    fn consistency_constants() {
        let lat = MultiplesKernel::lattice(DEFAULT_DEPTH);
        let dot = MultiplesKernel::Dot { gram: 1.0 };
        let c = consistency_m(&dot, &lat, DEFAULT_DEPTH).unwrap();
        assert_eq!(c.feasible_signs(), vec![Sign::Plus]);
        assert!((c.m_xi(Sign::Plus).unwrap() - 0.5).abs() < 1e-12);

        for alpha in [0.5, 2.0] {
            let k = MultiplesKernel::MinPower { scale: 2.0, alpha };
            let c = consistency_m(&k, &lat, DEFAULT_DEPTH).unwrap();
            assert_eq!(c.feasible_signs(), vec![Sign::Minus], "α = {alpha}");
            assert!((c.m_xi(Sign::Minus).unwrap() - 2f64.powf(alpha)).abs() < 1e-9);
        }
        let k = MultiplesKernel::MinPower { scale: 2.0, alpha: 1.0 };
        let c = consistency_m(&k, &lat, DEFAULT_DEPTH).unwrap();
        assert_eq!(c.feasible_signs().len(), 2);
        for e in [Sign::Plus, Sign::Minus] {
            assert!((c.m_xi(e).unwrap() - 2.0).abs() < 1e-9);
        }
        assert!(matches!(consistency_m(&dot, &[], 8), Err(Error::NoRelations)));
    }

    #[test]
    fn dot_reconstruction() {
        let h = OneGeneratorEntropy::build(MultiplesKernel::Dot { gram: 1.0 }, Sign::Plus, 64, None).unwrap();
        assert_eq!(h.at(1, 1).unwrap(), h.base_entropy);
        for (p, q) in [(3, 7), (5, 2), (1, 9)] {
            let r = p as f64 / q as f64;
            assert!((h.at(p, q).unwrap() - r * r / 2.0).abs() < 1e-12);
        }
        assert!(h.additivity_residual((2, 3), (5, 4)).unwrap().abs() < 1e-12);
        let above =
            OneGeneratorEntropy::build(MultiplesKernel::Dot { gram: 1.0 }, Sign::Plus, 64, Some(0.75)).unwrap();
        assert!((above.at(1, 2).unwrap() - 0.125).abs() > 1e-3);
        let below = reconstruct_entropy(&MultiplesKernel::Dot { gram: 1.0 }, Sign::Plus, 0.2, 0.5, &Relation::multiple(1, 1));
        assert!(matches!(below, Err(Error::BaseBelowM { .. })));
    }

    #[test]
    fn min_kernel_reconstruction_matches_its_own_formula() {
        // e = −1, α = 1, base ξ: m⟦η⟧ = nξ − (n−1)ξ + (m−1)(n/m)ξ.
        let xi = 2.0;
        let k = MultiplesKernel::MinPower { scale: xi, alpha: 1.0 };
        let h = OneGeneratorEntropy::build(k, Sign::Minus, 64, Some(xi)).unwrap();
        for (m, n) in [(2u64, 3u64), (3, 1), (5, 4)] {
            let (mf, nf) = (m as f64, n as f64);
            let expect = (xi + (mf - 1.0) * nf / mf * xi) / mf;
            assert!((h.at(n, m).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_from_euclidean_instance() {
        let s = Euclidean::new(2).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let xi = vec![0.6, -0.8];
        let mut pairs: Vec<(u64, u64)> = (1..=32).map(|m| (m, 1)).collect();
        pairs.extend([(3, 2), (4, 3), (2, 5), (4, 4)]);
        let targets: Vec<(u64, u64, Vec<f64>)> = pairs
            .iter()
            .map(|&(m, n)| (m, n, xi.iter().map(|v| v * n as f64 / m as f64).collect()))
            .collect();
        let spec = KernelSpec::from_structure(&s, &p, &xi, &targets).unwrap();
        assert_eq!(spec.kernel_sign().unwrap(), Sign::Plus);
        // ⟨kξ,ξ⟩_a = 2k‖ξ‖² and M_ξ = ‖ξ‖² = ⟦ξ⟧.
        let c = consistency_m(&spec, &spec.relations, 32).unwrap();
        let m = c.m_xi(Sign::Plus).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        for (rel, (_, _, eta)) in spec.relations.iter().zip(&targets) {
            let h = reconstruct_entropy(&spec, Sign::Plus, m, m, rel).unwrap();
            assert!((h - s.entropy(eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_extension() {
        let k = QuadraticKernel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let ext = extend_entropy(&k, Sign::Plus, None, 4, 64).unwrap();
        let table = ext.table().expect("no obstruction");
        for (w, h) in table {
            let half_norm = (w[0] * w[0] + w[1] * w[1]) as f64 / 2.0;
            assert!((h - half_norm).abs() < 1e-9, "{w:?}");
        }
        let one = QuadraticKernel::new(vec![vec![2.0]]).unwrap();
        let ext = extend_entropy(&one, Sign::Plus, None, 5, 64).unwrap();
        let h = OneGeneratorEntropy::build(MultiplesKernel::Dot { gram: 2.0 }, Sign::Plus, 64, None).unwrap();
        for (w, v) in ext.table().unwrap() {
            assert!((v - h.at(w[0], 1).unwrap_or(0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn lattice_obstructions() {
        let k = QuadraticKernel::new(vec![vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        match extend_entropy(&k, Sign::Plus, None, 2, 64).unwrap() {
            Extension::Obstruction(r) => assert_eq!(r.condition, "nonnegative_sum"),
            other => panic!("{other:?}"),
        }
        let skew = QuadraticKernel::new(vec![vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        match extend_entropy(&skew, Sign::Plus, None, 2, 64).unwrap() {
            Extension::Obstruction(r) => assert_eq!(r.condition, "decomposition_independent"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rules_from_structures() {
        let s = Euclidean::new(2).unwrap();
        let sample = Sample::draw(&s, 200, 3).unwrap();
        let rule = scoring_rule_from_structure(s, -1.0, &sample).unwrap();
        let (x, y) = (vec![1.0, 2.0], vec![-1.0, 0.5]);
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!((rule.score(&x, &y) - dot(&d, &d)).abs() < 1e-12);
        assert_eq!(rule.score(&x, &x), 0.0);
        assert!(matches!(
            scoring_rule_from_structure(Euclidean::new(2).unwrap(), 0.5, &sample),
            Err(Error::NotInA { .. })
        ));

        let sets = FiniteMeasureSets::new(vec![1.0, 2.0, 0.5]).unwrap();
        let rule = scoring_rule_from_structure(sets.clone(), 2.0, &sets.all()).unwrap();
        for (a, b) in &sets.all().pairs {
            assert!((rule.score(a, b) - sets.measure(a ^ b)).abs() < 1e-12);
        }
    }

    #[test]
    fn squared_error_embedding() {
        let grid: Vec<f64> = (-50..=50).map(|k| k as f64 / 50.0).collect();
        let pairs: Vec<(f64, f64)> = grid.iter().flat_map(|a| grid.iter().map(move |b| (*a, *b))).collect();
        let emb = embed_scoring_rule(SquaredError, 0.0, &pairs, 1e6).unwrap();
        assert!((emb.ratio_sup - 2.0).abs() < 1e-12);
        assert_eq!(emb.a, -1.5);
        assert!((emb.rho(&1.0, &0.0) - 1.0).abs() < 1e-15);
        assert_eq!(emb.rho(&0.3, &0.3), 0.0);
        let check = emb.verify(&pairs);
        assert!(check.max_rho_error <= 1e-12);
        assert!(check.min_entropy >= 0.0);
        assert!(matches!(
            embed_scoring_rule(SquaredError, 0.0, &pairs, 1.0),
            Err(Error::SupUnbounded { .. })
        ));
    }

    #[test]
    fn four_term_identities_on_commutative_instances() {
        let s = Euclidean::new(3).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let sample = Sample::draw(&s, 50, 9).unwrap();
        for (x, y, z) in &sample.triples {
            let w = &sample.elements[0];
            assert!(four_term_residual(&s, &p, x, y, z, w).unwrap().abs() < 1e-9);
            assert!(multiple_sum_residual(&s, &p, x, y, 4).unwrap().abs() < 1e-9);
        }
        let sets = FiniteMeasureSets::new(vec![1.0, 0.5, 2.0, 1.5]).unwrap();
        let p = ComparisonProfile::closed_form(&sets).unwrap();
        for (a, b, c) in sets.all().triples.iter().step_by(7) {
            assert!(four_term_residual(&sets, &p, a, b, c, &(a ^ c)).unwrap().abs() < 1e-12);
            assert!(multiple_sum_residual(&sets, &p, a, b, 3).unwrap().abs() < 1e-12);
        }
    }
}

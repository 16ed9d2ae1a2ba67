//! The catalog of concrete structures.
//!
//! | constructor            | carrier                 | ∔              | (m_G, M_G, σ)      |
//! |------------------------|-------------------------|----------------|--------------------|
//! | `euclidean`            | ℝᵈ                      | +              | (0, 2, +)          |
//! | `lp_space`             | ℝᵈ                      | +              | (0, 2^{p−1}, +)    |
//! | `variogram`            | ℝᵈ                      | −              | (0, 2^{(β−1)⁺}, −) |
//! | `finite_measure_sets`  | subsets                 | ∪              | (½, 1, −)          |
//! | `real_axis`            | ℝ or [0,∞)              | +, ∨, signed ∨ | per case           |
//! | `mutual_information`   | sets of variables       | joint law      | (½, 1, −)          |
//! | `dependable_shannon`   | (pmf, reliability)      | update         | (0, ∞, −)          |
//! | `kl_structure`         | models and data         | update         | (1, ∞, +)          |
//! | `tsallis`, `sharma_mittal` | pmfs                | product        | by q               |
//! | `poisson_bivariate`    | rates                   | shared latent  | (1 − ab/(a+b), 1, −) |
//! | `tropical`             | nonnegative grid values | pointwise +    | by mode            |
//!
//! Shannon concatenation and the product probability space carry only an
//! entropy measure; the ridge model lives in `tichonov`.

pub mod dependable;
pub mod information;
pub mod pmf;
pub mod poisson;
pub mod real_axis;
pub mod sets;
pub mod tichonov;
pub mod tropical;
pub mod tsallis;
pub mod vector;

use serde::{Deserialize, Serialize};

use crate::algebra::{self_check, AxiomReport, Comparable, Sample};
use crate::error::{Error, Result};

pub use dependable::{DependablePair, DependableShannon, KlElement, KullbackLeibler};
pub use information::{JointTable, MultiJoint, ProductSpace, ShannonConcat};
pub use poisson::{BivariatePoisson, PoissonMode};
pub use real_axis::{Domain, PlusOp, RealAxis};
pub use sets::FiniteMeasureSets;
pub use tichonov::TichonovModel;
pub use tropical::{Tropical, TropicalMode};
pub use tsallis::PowerEntropy;
pub use vector::{Euclidean, LpSpace, Variogram};

/// Sample size for the construction-time check of infinite carriers.
pub const SELF_CHECK_SAMPLES: usize = 300;

/// Parameters of a catalog instance, addressable from JSON as
/// `{"instance": "<name>", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "instance", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Euclidean {
        d: usize,
    },
    LpSpace {
        d: usize,
        p: f64,
    },
    Variogram {
        d: usize,
        beta: f64,
    },
    FiniteMeasureSets {
        weights: Vec<f64>,
    },
    RealAxis {
        alpha: f64,
        domain: Domain,
        plus: PlusOp,
    },
    MutualInformation {
        joint: Vec<Vec<f64>>,
    },
    DependableShannon {
        alphabet: usize,
    },
    KlStructure {
        alphabet: usize,
    },
    Tsallis {
        q: f64,
        k: f64,
    },
    SharmaMittal {
        q: f64,
        k: f64,
    },
    PoissonBivariate {
        a: f64,
        b: f64,
        #[serde(default = "default_poisson_mode")]
        mode: PoissonMode,
    },
    Tropical {
        mode: TropicalMode,
        grid: usize,
    },
}

fn default_poisson_mode() -> PoissonMode {
    PoissonMode::Rate
}

/// A constructed catalog instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Euclidean(Euclidean),
    LpSpace(LpSpace),
    Variogram(Variogram),
    Sets(FiniteMeasureSets),
    RealAxis(RealAxis),
    MutualInformation(MultiJoint),
    Dependable(DependableShannon),
    Kl(KullbackLeibler),
    Power(PowerEntropy),
    Poisson(BivariatePoisson),
    Tropical(Tropical),
}

/// Runs `$body` with `$s` bound to the concrete structure inside an
/// [`Instance`].
#[macro_export]
macro_rules! with_instance {
    ($inst:expr, $s:ident => $body:expr) => {
        match $inst {
            $crate::instances::Instance::Euclidean($s) => $body,
            $crate::instances::Instance::LpSpace($s) => $body,
            $crate::instances::Instance::Variogram($s) => $body,
            $crate::instances::Instance::Sets($s) => $body,
            $crate::instances::Instance::RealAxis($s) => $body,
            $crate::instances::Instance::MutualInformation($s) => $body,
            $crate::instances::Instance::Dependable($s) => $body,
            $crate::instances::Instance::Kl($s) => $body,
            $crate::instances::Instance::Power($s) => $body,
            $crate::instances::Instance::Poisson($s) => $body,
            $crate::instances::Instance::Tropical($s) => $body,
        }
    };
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Constructs the instance without the self-check.
    pub fn construct(&self) -> Result<Instance> {
        Ok(match self {
            InstanceSpec::Euclidean { d } => Instance::Euclidean(Euclidean::new(*d)?),
            InstanceSpec::LpSpace { d, p } => Instance::LpSpace(LpSpace::new(*d, *p)?),
            InstanceSpec::Variogram { d, beta } => Instance::Variogram(Variogram::new(*d, *beta)?),
            InstanceSpec::FiniteMeasureSets { weights } => {
                Instance::Sets(FiniteMeasureSets::new(weights.clone())?)
            }
            InstanceSpec::RealAxis { alpha, domain, plus } => {
                Instance::RealAxis(RealAxis::new(*alpha, *domain, *plus)?)
            }
            InstanceSpec::MutualInformation { joint } => {
                let t = JointTable::new(joint.clone())?;
                Instance::MutualInformation(MultiJoint::from_table(&t))
            }
            InstanceSpec::DependableShannon { alphabet } => {
                Instance::Dependable(DependableShannon::new(*alphabet)?)
            }
            InstanceSpec::KlStructure { alphabet } => Instance::Kl(KullbackLeibler::new(*alphabet)?),
            InstanceSpec::Tsallis { q, k } => Instance::Power(PowerEntropy::tsallis(*q, *k)?),
            InstanceSpec::SharmaMittal { q, k } => Instance::Power(PowerEntropy::sharma_mittal(*q, *k)?),
            InstanceSpec::PoissonBivariate { a, b, mode } => {
                Instance::Poisson(BivariatePoisson::new(*a, *b, *mode)?)
            }
            InstanceSpec::Tropical { mode, grid } => Instance::Tropical(Tropical::new(*mode, *grid)?),
        })
    }

    /// Constructs the instance and runs the construction-time axiom suite;
    /// any failed law is a configuration error.
    pub fn build(&self, seed: u64) -> Result<(Instance, Vec<AxiomReport>)> {
        let inst = self.construct()?;
        let reports = inst.self_check(seed)?;
        if let Some(bad) = reports.iter().find(|r| !r.passed()) {
            return Err(Error::Config(format!("{} fails {}", inst.name(), bad.law)));
        }
        Ok((inst, reports))
    }
}

impl Instance {
    pub fn name(&self) -> String {
        use crate::algebra::EntropyStructure;
        with_instance!(self, s => s.name())
    }

    /// The construction-time check: exhaustive on small finite carriers,
    /// sampled otherwise.
    pub fn self_check(&self, seed: u64) -> Result<Vec<AxiomReport>> {
        match self {
            Instance::Sets(s) if s.size() <= 6 => self_check(s, &s.all()),
            Instance::MutualInformation(s) if s.variables() <= 4 => {
                self_check(s, &Sample::exhaustive((0..=s.full_mask()).collect()))
            }
            _ => with_instance!(self, s => sampled_check(s, seed)),
        }
    }
}

fn sampled_check<S: Comparable>(s: &S, seed: u64) -> Result<Vec<AxiomReport>> {
    self_check(s, &Sample::draw(s, SELF_CHECK_SAMPLES, seed)?)
}

/// One spec per registered constructor, with small default parameters.
pub fn catalog() -> Vec<InstanceSpec> {
    vec![
        InstanceSpec::Euclidean { d: 3 },
        InstanceSpec::LpSpace { d: 3, p: 3.0 },
        InstanceSpec::Variogram { d: 2, beta: 1.5 },
        InstanceSpec::FiniteMeasureSets {
            weights: vec![1.0, 2.0, 0.5, 3.0, 1.5],
        },
        InstanceSpec::RealAxis {
            alpha: 2.0,
            domain: Domain::Full,
            plus: PlusOp::Add,
        },
        InstanceSpec::RealAxis {
            alpha: 0.5,
            domain: Domain::Full,
            plus: PlusOp::Add,
        },
        InstanceSpec::RealAxis {
            alpha: 0.5,
            domain: Domain::Nonneg,
            plus: PlusOp::Add,
        },
        InstanceSpec::RealAxis {
            alpha: 1.0,
            domain: Domain::Full,
            plus: PlusOp::Add,
        },
        InstanceSpec::RealAxis {
            alpha: 1.0,
            domain: Domain::Nonneg,
            plus: PlusOp::Max,
        },
        InstanceSpec::RealAxis {
            alpha: 2.0,
            domain: Domain::Full,
            plus: PlusOp::Max,
        },
        InstanceSpec::RealAxis {
            alpha: 1.5,
            domain: Domain::Full,
            plus: PlusOp::SignedMax,
        },
        InstanceSpec::MutualInformation {
            joint: vec![vec![0.3, 0.1, 0.05], vec![0.05, 0.2, 0.1], vec![0.05, 0.05, 0.1]],
        },
        InstanceSpec::DependableShannon { alphabet: 3 },
        InstanceSpec::KlStructure { alphabet: 3 },
        InstanceSpec::Tsallis { q: 2.0, k: 1.0 },
        InstanceSpec::Tsallis { q: 0.5, k: 2.0 },
        InstanceSpec::SharmaMittal { q: 3.0, k: 2.0 },
        InstanceSpec::PoissonBivariate {
            a: 0.5,
            b: 1.0,
            mode: PoissonMode::Rate,
        },
        InstanceSpec::Tropical {
            mode: TropicalMode::Sup,
            grid: 8,
        },
        InstanceSpec::Tropical {
            mode: TropicalMode::Inf,
            grid: 8,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_passes_self_check() {
        for spec in catalog() {
            let r = spec.build(crate::DEFAULT_SEED);
            assert!(r.is_ok(), "{spec:?}: {:?}", r.err());
        }
    }

    #[test]
    fn json_spec() {
        let s = InstanceSpec::from_json(r#"{"instance":"mutual_information","joint":[[0.5,0],[0,0.5]]}"#).unwrap();
        assert!(matches!(s.construct().unwrap(), Instance::MutualInformation(_)));
        assert!(InstanceSpec::from_json(r#"{"instance":"euclidean","d":2,"extra":1}"#).is_err());
        assert!(InstanceSpec::from_json(r#"{"instance":"nope"}"#).is_err());
    }

    #[test]
    fn bad_parameters_are_config_errors() {
        let s = InstanceSpec::RealAxis {
            alpha: 1.0,
            domain: Domain::Nonneg,
            plus: PlusOp::SignedMax,
        };
        assert!(matches!(s.construct(), Err(Error::Config(_))));
    }
}

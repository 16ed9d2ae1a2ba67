//! Fitting by minimizing θ ↦ ρ_a(η(θ), data) over a box: a tensor grid,
//! Nelder–Mead from the best grid point, then a few projected Newton
//! steps on finite differences.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::Comparable;
use crate::comparison::{rho_raw, ComparisonProfile};
use crate::error::{Error, Result};
use crate::instances::{DependablePair, DependableShannon, Euclidean, TichonovModel};
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSettings {
    /// Grid points per dimension, at least 2.
    pub grid: usize,
    /// Nelder–Mead iterations.
    pub iterations: u64,
    /// Standard-deviation tolerance of the simplex.
    pub tol: f64,
    /// Finite-difference Newton steps after the simplex.
    pub polish: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            grid: 21,
            iterations: 400,
            tol: 1e-12,
            polish: 8,
        }
    }
}

/// Minimize ρ_a(η(θ), data) over θ in `bounds`.
pub struct FitProblem<'a, S: Comparable> {
    pub structure: &'a S,
    pub data: S::Element,
    pub family: Box<dyn Fn(&[f64]) -> S::Element + Sync + 'a>,
    pub bounds: Vec<(f64, f64)>,
    pub a: f64,
    pub settings: FitSettings,
    /// Permits a outside Ξ.
    pub exploration: bool,
    /// Supplies Ξ; without it a is not checked.
    pub profile: Option<ComparisonProfile>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub stage: String,
    pub theta: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub theta: Vec<f64>,
    pub objective: f64,
    pub a: f64,
    /// Some coordinate sits on the box boundary.
    pub boundary: bool,
    pub evaluations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
    /// For a ∈ Ξ: every objective seen along the trajectory was ≥ 0.
    pub nonnegative: Option<bool>,
}

fn clamp(theta: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    theta.iter().zip(bounds).map(|(t, (lo, hi))| t.clamp(*lo, *hi)).collect()
}

impl<S: Comparable> FitProblem<'_, S> {
    pub fn objective(&self, theta: &[f64]) -> Result<f64> {
        let eta = (self.family)(theta);
        let v = rho_raw(self.structure, self.a, &eta, &self.data);
        if v.is_nan() {
            return Err(Error::NonFiniteObjective(format!("θ = {theta:?}")));
        }
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() || self.bounds.iter().any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::Config("the search box must be finite and non-degenerate".into()));
        }
        if self.settings.grid < 2 {
            return Err(Error::Config("the grid needs at least 2 points per dimension".into()));
        }
        if !self.exploration {
            if let Some(p) = &self.profile {
                if !p.xi.contains(self.a) {
                    return Err(Error::OutOfXi {
                        a: self.a,
                        lo: p.xi.lo,
                        hi: p.xi.hi,
                    });
                }
            }
        }
        Ok(())
    }

    fn grid_point(&self, mut index: usize) -> Vec<f64> {
        let g = self.settings.grid;
        let mut theta = vec![0.0; self.bounds.len()];
        for (k, (lo, hi)) in self.bounds.iter().enumerate().rev() {
            let i = index % g;
            index /= g;
            theta[k] = lo + (hi - lo) * i as f64 / (g - 1) as f64;
        }
        theta
    }

    fn on_boundary(&self, theta: &[f64]) -> bool {
        theta
            .iter()
            .zip(&self.bounds)
            .any(|(t, (lo, hi))| (t - lo).abs() <= 1e-9 * (hi - lo) || (hi - t).abs() <= 1e-9 * (hi - lo))
    }
}

struct Penalized<'p, 'a, S: Comparable> {
    problem: &'p FitProblem<'a, S>,
}

impl<S: Comparable> CostFunction for Penalized<'_, '_, S> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let inside = clamp(theta, &self.problem.bounds);
        let dist2: f64 = inside.iter().zip(theta).map(|(a, b)| (a - b) * (a - b)).sum();
        let v = self.problem.objective(&inside)?;
        Ok(if v.is_finite() { v + 1e6 * dist2 } else { f64::MAX })
    }
}

/// Relative objective change treated as rounding during polishing.
const POLISH_NOISE: f64 = 1e-13;

/// Projected Newton steps with central differences; a step is kept only
/// if it does not raise the objective beyond rounding.
fn polish<S: Comparable>(p: &FitProblem<'_, S>, start: Vec<f64>, start_value: f64, evals: &mut usize) -> Result<(Vec<f64>, f64, Vec<TrajectoryPoint>)> {
    let d = start.len();
    let (mut theta, mut value) = (start, start_value);
    let mut trail = Vec::new();
    for _ in 0..p.settings.polish {
        let h: Vec<f64> = p.bounds.iter().map(|(lo, hi)| 1e-4 * (hi - lo).max(1.0)).collect();
        let f = |t: &[f64], evals: &mut usize| -> Result<f64> {
            *evals += 1;
            p.objective(&clamp(t, &p.bounds))
        };
        let shift = |t: &[f64], moves: &[(usize, f64)]| {
            let mut u = t.to_vec();
            for (i, s) in moves {
                u[*i] += s;
            }
            u
        };
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        for i in 0..d {
            let fp = f(&shift(&theta, &[(i, h[i])]), evals)?;
            let fm = f(&shift(&theta, &[(i, -h[i])]), evals)?;
            grad[i] = (fp - fm) / (2.0 * h[i]);
            hess[(i, i)] = (fp - 2.0 * value + fm) / (h[i] * h[i]);
            for j in 0..i {
                let fpp = f(&shift(&theta, &[(i, h[i]), (j, h[j])]), evals)?;
                let fpm = f(&shift(&theta, &[(i, h[i]), (j, -h[j])]), evals)?;
                let fmp = f(&shift(&theta, &[(i, -h[i]), (j, h[j])]), evals)?;
                let fmm = f(&shift(&theta, &[(i, -h[i]), (j, -h[j])]), evals)?;
                let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        if grad.iter().any(|g| !g.is_finite()) || hess.iter().any(|v| !v.is_finite()) {
            break;
        }
        let Some(chol) = hess.clone().cholesky() else { break };
        let step = chol.solve(&(-&grad));
        let candidate = clamp(&shift(&theta, &step.iter().copied().enumerate().collect::<Vec<_>>()), &p.bounds);
        let moved = candidate.iter().zip(&theta).any(|(a, b)| a != b);
        let cv = f(&candidate, evals)?;
        // Near the minimum the decrease is below rounding; accept a step
        // that does not raise the objective beyond that noise.
        if !moved || !(cv <= value + POLISH_NOISE * value.abs().max(1.0)) {
            break;
        }
        theta = candidate;
        value = cv;
        trail.push(TrajectoryPoint {
            stage: "newton".into(),
            theta: theta.clone(),
            objective: value,
        });
    }
    Ok((theta, value, trail))
}

/// Grid search (ties go to the lexicographically smallest θ), then
/// Nelder–Mead and Newton polishing. Deterministic for fixed settings.
pub fn fit_min_rho<S: Comparable>(p: &FitProblem<'_, S>) -> Result<FitResult> {
    p.validate()?;
    let d = p.bounds.len();
    let total = p.settings.grid.checked_pow(d as u32).ok_or_else(|| Error::Config("grid too large".into()))?;
    let values = par::map(total, |i| p.objective(&p.grid_point(i)));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    let mut evals = total;
    let mut theta = p.grid_point(best);
    let mut value = values[best];
    let mut trajectory = vec![TrajectoryPoint {
        stage: "grid".into(),
        theta: theta.clone(),
        objective: value,
    }];

    if value.is_finite() && p.settings.iterations > 0 {
        let mut simplex = vec![theta.clone()];
        for k in 0..d {
            let (lo, hi) = p.bounds[k];
            let step = 0.5 * (hi - lo) / (p.settings.grid - 1) as f64;
            let mut v = theta.clone();
            v[k] = if v[k] + step <= hi { v[k] + step } else { v[k] - step };
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(p.settings.tol)
            .map_err(|e| Error::Config(e.to_string()))?;
        let res = Executor::new(Penalized { problem: p }, solver)
            .configure(|s| s.max_iters(p.settings.iterations))
            .run()
            .map_err(|e| match e.downcast::<Error>() {
                Ok(inner) => inner,
                Err(other) => Error::Config(other.to_string()),
            })?;
        evals += res.state().get_func_counts().values().sum::<u64>() as usize;
        if let Some(bp) = res.state().get_best_param() {
            let cand = clamp(bp, &p.bounds);
            let cv = p.objective(&cand)?;
            if cv <= value {
                theta = cand;
                value = cv;
            }
        }
        trajectory.push(TrajectoryPoint {
            stage: "nelder_mead".into(),
            theta: theta.clone(),
            objective: value,
        });
        let (t, v, trail) = polish(p, theta, value, &mut evals)?;
        theta = t;
        value = v;
        trajectory.extend(trail);
    }

    let in_xi = p.profile.as_ref().map(|pr| pr.xi.contains(p.a));
    let nonnegative = in_xi.filter(|ok| *ok).map(|_| trajectory.iter().all(|t| t.objective >= -1e-9 * t.objective.abs().max(1.0)));
    Ok(FitResult {
        boundary: p.on_boundary(&theta),
        theta,
        objective: value,
        a: p.a,
        evaluations: evals,
        trajectory,
        nonnegative,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MleResult {
    pub theta: Vec<f64>,
    pub pmf: Vec<f64>,
    /// ρ₁((p^θ,0),(p̃,c)) at θ*.
    pub cross_entropy: f64,
    /// Σ p̃ log p^θ at θ*.
    pub log_likelihood: f64,
    pub boundary: bool,
}

/// Bernoulli pmf (1−θ, θ).
pub fn bernoulli(theta: &[f64]) -> Vec<f64> {
    vec![1.0 - theta[0], theta[0]]
}

/// Three cells by stick breaking: (θ₁, (1−θ₁)θ₂, (1−θ₁)(1−θ₂)).
pub fn categorical3(theta: &[f64]) -> Vec<f64> {
    let (t1, t2) = (theta[0], theta[1]);
    vec![t1, (1.0 - t1) * t2, (1.0 - t1) * (1.0 - t2)]
}

/// Maximum likelihood as the minimum of ρ₁ on the dependable Shannon
/// structure, with the data carrying reliability `reliability` on every
/// atom. The result does not depend on that constant.
pub fn mle_fit_with_reliability(
    p_tilde: &[f64],
    reliability: f64,
    family: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    bounds: Vec<(f64, f64)>,
    settings: FitSettings,
) -> Result<MleResult> {
    crate::instances::pmf::validate(p_tilde)?;
    if !(reliability > 0.0 && reliability.is_finite()) {
        return Err(Error::ZeroReliability);
    }
    let s = DependableShannon::new(p_tilde.len())?;
    let data = DependablePair {
        p: p_tilde.to_vec(),
        q: vec![reliability; p_tilde.len()],
    };
    let problem = FitProblem {
        structure: &s,
        data,
        family: Box::new(|t: &[f64]| DependablePair::model(family(t))),
        bounds,
        a: 1.0,
        settings,
        exploration: false,
        profile: None,
    };
    let r = fit_min_rho(&problem)?;
    let pmf = family(&r.theta);
    if !r.objective.is_finite() {
        let cell = pmf.iter().zip(p_tilde).position(|(p, t)| *p == 0.0 && *t > 0.0).unwrap_or(0);
        return Err(Error::SupportMismatch(cell));
    }
    let log_likelihood = p_tilde
        .iter()
        .zip(&pmf)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, p)| t * p.ln())
        .sum();
    Ok(MleResult {
        theta: r.theta,
        pmf,
        cross_entropy: r.objective,
        log_likelihood,
        boundary: r.boundary,
    })
}

pub fn mle_fit(
    p_tilde: &[f64],
    family: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    bounds: Vec<(f64, f64)>,
) -> Result<MleResult> {
    mle_fit_with_reliability(p_tilde, 1.0, family, bounds, FitSettings::default())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TichonovFit {
    pub lambda: f64,
    pub a: f64,
    pub beta_ridge: Vec<f64>,
    pub beta_rho: Vec<f64>,
    pub max_abs_difference: f64,
}

/// Agreement required between the ridge closed form and the ρ minimizer.
pub const TICHONOV_AGREEMENT: f64 = 1e-8;

/// Ridge coefficients Xᵀy/(1+λ) next to the minimizer of ρ_a(Xβ, y) on
/// ℝⁿ with a = −1/(1+λ).
pub fn tichonov_fit(model: &TichonovModel, lambda: f64) -> Result<TichonovFit> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("λ must be positive, got {lambda}")));
    }
    let s = Euclidean { d: model.y.len() };
    let a = TichonovModel::coefficient(lambda);
    let radius = model.y.norm() + 1.0;
    let y: Vec<f64> = model.y.iter().copied().collect();
    let problem = FitProblem {
        structure: &s,
        data: y,
        family: Box::new(|beta: &[f64]| model.fitted(beta)),
        bounds: vec![(-radius, radius); model.p()],
        a,
        settings: FitSettings {
            grid: 5,
            iterations: 200 * model.p() as u64,
            tol: 1e-14,
            polish: 8,
        },
        exploration: false,
        profile: Some(ComparisonProfile::closed_form(&s)?),
    };
    let r = fit_min_rho(&problem)?;
    let beta_ridge = model.closed_form(lambda);
    let max_abs_difference = beta_ridge
        .iter()
        .zip(&r.theta)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(TichonovFit {
        lambda,
        a,
        beta_ridge,
        beta_rho: r.theta,
        max_abs_difference,
    })
}

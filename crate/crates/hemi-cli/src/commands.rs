use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use hemi::algebra::{self_check, Comparable, EntropyStructure, FiniteStructure, Sample, Tolerance};
use hemi::comparison::{canonical_rho, classify_correlation, rho_raw, scalar_a, ComparisonProfile};
use hemi::construction::{
    consistency_m, embed_scoring_rule, extend_entropy, reconstruct_entropy, scoring_rule_from_structure,
    Extension, KernelSpec, MultiplesKernel, OneGeneratorEntropy, QuadraticKernel, ScoringRule, SquaredError,
};
use hemi::fit::{self, FitProblem, FitSettings};
use hemi::instances::{catalog, Instance, InstanceSpec, TichonovModel};
use hemi::models::{self, ModelSpec};
use hemi::{with_instance, Error, Result, Sign};

use crate::output::{finish, num, to_value, Output};
use crate::{Cli, Command};

pub fn run(cli: &Cli, input: Option<&str>) -> Result<Output> {
    match cli.command {
        Command::Check => check(cli, parse(input)?),
        Command::Profile => profile(cli, parse(input)?),
        Command::Compare => compare(cli, parse(input)?),
        Command::Reconstruct => reconstruct(cli, parse(input)?),
        Command::Embed => embed(cli, parse(input)?),
        Command::Simulate => simulate(cli, parse(input)?),
        Command::Fit => fit_command(cli, parse(input)?),
        Command::Report => report(cli),
    }
}

fn parse(input: Option<&str>) -> Result<Value> {
    let text = input.ok_or_else(|| Error::Schema("--input is required for this command".into()))?;
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Schema(format!("malformed JSON: {e}")))?;
    if !v.is_object() {
        return Err(Error::Schema("the input must be a JSON object".into()));
    }
    Ok(v)
}

fn field<T: DeserializeOwned>(v: &Value, name: &str) -> Result<T> {
    let raw = v.get(name).ok_or_else(|| Error::Schema(format!("missing field `{name}`")))?;
    serde_json::from_value(raw.clone()).map_err(|e| Error::Schema(format!("field `{name}`: {e}")))
}

fn opt_field<T: DeserializeOwned>(v: &Value, name: &str) -> Result<Option<T>> {
    match v.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(v, name).map(Some),
    }
}

fn only_fields(v: &Value, allowed: &[&str]) -> Result<()> {
    if let Some(obj) = v.as_object() {
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Schema(format!("unknown field `{k}`, expected one of {allowed:?}")));
        }
    }
    Ok(())
}

fn sign_of(e: i8) -> Result<Sign> {
    match e {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(Error::Schema(format!("sign must be 1 or -1, got {other}"))),
    }
}

// ---------------------------------------------------------------------------
// Structures from JSON

enum Target {
    Instance(Instance),
    Finite(FiniteStructure),
}

fn target(cli: &Cli, v: &Value) -> Result<Target> {
    if v.get("instance").is_some() {
        Ok(Target::Instance(InstanceSpec::from_value(v.clone())?.construct()?))
    } else if v.get("elements").is_some() {
        let mut fs = FiniteStructure::from_value(v.clone())?;
        fs.tolerance = Tolerance::new(cli.tol, Tolerance::default().abs);
        Ok(Target::Finite(fs))
    } else {
        Err(Error::Schema(
            "expected an instance spec with `instance` or a finite table with `elements`".into(),
        ))
    }
}

macro_rules! with_target {
    ($t:expr, $s:ident => $body:expr) => {
        match $t {
            Target::Finite($s) => $body,
            Target::Instance(inst) => with_instance!(inst, $s => $body),
        }
    };
}

fn structure_name(t: &Target) -> String {
    with_target!(t, s => s.name())
}

fn profile_of(cli: &Cli, t: &Target) -> Result<ComparisonProfile> {
    match t {
        Target::Finite(fs) => ComparisonProfile::estimate(fs, &fs.all()),
        Target::Instance(inst) => {
            with_instance!(inst, s => ComparisonProfile::for_structure(s, hemi::DEFAULT_SAMPLES, cli.seed))
        }
    }
}

// ---------------------------------------------------------------------------
// check, profile, report

fn check(cli: &Cli, v: Value) -> Result<Output> {
    let t = target(cli, &v)?;
    let reports = match &t {
        Target::Finite(fs) => self_check(fs, &fs.all())?,
        Target::Instance(inst) => inst.self_check(cli.seed)?,
    };
    let passed = reports.iter().all(|r| r.passed());
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "law": r.law,
                "status": to_value(&r.status).unwrap_or(Value::Null),
                "cases": r.cases,
                "counterexample": r.counterexample.as_ref().map(|c| format!("{c:?}")),
            })
        })
        .collect();
    let result = json!({ "structure": structure_name(&t), "reports": to_value(&reports)? });
    finish(cli, "check", passed, result, rows)
}

fn profile_row(name: &str, p: &ComparisonProfile) -> Value {
    json!({
        "structure": name,
        "m_G": num(p.m_g),
        "M_G": num(p.big_m_g),
        "xi_lo": num(p.xi.lo),
        "xi_hi": num(p.xi.hi),
        "sign": p.sign.value(),
        "a_sigma": num(p.a_sigma),
    })
}

fn profile(cli: &Cli, v: Value) -> Result<Output> {
    let t = target(cli, &v)?;
    let p = profile_of(cli, &t)?;
    let name = structure_name(&t);
    let result = json!({
        "structure": name,
        "m": num(p.m_g),
        "M": num(p.big_m_g),
        "a": num(p.a_sigma),
        "profile": to_value(&p)?,
    });
    finish(cli, "profile", true, result, vec![profile_row(&name, &p)])
}

fn report(cli: &Cli) -> Result<Output> {
    let mut rows = Vec::new();
    let mut passed = true;
    for spec in catalog() {
        let inst = spec.construct()?;
        let reports = inst.self_check(cli.seed)?;
        let ok = reports.iter().filter(|r| r.passed()).count();
        passed &= ok == reports.len();
        let t = Target::Instance(inst);
        let p = profile_of(cli, &t)?;
        let mut row = profile_row(&structure_name(&t), &p);
        row["checks_passed"] = json!(ok);
        row["checks"] = json!(reports.len());
        rows.push(row);
    }
    finish(cli, "report", passed, Value::Array(rows.clone()), rows)
}

// ---------------------------------------------------------------------------
// compare

fn compare_on<S>(
    cli: &Cli,
    s: &S,
    p: &ComparisonProfile,
    a: f64,
    pairs: Option<&Value>,
    n: usize,
) -> Result<Vec<Value>>
where
    S: Comparable,
    S::Element: DeserializeOwned,
{
    let pairs: Vec<(S::Element, S::Element)> = match pairs {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Schema(format!("field `pairs`: {e}")))?,
        None => Sample::draw(s, n, cli.seed)?.pairs,
    };
    let mut rows = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        s.validate(x)?;
        s.validate(y)?;
        let scalar = scalar_a(s, p, x, y).map(num).unwrap_or(Value::Null);
        let canonical = canonical_rho(s, p, x, y).map(num).unwrap_or(Value::Null);
        let class = classify_correlation(s, p, x, y)
            .map(|c| Value::String(format!("{c:?}")))
            .unwrap_or(Value::Null);
        rows.push(json!({
            "x": s.describe(x),
            "y": s.describe(y),
            "a": num(a),
            "rho": num(rho_raw(s, a, x, y)),
            "scalar": scalar,
            "canonical_rho": canonical,
            "correlation": class,
        }));
    }
    Ok(rows)
}

fn compare(cli: &Cli, v: Value) -> Result<Output> {
    only_fields(&v, &["structure", "a", "pairs", "n"])?;
    let t = target(cli, &field::<Value>(&v, "structure")?)?;
    let p = profile_of(cli, &t)?;
    let a = opt_field::<f64>(&v, "a")?.unwrap_or_else(|| p.working_a());
    if !cli.exploration && !p.xi.contains(a) {
        return Err(Error::OutOfXi {
            a,
            lo: p.xi.lo,
            hi: p.xi.hi,
        });
    }
    let n = opt_field::<usize>(&v, "n")?.unwrap_or(20);
    let rows = with_target!(&t, s => compare_on(cli, s, &p, a, v.get("pairs"), n))?;
    let result = json!({ "structure": structure_name(&t), "profile": to_value(&p)?, "rows": rows.clone() });
    finish(cli, "compare", true, result, rows)
}

// ---------------------------------------------------------------------------
// reconstruct

fn reconstruct(cli: &Cli, v: Value) -> Result<Output> {
    if v.get("gram").is_some() {
        only_fields(&v, &["gram", "sign", "extent", "depth", "bases"])?;
        let kernel = QuadraticKernel::new(field(&v, "gram")?)?;
        let e = sign_of(field(&v, "sign")?)?;
        let extent = opt_field(&v, "extent")?.unwrap_or(3);
        let depth = opt_field(&v, "depth")?.unwrap_or(64);
        let bases: Option<Vec<f64>> = opt_field(&v, "bases")?;
        if let Some(b) = &bases {
            if b.len() != kernel.gram.len() {
                return Err(Error::Schema("one base entropy per generator is required".into()));
            }
        }
        let ext = extend_entropy(&kernel, e, bases.as_deref(), extent, depth)?;
        let (passed, rows) = match &ext {
            Extension::Table { entries, .. } => (
                true,
                entries.iter().map(|(w, h)| json!({ "word": format!("{w:?}"), "entropy": num(*h) })).collect(),
            ),
            Extension::Obstruction(r) => (false, vec![to_value(r)?]),
        };
        return finish(cli, "reconstruct", passed, to_value(&ext)?, rows);
    }
    if v.get("kernel").is_some() {
        only_fields(&v, &["kernel", "sign", "depth", "base_entropy", "points"])?;
        let kernel: MultiplesKernel = field(&v, "kernel")?;
        let e = sign_of(field(&v, "sign")?)?;
        let depth = opt_field(&v, "depth")?.unwrap_or(hemi::construction::DEFAULT_DEPTH);
        let points: Vec<(u64, u64)> = opt_field(&v, "points")?
            .unwrap_or_else(|| (1..=5).flat_map(|p| (1..=5).map(move |q| (p, q))).collect());
        if points.iter().any(|(p, q)| *p == 0 || *q == 0) {
            return Err(Error::Schema("points are p/q with p, q ≥ 1".into()));
        }
        let c = consistency_m(&kernel, &MultiplesKernel::lattice(depth), depth)?;
        if c.m_xi(e).is_none() {
            let result = json!({ "consistency": to_value(&c)?, "feasible": false });
            return finish(cli, "reconstruct", false, result, vec![]);
        }
        let h = OneGeneratorEntropy::build(kernel, e, depth, opt_field(&v, "base_entropy")?)?;
        let mut rows = Vec::new();
        for &(p, q) in &points {
            rows.push(json!({ "p": p, "q": q, "entropy": num(h.at(p, q)?) }));
        }
        let mut worst: f64 = 0.0;
        for &x in &points {
            for &y in &points {
                worst = worst.max(h.additivity_residual(x, y)?.abs());
            }
        }
        let passed = worst <= cli.tol * h.base_entropy.abs().max(1.0) * 100.0;
        let result = json!({
            "consistency": to_value(&c)?,
            "m_xi": num(h.m_xi),
            "base_entropy": num(h.base_entropy),
            "max_additivity_residual": num(worst),
            "table": rows.clone(),
        });
        return finish(cli, "reconstruct", passed, result, rows);
    }
    let mut spec_value = v.clone();
    let obj = spec_value.as_object_mut().expect("object");
    let base: Option<f64> = obj.remove("base_entropy").map(serde_json::from_value).transpose().map_err(|e| Error::Schema(e.to_string()))?;
    let spec: KernelSpec = serde_json::from_value(spec_value).map_err(|e| Error::Schema(format!("kernel spec: {e}")))?;
    let e = spec.kernel_sign()?;
    let depth = spec.relations.iter().map(|r| r.m().max(r.n())).max().ok_or(Error::NoRelations)?;
    let c = consistency_m(&spec, &spec.relations, depth)?;
    let Some(m) = c.m_xi(e) else {
        let result = json!({ "consistency": to_value(&c)?, "feasible": false });
        return finish(cli, "reconstruct", false, result, vec![]);
    };
    let base = base.unwrap_or(m);
    let mut rows = Vec::new();
    for rel in &spec.relations {
        let h = reconstruct_entropy(&spec, e, base, m, rel)?;
        rows.push(json!({ "m": rel.m(), "n": rel.n(), "label": rel.label(), "entropy": num(h) }));
    }
    let result = json!({ "consistency": to_value(&c)?, "m_xi": num(m), "base_entropy": num(base), "table": rows.clone() });
    finish(cli, "reconstruct", true, result, rows)
}

// ---------------------------------------------------------------------------
// embed

#[derive(Deserialize)]
#[serde(untagged)]
enum PointSet {
    List(Vec<f64>),
    Grid { lo: f64, hi: f64, steps: usize },
}

impl PointSet {
    fn points(&self) -> Result<Vec<f64>> {
        match self {
            PointSet::List(v) if !v.is_empty() => Ok(v.clone()),
            PointSet::Grid { lo, hi, steps } if *steps >= 1 && lo < hi => {
                Ok((0..=*steps).map(|k| lo + (hi - lo) * k as f64 / *steps as f64).collect())
            }
            _ => Err(Error::Schema("points must be a non-empty list or {lo, hi, steps}".into())),
        }
    }
}

fn embed_structure<S>(cli: &Cli, s: &S, a: f64, omega: Option<&Value>, n: usize, cap: f64, exhaustive: Option<Sample<S::Element>>) -> Result<(bool, Value)>
where
    S: Comparable + Clone,
    S::Element: DeserializeOwned + PartialEq,
{
    let sample = match exhaustive {
        Some(x) => x,
        None => Sample::draw(s, n, cli.seed)?,
    };
    let omega: S::Element = match omega {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Schema(format!("field `omega`: {e}")))?,
        None => s
            .deterministic_elements()
            .into_iter()
            .next()
            .ok_or_else(|| Error::Schema("no deterministic element; give `omega`".into()))?,
    };
    let rule = scoring_rule_from_structure(s.clone(), a, &sample)?;
    let emb = embed_scoring_rule(rule, omega, &sample.pairs, cap)?;
    let check = emb.verify(&sample.pairs);
    let mut rt: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (x, y) in &sample.pairs {
        let r = rho_raw(s, a, x, y);
        scale = scale.max(r.abs());
        rt = rt.max((r - emb.rho(x, y)).abs());
    }
    let passed = rt <= cli.tol * scale && check.min_entropy >= -cli.tol * scale;
    Ok((
        passed,
        json!({
            "rule": emb.rule.name(),
            "check": to_value(&check)?,
            "round_trip_error": num(rt),
        }),
    ))
}

fn embed(cli: &Cli, v: Value) -> Result<Output> {
    let cap = opt_field(&v, "cap")?.unwrap_or(1e6);
    if let Some(rule) = v.get("rule") {
        only_fields(&v, &["rule", "omega", "points", "cap"])?;
        if rule != "squared_error" {
            return Err(Error::Schema(format!("unknown rule {rule}; `squared_error` is built in")));
        }
        let omega: f64 = opt_field(&v, "omega")?.unwrap_or(0.0);
        let pts = opt_field::<PointSet>(&v, "points")?
            .unwrap_or(PointSet::Grid { lo: -1.0, hi: 1.0, steps: 100 })
            .points()?;
        let pairs: Vec<(f64, f64)> = pts.iter().flat_map(|x| pts.iter().map(move |y| (*x, *y))).collect();
        let emb = embed_scoring_rule(SquaredError, omega, &pairs, cap)?;
        let check = emb.verify(&pairs);
        let passed = check.max_rho_error <= 1e-12 && check.min_entropy >= 0.0;
        let result = json!({ "rule": SquaredError.name(), "check": to_value(&check)? });
        let row = to_value(&check)?;
        return finish(cli, "embed", passed, result, vec![row]);
    }
    only_fields(&v, &["structure", "a", "omega", "n", "cap"])?;
    let t = target(cli, &field::<Value>(&v, "structure")?)?;
    let a: f64 = field(&v, "a")?;
    let n = opt_field(&v, "n")?.unwrap_or(500);
    let omega = v.get("omega");
    let (passed, result) = match &t {
        Target::Finite(fs) => embed_structure(cli, fs, a, omega, n, cap, Some(fs.all()))?,
        Target::Instance(Instance::Sets(s)) => embed_structure(cli, s, a, omega, n, cap, Some(s.all()))?,
        Target::Instance(inst) => with_instance!(inst, s => embed_structure(cli, s, a, omega, n, cap, None))?,
    };
    let row = json!({ "passed": passed, "round_trip_error": result["round_trip_error"].clone() });
    finish(cli, "embed", passed, result, vec![row])
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateInput {
    family: models::Family,
    alpha: f64,
    #[serde(alias = "base_scale")]
    scale: f64,
    #[serde(default)]
    xi: Option<f64>,
    #[serde(default)]
    nu: Option<f64>,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    level: Option<f64>,
    #[serde(default)]
    grid: Option<Vec<f64>>,
    #[serde(default = "default_reps")]
    repetitions: usize,
    #[serde(default = "default_true")]
    calibrate: bool,
}

fn default_n() -> usize {
    10_000
}

fn default_reps() -> usize {
    20
}

fn default_true() -> bool {
    true
}

/// Share of passing repetitions a grid cell needs.
const CELL_PASS_RATE: f64 = 0.9;

fn simulate(cli: &Cli, v: Value) -> Result<Output> {
    let input: SimulateInput = serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))?;
    let seed = input.seed.unwrap_or(cli.seed);
    let level = input.level.unwrap_or(cli.level);
    let model = ModelSpec::new(input.family, input.alpha, input.scale, seed)?;
    let mut passed = true;
    let mut result = serde_json::Map::new();
    result.insert("model".into(), to_value(&model)?);
    let mut rows = Vec::new();
    if let (Some(xi), Some(nu)) = (input.xi, input.nu) {
        let r = models::verify_merge_law(&model, xi, nu, input.n, level, seed)?;
        passed &= r.passed;
        rows.push(to_value(&r)?);
        result.insert("merge".into(), to_value(&r)?);
    }
    if let Some(scales) = &input.grid {
        let cells = models::merge_grid(&model, scales, input.n, level, input.repetitions, seed)?;
        passed &= cells.iter().all(|c| c.pass_rate >= CELL_PASS_RATE);
        rows = cells.iter().map(to_value).collect::<Result<_>>()?;
        result.insert("grid".into(), to_value(&cells)?);
    }
    if input.calibrate {
        if let Some(xi) = input.xi {
            let c = models::verify_entropy_calibration(&model, xi, input.n, seed)?;
            passed &= c.passed;
            result.insert("calibration".into(), to_value(&c)?);
        }
    }
    if result.len() == 1 {
        return Err(Error::Schema("give `xi` and `nu`, or a `grid` of scales".into()));
    }
    finish(cli, "simulate", passed, Value::Object(result), rows)
}

// ---------------------------------------------------------------------------
// fit

#[derive(Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case", deny_unknown_fields)]
enum FitInput {
    Mle {
        p_tilde: Vec<f64>,
        family: MleFamily,
        #[serde(default)]
        reliability: Option<f64>,
    },
    Tichonov {
        #[serde(default)]
        x: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        y: Option<Vec<f64>>,
        #[serde(default)]
        random: Option<RandomDesign>,
        lambda: f64,
    },
    Linear {
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        bounds: Option<Vec<(f64, f64)>>,
        #[serde(default)]
        settings: Option<FitSettings>,
    },
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum MleFamily {
    Bernoulli,
    Categorical3,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomDesign {
    n: usize,
    p: usize,
}

fn matrix(rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
        return Err(Error::Schema("x must be a non-empty rectangular matrix".into()));
    }
    Ok(nalgebra::DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn fit_command(cli: &Cli, v: Value) -> Result<Output> {
    let input: FitInput = serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))?;
    match input {
        FitInput::Mle { p_tilde, family, reliability } => {
            let (f, bounds, analytic): (&(dyn Fn(&[f64]) -> Vec<f64> + Sync), _, Vec<f64>) = match family {
                MleFamily::Bernoulli => {
                    if p_tilde.len() != 2 {
                        return Err(Error::Schema("bernoulli needs two cells".into()));
                    }
                    (&fit::bernoulli, vec![(0.0, 1.0)], p_tilde.clone())
                }
                MleFamily::Categorical3 => {
                    if p_tilde.len() != 3 {
                        return Err(Error::Schema("categorical3 needs three cells".into()));
                    }
                    (&fit::categorical3, vec![(0.0, 1.0), (0.0, 1.0)], p_tilde.clone())
                }
            };
            let r = fit::mle_fit_with_reliability(&p_tilde, reliability.unwrap_or(1.0), f, bounds, FitSettings::default())?;
            let gap = r.pmf.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let passed = gap <= 1e-6;
            let mut result = to_value(&r)?;
            result["max_gap_to_likelihood_argmax"] = num(gap);
            finish(cli, "fit", passed, result.clone(), vec![result])
        }
        FitInput::Tichonov { x, y, random, lambda } => {
            let model = match (x, y, random) {
                (Some(x), Some(y), None) => TichonovModel::new(matrix(&x)?, nalgebra::DVector::from_vec(y))?,
                (None, None, Some(d)) => TichonovModel::random(&mut hemi::par::rng(cli.seed), d.n, d.p)?,
                _ => return Err(Error::Schema("give either `x` and `y`, or `random`".into())),
            };
            let r = fit::tichonov_fit(&model, lambda)?;
            let passed = r.max_abs_difference <= fit::TICHONOV_AGREEMENT;
            let rows = r
                .beta_ridge
                .iter()
                .zip(&r.beta_rho)
                .enumerate()
                .map(|(j, (a, b))| json!({ "coefficient": j, "ridge": num(*a), "rho": num(*b) }))
                .collect();
            finish(cli, "fit", passed, to_value(&r)?, rows)
        }
        FitInput::Linear { x, y, a, bounds, settings } => {
            let xm = matrix(&x)?;
            if xm.nrows() != y.len() {
                return Err(Error::Schema("x and y disagree in length".into()));
            }
            let s = hemi::instances::Euclidean::new(y.len())?;
            let profile = ComparisonProfile::closed_form(&s)?;
            let a = a.unwrap_or(profile.a_sigma);
            let radius = y.iter().map(|v| v * v).sum::<f64>().sqrt() + 1.0;
            let p = xm.ncols();
            let problem = FitProblem {
                structure: &s,
                data: y,
                family: Box::new(move |b: &[f64]| (&xm * nalgebra::DVector::from_column_slice(b)).iter().copied().collect()),
                bounds: bounds.unwrap_or_else(|| vec![(-radius, radius); p]),
                a,
                settings: settings.unwrap_or(FitSettings { grid: 7, ..FitSettings::default() }),
                exploration: cli.exploration,
                profile: Some(profile),
            };
            let r = fit::fit_min_rho(&problem)?;
            let passed = r.nonnegative != Some(false);
            let rows = r
                .trajectory
                .iter()
                .map(|t| json!({ "stage": t.stage, "theta": format!("{:?}", t.theta), "objective": num(t.objective) }))
                .collect();
            finish(cli, "fit", passed, to_value(&r)?, rows)
        }
    }
}

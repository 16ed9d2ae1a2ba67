use proptest::prelude::*;

use hemi::comparison::{
    canonical_rho, canonical_scalar, estimate_bounds, rho_raw, xi_interval, Provenance, Variant,
};
use hemi::construction::{MultiplesKernel, OneGeneratorEntropy};
use hemi::instances::{pmf, Euclidean, FiniteMeasureSets, InstanceSpec, LpSpace, PowerEntropy, RealAxis, TichonovModel};
use hemi::models::ModelSpec;
use hemi::par::{with_exec, Exec};
use hemi::{Comparable, ComparisonProfile, EntropyStructure, Sample, Sign};

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

fn pmf_of(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, 1..=max).prop_map(pmf::normalize)
}

proptest! {
    #[test]
    fn xi_contains_the_unit_interval(m in 0.0..=1.0f64, extra in 0.0..50.0f64) {
        let xi = xi_interval(m, 1.0 + extra).unwrap();
        prop_assert!(xi.contains(0.0) && xi.contains(0.5) && xi.contains(1.0));
    }

    #[test]
    fn euclidean_rho_nonnegative_on_xi(x in vec_of(4), y in vec_of(4), a in -1.0..=1.0f64) {
        let s = Euclidean::new(4).unwrap();
        let scale = s.entropy(&x) + s.entropy(&y);
        prop_assert!(rho_raw(&s, a, &x, &y) >= -1e-12 * scale.max(1.0));
    }

    #[test]
    fn euclidean_rho_ca_is_a_metric(x in vec_of(3), y in vec_of(3), z in vec_of(3)) {
        let s = Euclidean::new(3).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let d = |u: &Vec<f64>, v: &Vec<f64>| canonical_rho(&s, &p, u, v).unwrap().sqrt();
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-9);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
        prop_assert!(d(&x, &x) < 1e-9);
    }

    #[test]
    fn sets_scalar_is_intersection_measure(
        weights in prop::collection::vec(0.1..5.0f64, 1..=6),
        a in any::<u64>(),
        b in any::<u64>(),
    ) {
        let n = weights.len();
        let (a, b) = (a & ((1 << n) - 1), b & ((1 << n) - 1));
        let s = FiniteMeasureSets::new(weights.clone()).unwrap();
        let p = ComparisonProfile::closed_form(&s).unwrap();
        let sp = canonical_scalar(&s, &p, &a, &b, Variant::Half).unwrap();
        prop_assert!((sp - s.measure(a & b)).abs() < 1e-12);
        let r = canonical_rho(&s, &p, &a, &b).unwrap();
        prop_assert!((r - s.measure(a ^ b)).abs() < 1e-12);
    }

    #[test]
    fn tsallis_interaction(q in 0.2..4.0f64, k in 0.5..3.0f64, p in pmf_of(3), r in pmf_of(2)) {
        prop_assume!((q - 1.0).abs() > 1e-3);
        let s = PowerEntropy::tsallis(q, k).unwrap();
        let law = s.interaction(s.entropy(&p), s.entropy(&r));
        let joint = s.entropy(&pmf::product(&p, &r));
        prop_assert!((joint - law).abs() <= 1e-10 * law.abs().max(1.0));
    }

    #[test]
    fn real_axis_circ_is_additive(alpha in 0.3..3.0f64, x in 0.0..10.0f64, y in 0.0..10.0f64) {
        let s = RealAxis::frechet_scale(alpha).unwrap();
        let sum = s.entropy(&x) + s.entropy(&y);
        prop_assert!((s.circ_entropy(&x, &y) - sum).abs() <= 1e-10 * sum.max(1.0));
    }

    #[test]
    fn model_scales_compose_by_entropy(alpha in 0.3..2.0f64, xi in 0.1..10.0f64, nu in 0.1..10.0f64) {
        let m = ModelSpec::frechet(alpha, 1.0, 1).unwrap();
        let c = m.combine(xi, nu);
        let sum = m.entropy(xi) + m.entropy(nu);
        prop_assert!((m.entropy(c) - sum).abs() <= 1e-9 * sum);
        prop_assert!((c - m.combine(nu, xi)).abs() <= 1e-12 * c);
    }

    #[test]
    fn dot_kernel_reconstruction(gram in 0.1..10.0f64, num in 1u64..40, den in 1u64..40) {
        let h = OneGeneratorEntropy::build(MultiplesKernel::Dot { gram }, Sign::Plus, 32, None).unwrap();
        let r = num as f64 / den as f64;
        let expect = r * r * gram / 2.0;
        prop_assert!((h.at(num, den).unwrap() - expect).abs() <= 1e-9 * expect.max(1.0));
    }

    #[test]
    fn ridge_closed_form_minimizes(seed in any::<u64>(), lambda in 0.01..20.0f64, dir in vec_of(3)) {
        let mut rng = hemi::par::rng(seed);
        let model = TichonovModel::random(&mut rng, 8, 3).unwrap();
        let beta = model.closed_form(lambda);
        let base = model.ridge_objective(&beta, lambda);
        let moved: Vec<f64> = beta.iter().zip(&dir).map(|(b, d)| b + 1e-3 * d).collect();
        prop_assert!(model.ridge_objective(&moved, lambda) >= base - 1e-12);
        // ρ_a and the ridge objective differ by a positive factor and a constant.
        let shift = lambda * model.y.norm_squared();
        prop_assert!((model.rho_objective(&beta, lambda) * (1.0 + lambda) - base - shift).abs() < 1e-9 * (base + shift).max(1.0));
    }

    #[test]
    fn profile_survives_json(m in 0.0..=1.0f64, extra in 0.0..10.0f64, minus in any::<bool>()) {
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let p = ComparisonProfile::from_constants(m, 1.0 + extra, sign, Provenance::ClosedForm).unwrap();
        let back: ComparisonProfile = serde_json::from_value(serde_json::to_value(&p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parallel_and_sequential_bounds_agree(seed in any::<u64>(), p in 1.2..4.0f64) {
        let s = LpSpace::new(3, p).unwrap();
        let sample = Sample::draw(&s, 500, seed).unwrap();
        let par = with_exec(Exec::Parallel, || estimate_bounds(&s, &sample).unwrap());
        let seq = with_exec(Exec::Sequential, || estimate_bounds(&s, &sample).unwrap());
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn sampled_bounds_stay_inside_closed_form(seed in any::<u64>()) {
        let s = LpSpace::new(2, 2.5).unwrap();
        let cf = s.closed_form().unwrap();
        let b = estimate_bounds(&s, &Sample::draw(&s, 300, seed).unwrap()).unwrap();
        prop_assert!(b.m_g >= cf.m_g - 1e-12 && b.big_m_g <= cf.big_m_g * (1.0 + 1e-12));
    }
}

#[test]
fn every_catalog_spec_round_trips_through_json() {
    for spec in hemi::instances::catalog() {
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(InstanceSpec::from_json(&text).unwrap(), spec, "{text}");
    }
}

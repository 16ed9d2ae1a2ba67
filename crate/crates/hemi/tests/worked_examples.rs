//! Constants and small worked values of the published examples.

use hemi::algebra::{check_comparable, SignCheck};
use hemi::comparison::{canonical_rho, canonical_scalar, rho_infty, scalar_a, xi_interval, Variant};
use hemi::instances::{
    BivariatePoisson, DependablePair, DependableShannon, Domain, Euclidean, FiniteMeasureSets, KlElement,
    KullbackLeibler, LpSpace, MultiJoint, PlusOp, PoissonMode, PowerEntropy, ProductSpace, RealAxis, TichonovModel,
};
use hemi::models::{sample, ModelSpec};
use hemi::stats::variance;
use hemi::{Comparable, ComparisonProfile, EntropyStructure, Sample, Sign};

#[test]
fn scale_families() {
    let g = RealAxis::gaussian_scale();
    assert_eq!(g.entropy(&3.0), 9.0);
    assert!((g.circ_entropy(&3.0, &4.0) - 25.0).abs() < 1e-12);
    let f = RealAxis::frechet_scale(2.0).unwrap();
    assert!((f.entropy(&2.0) - 4.0).abs() < 1e-12);
}

#[test]
fn product_space_information() {
    let s = ProductSpace::new(vec![0.5, 0.25, 0.25]).unwrap();
    let (a, b) = (0b001u64, 0b110u64);
    let pair = vec![a, b];
    let expect = -(0.5f64).ln() - (0.5f64).ln();
    assert!((s.entropy(&pair) - expect).abs() < 1e-12);
}

#[test]
fn comparison_signs() {
    let e = Euclidean::new(2).unwrap();
    assert_eq!(check_comparable(&e, &Sample::draw(&e, 200, 1).unwrap()).unwrap(), SignCheck::Plus);
    let max = RealAxis::frechet_scale(1.5).unwrap();
    assert_eq!(check_comparable(&max, &Sample::draw(&max, 200, 1).unwrap()).unwrap(), SignCheck::Minus);
    let cauchy = RealAxis::cauchy();
    assert_eq!(
        check_comparable(&cauchy, &Sample::draw(&cauchy, 200, 1).unwrap()).unwrap(),
        SignCheck::Undetermined
    );
}

#[test]
fn profile_constants() {
    let e = ComparisonProfile::closed_form(&Euclidean::new(3).unwrap()).unwrap();
    assert_eq!((e.m_g, e.big_m_g), (0.0, 2.0));
    let sets = ComparisonProfile::closed_form(&FiniteMeasureSets::counting(4).unwrap()).unwrap();
    assert_eq!((sets.m_g, sets.big_m_g), (0.5, 1.0));
    let lp = ComparisonProfile::closed_form(&LpSpace::new(2, 3.0).unwrap()).unwrap();
    assert_eq!(lp.big_m_g, 4.0);

    let xi = xi_interval(0.0, 2.0).unwrap();
    assert_eq!((xi.lo, xi.hi, xi.lo_closed, xi.hi_closed), (-1.0, 1.0, true, true));
    let xi = xi_interval(0.5, 1.0).unwrap();
    assert_eq!((xi.lo, xi.hi, xi.lo_closed, xi.hi_closed), (f64::NEG_INFINITY, 2.0, false, true));
}

#[test]
fn euclidean_metric_and_dot_product() {
    let s = Euclidean::new(2).unwrap();
    let p = ComparisonProfile::closed_form(&s).unwrap();
    let (x, y) = (vec![1.0, 0.0], vec![1.0, 1.0]);
    assert_eq!(canonical_rho(&s, &p, &x, &y).unwrap(), 1.0);
    assert_eq!(canonical_scalar(&s, &p, &x, &y, Variant::Half).unwrap(), 1.0);
    assert_eq!(s.entropy(&vec![3.0, 4.0]), 25.0);
}

#[test]
fn max_instance_metric() {
    let s = RealAxis::new(1.0, Domain::Nonneg, PlusOp::Max).unwrap();
    let p = ComparisonProfile::closed_form(&s).unwrap();
    assert_eq!(canonical_rho(&s, &p, &5.0, &2.0).unwrap(), 3.0);
    assert_eq!(canonical_scalar(&s, &p, &2.0, &3.0, Variant::Half).unwrap(), 2.0);
}

#[test]
fn half_stable_metric_is_degenerate() {
    let s = RealAxis::new(0.5, Domain::Full, PlusOp::Add).unwrap();
    let p = ComparisonProfile::for_structure(&s, 2_000, 3).unwrap();
    for xi in [0.5, 1.0, 2.5] {
        assert!(canonical_rho(&s, &p, &xi, &-xi).unwrap().abs() < 1e-12);
    }
}

#[test]
fn information_instances() {
    // X = Y: the variation of information vanishes; independence: I = 0.
    let same = MultiJoint::new(vec![2, 2], vec![0.3, 0.0, 0.0, 0.7]).unwrap();
    let p = ComparisonProfile::closed_form(&same).unwrap();
    assert!(canonical_rho(&same, &p, &1, &2).unwrap().abs() < 1e-12);
    let indep = MultiJoint::new(vec![2, 2], vec![0.06, 0.14, 0.24, 0.56]).unwrap();
    assert!(canonical_scalar(&indep, &p, &1, &2, Variant::Half).unwrap().abs() < 1e-12);

    let kl = KullbackLeibler::new(2).unwrap();
    let kp = ComparisonProfile::closed_form(&kl).unwrap();
    let (m, d) = (KlElement::Model(vec![0.5, 0.5]), KlElement::Data(vec![1.0, 0.0]));
    assert!((scalar_a(&kl, &kp, &m, &d).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!((rho_infty(&kl, &kp, &m, &d).unwrap() - 2f64.ln()).abs() < 1e-15);

    let ds = DependableShannon::new(3).unwrap();
    let x = DependablePair::new(vec![0.2, 0.3, 0.5], vec![0.9, 0.1, 0.4]).unwrap();
    assert!((ds.dotplus_entropy(&x, &x) - ds.entropy(&x)).abs() < 1e-15);
}

#[test]
fn tsallis_uniform_pair() {
    let s = PowerEntropy::tsallis(2.0, 1.0).unwrap();
    let u = vec![0.5, 0.5];
    assert!((s.entropy(&u) - 0.5).abs() < 1e-15);
    assert!((s.dotplus_entropy(&u, &u) - 0.75).abs() < 1e-15);
}

#[test]
fn poisson_rates() {
    let s = BivariatePoisson::new(1.0, 1.0, PoissonMode::Rate).unwrap();
    let p = ComparisonProfile::closed_form(&s).unwrap();
    assert_eq!(p.sign, Sign::Minus);
    assert_eq!(p.a_sigma, 2.0);
    assert_eq!(scalar_a(&s, &p, &2.0, &3.0).unwrap(), 2.0);
    assert_eq!(scalar_a(&BivariatePoisson::new(0.0, 1.0, PoissonMode::Rate).unwrap(), &p, &2.0, &3.0).unwrap(), 0.0);
}

#[test]
fn tichonov_coefficient() {
    assert_eq!(TichonovModel::coefficient(1.0), -0.5);
}

#[test]
fn stable_variance() {
    let m = ModelSpec::gaussian(1.0, 1).unwrap();
    let xs = sample(&m, 1.0, 100_000, 17).unwrap();
    assert!((variance(&xs) - 2.0).abs() < 0.05);
}

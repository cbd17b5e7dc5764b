mod common;

use common::{bessel_series_dd, relative_error};
use hardedge::microlaw::{l_kernel, micro_rescale, micro_scale, micro_unscale, sup_distance_to_micro};
use hardedge::numerics::adaptive_quadrature;
use hardedge::stats::{linspace, DerivativeCheck, Stencil};
use hardedge::{EmpiricalSpectrum, EnsembleConfig, ExactLaw, MicroConfig, MicroLaw};
use proptest::prelude::*;

const CASES: [(u32, usize); 8] = [(2, 0), (2, 1), (2, 2), (2, 4), (1, 0), (1, 1), (1, 2), (1, 3)];

fn law(beta: u32, gamma: usize) -> MicroLaw {
    MicroLaw::new(MicroConfig::new(beta, gamma).unwrap())
}

fn i_nu(nu: u32, u: f64) -> f64 {
    bessel_series_dd(nu, u.sqrt(), 200)
}

#[test]
fn kernel_examples() {
    let m = MicroConfig::new(2, 1).unwrap();
    assert!(relative_error(l_kernel(0, 1, 1, 4.0, &m).unwrap(), 2.279585302336067) < 1e-14);
    assert!(relative_error(l_kernel(1, 1, 1, 4.0, &m).unwrap(), 1.590636854637329) < 1e-14);
    // β = 2, γ = 2: κ' = 3, off-diagonal entries are I₀.
    let m = MicroConfig::new(2, 2).unwrap();
    for &u in &[0.2, 3.0, 25.0] {
        assert!(relative_error(l_kernel(0, 1, 2, u, &m).unwrap(), i_nu(0, u)) < 1e-14);
        let lower = l_kernel(0, 2, 2, u, &m).unwrap();
        assert!(relative_error(lower, 0.5 * u.sqrt() * i_nu(1, u)) < 1e-14);
    }
}

#[test]
fn square_complex_is_exponential() {
    let l = law(2, 0);
    for u in linspace(0.01, 60.0, 40) {
        assert!(relative_error(l.gap(u).unwrap(), (-u / 4.0).exp()) < 1e-15);
        assert!(relative_error(l.pmin(u).unwrap().value, 0.25 * (-u / 4.0).exp()) < 1e-15);
    }
}

#[test]
fn complex_gamma_one_closed_form() {
    let l = law(2, 1);
    for u in linspace(0.01, 60.0, 40) {
        let z = u.sqrt();
        let w = (-u / 4.0).exp();
        let gap = w * i_nu(0, u);
        let density = w * (0.25 * i_nu(0, u) - i_nu(1, u) / (2.0 * z));
        assert!(relative_error(l.gap(u).unwrap(), gap) < 1e-13, "u={u}");
        assert!(relative_error(l.pmin(u).unwrap().value, density) < 1e-11, "u={u}");
    }
}

#[test]
fn complex_gamma_two_closed_form() {
    let l = law(2, 2);
    for u in linspace(0.01, 60.0, 40) {
        let expect = (-u / 4.0).exp() * (i_nu(0, u).powi(2) - i_nu(1, u).powi(2));
        assert!(relative_error(l.gap(u).unwrap(), expect) < 1e-12, "u={u}");
    }
}

#[test]
fn real_gamma_one_closed_form() {
    let l = law(1, 1);
    for u in linspace(0.01, 60.0, 40) {
        let expect = (-u / 8.0).exp() * 2.0 * i_nu(1, u) / u.sqrt();
        assert!(relative_error(l.gap(u).unwrap(), expect) < 1e-13, "u={u}");
    }
}

#[test]
fn gap_tends_to_one_at_the_origin() {
    for beta in [1, 2] {
        for gamma in 0..=8 {
            let l = law(beta, gamma);
            if l.config().kernel_dim() > 8 {
                continue;
            }
            let e = l.gap(1e-12).unwrap();
            assert!((e - 1.0).abs() < 1e-8, "β={beta} γ={gamma}: {e}");
        }
    }
}

#[test]
fn density_matches_derivative() {
    let grid = linspace(0.05, 40.0, 400);
    for (beta, gamma) in CASES {
        let l = law(beta, gamma);
        // Deeper kernels keep ℰ within 1e-10 of one near the origin, so the
        // difference quotient needs a wider step to clear rounding.
        let step = if l.config().kernel_dim() > 4 { 1e-2 } else { 1e-3 };
        let err = DerivativeCheck::new(step)
            .with_t_scale(1.0)
            .with_stencil(Stencil::FivePoint)
            .max_error(|u| l.gap(u), |u| l.pmin(u).map(|d| d.value), &grid)
            .unwrap();
        assert!(err < 1e-6, "β={beta} γ={gamma}: {err:e}");
    }
}

#[test]
fn density_integrates_to_gap_difference() {
    for (beta, gamma) in CASES {
        let l = law(beta, gamma);
        let (a, b) = (0.05, 40.0);
        let integral = adaptive_quadrature(|u| l.pmin(u).unwrap().value, a, b, 1e-10).unwrap();
        let expect = l.gap(a).unwrap() - l.gap(b).unwrap();
        assert!(
            (integral - expect).abs() < 1e-7,
            "β={beta} γ={gamma}: {integral} vs {expect}"
        );
    }
}

#[test]
fn gap_monotone_bounded_and_density_nonnegative() {
    let grid = linspace(1e-6, 80.0, 500);
    for (beta, gamma) in CASES {
        let l = law(beta, gamma);
        let gaps: Vec<f64> = grid.iter().map(|&u| l.gap(u).unwrap()).collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "β={beta} γ={gamma}");
        assert!(gaps.iter().all(|&e| (0.0..=1.0 + 1e-12).contains(&e)));
        assert!(grid.iter().all(|&u| l.pmin(u).unwrap().value >= 0.0));
    }
}

#[test]
fn larger_rectangularity_pushes_mass_outwards() {
    for beta in [1, 2] {
        for u in linspace(0.5, 30.0, 30) {
            let gaps: Vec<f64> = (0..4).map(|g| law(beta, g).gap(u).unwrap()).collect();
            assert!(gaps.windows(2).all(|w| w[1] >= w[0]), "β={beta} u={u}: {gaps:?}");
        }
    }
}

#[test]
fn rescale_examples() {
    let s = EmpiricalSpectrum::constant(200, 1.0).unwrap();
    assert!((micro_scale(&s) - 800.0).abs() < 1e-12);
    assert!((micro_rescale(&[0.01], &s)[0] - 8.0).abs() < 1e-13);
    let s = EmpiricalSpectrum::new(vec![1.0, 2.0, 4.0]).unwrap();
    assert!((micro_scale(&s) - 7.0).abs() < 1e-15);
    assert_eq!(micro_unscale(&[7.0], &s), vec![1.0]);
}

#[test]
fn finite_ensemble_approaches_the_limit() {
    let micro = law(2, 1);
    let u = linspace(0.1, 30.0, 120);
    let s = EmpiricalSpectrum::constant(80, 1.0).unwrap();
    let exact = ExactLaw::new(&s, &EnsembleConfig::new(2, 80, 81).unwrap()).unwrap();
    let sup = sup_distance_to_micro(&exact, &s, &micro, &u).unwrap();
    assert!(sup < 2e-2, "{sup}");
}

#[test]
fn rejects_bad_arguments() {
    assert!(MicroConfig::new(0, 1).is_err());
    let l = law(2, 2);
    assert!(l.gap(0.0).is_err());
    assert!(l.gap(f64::INFINITY).is_err());
    assert!(l.pmin(-3.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rescale_round_trip(lambdas in prop::collection::vec(0.01f64..100.0, 1..30), t in 1e-6f64..1e3) {
        let s = EmpiricalSpectrum::new(lambdas).unwrap();
        let back = micro_unscale(&micro_rescale(&[t], &s), &s)[0];
        prop_assert!((back - t).abs() <= 4.0 * f64::EPSILON * t);
    }

    #[test]
    fn gap_in_unit_interval(beta in 1u32..=2, gamma in 0usize..6, u in 1e-4f64..100.0) {
        let e = law(beta, gamma).gap(u).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
    }
}

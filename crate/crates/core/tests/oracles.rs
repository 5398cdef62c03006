//! Values checked against independent computations: an external special-function
//! library for the incomplete gamma function, and direct frequency-side
//! quadrature with the analytic Gaussian transform for the modulation norm.

use modspace::corpus::FunctionSpec;
use modspace::decomposition::Grid;
use modspace::lab::{incomplete_gamma_lower, incomplete_gamma_upper, inverse_incomplete_gamma};
use modspace::lab::{subalgebra_constant, ConstantParams, Variant};
use modspace::norm::{modulation_norm, NormParams};
use modspace::WeightFunction;
use statrs::function::gamma::{gamma, gamma_lr, gamma_ur};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn upper_and_lower_gamma_match_statrs() {
    for beta in [0.5, 1.0, 2.0, 3.7, 5.0, 10.0] {
        for t in [0.01, 0.1, 1.0, 2.5, 10.0, 30.0] {
            let up = gamma_ur(beta, t) * gamma(beta);
            let lo = gamma_lr(beta, t) * gamma(beta);
            assert!(rel(incomplete_gamma_upper(beta, t).unwrap(), up) < 1e-10, "upper beta={beta} t={t}");
            assert!(rel(incomplete_gamma_lower(beta, t).unwrap(), lo) < 1e-10, "lower beta={beta} t={t}");
        }
    }
}

#[test]
fn inverse_against_statrs_forward() {
    for beta in [0.5, 1.0, 2.0, 5.0] {
        for u_frac in [1e-12, 1e-6, 0.01, 0.3, 0.9] {
            let u = u_frac * gamma(beta);
            let t = inverse_incomplete_gamma(beta, u).unwrap();
            assert!(rel(gamma_ur(beta, t) * gamma(beta), u) < 1e-9, "beta={beta} u={u}");
        }
    }
}

#[test]
fn rv_constants_against_statrs() {
    let params = ConstantParams::new(Variant::RvA);
    let beta = params.n as f64 / params.alpha;
    for r in [2.0, 3.0, 5.0, 10.0, 40.0] {
        let c = subalgebra_constant(&params, r).unwrap();
        let lower = params.s * 2.0 * params.c * (r - 2.0f64).powf(params.alpha);
        let expected = if lower == 0.0 { gamma(beta) } else { gamma_ur(beta, lower) * gamma(beta) };
        assert!(rel(c.integral_value, expected) < 1e-10);
        assert!(rel(c.constant, expected.sqrt()) < 1e-10);
    }
}

/// `g(u) = φ(u) / (φ(u) + φ(1-u))`, `φ(u) = e^{-1/u}`, `u = (1-|t|)/(1-plateau)`.
fn window(t: f64, plateau: f64) -> f64 {
    let a = t.abs();
    if a <= plateau {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let u = (1.0 - a) / (1.0 - plateau);
        let phi = |v: f64| if v <= 0.0 { 0.0 } else { (-1.0 / v).exp() };
        phi(u) / (phi(u) + phi(1.0 - u))
    }
}

fn sigma(k: i64, xi: f64) -> f64 {
    let total: f64 = ((xi.floor() as i64 - 2)..=(xi.ceil() as i64 + 2)).map(|j| window(xi - j as f64, 0.5)).sum();
    window(xi - k as f64, 0.5) / total
}

/// `‖σ_k F f‖_2` for `F f(ξ) = e^{-ξ²/2}`, by composite Simpson on `[k-1, k+1]`.
fn piece_l2(k: i64) -> f64 {
    let m = 4000;
    let h = 2.0 / m as f64;
    let mut acc = 0.0;
    for i in 0..=m {
        let xi = k as f64 - 1.0 + i as f64 * h;
        let wgt = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += wgt * (sigma(k, xi) * (-xi * xi / 2.0).exp()).powi(2);
    }
    (acc * h / 3.0).sqrt()
}

#[test]
fn gaussian_norm_matches_frequency_quadrature() {
    let w = WeightFunction::gevrey(2.0).unwrap();
    let oracle: f64 = (-12i64..=12).map(|k| w.value(k.unsigned_abs() as f64).exp() * piece_l2(k)).sum();
    let grid = Grid::new(1, 128.0, 32768).unwrap();
    let f = FunctionSpec::gaussian(1.0).sample(&grid).unwrap();
    let r = modulation_norm(&f, &NormParams::new(w, 2.0, 1.0).with_k_max(100)).unwrap();
    assert!(r.certified);
    assert!(rel(r.value, oracle) < 1e-8, "{} vs {oracle}", r.value);
}

#[test]
fn l2_norm_with_zero_weight_is_plancherel_sum() {
    let w = WeightFunction::custom("zero", 0.0, |_| 0.0);
    let oracle: f64 = (-12i64..=12).map(|k| piece_l2(k).powi(2)).sum::<f64>().sqrt();
    let grid = Grid::new(1, 128.0, 32768).unwrap();
    let f = FunctionSpec::gaussian(1.0).sample(&grid).unwrap();
    let r = modulation_norm(&f, &NormParams::new(w, 2.0, 2.0).with_k_max(100)).unwrap();
    assert!(rel(r.value, oracle) < 1e-8, "{} vs {oracle}", r.value);
}

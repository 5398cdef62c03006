//! Properties of the decomposition, the norm, the corpus and the lab routines.

use modspace::corpus::{psi_mu, standard_corpus, FunctionSpec};
use modspace::decomposition::{box_operator, forward_transform, partition_properties, Grid, Partition, SampledFunction};
use modspace::lab::{incomplete_gamma_lower, incomplete_gamma_upper, inverse_incomplete_gamma};
use modspace::lab::{subalgebra_constant, ConstantParams, Variant};
use modspace::lab::gamma::gamma;
use modspace::norm::{derivative_growth_check, modulation_norm, NormParams};
use modspace::sequence::associated_sequence;
use modspace::WeightFunction;
use num_complex::Complex64;
use proptest::prelude::*;

fn default_grid() -> Grid {
    Grid::new(1, 32.0, 4096).unwrap()
}

fn gevrey2() -> WeightFunction {
    WeightFunction::gevrey(2.0).unwrap()
}

fn gaussian() -> SampledFunction {
    FunctionSpec::gaussian(1.0).sample(&default_grid()).unwrap()
}

fn max_diff(a: &SampledFunction, b: &SampledFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn partition_bullets_hold_in_one_and_two_dimensions() {
    for grid in [default_grid(), Grid::new(2, 16.0, 256).unwrap()] {
        for part in [Partition::default(), Partition::with_plateau(0.4).unwrap()] {
            let r = partition_properties(&part, &grid, 20);
            assert!(r.all_pass(1e-12), "{r:?}");
        }
    }
}

#[test]
fn double_box_has_squared_symbol() {
    let f = gaussian();
    let spec = forward_transform(&f).unwrap();
    let part = Partition::default();
    for k in [-2i64, 0, 1, 3] {
        let twice = forward_transform(&box_operator(&box_operator(&f, &[k]).unwrap(), &[k]).unwrap()).unwrap();
        let grid = *f.grid();
        let err = (0..grid.samples())
            .map(|i| {
                let s = part.sigma(&[k], &[grid.frequency(i)]);
                (twice.values()[i] - spec.values()[i] * s * s).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "k = {k}: {err}");
    }
}

#[test]
fn corpus_decays_at_boundary_of_default_grid() {
    for spec in standard_corpus() {
        assert!(spec.sample(&default_grid()).unwrap().boundary_decay_ok(), "{spec}");
    }
}

#[test]
fn bump_derivatives_stay_within_gevrey_sequence() {
    let grid = Grid::new(1, 16.0, 32768).unwrap();
    let f = FunctionSpec::bump(-1.0).sample(&grid).unwrap();
    let seq = associated_sequence(&gevrey2(), 12).unwrap();
    let g = derivative_growth_check(&f, &seq, 8).unwrap();
    assert!(g.orders.iter().all(|o| o.ratio.is_finite() && o.ratio > 0.0));
    assert!(g.orders.iter().all(|o| o.ratio <= g.c_star * (1.0 + 1e-12)));
}

#[test]
fn window_choice_changes_norms_boundedly() {
    let grid = default_grid();
    for spec in standard_corpus() {
        let f = spec.sample(&grid).unwrap();
        let a = modulation_norm(&f, &NormParams::new(gevrey2(), 2.0, 1.0)).unwrap().value;
        let b = modulation_norm(&f, &NormParams::new(gevrey2(), 2.0, 1.0).with_partition(Partition::with_plateau(0.4).unwrap()))
            .unwrap()
            .value;
        let ratio = a / b;
        assert!((0.1..=10.0).contains(&ratio), "{spec}: {ratio}");
    }
}

#[test]
fn truncated_spectra_approach_norm_from_below() {
    let f = gaussian();
    let params = NormParams::new(gevrey2(), 2.0, 1.0);
    let full = modulation_norm(&f, &params).unwrap().value;
    let spec = forward_transform(&f).unwrap();
    let grid = *f.grid();
    let mut sup = 0.0f64;
    for cut in [1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
        let vals: Vec<Complex64> = (0..grid.samples())
            .map(|i| if grid.frequency(i).abs() <= cut { spec.values()[i] } else { Complex64::new(0.0, 0.0) })
            .collect();
        let trunc = SampledFunction::from_values(grid, vals, spec.domain()).unwrap();
        sup = sup.max(modulation_norm(&trunc, &params).unwrap().value);
    }
    assert!(full <= sup + 1e-10);
}

#[test]
fn gaussian_contributions_decay_faster_than_weight_grows() {
    let r = modulation_norm(&gaussian(), &NormParams::new(gevrey2(), 2.0, 1.0)).unwrap();
    let w = gevrey2();
    let pts: Vec<(f64, f64)> = r
        .contributions
        .iter()
        .filter(|(k, c)| (2..=8).contains(&k[0]) && *c > 0.0)
        .map(|(k, c)| (w.value(k[0] as f64), c.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= -0.9, "slope {slope}");
}

#[test]
fn gamma_halves_sum_to_complete_gamma() {
    for beta in [0.5, 1.0, 2.0, 5.0] {
        for t in [0.1, 1.0, 10.0] {
            let total = incomplete_gamma_upper(beta, t).unwrap() + incomplete_gamma_lower(beta, t).unwrap();
            assert!((total / gamma(beta) - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_homogeneous(lambda in prop_oneof![Just(-2.0), Just(0.5), Just(3.0), -5.0f64..5.0]) {
        prop_assume!(lambda != 0.0);
        let f = gaussian();
        let params = NormParams::new(gevrey2(), 2.0, 1.0);
        let a = modulation_norm(&f.scale(Complex64::new(lambda, 0.0)), &params).unwrap().value;
        let b = modulation_norm(&f, &params).unwrap().value;
        prop_assert!((a / (lambda.abs() * b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_obeys_triangle_inequality(i in 0usize..6, j in 0usize..6, p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)]) {
        let corpus = standard_corpus();
        let grid = default_grid();
        let (f, g) = (corpus[i].sample(&grid).unwrap(), corpus[j].sample(&grid).unwrap());
        let params = NormParams::new(gevrey2(), p, 1.0);
        let n = |h: &SampledFunction| modulation_norm(h, &params).unwrap().value;
        let sum = f.add(&g).unwrap();
        prop_assert!(n(&sum) <= (n(&f) + n(&g)) * (1.0 + 1e-12));
    }

    #[test]
    fn box_operator_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in -4i64..=4) {
        let grid = default_grid();
        let f = FunctionSpec::gaussian(1.0).sample(&grid).unwrap();
        let g = FunctionSpec::bump(-1.0).sample(&grid).unwrap();
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(0.0, b));
        let lhs = box_operator(&f.scale(ca).add(&g.scale(cb)).unwrap(), &[k]).unwrap();
        let rhs = box_operator(&f, &[k]).unwrap().scale(ca).add(&box_operator(&g, &[k]).unwrap().scale(cb)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-13 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn psi_vanishes_left_of_origin(mu in -3.0f64..-0.1, t in -100.0f64..=0.0) {
        prop_assert_eq!(psi_mu(mu, t), 0.0);
    }

    #[test]
    fn inverse_gamma_round_trips(beta in prop_oneof![Just(0.5), Just(1.0), Just(2.0), 0.3f64..8.0], log_frac in -30.0f64..0.0) {
        let u = gamma(beta) * log_frac.exp() * (1.0 - 1e-12);
        let t = inverse_incomplete_gamma(beta, u).unwrap();
        prop_assert!((incomplete_gamma_upper(beta, t).unwrap() / u - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constants_decrease_in_r(r in 2.0f64..200.0, step in 0.01f64..50.0, v in 0usize..3, q in prop_oneof![Just(1.0), Just(2.0), Just(4.0)]) {
        let variant = [Variant::RvA, Variant::RvB, Variant::Sv][v];
        let params = ConstantParams { q, ..ConstantParams::new(variant) };
        let a = subalgebra_constant(&params, r).unwrap().constant;
        let b = subalgebra_constant(&params, r + step).unwrap().constant;
        prop_assert!(b < a, "{variant} q = {q}: C({r}) = {a}, C({}) = {b}", r + step);
    }

    #[test]
    fn sampled_functions_round_trip_through_files(seed in 0u64..1000) {
        let grid = Grid::new(1, 16.0, 128).unwrap();
        let f = SampledFunction::from_fn(grid, |x| Complex64::new((x[0] + seed as f64).sin(), (x[0] * 0.3).cos() * 1e-3));
        let back = SampledFunction::from_bytes(&f.to_bytes()).unwrap();
        prop_assert_eq!(back.values(), f.values());
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        let back = SampledFunction::read_csv(&csv[..], grid, f.domain()).unwrap();
        prop_assert_eq!(back.values(), f.values());
    }
}

#[test]
fn constants_vanish_as_r_grows() {
    for variant in [Variant::RvA, Variant::RvB, Variant::Sv] {
        let c = subalgebra_constant(&ConstantParams::new(variant), 1e6).unwrap().constant;
        assert!(c < 1e-6, "{variant}: {c}");
    }
}

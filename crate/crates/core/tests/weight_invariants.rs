//! Properties of weights, the weight class, and associated sequences.

use modspace::class::{check_conditions, compute_x_tilde, doubling_trend, find_subadditivity_s};
use modspace::class::{series_shell_increments, verify_subadditivity, GridSpec1D, Subclass, SubadditivitySearch};
use modspace::sequence::{associated_sequence, check_log_convexity, find_h};
use modspace::{WeightFunction, WeightSpec};
use proptest::prelude::*;

fn builtins() -> Vec<WeightFunction> {
    ["gevrey:s=2", "gevrey:s=4", "gevrey:s=1.5", "loglog", "family:s=3,r=1"]
        .iter()
        .map(|t| t.parse::<WeightSpec>().unwrap().build().unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn builtin_weights_increase(log_x in -6.0f64..6.0, frac in 1e-3f64..1.0) {
        let x = 10f64.powf(log_x);
        let delta = frac * x;
        for w in builtins() {
            prop_assert!(w.eval(x + delta).unwrap() >= w.eval(x).unwrap(), "{} at {x}", w.label());
            prop_assert!(w.derivative(x, 1).unwrap() > 0.0, "{} at {x}", w.label());
        }
    }

    #[test]
    fn analytic_derivatives_match_differences(log_x in -1.0f64..3.0) {
        let x = 10f64.powf(log_x);
        for w in builtins() {
            for order in [1u8, 2] {
                let a = w.derivative(x, order).unwrap();
                let fd = w.finite_difference(x, order);
                let scale = a.abs().max(w.value(x) / (x * x).max(1.0) * 1e-3);
                prop_assert!((a - fd).abs() <= 1e-6 * scale, "{} order {order} at {x}: {a} vs {fd}", w.label());
            }
        }
    }

    #[test]
    fn weight_spec_text_round_trips(s in 1.01f64..20.0, r in 0usize..3) {
        let text = if r == 0 { format!("gevrey:s={s}") } else { format!("family:s={s},r={r}") };
        let spec: WeightSpec = text.parse().unwrap();
        let again: WeightSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(spec.to_string(), again.to_string());
    }
}

#[test]
fn slowly_varying_parts_settle() {
    for w in builtins() {
        for lambda in [0.5, 2.0, 10.0] {
            let dev: Vec<f64> = [1e2, 1e4, 1e6]
                .iter()
                .map(|&t| {
                    let a = w.slowly_varying_part(lambda * t).unwrap();
                    let b = w.slowly_varying_part(t).unwrap();
                    (a / b - 1.0).abs()
                })
                .collect();
            assert!(dev[1] < dev[0] && dev[2] < dev[1], "{} lambda {lambda}: {dev:?}", w.label());
        }
    }
}

#[test]
fn gevrey_weights_vary_regularly() {
    for s in [2.0, 4.0] {
        let w = WeightFunction::gevrey(s).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let ratio = w.value(lambda * 1e6) / w.value(1e6);
            let expected = f64::powf(lambda, 1.0 / s);
            assert!((ratio / expected - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn subclass_labels_are_exclusive() {
    for w in builtins() {
        let r = check_conditions(&w, &GridSpec1D::default()).unwrap();
        if r.all_pass() {
            let expected = if w.index_alpha() == 0.0 { Subclass::W0 } else { Subclass::W1 };
            assert_eq!(r.subclass, expected, "{}", w.label());
        }
    }
}

#[test]
fn certified_s_is_stable_under_refinement() {
    let w = WeightFunction::gevrey(2.0).unwrap();
    let x_tilde = compute_x_tilde(&w).unwrap().x_tilde;
    let get = |h: f64| match find_subadditivity_s(&w, x_tilde, 100.0, h).unwrap() {
        SubadditivitySearch::Certified(c) => c,
        SubadditivitySearch::Failed(f) => panic!("no s at h = {h}: {f:?}"),
    };
    let coarse = get(0.5);
    let fine = get(0.25);
    assert!(fine.s <= coarse.s + 1e-3);
    assert!(verify_subadditivity(&w, &fine, 100.0).unwrap().is_clean());
}

#[test]
fn series_shells_decay_geometrically() {
    let w = WeightFunction::gevrey(2.0).unwrap();
    for n in [1, 2] {
        for q_prime in [1.0, 2.0] {
            let inc = series_shell_increments(&w, 0.5, q_prime, n, 400).unwrap();
            let total: f64 = inc.iter().sum();
            assert!(inc.windows(2).skip(40).all(|p| p[1] < p[0]), "n = {n}, q' = {q_prime}");
            assert!(inc[400] < 1e-3 * total);
        }
    }
}

#[test]
fn argmax_radius_increases_and_sequence_is_log_convex() {
    for s in [2.0, 4.0] {
        let seq = associated_sequence(&WeightFunction::gevrey(s).unwrap(), 50).unwrap();
        assert!(seq.log_argmax_r.windows(2).all(|p| p[1] > p[0]));
        assert!(check_log_convexity(&seq).is_empty());
    }
}

#[test]
fn doubling_constant_and_h_agree() {
    let gevrey = WeightFunction::gevrey(2.0).unwrap();
    assert!(doubling_trend(&gevrey, &[1e2, 1e3, 1e4]).d.iter().all(Option::is_some));
    let h1 = find_h(&associated_sequence(&gevrey, 30).unwrap());
    let h2 = find_h(&associated_sequence(&gevrey, 60).unwrap());
    assert!(h1.is_finite() && (h2 / h1 - 1.0).abs() < 0.25);

    let loglog = WeightFunction::loglog().unwrap();
    assert!(!doubling_trend(&loglog, &[1e2, 1e3, 1e4, 1e5]).stabilizes);
}

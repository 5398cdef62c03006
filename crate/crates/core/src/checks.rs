//! The fourteen acceptance checks, each returning a pass/fail outcome with the
//! measured quantities.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::class::{
    check_conditions, compute_x_tilde, doubling_trend, find_doubling_d, find_subadditivity_s, verify_subadditivity,
    GridSpec1D, Subclass, SubadditivitySearch,
};
use crate::corpus::{fourier_decay_fit, standard_corpus, FunctionSpec};
use crate::decomposition::{forward_transform, inverse_transform, partition_properties, Grid, Partition};
use crate::error::Result;
use crate::lab::algebra::{algebra_ratio, algebra_report, LabSettings};
use crate::lab::constants::{subalgebra_constant, ConstantParams, Variant};
use crate::lab::gamma::inverse_incomplete_gamma;
use crate::lab::measure::{measure_condition_check, MeasureOptions, PhiMuTransform};
use crate::lab::superposition::{exp_map_continuity, superposition_growth, SuperpositionOptions};
use crate::norm::{embedding_check, NormParams};
use crate::sequence::{associated_sequence, check_log_convexity};
use crate::weight::WeightFunction;

pub const PARTITION_TOL: f64 = 1e-12;
pub const SELF_DUALITY_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const CLASS_SECONDS: f64 = 5.0;
pub const SEQUENCE_TOL: f64 = 1e-6;
pub const FACTORIAL_BAND: f64 = 4.0;
pub const DOUBLING_GROWTH: f64 = 0.25;
pub const BLOWUP_FACTOR: f64 = 10.0;
pub const SCALING_TOL: f64 = 1e-12;
pub const GAMMA_TOL: f64 = 1e-10;
pub const LIMIT_TOL: f64 = 0.05;
pub const GROWTH_EXPONENT_MAX: f64 = 0.6;
pub const LINEARITY_TOL: f64 = 0.1;
pub const CONTINUITY_TOL: f64 = 0.2;
pub const DECAY_EXPONENT: (f64, f64) = (0.45, 0.55);
pub const ZERO_INTEGRAL_TOL: f64 = 1e-10;
pub const REFINEMENT_TOL: f64 = 1e-3;
pub const WINDOW_BAND: (f64, f64) = (0.1, 10.0);

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "partition of unity"),
    (2, "transform fidelity"),
    (3, "weight class"),
    (4, "subadditivity constant"),
    (5, "associated sequence"),
    (6, "doubling dichotomy"),
    (7, "algebra property"),
    (8, "subalgebra constants"),
    (9, "inverse incomplete gamma limit"),
    (10, "superposition growth"),
    (11, "continuity of the exponential map"),
    (12, "measure conditions for the bump transform"),
    (13, "embeddings"),
    (14, "window independence"),
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub summary: String,
    pub details: Value,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<44} {}  {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.summary
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bundle {
    pub checks: Vec<CheckOutcome>,
    pub passed: usize,
    pub failed: usize,
}

/// Grid, weight and truncation shared by the corpus-wide checks.
#[derive(Debug, Clone)]
pub struct CorpusSetup {
    pub grid: Grid,
    pub weight: WeightFunction,
    pub k_max: usize,
}

impl CorpusSetup {
    pub fn standard() -> Self {
        Self {
            grid: Grid::new(1, 32.0, 32768).expect("valid grid"),
            weight: WeightFunction::gevrey(4.0).expect("valid weight"),
            k_max: 900,
        }
    }

    pub fn settings(&self) -> LabSettings {
        LabSettings::new(self.weight.clone(), self.k_max)
    }
}

/// Grid, weight and truncation for the superposition and continuity checks.
#[derive(Debug, Clone)]
pub struct BumpSetup {
    pub grid: Grid,
    pub weight: WeightFunction,
    pub k_max: usize,
    pub bump: FunctionSpec,
}

impl BumpSetup {
    pub fn standard() -> Self {
        Self {
            grid: Grid::new(1, 16.0, 32768).expect("valid grid"),
            weight: WeightFunction::gevrey(2.0).expect("valid weight"),
            k_max: 1200,
            bump: FunctionSpec::unit_bump(-1.0),
        }
    }
}

fn outcome(id: u8, pass: bool, summary: String, details: Value, start: Instant) -> CheckOutcome {
    CheckOutcome {
        id,
        name: CRITERIA[id as usize - 1].1.to_string(),
        pass,
        summary,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn criterion_1() -> Result<CheckOutcome> {
    let t = Instant::now();
    let part = Partition::default();
    let g1 = Grid::new(1, 32.0, 4096)?;
    let g2 = Grid::new(2, 32.0, 256)?;
    let r1 = partition_properties(&part, &g1, 8);
    let r2 = partition_properties(&part, &g2, 8);
    let pass = r1.all_pass(PARTITION_TOL) && r2.all_pass(PARTITION_TOL);
    let summary = format!(
        "max|sum-1| = {:.2e} (n=1), {:.2e} (n=2); half-cube lower bound {:.3}",
        r1.max_sum_deviation, r2.max_sum_deviation, r1.half_cube_lower_bound
    );
    Ok(outcome(1, pass, summary, json!({"n1": r1, "n2": r2}), t))
}

pub fn criterion_2() -> Result<CheckOutcome> {
    let t = Instant::now();
    let mut duality = 0.0_f64;
    let mut round_trip = 0.0_f64;
    for grid in [Grid::new(1, 32.0, 4096)?, Grid::new(2, 32.0, 512)?] {
        let f = crate::decomposition::SampledFunction::from_real_fn(grid, |x| {
            (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
        });
        let spec = forward_transform(&f)?;
        for (flat, z) in spec.values().iter().enumerate() {
            let idx = grid.unflatten(flat);
            let xi: Vec<f64> = idx[..grid.dim()].iter().map(|&i| grid.frequency(i)).collect();
            if xi.iter().map(|v| v * v).sum::<f64>().sqrt() <= 10.0 {
                let exact = (-0.5 * xi.iter().map(|v| v * v).sum::<f64>()).exp();
                duality = duality.max((z - Complex64::new(exact, 0.0)).norm());
            }
        }
        let back = inverse_transform(&spec)?;
        for (a, b) in back.values().iter().zip(f.values()) {
            round_trip = round_trip.max((a - b).norm());
        }
    }
    let pass = duality <= SELF_DUALITY_TOL && round_trip <= ROUND_TRIP_TOL;
    let summary = format!("self-duality error {duality:.2e}, round trip {round_trip:.2e}");
    Ok(outcome(2, pass, summary, json!({"self_duality": duality, "round_trip": round_trip}), t))
}

pub fn criterion_3() -> Result<CheckOutcome> {
    let t = Instant::now();
    let cases = [
        (WeightFunction::gevrey(2.0)?, Some(Subclass::W1)),
        (WeightFunction::gevrey(4.0)?, Some(Subclass::W1)),
        (WeightFunction::loglog()?, Some(Subclass::W0)),
        (WeightFunction::bracket(1.0)?, None),
    ];
    let mut pass = true;
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for (w, expect) in cases {
        let start = Instant::now();
        let report = check_conditions(&w, &GridSpec1D::default())?;
        let secs = start.elapsed().as_secs_f64();
        let ok = match expect {
            Some(sub) => report.all_pass() && report.subclass == sub,
            None => report.verdicts.get("A1").is_some_and(|v| v.is_fail()) && report.alpha_estimate > 0.95,
        } && secs < CLASS_SECONDS;
        pass &= ok;
        parts.push(format!("{} {}", w.label(), if ok { "ok" } else { "bad" }));
        rows.push(json!({"weight": w.label(), "ok": ok, "seconds": secs, "report": report}));
    }
    Ok(outcome(3, pass, parts.join(", "), Value::Array(rows), t))
}

pub fn criterion_4() -> Result<CheckOutcome> {
    let t = Instant::now();
    let w = WeightFunction::gevrey(2.0)?;
    let x_tilde = compute_x_tilde(&w)?.x_tilde;
    let search = find_subadditivity_s(&w, x_tilde, 200.0, 0.25)?;
    let (s, verified) = match &search {
        SubadditivitySearch::Certified(c) => {
            let check = verify_subadditivity(&w, c, 200.0)?;
            (c.s, check.is_clean())
        }
        SubadditivitySearch::Failed(_) => (0.0, false),
    };
    let linear = WeightFunction::power(1.0)?;
    let control = find_subadditivity_s(&linear, x_tilde, 200.0, 0.25)?;
    let control_fails = matches!(control, SubadditivitySearch::Failed(_));
    let pass = s > 0.0 && verified && control_fails;
    let summary = format!("s* = {s:.3} for gevrey:s=2 (re-verified: {verified}); linear weight certified: {}", !control_fails);
    Ok(outcome(4, pass, summary, json!({"x_tilde": x_tilde, "search": search, "control": control}), t))
}

pub fn criterion_5() -> Result<CheckOutcome> {
    let t = Instant::now();
    let sqrt = associated_sequence(&WeightFunction::power(0.5)?, 20)?;
    let mut worst = 0.0_f64;
    for p in 1..=20 {
        let exact = 2.0 * p as f64 * (2.0 * p as f64).ln() - 2.0 * p as f64;
        worst = worst.max(((sqrt.log_values[p] - exact).exp() - 1.0).abs());
    }
    let gev = associated_sequence(&WeightFunction::gevrey(2.0)?, 50)?;
    let violations = check_log_convexity(&gev);
    let mut ln_fact = 0.0;
    let mut band = Vec::new();
    for p in 1..=50usize {
        ln_fact += (p as f64).ln();
        if p >= 10 {
            band.push(((gev.log_values[p] - 2.0 * ln_fact) / p as f64).exp());
        }
    }
    let hi = band.iter().cloned().fold(f64::MIN, f64::max);
    let lo = band.iter().cloned().fold(f64::MAX, f64::min);
    let pass = worst <= SEQUENCE_TOL && violations.is_empty() && hi / lo <= FACTORIAL_BAND;
    let summary = format!(
        "sqrt closed form rel err {worst:.1e}; convexity violations {}; factorial band ratio {:.3}",
        violations.len(),
        hi / lo
    );
    Ok(outcome(5, pass, summary, json!({"sqrt_rel_err": worst, "violations": violations, "band": band}), t))
}

pub fn criterion_6() -> Result<CheckOutcome> {
    let t = Instant::now();
    let d = find_doubling_d(&WeightFunction::gevrey(2.0)?, 1e4);
    let trend = doubling_trend(&WeightFunction::loglog()?, &[1e2, 1e3, 1e4, 1e5, 1e6]);
    let min_growth = trend.growth_per_decade.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = d.is_some() && min_growth >= DOUBLING_GROWTH;
    let summary = format!(
        "gevrey:s=2 D = {}; loglog minimal D growth per decade >= {:.1}%",
        d.map_or("none".into(), |d| format!("{d:.2}")),
        100.0 * min_growth
    );
    Ok(outcome(6, pass, summary, json!({"gevrey_d": d, "loglog": trend}), t))
}

pub fn criterion_7() -> Result<CheckOutcome> {
    let t = Instant::now();
    let setup = CorpusSetup::standard();
    let settings = setup.settings();
    let corpus = standard_corpus();
    let report = algebra_report(&corpus, &setup.grid, 2.0, 2.0, 1.0, &settings)?;
    let scaled: Vec<FunctionSpec> = corpus.iter().map(|f| f.scaled(2.0)).collect();
    let rescaled = algebra_report(&scaled, &setup.grid, 2.0, 2.0, 1.0, &settings)?;
    let mut drift = report
        .ratios
        .iter()
        .zip(&rescaled.ratios)
        .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let f = corpus[0].sample(&setup.grid)?;
    let g = corpus[3].sample(&setup.grid)?;
    let base = algebra_ratio(&f, &g, 2.0, 2.0, 1.0, &settings)?;
    let skew = algebra_ratio(
        &f.scale(Complex64::new(2.0, 0.0)),
        &g.scale(Complex64::new(0.5, 0.0)),
        2.0,
        2.0,
        1.0,
        &settings,
    )?;
    drift = drift.max((base.ratio - skew.ratio).abs() / base.ratio);
    let pass = report.bounded(BLOWUP_FACTOR) && drift <= SCALING_TOL;
    let summary = format!(
        "max ratio {:.4} vs median {:.4}; certified {}; rescaling drift {drift:.1e}",
        report.max_ratio, report.median_ratio, report.all_certified
    );
    Ok(outcome(7, pass, summary, json!({"report": report, "rescaling_drift": drift}), t))
}

pub fn criterion_8() -> Result<CheckOutcome> {
    let t = Instant::now();
    let w = WeightFunction::gevrey(2.0)?;
    let x_tilde = compute_x_tilde(&w)?.x_tilde;
    let s = match find_subadditivity_s(&w, x_tilde, 200.0, 0.25)? {
        SubadditivitySearch::Certified(c) => c.s.min(1.0),
        SubadditivitySearch::Failed(_) => 1.0,
    };
    let mut params = ConstantParams::new(Variant::RvA);
    params.s = s;
    let rs: Vec<f64> = (2..=32).map(|r| r as f64).collect();
    let rv: Vec<f64> = rs.iter().map(|&r| subalgebra_constant(&params, r).map(|c| c.integral_value)).collect::<Result<_>>()?;
    let decreasing = rv.windows(2).all(|p| p[1] < p[0]);
    let at_two = (rv[0] - 1.0).abs();
    let mut sv = ConstantParams::new(Variant::Sv);
    sv.big_n = 3;
    let c10 = subalgebra_constant(&sv, 10.0)?.constant;
    let c20 = subalgebra_constant(&sv, 20.0)?.constant;
    let sv_err = (c20 / c10 - 0.125).abs() / 0.125;
    let pass = decreasing && at_two <= GAMMA_TOL && sv_err <= 1e-12;
    let summary = format!(
        "D_R integral strictly decreasing on R = 2..32: {decreasing}; |value(2) - Gamma(2)| = {at_two:.1e}; SV ratio error {sv_err:.1e}"
    );
    Ok(outcome(8, pass, summary, json!({"s": s, "R": rs, "integral": rv, "sv_10": c10, "sv_20": c20}), t))
}

pub fn criterion_9() -> Result<CheckOutcome> {
    let t = Instant::now();
    let mut exact_err = 0.0_f64;
    for l in [0.5, 5.0, 20.0, 100.0] {
        exact_err = exact_err.max((inverse_incomplete_gamma(1.0, (-l as f64).exp())? - l).abs());
    }
    let us = [1e-4, 1e-6, 1e-8];
    let ratios: Vec<f64> = us
        .iter()
        .map(|&u| inverse_incomplete_gamma(2.0, u).map(|g| g / (1.0 / u).ln()))
        .collect::<Result<_>>()?;
    let monotone = ratios.windows(2).all(|p| (p[1] - 1.0).abs() < (p[0] - 1.0).abs());
    let last = ratios[2];
    let pass = exact_err <= GAMMA_TOL && monotone && (last - 1.0).abs() <= LIMIT_TOL;
    let summary = format!(
        "beta=1 error {exact_err:.1e}; beta=2 g(u)/ln(1/u) = {:.4}, {:.4}, {:.4} at 1e-4, 1e-6, 1e-8",
        ratios[0], ratios[1], ratios[2]
    );
    Ok(outcome(9, pass, summary, json!({"beta1_error": exact_err, "u": us, "ratios": ratios}), t))
}

pub fn criterion_10() -> Result<CheckOutcome> {
    let t = Instant::now();
    let setup = BumpSetup::standard();
    let u = setup.bump.sample(&setup.grid)?;
    let settings = LabSettings::new(setup.weight.clone(), setup.k_max);
    let opts = SuperpositionOptions {
        lambdas: vec![0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
        ..Default::default()
    };
    let r = superposition_growth(&u, &setup.bump.to_string(), &settings, &opts)?;
    let pass = r.fitted_exponent <= GROWTH_EXPONENT_MAX && r.small_branch_spread <= LINEARITY_TOL && r.aliased.is_empty();
    let summary = format!(
        "growth exponent {:.3} (excess {:.3}); small-lambda spread {:.2}%; certified {}",
        r.fitted_exponent,
        r.excess_exponent,
        100.0 * r.small_branch_spread,
        r.all_certified()
    );
    Ok(outcome(10, pass, summary, serde_json::to_value(&r)?, t))
}

pub fn criterion_11() -> Result<CheckOutcome> {
    let t = Instant::now();
    let setup = BumpSetup::standard();
    let u = setup.bump.sample(&setup.grid)?;
    let settings = LabSettings::new(setup.weight.clone(), setup.k_max);
    let deltas: Vec<f64> = (0..5).map(|i| 0.1 / 2f64.powi(i)).collect();
    let r = exp_map_continuity(&u, &setup.bump.to_string(), &settings, 2.0, 1.0, 1.0, &deltas)?;
    let pass = r.monotone && r.c_stability <= CONTINUITY_TOL && !r.aliased;
    let summary = format!(
        "moduli monotone {}; C = {:.4} -> {:.4} (change {:.2}%)",
        r.monotone,
        r.constants[3],
        r.constants[4],
        100.0 * r.c_stability
    );
    Ok(outcome(11, pass, summary, serde_json::to_value(&r)?, t))
}

pub fn criterion_12() -> Result<CheckOutcome> {
    let t = Instant::now();
    let grid = Grid::new(1, 16.0, 32768)?;
    let bump = FunctionSpec::bump(-1.0).sample(&grid)?;
    let fit = fourier_decay_fit(&bump, 0.5)?;
    let g = PhiMuTransform::new(-1.0)?.with_fitted_envelope(&grid)?;
    let w = WeightFunction::gevrey(4.0)?;
    let m = measure_condition_check(&g, &w, Variant::RvA, 1e8, &MeasureOptions::default())?;
    let kappa_ok = (DECAY_EXPONENT.0..=DECAY_EXPONENT.1).contains(&fit.fitted_exponent);
    let integral = m.integral_re.hypot(m.integral_im);
    let pass = kappa_ok && m.monotone_decreasing && integral + m.integral_tail_bound <= ZERO_INTEGRAL_TOL;
    let summary = format!(
        "decay exponent {:.3}; ratio monotone over [1e6, 1e8]: {}; |int F phi| = {:.1e} (tail {:.1e})",
        fit.fitted_exponent, m.monotone_decreasing, integral, m.integral_tail_bound
    );
    Ok(outcome(12, pass, summary, json!({"fit": fit, "measure": m}), t))
}

fn embedding_ratios(setup: &CorpusSetup, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let q_pairs = [((2.0, 1.0), (2.0, 2.0)), ((2.0, 1.0), (2.0, f64::INFINITY)), ((1.0, 1.0), (1.0, 2.0))];
    let p_pairs = [((1.0, 1.0), (2.0, 1.0)), ((2.0, 1.0), (f64::INFINITY, 1.0)), ((1.0, 2.0), (2.0, 2.0))];
    let base = NormParams::new(setup.weight.clone(), 2.0, 1.0).with_k_max(setup.k_max);
    let mut q_ratios = Vec::new();
    let mut p_ratios = Vec::new();
    for spec in standard_corpus() {
        let f = spec.sample(grid)?;
        q_ratios.extend(embedding_check(&f, &setup.weight, &q_pairs, &base)?.into_iter().map(|r| r.ratio));
        p_ratios.extend(embedding_check(&f, &setup.weight, &p_pairs, &base)?.into_iter().map(|r| r.ratio));
    }
    Ok((q_ratios, p_ratios))
}

pub fn criterion_13() -> Result<CheckOutcome> {
    let t = Instant::now();
    let setup = CorpusSetup::standard();
    let (q1, p1) = embedding_ratios(&setup, &setup.grid)?;
    let (q2, p2) = embedding_ratios(&setup, &setup.grid.refined(2)?)?;
    let q_max = q1.iter().chain(&q2).cloned().fold(0.0, f64::max);
    let p_const = p1.iter().cloned().fold(0.0, f64::max);
    let drift = q1
        .iter()
        .chain(&p1)
        .zip(q2.iter().chain(&p2))
        .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let pass = q_max <= 1.0 && p1.iter().chain(&p2).all(|r| r.is_finite()) && drift <= REFINEMENT_TOL;
    let summary = format!("max q-ratio {q_max:.6}; p-embedding constant {p_const:.4}; refinement drift {drift:.1e}");
    Ok(outcome(
        13,
        pass,
        summary,
        json!({"q_ratios": q1, "p_ratios": p1, "q_ratios_refined": q2, "p_ratios_refined": p2}),
        t,
    ))
}

pub fn criterion_14() -> Result<CheckOutcome> {
    let t = Instant::now();
    let setup = CorpusSetup::standard();
    let a = setup.settings();
    let b = setup.settings().with_partition(Partition::with_plateau(0.3)?);
    let mut ratios = Vec::new();
    let mut drift = 0.0_f64;
    for spec in standard_corpus() {
        let f = spec.sample(&setup.grid)?;
        let r = b.norm(&f, 2.0, 1.0)?.value / a.norm(&f, 2.0, 1.0)?.value;
        let g = f.scale(Complex64::new(3.0, 0.0));
        let r3 = b.norm(&g, 2.0, 1.0)?.value / a.norm(&g, 2.0, 1.0)?.value;
        drift = drift.max((r - r3).abs() / r);
        ratios.push(r);
    }
    let pass = ratios.iter().all(|r| (WINDOW_BAND.0..=WINDOW_BAND.1).contains(r)) && drift <= SCALING_TOL;
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let summary = format!("norm ratios in [{lo:.4}, {hi:.4}]; amplitude drift {drift:.1e}");
    Ok(outcome(14, pass, summary, json!({"ratios": ratios, "scaling_drift": drift}), t))
}

/// Runs criterion `id` (1 to 14).
pub fn run_check(id: u8) -> Result<CheckOutcome> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        13 => criterion_13(),
        14 => criterion_14(),
        other => Err(crate::Error::InvalidParameter(format!("no criterion {other}"))),
    }
}

/// Runs every criterion in order; an error inside a check is recorded as a failure.
pub fn run_all() -> Bundle {
    let checks: Vec<CheckOutcome> = CRITERIA
        .iter()
        .map(|&(id, name)| {
            let t = Instant::now();
            run_check(id).unwrap_or_else(|e| CheckOutcome {
                id,
                name: name.to_string(),
                pass: false,
                summary: format!("error: {e}"),
                details: Value::Null,
                seconds: t.elapsed().as_secs_f64(),
            })
        })
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    Bundle {
        failed: checks.len() - passed,
        passed,
        checks,
    }
}

//! Conditions on the Fourier density `g` of the outer function of a superposition:
//! the decay ratio trend, `∫ g = 0`, and finiteness of `∫ e^{λE(|ξ|)} |g(ξ)| dξ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::constants::Variant;
use super::quadrature::{composite_gauss, simpson_weight};
use crate::corpus::{fourier_decay_fit, gevrey_order, phi_mu, DecayFit, FunctionSpec};
use crate::decomposition::Grid;
use crate::error::{Error, Result};
use crate::report::{real, reals};
use crate::weight::WeightFunction;

/// A density on the real line, evaluable pointwise.
pub trait Density: Sync {
    fn value(&self, xi: f64) -> Complex64;

    /// `ln|g(ξ)|` as used by the decay conditions.
    fn log_abs(&self, xi: f64) -> f64 {
        self.value(xi).norm().ln()
    }

    fn label(&self) -> String;
}

/// A density given by a closure.
pub struct FnDensity<F> {
    label: String,
    f: F,
}

impl<F: Fn(f64) -> Complex64 + Sync> FnDensity<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { label: label.into(), f }
    }
}

impl<F: Fn(f64) -> Complex64 + Sync> Density for FnDensity<F> {
    fn value(&self, xi: f64) -> Complex64 {
        (self.f)(xi)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `e^{-eps |ξ|^κ}`.
#[derive(Debug, Clone, Copy)]
pub struct StretchedExponential {
    pub eps: f64,
    pub kappa: f64,
}

impl Density for StretchedExponential {
    fn value(&self, xi: f64) -> Complex64 {
        Complex64::new(self.log_abs(xi).exp(), 0.0)
    }

    fn log_abs(&self, xi: f64) -> f64 {
        -self.eps * xi.abs().powf(self.kappa)
    }

    fn label(&self) -> String {
        format!("exp(-{}|xi|^{})", self.eps, self.kappa)
    }
}

/// `F φ_μ`, evaluated by composite Gauss–Legendre quadrature on `[0, 1]`.
///
/// Far out, where quadrature round-off dominates, `ln|g|` is taken from a fitted
/// envelope `ln c - eps |ξ|^κ` when one is attached.
pub struct PhiMuTransform {
    mu: f64,
    nodes: Vec<(f64, f64)>,
    envelope: Option<DecayFit>,
}

impl PhiMuTransform {
    pub const PANELS: usize = 20;
    pub const ORDER: usize = 64;

    pub fn new(mu: f64) -> Result<Self> {
        FunctionSpec::bump(mu).validate()?;
        let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let nodes = composite_gauss(0.0, 1.0, Self::PANELS, Self::ORDER)
            .into_iter()
            .map(|(t, w)| (t, c * w * phi_mu(mu, t)))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        Ok(Self { mu, nodes, envelope: None })
    }

    /// Attaches the envelope fitted to the sampled bump on `grid`.
    pub fn with_fitted_envelope(mut self, grid: &Grid) -> Result<Self> {
        let f = FunctionSpec::bump(self.mu).sample(grid)?;
        self.envelope = Some(fourier_decay_fit(&f, 1.0 / gevrey_order(self.mu))?);
        Ok(self)
    }

    pub fn envelope(&self) -> Option<&DecayFit> {
        self.envelope.as_ref()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl Density for PhiMuTransform {
    fn value(&self, xi: f64) -> Complex64 {
        self.nodes.iter().map(|&(t, a)| Complex64::from_polar(a, -t * xi)).sum()
    }

    fn log_abs(&self, xi: f64) -> f64 {
        match &self.envelope {
            Some(env) if xi.abs() >= env.xi_range.0 => env.log_envelope(xi),
            _ => self.value(xi).norm().ln(),
        }
    }

    fn label(&self) -> String {
        format!("F phi_mu (mu = {})", self.mu)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    /// `λ` in the exponential moment.
    pub lambda: f64,
    /// `ε` in the SV ratio `w(|ξ|^{1+ε}) / ln|g|`.
    pub sv_epsilon: f64,
    pub points_per_decade: usize,
    /// Smallest `|ξ|` of the ratio grid.
    pub xi_min: f64,
    pub zero_tol: f64,
    /// Uniform Simpson step for `∫ g`.
    pub simpson_step: f64,
    /// Largest half-width considered for `∫ g`.
    pub integral_cap: f64,
    /// Step in `ln|ξ|` for the exponential moment.
    pub log_step: f64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            sv_epsilon: 0.1,
            points_per_decade: 10,
            xi_min: 10.0,
            zero_tol: 1e-10,
            simpson_step: 1.0 / 64.0,
            integral_cap: 4096.0,
            log_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub density: String,
    pub weight_spec: String,
    pub variant: Variant,
    pub xi_max: f64,
    pub xi: Vec<f64>,
    /// `E(|ξ|) / (-ln|g(ξ)|)`, with `E` the variant's growth function.
    #[serde(serialize_with = "reals")]
    pub ratios: Vec<f64>,
    /// Start of the last two decades, over which the trend is judged.
    pub trend_from: f64,
    pub monotone_decreasing: bool,
    #[serde(serialize_with = "real")]
    pub last_ratio: f64,
    pub integral_re: f64,
    pub integral_im: f64,
    pub integral_extent: f64,
    #[serde(serialize_with = "real")]
    pub integral_tail_bound: f64,
    pub integral_zero: bool,
    pub lambda: f64,
    #[serde(serialize_with = "real")]
    pub l_integral: f64,
    #[serde(serialize_with = "real")]
    pub l_tail_bound: f64,
    pub l_certified: bool,
}

fn growth_function<'a>(w: &'a WeightFunction, variant: Variant, eps: f64) -> Result<impl Fn(f64) -> f64 + 'a> {
    let alpha = w.index_alpha();
    if variant != Variant::Sv && !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("{variant} needs a weight with positive index, got {alpha}")));
    }
    Ok(move |x: f64| -> f64 {
        let x = x.abs();
        match variant {
            Variant::RvA => x.powf(alpha) * x.ln(),
            Variant::RvB => {
                let l = x.ln();
                let tilde = if l > 0.0 {
                    w.slowly_varying_part(x * l.powf(1.0 / alpha)).unwrap_or(f64::NAN)
                } else {
                    w.slowly_varying_part(x).unwrap_or(f64::NAN)
                };
                x.powf(alpha) * l * tilde
            }
            Variant::Sv => w.value(x.powf(1.0 + eps)),
        }
    })
}

/// Simpson sum of `h(ξ)` over `[a, b]` with step close to `step` (even count).
fn simpson<F: Fn(f64) -> Complex64 + Sync>(a: f64, b: f64, step: f64, h: F) -> Complex64 {
    let mut m = ((b - a) / step).round().max(2.0) as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let dh = (b - a) / m as f64;
    (0..=m)
        .into_par_iter()
        .map(|i| h(a + i as f64 * dh) * simpson_weight(i, m + 1, dh))
        .sum()
}

/// `∫ g` over `[-X, X]` on dyadic panels `[0,1], [1,2], [2,4], ...` with a geometric tail bound.
fn zero_integral(g: &dyn Density, opts: &MeasureOptions) -> (Complex64, f64, f64) {
    let sym = |x: f64| g.value(x) + g.value(-x);
    let abs = |x: f64| Complex64::new(g.value(x).norm() + g.value(-x).norm(), 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    let mut prev = f64::INFINITY;
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        total += simpson(lo, hi, opts.simpson_step, sym);
        let a = simpson(lo, hi, opts.simpson_step, abs).re;
        mass += a;
        let r = a / prev;
        if (r < 1.0 && a <= 1e-13 * mass) || hi >= opts.integral_cap {
            let tail = if r < 1.0 { a * r / (1.0 - r) } else { f64::INFINITY };
            return (total, hi, tail);
        }
        prev = a;
        lo = hi;
        hi *= 2.0;
    }
}

/// `∫ e^{λE(|ξ|)} |g(ξ)| dξ` over `|ξ| <= xi_max`, with a tail bound from the decade panels.
fn exponential_moment(g: &dyn Density, e: &(dyn Fn(f64) -> f64 + Sync), xi_max: f64, opts: &MeasureOptions) -> (f64, f64) {
    let lam = opts.lambda;
    let inner = |x: f64| -> f64 {
        let v = (lam * e(x) + g.log_abs(x)).exp() + (lam * e(-x) + g.log_abs(-x)).exp();
        if v.is_nan() { 0.0 } else { v }
    };
    let near = simpson(0.0, 1.0, opts.simpson_step, |x| Complex64::new(if x == 0.0 { 2.0 * g.value(0.0).norm() } else { inner(x) }, 0.0)).re;
    let y_max = xi_max.ln();
    let decades = (y_max / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let mut panels = Vec::with_capacity(decades);
    for d in 0..decades {
        let a = d as f64 * std::f64::consts::LN_10;
        let b = (a + std::f64::consts::LN_10).min(y_max);
        if b <= a {
            break;
        }
        panels.push(simpson(a, b, opts.log_step, |y| Complex64::new(inner(y.exp()) * y.exp(), 0.0)).re);
    }
    let total = near + panels.iter().sum::<f64>();
    let n = panels.len();
    let tail = if n >= 2 && panels[n - 2] > 0.0 {
        let r = panels[n - 1] / panels[n - 2];
        if r < 1.0 { panels[n - 1] * r / (1.0 - r) } else { f64::INFINITY }
    } else if n >= 1 && panels[n - 1] == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    (total, tail)
}

/// Runs the three measure conditions for `g` against the weight `w`.
pub fn measure_condition_check(
    g: &dyn Density,
    w: &WeightFunction,
    variant: Variant,
    xi_max: f64,
    opts: &MeasureOptions,
) -> Result<MeasureReport> {
    if !(xi_max > 100.0 * opts.xi_min) || !xi_max.is_finite() {
        return Err(Error::InvalidParameter(format!("xi_max = {xi_max} must exceed 100 xi_min")));
    }
    if !(g.log_abs(xi_max) < g.log_abs(xi_max / 100.0)) {
        return Err(Error::InvalidParameter(format!("density {} does not decay", g.label())));
    }
    let e = growth_function(w, variant, opts.sv_epsilon)?;
    let decades = (xi_max / opts.xi_min).log10();
    let count = (decades * opts.points_per_decade as f64).round() as usize;
    let xi: Vec<f64> = (0..=count)
        .map(|i| opts.xi_min * 10f64.powf(decades * i as f64 / count as f64))
        .collect();
    let ratios: Vec<f64> = xi
        .iter()
        .map(|&x| {
            let d = -g.log_abs(x);
            if d > 0.0 { e(x) / d } else { f64::INFINITY }
        })
        .collect();
    let trend_from = xi_max / 100.0;
    let window: Vec<f64> = xi.iter().zip(&ratios).filter(|(x, _)| **x >= trend_from * (1.0 - 1e-12)).map(|(_, r)| *r).collect();
    let monotone_decreasing = window.len() >= 2 && window.iter().all(|r| r.is_finite()) && window.windows(2).all(|p| p[1] < p[0]);

    let (integral, extent, tail) = zero_integral(g, opts);
    let integral_zero = integral.norm() + tail <= opts.zero_tol;
    let (l_integral, l_tail_bound) = exponential_moment(g, &e, xi_max, opts);
    let l_certified = l_integral.is_finite() && l_tail_bound <= 1e-12 * l_integral.max(f64::MIN_POSITIVE);
    Ok(MeasureReport {
        density: g.label(),
        weight_spec: w.label().to_string(),
        variant,
        xi_max,
        xi,
        last_ratio: *ratios.last().unwrap_or(&f64::NAN),
        ratios,
        trend_from,
        monotone_decreasing,
        integral_re: integral.re,
        integral_im: integral.im,
        integral_extent: extent,
        integral_tail_bound: tail,
        integral_zero,
        lambda: opts.lambda,
        l_integral,
        l_tail_bound,
        l_certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_density_integrates_to_zero_exactly() {
        let g = FnDensity::new("xi exp(-xi^2)", |x: f64| Complex64::new(x * (-x * x).exp(), 0.0));
        let (i, _, tail) = zero_integral(&g, &MeasureOptions::default());
        assert_eq!(i.norm(), 0.0);
        assert!(tail < 1e-12);
    }

    #[test]
    fn slower_decay_than_weight_fails() {
        let w = WeightFunction::gevrey(2.0).unwrap();
        let g = StretchedExponential { eps: 1.0, kappa: 0.4 };
        let r = measure_condition_check(&g, &w, Variant::RvA, 1e8, &MeasureOptions::default()).unwrap();
        assert!(!r.monotone_decreasing);
    }

    #[test]
    fn phi_transform_matches_value_at_zero() {
        let g = PhiMuTransform::new(-1.0).unwrap();
        let direct: f64 = composite_gauss(0.0, 1.0, 40, 64).iter().map(|(t, w)| w * phi_mu(-1.0, *t)).sum();
        let expect = direct / (2.0 * std::f64::consts::PI).sqrt();
        assert!((g.value(0.0).re - expect).abs() < 1e-15);
    }
}

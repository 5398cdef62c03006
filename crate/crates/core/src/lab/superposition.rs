//! Growth of `λ ↦ ‖e^{iλu} - 1‖` and continuity of `ξ ↦ e^{iuξ} - 1`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::algebra::LabSettings;
use crate::decomposition::{forward_transform, inverse_transform, SampledFunction};
use crate::error::{Error, Result};
use crate::report::{csv_real, real, reals};

pub const DEFAULT_LAMBDAS: [f64; 9] = [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
/// `λ · max|∇u| · dx` above this is treated as aliased.
pub const ALIASING_LIMIT: f64 = 0.5;
pub const SMALL_LAMBDA_MAX: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct SuperpositionOptions {
    pub p: f64,
    pub q: f64,
    pub lambdas: Vec<f64>,
    pub theta: f64,
    pub big_n: u32,
    /// Smallest `λ` used by the growth-exponent regressions.
    pub growth_from: f64,
}

impl Default for SuperpositionOptions {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: 1.0,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            theta: 2.0,
            big_n: 1,
            growth_from: 2.0,
        }
    }
}

/// `max_x |∇u(x)|` by spectral differentiation (largest over the axes).
pub fn spectral_gradient_max(u: &SampledFunction) -> Result<f64> {
    let spec = forward_transform(u)?;
    let grid = *u.grid();
    let mut best = 0.0_f64;
    for axis in 0..grid.dim() {
        let mut d = spec.clone().into_values();
        for (flat, z) in d.iter_mut().enumerate() {
            let idx = grid.unflatten(flat)[axis];
            *z *= Complex64::new(0.0, grid.frequency(idx));
        }
        let d = SampledFunction::from_values(grid, d, spec.domain())?;
        best = best.max(inverse_transform(&d)?.sup_norm());
    }
    Ok(best)
}

fn require_real(u: &SampledFunction) -> Result<()> {
    if !u.is_real(1e-12 * u.sup_norm().max(f64::MIN_POSITIVE)) {
        return Err(Error::InvalidParameter("u must be real-valued".into()));
    }
    Ok(())
}

/// `e^{iλu} - 1` pointwise.
pub fn exp_map(u: &SampledFunction, lambda: f64) -> SampledFunction {
    u.map(|z| {
        let a = lambda * z.re;
        Complex64::new(-2.0 * (0.5 * a).sin().powi(2), a.sin())
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundComparison {
    pub lambda_max: f64,
    pub log_rv_bound: f64,
    pub log_sv_bound: f64,
    pub theta: f64,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub sv_dominates: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperpositionReport {
    pub u_id: String,
    pub weight_spec: String,
    #[serde(serialize_with = "real")]
    pub p: f64,
    #[serde(serialize_with = "real")]
    pub q: f64,
    pub lambdas: Vec<f64>,
    /// `‖e^{iλu} - 1‖`; null where `λ` exceeds the aliasing cap.
    #[serde(serialize_with = "reals")]
    pub norms: Vec<f64>,
    pub certified: Vec<bool>,
    pub u_norm: f64,
    pub grad_max: f64,
    #[serde(serialize_with = "real")]
    pub lambda_cap: f64,
    pub aliased: Vec<f64>,
    /// Least-squares `(ln c, b)` in `ln‖v‖ - ln t = ln c + b X(t)`, `t = λ‖u‖`.
    #[serde(serialize_with = "real")]
    pub fit_log_c: f64,
    #[serde(serialize_with = "real")]
    pub fit_b: f64,
    /// Slope of `ln ln‖v_λ‖` against `ln λ` for `λ >= growth_from`.
    #[serde(serialize_with = "real")]
    pub fitted_exponent: f64,
    /// Slope of `ln ln(‖v_λ‖ / (c λ ‖u‖))` against `ln λ`, with `c` from the small-λ branch.
    #[serde(serialize_with = "real")]
    pub excess_exponent: f64,
    pub bound_exponent: f64,
    pub small_branch_c: Vec<f64>,
    #[serde(serialize_with = "real")]
    pub small_branch_spread: f64,
    pub nondecreasing: bool,
    pub comparison: Option<BoundComparison>,
}

impl SuperpositionReport {
    pub fn all_certified(&self) -> bool {
        self.aliased.is_empty() && self.certified.iter().all(|&c| c)
    }

    /// `lambda,norm` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lambda,norm")?;
        for (l, n) in self.lambdas.iter().zip(&self.norms) {
            writeln!(out, "{},{}", csv_real(*l), csv_real(*n))?;
        }
        Ok(())
    }
}

/// Computes `‖e^{iλu} - 1‖` over the `λ` schedule and fits the growth model.
pub fn superposition_growth(
    u: &SampledFunction,
    u_id: &str,
    settings: &LabSettings,
    opts: &SuperpositionOptions,
) -> Result<SuperpositionReport> {
    require_real(u)?;
    if !(opts.p > 1.0 && opts.p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {} must lie in (1, inf)", opts.p)));
    }
    if opts.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter("lambdas must be finite and >= 0".into()));
    }
    let w = &settings.weight;
    let u_norm = settings.norm(u, opts.p, opts.q)?.value;
    let grad_max = spectral_gradient_max(u)?;
    let dx = u.grid().dx();
    let lambda_cap = if grad_max > 0.0 { ALIASING_LIMIT / (grad_max * dx) } else { f64::INFINITY };
    let results: Vec<Option<(f64, bool)>> = opts
        .lambdas
        .par_iter()
        .map(|&l| {
            if l > lambda_cap {
                return Ok(None);
            }
            let r = settings.norm(&exp_map(u, l), opts.p, opts.q)?;
            Ok(Some((r.value, r.certified)))
        })
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = results.iter().map(|r| r.map_or(f64::NAN, |x| x.0)).collect();
    let certified: Vec<bool> = results.iter().map(|r| r.is_some_and(|x| x.1)).collect();
    let aliased: Vec<f64> = opts.lambdas.iter().zip(&results).filter(|(_, r)| r.is_none()).map(|(l, _)| *l).collect();

    let alpha = w.index_alpha();
    let big_n = opts.big_n.max(1) as f64;
    let shape = |t: f64| -> f64 {
        if alpha > 0.0 {
            t.powf(alpha) * t.ln()
        } else {
            w.value(t.powf(1.0 + 1.0 / big_n))
        }
    };

    let small: Vec<f64> = opts
        .lambdas
        .iter()
        .zip(&norms)
        .filter(|(l, n)| **l > 0.0 && **l <= SMALL_LAMBDA_MAX && n.is_finite())
        .map(|(l, n)| n / (l * u_norm))
        .collect();
    let small_spread = if small.is_empty() {
        f64::NAN
    } else {
        let mx = small.iter().cloned().fold(f64::MIN, f64::max);
        let mn = small.iter().cloned().fold(f64::MAX, f64::min);
        mx / mn - 1.0
    };
    let c_small = if small.is_empty() { f64::NAN } else { small.iter().sum::<f64>() / small.len() as f64 };

    let large: Vec<(f64, f64)> = opts
        .lambdas
        .iter()
        .zip(&norms)
        .filter(|(l, n)| **l * u_norm > 1.0 && n.is_finite() && **n > 0.0)
        .map(|(l, n)| (*l, *n))
        .collect();
    let (fit_log_c, fit_b) = {
        let xs: Vec<f64> = large.iter().map(|(l, _)| shape(l * u_norm)).collect();
        let ys: Vec<f64> = large.iter().map(|(l, n)| n.ln() - (l * u_norm).ln()).collect();
        let b = slope(&xs, &ys);
        if b.is_finite() {
            let m = xs.len() as f64;
            (ys.iter().sum::<f64>() / m - b * xs.iter().sum::<f64>() / m, b)
        } else {
            (f64::NAN, f64::NAN)
        }
    };

    let growth: Vec<(f64, f64)> = large.iter().filter(|(l, n)| *l >= opts.growth_from && *n > 1.0).cloned().collect();
    let fitted_exponent = slope(
        &growth.iter().map(|(l, _)| l.ln()).collect::<Vec<_>>(),
        &growth.iter().map(|(_, n)| n.ln().ln()).collect::<Vec<_>>(),
    );
    let excess: Vec<(f64, f64)> = growth
        .iter()
        .map(|(l, n)| (l.ln(), (n / (c_small * l * u_norm)).ln()))
        .filter(|(_, e)| *e > 0.0)
        .collect();
    let excess_exponent = slope(
        &excess.iter().map(|e| e.0).collect::<Vec<_>>(),
        &excess.iter().map(|e| e.1.ln()).collect::<Vec<_>>(),
    );

    let mut nondecreasing = true;
    let tail: Vec<f64> = opts.lambdas.iter().zip(&norms).filter(|(l, n)| **l >= 1.0 && n.is_finite()).map(|(_, n)| *n).collect();
    for pair in tail.windows(2) {
        if pair[1] < 0.95 * pair[0] {
            nondecreasing = false;
        }
    }

    let comparison = large.last().filter(|_| fit_b.is_finite()).map(|&(l, _)| {
        let t = l * u_norm;
        let rv_shape = if alpha > 0.0 { t.powf(alpha) * t.ln() } else { t.ln() };
        let log_rv_bound = fit_log_c + t.ln() + fit_b * rv_shape;
        let log_sv_bound = fit_log_c + t.ln() + opts.theta * w.value(fit_b.abs() * t.powf(1.0 + 1.0 / big_n));
        BoundComparison {
            lambda_max: l,
            log_rv_bound,
            log_sv_bound,
            theta: opts.theta,
            big_n: opts.big_n.max(1),
            sv_dominates: log_sv_bound >= log_rv_bound,
        }
    });

    Ok(SuperpositionReport {
        u_id: u_id.to_string(),
        weight_spec: w.label().to_string(),
        p: opts.p,
        q: opts.q,
        lambdas: opts.lambdas.clone(),
        norms,
        certified,
        u_norm,
        grad_max,
        lambda_cap,
        aliased,
        fit_log_c,
        fit_b,
        fitted_exponent,
        excess_exponent,
        bound_exponent: alpha,
        small_branch_c: small,
        small_branch_spread: small_spread,
        nondecreasing,
        comparison,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub u_id: String,
    pub xi0: f64,
    pub deltas: Vec<f64>,
    /// `‖g(ξ0 + δ) - g(ξ0)‖` with `g(ξ) = e^{iuξ} - 1`.
    pub moduli: Vec<f64>,
    /// `modulus / δ` (0 for `δ = 0`).
    pub constants: Vec<f64>,
    pub certified: bool,
    pub aliased: bool,
    /// Moduli strictly decrease along decreasing `δ`.
    pub monotone: bool,
    /// Relative change of `modulus / δ` across the two smallest positive `δ`.
    #[serde(serialize_with = "real")]
    pub c_stability: f64,
}

/// Moduli of continuity of `ξ ↦ e^{iuξ} - 1` at `xi0`.
pub fn exp_map_continuity(
    u: &SampledFunction,
    u_id: &str,
    settings: &LabSettings,
    p: f64,
    q: f64,
    xi0: f64,
    deltas: &[f64],
) -> Result<ContinuityReport> {
    require_real(u)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (1, inf)")));
    }
    let grad = spectral_gradient_max(u)?;
    let dx = u.grid().dx();
    let base = exp_map(u, xi0);
    let out: Vec<(f64, bool, bool)> = deltas
        .par_iter()
        .map(|&d| {
            if d == 0.0 {
                return Ok((0.0, true, false));
            }
            let aliased = (xi0 + d).abs() * grad * dx > ALIASING_LIMIT;
            let diff = exp_map(u, xi0 + d).add(&base.scale(Complex64::new(-1.0, 0.0)))?;
            let r = settings.norm(&diff, p, q)?;
            Ok((r.value, r.certified, aliased))
        })
        .collect::<Result<_>>()?;
    let moduli: Vec<f64> = out.iter().map(|o| o.0).collect();
    let constants: Vec<f64> = deltas.iter().zip(&moduli).map(|(d, m)| if *d == 0.0 { 0.0 } else { m / d }).collect();
    let mut order: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i] > 0.0).collect();
    order.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]));
    let monotone = order.windows(2).all(|w| moduli[w[1]] < moduli[w[0]]);
    let c_stability = if order.len() >= 2 {
        let a = constants[order[order.len() - 2]];
        let b = constants[order[order.len() - 1]];
        (a - b).abs() / a.abs().max(b.abs())
    } else {
        f64::NAN
    };
    Ok(ContinuityReport {
        u_id: u_id.to_string(),
        xi0,
        deltas: deltas.to_vec(),
        moduli,
        constants,
        certified: out.iter().all(|o| o.1),
        aliased: out.iter().any(|o| o.2),
        monotone,
        c_stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FunctionSpec;
    use crate::decomposition::Grid;
    use crate::weight::WeightFunction;

    #[test]
    fn exp_map_is_accurate_for_small_arguments() {
        let grid = Grid::new(1, 16.0, 64).unwrap();
        let u = SampledFunction::from_real_fn(grid, |x| 1e-9 * (-x[0] * x[0]).exp());
        let v = exp_map(&u, 1.0);
        let i = 30;
        let a = 1e-9 * (-grid.coordinate(i).powi(2)).exp();
        assert!((v.values()[i].im - a).abs() < 1e-24);
        assert!((v.values()[i].re + a * a / 2.0).abs() < 1e-30);
    }

    #[test]
    fn zero_lambda_has_zero_norm() {
        let grid = Grid::new(1, 16.0, 1024).unwrap();
        let u = FunctionSpec::gaussian(1.0).sample(&grid).unwrap();
        let s = LabSettings::new(WeightFunction::gevrey(2.0).unwrap(), 40);
        let opts = SuperpositionOptions {
            lambdas: vec![0.0, 0.01, 0.1],
            ..Default::default()
        };
        let r = superposition_growth(&u, "gaussian:sigma=1", &s, &opts).unwrap();
        assert_eq!(r.norms[0], 0.0);
        assert!(r.small_branch_spread < 0.1);
        let complex = u.map(|z| z * Complex64::new(0.0, 1.0));
        assert!(superposition_growth(&complex, "x", &s, &opts).is_err());
    }
}

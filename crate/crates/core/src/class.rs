//! Membership tests for the weight class: conditions A1–A6, the thresholds
//! `x0`, `x1`, `tau`, `x_tilde`, the subadditivity constant `s` and the doubling
//! constant `D`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::WeightFunction;

/// Probe layout: uniform on `[0, 1]`, log-spaced on `[1, x_max]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec1D {
    pub x_max: f64,
    pub linear_points: usize,
    pub per_decade: usize,
}

impl Default for GridSpec1D {
    fn default() -> Self {
        Self {
            x_max: 1e6,
            linear_points: 100,
            per_decade: 40,
        }
    }
}

impl GridSpec1D {
    pub fn up_to(x_max: f64) -> Self {
        Self {
            x_max,
            ..Self::default()
        }
    }

    /// Sorted probe points, starting at 0 and ending at `x_max`.
    pub fn probes(&self) -> Vec<f64> {
        let n = self.linear_points.max(1);
        let top = self.x_max.min(1.0);
        let mut out: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
        if self.x_max > 1.0 {
            let per = self.per_decade.max(1) as f64;
            let mut k = 1;
            loop {
                let x = 10f64.powf(k as f64 / per);
                if x >= self.x_max * (1.0 - 1e-12) {
                    break;
                }
                out.push(x);
                k += 1;
            }
            out.push(self.x_max);
        }
        out
    }
}

/// Outcome of one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: f64, detail: String },
    Inconclusive { probe: f64, detail: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    fn rank(&self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Inconclusive { .. } => 1,
            Verdict::Fail { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subclass {
    /// Slowly varying (index 0).
    W0,
    /// Regularly varying with index in (0, 1).
    W1,
}

/// Index estimates above this value are labelled `W1`.
pub const SUBCLASS_THRESHOLD: f64 = 0.05;
/// Margin by which `x w'/w` has to stay below 1.
pub const X0_MARGIN: f64 = 0.01;
/// The adjustable constant `B` in `x_tilde`.
pub const B_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndexEstimate {
    pub alpha: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub tau: f64,
    pub x0: f64,
    pub x1: f64,
    pub b: f64,
    pub x_tilde: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub weight: String,
    pub verdicts: BTreeMap<String, Verdict>,
    pub alpha_estimate: f64,
    pub alpha_uncertainty: f64,
    pub tau: Option<f64>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub x_tilde: Option<f64>,
    pub subclass: Subclass,
    pub t_max: f64,
    pub probe_count: usize,
    pub note: String,
}

impl ClassReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(Verdict::is_pass)
    }
}

/// `x w'(x)/w(x)` at `x > 0`.
fn log_slope(w: &WeightFunction, x: f64) -> f64 {
    x * w.derivative_unchecked(x, 1) / w.value(x)
}

/// Extrapolates `x w'/w` to `x = ∞` in the variable `u = 1/ln x` from probes at
/// `t_max/100`, `t_max/10` and `t_max`.
pub fn estimate_index(w: &WeightFunction, t_max: f64) -> Result<IndexEstimate> {
    if !(t_max >= 1e3) || !t_max.is_finite() {
        return Err(Error::InvalidParameter(format!("estimate_index needs t_max >= 1e3, got {t_max}")));
    }
    let xs = [t_max / 100.0, t_max / 10.0, t_max];
    let u: Vec<f64> = xs.iter().map(|x| 1.0 / x.ln()).collect();
    let r: Vec<f64> = xs.iter().map(|&x| log_slope(w, x)).collect();
    // Lagrange interpolation evaluated at u = 0.
    let mut quad = 0.0;
    for i in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                l *= (0.0 - u[j]) / (u[i] - u[j]);
            }
        }
        quad += l * r[i];
    }
    let lin = r[2] + (r[2] - r[1]) * (0.0 - u[2]) / (u[2] - u[1]);
    Ok(IndexEstimate {
        alpha: quad,
        uncertainty: (quad - lin).abs(),
    })
}

struct SecondDerivativeTail {
    tau: Option<f64>,
    last_change: Option<f64>,
}

fn second_derivative_tail(w: &WeightFunction, probes: &[f64]) -> SecondDerivativeTail {
    let pts: Vec<(f64, bool)> = probes
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| (x, w.derivative_unchecked(x, 2) < 0.0))
        .collect();
    let mut last_change = None;
    for i in 1..pts.len() {
        if pts[i].1 != pts[i - 1].1 {
            last_change = Some(i);
        }
    }
    let negative_at_end = pts.last().map(|p| p.1).unwrap_or(false);
    let tau = if !negative_at_end {
        None
    } else {
        Some(last_change.map(|i| pts[i].0).unwrap_or(0.0))
    };
    SecondDerivativeTail {
        tau,
        last_change: last_change.map(|i| pts[i].0),
    }
}

/// Computes `tau`, `x0`, `x1` and `x_tilde` on the default probe grid.
pub fn compute_x_tilde(w: &WeightFunction) -> Result<Thresholds> {
    compute_x_tilde_on(w, &GridSpec1D::default())
}

pub fn compute_x_tilde_on(w: &WeightFunction, grid: &GridSpec1D) -> Result<Thresholds> {
    let probes = grid.probes();
    let pos: Vec<f64> = probes.iter().copied().filter(|&x| x > 0.0).collect();
    let ratios: Vec<f64> = pos.iter().map(|&x| log_slope(w, x).abs()).collect();
    let limit = 1.0 - X0_MARGIN;
    let mut start = pos.len();
    while start > 0 && ratios[start - 1] < limit {
        start -= 1;
    }
    if start == pos.len() {
        return Err(Error::NoThreshold(grid.x_max));
    }
    let x0 = pos[start];

    let p: Vec<f64> = probes.iter().map(|&x| x / w.value(x)).collect();
    let mut mono = p.len() - 1;
    while mono > 0 && p[mono - 1] <= p[mono] {
        mono -= 1;
    }
    let i0 = probes.iter().position(|&x| x >= x0).unwrap_or(0).max(mono);
    let mut prefix_max = f64::NEG_INFINITY;
    let mut x1 = None;
    for (i, &pi) in p.iter().enumerate() {
        if i >= i0 && pi >= prefix_max {
            x1 = Some(probes[i]);
            break;
        }
        prefix_max = prefix_max.max(pi);
    }
    let x1 = x1.ok_or(Error::NoThreshold(grid.x_max))?;

    let tail = second_derivative_tail(w, &probes);
    let tau = tail.tau.ok_or_else(|| {
        Error::Domain(format!("w'' is not negative at the last probe {}", grid.x_max))
    })?;
    let x_tilde = tau.max(2.0 * x0).max(2.0 * x1).max(B_CONSTANT);
    Ok(Thresholds {
        tau,
        x0,
        x1,
        b: B_CONSTANT,
        x_tilde,
    })
}

/// Largest `y` (up to `1e60`) where `W(y) = w(e^y)` and `dW/dy` are finite.
fn log_domain_limit(w: &WeightFunction) -> f64 {
    let mut y = 1e60;
    while y > 1.0 {
        let (v, d) = w.log_domain(y);
        if v.is_finite() && d.is_finite() && (v * 1.0001).is_finite() {
            return y;
        }
        y /= 1.5;
    }
    y
}

fn check_a4(w: &WeightFunction) -> Verdict {
    let y_end = log_domain_limit(w);
    if y_end < 100.0 {
        return Verdict::Inconclusive {
            probe: y_end,
            detail: format!("log-domain evaluation only finite up to ln t = {y_end:.3}"),
        };
    }
    let count = 400;
    let ys: Vec<f64> = (0..=count)
        .map(|i| (y_end.ln() * i as f64 / count as f64).exp())
        .filter(|&y| y >= y_end / 10.0)
        .collect();
    let vals: Vec<(f64, f64)> = ys.iter().map(|&y| w.log_domain(y)).collect();
    let mut worst = Verdict::Pass;
    for m in [1.0, 10.0, 100.0] {
        let d: Vec<f64> = ys.iter().zip(&vals).map(|(&y, &(v, _))| v - m * y).collect();
        let increasing = d.windows(2).all(|p| p[1] > p[0]);
        let verdict = if increasing && d[d.len() - 1] > 0.0 {
            Verdict::Pass
        } else {
            let slopes: Vec<f64> = vals.iter().map(|&(_, dv)| dv - m).collect();
            if slopes.windows(2).all(|p| p[1] >= p[0]) && slopes[slopes.len() - 1] > slopes[0] {
                Verdict::Inconclusive {
                    probe: y_end,
                    detail: format!("w(t) - {m} ln t not yet increasing up to ln t = {y_end:.3e}, slope rising"),
                }
            } else {
                Verdict::Fail {
                    witness: y_end,
                    detail: format!("w(t) - {m} ln t does not grow over the last decade of ln t (witness is ln t)"),
                }
            }
        };
        if verdict.rank() > worst.rank() {
            worst = verdict;
        }
    }
    worst
}

/// Runs A1–A6 and the threshold computation.
pub fn check_conditions(w: &WeightFunction, grid: &GridSpec1D) -> Result<ClassReport> {
    if !(grid.x_max >= 1e4) {
        return Err(Error::InvalidParameter(format!("probe grid must reach at least 1e4, got {}", grid.x_max)));
    }
    let probes = grid.probes();
    let values: Vec<f64> = probes.iter().map(|&x| w.value(x)).collect();
    let mut verdicts = BTreeMap::new();

    let est = estimate_index(w, grid.x_max)?;
    let a1 = if est.alpha >= 1.0 - X0_MARGIN || est.alpha < -X0_MARGIN {
        Verdict::Fail {
            witness: grid.x_max,
            detail: format!("index estimate {:.4} outside [0, 1)", est.alpha),
        }
    } else if est.uncertainty > 0.05 {
        Verdict::Inconclusive {
            probe: grid.x_max,
            detail: format!("index estimate {:.4} with spread {:.4}", est.alpha, est.uncertainty),
        }
    } else {
        Verdict::Pass
    };
    verdicts.insert("A1".to_string(), a1);

    let (imin, vmin) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    verdicts.insert(
        "A2".to_string(),
        if vmin >= 1.0 {
            Verdict::Pass
        } else {
            Verdict::Fail {
                witness: probes[imin],
                detail: format!("w = {vmin} < 1"),
            }
        },
    );

    let a3 = match values.windows(2).position(|p| !(p[1] > p[0])) {
        None => Verdict::Pass,
        Some(i) => Verdict::Fail {
            witness: probes[i + 1],
            detail: format!("w({}) = {} does not exceed w({}) = {}", probes[i + 1], values[i + 1], probes[i], values[i]),
        },
    };
    verdicts.insert("A3".to_string(), a3);
    verdicts.insert("A4".to_string(), check_a4(w));

    let hs: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let d: Vec<f64> = hs.iter().map(|&h| w.derivative_unchecked(h, 1).abs()).collect();
    let a5 = match d.windows(2).position(|p| p[1] > p[0] * (1.0 + 1e-12)) {
        Some(i) => Verdict::Fail {
            witness: hs[i + 1],
            detail: format!("|w'| grows towards 0: {} -> {}", d[i], d[i + 1]),
        },
        None if d[d.len() - 1] < 1e-6 => Verdict::Pass,
        None => Verdict::Fail {
            witness: hs[hs.len() - 1],
            detail: format!("|w'(1e-8)| = {} is not small", d[d.len() - 1]),
        },
    };
    verdicts.insert("A5".to_string(), a5);

    let tail = second_derivative_tail(w, &probes);
    let a6 = match (tail.tau, tail.last_change) {
        (None, _) => Verdict::Fail {
            witness: grid.x_max,
            detail: "w'' is nonnegative at the last probe".into(),
        },
        (Some(_), Some(c)) if c > grid.x_max / 10.0 => Verdict::Inconclusive {
            probe: c,
            detail: "last sign change of w'' lies in the final decade of probes".into(),
        },
        _ => Verdict::Pass,
    };
    verdicts.insert("A6".to_string(), a6);

    let th = compute_x_tilde_on(w, grid).ok();
    Ok(ClassReport {
        weight: w.label().to_string(),
        verdicts,
        alpha_estimate: est.alpha,
        alpha_uncertainty: est.uncertainty,
        tau: tail.tau,
        x0: th.map(|t| t.x0),
        x1: th.map(|t| t.x1),
        x_tilde: th.map(|t| t.x_tilde),
        subclass: if est.alpha > SUBCLASS_THRESHOLD { Subclass::W1 } else { Subclass::W0 },
        t_max: grid.x_max,
        probe_count: probes.len(),
        note: format!(
            "verdicts rest on {} probes in [0, {:e}]; behaviour beyond the last probe is not verified",
            probes.len(),
            grid.x_max
        ),
    })
}

/// Absolute tolerance for ties in the subadditivity inequality.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Resolution of the returned constant `s`.
pub const S_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityCertificate {
    pub weight: String,
    pub s: f64,
    pub x_tilde: f64,
    pub domain_bound: f64,
    pub grid_step: f64,
    pub worst_margin: f64,
    pub points_checked: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityFailure {
    pub weight: String,
    pub x: f64,
    pub y: f64,
    /// Largest `s` the worst point admits (nonpositive means none).
    pub s_bound: f64,
    pub x_tilde: f64,
    pub domain_bound: f64,
    pub grid_step: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SubadditivitySearch {
    Certified(SubadditivityCertificate),
    Failed(SubadditivityFailure),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityCheck {
    pub s: f64,
    pub domain_bound: f64,
    pub grid_step: f64,
    pub points_checked: usize,
    pub total_violations: usize,
    /// The worst violations, most negative margin first (at most 256).
    pub violations: Vec<Violation>,
}

impl SubadditivityCheck {
    pub fn is_clean(&self) -> bool {
        self.total_violations == 0
    }
}

#[inline]
fn excluded(x: f64, y: f64, x_tilde: f64) -> bool {
    y <= x && x < 2.0 * x_tilde
}

/// Points on the dense boundary curves `x = 2 x_tilde`, `x = y`, `y = x/2`, `y = 0`.
fn boundary_points(x_tilde: f64, bound: f64, step: f64) -> Vec<(f64, f64)> {
    let n = (bound / step).round() as usize;
    let mut pts = Vec::with_capacity(4 * (n + 1));
    for i in 0..=n {
        let t = (i as f64 * step).min(bound);
        if 2.0 * x_tilde <= bound {
            pts.push((2.0 * x_tilde, t));
        }
        pts.push((t, t));
        if t >= 2.0 * x_tilde {
            pts.push((t, t / 2.0));
        }
        pts.push((t, 0.0));
    }
    pts
}

/// Visits every admissible point of the grid `h Z² ∩ [0, X]²` and the boundary
/// curves, reporting `(x, y, w(x), w(y), w(|x-y|))`.
fn for_each_point<T: Send, F>(w: &WeightFunction, x_tilde: f64, bound: f64, h: f64, f: F) -> Vec<T>
where
    F: Fn(f64, f64, f64, f64, f64) -> Option<T> + Sync + Send,
{
    let n = (bound / h).round() as usize;
    let table: Vec<f64> = (0..=n).map(|i| w.value(i as f64 * h)).collect();
    let mut out: Vec<T> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = i as f64 * h;
            let table = &table;
            let f = &f;
            (0..=n).filter_map(move |j| {
                let y = j as f64 * h;
                if excluded(x, y, x_tilde) {
                    return None;
                }
                f(x, y, table[i], table[j], table[i.abs_diff(j)])
            })
        })
        .collect();
    let extra: Vec<T> = boundary_points(x_tilde, bound, h / 4.0)
        .into_par_iter()
        .filter_map(|(x, y)| {
            if excluded(x, y, x_tilde) {
                return None;
            }
            f(x, y, w.value(x), w.value(y), w.value((x - y).abs()))
        })
        .collect();
    out.extend(extra);
    out
}

fn point_count(x_tilde: f64, bound: f64, h: f64) -> usize {
    let n = (bound / h).round() as usize;
    let mut c = 0;
    for i in 0..=n {
        let x = i as f64 * h;
        if x < 2.0 * x_tilde {
            c += (0..=n).filter(|&j| !excluded(x, j as f64 * h, x_tilde)).count();
        } else {
            c += n + 1;
        }
    }
    c + boundary_points(x_tilde, bound, h / 4.0)
        .iter()
        .filter(|(x, y)| !excluded(*x, *y, x_tilde))
        .count()
}

/// Largest `s` on the `1e-3` grid such that
/// `w(x) <= w(y) + w(x-y) - s min(w(y), w(x-y))` on `[0, X]²` minus `{y <= x < 2 x_tilde}`.
pub fn find_subadditivity_s(w: &WeightFunction, x_tilde: f64, bound: f64, h: f64) -> Result<SubadditivitySearch> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidParameter(format!("grid step h = {h} must lie in (0, 0.5]")));
    }
    if !(x_tilde >= 0.0) || !(bound >= 4.0 * x_tilde) || !bound.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "domain bound X = {bound} must be at least 4 x_tilde = {}",
            4.0 * x_tilde
        )));
    }
    // Per-point upper bound on s, with the point that realises it.
    let bounds = for_each_point(w, x_tilde, bound, h, |x, y, wx, wy, wxy| {
        let m = wy.min(wxy);
        let slack = wy + wxy - wx + TIE_TOLERANCE;
        if m > 0.0 {
            Some((slack / m, x, y))
        } else if slack < 0.0 {
            Some((f64::NEG_INFINITY, x, y))
        } else {
            None
        }
    });
    let (s_max, wx, wy) = bounds
        .iter()
        .fold((f64::INFINITY, 0.0, 0.0), |acc, &(b, x, y)| if b < acc.0 { (b, x, y) } else { acc });
    let s = (s_max.min(1.0) / S_RESOLUTION).floor() * S_RESOLUTION;
    if !(s >= S_RESOLUTION) {
        return Ok(SubadditivitySearch::Failed(SubadditivityFailure {
            weight: w.label().to_string(),
            x: wx,
            y: wy,
            s_bound: s_max,
            x_tilde,
            domain_bound: bound,
            grid_step: h,
        }));
    }
    let margins = for_each_point(w, x_tilde, bound, h, |_, _, wx, wy, wxy| {
        Some(wy + wxy - s * wy.min(wxy) - wx)
    });
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SubadditivitySearch::Certified(SubadditivityCertificate {
        weight: w.label().to_string(),
        s,
        x_tilde,
        domain_bound: bound,
        grid_step: h,
        worst_margin,
        points_checked: margins.len(),
    }))
}

/// Re-checks a certificate on `[0, X2]²` at half the certificate's step.
pub fn verify_subadditivity(
    w: &WeightFunction,
    cert: &SubadditivityCertificate,
    bound: f64,
) -> Result<SubadditivityCheck> {
    if !(bound >= cert.domain_bound) || !bound.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "verification bound {bound} is below the certificate's {}",
            cert.domain_bound
        )));
    }
    let h = cert.grid_step / 2.0;
    let s = cert.s;
    let mut violations = for_each_point(w, cert.x_tilde, bound, h, |x, y, wx, wy, wxy| {
        let margin = wy + wxy - s * wy.min(wxy) - wx;
        (margin < -TIE_TOLERANCE).then_some(Violation { x, y, margin })
    });
    let total = violations.len();
    violations.sort_by(|a, b| a.margin.total_cmp(&b.margin).then(a.x.total_cmp(&b.x)).then(a.y.total_cmp(&b.y)));
    violations.truncate(256);
    Ok(SubadditivityCheck {
        s,
        domain_bound: bound,
        grid_step: h,
        points_checked: point_count(cert.x_tilde, bound, h),
        total_violations: total,
        violations,
    })
}

fn doubling_holds(w: &WeightFunction, probes: &[f64], values: &[f64], d: f64) -> bool {
    probes
        .iter()
        .zip(values)
        .all(|(&t, &wt)| 2.0 * wt <= w.value(d * t) + d + TIE_TOLERANCE)
}

/// Smallest `D` with `2 w(t) <= w(D t) + D` on all probes of `[0, t_max]`:
/// first over powers of two up to `2^20`, then bisected to `1e-2`.
pub fn find_doubling_d(w: &WeightFunction, t_max: f64) -> Option<f64> {
    let probes = GridSpec1D::up_to(t_max).probes();
    let values: Vec<f64> = probes.iter().map(|&t| w.value(t)).collect();
    let k = (0..=20).find(|&k| doubling_holds(w, &probes, &values, 2f64.powi(k)))?;
    if k == 0 {
        return Some(1.0);
    }
    let (mut lo, mut hi) = (2f64.powi(k - 1), 2f64.powi(k));
    while hi - lo > 1e-2 {
        let mid = 0.5 * (lo + hi);
        if doubling_holds(w, &probes, &values, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingTrend {
    pub t_max: Vec<f64>,
    pub d: Vec<Option<f64>>,
    /// Relative growth of `D` per decade of `t_max` between consecutive entries.
    pub growth_per_decade: Vec<f64>,
    /// True when the last relative growth is below 5%.
    pub stabilizes: bool,
}

pub fn doubling_trend(w: &WeightFunction, t_maxes: &[f64]) -> DoublingTrend {
    let d: Vec<Option<f64>> = t_maxes.iter().map(|&t| find_doubling_d(w, t)).collect();
    let mut growth = Vec::new();
    for i in 1..t_maxes.len() {
        let decades = (t_maxes[i] / t_maxes[i - 1]).log10();
        let g = match (d[i - 1], d[i]) {
            (Some(a), Some(b)) => (b / a).powf(1.0 / decades) - 1.0,
            _ => f64::INFINITY,
        };
        growth.push(g);
    }
    let stabilizes = d.iter().all(Option::is_some) && growth.last().is_some_and(|&g| g < 0.05);
    DoublingTrend {
        t_max: t_maxes.to_vec(),
        d,
        growth_per_decade: growth,
        stabilizes,
    }
}

/// Shell increments `Σ_{|m|_∞ = j} exp(-s q' w(|m|))`, `j = 0..=k`, for `n ∈ {1, 2}`.
pub fn series_shell_increments(w: &WeightFunction, s: f64, q_prime: f64, n: usize, k: usize) -> Result<Vec<f64>> {
    let term = |r: f64| (-s * q_prime * w.value(r)).exp();
    match n {
        1 => Ok((0..=k)
            .map(|j| if j == 0 { term(0.0) } else { 2.0 * term(j as f64) })
            .collect()),
        2 => Ok((0..=k as i64)
            .map(|j| {
                if j == 0 {
                    return term(0.0);
                }
                let mut acc = 0.0;
                for a in -j..=j {
                    for b in -j..=j {
                        if a.abs().max(b.abs()) == j {
                            acc += term(((a * a + b * b) as f64).sqrt());
                        }
                    }
                }
                acc
            })
            .collect()),
        _ => Err(Error::InvalidParameter(format!("dimension {n} not supported"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probes_cover_range() {
        let p = GridSpec1D::default().probes();
        assert_eq!(p[0], 0.0);
        assert_eq!(*p.last().unwrap(), 1e6);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn gevrey_tau_is_sqrt2() {
        let w = WeightFunction::gevrey(2.0).unwrap();
        let th = compute_x_tilde(&w).unwrap();
        assert!(th.tau >= 2f64.sqrt() && th.tau <= 2f64.sqrt() * 10f64.powf(1.0 / 40.0), "{}", th.tau);
        assert!(th.x_tilde >= th.tau && th.x_tilde >= 2.0 * th.x0 && th.x_tilde >= 2.0 * th.x1);
    }

    #[test]
    fn exact_sqrt_index_is_half() {
        let w = WeightFunction::power(0.5).unwrap();
        let e = estimate_index(&w, 1e6).unwrap();
        assert!((e.alpha - 0.5).abs() < 1e-12);
        let th = compute_x_tilde(&w).unwrap();
        assert_eq!(th.x0, 0.01);
    }

    #[test]
    fn linear_has_no_s() {
        let w = WeightFunction::power(1.0).unwrap();
        match find_subadditivity_s(&w, 1.0, 40.0, 0.25).unwrap() {
            SubadditivitySearch::Failed(f) => assert!(f.s_bound < S_RESOLUTION),
            SubadditivitySearch::Certified(c) => panic!("linear weight certified s = {}", c.s),
        }
    }

    #[test]
    fn sqrt_doubling_at_most_four() {
        let w = WeightFunction::power(0.5).unwrap();
        let d = find_doubling_d(&w, 1e4).unwrap();
        assert!(d <= 4.0, "{d}");
    }
}

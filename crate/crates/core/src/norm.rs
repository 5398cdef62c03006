//! Weighted modulation norms
//! `‖f‖ = ( Σ_k e^{q w(|k|)} ‖□_k f‖_p^q )^{1/q}`, truncated to `|k|_∞ <= k_max`
//! with an extrapolated tail, plus embedding and derivative-growth checks.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::{forward_transform, inverse_transform, BoxDecomposer, Domain, Partition, SampledFunction};
use crate::error::{Error, Result};
use crate::report::real;
use crate::sequence::WeightSequence;
use crate::weight::WeightFunction;

/// Spectral entries below this fraction of the peak are treated as round-off.
pub const DEFAULT_SPECTRAL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct NormParams {
    pub p: f64,
    pub q: f64,
    pub weight: WeightFunction,
    pub k_max: usize,
    pub tail_tol: f64,
    pub partition: Partition,
    pub spectral_floor: f64,
}

impl NormParams {
    pub fn new(weight: WeightFunction, p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            weight,
            k_max: 48,
            tail_tol: 1e-8,
            partition: Partition::default(),
            spectral_floor: DEFAULT_SPECTRAL_FLOOR,
        }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = partition;
        self
    }

    pub fn with_exponents(mut self, p: f64, q: f64) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(v >= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 1")));
            }
        }
        if !(self.tail_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tail_tol = {}", self.tail_tol)));
        }
        Ok(())
    }
}

/// `(Σ |f(x_j)|^p dx^n)^{1/p}`, or `max |f|` for `p = ∞`.
pub fn lp_norm(f: &SampledFunction, p: f64) -> f64 {
    let m = f.sup_norm();
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    let cell = f.grid().dx().powi(f.grid().dim() as i32);
    let s: f64 = f.values().iter().map(|z| (z.norm() / m).powf(p)).sum();
    m * (s * cell).powf(1.0 / p)
}

/// `ℓ^q` aggregate of `exp(log_terms)`, computed without overflow.
pub fn aggregate_log(log_terms: &[f64], q: f64) -> f64 {
    let top = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    if q.is_infinite() {
        return top.exp();
    }
    let s: f64 = log_terms.iter().map(|&l| (q * (l - top)).exp()).sum();
    (top + s.ln() / q).exp()
}

/// Per-box `L^p` norms of one function, reusable across `q` and weights.
#[derive(Debug, Clone)]
pub struct PieceNorms {
    pub p: f64,
    pub k_max: usize,
    /// Box indices in lexicographic order.
    pub ks: Vec<Vec<i64>>,
    /// `ln ‖□_k f‖_p` (`-inf` for vanishing pieces).
    pub log_norms: Vec<f64>,
    /// Sum of the moduli dropped by the spectral floor, per box (`‖·‖_2` on `Q_k`).
    dropped: HashMap<Vec<i64>, f64>,
    floor_constant: f64,
    pub decay_warning: bool,
}

fn box_indices(n: usize, k_max: usize) -> Vec<Vec<i64>> {
    let k = k_max as i64;
    if n == 1 {
        (-k..=k).map(|a| vec![a]).collect()
    } else {
        (-k..=k).flat_map(|a| (-k..=k).map(move |b| vec![a, b])).collect()
    }
}

fn chebyshev(k: &[i64]) -> usize {
    k.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
}

fn euclid(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt()
}

impl PieceNorms {
    pub fn compute(f: &SampledFunction, p: f64, k_max: usize, partition: Partition, floor: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
        }
        let grid = *f.grid();
        let limit = grid.max_frequency();
        if k_max as f64 + 1.0 > limit {
            return Err(Error::GridOverflow {
                requested: k_max as f64 + 1.0,
                limit,
            });
        }
        let decay_warning = match f.domain() {
            Domain::Space => !f.boundary_decay_ok(),
            Domain::Frequency => f.decay_warning(),
        };
        let spectrum = match f.domain() {
            Domain::Space => forward_transform(f)?,
            Domain::Frequency => f.clone(),
        };
        let threshold = floor * spectrum.sup_norm();
        let mut dropped: HashMap<Vec<i64>, f64> = HashMap::new();
        let dxi = grid.dxi();
        let cell = dxi.powi(grid.dim() as i32);
        let cleaned: Vec<Complex64> = spectrum
            .values()
            .iter()
            .enumerate()
            .map(|(flat, &z)| {
                if z.norm() >= threshold || z.norm() == 0.0 {
                    return z;
                }
                let idx = grid.unflatten(flat);
                let xi: Vec<f64> = idx[..grid.dim()].iter().map(|&i| grid.frequency(i)).collect();
                // Every box Q_k containing xi: k_i ∈ {floor, ceil} of xi_i.
                let choices: Vec<Vec<i64>> = xi
                    .iter()
                    .map(|&t| {
                        let (a, b) = (t.floor() as i64, t.ceil() as i64);
                        if a == b { vec![a] } else { vec![a, b] }
                    })
                    .collect();
                let mut keys: Vec<Vec<i64>> = vec![Vec::new()];
                for c in &choices {
                    keys = keys
                        .into_iter()
                        .flat_map(|k| c.iter().map(move |&v| {
                            let mut k2 = k.clone();
                            k2.push(v);
                            k2
                        }))
                        .collect();
                }
                for key in keys {
                    *dropped.entry(key).or_insert(0.0) += z.norm_sqr() * cell;
                }
                Complex64::new(0.0, 0.0)
            })
            .collect();
        let cleaned = SampledFunction::from_values(grid, cleaned, Domain::Frequency)?;
        let dec = BoxDecomposer::from_spectrum(cleaned, partition)?;
        let ks = box_indices(grid.dim(), k_max);
        let log_norms: Vec<f64> = ks
            .par_iter()
            .map(|k| -> Result<f64> {
                let v = if p == 2.0 {
                    let mut s = 0.0;
                    dec.for_each_piece_entry(k, |_, z| s += z.norm_sqr())?;
                    (s * cell).sqrt()
                } else {
                    let mut has = false;
                    dec.for_each_piece_entry(k, |_, z| has |= z.norm() > 0.0)?;
                    if has { lp_norm(&dec.piece(k)?, p) } else { 0.0 }
                };
                Ok(v.ln())
            })
            .collect::<Result<Vec<f64>>>()?;
        let floor_constant = if p < 2.0 {
            (2.0 * grid.half_width()).powf(grid.dim() as f64 * (1.0 / p - 0.5))
        } else {
            1.0
        };
        Ok(Self {
            p,
            k_max,
            ks,
            log_norms,
            dropped: dropped.into_iter().map(|(k, e)| (k, e.sqrt())).collect(),
            floor_constant,
            decay_warning,
        })
    }

    /// `ln(e^{w(|k|)} ‖□_k f‖_p)` in box order.
    pub fn log_contributions(&self, w: &WeightFunction) -> Vec<f64> {
        self.ks
            .iter()
            .zip(&self.log_norms)
            .map(|(k, &l)| if l == f64::NEG_INFINITY { l } else { w.value(euclid(k)) + l })
            .collect()
    }

    /// Weighted norm of everything the spectral floor removed, summed over boxes.
    pub fn floor_bound(&self, w: &WeightFunction) -> f64 {
        let mut keys: Vec<&Vec<i64>> = self.dropped.keys().collect();
        keys.sort();
        keys.into_iter()
            .map(|k| (w.value(euclid(k))).exp() * self.floor_constant * self.dropped[k])
            .sum()
    }

    /// Assembles a [`NormResult`] for the given weight, `q` and tolerance.
    pub fn result(&self, w: &WeightFunction, q: f64, tail_tol: f64) -> NormResult {
        let logc = self.log_contributions(w);
        let value = aggregate_log(&logc, q);
        let kk = self.k_max;
        let shell = |j: usize| -> f64 {
            let terms: Vec<f64> = self
                .ks
                .iter()
                .zip(&logc)
                .filter(|(k, _)| chebyshev(k) == j)
                .map(|(_, &l)| l)
                .collect();
            aggregate_log(&terms, q)
        };
        let shells: Vec<f64> = (kk.saturating_sub(2)..=kk).map(shell).collect();
        let tail_estimate = geometric_tail(&shells, q);
        let contributions = self
            .ks
            .iter()
            .zip(&logc)
            .map(|(k, &l)| (k.clone(), l.exp()))
            .collect();
        NormResult {
            value,
            p: self.p,
            q,
            weight_spec: w.label().to_string(),
            k_max: self.k_max,
            tail_estimate,
            certified: tail_estimate <= tail_tol && !self.decay_warning,
            tail_tol,
            last_shells: shells,
            floor_bound: self.floor_bound(w),
            decay_warning: self.decay_warning,
            contributions,
        }
    }
}

/// Extrapolates the remaining shells from the last three shell aggregates.
pub fn geometric_tail(shells: &[f64], q: f64) -> f64 {
    let n = shells.len();
    let last = shells[n - 1];
    if last == 0.0 {
        return 0.0;
    }
    if n < 3 {
        return f64::INFINITY;
    }
    let r1 = if shells[n - 3] > 0.0 { shells[n - 2] / shells[n - 3] } else { f64::INFINITY };
    let r2 = if shells[n - 2] > 0.0 { last / shells[n - 2] } else { f64::INFINITY };
    let r = r1.max(r2);
    if !(r < 1.0) {
        return f64::INFINITY;
    }
    if q.is_infinite() {
        last * r
    } else {
        last * r / (1.0 - r.powf(q)).powf(1.0 / q)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormResult {
    pub value: f64,
    #[serde(serialize_with = "real")]
    pub p: f64,
    #[serde(serialize_with = "real")]
    pub q: f64,
    pub weight_spec: String,
    pub k_max: usize,
    #[serde(serialize_with = "real")]
    pub tail_estimate: f64,
    pub certified: bool,
    pub tail_tol: f64,
    /// Shell aggregates for `|k|_∞ = k_max-2, k_max-1, k_max`.
    pub last_shells: Vec<f64>,
    /// Weighted size of the spectral entries removed as round-off (diagnostic).
    pub floor_bound: f64,
    pub decay_warning: bool,
    pub contributions: Vec<(Vec<i64>, f64)>,
}

impl NormResult {
    /// Recomputes the `ℓ^q` aggregate from the stored contributions.
    pub fn recompute(&self) -> f64 {
        let logs: Vec<f64> = self.contributions.iter().map(|(_, c)| c.ln()).collect();
        aggregate_log(&logs, self.q)
    }
}

/// Computes the truncated modulation norm and its tail certificate.
pub fn modulation_norm(f: &SampledFunction, params: &NormParams) -> Result<NormResult> {
    params.validate()?;
    let pieces = PieceNorms::compute(f, params.p, params.k_max, params.partition, params.spectral_floor)?;
    Ok(pieces.result(&params.weight, params.q, params.tail_tol))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingRow {
    #[serde(serialize_with = "real")]
    pub p0: f64,
    #[serde(serialize_with = "real")]
    pub q0: f64,
    #[serde(serialize_with = "real")]
    pub p: f64,
    #[serde(serialize_with = "real")]
    pub q: f64,
    pub ratio: f64,
    pub certified: bool,
}

/// `‖f‖_{p,q} / ‖f‖_{p0,q0}` for each pair; `base` supplies `k_max`, tolerance and partition.
pub fn embedding_check(
    f: &SampledFunction,
    w: &WeightFunction,
    pairs: &[((f64, f64), (f64, f64))],
    base: &NormParams,
) -> Result<Vec<EmbeddingRow>> {
    let mut cache: Vec<(f64, PieceNorms)> = Vec::new();
    let mut get = |p: f64| -> Result<PieceNorms> {
        if let Some((_, pn)) = cache.iter().find(|(pp, _)| *pp == p) {
            return Ok(pn.clone());
        }
        let pn = PieceNorms::compute(f, p, base.k_max, base.partition, base.spectral_floor)?;
        cache.push((p, pn.clone()));
        Ok(pn)
    };
    let mut rows = Vec::new();
    for &((p0, q0), (p, q)) in pairs {
        if !(p0 <= p && q0 <= q && p0 >= 1.0 && q0 >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "embedding pair ({p0},{q0}) -> ({p},{q}) must have p0 <= p and q0 <= q"
            )));
        }
        let a = get(p0)?.result(w, q0, base.tail_tol);
        let b = get(p)?.result(w, q, base.tail_tol);
        let ratio = if a.value == 0.0 { 0.0 } else { b.value / a.value };
        rows.push(EmbeddingRow {
            p0,
            q0,
            p,
            q,
            ratio,
            certified: a.certified && b.certified,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeOrder {
    pub order: usize,
    pub sup_derivative: f64,
    pub log_m: f64,
    /// `(sup|D^α f| / M_{|α|})^{1/(|α|+1)}`.
    pub ratio: f64,
    /// Bound on the error amplified from the boundary layer.
    pub boundary_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeGrowth {
    pub c_star: f64,
    pub orders: Vec<DerivativeOrder>,
    pub warning: bool,
}

/// Spectral derivatives `D^α f` (symbol `ξ^α`) compared with the weight sequence.
pub fn derivative_growth_check(
    f: &SampledFunction,
    seq: &WeightSequence,
    a_max: usize,
) -> Result<DerivativeGrowth> {
    if a_max > 12 {
        return Err(Error::InvalidParameter(format!("a_max = {a_max} exceeds 12")));
    }
    if a_max > seq.p_max() {
        return Err(Error::InvalidParameter(format!(
            "sequence only reaches p = {}, need {a_max}",
            seq.p_max()
        )));
    }
    let grid = *f.grid();
    let spectrum = forward_transform(f)?;
    let threshold = DEFAULT_SPECTRAL_FLOOR * spectrum.sup_norm();
    let cleaned = spectrum.map(|z| if z.norm() < threshold { Complex64::new(0.0, 0.0) } else { z });
    let xi_ret = cleaned
        .values()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(flat, _)| {
            let idx = grid.unflatten(flat);
            idx[..grid.dim()].iter().map(|&i| grid.frequency(i).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let boundary = f.boundary_max();
    let mut orders = Vec::new();
    let mut warning = false;
    for a in 0..=a_max {
        let alphas: Vec<[usize; 2]> = if grid.dim() == 1 {
            vec![[a, 0]]
        } else {
            (0..=a).map(|i| [i, a - i]).collect()
        };
        let mut sup = 0.0_f64;
        for alpha in alphas {
            let mut d = cleaned.clone();
            let vals: Vec<Complex64> = d
                .values()
                .iter()
                .enumerate()
                .map(|(flat, &z)| {
                    let idx = grid.unflatten(flat);
                    let mut m = 1.0;
                    for axis in 0..grid.dim() {
                        m *= grid.frequency(idx[axis]).powi(alpha[axis] as i32);
                    }
                    z * m
                })
                .collect();
            d = SampledFunction::from_values(grid, vals, Domain::Frequency)?;
            sup = sup.max(inverse_transform(&d)?.sup_norm());
        }
        let log_m = seq.log_values[a];
        let ratio = if sup == 0.0 { 0.0 } else { ((sup.ln() - log_m) / (a as f64 + 1.0)).exp() };
        let boundary_error = boundary * xi_ret.max(1.0).powi(a as i32);
        warning |= boundary_error > 1e-8;
        orders.push(DerivativeOrder {
            order: a,
            sup_derivative: sup,
            log_m,
            ratio,
            boundary_error,
        });
    }
    let c_star = orders.iter().map(|o| o.ratio).fold(0.0, f64::max);
    Ok(DerivativeGrowth { c_star, orders, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::Grid;

    #[test]
    fn gaussian_l2_norm() {
        let grid = Grid::new(1, 32.0, 4096).unwrap();
        let f = SampledFunction::from_real_fn(grid, |x| (-x[0] * x[0] / 2.0).exp());
        assert!((lp_norm(&f, 2.0) - std::f64::consts::PI.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let grid = Grid::new(1, 32.0, 1024).unwrap();
        let f = SampledFunction::zeros(grid, Domain::Space);
        let w = WeightFunction::gevrey(2.0).unwrap();
        let r = modulation_norm(&f, &NormParams::new(w, 2.0, 1.0).with_k_max(8)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.certified);
    }

    #[test]
    fn tail_rules() {
        assert_eq!(geometric_tail(&[1.0, 0.5, 0.0], 1.0), 0.0);
        assert!((geometric_tail(&[1.0, 0.5, 0.25], 1.0) - 0.25).abs() < 1e-15);
        assert!(geometric_tail(&[1.0, 1.0, 1.0], 2.0).is_infinite());
    }
}

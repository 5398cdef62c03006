//! The associated weight sequence `M_p = N_p / N_0` with
//! `N_p = sup_{r>0} r^p e^{-w(r)}`, and its structural properties.
//!
//! Everything is carried in logarithms. The sup is searched in `y = ln r`, where
//! the stationarity condition reads `p = dW/dy` with `W(y) = w(e^y)`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::WeightFunction;

/// Options for the sup search.
#[derive(Debug, Clone, Copy)]
pub struct SupOptions {
    /// Upper limit on `ln r`.
    pub log_r_cap: f64,
    /// Lower end of the initial bracket in `ln r`.
    pub log_r_floor: f64,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            log_r_cap: 1e30,
            log_r_floor: -20.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightSequence {
    pub weight: String,
    /// `ln M_p`, `p = 0..=p_max`.
    pub log_values: Vec<f64>,
    /// `M_p` where representable (serialized as null otherwise).
    pub values: Vec<f64>,
    /// `ln N_0 = -w(0)` for monotone weights.
    pub log_n0: f64,
    pub n0: f64,
    /// `ln` of the maximising radius per `p` (`-inf` for `p = 0`).
    pub log_argmax_r: Vec<f64>,
    pub argmax_r: Vec<f64>,
    #[serde(rename = "H")]
    pub h: f64,
    /// Set when some sup was cut off at `log_r_cap`.
    pub cap_hit: bool,
    pub log_r_cap: f64,
    /// The index estimate is 0: the structural results for the sequence do not apply.
    pub slowly_varying_warning: bool,
}

impl WeightSequence {
    pub fn p_max(&self) -> usize {
        self.log_values.len() - 1
    }

    /// Builds a sequence directly from logarithms (used for hand-made sequences).
    pub fn from_log_values(label: &str, log_values: Vec<f64>) -> Self {
        let mut seq = Self {
            weight: label.to_string(),
            values: log_values.iter().map(|v| v.exp()).collect(),
            log_values,
            log_n0: 0.0,
            n0: 1.0,
            log_argmax_r: Vec::new(),
            argmax_r: Vec::new(),
            h: 1.0,
            cap_hit: false,
            log_r_cap: f64::INFINITY,
            slowly_varying_warning: false,
        };
        seq.h = find_h(&seq);
        seq
    }

    /// CSV with columns `p,log_Mp,argmax_r`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "p,log_Mp,argmax_r")?;
        for (p, lm) in self.log_values.iter().enumerate() {
            let r = self.argmax_r.get(p).copied().unwrap_or(f64::NAN);
            writeln!(out, "{p},{lm:e},{r:e}")?;
        }
        Ok(())
    }
}

struct SupResult {
    log_value: f64,
    y: f64,
    capped: bool,
}

fn objective(w: &WeightFunction, p: f64, y: f64) -> f64 {
    p * y - w.log_domain(y).0
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn sup_for(w: &WeightFunction, p: usize, opts: &SupOptions) -> SupResult {
    let p = p as f64;
    let slope = |y: f64| p - w.log_domain(y).1;
    let mut lo = opts.log_r_floor;
    let mut visited = vec![lo];
    let mut capped = false;
    let mut hi = 1.0_f64.max(lo + 1.0);
    if slope(lo) <= 0.0 {
        // The maximiser sits below the floor; the objective is increasing in r there.
        let y = golden_max(|y| objective(w, p, y), lo - 60.0, lo);
        return SupResult {
            log_value: objective(w, p, y),
            y,
            capped: false,
        };
    }
    loop {
        visited.push(hi);
        if slope(hi) <= 0.0 {
            break;
        }
        if hi >= opts.log_r_cap {
            capped = true;
            break;
        }
        lo = hi;
        hi = (2.0 * hi + 1.0).min(opts.log_r_cap);
    }
    if capped {
        return SupResult {
            log_value: objective(w, p, hi),
            y: hi,
            capped,
        };
    }
    let y = if w.has_analytic_derivatives() {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..400 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if slope(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    } else {
        golden_max(|y| objective(w, p, y), lo, hi)
    };
    // Guard against a non-concave objective: keep the best visited point.
    let mut best = (objective(w, p, y), y);
    for &v in &visited {
        let o = objective(w, p, v);
        if o > best.0 {
            best = (o, v);
        }
    }
    SupResult {
        log_value: best.0,
        y: best.1,
        capped,
    }
}

/// Computes `ln M_0..ln M_{p_max}` with default search options.
pub fn associated_sequence(w: &WeightFunction, p_max: usize) -> Result<WeightSequence> {
    associated_sequence_with(w, p_max, &SupOptions::default())
}

pub fn associated_sequence_with(w: &WeightFunction, p_max: usize, opts: &SupOptions) -> Result<WeightSequence> {
    if p_max < 1 {
        return Err(Error::InvalidParameter("p_max must be at least 1".into()));
    }
    let log_n0 = -w.value(0.0);
    let mut log_np = vec![log_n0];
    let mut log_arg = vec![f64::NEG_INFINITY];
    let mut cap_hit = false;
    for p in 1..=p_max {
        let r = sup_for(w, p, opts);
        cap_hit |= r.capped;
        log_np.push(r.log_value);
        log_arg.push(r.y);
    }
    let log_values: Vec<f64> = log_np.iter().map(|v| v - log_n0).collect();
    let mut seq = WeightSequence {
        weight: w.label().to_string(),
        values: log_values.iter().map(|v| v.exp()).collect(),
        log_values,
        log_n0,
        n0: log_n0.exp(),
        argmax_r: log_arg.iter().map(|y| y.exp()).collect(),
        log_argmax_r: log_arg,
        h: 1.0,
        cap_hit,
        log_r_cap: opts.log_r_cap,
        slowly_varying_warning: w.index_alpha() == 0.0,
    };
    seq.h = find_h(&seq);
    Ok(seq)
}

/// Indices `p` where `M_p² > M_{p-1} M_{p+1}` (checked on logarithms).
pub fn check_log_convexity(seq: &WeightSequence) -> Vec<usize> {
    let l = &seq.log_values;
    (1..l.len().saturating_sub(1))
        .filter(|&p| {
            let tol = 1e-12 * (1.0 + l[p].abs());
            2.0 * l[p] > l[p - 1] + l[p + 1] + tol
        })
        .collect()
}

/// Smallest `H >= 1` with `M_{p+q} <= H^{p+q} M_p M_q` for `p + q <= p_max`.
pub fn find_h(seq: &WeightSequence) -> f64 {
    let l = &seq.log_values;
    let mut best = 0.0_f64;
    for n in 1..l.len() {
        for p in 0..=n {
            let v = (l[n] - l[p] - l[n - p]) / n as f64;
            if v > best {
                best = v;
            }
        }
    }
    best.exp()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LowerBound {
    pub eta: f64,
    pub h: f64,
    /// `min_p (ln M_p - p ln h - eta p ln p)` over `2 <= p <= p_max`.
    pub margin: f64,
    /// Slope of `ln M_p` against `p ln p` over the upper half of the range.
    pub tail_slope: f64,
}

/// Searches `eta ∈ {0.05, ..., 0.45}` and `h` log-spaced in `[1e-6, 1]` for
/// `M_p >= h^p p^{p eta}`; the tail slope of `ln M_p` versus `p ln p` must also
/// reach `eta`, otherwise a finite range would certify bounded sequences.
pub fn check_lower_bound(seq: &WeightSequence) -> Option<LowerBound> {
    let l = &seq.log_values;
    let pm = l.len() - 1;
    if pm < 4 {
        return None;
    }
    let a = (pm / 2).max(2);
    let plp = |p: usize| p as f64 * (p as f64).ln();
    let tail_slope = (l[pm] - l[a]) / (plp(pm) - plp(a));
    let mut best: Option<LowerBound> = None;
    for k in 1..=9 {
        let eta = 0.05 * k as f64;
        if tail_slope < eta {
            break;
        }
        for j in 0..=60 {
            let h = 10f64.powf(-6.0 + 6.0 * j as f64 / 60.0);
            let margin = (2..=pm)
                .map(|p| l[p] - p as f64 * h.ln() - eta * plp(p))
                .fold(f64::INFINITY, f64::min);
            if margin >= 0.0 {
                let cand = LowerBound { eta, h, margin, tail_slope };
                // Prefer the largest eta, then the largest h.
                best = Some(cand);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_fact(p: usize) -> f64 {
        (1..=p).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn sqrt_weight_closed_form() {
        let w = WeightFunction::power(0.5).unwrap();
        let seq = associated_sequence(&w, 20).unwrap();
        for p in 1..=20 {
            let pf = p as f64;
            let expect = 2.0 * pf * (2.0 * pf).ln() - 2.0 * pf;
            let got = seq.log_values[p] + seq.log_n0;
            assert!((got - expect).abs() < 1e-9 * expect.abs().max(1.0), "p={p} {got} {expect}");
        }
    }

    #[test]
    fn convexity_examples() {
        let f = WeightSequence::from_log_values("fact2", (0..10).map(|p| 2.0 * ln_fact(p)).collect());
        assert!(check_log_convexity(&f).is_empty());
        let a = WeightSequence::from_log_values("a", [1.0f64, 10.0, 10.0, 10.0].iter().map(|v| v.ln()).collect());
        assert_eq!(check_log_convexity(&a), vec![1]);
        let b = WeightSequence::from_log_values("b", [1.0f64, 10.0, 5.0, 50.0].iter().map(|v| v.ln()).collect());
        assert_eq!(check_log_convexity(&b), vec![1]);
    }

    #[test]
    fn h_examples() {
        let ones = WeightSequence::from_log_values("one", vec![0.0; 12]);
        assert_eq!(find_h(&ones), 1.0);
        assert!(check_lower_bound(&ones).is_none());
        let f = WeightSequence::from_log_values("fact2", (0..30).map(|p| 2.0 * ln_fact(p)).collect());
        let h = find_h(&f);
        assert!((1.0..=4.0).contains(&h), "{h}");
        let lb = check_lower_bound(&f).unwrap();
        assert!(lb.eta > 0.0 && lb.eta < 0.5);
    }
}

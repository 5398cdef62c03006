//! Product estimates `‖fg‖_{p,q} <= C ‖f‖_{p1,q} ‖g‖_{p2,q}` over a corpus.

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::FunctionSpec;
use crate::decomposition::{Grid, Partition, SampledFunction};
use crate::error::{Error, Result};
use crate::norm::{modulation_norm, NormParams, NormResult, DEFAULT_SPECTRAL_FLOOR};
use crate::report::real;
use crate::weight::WeightFunction;

/// Weight and truncation shared by every norm evaluated in a lab experiment.
#[derive(Debug, Clone)]
pub struct LabSettings {
    pub weight: WeightFunction,
    pub k_max: usize,
    pub tail_tol: f64,
    pub partition: Partition,
}

impl LabSettings {
    pub fn new(weight: WeightFunction, k_max: usize) -> Self {
        Self {
            weight,
            k_max,
            tail_tol: 1e-8,
            partition: Partition::default(),
        }
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = partition;
        self
    }

    pub fn params(&self, p: f64, q: f64) -> NormParams {
        NormParams {
            p,
            q,
            weight: self.weight.clone(),
            k_max: self.k_max,
            tail_tol: self.tail_tol,
            partition: self.partition,
            spectral_floor: DEFAULT_SPECTRAL_FLOOR,
        }
    }

    pub fn norm(&self, f: &SampledFunction, p: f64, q: f64) -> Result<NormResult> {
        modulation_norm(f, &self.params(p, q))
    }
}

/// `p` with `1/p = 1/p1 + 1/p2`, rejected unless `p >= 1`.
pub fn holder_exponent(p1: f64, p2: f64) -> Result<f64> {
    if !(p1 >= 1.0 && p2 >= 1.0) {
        return Err(Error::InvalidParameter(format!("p1 = {p1}, p2 = {p2} must be >= 1")));
    }
    let inv = 1.0 / p1 + 1.0 / p2;
    if inv > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "1/p1 + 1/p2 = {inv} exceeds 1, so p = 1/(1/p1 + 1/p2) < 1"
        )));
    }
    Ok(if inv == 0.0 { f64::INFINITY } else { 1.0 / inv.min(1.0) })
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraEntry {
    pub f_id: String,
    pub g_id: String,
    pub norm_fg: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub ratio: f64,
    /// All three norms carry a tail certificate.
    pub certified: bool,
    /// One factor has zero norm; the ratio is reported as 0.
    pub zero_input: bool,
}

fn entry(f_id: &str, g_id: &str, fg: &NormResult, nf: &NormResult, ng: &NormResult) -> AlgebraEntry {
    let zero_input = nf.value == 0.0 || ng.value == 0.0;
    AlgebraEntry {
        f_id: f_id.to_string(),
        g_id: g_id.to_string(),
        norm_fg: fg.value,
        norm_f: nf.value,
        norm_g: ng.value,
        ratio: if zero_input { 0.0 } else { fg.value / (nf.value * ng.value) },
        certified: fg.certified && nf.certified && ng.certified,
        zero_input,
    }
}

/// One product ratio for sampled `f` and `g`.
pub fn algebra_ratio(
    f: &SampledFunction,
    g: &SampledFunction,
    p1: f64,
    p2: f64,
    q: f64,
    settings: &LabSettings,
) -> Result<AlgebraEntry> {
    let p = holder_exponent(p1, p2)?;
    let fg = f.mul(g)?;
    let nfg = settings.norm(&fg, p, q)?;
    let nf = settings.norm(f, p1, q)?;
    let ng = settings.norm(g, p2, q)?;
    Ok(entry("f", "g", &nfg, &nf, &ng))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub corpus_ids: Vec<String>,
    #[serde(serialize_with = "real")]
    pub p1: f64,
    #[serde(serialize_with = "real")]
    pub p2: f64,
    #[serde(serialize_with = "real")]
    pub p: f64,
    #[serde(serialize_with = "real")]
    pub q: f64,
    pub weight_spec: String,
    pub ratios: Vec<f64>,
    pub entries: Vec<AlgebraEntry>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub all_finite: bool,
    pub all_certified: bool,
}

impl AlgebraReport {
    /// No blow-up within the corpus: every ratio finite and `max < factor * median`.
    pub fn bounded(&self, factor: f64) -> bool {
        self.all_finite && self.max_ratio < factor * self.median_ratio
    }
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Ratios for all unordered pairs (including squares) of the corpus.
pub fn algebra_report(
    corpus: &[FunctionSpec],
    grid: &Grid,
    p1: f64,
    p2: f64,
    q: f64,
    settings: &LabSettings,
) -> Result<AlgebraReport> {
    let p = holder_exponent(p1, p2)?;
    let sampled: Vec<SampledFunction> = corpus.iter().map(|s| s.sample(grid)).collect::<Result<_>>()?;
    let singles = |exp: f64| -> Result<Vec<NormResult>> {
        sampled.par_iter().map(|f| settings.norm(f, exp, q)).collect()
    };
    let n1 = singles(p1)?;
    let n2 = if p2 == p1 { n1.clone() } else { singles(p2)? };
    let pairs: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|i| (i..corpus.len()).map(move |j| (i, j))).collect();
    let products: Vec<NormResult> = pairs
        .par_iter()
        .map(|&(i, j)| settings.norm(&sampled[i].mul(&sampled[j])?, p, q))
        .collect::<Result<_>>()?;
    let ids: Vec<String> = corpus.iter().map(|s| s.to_string()).collect();
    let entries: Vec<AlgebraEntry> = pairs
        .iter()
        .zip(&products)
        .map(|(&(i, j), fg)| entry(&ids[i], &ids[j], fg, &n1[i], &n2[j]))
        .collect();
    let ratios: Vec<f64> = entries.iter().map(|e| e.ratio).collect();
    let nonzero: Vec<f64> = entries.iter().filter(|e| !e.zero_input).map(|e| e.ratio).collect();
    Ok(AlgebraReport {
        corpus_ids: ids,
        p1,
        p2,
        p,
        q,
        weight_spec: settings.weight.label().to_string(),
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        median_ratio: median(&nonzero),
        all_finite: ratios.iter().all(|r| r.is_finite()),
        all_certified: entries.iter().all(|e| e.certified),
        ratios,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_relation() {
        assert_eq!(holder_exponent(2.0, 2.0).unwrap(), 1.0);
        assert!((holder_exponent(3.0, 6.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(holder_exponent(1.5, 1.5).is_err());
        assert!(holder_exponent(f64::INFINITY, f64::INFINITY).unwrap().is_infinite());
    }

    #[test]
    fn zero_factor_reports_zero() {
        let grid = Grid::new(1, 16.0, 1024).unwrap();
        let f = FunctionSpec::gaussian(1.0).sample(&grid).unwrap();
        let z = FunctionSpec::Zero.sample(&grid).unwrap();
        let s = LabSettings::new(WeightFunction::gevrey(2.0).unwrap(), 32);
        let e = algebra_ratio(&f, &z, 2.0, 2.0, 1.0, &s).unwrap();
        assert_eq!(e.ratio, 0.0);
        assert!(e.zero_input);
    }
}

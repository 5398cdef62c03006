//! Sampling grids, the Fourier transform in the unitary convention
//! `F f(ξ) = (2π)^{-n/2} ∫ f(x) e^{-i x·ξ} dx`, the smooth window and its
//! normalised translates `σ_k`, and the box operators `□_k = F^{-1} σ_k F`.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniform grid on `[-L, L)^n` with `N` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    samples: usize,
}

impl Grid {
    pub fn new(n: usize, half_width: f64, samples: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidGrid(format!("dimension {n} (only 1 and 2 are supported)")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width L = {half_width}")));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {samples} must be a power of two >= 8")));
        }
        let g = Self { n, half_width, samples };
        if g.dxi() > 0.25 {
            return Err(Error::InvalidGrid(format!(
                "frequency spacing pi/L = {:.4} exceeds 0.25; use L >= 4 pi",
                g.dxi()
            )));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable frequency `π/dx`.
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    /// Signed frequency index of storage position `i` (FFT order).
    pub fn frequency_index(&self, i: usize) -> i64 {
        if i < self.samples / 2 {
            i as i64
        } else {
            i as i64 - self.samples as i64
        }
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.frequency_index(i) as f64 * self.dxi()
    }

    /// Storage position of signed frequency index `m`.
    pub fn frequency_position(&self, m: i64) -> usize {
        m.rem_euclid(self.samples as i64) as usize
    }

    /// Same box, `factor` times more samples per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n, self.half_width, self.samples * factor)
    }

    /// Multi-index of flat position `flat` (row-major, last axis fastest).
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.n == 1 {
            [flat, 0]
        } else {
            [flat / self.samples, flat % self.samples]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Space,
    Frequency,
}

/// Complex samples on a [`Grid`], either in space or in frequency (FFT order).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
    domain: Domain,
    decay_warning: bool,
}

/// Relative size of boundary samples that still counts as decayed.
pub const BOUNDARY_DECAY: f64 = 1e-12;

impl SampledFunction {
    pub fn from_values(grid: Grid, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            grid,
            values,
            domain,
            decay_warning: false,
        })
    }

    pub fn zeros(grid: Grid, domain: Domain) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            domain,
            decay_warning: false,
        }
    }

    /// Samples `f` at the spatial grid points.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let [i, j] = grid.unflatten(flat);
                if grid.dim() == 1 {
                    f(&[grid.coordinate(i)])
                } else {
                    f(&[grid.coordinate(i), grid.coordinate(j)])
                }
            })
            .collect();
        Self {
            grid,
            values,
            domain: Domain::Space,
            decay_warning: false,
        }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Set on transforms whose input failed the boundary-decay check.
    pub fn decay_warning(&self) -> bool {
        self.decay_warning
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            values: self.values.iter().map(|&z| f(z)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.domain != other.domain {
            return Err(Error::InvalidParameter("operands live on different grids or domains".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            ..self.clone()
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the outermost layer of samples.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.samples();
        let mut m = 0.0_f64;
        for (flat, z) in self.values.iter().enumerate() {
            let [i, j] = self.grid.unflatten(flat);
            let edge = i == 0 || i == n - 1 || (self.grid.dim() == 2 && (j == 0 || j == n - 1));
            if edge {
                m = m.max(z.norm());
            }
        }
        m
    }

    /// True when the boundary layer is below `1e-12` relative to the sup norm.
    pub fn boundary_decay_ok(&self) -> bool {
        self.boundary_max() <= BOUNDARY_DECAY * self.sup_norm()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|z| z.im.abs() <= tol)
    }

    /// `index,re,im` rows, flat row-major index.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, z) in self.values.iter().enumerate() {
            writeln!(out, "{i},{:e},{:e}", z.re, z.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R, grid: Grid, domain: Domain) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut seen = vec![false; grid.len()];
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Format(format!("line {}: expected index,re,im", lineno + 1)));
            }
            let bad = || Error::Format(format!("line {}: cannot parse `{line}`", lineno + 1));
            let i: usize = parts[0].parse().map_err(|_| bad())?;
            let re: f64 = parts[1].parse().map_err(|_| bad())?;
            let im: f64 = parts[2].parse().map_err(|_| bad())?;
            if i >= values.len() {
                return Err(Error::Format(format!("line {}: index {i} out of range", lineno + 1)));
            }
            values[i] = Complex64::new(re, im);
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Format(format!("missing sample {i}")));
        }
        Self::from_values(grid, values, domain)
    }

    /// Binary container: `n`, `L`, `N`, domain tag, then interleaved re/im, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 16 * self.values.len());
        out.extend_from_slice(&(self.grid.dim() as u64).to_le_bytes());
        out.extend_from_slice(&self.grid.half_width().to_le_bytes());
        out.extend_from_slice(&(self.grid.samples() as u64).to_le_bytes());
        let tag: u64 = match self.domain {
            Domain::Space => 0,
            Domain::Frequency => 1,
        };
        out.extend_from_slice(&tag.to_le_bytes());
        for z in &self.values {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 32 {
            return Err(Error::Format("binary container shorter than its header".into()));
        }
        let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().expect("8 bytes") };
        let n = u64::from_le_bytes(word(0)) as usize;
        let l = f64::from_le_bytes(word(1));
        let samples = u64::from_le_bytes(word(2)) as usize;
        let domain = match u64::from_le_bytes(word(3)) {
            0 => Domain::Space,
            1 => Domain::Frequency,
            t => return Err(Error::Format(format!("unknown domain tag {t}"))),
        };
        let grid = Grid::new(n, l, samples)?;
        let payload = &bytes[32..];
        if payload.len() != 16 * grid.len() {
            return Err(Error::Format(format!(
                "payload has {} bytes, expected {}",
                payload.len(),
                16 * grid.len()
            )));
        }
        let values = payload
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Self::from_values(grid, values, domain)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut buf = Vec::new();
        input.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Unnormalised DFT along every axis, in place.
fn dft_nd(data: &mut [Complex64], grid: &Grid, inverse: bool) {
    let n = grid.samples();
    let fft = plan(n, inverse);
    fft.process(data);
    if grid.dim() == 2 {
        transpose(data, n);
        fft.process(data);
        transpose(data, n);
    }
}

/// Multiplies by `(-1)^(i_1 + ... + i_n)` and a scalar.
fn phase_and_scale(data: &mut [Complex64], grid: &Grid, c: f64) {
    for (flat, z) in data.iter_mut().enumerate() {
        let [i, j] = grid.unflatten(flat);
        let parity = (i + if grid.dim() == 2 { j } else { 0 }) & 1;
        *z *= if parity == 0 { c } else { -c };
    }
}

/// Riemann-sum approximation of `F f` on the frequencies `m·π/L`.
pub fn forward_transform(f: &SampledFunction) -> Result<SampledFunction> {
    if f.domain != Domain::Space {
        return Err(Error::InvalidParameter("forward transform expects a space-domain function".into()));
    }
    let grid = f.grid;
    let mut data = f.values.clone();
    dft_nd(&mut data, &grid, false);
    let c = (grid.dx() / TWO_PI.sqrt()).powi(grid.dim() as i32);
    phase_and_scale(&mut data, &grid, c);
    Ok(SampledFunction {
        grid,
        values: data,
        domain: Domain::Frequency,
        decay_warning: !f.boundary_decay_ok(),
    })
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &SampledFunction) -> Result<SampledFunction> {
    if spectrum.domain != Domain::Frequency {
        return Err(Error::InvalidParameter("inverse transform expects a frequency-domain function".into()));
    }
    let grid = spectrum.grid;
    let mut data = spectrum.values.clone();
    phase_and_scale(&mut data, &grid, 1.0);
    dft_nd(&mut data, &grid, true);
    let c = (grid.dxi() / TWO_PI.sqrt()).powi(grid.dim() as i32);
    for z in data.iter_mut() {
        *z *= c;
    }
    Ok(SampledFunction {
        grid,
        values: data,
        domain: Domain::Space,
        decay_warning: spectrum.decay_warning,
    })
}

/// One-dimensional smooth cutoff: 1 on `|t| <= plateau`, 0 on `|t| >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub plateau: f64,
}

impl Window {
    pub fn new(plateau: f64) -> Result<Self> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(Error::InvalidParameter(format!("window plateau {plateau} must lie in (0, 1)")));
        }
        Ok(Self { plateau })
    }

    /// `φ(u) / (φ(u) + φ(1-u))` with `φ(u) = e^{-1/u}` and `u = (1-|t|)/(1-plateau)`.
    pub fn profile(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= self.plateau {
            return 1.0;
        }
        if a >= 1.0 {
            return 0.0;
        }
        let u = (1.0 - a) / (1.0 - self.plateau);
        let d = 1.0 / u - 1.0 / (1.0 - u);
        1.0 / (1.0 + d.exp())
    }
}

impl Default for Window {
    fn default() -> Self {
        Self { plateau: 0.5 }
    }
}

/// The normalised translates `σ_k = ρ_k / Σ_j ρ_j` of `ρ(ξ) = Π g(ξ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partition {
    pub window: Window,
    pub support_radius: f64,
}

impl Default for Partition {
    fn default() -> Self {
        Self {
            window: Window::default(),
            support_radius: 1.0,
        }
    }
}

/// The default partition (plateau 1/2).
pub fn make_window() -> Partition {
    Partition::default()
}

impl Partition {
    pub fn with_plateau(plateau: f64) -> Result<Self> {
        Ok(Self {
            window: Window::new(plateau)?,
            support_radius: 1.0,
        })
    }

    pub fn rho(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&t| self.window.profile(t)).product()
    }

    /// `Σ_j g(t - j)` over the three integers nearest to `t`.
    fn normaliser_1d(&self, t: f64) -> f64 {
        let r = t.round();
        (-1..=1).map(|d| self.window.profile(t - (r + d as f64))).sum()
    }

    /// One-dimensional factor `σ_k(t)`.
    pub fn sigma_1d(&self, k: i64, t: f64) -> f64 {
        let off = t - k as f64;
        if off.abs() >= 1.0 {
            return 0.0;
        }
        self.window.profile(off) / self.normaliser_1d(t)
    }

    /// `σ_k(ξ)`. Only the `3^n` translates around `round(ξ)` enter the normaliser.
    pub fn sigma(&self, k: &[i64], xi: &[f64]) -> f64 {
        assert_eq!(k.len(), xi.len(), "k and xi must have the same dimension");
        k.iter().zip(xi).map(|(&ki, &t)| self.sigma_1d(ki, t)).product()
    }
}

/// Max over the frequency samples of `|Σ_k σ_k(ξ) - 1|`.
pub fn verify_partition(part: &Partition, grid: &Grid) -> f64 {
    let per_axis: Vec<f64> = (0..grid.samples())
        .map(|i| {
            let t = grid.frequency(i);
            let r = t.round() as i64;
            (r - 2..=r + 2).map(|k| part.sigma_1d(k, t)).sum()
        })
        .collect();
    let mut dev = 0.0_f64;
    if grid.dim() == 1 {
        for s in &per_axis {
            dev = dev.max((s - 1.0).abs());
        }
    } else {
        let axis: Vec<Vec<f64>> = (0..grid.samples())
            .map(|i| {
                let t = grid.frequency(i);
                let r = t.round() as i64;
                (r - 2..=r + 2).map(|k| part.sigma_1d(k, t)).collect()
            })
            .collect();
        for a in &axis {
            for b in &axis {
                let mut s = 0.0;
                for x in a {
                    for y in b {
                        s += x * y;
                    }
                }
                dev = dev.max((s - 1.0).abs());
            }
        }
    }
    dev
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    pub max_sum_deviation: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Largest `σ_k(ξ)` found with `|ξ - k|_∞ >= 1`.
    pub support_leak: f64,
    /// Empirical `C` with `σ_k >= C` on `|ξ - k|_∞ <= 1/2`.
    pub half_cube_lower_bound: f64,
    /// `sup |∂σ_k|` and `sup |∂²σ_k|` along one axis, maximised over `k`.
    pub derivative_bounds: [f64; 2],
    /// Relative spread of those bounds across `k ∈ [-k_range, k_range]`.
    pub derivative_spread: f64,
    pub k_range: i64,
}

impl PartitionReport {
    pub fn all_pass(&self, tol: f64) -> bool {
        self.max_sum_deviation <= tol
            && self.min_value >= 0.0
            && self.max_value <= 1.0
            && self.support_leak == 0.0
            && self.half_cube_lower_bound > 0.0
            && self.derivative_bounds.iter().all(|d| d.is_finite())
            && self.derivative_spread < 1e-6
    }
}

/// Checks range, support, sum, half-cube lower bound and derivative bounds of the
/// partition on the frequency samples of `grid`, for `k ∈ [-k_range, k_range]^n`.
pub fn partition_properties(part: &Partition, grid: &Grid, k_range: i64) -> PartitionReport {
    let freqs: Vec<f64> = (0..grid.samples()).map(|i| grid.frequency(i)).collect();
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    let mut leak = 0.0_f64;
    let mut lower = f64::INFINITY;
    for k in -k_range..=k_range {
        for &t in &freqs {
            let v = part.sigma_1d(k, t);
            min_v = min_v.min(v);
            max_v = max_v.max(v);
            let off = (t - k as f64).abs();
            if off >= 1.0 {
                leak = leak.max(v);
            }
            if off <= 0.5 {
                lower = lower.min(v);
            }
        }
    }
    let h = 1e-3;
    let steps = 2200;
    let mut per_k = Vec::new();
    for k in -k_range..=k_range {
        let (mut d1, mut d2) = (0.0_f64, 0.0_f64);
        for i in 0..=steps {
            let t = k as f64 - 1.1 + i as f64 * h;
            let (a, b, c) = (part.sigma_1d(k, t - h), part.sigma_1d(k, t), part.sigma_1d(k, t + h));
            d1 = d1.max(((c - a) / (2.0 * h)).abs());
            d2 = d2.max(((c - 2.0 * b + a) / (h * h)).abs());
        }
        per_k.push([d1, d2]);
    }
    let bound = |i: usize| per_k.iter().map(|d| d[i]).fold(0.0, f64::max);
    let least = |i: usize| per_k.iter().map(|d| d[i]).fold(f64::INFINITY, f64::min);
    let spread = ((bound(0) - least(0)) / bound(0)).max((bound(1) - least(1)) / bound(1));
    let n = grid.dim() as i32;
    PartitionReport {
        n: grid.dim(),
        max_sum_deviation: verify_partition(part, grid),
        min_value: min_v.powi(n),
        max_value: max_v.powi(n),
        support_leak: leak,
        half_cube_lower_bound: lower.powi(n),
        derivative_bounds: [bound(0) * max_v.powi(n - 1), bound(1) * max_v.powi(n - 1)],
        derivative_spread: spread,
        k_range,
    }
}

/// Spectrum of a function together with a partition, ready to cut into boxes.
#[derive(Debug, Clone)]
pub struct BoxDecomposer {
    spectrum: SampledFunction,
    partition: Partition,
}

impl BoxDecomposer {
    pub fn new(f: &SampledFunction, partition: Partition) -> Result<Self> {
        let spectrum = match f.domain() {
            Domain::Space => forward_transform(f)?,
            Domain::Frequency => f.clone(),
        };
        Ok(Self { spectrum, partition })
    }

    /// Wraps a spectrum that has already been computed (and possibly cleaned).
    pub fn from_spectrum(spectrum: SampledFunction, partition: Partition) -> Result<Self> {
        if spectrum.domain() != Domain::Frequency {
            return Err(Error::InvalidParameter("expected a frequency-domain array".into()));
        }
        Ok(Self { spectrum, partition })
    }

    pub fn spectrum(&self) -> &SampledFunction {
        &self.spectrum
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn grid(&self) -> &Grid {
        &self.spectrum.grid
    }

    fn check_k(&self, k: &[i64]) -> Result<()> {
        let g = self.grid();
        if k.len() != g.dim() {
            return Err(Error::InvalidParameter(format!("k has {} entries, grid dimension is {}", k.len(), g.dim())));
        }
        let limit = g.max_frequency();
        for &ki in k {
            if (ki.unsigned_abs() as f64) + 1.0 > limit {
                return Err(Error::GridOverflow {
                    requested: (ki.unsigned_abs() + 1) as f64,
                    limit,
                });
            }
        }
        Ok(())
    }

    /// Storage positions and `σ` values along one axis for the band around `k`.
    pub fn axis_profile(&self, k: i64) -> Vec<(usize, f64)> {
        let g = self.grid();
        let dxi = g.dxi();
        let lo = ((k as f64 - 1.0) / dxi).ceil() as i64;
        let hi = ((k as f64 + 1.0) / dxi).floor() as i64;
        let half = (g.samples() / 2) as i64;
        (lo.max(-half)..=hi.min(half - 1))
            .filter_map(|m| {
                let s = self.partition.sigma_1d(k, m as f64 * dxi);
                (s > 0.0).then(|| (g.frequency_position(m), s))
            })
            .collect()
    }

    /// Visits the nonzero entries of `σ_k F f` as `(flat position, value)`.
    pub fn for_each_piece_entry(&self, k: &[i64], mut f: impl FnMut(usize, Complex64)) -> Result<()> {
        self.check_k(k)?;
        let g = self.grid();
        let vals = self.spectrum.values();
        let a = self.axis_profile(k[0]);
        if g.dim() == 1 {
            for &(i, s) in &a {
                f(i, vals[i] * s);
            }
        } else {
            let b = self.axis_profile(k[1]);
            let n = g.samples();
            for &(i, si) in &a {
                for &(j, sj) in &b {
                    let flat = i * n + j;
                    f(flat, vals[flat] * (si * sj));
                }
            }
        }
        Ok(())
    }

    /// `σ_k F f` as a frequency-domain array.
    pub fn piece_spectrum(&self, k: &[i64]) -> Result<SampledFunction> {
        let mut out = SampledFunction::zeros(*self.grid(), Domain::Frequency);
        self.for_each_piece_entry(k, |i, z| out.values[i] = z)?;
        out.decay_warning = self.spectrum.decay_warning;
        Ok(out)
    }

    /// `□_k f` in space.
    pub fn piece(&self, k: &[i64]) -> Result<SampledFunction> {
        inverse_transform(&self.piece_spectrum(k)?)
    }
}

/// `□_k f = F^{-1}(σ_k F f)` with the default partition.
pub fn box_operator(f: &SampledFunction, k: &[i64]) -> Result<SampledFunction> {
    BoxDecomposer::new(f, Partition::default())?.piece(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(grid: Grid) -> SampledFunction {
        SampledFunction::from_real_fn(grid, |x| (-x.iter().map(|t| t * t).sum::<f64>() / 2.0).exp())
    }

    #[test]
    fn window_values() {
        let w = Window::default();
        assert_eq!(w.profile(0.25), 1.0);
        assert_eq!(w.profile(1.0), 0.0);
        assert!((w.profile(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sigma_at_lattice_point_is_one() {
        let p = make_window();
        assert_eq!(p.sigma(&[3], &[3.0]), 1.0);
        assert_eq!(p.sigma(&[3, -2], &[3.0, -2.0]), 1.0);
        assert_eq!(p.sigma(&[3], &[4.0]), 0.0);
    }

    #[test]
    fn gaussian_self_dual() {
        let grid = Grid::new(1, 32.0, 4096).unwrap();
        let f = forward_transform(&gauss(grid)).unwrap();
        let mut err = 0.0_f64;
        for (i, z) in f.values().iter().enumerate() {
            let xi = grid.frequency(i);
            if xi.abs() <= 10.0 {
                err = err.max((z - Complex64::new((-xi * xi / 2.0).exp(), 0.0)).norm());
            }
        }
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn round_trip_2d() {
        let grid = Grid::new(2, 4.0 * std::f64::consts::PI, 64).unwrap();
        let f = gauss(grid);
        let back = inverse_transform(&forward_transform(&f).unwrap()).unwrap();
        let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let grid = Grid::new(1, 4.0 * std::f64::consts::PI, 16).unwrap();
        let f = SampledFunction::from_fn(grid, |x| Complex64::new(x[0], -x[0] * 0.5));
        assert_eq!(SampledFunction::from_bytes(&f.to_bytes()).unwrap(), f);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = SampledFunction::read_csv(&buf[..], grid, Domain::Space).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 32.0, 64).is_err());
        assert!(Grid::new(1, 32.0, 100).is_err());
        assert!(Grid::new(1, 1.0, 64).is_err());
    }
}

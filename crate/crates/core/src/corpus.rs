//! Test functions addressable by string id, and measurement of Fourier decay.
//!
//! ```text
//! gaussian:sigma=<s>,m=<modulation>,c=<center>,amp=<a>
//! gevrey:mu=<mu<0>,height=<h>,amp=<a>      φ_μ(t) = ψ_μ(1-t) ψ_μ(t),  ψ_μ(t) = e^{-t^μ} (t > 0)
//! window:plateau=<a>,width=<w>,amp=<a>
//! zero
//! ```
//! In two dimensions every function is the tensor product of its 1-D profile.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::decomposition::{forward_transform, Grid, SampledFunction, Window};
use crate::error::{Error, Result};

/// `ψ_μ(t) = e^{-t^μ}` for `t > 0`, 0 otherwise.
pub fn psi_mu(mu: f64, t: f64) -> f64 {
    if t > 0.0 {
        let v = (-t.powf(mu)).exp();
        if v < 1e-300 { 0.0 } else { v }
    } else {
        0.0
    }
}

/// `φ_μ(t) = ψ_μ(1-t) ψ_μ(t)`, supported in `[0, 1]`.
pub fn phi_mu(mu: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let v = (-t.powf(mu) - (1.0 - t).powf(mu)).exp();
    if v < 1e-300 { 0.0 } else { v }
}

/// `max φ_μ = φ_μ(1/2) = e^{-2^{1-μ}}`.
pub fn phi_mu_max(mu: f64) -> f64 {
    (-(2f64.powf(1.0 - mu))).exp()
}

/// Gevrey order `s = 1 - 1/μ` of `φ_μ`.
pub fn gevrey_order(mu: f64) -> f64 {
    1.0 - 1.0 / mu
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Gaussian {
        sigma: f64,
        modulation: f64,
        center: f64,
        amplitude: f64,
    },
    GevreyBump {
        mu: f64,
        /// Rescale so the maximum equals this value (`None`: natural height).
        height: Option<f64>,
        amplitude: f64,
    },
    Window {
        plateau: f64,
        width: f64,
        amplitude: f64,
    },
    Zero,
}

impl FunctionSpec {
    pub fn gaussian(sigma: f64) -> Self {
        FunctionSpec::Gaussian {
            sigma,
            modulation: 0.0,
            center: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn bump(mu: f64) -> Self {
        FunctionSpec::GevreyBump {
            mu,
            height: None,
            amplitude: 1.0,
        }
    }

    pub fn unit_bump(mu: f64) -> Self {
        FunctionSpec::GevreyBump {
            mu,
            height: Some(1.0),
            amplitude: 1.0,
        }
    }

    pub fn window() -> Self {
        FunctionSpec::Window {
            plateau: 0.5,
            width: 1.0,
            amplitude: 1.0,
        }
    }

    /// Same function multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            FunctionSpec::Gaussian { amplitude, .. }
            | FunctionSpec::GevreyBump { amplitude, .. }
            | FunctionSpec::Window { amplitude, .. } => *amplitude *= factor,
            FunctionSpec::Zero => {}
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            FunctionSpec::Gaussian { sigma, modulation, center, amplitude } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("gaussian width {sigma} must be positive"));
                }
                if ![modulation, center, amplitude].iter().all(|v| v.is_finite()) {
                    return bad("gaussian parameters must be finite".into());
                }
            }
            FunctionSpec::GevreyBump { mu, height, amplitude } => {
                if !(mu < 0.0 && mu.is_finite()) {
                    return bad(format!("bump parameter mu = {mu} must be negative"));
                }
                if height.is_some_and(|h| !(h > 0.0 && h.is_finite())) || !amplitude.is_finite() {
                    return bad("bump height/amplitude must be finite and positive".into());
                }
            }
            FunctionSpec::Window { plateau, width, amplitude } => {
                Window::new(plateau)?;
                if !(width > 0.0 && width.is_finite()) || !amplitude.is_finite() {
                    return bad(format!("window width {width} must be positive"));
                }
            }
            FunctionSpec::Zero => {}
        }
        Ok(())
    }

    /// The 1-D profile at `t`.
    pub fn profile(&self, t: f64) -> Complex64 {
        match *self {
            FunctionSpec::Gaussian { sigma, modulation, center, amplitude } => {
                let d = t - center;
                Complex64::from_polar(amplitude * (-d * d / (2.0 * sigma * sigma)).exp(), modulation * t)
            }
            FunctionSpec::GevreyBump { mu, height, amplitude } => {
                let scale = height.map(|h| h / phi_mu_max(mu)).unwrap_or(1.0);
                Complex64::new(amplitude * scale * phi_mu(mu, t), 0.0)
            }
            FunctionSpec::Window { plateau, width, amplitude } => {
                Complex64::new(amplitude * Window { plateau }.profile(t / width), 0.0)
            }
            FunctionSpec::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// Samples the function (tensor product in 2-D); rejects boundary-decay violations.
    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        self.validate()?;
        let f = SampledFunction::from_fn(*grid, |x| x.iter().map(|&t| self.profile(t)).product());
        if !f.boundary_decay_ok() {
            return Err(Error::InvalidParameter(format!(
                "`{self}` does not decay below 1e-12 at the boundary of [-{0}, {0}]",
                grid.half_width()
            )));
        }
        Ok(f)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FunctionSpec::Gaussian { sigma, modulation, center, amplitude } => {
                write!(f, "gaussian:sigma={sigma}")?;
                if modulation != 0.0 {
                    write!(f, ",m={modulation}")?;
                }
                if center != 0.0 {
                    write!(f, ",c={center}")?;
                }
                if amplitude != 1.0 {
                    write!(f, ",amp={amplitude}")?;
                }
                Ok(())
            }
            FunctionSpec::GevreyBump { mu, height, amplitude } => {
                write!(f, "gevrey:mu={mu}")?;
                if let Some(h) = height {
                    write!(f, ",height={h}")?;
                }
                if amplitude != 1.0 {
                    write!(f, ",amp={amplitude}")?;
                }
                Ok(())
            }
            FunctionSpec::Window { plateau, width, amplitude } => {
                write!(f, "window")?;
                let mut sep = ':';
                for (k, v, d) in [("plateau", plateau, 0.5), ("width", width, 1.0), ("amp", amplitude, 1.0)] {
                    if v != d {
                        write!(f, "{sep}{k}={v}")?;
                        sep = ',';
                    }
                }
                Ok(())
            }
            FunctionSpec::Zero => write!(f, "zero"),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let unknown = || Error::UnknownFunction(text.to_string());
        let (head, body) = match text.split_once(':') {
            Some((h, b)) => (h.trim(), b),
            None => (text, ""),
        };
        let mut kv: Vec<(String, f64)> = Vec::new();
        for token in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = token.split_once('=').ok_or_else(unknown)?;
            let v: f64 = v.trim().parse().map_err(|_| unknown())?;
            let k = k.trim().to_string();
            if kv.iter().any(|(kk, _)| *kk == k) {
                return Err(unknown());
            }
            kv.push((k, v));
        }
        let take = |kv: &mut Vec<(String, f64)>, key: &str| -> Option<f64> {
            kv.iter().position(|(k, _)| k == key).map(|i| kv.remove(i).1)
        };
        let spec = match head {
            "gaussian" => FunctionSpec::Gaussian {
                sigma: take(&mut kv, "sigma").unwrap_or(1.0),
                modulation: take(&mut kv, "m").unwrap_or(0.0),
                center: take(&mut kv, "c").unwrap_or(0.0),
                amplitude: take(&mut kv, "amp").unwrap_or(1.0),
            },
            "gevrey" => FunctionSpec::GevreyBump {
                mu: take(&mut kv, "mu").ok_or_else(unknown)?,
                height: take(&mut kv, "height"),
                amplitude: take(&mut kv, "amp").unwrap_or(1.0),
            },
            "window" => FunctionSpec::Window {
                plateau: take(&mut kv, "plateau").unwrap_or(0.5),
                width: take(&mut kv, "width").unwrap_or(1.0),
                amplitude: take(&mut kv, "amp").unwrap_or(1.0),
            },
            "zero" => FunctionSpec::Zero,
            _ => return Err(unknown()),
        };
        if !kv.is_empty() {
            return Err(unknown());
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// The six-element corpus used for algebra, embedding and window checks:
/// two Gaussians, a modulated Gaussian, `φ_{-1}`, `φ_{-2}` and the window.
pub fn standard_corpus() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::gaussian(1.0),
        FunctionSpec::Gaussian {
            sigma: 2.0,
            modulation: 0.0,
            center: 1.0,
            amplitude: 1.0,
        },
        FunctionSpec::Gaussian {
            sigma: 1.0,
            modulation: 5.0,
            center: 0.0,
            amplitude: 1.0,
        },
        FunctionSpec::unit_bump(-1.0),
        FunctionSpec::unit_bump(-2.0),
        FunctionSpec::window(),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub c: f64,
    pub eps: f64,
    pub fitted_exponent: f64,
    pub model_exponent: f64,
    /// Fit window `[xi_lo, xi_hi]`.
    pub xi_range: (f64, f64),
    pub points: usize,
    pub rms_residual: f64,
}

impl DecayFit {
    /// `ln c - eps |ξ|^κ`.
    pub fn log_envelope(&self, xi: f64) -> f64 {
        self.c.ln() - self.eps * xi.abs().powf(self.fitted_exponent)
    }
}

/// Fits `ln|F f(ξ)| ≈ ln c - eps |ξ|^κ` on the upper envelope of the spectrum over
/// the largest decade of `|ξ|` where the envelope lies in `[1e-13, 1e-2]`.
pub fn fourier_decay_fit(f: &SampledFunction, model_exponent: f64) -> Result<DecayFit> {
    let grid = *f.grid();
    let spectrum = forward_transform(f)?;
    let n = grid.samples();
    let half = n / 2;
    // Nonnegative frequencies along the first axis (second coordinate 0 in 2-D).
    let mags: Vec<(f64, f64)> = (0..half)
        .map(|i| {
            let flat = if grid.dim() == 1 { i } else { i * n };
            (grid.frequency(i), spectrum.values()[flat].norm())
        })
        .collect();
    let mut records = Vec::new();
    let mut running = 0.0_f64;
    for &(xi, m) in mags.iter().rev() {
        if m > running {
            running = m;
            records.push((xi, m));
        }
    }
    records.reverse();
    let band: Vec<(f64, f64)> = records
        .into_iter()
        .filter(|&(xi, m)| xi > 0.0 && (1e-13..=1e-2).contains(&m))
        .collect();
    let Some(&(xi_hi, _)) = band.last() else {
        return Err(Error::InsufficientRange("no spectral samples in [1e-13, 1e-2]".into()));
    };
    let pts: Vec<(f64, f64)> = band.into_iter().filter(|&(xi, _)| xi >= xi_hi / 10.0).collect();
    if pts.len() < 6 {
        return Err(Error::InsufficientRange(format!("only {} envelope points in the top decade", pts.len())));
    }
    let xi_lo = pts[0].0;
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let fit = |kappa: f64| -> (f64, f64, f64) {
        let xs: Vec<f64> = pts.iter().map(|p| p.0.powf(kappa)).collect();
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = ys.iter().sum::<f64>() / m;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
        (icpt, -slope, sse)
    };
    let mut best = (f64::INFINITY, 0.0);
    let mut k = 0.05;
    while k <= 3.0 + 1e-12 {
        let (_, eps, sse) = fit(k);
        if eps > 0.0 && sse < best.0 {
            best = (sse, k);
        }
        k += 0.001;
    }
    let kappa = best.1;
    if kappa == 0.0 {
        return Err(Error::InsufficientRange("spectrum does not decay over the fit window".into()));
    }
    let (icpt, eps, sse) = fit(kappa);
    Ok(DecayFit {
        c: icpt.exp(),
        eps,
        fitted_exponent: kappa,
        model_exponent,
        xi_range: (xi_lo, xi_hi),
        points: pts.len(),
        rms_residual: (sse / pts.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        assert_eq!(phi_mu(-1.0, -0.5), 0.0);
        assert_eq!(phi_mu(-1.0, 1.5), 0.0);
        assert_eq!(phi_mu(-1.0, 0.0), 0.0);
        assert!((phi_mu(-1.0, 0.5) - (-4.0f64).exp()).abs() < 1e-16);
        assert!((phi_mu(-2.0, 0.3) - phi_mu(-2.0, 0.7)).abs() < 1e-16);
        assert_eq!(psi_mu(-1.0, 0.0), 0.0);
        assert_eq!(psi_mu(-1.0, -3.0), 0.0);
    }

    #[test]
    fn ids_round_trip() {
        for id in ["gaussian:sigma=1", "gaussian:sigma=1,m=5", "gevrey:mu=-1", "gevrey:mu=-2,height=1", "window", "window:plateau=0.4", "zero"] {
            let s: FunctionSpec = id.parse().unwrap();
            assert_eq!(s.to_string(), id);
        }
        assert!("nope".parse::<FunctionSpec>().is_err());
        assert!("gevrey:mu=1".parse::<FunctionSpec>().is_err());
        assert!("gaussian:sigma=1,q=2".parse::<FunctionSpec>().is_err());
    }
}

//! R-dependence of the subalgebra constants. Unquantified prefactors are left out.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::gamma::incomplete_gamma_upper;
use crate::error::{Error, Result};
use crate::report::real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    #[serde(rename = "RV_a")]
    RvA,
    #[serde(rename = "RV_b")]
    RvB,
    #[serde(rename = "SV")]
    Sv,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::RvA => "rv-a",
            Variant::RvB => "rv-b",
            Variant::Sv => "sv",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "rv-a" | "rva" => Ok(Variant::RvA),
            "rv-b" | "rvb" => Ok(Variant::RvB),
            "sv" => Ok(Variant::Sv),
            other => Err(Error::InvalidParameter(format!("unknown variant `{other}` (rv-a, rv-b, sv)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstantParams {
    pub variant: Variant,
    pub n: usize,
    #[serde(serialize_with = "real")]
    pub q: f64,
    pub alpha: f64,
    pub s: f64,
    /// `c` for RV_a (must be positive).
    pub c: f64,
    /// `δ` for RV_b, with `alpha - delta > 0`.
    pub delta: f64,
    /// Decay order `N` for SV.
    pub big_n: u32,
}

impl ConstantParams {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            n: 1,
            q: 2.0,
            alpha: 0.5,
            s: 1.0,
            c: 1.0,
            delta: 0.25,
            big_n: 3,
        }
    }

    /// `q' = q/(q-1)`, infinite for `q = 1`.
    pub fn q_prime(&self) -> f64 {
        if self.q == 1.0 {
            f64::INFINITY
        } else if self.q.is_infinite() {
            1.0
        } else {
            self.q / (self.q - 1.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub variant: Variant,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(serialize_with = "real")]
    pub q_prime: f64,
    pub alpha: f64,
    pub s: f64,
    pub c_or_delta: f64,
    pub n: usize,
    /// Lower limit of the incomplete gamma integral (RV variants).
    pub lower_limit: f64,
    /// The tail integral (RV, `q' < ∞`) or the proof's bound `(R-1)^{n/q'-M}` (SV); null when `q' = ∞` for RV.
    #[serde(serialize_with = "real")]
    pub integral_value: f64,
    pub constant: f64,
    /// `M` chosen for SV.
    pub m: Option<u32>,
    pub prefactor_excluded: bool,
}

/// `E_R`/`F_R`-shape constant `Γ(n/α, lower)^{1/q'}` or SV constant `C_N R^{-N}`.
pub fn subalgebra_constant(params: &ConstantParams, r: f64) -> Result<ConstantsReport> {
    if !(r >= 2.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("R = {r} must be >= 2")));
    }
    if !(params.q >= 1.0) {
        return Err(Error::InvalidParameter(format!("q = {} must be >= 1", params.q)));
    }
    if params.n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let qp = params.q_prime();
    let n = params.n as f64;
    let base = ConstantsReport {
        variant: params.variant,
        r,
        q_prime: qp,
        alpha: params.alpha,
        s: params.s,
        c_or_delta: match params.variant {
            Variant::RvA => params.c,
            Variant::RvB => params.delta,
            Variant::Sv => f64::NAN,
        },
        n: params.n,
        lower_limit: 0.0,
        integral_value: f64::NAN,
        constant: f64::NAN,
        m: None,
        prefactor_excluded: true,
    };
    match params.variant {
        Variant::RvA | Variant::RvB => {
            if !(params.alpha > 0.0 && params.alpha < 1.0) {
                return Err(Error::InvalidParameter(format!("alpha = {} must lie in (0, 1)", params.alpha)));
            }
            if !(params.s > 0.0 && params.s <= 1.0) {
                return Err(Error::InvalidParameter(format!("s = {} must lie in (0, 1]", params.s)));
            }
            let exponent = if params.variant == Variant::RvA {
                if !(params.c > 0.0) {
                    return Err(Error::InvalidParameter(format!("c = {} must be positive", params.c)));
                }
                params.alpha
            } else {
                if !(params.alpha - params.delta > 0.0) {
                    return Err(Error::InvalidParameter("RV_b needs alpha - delta > 0".into()));
                }
                params.alpha - params.delta
            };
            let scale = if params.variant == Variant::RvA { params.c } else { 1.0 };
            let beta = n / params.alpha;
            if qp.is_infinite() {
                let lower = params.s * scale * (r - 2.0).powf(exponent);
                Ok(ConstantsReport {
                    lower_limit: lower,
                    constant: (-lower).exp(),
                    ..base
                })
            } else {
                let lower = params.s * qp * scale * (r - 2.0).powf(exponent);
                let integral = incomplete_gamma_upper(beta, lower)?;
                Ok(ConstantsReport {
                    lower_limit: lower,
                    integral_value: integral,
                    constant: integral.powf(1.0 / qp),
                    ..base
                })
            }
        }
        Variant::Sv => {
            let big_n = params.big_n;
            if big_n == 0 {
                return Err(Error::InvalidParameter("N must be at least 1".into()));
            }
            let nq = if qp.is_infinite() { 0.0 } else { n / qp };
            let mut m = (big_n as f64 + nq).ceil() as u32;
            while !(m as f64 * qp > n) {
                m += 1;
            }
            let shift = m as f64 - nq;
            let c_n = 2f64.powf(shift);
            Ok(ConstantsReport {
                integral_value: (r - 1.0).powf(-shift),
                constant: c_n * r.powi(-(big_n as i32)),
                m: Some(m),
                ..base
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rv_a_at_two_is_complete_gamma() {
        let p = ConstantParams::new(Variant::RvA);
        let r = subalgebra_constant(&p, 2.0).unwrap();
        assert!((r.integral_value - 1.0).abs() < 1e-12);
        assert!((r.constant - 1.0).abs() < 1e-12);
        let r4 = subalgebra_constant(&p, 4.0).unwrap();
        let r6 = subalgebra_constant(&p, 6.0).unwrap();
        assert!(r6.constant < r4.constant);
    }

    #[test]
    fn sv_power_law() {
        let p = ConstantParams::new(Variant::Sv);
        let a = subalgebra_constant(&p, 10.0).unwrap().constant;
        let b = subalgebra_constant(&p, 20.0).unwrap().constant;
        assert!((a / b - 8.0).abs() < 1e-12);
        assert!(subalgebra_constant(&p, 1.5).is_err());
    }
}

//! Weight functions `w*` on `[0, ∞)`, their derivatives, and the text form used
//! on the command line.
//!
//! The builtin family is
//! `w*(x) = <x>^{1/s} · Π_j (l_j <x>_*)^{r_j}` where `<x>_m = sqrt(m² + x²)`,
//! `l_1 = log` and `l_{j+1} = log ∘ l_j`. `s = ∞` drops the power factor and leaves
//! a pure iterated-logarithm weight.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Parameters of the builtin family.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinWeightSpec {
    /// Gevrey parameter, `f64::INFINITY` for the slowly varying subfamily.
    pub s: f64,
    /// Exponents of the iterated-log factors.
    pub r: Vec<f64>,
    /// Offset used inside `<x>_*` for the log factors.
    pub shift_star: f64,
}

/// `e↑↑m`, the `m`-fold iterated exponential starting at 1.
pub fn exp_tower(m: usize) -> f64 {
    (0..m).fold(1.0_f64, |v, _| v.exp())
}

impl BuiltinWeightSpec {
    /// Spec with the default offset for `r.len()` log factors.
    pub fn new(s: f64, r: Vec<f64>) -> Self {
        let shift_star = Self::default_star(r.len());
        Self { s, r, shift_star }
    }

    pub fn gevrey(s: f64) -> Self {
        Self::new(s, Vec::new())
    }

    /// `log<x>_{e^e} · loglog<x>_{e^e}`.
    pub fn loglog() -> Self {
        Self::new(f64::INFINITY, vec![1.0, 1.0])
    }

    pub fn with_star(mut self, star: f64) -> Self {
        self.shift_star = star;
        self
    }

    /// Smallest tower value that keeps all `m` log factors at least 1.
    pub fn default_star(m: usize) -> f64 {
        exp_tower(m.max(1))
    }

    /// Checks the admissibility rules; returns a descriptive error otherwise.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWeight(msg));
        if self.s.is_nan() || self.s <= 1.0 {
            return bad(format!(
                "s = {} must exceed 1 (the index 1/s has to stay below 1)",
                self.s
            ));
        }
        if let Some(x) = self.r.iter().find(|x| !x.is_finite()) {
            return bad(format!("log exponent {x} is not finite"));
        }
        if !self.shift_star.is_finite() {
            return bad(format!(
                "offset for {} log factors is not representable; supply star explicitly",
                self.r.len()
            ));
        }
        if self.shift_star < std::f64::consts::E {
            return bad(format!("star = {} must be at least e", self.shift_star));
        }
        let mut l = self.shift_star;
        for j in 1..=self.r.len() {
            l = l.ln();
            if l < 1.0 - 1e-12 {
                return bad(format!(
                    "l_{j}<0>_* = {l} < 1 for star = {}; increase star",
                    self.shift_star
                ));
            }
        }
        if self.s.is_infinite() {
            match self.r.first() {
                None => return bad("s = inf needs at least one log exponent".into()),
                Some(&r1) if r1 > 1.0 => {}
                Some(&r1) if r1 == 1.0 => match self.r[1..].iter().find(|&&x| x != 0.0) {
                    Some(&x) if x > 0.0 => {}
                    _ => {
                        return bad(
                            "with s = inf and r_1 = 1 the first nonzero later exponent must be positive"
                                .into(),
                        )
                    }
                },
                Some(&r1) => {
                    return bad(format!("with s = inf the first exponent must be >= 1, got {r1}"))
                }
            }
        }
        Ok(())
    }

    /// Regular-variation index `1/s`.
    pub fn index(&self) -> f64 {
        if self.s.is_infinite() {
            0.0
        } else {
            1.0 / self.s
        }
    }
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Opaque evaluator for test and control weights.
pub struct CustomEvaluator {
    value: Box<ScalarFn>,
    first: Option<Box<ScalarFn>>,
    second: Option<Box<ScalarFn>>,
}

#[derive(Clone)]
enum Repr {
    Builtin(BuiltinWeightSpec),
    /// `x^a`, exact.
    Power(f64),
    /// `<x>^a`.
    Bracket(f64),
    Custom(Arc<CustomEvaluator>),
}

/// An evaluable weight. Immutable and cheap to clone.
#[derive(Clone)]
pub struct WeightFunction {
    repr: Repr,
    index_alpha: f64,
    label: String,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("label", &self.label)
            .field("index_alpha", &self.index_alpha)
            .finish()
    }
}

/// `ln sqrt(m² + x²)` without overflow.
fn ln_bracket(x: f64, m: f64) -> f64 {
    if x <= m {
        m.ln() + 0.5 * (x / m).powi(2).ln_1p()
    } else {
        x.ln() + 0.5 * (m / x).powi(2).ln_1p()
    }
}

/// `ln <e^y>_m` and its derivative in `y`, stable for huge `|y|`.
fn ln_bracket_log(y: f64, m: f64) -> (f64, f64) {
    let lm = m.ln();
    if y > lm {
        let e = (2.0 * (lm - y)).exp();
        (y + 0.5 * e.ln_1p(), 1.0 / (1.0 + e))
    } else {
        let e = (2.0 * (y - lm)).exp();
        (lm + 0.5 * e.ln_1p(), e / (1.0 + e))
    }
}

impl WeightFunction {
    /// Builds a member of the builtin family.
    pub fn builtin(spec: BuiltinWeightSpec) -> Result<Self> {
        spec.validate()?;
        let index_alpha = spec.index();
        let label = WeightSpec::Family(spec.clone()).to_string();
        Ok(Self {
            repr: Repr::Builtin(spec),
            index_alpha,
            label,
        })
    }

    /// `<x>^{1/s}`.
    pub fn gevrey(s: f64) -> Result<Self> {
        Self::builtin(BuiltinWeightSpec::gevrey(s))
    }

    pub fn loglog() -> Result<Self> {
        Self::builtin(BuiltinWeightSpec::loglog())
    }

    /// The exact power `x^a`. With `a = 1` this is the linear control weight.
    /// `x^a` vanishes at 0, so it is a test evaluator rather than a class member.
    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidWeight(format!("power exponent {a} must be positive")));
        }
        Ok(Self {
            repr: Repr::Power(a),
            index_alpha: a,
            label: WeightSpec::Power(a).to_string(),
        })
    }

    /// `<x>^a`; with `a = 1` this is the index-1 control.
    pub fn bracket(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidWeight(format!("bracket exponent {a} must be positive")));
        }
        Ok(Self {
            repr: Repr::Bracket(a),
            index_alpha: a,
            label: WeightSpec::Bracket(a).to_string(),
        })
    }

    /// Wraps an arbitrary evaluator. Derivatives fall back to finite differences
    /// until supplied through [`WeightFunction::with_derivatives`].
    pub fn custom(
        label: impl Into<String>,
        index_alpha: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            repr: Repr::Custom(Arc::new(CustomEvaluator {
                value: Box::new(value),
                first: None,
                second: None,
            })),
            index_alpha,
            label: label.into(),
        }
    }

    /// Attaches analytic derivatives to a custom evaluator. No effect on other kinds.
    pub fn with_derivatives(
        self,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        match self.repr {
            Repr::Custom(c) => {
                let c = Arc::try_unwrap(c).unwrap_or_else(|shared| CustomEvaluator {
                    value: {
                        let s = shared.clone();
                        Box::new(move |x| (s.value)(x))
                    },
                    first: None,
                    second: None,
                });
                Self {
                    repr: Repr::Custom(Arc::new(CustomEvaluator {
                        value: c.value,
                        first: Some(Box::new(first)),
                        second: Some(Box::new(second)),
                    })),
                    index_alpha: self.index_alpha,
                    label: self.label,
                }
            }
            _ => self,
        }
    }

    pub fn index_alpha(&self) -> f64 {
        self.index_alpha
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        match &self.repr {
            Repr::Custom(c) => c.first.is_some() && c.second.is_some(),
            _ => true,
        }
    }

    /// Canonical text form (or the caller's label for custom evaluators).
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn builtin_spec(&self) -> Option<&BuiltinWeightSpec> {
        match &self.repr {
            Repr::Builtin(s) => Some(s),
            _ => None,
        }
    }

    /// `w*(x)` for `x ≥ 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("weights are evaluated at |k| >= 0, got {x}")));
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation at `|x|`, used in hot loops.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        match &self.repr {
            Repr::Builtin(spec) => {
                let mut v = if spec.s.is_finite() {
                    (ln_bracket(x, 1.0) / spec.s).exp()
                } else {
                    1.0
                };
                let mut l = ln_bracket(x, spec.shift_star);
                for (j, &rj) in spec.r.iter().enumerate() {
                    if j > 0 {
                        l = l.ln();
                    }
                    if rj != 0.0 {
                        v *= l.powf(rj);
                    }
                }
                v
            }
            Repr::Power(a) => x.powf(*a),
            Repr::Bracket(a) => (a * ln_bracket(x, 1.0)).exp(),
            Repr::Custom(c) => (c.value)(x),
        }
    }

    /// Derivative of order 1 or 2 at `x ≥ 0`.
    pub fn derivative(&self, x: f64, order: u8) -> Result<f64> {
        if x.is_nan() || x < 0.0 || x.is_infinite() {
            return Err(Error::Domain(format!("derivative needs finite x >= 0, got {x}")));
        }
        match order {
            1 | 2 => Ok(self.derivative_unchecked(x, order)),
            _ => Err(Error::InvalidParameter(format!("derivative order {order} (expected 1 or 2)"))),
        }
    }

    pub(crate) fn derivative_unchecked(&self, x: f64, order: u8) -> f64 {
        match &self.repr {
            Repr::Builtin(spec) => {
                let (d1, d2) = builtin_derivatives(spec, x);
                let w = self.value(x);
                if order == 1 {
                    w * d1
                } else {
                    w * (d1 * d1 + d2)
                }
            }
            Repr::Power(a) => {
                if order == 1 {
                    a * x.powf(a - 1.0)
                } else {
                    a * (a - 1.0) * x.powf(a - 2.0)
                }
            }
            Repr::Bracket(a) => {
                let w = self.value(x);
                let d1 = a / (x + 1.0 / x);
                let d2 = if x < 1.0 {
                    a * (1.0 - x * x) / (1.0 + x * x).powi(2)
                } else {
                    a * ((1.0 / x - x) / (x + 1.0 / x)) / (x * x + 1.0)
                };
                if order == 1 {
                    w * d1
                } else {
                    w * (d1 * d1 + d2)
                }
            }
            Repr::Custom(c) => {
                let analytic = if order == 1 { &c.first } else { &c.second };
                match analytic {
                    Some(f) => f(x),
                    None => self.finite_difference(x, order),
                }
            }
        }
    }

    /// Central finite differences on the even extension `w*(|x|)`, with one
    /// Richardson step (error `O(h⁴)`).
    pub fn finite_difference(&self, x: f64, order: u8) -> f64 {
        let w = |t: f64| self.value(t.abs());
        let central = |h: f64| {
            if order == 1 {
                (w(x + h) - w(x - h)) / (2.0 * h)
            } else {
                (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h)
            }
        };
        let h = if order == 1 { 1e-3 } else { 1e-2 } * x.max(0.1);
        (4.0 * central(0.5 * h) - central(h)) / 3.0
    }

    /// `w*(x) / x^α`; for `α = 0` this is `w*(x)` itself.
    pub fn slowly_varying_part(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("slowly varying part needs x > 0, got {x}")));
        }
        let w = self.value(x);
        if self.index_alpha == 0.0 {
            Ok(w)
        } else {
            Ok(w / x.powf(self.index_alpha))
        }
    }

    /// `W(y) = w*(e^y)` and `dW/dy`, accurate far beyond the range of `e^y` in f64
    /// for the builtin family.
    pub fn log_domain(&self, y: f64) -> (f64, f64) {
        match &self.repr {
            Repr::Builtin(spec) => {
                let mut lnw = 0.0;
                let mut dlnw = 0.0;
                if spec.s.is_finite() {
                    let (b, db) = ln_bracket_log(y, 1.0);
                    lnw += b / spec.s;
                    dlnw += db / spec.s;
                }
                let (mut l, mut dl) = ln_bracket_log(y, spec.shift_star);
                for (j, &rj) in spec.r.iter().enumerate() {
                    if j > 0 {
                        dl /= l;
                        l = l.ln();
                    }
                    if rj != 0.0 {
                        lnw += rj * l.ln();
                        dlnw += rj * dl / l;
                    }
                }
                let w = lnw.exp();
                (w, w * dlnw)
            }
            Repr::Power(a) => {
                let w = (a * y).exp();
                (w, a * w)
            }
            Repr::Bracket(a) => {
                let (b, db) = ln_bracket_log(y, 1.0);
                let w = (a * b).exp();
                (w, a * w * db)
            }
            Repr::Custom(_) => {
                let x = y.exp();
                (self.value(x), x * self.derivative_unchecked(x, 1))
            }
        }
    }
}

/// Returns `(S1, S2)` with `w' = w S1` and `w'' = w (S1² + S2)`.
fn builtin_derivatives(spec: &BuiltinWeightSpec, x: f64) -> (f64, f64) {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    if spec.s.is_finite() && x > 0.0 {
        let inv = 1.0 / spec.s;
        let t = x + 1.0 / x;
        s1 += inv / t;
        s2 += if x < 1.0 {
            inv * (1.0 - x * x) / (1.0 + x * x).powi(2)
        } else {
            inv * ((1.0 / x - x) / t) / (x * x + 1.0)
        };
    }
    if spec.r.is_empty() {
        return (s1, s2);
    }
    let m = spec.shift_star;
    let u = m.hypot(x);
    // L_1 = ln u and its derivatives.
    let mut l = ln_bracket(x, m);
    let mut dl = (x / u) / u;
    let mut ddl = ((m - x) * (m + x) / u / u) / u / u;
    for &rj in &spec.r {
        // Move to L_{j+1} = ln L_j; the factor's log-derivatives are r_j L_{j+1}', r_j L_{j+1}''.
        let q = dl / l;
        let nd = ddl / l - q * q;
        if rj != 0.0 {
            s1 += rj * q;
            s2 += rj * nd;
        }
        l = l.ln();
        dl = q;
        ddl = nd;
    }
    (s1, s2)
}

/// Parsed form of the weight mini-language.
///
/// ```text
/// gevrey:s=<real>
/// loglog
/// family:s=<real|inf>,r=<r1>,<r2>,...,star=<real>
/// power:a=<real>      (x^a, test evaluator)
/// bracket:a=<real>    (<x>^a)
/// linear              (x)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Family(BuiltinWeightSpec),
    Power(f64),
    Bracket(f64),
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            WeightSpec::Family(s) => WeightFunction::builtin(s.clone()),
            WeightSpec::Power(a) => WeightFunction::power(*a),
            WeightSpec::Bracket(a) => WeightFunction::bracket(*a),
        }
    }
}

fn fmt_real(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Power(a) if *a == 1.0 => write!(f, "linear"),
            WeightSpec::Power(a) => write!(f, "power:a={}", fmt_real(*a)),
            WeightSpec::Bracket(a) => write!(f, "bracket:a={}", fmt_real(*a)),
            WeightSpec::Family(spec) => {
                let default_star = BuiltinWeightSpec::default_star(spec.r.len());
                let star_is_default = spec.shift_star == default_star;
                if spec.r.is_empty() && star_is_default && spec.s.is_finite() {
                    return write!(f, "gevrey:s={}", fmt_real(spec.s));
                }
                if *spec == BuiltinWeightSpec::loglog() {
                    return write!(f, "loglog");
                }
                write!(f, "family:s={}", fmt_real(spec.s))?;
                if !spec.r.is_empty() {
                    let r: Vec<String> = spec.r.iter().map(|x| fmt_real(*x)).collect();
                    write!(f, ",r={}", r.join(","))?;
                }
                if !star_is_default {
                    write!(f, ",star={}", fmt_real(spec.shift_star))?;
                }
                Ok(())
            }
        }
    }
}

fn parse_real(spec: &str, key: &str, v: &str) -> Result<f64> {
    let t = v.trim();
    let parsed = match t {
        "∞" | "+∞" => Ok(f64::INFINITY),
        _ => t.parse::<f64>(),
    };
    parsed.map_err(|_| Error::WeightSpecParse {
        spec: spec.to_string(),
        reason: format!("`{t}` is not a number (key `{key}`)"),
    })
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let err = |reason: String| Error::WeightSpecParse {
            spec: text.to_string(),
            reason,
        };
        let (head, body) = match text.split_once(':') {
            Some((h, b)) => (h.trim(), Some(b)),
            None => (text, None),
        };
        let mut s: Option<f64> = None;
        let mut a: Option<f64> = None;
        let mut r: Option<Vec<f64>> = None;
        let mut star: Option<f64> = None;
        let mut last_key = "";
        if let Some(body) = body {
            for token in body.split(',') {
                let token = token.trim();
                match token.split_once('=') {
                    Some((k, v)) => {
                        let k = k.trim();
                        let v = v.trim();
                        let dup = || err(format!("key `{k}` given twice"));
                        match k {
                            "s" => {
                                if s.replace(parse_real(text, k, v)?).is_some() {
                                    return Err(dup());
                                }
                            }
                            "a" => {
                                if a.replace(parse_real(text, k, v)?).is_some() {
                                    return Err(dup());
                                }
                            }
                            "star" => {
                                if star.replace(parse_real(text, k, v)?).is_some() {
                                    return Err(dup());
                                }
                            }
                            "r" => {
                                let list = if v.is_empty() {
                                    Vec::new()
                                } else {
                                    vec![parse_real(text, k, v)?]
                                };
                                if r.replace(list).is_some() {
                                    return Err(dup());
                                }
                            }
                            _ => return Err(err(format!("unknown key `{k}`"))),
                        }
                        last_key = if k == "r" { "r" } else { "" };
                    }
                    None if last_key == "r" && !token.is_empty() => {
                        let v = parse_real(text, "r", token)?;
                        r.get_or_insert_with(Vec::new).push(v);
                    }
                    None => return Err(err(format!("expected key=value, found `{token}`"))),
                }
            }
        }
        let only = |allowed: &[&str]| -> Result<()> {
            let given = [("s", s.is_some()), ("a", a.is_some()), ("r", r.is_some()), ("star", star.is_some())];
            for (name, present) in given {
                if present && !allowed.contains(&name) {
                    return Err(err(format!("key `{name}` is not valid for `{head}`")));
                }
            }
            Ok(())
        };
        match head {
            "gevrey" => {
                only(&["s"])?;
                let s = s.ok_or_else(|| err("gevrey needs s=<real>".into()))?;
                Ok(WeightSpec::Family(BuiltinWeightSpec::gevrey(s)))
            }
            "loglog" => {
                only(&[])?;
                Ok(WeightSpec::Family(BuiltinWeightSpec::loglog()))
            }
            "family" => {
                only(&["s", "r", "star"])?;
                let s = s.ok_or_else(|| err("family needs s=<real|inf>".into()))?;
                let r = r.unwrap_or_default();
                let mut spec = BuiltinWeightSpec::new(s, r);
                if let Some(star) = star {
                    spec.shift_star = star;
                }
                Ok(WeightSpec::Family(spec))
            }
            "power" => {
                only(&["a"])?;
                Ok(WeightSpec::Power(a.ok_or_else(|| err("power needs a=<real>".into()))?))
            }
            "bracket" => {
                only(&["a"])?;
                Ok(WeightSpec::Bracket(a.ok_or_else(|| err("bracket needs a=<real>".into()))?))
            }
            "linear" => {
                only(&[])?;
                Ok(WeightSpec::Power(1.0))
            }
            other => Err(err(format!("unknown weight family `{other}`"))),
        }
    }
}

/// Parses and builds a weight in one step.
pub fn parse_weight(text: &str) -> Result<WeightFunction> {
    text.parse::<WeightSpec>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_values() {
        let w = WeightFunction::gevrey(2.0).unwrap();
        assert_eq!(w.eval(0.0).unwrap(), 1.0);
        assert!((w.eval(3f64.sqrt()).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let d = w.derivative(1.0, 1).unwrap();
        assert!((d - 2f64.powf(-1.75)).abs() < 1e-15);
        assert_eq!(w.index_alpha(), 0.5);
    }

    #[test]
    fn loglog_at_zero_is_e() {
        let w = WeightFunction::loglog().unwrap();
        assert!((w.eval(0.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(w.index_alpha(), 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(WeightFunction::gevrey(1.0).is_err());
        assert!(WeightFunction::gevrey(0.5).is_err());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(f64::INFINITY, vec![1.0])).is_err());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(f64::INFINITY, vec![1.0, 0.0, -1.0])).is_err());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(f64::INFINITY, vec![0.5])).is_err());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(f64::INFINITY, vec![1.0, 0.0, 2.0])).is_ok());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(f64::INFINITY, vec![1.5])).is_ok());
        assert!(WeightFunction::builtin(BuiltinWeightSpec::new(2.0, vec![1.0, 1.0]).with_star(3.0)).is_err());
    }

    #[test]
    fn domain_errors() {
        let w = WeightFunction::gevrey(2.0).unwrap();
        assert!(w.eval(-1.0).is_err());
        assert!(w.eval(f64::NAN).is_err());
        assert!(w.derivative(1.0, 3).is_err());
    }

    #[test]
    fn builtin_derivatives_match_finite_differences() {
        let specs = [
            "gevrey:s=2",
            "gevrey:s=4",
            "loglog",
            "family:s=3,r=1,-0.5",
            "family:s=inf,r=2",
            "family:s=inf,r=1,0,1",
        ];
        for text in specs {
            let w = parse_weight(text).unwrap();
            for &x in &[0.1, 0.7, 1.0, 3.3, 17.0, 250.0, 1000.0] {
                let a1 = w.derivative(x, 1).unwrap();
                let f1 = w.finite_difference(x, 1);
                assert!((a1 - f1).abs() <= 1e-6 * a1.abs() + 1e-10 * w.value(x), "{text} x={x} {a1} {f1}");
                let a2 = w.derivative(x, 2).unwrap();
                let f2 = w.finite_difference(x, 2);
                let scale = a2.abs().max(w.value(x) / (1.0 + x * x));
                assert!((a2 - f2).abs() <= 1e-5 * scale, "{text} x={x} {a2} {f2}");
            }
        }
    }

    #[test]
    fn log_domain_matches_direct() {
        for text in ["gevrey:s=2", "loglog", "family:s=inf,r=1.5,1", "bracket:a=1", "power:a=0.5"] {
            let w = parse_weight(text).unwrap();
            for &y in &[-3.0, 0.0, 1.0, 5.0, 20.0] {
                let x = f64::exp(y);
                let (big_w, dw) = w.log_domain(y);
                assert!((big_w - w.value(x)).abs() <= 1e-12 * big_w, "{text} {y}");
                let expect = x * w.derivative(x, 1).unwrap();
                assert!((dw - expect).abs() <= 1e-10 * expect.abs().max(1e-300), "{text} {y} {dw} {expect}");
            }
        }
    }

    #[test]
    fn spec_round_trips() {
        for text in [
            "gevrey:s=2",
            "gevrey:s=4",
            "loglog",
            "family:s=inf,r=1,1,star=20",
            "family:s=3.5,r=1,-0.25",
            "family:s=inf,r=1.5",
            "power:a=0.5",
            "bracket:a=1",
            "linear",
        ] {
            let spec: WeightSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert_eq!(spec.to_string().parse::<WeightSpec>().unwrap(), spec);
        }
        let a: WeightSpec = "family:s=inf,r=1,1".parse().unwrap();
        assert_eq!(a.to_string(), "loglog");
        let b: WeightSpec = "family:s=2".parse().unwrap();
        assert_eq!(b.to_string(), "gevrey:s=2");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "gevrey", "gevrey:s=x", "gevrey:t=2", "loglog:s=2", "foo:s=1", "family:r=1", "gevrey:s=2,s=3"] {
            assert!(bad.parse::<WeightSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn slowly_varying_part() {
        let w = WeightFunction::power(0.5).unwrap();
        assert_eq!(w.slowly_varying_part(7.0).unwrap(), 1.0);
        let g = WeightFunction::gevrey(2.0).unwrap();
        assert!((g.slowly_varying_part(1e8).unwrap() - 1.0).abs() < 1e-12);
        let e = std::f64::consts::E;
        let c = WeightFunction::custom("sqrt-log", 0.5, move |x: f64| x.sqrt() * e.hypot(x).ln());
        assert!((c.slowly_varying_part(e).unwrap() - e.hypot(e).ln()).abs() < 1e-14);
    }

    #[test]
    fn custom_falls_back_to_finite_differences() {
        let c = WeightFunction::custom("g2", 0.5, |x: f64| (1.0 + x * x).powf(0.25));
        assert!(!c.has_analytic_derivatives());
        let g = WeightFunction::gevrey(2.0).unwrap();
        let a = g.derivative(5.0, 1).unwrap();
        let f = c.derivative(5.0, 1).unwrap();
        assert!((a - f).abs() < 1e-8 * a);
        let c = c.with_derivatives(|x| x, |_| 1.0);
        assert!(c.has_analytic_derivatives());
        assert_eq!(c.derivative(3.0, 1).unwrap(), 3.0);
    }
}

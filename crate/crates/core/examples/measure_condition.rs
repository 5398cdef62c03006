//! Ratio trend `w(ξ) / (-ln|g(ξ)|)`, the vanishing integral of `F φ_μ`, and the
//! exponential moment for candidate densities.

use modspace::decomposition::Grid;
use modspace::lab::measure::StretchedExponential;
use modspace::lab::{measure_condition_check, MeasureOptions, PhiMuTransform, Variant};
use modspace::WeightFunction;

fn main() -> modspace::Result<()> {
    let opts = MeasureOptions::default();
    let w = WeightFunction::gevrey(4.0)?;
    let g = PhiMuTransform::new(-1.0)?.with_fitted_envelope(&Grid::new(1, 16.0, 32768)?)?;
    let m = measure_condition_check(&g, &w, Variant::RvA, 1e8, &opts)?;
    println!(
        "F phi: ratio monotone {}, last ratio {:.3e}, |integral| {:.1e}, L-moment {:.4e} (certified {})",
        m.monotone_decreasing,
        m.last_ratio,
        m.integral_re.hypot(m.integral_im),
        m.l_integral,
        m.l_certified
    );
    let slow = StretchedExponential { eps: 1.0, kappa: 0.4 };
    let m = measure_condition_check(&slow, &WeightFunction::gevrey(2.0)?, Variant::RvA, 1e8, &opts)?;
    println!("exp(-|xi|^0.4) against gevrey:s=2: ratio monotone {}", m.monotone_decreasing);
    Ok(())
}

//! Fit `|F f(ξ)| ≈ c e^{-eps |ξ|^κ}` for Gevrey bumps and a Gaussian.

use modspace::corpus::{fourier_decay_fit, gevrey_order, FunctionSpec};
use modspace::decomposition::Grid;

fn main() -> modspace::Result<()> {
    let grid = Grid::new(1, 16.0, 32768)?;
    for mu in [-1.0, -2.0, -0.5] {
        let fit = fourier_decay_fit(&FunctionSpec::bump(mu).sample(&grid)?, 1.0 / gevrey_order(mu))?;
        println!(
            "bump mu = {mu:>4}: kappa {:.4} (model {:.4}), eps {:.3}, window [{:.0}, {:.0}]",
            fit.fitted_exponent, fit.model_exponent, fit.eps, fit.xi_range.0, fit.xi_range.1
        );
    }
    let g = fourier_decay_fit(&FunctionSpec::gaussian(1.0).sample(&grid)?, 2.0)?;
    println!("gaussian: kappa {:.4}", g.fitted_exponent);
    Ok(())
}

//! Growth of `λ ↦ ‖e^{iλu} - 1‖` for a real bump `u`, and the continuity moduli
//! of the exponential map.

use modspace::corpus::FunctionSpec;
use modspace::decomposition::Grid;
use modspace::lab::{exp_map_continuity, superposition_growth, LabSettings, SuperpositionOptions};
use modspace::WeightFunction;

fn main() -> modspace::Result<()> {
    let grid = Grid::new(1, 16.0, 32768)?;
    let spec = FunctionSpec::unit_bump(-1.0);
    let u = spec.sample(&grid)?;
    let settings = LabSettings::new(WeightFunction::gevrey(2.0)?, 1200);
    let id = spec.to_string();

    let r = superposition_growth(&u, &id, &settings, &SuperpositionOptions::default())?;
    for ((l, n), c) in r.lambdas.iter().zip(&r.norms).zip(&r.certified) {
        println!("lambda {l:>5}: {n:.6e}  certified {c}");
    }
    println!("ln ln-slope {:.4}, excess exponent {:.4}", r.fitted_exponent, r.excess_exponent);

    let c = exp_map_continuity(&u, &id, &settings, 2.0, 1.0, 1.0, &[0.1, 0.05, 0.025, 0.0125])?;
    for (d, k) in c.deltas.iter().zip(&c.constants) {
        println!("delta {d:<7} modulus / delta = {k:.4}");
    }
    Ok(())
}

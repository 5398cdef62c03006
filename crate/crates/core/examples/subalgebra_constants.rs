//! Constants of the scale-dependent subalgebra estimates as `R` grows.

use modspace::lab::{subalgebra_constant, ConstantParams, Variant};

fn main() -> modspace::Result<()> {
    for variant in [Variant::RvA, Variant::RvB, Variant::Sv] {
        let params = ConstantParams::new(variant);
        println!("{variant} (q' = {})", params.q_prime());
        for r in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let c = subalgebra_constant(&params, r)?;
            println!("  R = {r:>4}: constant {:.6e}, integral {:.6e}", c.constant, c.integral_value);
        }
    }
    Ok(())
}

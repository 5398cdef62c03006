//! Grid, transform round trip, the smooth partition of unity, and one piece of
//! the frequency-uniform decomposition.

use modspace::corpus::FunctionSpec;
use modspace::decomposition::{forward_transform, inverse_transform, partition_properties, BoxDecomposer, Grid, Partition};

fn main() -> modspace::Result<()> {
    let grid = Grid::new(1, 16.0, 4096)?;
    println!("dx = {:.5}, dxi = {:.5}, max |xi| = {:.1}", grid.dx(), grid.dxi(), grid.max_frequency());

    let f = FunctionSpec::gaussian(1.0).sample(&grid)?;
    let back = inverse_transform(&forward_transform(&f)?)?;
    let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round-trip error {err:.2e}");

    let part = Partition::default();
    let props = partition_properties(&part, &grid, 20);
    println!(
        "partition: sum deviation {:.1e}, half-cube lower bound {:.3}, derivative bounds {:?}",
        props.max_sum_deviation, props.half_cube_lower_bound, props.derivative_bounds
    );

    let dec = BoxDecomposer::new(&f, part)?;
    for k in [0, 1, 2, 3] {
        let piece = dec.piece(&[k])?;
        println!("  box_{k} f: sup {:.3e}", piece.sup_norm());
    }
    Ok(())
}

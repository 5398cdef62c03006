//! Search for `s > 0` with `w(x + y) <= w(x) + w(y) - s w(min(x, y))` past the
//! threshold, then re-verify on a finer grid.

use modspace::class::{compute_x_tilde, find_subadditivity_s, verify_subadditivity, SubadditivitySearch};
use modspace::WeightFunction;

fn main() -> modspace::Result<()> {
    for w in [WeightFunction::gevrey(2.0)?, WeightFunction::gevrey(4.0)?, WeightFunction::loglog()?] {
        let x_tilde = compute_x_tilde(&w)?.x_tilde;
        match find_subadditivity_s(&w, x_tilde, 200.0, 0.25)? {
            SubadditivitySearch::Certified(cert) => {
                let check = verify_subadditivity(&w, &cert, 200.0)?;
                println!("{}: x~ = {x_tilde:.3}, s = {}, clean re-check: {}", w.label(), cert.s, check.is_clean());
            }
            SubadditivitySearch::Failed(f) => println!("{}: no s found, worst point ({}, {})", w.label(), f.x, f.y),
        }
    }
    Ok(())
}

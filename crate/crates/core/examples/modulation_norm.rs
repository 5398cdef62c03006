//! Weighted modulation norms `‖f‖_{M^{p,q}_w}` with tail certificates, and the
//! embedding ratios between neighbouring exponents.

use modspace::corpus::FunctionSpec;
use modspace::decomposition::Grid;
use modspace::norm::{embedding_check, modulation_norm, NormParams};
use modspace::WeightFunction;

fn main() -> modspace::Result<()> {
    let grid = Grid::new(1, 32.0, 8192)?;
    let w = WeightFunction::gevrey(2.0)?;
    let f = FunctionSpec::gaussian(1.0).sample(&grid)?;
    for (p, q) in [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (f64::INFINITY, 1.0)] {
        let r = modulation_norm(&f, &NormParams::new(w.clone(), p, q).with_k_max(100))?;
        println!(
            "p = {p:>3}, q = {q:>3}: {:.10} (tail {:.1e}, certified {})",
            r.value, r.tail_estimate, r.certified
        );
    }
    let base = NormParams::new(w.clone(), 2.0, 1.0).with_k_max(100);
    let pairs = [((2.0, 1.0), (2.0, 2.0)), ((1.0, 1.0), (2.0, 1.0))];
    for row in embedding_check(&f, &w, &pairs, &base)? {
        println!("‖f‖_({}, {}) / ‖f‖_({}, {}) = {:.4}", row.p, row.q, row.p0, row.q0, row.ratio);
    }
    Ok(())
}

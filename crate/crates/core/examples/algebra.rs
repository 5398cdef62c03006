//! Product ratios `‖fg‖_{p,q} / (‖f‖_{p1,q} ‖g‖_{p2,q})` over the standard corpus.
//!
//! The default grid is coarser than the acceptance setup, so some norms may not
//! carry a tail certificate.

use modspace::corpus::standard_corpus;
use modspace::decomposition::Grid;
use modspace::lab::{algebra_report, LabSettings};
use modspace::WeightFunction;

fn main() -> modspace::Result<()> {
    let grid = Grid::new(1, 32.0, 16384)?;
    let settings = LabSettings::new(WeightFunction::gevrey(4.0)?, 600);
    let report = algebra_report(&standard_corpus(), &grid, 2.0, 2.0, 1.0, &settings)?;
    for e in &report.entries {
        println!("{:<28} x {:<28} {:.6}  certified {}", e.f_id, e.g_id, e.ratio, e.certified);
    }
    println!("max {:.6}, median {:.6}, bounded (x10): {}", report.max_ratio, report.median_ratio, report.bounded(10.0));
    Ok(())
}

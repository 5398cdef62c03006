//! The associated sequence `M_p = sup_r r^p e^{-w(r)}` of a weight, with its
//! log-convexity and growth constant `H`.

use modspace::sequence::{associated_sequence, check_log_convexity, check_lower_bound};
use modspace::weight::parse_weight;

fn main() -> modspace::Result<()> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "gevrey:s=2".into());
    let w = parse_weight(&spec)?;
    let seq = associated_sequence(&w, 30)?;
    println!("weight {spec}, H = {:.4}, sup cap hit: {}", seq.h, seq.cap_hit);
    for (p, l) in seq.log_values.iter().enumerate().step_by(5) {
        println!("  p = {p:>2}  ln M_p = {l:>12.4}");
    }
    println!("log-convexity violations: {:?}", check_log_convexity(&seq));
    println!("lower bound: {:?}", check_lower_bound(&seq));
    seq.write_csv(std::io::stdout().lock())?;
    Ok(())
}

//! Classify a few weights against the structural conditions.
//!
//! `cargo run --release --example weight_class -- gevrey:s=2 loglog power:a=0.5`

use modspace::class::{check_conditions, GridSpec1D};
use modspace::WeightSpec;

fn main() -> modspace::Result<()> {
    let mut specs: Vec<String> = std::env::args().skip(1).collect();
    if specs.is_empty() {
        specs = vec!["gevrey:s=2".into(), "loglog".into(), "family:s=3,r=1".into(), "linear".into()];
    }
    for text in specs {
        let w = text.parse::<WeightSpec>()?.build()?;
        let report = check_conditions(&w, &GridSpec1D::default())?;
        println!("{} (index estimate {:.4}, subclass {:?})", w.label(), report.alpha_estimate, report.subclass);
        for (name, verdict) in &report.verdicts {
            println!("  {name:<24} {verdict:?}");
        }
    }
    Ok(())
}

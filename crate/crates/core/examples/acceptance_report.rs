//! Run acceptance criteria by id (all of them when no ids are given).
//!
//! `cargo run --release --example acceptance_report -- 1 2 9`

use modspace::checks::{run_all, run_check};

fn main() -> modspace::Result<()> {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ids.is_empty() {
        let bundle = run_all();
        for o in &bundle.checks {
            println!("{}", o.line());
        }
        println!("{} passed, {} failed", bundle.passed, bundle.failed);
    } else {
        for id in ids {
            let o = run_check(id)?;
            println!("{}  ({:.1} s)", o.line(), o.seconds);
        }
    }
    Ok(())
}

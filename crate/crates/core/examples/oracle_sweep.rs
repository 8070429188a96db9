//! Exhaustive cross-check of the optimized maximal-step enumeration against
//! the brute-force oracle on every tiny membrane system and net, plus the
//! zero-delay comparison with untimed rewriting.

use std::time::Instant;

use membrane_nets::verify::sweep::{enumeration_sweep, zero_delay_sweep, SweepBounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SweepBounds::default();
    let started = Instant::now();
    let r = enumeration_sweep(&bounds)?;
    println!(
        "enumeration: {} models, {} instances, {} mismatches ({:.1?})",
        r.models,
        r.instances,
        r.mismatch_count,
        started.elapsed()
    );
    let started = Instant::now();
    let z = zero_delay_sweep(&bounds);
    println!(
        "zero delays: {} models, {} steps, {} mismatches ({:.1?})",
        z.models,
        z.instances,
        z.mismatch_count,
        started.elapsed()
    );
    for m in r.mismatches.iter().chain(&z.mismatches) {
        println!("  {m}");
    }
    Ok(())
}

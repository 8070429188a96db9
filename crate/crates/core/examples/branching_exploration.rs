//! Explores every run of a system with a choice of maximal steps: three
//! copies of `a` can be consumed as `r^3` or as `r r_prime`. Prints the
//! reachable configurations per depth and one seeded run.

use membrane_nets::explore::{self, DEFAULT_BUDGET};
use membrane_nets::samples;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = samples::branching_system();
    let c0 = sys.initial_configuration();
    for choice in sys.enumerate_maximal(&c0) {
        println!("maximal step {}", choice.display(&sys));
    }
    let graph = explore::explore(&sys, 2, DEFAULT_BUDGET)?;
    for d in 0..=graph.max_depth() {
        let states: Vec<String> = graph.at_depth(d).map(|c| c.display(sys.alphabet()).to_string()).collect();
        println!("depth {d}: {}", states.join("  "));
    }
    let run = explore::trace(&sys, 2, Some(42))?;
    println!("seed 42 ends in {}", run.last().display(sys.alphabet()));
    Ok(())
}

//! Runs the two-membrane timed system for three ticks with the canonical
//! policy and prints each configuration with the step that produced it.

use membrane_nets::explore;
use membrane_nets::samples;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = samples::two_membrane_system();
    let trace = explore::trace(&sys, 3, None)?;
    for (k, c) in trace.states.iter().enumerate() {
        match k.checked_sub(1) {
            Some(i) => println!("{}  via {}", c.display(sys.alphabet()), trace.choices[i].display(&sys)),
            None => println!("{}", c.display(sys.alphabet())),
        }
    }
    let last = trace.last();
    println!("environment: {}", last.environment.display(sys.alphabet()));
    println!("halted: {}", sys.is_halted(last));
    Ok(())
}

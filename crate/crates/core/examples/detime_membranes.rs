//! Removes the execution times from the two-membrane system by staging
//! delayed products through fresh objects, then runs both versions side by
//! side and shows that their contents agree on the original objects.

use membrane_nets::dsl;
use membrane_nets::explore;
use membrane_nets::samples;
use membrane_nets::translate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = samples::two_membrane_system();
    let detimed = translate::detime_psystem(&sys)?;
    print!("{}", dsl::print_psystem(&detimed.system));

    let timed = explore::trace(&sys, 3, None)?;
    let untimed = explore::trace(&detimed.system, 3, None)?;
    for (t, u) in timed.states.iter().zip(&untimed.states) {
        let projected = detimed.project(&u.contents);
        println!(
            "{:<22} {:<28} projections equal: {}",
            t.display(sys.alphabet()).to_string(),
            u.display(detimed.system.alphabet()).to_string(),
            projected == t.contents
        );
    }
    Ok(())
}

//! Replaces every delayed transition of the timed net by a chain of
//! untimed waiting places and forwarding transitions, then compares the
//! markings of both nets on the original places.

use membrane_nets::dsl;
use membrane_nets::explore;
use membrane_nets::samples;
use membrane_nets::translate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = samples::two_membrane_net();
    let detimed = translate::detime_petri(&net)?;
    print!("{}", dsl::print_petri(&detimed.net));

    let timed = explore::trace(&net, 4, None)?;
    let untimed = explore::trace(&detimed.net, 4, None)?;
    for (t, u) in timed.states.iter().zip(&untimed.states) {
        println!(
            "gc={} timed {:?} untimed {:?} projection {:?}",
            t.gc,
            t.marking,
            u.marking,
            detimed.project(&u.marking)
        );
    }
    Ok(())
}

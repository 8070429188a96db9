//! Builds the timed net of a membrane system (one place per object and
//! membrane, one transition per rule) and prints it as DSL text, as a DOT
//! graph and as a correspondence map.

use membrane_nets::json::NetTranslationMap;
use membrane_nets::{dsl, petri, samples, translate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = samples::two_membrane_system();
    let tr = translate::psystem_to_petri(&sys)?;
    print!("{}", dsl::print_petri(&tr.net));
    print!("{}", petri::to_dot(&tr.net, tr.net.initial_marking()));
    println!("{}", serde_json::to_string_pretty(&NetTranslationMap::new(&sys, &tr))?);

    // A step of the system and the image step of the net land on
    // corresponding states.
    let c0 = sys.initial_configuration();
    let step = &sys.enumerate_maximal(&c0)[0];
    let c1 = sys.apply_step(&c0, step)?;
    let m1 = tr.net.fire(&tr.state_of(&c0), &tr.firing_of(step))?;
    println!("corresponding after one step: {}", tr.state_of(&c1) == m1);
    Ok(())
}

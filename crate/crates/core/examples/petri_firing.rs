//! Fires the timed net with localities step by step, showing tokens in
//! transit next to the visible marking.

use membrane_nets::explore;
use membrane_nets::samples;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = samples::two_membrane_net();
    let names = net.places();
    let trace = explore::trace(&net, 4, None)?;
    for (k, s) in trace.states.iter().enumerate() {
        let marking: Vec<String> = names.iter().zip(&s.marking).map(|(p, n)| format!("{p}={n}")).collect();
        let pending: Vec<String> = s
            .pending
            .iter()
            .enumerate()
            .flat_map(|(p, by_delay)| by_delay.iter().map(move |(d, n)| format!("{}:{n}@{d}", names[p])))
            .collect();
        let step = k.checked_sub(1).map(|i| trace.choices[i].display(&net).to_string()).unwrap_or_default();
        println!("gc={} [{}] in transit [{}] {step}", s.gc, marking.join(" "), pending.join(" "));
    }
    Ok(())
}

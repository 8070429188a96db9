//! Checks the three simulation properties on the worked example and on a
//! batch of seeded random models, printing one verdict line per check.

use membrane_nets::explore::DEFAULT_BUDGET;
use membrane_nets::samples;
use membrane_nets::verify::{self, random, NetParams, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = samples::two_membrane_system();
    let net = samples::two_membrane_net();
    for v in [
        verify::check_prop1(&sys, 3, DEFAULT_BUDGET)?,
        verify::check_prop2(&net, 3, DEFAULT_BUDGET)?,
        verify::check_prop3(&sys, 3, DEFAULT_BUDGET)?,
    ] {
        println!("{}", serde_json::to_string(&v)?);
    }

    let (mut ok, mut states) = (0, 0);
    for seed in 0..20 {
        let mut rng = random::rng(seed);
        let s = verify::random_system(&mut rng, &SystemParams::default());
        let n = verify::random_net(&mut rng, &NetParams::default());
        for v in [
            verify::check_prop1(&s, 5, DEFAULT_BUDGET)?,
            verify::check_prop2(&n, 5, DEFAULT_BUDGET)?,
            verify::check_prop3(&s, 5, DEFAULT_BUDGET)?,
        ] {
            ok += usize::from(v.ok);
            states += v.states_explored;
        }
    }
    println!("random: {ok}/60 checks ok, {states} states explored");
    Ok(())
}

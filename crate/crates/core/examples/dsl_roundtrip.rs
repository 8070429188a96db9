//! Parses a model written by hand, prints it canonically, parses that
//! again, and shows the JSON form and a parse error with its location.

use membrane_nets::dsl;
use membrane_nets::json::PSystemJson;

const SOURCE: &str = "
# comments and factor order are free-form
psystem {
  alphabet a b;
  membrane 1 {
    contents b a;
    rule r1: b -> (b, in 2);
    membrane 2 { contents a a b; rule r2: a -> (a, out) @2; }
  }
}";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = dsl::parse_psystem(SOURCE)?;
    let canonical = dsl::print_psystem(&sys);
    print!("{canonical}");
    assert_eq!(dsl::parse_psystem(&canonical)?, sys);
    println!("{}", serde_json::to_string_pretty(&PSystemJson::from_model(&sys))?);

    match dsl::parse_petri("petri { place p; transition t @1 loc=2; p -0-> t; }") {
        Err(e) => println!("{e}"),
        Ok(_) => unreachable!("zero weights are rejected"),
    }
    Ok(())
}

//! Timed membrane systems and timed Petri nets with localities: step
//! semantics, time-removing translations, the system-to-net translation,
//! bounded exploration and checks that the translations simulate their
//! sources. Start with the programs under `examples/`.

pub mod cli;
pub mod dsl;
pub mod explore;
pub mod json;
pub mod multiset;
pub mod petri;
pub mod psystem;
pub mod samples;
pub mod translate;
pub mod verify;

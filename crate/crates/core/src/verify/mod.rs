//! Bounded mechanical checks of the translations, the brute-force maximality
//! oracles they are tested against, and seeded instance generators.

pub mod checks;
pub mod oracle;
pub mod random;
pub mod sweep;

pub use checks::{check_prop1, check_prop2, check_prop3, Counterexample, Verdict, VerifyError};
pub use oracle::{oracle_maximal_petri, oracle_maximal_psystem, OracleError, ORACLE_CAP};
pub use random::{random_net, random_system, NetParams, SystemParams};
pub use sweep::{enumeration_sweep, zero_delay_sweep, SweepBounds, SweepReport};

//! Concrete components.

mod machine;
mod pi_line;
mod pq_source;
mod rl_load;

pub use machine::{Machine, MachineCircuit, MachineParams};
pub use pi_line::{PiLine, PiLineParams};
pub use pq_source::{PqSource, PqSourceParams, VOLTAGE_FLOOR};
pub use rl_load::{RlLoad, RlLoadParams};

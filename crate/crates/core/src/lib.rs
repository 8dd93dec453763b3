//! Energy-dynamics simulation of small power networks.
//!
//! Generators, transmission lines and loads are all ODE components with
//! ports. The network keeps every bus voltage as a capacitor state, so the
//! assembled model is a plain ODE in a synchronously rotating dq frame.
//! On top of the trajectories this crate evaluates per-component energy
//! quantities (stored energy, dissipation, time constant, tangent energy,
//! port power and reactive-power rate), network-wide Tellegen sums and the
//! loadability / dissipativity bounds built from them.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]
// `!(x > 0.0)` style checks are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod component;
pub mod components;
pub mod energy;
mod error;
pub mod linalg;
pub mod network;
pub mod port;
pub mod sim;
pub mod units;

pub use component::{Component, Ctx, Drive, Role};
pub use error::Error;
pub use network::{CompositeSystem, Topology};
pub use port::{PortVariables, C64};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

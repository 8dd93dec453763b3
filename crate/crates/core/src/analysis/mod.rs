//! Loadability and dissipativity bounds, stability classification, PV
//! sweeps and spectra.

pub mod dissipativity;
pub mod pv;
pub mod spectrum;
pub mod stability;

pub use dissipativity::{
    dissipativity_margin, loadability_bound, loadability_delta_bound, loadability_row,
    sdot_boundary_form, storage_rate, supply_rate, BoundaryDelta, LoadabilityRow,
};
pub use pv::{label_branches, max_power, pv_sweep, Branch, MaxPower, PvPoint};
pub use spectrum::{in_band_fraction, SpectrumReport};
pub use stability::{classify_stability, Stability, StabilityCriterion};

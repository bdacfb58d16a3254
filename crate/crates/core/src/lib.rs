//! Wave-optics simulation of two coherent beams crossing a thin wire grid.
//!
//! The library computes, from first principles, the far-field diffraction
//! of a slit grid and its Babinet-complementary wire grid, balances the
//! photon budget through energy conservation, and derives the which-way /
//! visibility complementarity figures for the configuration where one wire
//! sits in every dark fringe of the two-beam interference pattern.
//!
//! Modules:
//! - [`experiment`]: geometry, derived wave parameters, validation.
//! - [`numerics`]: adaptive quadrature and disc-geometry areas.
//! - [`diffraction`]: grating function, two-beam slit field (numeric and
//!   closed form), Babinet transformation, sampled profiles.
//! - [`ledger`]: energy-conservation photon bookkeeping.
//! - [`complementarity`]: photon budget, which-way parameter, visibility
//!   lower bound, duality value.
//! - [`reference`]: published constants with verification tolerances.
//! - [`scenario`]: the JSON configuration consumed by the CLI.

pub mod complementarity;
pub mod diffraction;
pub mod error;
pub mod experiment;
pub mod ledger;
pub mod numerics;
pub mod reference;
pub mod scenario;

pub use complementarity::{
    complementarity_report, duality_value, photon_budget, squarewave_profile,
    visibility_lower_bound, which_way_parameter, ComplementarityReport, PhotonBudget,
    VisibilityBound,
};
pub use diffraction::{
    babinet_wire_profile, grating_pattern, normalize_single_beam, sample_fraction_profile,
    two_beam_slit_field_numeric, two_beam_slit_intensity_closed, AngularIntensityProfile,
    Normalization, Provenance,
};
pub use error::{Error, Result};
pub use experiment::{
    dark_fringe_positions, effective_amplitude, validate, DerivedParams, DetectorBank,
    OpticalSetup, Placement, WireGrid,
};
pub use ledger::{
    solve_single_beam_ledger, solve_two_beam_ledger, wire_loss_single_beam, wire_loss_two_beam,
    AmplitudeModel, EnergyLedger, ScenarioKind,
};
pub use numerics::{integrate, QuadratureSpec, StripModel};
pub use reference::{reference_table, EntryKind, ReferenceConstant, Tolerance};
pub use scenario::Scenario;

/// Round to `digits` significant digits. Used when serializing percentages
/// and fixed-precision outputs; all internal arithmetic keeps full
/// precision.
pub fn round_significant(value: f64, digits: u32) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let magnitude = value.abs().log10().floor();
    let scale = 10f64.powf(digits as f64 - 1.0 - magnitude);
    (value * scale).round() / scale
}

/// Deterministic 9-significant-digit float formatting for CSV output.
/// Always uses `.` as the decimal separator.
pub fn format_float(value: f64) -> String {
    format!("{value:.8e}")
}

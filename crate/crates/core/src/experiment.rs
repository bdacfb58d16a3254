//! Experiment geometry, derived wave parameters, and configuration
//! validation. Every other module consumes these types; all of them are
//! immutable after validation and safe to share across threads.

use crate::error::{ConfigViolation, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Fractional pitch mismatch tolerated when wires are meant to sit on the
/// dark-fringe lattice of the two-beam interference pattern.
pub const PITCH_MATCH_TOLERANCE: f64 = 1e-3;

/// Where the wire (or complementary slit) grid sits relative to the beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// Single illuminating beam, grid centered on the beam axis.
    SingleBeamCentered,
    /// Two symmetric beams, one wire per dark fringe of their interference
    /// pattern.
    AtDarkFringes,
}

/// Beam and detection geometry.
///
/// All lengths are in meters and all angles in radians. `field_amplitude`
/// is the unperturbed beam field in arbitrary units; every reported
/// quantity is a ratio, so its value never matters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OpticalSetup {
    pub wavelength: f64,
    /// Tilt of each beam from the z-axis.
    pub beam_half_angle: f64,
    /// The beam cross-section is a uniform circular disc of this diameter.
    pub beam_diameter: f64,
    pub grid_to_detector_distance: f64,
    /// Angular half-extent of the detection region.
    pub detection_half_angle: f64,
    /// Angular half-width of each detector aperture.
    pub detector_half_angle: f64,
    pub field_amplitude: f64,
}

impl OpticalSetup {
    pub fn beam_radius(&self) -> f64 {
        0.5 * self.beam_diameter
    }

    pub fn disc_area(&self) -> f64 {
        crate::numerics::disc_area(self.beam_diameter)
    }
}

/// The diffracting grid: `count` parallel wires (or complementary slits) of
/// `thickness` at center-to-center `pitch`, both in meters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WireGrid {
    pub count: u32,
    pub thickness: f64,
    pub pitch: f64,
    pub placement: Placement,
}

impl WireGrid {
    /// Phase half-span across one slit per unit sin(theta).
    pub fn slit_half_phase(&self, wave_number: f64) -> f64 {
        0.5 * wave_number * self.thickness
    }

    /// Phase half-span across one pitch per unit sin(theta).
    pub fn pitch_half_phase(&self, wave_number: f64) -> f64 {
        0.5 * wave_number * self.pitch
    }

    /// y-coordinates of the wire centers, sorted ascending.
    ///
    /// `SingleBeamCentered` spaces the wires symmetrically about the beam
    /// axis at the configured pitch. `AtDarkFringes` puts them on the
    /// half-integer pitch lattice (k + 1/2) * pitch covering the innermost
    /// dark fringes; validation guarantees the pitch matches the fringe
    /// spacing, and the pitch lattice is the grid the field evaluators
    /// describe. For odd counts the leftover fringe is taken on the
    /// positive side.
    pub fn wire_centers(&self) -> Vec<f64> {
        let n = self.count as i64;
        match self.placement {
            Placement::SingleBeamCentered => (0..n)
                .map(|j| (j as f64 - (n as f64 - 1.0) / 2.0) * self.pitch)
                .collect(),
            Placement::AtDarkFringes => {
                let first = -(n / 2);
                (first..first + n)
                    .map(|k| (k as f64 + 0.5) * self.pitch)
                    .collect()
            }
        }
    }
}

/// Wave parameters derived from a validated configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivedParams {
    /// 2 pi / wavelength, in rad/m.
    pub wave_number: f64,
    /// Transverse wave number of either beam, wave_number * sin(beam tilt).
    pub transverse_wave_number: f64,
    /// Half-thickness phase coefficient, wave_number * thickness / 2.
    pub slit_half_phase: f64,
    /// Half-pitch phase coefficient, wave_number * pitch / 2.
    pub pitch_half_phase: f64,
}

impl DerivedParams {
    /// Spacing between adjacent dark fringes of the two-beam pattern.
    pub fn fringe_spacing(&self) -> f64 {
        PI / self.transverse_wave_number
    }

    /// Center of dark fringe `n`: y_n = (2n + 1) pi / (2 k_y).
    pub fn dark_fringe_position(&self, n: i64) -> f64 {
        (2.0 * n as f64 + 1.0) * PI / (2.0 * self.transverse_wave_number)
    }
}

/// Validate a configuration, reporting every violated invariant.
///
/// On success returns the derived parameter bundle. Validation is pure:
/// the same inputs always produce the same diagnostics.
// `!(x > 0)` rather than `x <= 0` so NaN inputs fail validation too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate(setup: &OpticalSetup, grid: &WireGrid) -> Result<DerivedParams> {
    let mut violations = Vec::new();

    if !(setup.wavelength > 0.0) {
        violations.push(ConfigViolation::new("wavelength", "must be positive"));
    }
    if !(setup.beam_diameter > 0.0) {
        violations.push(ConfigViolation::new("beam_diameter", "must be positive"));
    }
    if !(setup.grid_to_detector_distance > 0.0) {
        violations.push(ConfigViolation::new(
            "grid_to_detector_distance",
            "must be positive",
        ));
    }
    if !(setup.beam_half_angle > 0.0) {
        violations.push(ConfigViolation::new("beam_half_angle", "must be positive"));
    }
    if setup.beam_half_angle >= setup.detection_half_angle {
        violations.push(ConfigViolation::new(
            "beam_half_angle",
            format!(
                "must be smaller than the detection half-angle ({} >= {})",
                setup.beam_half_angle, setup.detection_half_angle
            ),
        ));
    }
    if setup.detector_half_angle >= setup.beam_half_angle {
        violations.push(ConfigViolation::new(
            "detector_half_angle",
            format!(
                "detector apertures at the two beam angles must not overlap: \
                 half-width {} must be smaller than the beam tilt {}",
                setup.detector_half_angle, setup.beam_half_angle
            ),
        ));
    }
    if !(setup.detector_half_angle > 0.0) {
        violations.push(ConfigViolation::new(
            "detector_half_angle",
            "must be positive",
        ));
    }
    if grid.count < 1 {
        violations.push(ConfigViolation::new("grid.count", "must be at least 1"));
    }
    if !(grid.thickness > 0.0) {
        violations.push(ConfigViolation::new("grid.thickness", "must be positive"));
    }
    if grid.thickness >= grid.pitch {
        violations.push(ConfigViolation::new(
            "grid.thickness",
            "thickness must be strictly less than pitch",
        ));
    }

    // Derived parameters are well defined only for positive inputs; compute
    // them from the raw fields so the fringe check can run when possible.
    let wave_number = 2.0 * PI / setup.wavelength;
    let transverse_wave_number = wave_number * setup.beam_half_angle.sin();

    if grid.placement == Placement::AtDarkFringes
        && setup.wavelength > 0.0
        && setup.beam_half_angle > 0.0
        && grid.pitch > 0.0
    {
        let fringe_spacing = PI / transverse_wave_number;
        let mismatch = (fringe_spacing - grid.pitch).abs() / grid.pitch;
        if mismatch >= PITCH_MATCH_TOLERANCE {
            violations.push(ConfigViolation::new(
                "grid.pitch",
                format!(
                    "pitch/fringe mismatch: wire pitch must equal the fringe spacing \
                     ({:.6e} m vs pitch {:.6e} m, relative mismatch {:.3e})",
                    fringe_spacing, grid.pitch, mismatch
                ),
            ));
        }
    }

    if !violations.is_empty() {
        return Err(Error::InvalidConfig(violations));
    }

    Ok(DerivedParams {
        wave_number,
        transverse_wave_number,
        slit_half_phase: grid.slit_half_phase(wave_number),
        pitch_half_phase: grid.pitch_half_phase(wave_number),
    })
}

/// Dark-fringe y-coordinates for every integer index in `range`, sorted
/// ascending.
pub fn dark_fringe_positions(
    derived: &DerivedParams,
    range: std::ops::RangeInclusive<i64>,
) -> Vec<f64> {
    range.map(|n| derived.dark_fringe_position(n)).collect()
}

/// Stationary transverse envelope of the two superposed beams at the grid
/// plane: 2 E0 cos(k_y y).
pub fn effective_amplitude(setup: &OpticalSetup, derived: &DerivedParams, y: f64) -> f64 {
    2.0 * setup.field_amplitude * (derived.transverse_wave_number * y).cos()
}

/// Linearized effective amplitude about dark fringe `n`, at signed distance
/// `u` from the fringe center. The slope alternates from fringe to fringe.
pub fn effective_amplitude_linearized(
    setup: &OpticalSetup,
    derived: &DerivedParams,
    fringe_index: i64,
    u: f64,
) -> f64 {
    let sign = if fringe_index.rem_euclid(2) == 0 {
        -1.0
    } else {
        1.0
    };
    sign * 2.0 * setup.field_amplitude * derived.transverse_wave_number * u
}

/// One detector aperture on the detection arc.
#[derive(Debug, Clone, Serialize)]
pub struct Detector {
    pub center_angle: f64,
    pub half_width: f64,
    pub label: String,
}

impl Detector {
    pub fn interval(&self) -> (f64, f64) {
        (
            self.center_angle - self.half_width,
            self.center_angle + self.half_width,
        )
    }
}

/// The set of detector apertures for a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct DetectorBank {
    pub detectors: Vec<Detector>,
}

impl DetectorBank {
    /// Single-beam frame: detector 1 on the beam axis, detector 2 at twice
    /// the beam tilt where the first diffraction peak lands.
    pub fn single_beam(setup: &OpticalSetup) -> Self {
        Self {
            detectors: vec![
                Detector {
                    center_angle: 0.0,
                    half_width: setup.detector_half_angle,
                    label: "detector 1".into(),
                },
                Detector {
                    center_angle: 2.0 * setup.beam_half_angle,
                    half_width: setup.detector_half_angle,
                    label: "detector 2".into(),
                },
            ],
        }
    }

    /// Two-beam frame: one detector right in front of each incoming beam.
    pub fn two_beam(setup: &OpticalSetup) -> Self {
        Self {
            detectors: vec![
                Detector {
                    center_angle: -setup.beam_half_angle,
                    half_width: setup.detector_half_angle,
                    label: "detector 1".into(),
                },
                Detector {
                    center_angle: setup.beam_half_angle,
                    half_width: setup.detector_half_angle,
                    label: "detector 2".into(),
                },
            ],
        }
    }

    /// Detectors must be pairwise disjoint in angle and lie inside the
    /// detection region.
    pub fn validate(&self, setup: &OpticalSetup) -> Result<()> {
        let mut violations = Vec::new();
        let mut sorted: Vec<&Detector> = self.detectors.iter().collect();
        sorted.sort_by(|a, b| a.center_angle.total_cmp(&b.center_angle));
        for pair in sorted.windows(2) {
            if pair[0].center_angle + pair[0].half_width
                > pair[1].center_angle - pair[1].half_width
            {
                violations.push(ConfigViolation::new(
                    "detectors",
                    format!("{} and {} overlap", pair[0].label, pair[1].label),
                ));
            }
        }
        for d in &self.detectors {
            if d.center_angle.abs() + d.half_width > setup.detection_half_angle {
                violations.push(ConfigViolation::new(
                    "detectors",
                    format!("{} extends outside the detection region", d.label),
                ));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }
}

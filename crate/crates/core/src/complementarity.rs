//! Photon-counting model, which-way parameter, square-wave visibility lower
//! bound, and the duality value, all derived from the two-beam energy
//! ledger. This module is arithmetic over the ledger: no field amplitudes
//! appear, only counts and areas.

use crate::error::{Error, Result};
use crate::experiment::{OpticalSetup, WireGrid};
use crate::ledger::{EnergyLedger, ScenarioKind};
use crate::numerics::{disc_area, disc_strip_area, QuadratureSpec, Strip, StripModel};
use serde::Serialize;

/// Default photon count for the budget model.
pub const DEFAULT_PHOTON_TOTAL: u64 = 100_000;

/// Integer photon budget of one beam traversing the wire grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhotonBudget {
    pub total: u64,
    pub stopped_at_wires: u64,
    /// Stopped and diffracted counts are equal: the wire grid removes the
    /// same energy from the beam that it scatters into the diffracted field.
    pub diffracted_total: u64,
    pub diffracted_off_detector: u64,
    pub diffracted_at_detector: u64,
    pub direct_with_which_way: u64,
    /// Set when the total is small enough (< 10^4) that rounding dominates
    /// the category counts.
    pub rounding_warning: bool,
}

impl PhotonBudget {
    pub fn conserves(&self) -> bool {
        self.direct_with_which_way
            + self.diffracted_at_detector
            + self.diffracted_off_detector
            + self.stopped_at_wires
            == self.total
    }
}

/// Round each ledger fraction to the nearest photon, then restore the
/// exact-sum invariant by adjusting the direct count.
pub fn photon_budget(ledger: &EnergyLedger, total: u64) -> Result<PhotonBudget> {
    if ledger.scenario != ScenarioKind::TwoBeam {
        return Err(Error::Scenario(
            "photon budget requires a two-beam ledger".into(),
        ));
    }
    if total == 0 {
        return Ok(PhotonBudget {
            total: 0,
            stopped_at_wires: 0,
            diffracted_total: 0,
            diffracted_off_detector: 0,
            diffracted_at_detector: 0,
            direct_with_which_way: 0,
            rounding_warning: true,
        });
    }
    let to_count = |percent: f64| (percent / 100.0 * total as f64).round().max(0.0) as u64;
    let stopped = to_count(ledger.f_wires_percent);
    let diffracted_total = stopped;
    let capture_percent = ledger
        .detector_cross_terms
        .last()
        .map(|t| t.percent)
        .unwrap_or(0.0);
    let at_detector = to_count(capture_percent).min(diffracted_total);
    let off_detector = diffracted_total - at_detector;
    let removed = stopped + diffracted_total;
    if removed > total {
        return Err(Error::Scenario(format!(
            "ledger removes more photons than the total ({removed} of {total})"
        )));
    }
    Ok(PhotonBudget {
        total,
        stopped_at_wires: stopped,
        diffracted_total,
        diffracted_off_detector: off_detector,
        diffracted_at_detector: at_detector,
        direct_with_which_way: total - stopped - off_detector - at_detector,
        rounding_warning: total < 10_000,
    })
}

/// Which-way information parameter: the fraction of detector arrivals that
/// carry which-way information.
///
/// K = direct / (direct + diffracted-at-detector). With no detector
/// arrivals at all the parameter is undefined and reported as such.
pub fn which_way_parameter(budget: &PhotonBudget) -> Result<f64> {
    let arrivals = budget.direct_with_which_way + budget.diffracted_at_detector;
    if arrivals == 0 {
        return Err(Error::UndefinedWhichWay);
    }
    Ok(budget.direct_with_which_way as f64 / arrivals as f64)
}

/// The minimum-visibility square-wave reconstruction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VisibilityBound {
    /// Stopped photons spread over the exact wire footprint, photons/mm^2.
    pub i_min_proxy: f64,
    /// Passed photons spread over the remaining disc, photons/mm^2.
    pub i_max_proxy: f64,
    /// (I_max - I_min) / (I_max + I_min).
    pub visibility: f64,
    pub wire_area_mm2: f64,
    pub open_area_mm2: f64,
    pub stopped_count: u64,
    pub passed_count: u64,
}

/// Fringe contrast from a min/max intensity pair.
pub fn fringe_visibility(i_min: f64, i_max: f64) -> f64 {
    (i_max - i_min) / (i_max + i_min)
}

/// Lowest visibility compatible with the photon counts: the stopped photons
/// fill the exact (chord-model) wire footprint uniformly, the rest fill the
/// remaining beam cross-section uniformly.
pub fn visibility_lower_bound(
    ledger: &EnergyLedger,
    setup: &OpticalSetup,
    grid: &WireGrid,
    total: u64,
    spec: &QuadratureSpec,
) -> Result<VisibilityBound> {
    let budget = photon_budget(ledger, total)?;
    let strips: Vec<Strip> = grid
        .wire_centers()
        .into_iter()
        .map(|center_y| Strip {
            center_y,
            width: grid.thickness,
        })
        .collect();
    let wire_area = disc_strip_area(setup.beam_diameter, &strips, StripModel::ChordExact, spec)?;
    let open_area = disc_area(setup.beam_diameter) - wire_area;
    if wire_area <= 0.0 || open_area <= 0.0 {
        return Err(Error::DegenerateArea(format!(
            "wire area {wire_area} m^2, open area {open_area} m^2"
        )));
    }
    let wire_area_mm2 = wire_area * 1e6;
    let open_area_mm2 = open_area * 1e6;
    let stopped = budget.stopped_at_wires;
    let passed = budget.total - stopped;
    let i_min = stopped as f64 / wire_area_mm2;
    let i_max = passed as f64 / open_area_mm2;
    Ok(VisibilityBound {
        i_min_proxy: i_min,
        i_max_proxy: i_max,
        visibility: fringe_visibility(i_min, i_max),
        wire_area_mm2,
        open_area_mm2,
        stopped_count: stopped,
        passed_count: passed,
    })
}

impl VisibilityBound {
    /// Visibility of the pattern obtained by concentrating the stopped
    /// photons onto a fraction of the wire footprint. Any sub-region leaves
    /// part of the footprint dark, so the pattern minimum drops to zero and
    /// the visibility can only increase; the uniform fill is the true lower
    /// bound.
    pub fn redistributed_visibility(&self, support_fraction: f64) -> f64 {
        assert!(
            support_fraction > 0.0 && support_fraction <= 1.0,
            "support fraction must be in (0, 1]"
        );
        if support_fraction < 1.0 {
            1.0
        } else {
            self.visibility
        }
    }
}

/// V^2 + K^2 with its component breakdown.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualityValue {
    pub visibility_squared: f64,
    pub which_way_squared: f64,
    pub value: f64,
}

pub fn duality_value(visibility: f64, which_way: f64) -> DualityValue {
    DualityValue {
        visibility_squared: visibility * visibility,
        which_way_squared: which_way * which_way,
        value: visibility * visibility + which_way * which_way,
    }
}

/// One constant-intensity span of the square-wave pattern.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SquareWaveSegment {
    pub y_start: f64,
    pub y_end: f64,
    /// photons/mm^2.
    pub intensity_proxy: f64,
}

/// The minimal-visibility interference pattern over the grid plane:
/// I_min over each wire footprint, I_max elsewhere within the beam disc.
#[derive(Debug, Clone, Serialize)]
pub struct SquareWaveProfile {
    pub segments: Vec<SquareWaveSegment>,
}

impl SquareWaveProfile {
    /// CSV for plotting: two rows per segment so the steps render as a
    /// square wave. y in millimeters.
    pub fn to_csv(&self, metadata_lines: &[String]) -> String {
        let mut out = String::new();
        for line in metadata_lines {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("y_mm,intensity_proxy\n");
        for segment in &self.segments {
            out.push_str(&format!(
                "{},{}\n",
                crate::format_float(segment.y_start * 1e3),
                crate::format_float(segment.intensity_proxy)
            ));
            out.push_str(&format!(
                "{},{}\n",
                crate::format_float(segment.y_end * 1e3),
                crate::format_float(segment.intensity_proxy)
            ));
        }
        out
    }
}

pub fn squarewave_profile(
    bound: &VisibilityBound,
    setup: &OpticalSetup,
    grid: &WireGrid,
) -> SquareWaveProfile {
    let radius = setup.beam_radius();
    let half = 0.5 * grid.thickness;
    let centers = grid.wire_centers();
    let mut segments = Vec::new();
    let mut cursor = -radius;
    for center in &centers {
        let lo = center - half;
        let hi = center + half;
        if lo > cursor {
            segments.push(SquareWaveSegment {
                y_start: cursor,
                y_end: lo,
                intensity_proxy: bound.i_max_proxy,
            });
        }
        segments.push(SquareWaveSegment {
            y_start: lo,
            y_end: hi,
            intensity_proxy: bound.i_min_proxy,
        });
        cursor = hi;
    }
    if cursor < radius {
        segments.push(SquareWaveSegment {
            y_start: cursor,
            y_end: radius,
            intensity_proxy: bound.i_max_proxy,
        });
    }
    SquareWaveProfile { segments }
}

/// Everything the two-beam scenario says about wave-particle duality.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementarityReport {
    pub photon_budget: PhotonBudget,
    /// None when no photons arrive at the detector at all.
    pub which_way: Option<f64>,
    pub visibility: VisibilityBound,
    pub duality: Option<DualityValue>,
    /// The counting model behind `which_way`, so alternative definitions
    /// can be applied downstream from the raw counts.
    pub which_way_definition: &'static str,
}

pub fn complementarity_report(
    ledger: &EnergyLedger,
    setup: &OpticalSetup,
    grid: &WireGrid,
    total: u64,
    spec: &QuadratureSpec,
) -> Result<ComplementarityReport> {
    let budget = photon_budget(ledger, total)?;
    let which_way = which_way_parameter(&budget).ok();
    let visibility = visibility_lower_bound(ledger, setup, grid, total, spec)?;
    Ok(ComplementarityReport {
        photon_budget: budget,
        which_way,
        duality: which_way.map(|k| duality_value(visibility.visibility, k)),
        visibility,
        which_way_definition: "fraction of detector arrivals carrying which-way information",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{validate, DerivedParams, Placement};
    use crate::ledger::CrossTerm;
    use crate::scenario::Scenario;

    /// Ledger built directly from the published two-beam percentages.
    fn published_ledger() -> EnergyLedger {
        EnergyLedger {
            scenario: ScenarioKind::TwoBeam,
            f0_percent: 100.0,
            f_wires_percent: 0.125667,
            f_diffracted_away_percent: 0.124709,
            f_detector_percent: 99.749624,
            detector_cross_terms: vec![
                CrossTerm {
                    label: "detector 1".into(),
                    percent: 9.58447e-4,
                },
                CrossTerm {
                    label: "detector 2".into(),
                    percent: 9.58447e-4,
                },
            ],
        }
    }

    fn config() -> (OpticalSetup, WireGrid, DerivedParams) {
        let scenario = Scenario::published_reference(Placement::AtDarkFringes);
        let setup = scenario.optical_setup();
        let grid = scenario.wire_grid();
        let derived = validate(&setup, &grid).unwrap();
        (setup, grid, derived)
    }

    #[test]
    fn budget_reproduces_published_counts() {
        let budget = photon_budget(&published_ledger(), 100_000).unwrap();
        assert_eq!(budget.stopped_at_wires, 126);
        assert_eq!(budget.diffracted_total, 126);
        assert_eq!(budget.diffracted_off_detector, 125);
        assert_eq!(budget.diffracted_at_detector, 1);
        assert_eq!(budget.direct_with_which_way, 99_748);
        assert!(budget.conserves());
        assert!(!budget.rounding_warning);
    }

    #[test]
    fn budget_handles_zero_total_and_warns_on_small_totals() {
        let zero = photon_budget(&published_ledger(), 0).unwrap();
        assert_eq!(zero.total, 0);
        assert_eq!(zero.stopped_at_wires, 0);
        assert!(zero.conserves());

        let small = photon_budget(&published_ledger(), 5_000).unwrap();
        assert!(small.rounding_warning);
    }

    #[test]
    fn budget_counts_scale_linearly_within_rounding() {
        let base = photon_budget(&published_ledger(), 100_000).unwrap();
        let double = photon_budget(&published_ledger(), 200_000).unwrap();
        let close = |a: u64, b: u64, slack: i64| (a as i64 - b as i64).abs() <= slack;
        assert!(close(double.stopped_at_wires, 2 * base.stopped_at_wires, 1));
        assert!(close(double.diffracted_at_detector, 2 * base.diffracted_at_detector, 1));
        // The direct count restores the exact sum, so it absorbs the stopped
        // rounding twice.
        assert!(close(double.direct_with_which_way, 2 * base.direct_with_which_way, 3));
        assert!(double.conserves());
    }

    #[test]
    fn budget_conserves_across_ledger_variations() {
        for stopped_pct in [0.01, 0.125667, 1.0, 5.0] {
            for capture_pct in [0.0, 1e-4, 1e-3, stopped_pct / 2.0] {
                let ledger = EnergyLedger {
                    scenario: ScenarioKind::TwoBeam,
                    f0_percent: 100.0,
                    f_wires_percent: stopped_pct,
                    f_diffracted_away_percent: stopped_pct - capture_pct,
                    f_detector_percent: 100.0 - 2.0 * stopped_pct + capture_pct,
                    detector_cross_terms: vec![CrossTerm {
                        label: "detector".into(),
                        percent: capture_pct,
                    }],
                };
                for total in [0u64, 999, 100_000, 1_234_567] {
                    let budget = photon_budget(&ledger, total).unwrap();
                    assert!(budget.conserves(), "{stopped_pct} {capture_pct} {total}");
                }
            }
        }
    }

    #[test]
    fn which_way_parameter_from_published_counts() {
        let budget = photon_budget(&published_ledger(), 100_000).unwrap();
        let k = which_way_parameter(&budget).unwrap();
        let expected = 99_748.0 / 99_749.0;
        assert!((k - expected).abs() < 1e-12);
        assert!(k > 0.99998);
    }

    #[test]
    fn which_way_edges() {
        let mut budget = photon_budget(&published_ledger(), 100_000).unwrap();
        budget.diffracted_at_detector = 0;
        assert_eq!(which_way_parameter(&budget).unwrap(), 1.0);

        budget.diffracted_at_detector = budget.direct_with_which_way;
        assert!((which_way_parameter(&budget).unwrap() - 0.5).abs() < 1e-15);

        budget.direct_with_which_way = 0;
        budget.diffracted_at_detector = 0;
        assert!(matches!(
            which_way_parameter(&budget),
            Err(Error::UndefinedWhichWay)
        ));
    }

    #[test]
    fn which_way_is_monotone_in_detector_diffraction() {
        let budget = photon_budget(&published_ledger(), 100_000).unwrap();
        let mut previous = f64::INFINITY;
        for at in [0u64, 1, 5, 50, 500] {
            let mut b = budget;
            b.diffracted_at_detector = at;
            let k = which_way_parameter(&b).unwrap();
            assert!(k < previous);
            previous = k;
        }
    }

    #[test]
    fn visibility_bound_matches_published_numbers() {
        let (setup, grid, _derived) = config();
        let spec = QuadratureSpec::default();
        let bound = visibility_lower_bound(
            &published_ledger(),
            &setup,
            &grid,
            100_000,
            &spec,
        )
        .unwrap();
        assert!(
            (bound.i_min_proxy - 217.2).abs() < 0.005 * 217.2,
            "I_min = {}",
            bound.i_min_proxy
        );
        assert!(
            (bound.i_max_proxy - 13_205.2).abs() < 0.005 * 13_205.2,
            "I_max = {}",
            bound.i_max_proxy
        );
        assert!(
            (bound.visibility - 0.968).abs() < 1e-3,
            "V = {}",
            bound.visibility
        );
        // Level ratio of the square wave.
        let ratio = bound.i_min_proxy / bound.i_max_proxy;
        assert!((ratio - 0.01645).abs() < 3e-4, "ratio = {ratio}");
    }

    #[test]
    fn visibility_edges() {
        assert_eq!(fringe_visibility(0.0, 13_000.0), 1.0);
        assert_eq!(fringe_visibility(5.0, 5.0), 0.0);
        // Common rescaling cancels.
        let v1 = fringe_visibility(217.2, 13_205.2);
        let v2 = fringe_visibility(217.2 * 7.5, 13_205.2 * 7.5);
        assert!((v1 - v2).abs() < 1e-15);
    }

    #[test]
    fn concentrating_stopped_photons_raises_visibility() {
        let (setup, grid, _derived) = config();
        let spec = QuadratureSpec::default();
        let bound = visibility_lower_bound(
            &published_ledger(),
            &setup,
            &grid,
            100_000,
            &spec,
        )
        .unwrap();
        for fraction in [0.1, 0.5, 0.999] {
            assert!(bound.redistributed_visibility(fraction) > bound.visibility);
        }
        assert_eq!(bound.redistributed_visibility(1.0), bound.visibility);
    }

    #[test]
    fn visibility_with_no_wires_is_a_degenerate_area_error() {
        let (setup, grid, _derived) = config();
        let spec = QuadratureSpec::default();
        let empty = WireGrid { count: 0, ..grid };
        assert!(matches!(
            visibility_lower_bound(&published_ledger(), &setup, &empty, 100_000, &spec),
            Err(Error::DegenerateArea(_))
        ));
    }

    #[test]
    fn duality_values() {
        let published = duality_value(0.968, 99_748.0 / 99_749.0);
        assert!(published.value >= 1.93, "duality = {}", published.value);
        assert!(published.value > 1.0, "exceeds the two-way bound");
        assert!((duality_value(1.0, 0.0).value - 1.0).abs() < 1e-15);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert!((duality_value(half, half).value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squarewave_alternates_levels_over_wire_footprints() {
        let (setup, grid, _derived) = config();
        let spec = QuadratureSpec::default();
        let bound = visibility_lower_bound(
            &published_ledger(),
            &setup,
            &grid,
            100_000,
            &spec,
        )
        .unwrap();
        let wave = squarewave_profile(&bound, &setup, &grid);
        // 6 wires -> 6 low segments interleaved with 7 high segments.
        let low: Vec<_> = wave
            .segments
            .iter()
            .filter(|s| s.intensity_proxy == bound.i_min_proxy)
            .collect();
        let high: Vec<_> = wave
            .segments
            .iter()
            .filter(|s| s.intensity_proxy == bound.i_max_proxy)
            .collect();
        assert_eq!(low.len(), 6);
        assert_eq!(high.len(), 7);
        for segment in &low {
            assert!((segment.y_end - segment.y_start - grid.thickness).abs() < 1e-12);
        }
        // Segments tile the disc contiguously.
        for pair in wave.segments.windows(2) {
            assert_eq!(pair[0].y_end, pair[1].y_start);
        }
        assert_eq!(wave.segments.first().unwrap().y_start, -setup.beam_radius());
        assert_eq!(wave.segments.last().unwrap().y_end, setup.beam_radius());
    }

    #[test]
    fn squarewave_with_zero_wires_is_flat() {
        let (setup, grid, _derived) = config();
        let bound = VisibilityBound {
            i_min_proxy: 0.0,
            i_max_proxy: 12_000.0,
            visibility: 1.0,
            wire_area_mm2: 0.0,
            open_area_mm2: 8.14,
            stopped_count: 0,
            passed_count: 100_000,
        };
        let empty_grid = WireGrid { count: 0, ..grid };
        let wave = squarewave_profile(&bound, &setup, &empty_grid);
        assert_eq!(wave.segments.len(), 1);
        assert_eq!(wave.segments[0].intensity_proxy, 12_000.0);
    }

    #[test]
    fn report_assembles_from_computed_ledger() {
        let (setup, grid, derived) = config();
        let spec = QuadratureSpec::default();
        let bank = crate::experiment::DetectorBank::two_beam(&setup);
        let ledger = crate::ledger::solve_two_beam_ledger(
            &setup,
            &grid,
            &derived,
            &bank,
            crate::ledger::AmplitudeModel::Linearized,
            StripModel::FullDiameterStrip,
            &spec,
        )
        .unwrap();
        let report =
            complementarity_report(&ledger, &setup, &grid, 100_000, &spec).unwrap();
        assert!(report.photon_budget.conserves());
        assert_eq!(report.photon_budget.stopped_at_wires, 126);
        assert_eq!(report.photon_budget.direct_with_which_way, 99_748);
        let duality = report.duality.unwrap();
        assert!(duality.value >= 1.93);
    }
}

//! Far-field fields and intensities: the N-slit grating function, the
//! two-beam slit-grid field (numeric quadrature and six-slit closed form),
//! and the Babinet transformation from slit-grid to wire-grid intensities.
//!
//! Everything here is a pure function of an immutable, validated
//! configuration. Angles are measured from the z-axis in the plane of
//! diffraction; profiles are stored on strictly increasing theta grids.

use crate::error::{Error, Result};
use crate::experiment::{DerivedParams, OpticalSetup, WireGrid};
use crate::numerics::{integrate, sinc, Integral, QuadratureSpec};
use serde::Serialize;

/// How profile intensities are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// Raw time-averaged square of the field evaluator, arbitrary units.
    RawFieldSquare,
    /// Fraction of the incident beam energy per radian: the integral over
    /// the detection region equals the fraction carried by the diffracted
    /// field.
    FractionOfIncident,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::RawFieldSquare => "RawFieldSquare",
            Normalization::FractionOfIncident => "FractionOfIncident",
        }
    }
}

/// Which evaluator produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    SingleBeamGrating,
    TwoBeamSlitGrid,
    WireGridViaBabinet,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::SingleBeamGrating => "SingleBeamGrating",
            Provenance::TwoBeamSlitGrid => "TwoBeamSlitGrid",
            Provenance::WireGridViaBabinet => "WireGridViaBabinet",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    pub theta: f64,
    pub intensity: f64,
}

/// Sampled far-field intensity I(theta).
#[derive(Debug, Clone, Serialize)]
pub struct AngularIntensityProfile {
    pub samples: Vec<ProfileSample>,
    pub normalization: Normalization,
    pub provenance: Provenance,
    /// Angular intervals where the intensity is indeterminate by the field
    /// method (inside the unperturbed-beam support after a Babinet
    /// transformation). Samples are never emitted there.
    pub indeterminate_intervals: Vec<(f64, f64)>,
}

impl AngularIntensityProfile {
    /// Trapezoidal re-integration of the stored grid.
    pub fn trapezoid_integral(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0].intensity + w[1].intensity) * (w[1].theta - w[0].theta))
            .sum()
    }

    pub fn max_intensity(&self) -> f64 {
        self.samples.iter().map(|s| s.intensity).fold(0.0, f64::max)
    }

    /// CSV serialization with the fixed header. `metadata_lines` are
    /// prepended as `#`-comments; rows are deterministic 9-significant-digit
    /// floats in stored order.
    pub fn to_csv(&self, metadata_lines: &[String]) -> String {
        let mut out = String::new();
        for line in metadata_lines {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("theta_rad,intensity,normalization,provenance\n");
        for sample in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::format_float(sample.theta),
                crate::format_float(sample.intensity),
                self.normalization.label(),
                self.provenance.label()
            ));
        }
        out
    }

    /// Check the stored-grid invariants: strictly increasing theta inside
    /// the detection region, non-negative intensities.
    pub fn check_invariants(&self, theta_max: f64) -> Result<()> {
        let mut violations = Vec::new();
        if self
            .samples
            .windows(2)
            .any(|w| w[0].theta >= w[1].theta)
        {
            violations.push(crate::error::ConfigViolation::new(
                "profile",
                "theta grid must be strictly increasing",
            ));
        }
        if self
            .samples
            .iter()
            .any(|s| s.theta.abs() > theta_max * (1.0 + 1e-12))
        {
            violations.push(crate::error::ConfigViolation::new(
                "profile",
                "samples outside the detection region",
            ));
        }
        if self.samples.iter().any(|s| s.intensity < 0.0) {
            violations.push(crate::error::ConfigViolation::new(
                "profile",
                "negative intensity",
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }
}

/// Sampled signed field amplitude, same grid discipline as the intensity
/// profiles.
#[derive(Debug, Clone, Serialize)]
pub struct FieldProfile {
    pub samples: Vec<(f64, f64)>,
}

impl FieldProfile {
    /// Single-beam slit-grid field, Lambda * f(theta), on the given grid.
    pub fn single_beam(
        grid: &WireGrid,
        derived: &DerivedParams,
        lambda: f64,
        thetas: &[f64],
    ) -> Self {
        Self {
            samples: thetas
                .iter()
                .map(|&theta| (theta, lambda * grating_pattern(grid, derived, theta)))
                .collect(),
        }
    }

    /// Closed-form two-beam slit-grid field amplitude on the given grid.
    pub fn two_beam_closed(
        grid: &WireGrid,
        setup: &OpticalSetup,
        derived: &DerivedParams,
        thetas: &[f64],
    ) -> Result<Self> {
        let samples = thetas
            .iter()
            .map(|&theta| {
                two_beam_slit_field_closed(grid, setup, derived, theta)
                    .map(|amplitude| (theta, amplitude))
            })
            .collect::<Result<_>>()?;
        Ok(Self { samples })
    }

    /// Babinet field relation: where the unperturbed beam vanishes the
    /// wire-grid field is the negated slit-grid field, so the intensities
    /// coincide. Samples inside the beam support are dropped (the phase
    /// between the slit field and the beam is not simple there).
    pub fn babinet_wire_field(&self, unperturbed_beam_support: &[(f64, f64)]) -> Self {
        let inside = |theta: f64| {
            unperturbed_beam_support
                .iter()
                .any(|&(lo, hi)| theta >= lo && theta <= hi)
        };
        Self {
            samples: self
                .samples
                .iter()
                .filter(|(theta, _)| !inside(*theta))
                .map(|&(theta, amplitude)| (theta, -amplitude))
                .collect(),
        }
    }
}

/// N-slit grating amplitude factor of a uniformly illuminated slit grid.
///
/// f(theta) = (1/N) * [sin(B sin th)/(B sin th)] * [sin(N G sin th)/sin(G sin th)]
/// with B and G the slit and pitch half-phase coefficients. All
/// singularities (theta = 0 and the grating orders) are removable and
/// evaluated by series limit.
pub fn grating_pattern(grid: &WireGrid, derived: &DerivedParams, theta: f64) -> f64 {
    let s = theta.sin();
    let envelope = sinc(derived.slit_half_phase * s);
    envelope * array_factor(grid.count, derived.pitch_half_phase * s)
}

/// sin(N u) / (N sin u), the normalized N-slit array factor, with the
/// removable singularities at u = m pi handled by reduction to the
/// principal branch.
fn array_factor(count: u32, u: f64) -> f64 {
    let n = count as f64;
    let m = (u / std::f64::consts::PI).round();
    let reduced = u - m * std::f64::consts::PI;
    // sin(N u) = sin(N reduced + N m pi); N m pi contributes a sign when N m is odd.
    let numerator_sign = if (count as i64 * m as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let denominator_sign = if (m as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let sign = numerator_sign * denominator_sign;
    if reduced.abs() < 1e-7 {
        // Limit at a principal maximum: sin(N r)/(N sin r) -> 1 - (N^2-1) r^2 / 6.
        sign * (1.0 - (n * n - 1.0) * reduced * reduced / 6.0)
    } else {
        sign * (n * reduced).sin() / (n * reduced.sin())
    }
}

/// Scale constant for the single-beam slit-grid field, as a multiple of the
/// incident field amplitude.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SingleBeamNormalization {
    /// Lambda / E0.
    pub lambda_over_e0: f64,
    /// The detection-region energy integral used in the balance.
    pub region_integral: f64,
    pub quadrature_error: f64,
    pub subdivisions: usize,
}

/// Determine the single-beam field scale from energy conservation: the
/// energy transmitted by the slit grid equals the energy reaching the whole
/// detection region.
///
/// The balance is taken against the N-slit array factor alone (the
/// single-slit envelope is treated as unity across the detection region,
/// which is how the published constant was obtained):
///
///   Lambda^2 * R * integral of [sin(N G s)/(N sin(G s))]^2 dtheta = N b E0^2
///
/// `transmitted_fraction` must be the fraction of incident energy passed by
/// the complementary slit grid (see the energy-ledger wire loss), from which
/// N b = transmitted_fraction * disc_area / beam_diameter.
pub fn normalize_single_beam(
    grid: &WireGrid,
    setup: &OpticalSetup,
    derived: &DerivedParams,
    transmitted_fraction: f64,
    spec: &QuadratureSpec,
) -> Result<SingleBeamNormalization> {
    let theta_max = setup.detection_half_angle;
    let count = grid.count;
    let pitch_half_phase = derived.pitch_half_phase;
    let integrand = move |theta: f64| {
        let f = array_factor(count, pitch_half_phase * theta.sin());
        f * f
    };
    let integral = integrate(integrand, -theta_max, theta_max, spec).checked(spec)?;

    // transmitted_fraction * pi (D/2)^2 / D recovers the open slit area per
    // unit length, N b, independent of the strip model used upstream.
    let slit_open_length = transmitted_fraction * setup.disc_area() / setup.beam_diameter;
    let lambda_squared =
        slit_open_length / (setup.grid_to_detector_distance * integral.value);
    Ok(SingleBeamNormalization {
        lambda_over_e0: lambda_squared.sqrt(),
        region_integral: integral.value,
        quadrature_error: integral.error_estimate,
        subdivisions: integral.subdivisions,
    })
}

/// Unnormalized single-beam slit-grid intensity, the square of the grating
/// amplitude factor. Profiles in `FractionOfIncident` normalization rescale
/// this shape so its detection-region integral matches the transmitted
/// fraction.
pub fn single_beam_intensity_shape(grid: &WireGrid, derived: &DerivedParams, theta: f64) -> f64 {
    let f = grating_pattern(grid, derived, theta);
    f * f
}

/// Scale constant of the two-beam evaluators: 2 E0 k_y / R.
pub fn two_beam_scale(setup: &OpticalSetup, derived: &DerivedParams) -> f64 {
    2.0 * setup.field_amplitude * derived.transverse_wave_number
        / setup.grid_to_detector_distance
}

/// Stable evaluation of the slit-envelope brace of the six-slit closed form,
/// divided by X^2:
///
///   g(X) = [b X cos(b X / 2) - 2 sin(b X / 2)] / X^2
///
/// For small arguments the bracket cancels to O((bX)^3) and is evaluated by
/// series to avoid catastrophic loss in the X^4 division.
fn slit_brace_over_x2(thickness: f64, x: f64) -> f64 {
    let t = 0.5 * thickness * x;
    if t.abs() < 1e-3 {
        // b X cos t - 2 sin t = -2 (t^3/3 - t^5/30 + t^7/840 ...)
        let t2 = t * t;
        let series = (t * t2 / 3.0) * (1.0 - t2 / 10.0 * (1.0 - 3.0 * t2 / 28.0));
        if x == 0.0 {
            0.0
        } else {
            -2.0 * series / (x * x)
        }
    } else {
        (thickness * x * t.cos() - 2.0 * t.sin()) / (x * x)
    }
}

/// The alternating six-slit array brace of the closed form:
/// sin(d X / 2) - sin(3 d X / 2) + sin(5 d X / 2).
fn six_slit_array_brace(pitch: f64, x: f64) -> f64 {
    let half = 0.5 * pitch * x;
    half.sin() - (3.0 * half).sin() + (5.0 * half).sin()
}

/// Closed-form two-beam slit-grid intensity (time-averaged square of the
/// six-slit field), in raw field-square units.
///
/// Only the six-slit geometry has this closed form; other counts must use
/// the numeric evaluator.
pub fn two_beam_slit_intensity_closed(
    grid: &WireGrid,
    setup: &OpticalSetup,
    derived: &DerivedParams,
    theta: f64,
) -> Result<f64> {
    if grid.count != 6 {
        return Err(Error::UnsupportedSlitCount { count: grid.count });
    }
    let omega = two_beam_scale(setup, derived);
    let x = derived.wave_number * theta.sin();
    let g = slit_brace_over_x2(grid.thickness, x);
    let b = six_slit_array_brace(grid.pitch, x);
    Ok(2.0 * omega * omega * g * g * b * b)
}

/// Signed closed-form field amplitude compatible with the time-averaged
/// square above: I = amplitude^2 / 2.
pub fn two_beam_slit_field_closed(
    grid: &WireGrid,
    setup: &OpticalSetup,
    derived: &DerivedParams,
    theta: f64,
) -> Result<f64> {
    if grid.count != 6 {
        return Err(Error::UnsupportedSlitCount { count: grid.count });
    }
    let omega = two_beam_scale(setup, derived);
    let x = derived.wave_number * theta.sin();
    Ok(2.0 * omega * slit_brace_over_x2(grid.thickness, x) * six_slit_array_brace(grid.pitch, x))
}

/// Quadrature-evaluated two-beam slit-grid field at one angle: the two
/// harmonic components of the summed per-slit integrals of the linearized
/// effective amplitude.
#[derive(Debug, Clone, Copy)]
pub struct NumericField {
    /// Coefficient of the cos(omega t) harmonic, in units of the two-beam
    /// scale constant.
    pub cos_component: f64,
    /// Coefficient of the sin(omega t) harmonic.
    pub sin_component: f64,
    pub quadrature_error: f64,
    pub subdivisions: usize,
}

impl NumericField {
    /// Time-averaged intensity: (c^2 + s^2) / 2 restoring the scale constant.
    pub fn intensity(&self, setup: &OpticalSetup, derived: &DerivedParams) -> f64 {
        let omega = two_beam_scale(setup, derived);
        0.5 * omega * omega
            * (self.cos_component * self.cos_component
                + self.sin_component * self.sin_component)
    }
}

/// Evaluate the two-beam slit-grid field by direct numerical quadrature of
/// the per-slit diffraction integrals, for any slit count.
///
/// Each slit centered on a dark fringe carries the linearized effective
/// amplitude with slope alternating slit to slit; the grid is centered so
/// the summed field differs from a one-sided indexing only by an overall
/// time phase that drops out of the time average.
pub fn two_beam_slit_field_numeric(
    grid: &WireGrid,
    derived: &DerivedParams,
    theta: f64,
    spec: &QuadratureSpec,
) -> Result<NumericField> {
    let x = derived.wave_number * theta.sin();
    let half = 0.5 * grid.thickness;
    let centers = grid.wire_centers();

    let mut cos_component = 0.0;
    let mut sin_component = 0.0;
    let mut error = 0.0;
    let mut subdivisions = 0;
    for (j, &center) in centers.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let sin_part: Integral = integrate(
            |y: f64| (y - center) * (x * y).sin(),
            center - half,
            center + half,
            spec,
        )
        .checked(spec)?;
        let cos_part: Integral = integrate(
            |y: f64| (y - center) * (x * y).cos(),
            center - half,
            center + half,
            spec,
        )
        .checked(spec)?;
        // sin(phi + X y) = sin(phi) cos(X y) + cos(phi) sin(X y); collect the
        // two harmonics across slits.
        sin_component += sign * cos_part.value;
        cos_component += sign * sin_part.value;
        error += sin_part.error_estimate + cos_part.error_estimate;
        subdivisions += sin_part.subdivisions + cos_part.subdivisions;
    }
    Ok(NumericField {
        cos_component,
        sin_component,
        quadrature_error: error,
        subdivisions,
    })
}

/// Build a sampled profile of `shape` over [-theta_max, theta_max], rescaled
/// to `FractionOfIncident` so the detection-region integral equals
/// `total_fraction`.
///
/// The grid refines recursively where the trapezoid rule disagrees with a
/// midpoint split, so trapezoidal re-integration of the stored samples
/// reproduces the adaptive integral to about 1e-4 relative.
pub fn sample_fraction_profile<F: Fn(f64) -> f64>(
    shape: F,
    theta_max: f64,
    total_fraction: f64,
    provenance: Provenance,
    spec: &QuadratureSpec,
) -> Result<AngularIntensityProfile> {
    let region = integrate(&shape, -theta_max, theta_max, spec).checked(spec)?;
    if region.value <= 0.0 {
        return Err(Error::DegenerateArea(
            "profile shape integrates to zero over the detection region".into(),
        ));
    }
    let scale = total_fraction / region.value;

    let mut thetas: Vec<f64> = Vec::new();
    let base = 1024;
    for i in 0..=base {
        thetas.push(-theta_max + 2.0 * theta_max * i as f64 / base as f64);
    }
    // Local refinement: split any panel whose trapezoid estimate disagrees
    // with its two-panel split by more than a share of the total.
    let tolerance = region.value * 2.5e-9;
    let mut refined = Vec::with_capacity(thetas.len() * 2);
    for pair in thetas.windows(2) {
        refine_panel(&shape, pair[0], pair[1], tolerance, 12, &mut refined);
    }
    refined.push(theta_max);

    let samples = refined
        .iter()
        .map(|&theta| ProfileSample {
            theta,
            intensity: shape(theta).max(0.0) * scale,
        })
        .collect();

    let profile = AngularIntensityProfile {
        samples,
        normalization: Normalization::FractionOfIncident,
        provenance,
        indeterminate_intervals: Vec::new(),
    };
    profile.check_invariants(theta_max)?;
    Ok(profile)
}

fn refine_panel<F: Fn(f64) -> f64>(
    shape: &F,
    a: f64,
    b: f64,
    tolerance: f64,
    depth: u32,
    out: &mut Vec<f64>,
) {
    let mid = 0.5 * (a + b);
    let fa = shape(a);
    let fb = shape(b);
    let fm = shape(mid);
    let coarse = 0.5 * (fa + fb) * (b - a);
    let fine = 0.25 * (fa + 2.0 * fm + fb) * (b - a);
    if depth == 0 || (coarse - fine).abs() <= tolerance {
        out.push(a);
        if depth == 0 && (coarse - fine).abs() > tolerance {
            out.push(mid);
        }
        return;
    }
    refine_panel(shape, a, mid, tolerance * 0.5, depth - 1, out);
    refine_panel(shape, mid, b, tolerance * 0.5, depth - 1, out);
}

/// Babinet transformation: the wire-grid intensity equals the slit-grid
/// intensity wherever the unperturbed beam field vanishes. Inside the
/// beam support the field method leaves the intensity indeterminate (the
/// phase between the slit field and the unperturbed beam is not simple),
/// and the energy ledger must be used instead.
pub fn babinet_wire_profile(
    slit_profile: &AngularIntensityProfile,
    unperturbed_beam_support: &[(f64, f64)],
) -> AngularIntensityProfile {
    let inside = |theta: f64| {
        unperturbed_beam_support
            .iter()
            .any(|&(lo, hi)| theta >= lo && theta <= hi)
    };
    AngularIntensityProfile {
        samples: slit_profile
            .samples
            .iter()
            .filter(|s| !inside(s.theta))
            .copied()
            .collect(),
        normalization: slit_profile.normalization,
        provenance: Provenance::WireGridViaBabinet,
        indeterminate_intervals: unperturbed_beam_support.to_vec(),
    }
}

/// Determinate intensity lookup on a Babinet wire profile.
pub enum WireIntensity {
    Determinate(f64),
    IndeterminateByFieldMethod,
}

impl AngularIntensityProfile {
    /// Intensity at `theta` by linear interpolation, or the indeterminate
    /// marker inside a recorded unperturbed-beam interval.
    pub fn intensity_at(&self, theta: f64) -> WireIntensity {
        if self
            .indeterminate_intervals
            .iter()
            .any(|&(lo, hi)| theta >= lo && theta <= hi)
        {
            return WireIntensity::IndeterminateByFieldMethod;
        }
        if self.samples.len() < 2 {
            return WireIntensity::Determinate(
                self.samples.first().map(|s| s.intensity).unwrap_or(0.0),
            );
        }
        let i = self
            .samples
            .partition_point(|s| s.theta < theta)
            .min(self.samples.len() - 1)
            .max(1);
        let (left, right) = (&self.samples[i - 1], &self.samples[i]);
        let span = right.theta - left.theta;
        let w = if span > 0.0 { (theta - left.theta) / span } else { 0.0 };
        WireIntensity::Determinate(left.intensity + w * (right.intensity - left.intensity))
    }
}

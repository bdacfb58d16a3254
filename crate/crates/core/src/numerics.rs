//! Shared numerical machinery: adaptive one-dimensional quadrature and
//! disc-geometry area integrals.
//!
//! The quadrature is a nested Gauss–Kronrod 7–15 rule with interval
//! bisection. The error estimator is the difference between the two rule
//! orders. Subdivision always splits the interval with the largest current
//! error estimate and ties break on the leftmost interval, so results are
//! bit-reproducible across runs for a fixed configuration.

use crate::error::{Error, Result};
use serde::Serialize;

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-14,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(relative: f64, absolute: f64) -> Self {
        Self {
            relative_tolerance: relative,
            absolute_tolerance: absolute,
            ..Self::default()
        }
    }

    // `!(x > 0)` rather than `x <= 0` so NaN inputs fail validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if !(self.relative_tolerance > 0.0) {
            violations.push(crate::error::ConfigViolation::new(
                "relative_tolerance",
                "must be positive",
            ));
        }
        if !(self.absolute_tolerance > 0.0) {
            violations.push(crate::error::ConfigViolation::new(
                "absolute_tolerance",
                "must be positive",
            ));
        }
        if self.max_subdivisions < 10 {
            violations.push(crate::error::ConfigViolation::new(
                "max_subdivisions",
                "must be at least 10",
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    /// False when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

impl Integral {
    /// Promote a non-converged result into an explicit error.
    pub fn checked(self, spec: &QuadratureSpec) -> Result<Integral> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::QuadratureNonConvergence {
                value: self.value,
                achieved: self.error_estimate,
                requested: spec
                    .absolute_tolerance
                    .max(self.value.abs() * spec.relative_tolerance),
                subdivisions: self.subdivisions,
            })
        }
    }
}

// Kronrod nodes for the 7-point Gauss / 15-point Kronrod pair (QUADPACK).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss–Kronrod 7-15 evaluation on [a, b]: (kronrod value, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];

    for j in 0..7 {
        let offset = half * XGK[j];
        let sum = f(center - offset) + f(center + offset);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive quadrature of `f` over [a, b].
///
/// Returns the achieved estimate with a convergence flag; it never silently
/// degrades. Callers that require convergence chain with [`Integral::checked`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
        };
    }

    let (value, error) = gk15(&f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
    }];
    let mut subdivisions = 0usize;

    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_error: f64 = segments.iter().map(|s| s.error).sum();
        let tolerance = spec
            .absolute_tolerance
            .max(total.abs() * spec.relative_tolerance);

        if total_error <= tolerance {
            return Integral {
                value: total,
                error_estimate: total_error,
                subdivisions,
                converged: true,
            };
        }
        if subdivisions >= spec.max_subdivisions {
            return Integral {
                value: total,
                error_estimate: total_error,
                subdivisions,
                converged: false,
            };
        }

        // Deterministic: bisect the leftmost segment among those of maximal error.
        let mut worst = 0;
        for (i, s) in segments.iter().enumerate() {
            if s.error > segments[worst].error {
                worst = i;
            }
        }
        let Segment { a, b, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at floating-point resolution; accept what we have.
            let (value, error) = gk15(&f, a, b);
            segments.push(Segment {
                a,
                b,
                value,
                error: error.min(f64::EPSILON * value.abs()),
            });
            continue;
        }
        let (lv, le) = gk15(&f, a, mid);
        let (rv, re) = gk15(&f, mid, b);
        segments.push(Segment {
            a,
            b: mid,
            value: lv,
            error: le,
        });
        segments.push(Segment {
            a: mid,
            b,
            value: rv,
            error: re,
        });
        subdivisions += 1;
    }
}

/// sin(x)/x with the removable singularity evaluated by series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// How a wire or slit strip is projected onto the beam cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StripModel {
    /// Strip area is width x chord length at the strip's height, integrated
    /// across the strip.
    ChordExact,
    /// Strip area is width x full disc diameter.
    FullDiameterStrip,
}

impl StripModel {
    pub fn label(self) -> &'static str {
        match self {
            StripModel::ChordExact => "chord",
            StripModel::FullDiameterStrip => "strip",
        }
    }
}

/// A horizontal strip across the beam disc (a wire or slit footprint).
#[derive(Debug, Clone, Copy)]
pub struct Strip {
    pub center_y: f64,
    pub width: f64,
}

/// Area of a disc of the given diameter.
pub fn disc_area(diameter: f64) -> f64 {
    let r = 0.5 * diameter;
    std::f64::consts::PI * r * r
}

/// Total area of `strips` laid over a disc of diameter `disc_diameter`.
///
/// Strips must be non-overlapping and lie within the disc.
pub fn disc_strip_area(
    disc_diameter: f64,
    strips: &[Strip],
    model: StripModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let radius = 0.5 * disc_diameter;
    for strip in strips {
        if strip.center_y.abs() + 0.5 * strip.width > radius {
            return Err(Error::StripOutsideDisc {
                center_y: strip.center_y,
                width: strip.width,
            });
        }
    }
    let mut sorted: Vec<&Strip> = strips.iter().collect();
    sorted.sort_by(|a, b| a.center_y.total_cmp(&b.center_y));
    for pair in sorted.windows(2) {
        let top_of_lower = pair[0].center_y + 0.5 * pair[0].width;
        let bottom_of_upper = pair[1].center_y - 0.5 * pair[1].width;
        if top_of_lower > bottom_of_upper {
            return Err(Error::OverlappingStrips {
                at: pair[1].center_y,
            });
        }
    }

    match model {
        StripModel::FullDiameterStrip => {
            Ok(strips.iter().map(|s| s.width * disc_diameter).sum())
        }
        StripModel::ChordExact => {
            let mut area = 0.0;
            for strip in strips {
                let lo = strip.center_y - 0.5 * strip.width;
                let hi = strip.center_y + 0.5 * strip.width;
                let chord = |y: f64| 2.0 * (radius * radius - y * y).max(0.0).sqrt();
                area += integrate(chord, lo, hi, spec).checked(spec)?.value;
            }
            Ok(area)
        }
    }
}

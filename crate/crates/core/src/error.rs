use thiserror::Error;

/// A single named invariant violation found during configuration validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct ConfigViolation {
    /// Which input field or field pair the diagnostic refers to.
    pub field: &'static str,
    pub message: String,
}

impl ConfigViolation {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Validation reports every violated invariant, not just the first.
    #[error("invalid configuration: {}", format_violations(.0))]
    InvalidConfig(Vec<ConfigViolation>),

    #[error(
        "quadrature did not converge: achieved error {achieved:.3e} \
         (requested {requested:.3e}), value {value:.9e} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("strip at y = {center_y:.6e} m (width {width:.6e} m) extends outside the disc")]
    StripOutsideDisc { center_y: f64, width: f64 },

    #[error("strips overlap near y = {at:.6e} m")]
    OverlappingStrips { at: f64 },

    #[error(
        "closed-form six-slit intensity requires count = 6 (got {count}); \
         use the numeric field evaluator for other counts"
    )]
    UnsupportedSlitCount { count: u32 },

    #[error("degenerate area: {0}")]
    DegenerateArea(String),

    #[error("which-way parameter undefined: no detector arrivals")]
    UndefinedWhichWay,

    #[error("{0}")]
    Scenario(String),
}

fn format_violations(violations: &[ConfigViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

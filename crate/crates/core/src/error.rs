use std::fmt;

/// A single problem found while validating a project document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    /// Field path (`materials.fabric.of`) or `line:column` for syntax errors.
    pub locator: String,
    pub message: String,
}

impl ValidationIssue {
    pub fn new(locator: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            locator: locator.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locator, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{quantity} out of domain: {value}")]
    Domain { quantity: &'static str, value: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("configuration required: {0}")]
    ConfigurationRequired(String),

    #[error("weight product must equal 1, got {product}")]
    WeightProduct { product: f64 },

    #[error("unknown standard `{0}`")]
    UnknownStandard(String),

    #[error("occupied region contains no grid cells")]
    EmptyOccupiedRegion,

    #[error("schedule has no occupied timesteps")]
    NoOccupiedTimesteps,

    #[error("{} validation error(s):\n{}", .0.len(), join_issues(.0))]
    Validation(Vec<ValidationIssue>),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64) -> Self {
        Error::Domain { quantity, value }
    }

    /// Wraps the error with a human-readable location such as `observer desk / window w1`.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by the user's input rather than by the tool.
    pub fn is_user_error(&self) -> bool {
        !matches!(self.root(), Error::Io(_))
    }
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rejects NaN and values outside `[lo, hi]`.
pub(crate) fn check_range(quantity: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_nan() || value < lo || value > hi {
        Err(Error::domain(quantity, value))
    } else {
        Ok(value)
    }
}

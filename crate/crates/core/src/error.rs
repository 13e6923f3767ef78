use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("{0}")]
    Advisory(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Diagnostic attached to a numerically computed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    /// The point lies outside the effective domain; value is +∞.
    OutsideDomain,
    /// The supremum grows without bound; value is +∞.
    UnboundedSup,
    /// The optimum is approached at infinity and the value is the limit.
    LimitAtInfinity,
    /// The best point found sits on the edge of the search region.
    BoundaryOptimum,
    /// Iteration budget exhausted before the tolerance was met.
    NotConverged,
    /// Effective sample size too small for a trustworthy estimate.
    LowEffectiveSampleSize,
    /// Too few hits in the tail for a trustworthy estimate.
    InsufficientCounts,
    /// Input did not pass a detection test with enough margin.
    Ambiguous,
    /// A convention replaced an undefined quantity.
    Convention,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flag::OutsideDomain => "outside_domain",
            Flag::UnboundedSup => "unbounded_sup",
            Flag::LimitAtInfinity => "limit_at_infinity",
            Flag::BoundaryOptimum => "boundary_optimum",
            Flag::NotConverged => "not_converged",
            Flag::LowEffectiveSampleSize => "low_ess",
            Flag::InsufficientCounts => "insufficient_counts",
            Flag::Ambiguous => "ambiguous",
            Flag::Convention => "convention",
        };
        f.write_str(s)
    }
}

impl Flag {
    /// Flags that mark a result as unreliable rather than merely infinite.
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            Flag::BoundaryOptimum
                | Flag::NotConverged
                | Flag::LowEffectiveSampleSize
                | Flag::InsufficientCounts
                | Flag::Ambiguous
        )
    }
}

/// An extended-real value with an optional diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub flag: Option<Flag>,
}

impl Flagged {
    pub fn ok(value: f64) -> Self {
        Flagged { value, flag: None }
    }

    pub fn with(value: f64, flag: Flag) -> Self {
        Flagged { value, flag: Some(flag) }
    }

    pub fn infinite(flag: Flag) -> Self {
        Flagged { value: f64::INFINITY, flag: Some(flag) }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Keeps the first failure-type flag of the two.
    pub fn merge_flag(self, other: Option<Flag>) -> Self {
        let flag = match (self.flag, other) {
            (Some(a), _) if a.is_failure() => Some(a),
            (_, Some(b)) if b.is_failure() => Some(b),
            (a, b) => a.or(b),
        };
        Flagged { value: self.value, flag }
    }
}

//! Rate-function engine: Legendre transforms, relative entropy, logarithmic energy,
//! rate composition and the closed-form catalog.

mod catalog;
mod compose;
mod entropy;
mod legendre;

use std::fmt;
use std::sync::Arc;

pub use catalog::*;
pub use compose::*;
pub use entropy::*;
pub use legendre::*;

/// Speed s_n of a large deviations principle.
#[derive(Debug, Clone, PartialEq)]
pub enum Speed {
    /// s_n = n
    N,
    /// s_n = n^e
    NPow(f64),
    /// s_n = n²
    NSquared,
    /// s_n = b_n² with b_n = n^γ
    Moderate(f64),
}

impl Speed {
    pub fn at(&self, n: f64) -> f64 {
        match self {
            Speed::N => n,
            Speed::NPow(e) => n.powf(*e),
            Speed::NSquared => n * n,
            Speed::Moderate(g) => n.powf(2.0 * g),
        }
    }
}

impl fmt::Display for Speed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Speed::N => write!(f, "n"),
            Speed::NPow(e) => write!(f, "n^{e}"),
            Speed::NSquared => write!(f, "n^2"),
            Speed::Moderate(g) => write!(f, "b_n^2 (b_n = n^{g})"),
        }
    }
}

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nonnegative extended-real function on the line with LDP metadata.
#[derive(Clone)]
pub struct RateFunction {
    f: Scalar,
    pub domain_hint: String,
    pub speed: Speed,
    pub minimizer: Option<f64>,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunction")
            .field("domain_hint", &self.domain_hint)
            .field("speed", &self.speed)
            .field("minimizer", &self.minimizer)
            .finish()
    }
}

impl RateFunction {
    pub fn new<F>(f: F, domain_hint: impl Into<String>, speed: Speed, minimizer: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RateFunction { f: Arc::new(f), domain_hint: domain_hint.into(), speed, minimizer }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

type Vector = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
/// Gradient and Hessian, when available in closed form or by quadrature.
pub type Derivatives = Arc<dyn Fn(&[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> + Send + Sync>;

/// Convex log-moment generating function of dimension 1 to 3.
#[derive(Clone)]
pub struct CumulantFunction {
    f: Vector,
    dim: usize,
    domain: Predicate,
    derivs: Option<Derivatives>,
}

impl fmt::Debug for CumulantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CumulantFunction(dim={})", self.dim)
    }
}

impl CumulantFunction {
    pub fn new<F, D>(dim: usize, f: F, domain: D) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        D: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        assert!((1..=3).contains(&dim), "cumulant dimension must be 1, 2 or 3");
        CumulantFunction { f: Arc::new(f), dim, domain: Arc::new(domain), derivs: None }
    }

    /// One-dimensional cumulant finite everywhere it returns a finite value.
    pub fn scalar<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(1, move |t| f(t[0]), |_| true)
    }

    pub fn with_derivatives(mut self, d: Derivatives) -> Self {
        self.derivs = Some(d);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_domain(&self, t: &[f64]) -> bool {
        (self.domain)(t)
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        if !(self.domain)(t) {
            return f64::INFINITY;
        }
        let v = (self.f)(t);
        if v.is_nan() { f64::INFINITY } else { v }
    }

    pub fn derivatives(&self, t: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        self.derivs.as_ref().and_then(|d| d(t))
    }
}

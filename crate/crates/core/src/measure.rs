//! Probability measures on the real line: densities and weighted atoms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOpts};

type LogPdf = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density given through its logarithm, with support and quadrature hints.
#[derive(Clone)]
pub struct Density1D {
    log_pdf: LogPdf,
    pub support: (f64, f64),
    /// Interior points where the density is singular or has a kink.
    pub breakpoints: Vec<f64>,
    pub normalization_checked: bool,
    pub label: String,
}

impl fmt::Debug for Density1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density1D")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .field("normalization_checked", &self.normalization_checked)
            .finish()
    }
}

impl Density1D {
    pub fn new<F>(label: impl Into<String>, support: (f64, f64), log_pdf: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Density1D {
            log_pdf: Arc::new(log_pdf),
            support,
            breakpoints: Vec::new(),
            normalization_checked: false,
            label: label.into(),
        }
    }

    pub fn with_breakpoints(mut self, pts: &[f64]) -> Self {
        self.breakpoints = pts.to_vec();
        self
    }

    /// Verifies that the density integrates to one within 1e-6.
    pub fn checked(mut self) -> Result<Self> {
        let mass = self.integrate(|_| 1.0);
        if (mass - 1.0).abs() > 1e-6 || !mass.is_finite() {
            return Err(Error::Domain(format!("{} integrates to {mass}, not 1", self.label)));
        }
        self.normalization_checked = true;
        Ok(self)
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if x < self.support.0 || x > self.support.1 || x.is_nan() {
            return f64::NEG_INFINITY;
        }
        (self.log_pdf)(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// Segment edges of the support split at the breakpoints.
    pub fn edges(&self) -> Vec<f64> {
        let (a, b) = self.support;
        let mut e = vec![a];
        let mut inner: Vec<f64> = self.breakpoints.iter().cloned().filter(|&x| x > a && x < b).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        inner.dedup();
        e.extend(inner);
        e.push(b);
        e
    }

    /// ∫ g(x) f(x) dx over the support.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let h = |x: f64| {
            let lp = self.log_pdf(x);
            if lp == f64::NEG_INFINITY {
                0.0
            } else {
                g(x) * lp.exp()
            }
        };
        self.edges().windows(2).map(|w| integrate_segment(&h, w[0], w[1])).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn moment_abs(&self, q: f64) -> f64 {
        self.integrate(|x| x.abs().powf(q))
    }

    /// Differential entropy −∫ f log f.
    pub fn entropy(&self) -> f64 {
        -self.integrate(|x| {
            let lp = self.log_pdf(x);
            if lp.is_finite() { lp } else { 0.0 }
        })
    }

    /// Effective range containing all but about 1e-16 of the mass.
    pub fn effective_range(&self) -> (f64, f64) {
        let (a, b) = self.support;
        if a.is_finite() && b.is_finite() {
            return (a, b);
        }
        let (x0, lp0) = quad::locate_peak(&|x| self.log_pdf(x), a, b);
        let reach = |dir: f64, limit: f64| -> f64 {
            if limit.is_finite() {
                return limit;
            }
            let mut s = 1.0f64;
            loop {
                let x = x0 + dir * s;
                if self.log_pdf(x) < lp0 - 45.0 || s > 1e12 {
                    return x;
                }
                s *= 1.25;
            }
        };
        (reach(-1.0, a), reach(1.0, b))
    }
}

/// Adaptive quadrature on one segment; finite segments use x = c − r cos θ so that
/// inverse-square-root endpoint behaviour becomes smooth.
pub fn integrate_segment<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64) -> f64 {
    let opts = QuadOpts { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
    integrate_segment_with(h, a, b, &opts)
}

pub fn integrate_segment_with<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64, opts: &QuadOpts) -> f64 {
    if a.is_finite() && b.is_finite() {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let k = |t: f64| {
            let x = (c - r * t.cos()).clamp(a, b);
            let v = h(x) * r * t.sin();
            if v.is_finite() { v } else { 0.0 }
        };
        quad::integrate_with(k, 0.0, std::f64::consts::PI, opts).value
    } else {
        quad::integrate_with(|x| h(x), a, b, opts).value
    }
}

/// Piecewise-constant approximation of a density, used for sampling and CDF lookups.
#[derive(Debug, Clone)]
pub struct CdfTable {
    pub edges: Vec<f64>,
    /// Cumulative masses at each edge, starting at 0 and normalized to end at 1.
    pub cdf: Vec<f64>,
}

impl CdfTable {
    pub fn new(d: &Density1D, cells: usize) -> Self {
        let (lo, hi) = d.effective_range();
        let mut edges: Vec<f64> = (0..=cells).map(|i| lo + (hi - lo) * i as f64 / cells as f64).collect();
        for &bp in &d.breakpoints {
            if bp > lo && bp < hi {
                edges.push(bp);
            }
        }
        edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
        edges.dedup();
        let opts = QuadOpts { abs_tol: 1e-17, rel_tol: 1e-10, max_intervals: 200 };
        let mut cdf = vec![0.0];
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let m = quad::integrate_with(|x| d.pdf(x), w[0], w[1], &opts).value;
            acc += m.max(0.0);
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        CdfTable { edges, cdf }
    }

    fn cell(&self, x: f64) -> Option<usize> {
        if x < self.edges[0] || x >= *self.edges.last().unwrap() {
            return None;
        }
        let i = self.edges.partition_point(|&e| e <= x);
        Some(i - 1)
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.edges[0] {
            return 0.0;
        }
        match self.cell(x) {
            None => 1.0,
            Some(i) => {
                let t = (x - self.edges[i]) / (self.edges[i + 1] - self.edges[i]);
                self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
            }
        }
    }

    /// Inverse of the piecewise-linear CDF; exact sampler for the piecewise-constant density.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let mut i = self.cdf.partition_point(|&c| c < u);
        if i == 0 {
            i = 1;
        }
        if i >= self.cdf.len() {
            return *self.edges.last().unwrap();
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.edges[i - 1] + t * (self.edges[i] - self.edges[i - 1])
    }

    /// Log-density of the piecewise-constant approximation.
    pub fn log_q(&self, x: f64) -> f64 {
        match self.cell(x) {
            None => f64::NEG_INFINITY,
            Some(i) => ((self.cdf[i + 1] - self.cdf[i]) / (self.edges[i + 1] - self.edges[i])).ln(),
        }
    }
}

/// Finitely many weighted atoms with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<(f64, f64)>,
}

impl EmpiricalMeasure {
    /// Equal weights on the given points.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("empirical measure needs at least one atom".into()));
        }
        let w = 1.0 / points.len() as f64;
        Ok(EmpiricalMeasure { atoms: points.iter().map(|&x| (x, w)).collect() })
    }

    pub fn weighted(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("empirical measure needs at least one atom".into()));
        }
        if atoms.iter().any(|&(x, w)| !x.is_finite() || !(w >= 0.0)) {
            return Err(Error::Invalid("atoms need finite locations and nonnegative weights".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(EmpiricalMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn points(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * g(x)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EmpiricalMeasure { atoms: self.atoms.iter().map(|&(x, w)| (x * factor, w)).collect() }
    }

    /// Atoms sorted by location.
    pub fn sorted(&self) -> Vec<(f64, f64)> {
        let mut a = self.atoms.clone();
        a.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        a
    }
}

#[derive(Debug, Clone)]
pub enum Measure {
    Empirical(EmpiricalMeasure),
    Density(Density1D),
}

impl Measure {
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        match self {
            Measure::Empirical(e) => e.expect(g),
            Measure::Density(d) => d.integrate(g),
        }
    }
}

impl From<EmpiricalMeasure> for Measure {
    fn from(e: EmpiricalMeasure) -> Self {
        Measure::Empirical(e)
    }
}

impl From<Density1D> for Measure {
    fn from(d: Density1D) -> Self {
        Measure::Density(d)
    }
}

/// Gaussian N(0, σ²) as a density.
pub fn centered_gaussian(sigma: f64) -> Density1D {
    let c = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let s2 = sigma * sigma;
    Density1D::new(format!("N(0,{s2})"), (f64::NEG_INFINITY, f64::INFINITY), move |x| c - x * x / (2.0 * s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_normalized_and_has_entropy() {
        let d = centered_gaussian(1.7).checked().unwrap();
        let h = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 1.7 * 1.7).ln();
        assert!((d.entropy() - h).abs() < 1e-10);
        assert!((d.integrate(|x| x * x) - 1.7 * 1.7).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_density_rejected() {
        let d = Density1D::new("bad", (0.0, 2.0), |_| 0.0);
        assert!(d.checked().is_err());
    }

    #[test]
    fn outside_support_is_minus_infinity() {
        let d = Density1D::new("u", (0.0, 1.0), |_| 0.0);
        assert_eq!(d.log_pdf(-0.1), f64::NEG_INFINITY);
        assert_eq!(d.log_pdf(1.1), f64::NEG_INFINITY);
    }

    #[test]
    fn cdf_table_matches_gaussian() {
        let t = CdfTable::new(&centered_gaussian(1.0), 4096);
        for &x in &[-2.0, -0.5, 0.0, 1.3] {
            assert!((t.cdf_at(x) - crate::special::normal_cdf(x)).abs() < 1e-6);
        }
        assert!((t.quantile(0.975) - 1.959_964).abs() < 1e-3);
    }

    #[test]
    fn empirical_weights_validated() {
        assert!(EmpiricalMeasure::weighted(vec![(0.0, 0.5), (1.0, 0.4)]).is_err());
        let e = EmpiricalMeasure::weighted(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(e.expect(|x| x), 1.0);
        assert!(EmpiricalMeasure::uniform(&[]).is_err());
    }
}

//! Rates for random projections of thin-shell vectors: constant, sublinear and linear
//! regimes, and the catalog of norm rates J_X.

use std::fmt;
use std::sync::Arc;

use crate::distributions::moment_mpq;
use crate::error::{Error, Flag, Flagged, Result};
use crate::measure::{centered_gaussian, Density1D, Measure};
use crate::optim;
use crate::orlicz::{self, OrliczFunction};
use crate::quad;
use crate::ratecalc::{legendre_1d, lq_lp_conjugate, LqLpConjugate, CumulantFunction, RateFunction, Speed};
use crate::special::normal_cdf;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionLabel {
    /// LDP for ‖X‖₂/√n at speed n.
    AStar,
    /// LDP at a speed slower than n.
    B,
    A,
}

impl fmt::Display for AssumptionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssumptionLabel::AStar => "Astar",
            AssumptionLabel::B => "B",
            AssumptionLabel::A => "A",
        })
    }
}

/// Rate J_X of ‖X‖₂/√n with its speed and zero.
#[derive(Debug, Clone)]
pub struct ThinShellAssumption {
    pub label: AssumptionLabel,
    pub speed: Speed,
    pub jx: RateFunction,
    pub minimizer_m: Option<f64>,
    /// Almost-sure limit of ‖X‖₂/√n.
    pub typical: Option<f64>,
}

impl ThinShellAssumption {
    pub fn new(label: AssumptionLabel, speed: Speed, jx: RateFunction, minimizer_m: Option<f64>) -> Result<Self> {
        if let Some(m) = minimizer_m {
            let v = jx.eval(m);
            if !(v.abs() <= 1e-9) {
                return Err(Error::Invalid(format!("J_X({m}) = {v} is not zero")));
            }
        }
        Ok(ThinShellAssumption { label, speed, jx, minimizer_m, typical: minimizer_m })
    }

    /// X uniform in n^{1/p}𝔹_p^n.
    pub fn lp_ball(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("ℓ_p catalog needs finite p ≥ 1, got {p}")));
        }
        if p < 2.0 {
            let jx = RateFunction::new(move |x| jx_lp_low(x, p), "[0, ∞)", Speed::NPow(2.0 * p / (2.0 + p)), Some(0.0));
            let mut a = Self::new(AssumptionLabel::B, Speed::NPow(2.0 * p / (2.0 + p)), jx, Some(0.0))?;
            a.typical = Some(moment_mpq(p, 2.0)?.sqrt());
            Ok(a)
        } else if p == 2.0 {
            Self::new(AssumptionLabel::AStar, Speed::N, RateFunction::new(jx_p2, "(0, 1]", Speed::N, Some(1.0)), Some(1.0))
        } else {
            let m = moment_mpq(p, 2.0)?.sqrt();
            let jx = RateFunction::new(move |x| jx_lp(x, p).map(|v| v.value).unwrap_or(f64::NAN), "(0, 1)", Speed::N, Some(m));
            Self::new(AssumptionLabel::AStar, Speed::N, jx, Some(m))
        }
    }

    /// X uniform in the Orlicz ball {Σ M(xᵢ) ≤ n}, M superquadratic.
    pub fn orlicz_ball(m: &OrliczFunction) -> Result<Self> {
        let z = OrliczJx::new(m)?;
        let zm = z.minimizer;
        let z = Arc::new(z);
        let jx = RateFunction::new(move |x| z.eval(x).value, "(0, ∞)", Speed::N, Some(zm));
        let mut a = Self::new(AssumptionLabel::AStar, Speed::N, jx, None)?;
        a.minimizer_m = Some(zm);
        a.typical = Some(zm);
        Ok(a)
    }

    /// X with iid coordinates whose square has cumulant `lambda`.
    pub fn product(lambda: CumulantFunction) -> Result<Self> {
        let h = 1e-5;
        let m = ((lambda.eval(&[h]) - lambda.eval(&[-h])) / (2.0 * h)).sqrt();
        let l = lambda.clone();
        let jx = RateFunction::new(move |x| jx_product(&l, x).map(|v| v.value).unwrap_or(f64::NAN), "(0, ∞)", Speed::N, Some(m));
        let mut a = Self::new(AssumptionLabel::AStar, Speed::N, jx, None)?;
        a.minimizer_m = Some(m);
        a.typical = Some(m);
        Ok(a)
    }
}

fn jx_lp_low(x: f64, p: f64) -> f64 {
    if x < 0.0 { f64::INFINITY } else { x.powf(p) / p }
}

fn jx_p2(x: f64) -> f64 {
    if x > 0.0 && x <= 1.0 { -x.ln() } else { f64::INFINITY }
}

/// J_X for X uniform in n^{1/p}𝔹_p^n.
pub fn jx_lp(x: f64, p: f64) -> Result<Flagged> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("jx_lp needs finite p ≥ 1, got {p}")));
    }
    if p < 2.0 {
        return Ok(Flagged::ok(jx_lp_low(x, p)));
    }
    if p == 2.0 {
        return Ok(if x > 0.0 && x <= 1.0 { Flagged::ok(-x.ln()) } else { Flagged::infinite(Flag::OutsideDomain) });
    }
    if !(x > 0.0 && x < 1.0) {
        return Ok(Flagged::infinite(Flag::OutsideDomain));
    }
    // inf over y ≥ x of log(y/x) + Λ*(y², 1), Λ the joint cumulant of (Y², |Y|^p)
    let m = moment_mpq(p, 2.0)?.sqrt();
    let worst = std::cell::Cell::new(None);
    let conj = LqLpConjugate::new(p, 2.0);
    let obj = |y: f64| {
        if y < x || y >= 1.0 {
            return f64::INFINITY;
        }
        let r = conj.eval(y * y, 1.0);
        if r.flag == Some(Flag::NotConverged) {
            worst.set(r.flag);
        }
        (y / x).ln() + r.value
    };
    if x >= m {
        // both terms increase in y past the zero of Λ*
        let r = lq_lp_conjugate(x * x, 1.0, p, 2.0);
        return Ok(Flagged::ok(r.value.max(0.0)).merge_flag(r.flag.filter(|&f| f == Flag::NotConverged)));
    }
    let nodes: Vec<f64> = (0..=24).map(|i| x + (m - x) * i as f64 / 24.0).collect();
    let r = optim::minimize_nodes_tol(obj, &nodes, 1e-5);
    Ok(Flagged::ok(r.value.max(0.0)).merge_flag(worst.get()))
}

/// Λ*_{X²}(x²) for x ≥ 0.
pub fn jx_product(cumulant_of_square: &CumulantFunction, x: f64) -> Result<Flagged> {
    if x < 0.0 {
        return Ok(Flagged::infinite(Flag::OutsideDomain));
    }
    legendre_1d(cumulant_of_square, x * x)
}

/// Chi-square cumulant −½ log(1 − 2t) of the square of a standard Gaussian.
pub fn chi_square_cumulant() -> CumulantFunction {
    CumulantFunction::scalar(|t: f64| if t < 0.5 { -0.5 * (1.0 - 2.0 * t).ln() } else { f64::INFINITY })
}

/// J_X for uniform vectors in a superquadratic Orlicz ball {Σ M(xᵢ) ≤ n}.
pub struct OrliczJx {
    m: OrliczFunction,
    kappa: CumulantFunction,
    alpha_star: f64,
    /// sup_{s<0} [s − log ∫ e^{sM}]
    offset: f64,
    pub minimizer: f64,
}

impl OrliczJx {
    pub fn new(m: &OrliczFunction) -> Result<Self> {
        if !m.superquadratic() {
            return Err(Error::Domain(format!(
                "{} is not superquadratic: the quadratic tilt direction is unbounded",
                m.name()
            )));
        }
        let sol = orlicz::solve_alpha_star(m, 1.0)?;
        let offset = sol.alpha_star - sol.phi_at;
        let kappa = joint_orlicz_cumulant(m);
        let (g, _) = kappa.derivatives(&[sol.alpha_star, 0.0]).ok_or_else(|| Error::Numerical("Gibbs moments failed".into()))?;
        let minimizer = g[1].sqrt();
        Ok(OrliczJx { m: m.clone(), kappa, alpha_star: sol.alpha_star, offset, minimizer })
    }

    pub fn orlicz(&self) -> &OrliczFunction {
        &self.m
    }

    pub fn eval(&self, z: f64) -> Flagged {
        if !(z > 0.0) {
            return Flagged::infinite(Flag::OutsideDomain);
        }
        let (v, _, flag) = crate::ratecalc::legendre_nd_from(&self.kappa, &[1.0, z * z], &[self.alpha_star, 0.0]);
        let j = v - self.offset;
        if !j.is_finite() {
            return Flagged::infinite(flag.unwrap_or(Flag::UnboundedSup));
        }
        Flagged { value: j.max(0.0), flag }
    }
}

impl fmt::Debug for OrliczJx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrliczJx({}, m = {})", self.m.name(), self.minimizer)
    }
}

/// K(s, t) = log ∫ e^{sM(x) + tx²} dx on s < 0, with moment derivatives (M, x²).
/// `derivatives` returns the mean vector in place of the gradient.
fn joint_orlicz_cumulant(m: &OrliczFunction) -> CumulantFunction {
    let top = m.domain_bound().unwrap_or(f64::INFINITY);
    let m1 = m.clone();
    let f = move |t: &[f64]| {
        if !(t[0] < 0.0) {
            return f64::INFINITY;
        }
        let (s, u) = (t[0], t[1]);
        2f64.ln() + quad::log_integral_exp(|x| s * m1.eval(x) + u * x * x, 0.0, top)
    };
    let m2 = m.clone();
    let derivs = move |t: &[f64]| -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        if !(t[0] < 0.0) {
            return None;
        }
        let (s, u) = (t[0], t[1]);
        let mm = m2.clone();
        let mv = |x: f64| mm.eval(x);
        let mom = quad::exp_moments(
            |x| s * m2.eval(x) + u * x * x,
            0.0,
            top,
            &[&mv, &|x: f64| x * x, &|x: f64| mv(x) * mv(x), &|x: f64| mv(x) * x * x, &|x: f64| x.powi(4)],
        );
        if mom.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let g = vec![mom[0], mom[1]];
        let h = vec![
            vec![mom[2] - mom[0] * mom[0], mom[3] - mom[0] * mom[1]],
            vec![mom[3] - mom[0] * mom[1], mom[4] - mom[1] * mom[1]],
        ];
        Some((g, h))
    };
    CumulantFunction::new(2, f, |t| t[0] < 0.0).with_derivatives(Arc::new(derivs))
}

/// J_X at ‖x‖₂/c optimized over c, with the envelope value at the origin.
pub fn rate_projection_constant(x: &[f64], a: &ThinShellAssumption) -> Result<Flagged> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(match a.minimizer_m {
            Some(_) => Flagged::ok(0.0),
            None => rate_projection_constant(&[1e-9], a)?,
        });
    }
    match a.label {
        AssumptionLabel::AStar => {
            // u = r/c ranges over (r, ∞)
            let obj = |v: f64| {
                let u = r * v.exp();
                let c = r / u;
                a.jx.eval(u) - 0.5 * (1.0 - c * c).ln()
            };
            Ok(minimize_log_axis(obj, 1e-12, 40.0))
        }
        AssumptionLabel::B => {
            let obj = |v: f64| {
                let c = v.exp();
                a.jx.eval(r / c) + 0.5 * c * c
            };
            Ok(minimize_log_axis(obj, -40.0, 10.0))
        }
        AssumptionLabel::A => Err(Error::Domain("the constant regime needs assumption Astar or B".into())),
    }
}

fn minimize_log_axis<F: Fn(f64) -> f64>(obj: F, lo: f64, hi: f64) -> Flagged {
    let mut nodes = optim::clustered_nodes(lo, hi, 200);
    nodes.insert(0, lo);
    nodes.push(hi);
    let r = optim::minimize_nodes(&obj, &nodes);
    if !r.value.is_finite() {
        return Flagged::infinite(Flag::OutsideDomain);
    }
    let out = Flagged::ok(r.value.max(0.0));
    if r.at_boundary { out.merge_flag(Some(Flag::BoundaryOptimum)) } else { out }
}

/// −½ log(1 − ‖y‖₂²), the rate of a row of a Haar frame.
pub fn rate_row_haar(y: &[f64]) -> f64 {
    let s: f64 = y.iter().map(|v| v * v).sum();
    if s < 1.0 { -0.5 * (1.0 - s).ln() } else { f64::INFINITY }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SublinearRegime {
    /// s_n ≫ k_n
    SggK,
    /// s_n = k_n
    SeqK,
    /// s_n ≪ k_n
    SllK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearRegime {
    SeqN,
    SllN,
}

/// Tolerance of the Gaussian fingerprint test for an empirical measure with `n` atoms.
pub fn gaussian_tolerance(n: Option<usize>) -> f64 {
    match n {
        None => 1e-3,
        Some(n) => 1e-3f64.max(1.63 / (n as f64).sqrt()),
    }
}

/// Scale c if μ is detected as N(0, c²): moments up to order four and a KS distance.
/// Returns (c, distance, tolerance).
pub fn gaussian_fingerprint(mu: &Measure) -> (f64, f64, f64) {
    let m1 = mu.expect(|x| x);
    let m2 = mu.expect(|x| x * x);
    let m3 = mu.expect(|x| x * x * x);
    let m4 = mu.expect(|x| x.powi(4));
    let c = m2.sqrt();
    let moment_gap = (m1.abs() / c).max(m3.abs() / (c * c * c)).max((m4 / (m2 * m2) - 3.0).abs() / 3.0);
    let (ks, tol) = match mu {
        Measure::Empirical(e) => (stats::ks_one_sample(&e.points(), |x| normal_cdf(x / c)), gaussian_tolerance(Some(e.len()))),
        Measure::Density(d) => {
            let (lo, hi) = d.effective_range();
            let mut worst: f64 = 0.0;
            let mut acc = 0.0;
            let k = 2000;
            let mut prev = lo;
            for i in 1..=k {
                let x = lo + (hi - lo) * i as f64 / k as f64;
                acc += quad::integrate(|t| d.pdf(t), prev, x);
                prev = x;
                worst = worst.max((acc - normal_cdf(x / c)).abs());
            }
            (worst, gaussian_tolerance(None))
        }
    };
    let dist = match mu {
        Measure::Empirical(_) => ks,
        Measure::Density(_) => ks.max(moment_gap),
    };
    (c, dist, tol)
}

fn gaussian_indicator_rate(mu: &Measure, a: &ThinShellAssumption) -> Flagged {
    let (c, dist, tol) = gaussian_fingerprint(mu);
    if dist <= tol {
        let v = a.jx.eval(c);
        if v.is_finite() { Flagged::ok(v) } else { Flagged::infinite(Flag::OutsideDomain) }
    } else if dist <= 2.0 * tol {
        Flagged::infinite(Flag::Ambiguous)
    } else {
        Flagged::infinite(Flag::OutsideDomain)
    }
}

/// Level-2 rate of the empirical measure of a projection with k_n = o(n) coordinates.
pub fn rate_sublinear(mu: &Measure, a: &ThinShellAssumption, regime: SublinearRegime) -> Result<Flagged> {
    match regime {
        SublinearRegime::SggK => {
            let m = a.minimizer_m.ok_or_else(|| Error::Invalid("regime s ≫ k needs the minimizer m".into()))?;
            let v = crate::ratecalc::relative_entropy(mu, &centered_gaussian(m));
            Ok(if v.is_finite() { Flagged::ok(v) } else { Flagged::infinite(Flag::OutsideDomain) })
        }
        SublinearRegime::SeqK => {
            let d = match mu {
                Measure::Density(d) => d,
                Measure::Empirical(_) => return Ok(Flagged::infinite(Flag::OutsideDomain)),
            };
            let h = d.entropy();
            let m2 = d.integrate(|x| x * x);
            if !h.is_finite() || !m2.is_finite() {
                return Ok(Flagged::infinite(Flag::OutsideDomain));
            }
            // H(μ | N(0, c²)) = −h(μ) + ½ log(2πc²) + M₂/(2c²)
            let obj = |v: f64| {
                let c = v.exp();
                -h + 0.5 * (2.0 * std::f64::consts::PI * c * c).ln() + m2 / (2.0 * c * c) + a.jx.eval(c)
            };
            Ok(minimize_log_axis(obj, -20.0, 20.0))
        }
        SublinearRegime::SllK => Ok(gaussian_indicator_rate(mu, a)),
    }
}

/// Level-2 rate of the empirical measure of a projection with k_n = λn coordinates.
pub fn rate_linear(mu: &Measure, a: &ThinShellAssumption, lambda: f64, regime: LinearRegime) -> Result<Flagged> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("λ must be in (0, 1], got {lambda}")));
    }
    match regime {
        LinearRegime::SllN => Ok(gaussian_indicator_rate(mu, a)),
        LinearRegime::SeqN => {
            let d: &Density1D = match mu {
                Measure::Density(d) => d,
                // no density: h(ν) = −∞ makes this branch +∞
                Measure::Empirical(_) => return Ok(Flagged::infinite(Flag::Convention)),
            };
            let h = d.entropy();
            let m2 = d.integrate(|x| x * x);
            if !h.is_finite() || !m2.is_finite() {
                return Ok(Flagged::infinite(Flag::OutsideDomain));
            }
            let xlogx = |u: f64| if u == 0.0 { 0.0 } else { u * u.ln() };
            let tail = -lambda * h + 0.5 * lambda * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + 0.5 * xlogx(1.0 - lambda);
            let c0 = (lambda * m2).sqrt();
            let at = |c: f64| {
                let ratio = lambda * m2 / (c * c);
                let mid = if lambda == 1.0 { 0.0 } else { -0.5 * (1.0 - lambda) * (1.0 - ratio).ln() };
                a.jx.eval(c) + mid + lambda * c.ln()
            };
            let obj = |v: f64| at(c0 * (1.0 + v.exp()));
            // at λ = 1 the middle term vanishes and c = c₀ is admissible
            let edge = if lambda == 1.0 { at(c0) } else { f64::INFINITY };
            let r = minimize_log_axis(obj, -30.0, 10.0);
            if !r.value.is_finite() && !edge.is_finite() {
                return Ok(r);
            }
            // undo the clamp at zero applied by the search helper
            let raw = {
                let nodes = optim::clustered_nodes(-30.0, 10.0, 200);
                optim::minimize_nodes(obj, &nodes).value.min(edge)
            };
            Ok(Flagged { value: (raw + tail).max(0.0), flag: r.flag })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::EmpiricalMeasure;
    use crate::rng;
    use rand_distr::{Distribution, Normal};

    fn p2() -> ThinShellAssumption {
        ThinShellAssumption::lp_ball(2.0).unwrap()
    }

    #[test]
    fn constant_regime_examples() {
        let a = p2();
        let v = rate_projection_constant(&[0.3, 0.4], &a).unwrap().value;
        assert!((v - 0.14384).abs() < 1e-5);
        assert_eq!(rate_projection_constant(&[0.0, 0.0], &a).unwrap().value, 0.0);
        let b = ThinShellAssumption::lp_ball(1.0).unwrap();
        let v = rate_projection_constant(&[1.0], &b).unwrap().value;
        assert!((v - 1.5).abs() < 1e-8);
        for i in 1..50 {
            let r = 0.02 * i as f64;
            let v = rate_projection_constant(&[r], &a).unwrap().value;
            assert!((v + 0.5 * (1.0 - r * r).ln()).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn row_haar() {
        assert_eq!(rate_row_haar(&[0.0, 0.0]), 0.0);
        assert_eq!(rate_row_haar(&[1.0, 0.0]), f64::INFINITY);
        let s = (1.0 - (-2f64).exp()).sqrt();
        assert!((rate_row_haar(&[s]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jx_catalog() {
        assert_eq!(jx_lp(2.0, 1.0).unwrap().value, 2.0);
        assert_eq!(jx_lp(1.0, 2.0).unwrap().value, 0.0);
        let m4 = moment_mpq(4.0, 2.0).unwrap().sqrt();
        assert!(jx_lp(m4, 4.0).unwrap().value < 1e-8);
        assert!(jx_lp(1.1 * m4, 4.0).unwrap().value > 1e-4);
        assert!(jx_lp(0.9 * m4, 4.0).unwrap().value > 1e-4);
        let chi = chi_square_cumulant();
        assert!(jx_product(&chi, 1.0).unwrap().value.abs() < 1e-12);
        let x: f64 = 1.7;
        assert!((jx_product(&chi, x).unwrap().value - (x * x - 1.0 - 2.0 * x.ln()) / 2.0).abs() < 1e-10);
        assert_eq!(jx_product(&chi, -0.1).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn orlicz_jx() {
        let m = OrliczFunction::power(4.0).unwrap();
        let j = OrliczJx::new(&m).unwrap();
        assert!(j.eval(j.minimizer).value < 1e-6);
        assert!(j.eval(1.2 * j.minimizer).value > 1e-4);
        assert!(j.eval(0.8 * j.minimizer).value > 1e-4);
        assert!(OrliczJx::new(&OrliczFunction::power(1.5).unwrap()).is_err());
    }

    #[test]
    fn sublinear_cases() {
        let a = p2();
        let g1 = Measure::Density(centered_gaussian(1.0));
        assert!(rate_sublinear(&g1, &a, SublinearRegime::SggK).unwrap().value.abs() < 1e-12);
        let g = Measure::Density(centered_gaussian(0.6));
        let v = rate_sublinear(&g, &a, SublinearRegime::SllK).unwrap();
        assert!((v.value + 0.6f64.ln()).abs() < 1e-6, "{v:?}");
        let lap = Measure::Density(crate::distributions::p_gaussian_density(1.0));
        assert_eq!(rate_sublinear(&lap, &a, SublinearRegime::SllK).unwrap().value, f64::INFINITY);
        // closed-form Gaussian entropy plus −log c' on a fine grid
        let s: f64 = 0.7;
        let v = rate_sublinear(&g, &a, SublinearRegime::SeqK).unwrap().value;
        let _ = s;
        let sigma: f64 = 0.6;
        let mut best = f64::INFINITY;
        for i in 1..=200_000 {
            let c = i as f64 * 1e-5 * 2.0;
            if c > 1.0 {
                break;
            }
            let q = sigma * sigma / (c * c);
            best = best.min(0.5 * (q - 1.0 - q.ln()) - c.ln());
        }
        assert!((v - best).abs() < 1e-4, "{v} vs {best}");
    }

    #[test]
    fn sublinear_monotone_perturbations() {
        let a = p2();
        let mut prev = 0.0;
        for k in 1..=10 {
            let s = 1.0 + 0.05 * k as f64;
            let v = rate_sublinear(&Measure::Density(centered_gaussian(s)), &a, SublinearRegime::SggK).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
        let mut prev = 0.0;
        for k in 1..=10 {
            let mu = 0.1 * k as f64;
            let d = Density1D::new("shift", (f64::NEG_INFINITY, f64::INFINITY), move |x| {
                -0.5 * (x - mu) * (x - mu) - 0.5 * (2.0 * std::f64::consts::PI).ln()
            });
            let v = rate_sublinear(&Measure::Density(d), &a, SublinearRegime::SggK).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn empirical_gaussian_fingerprint() {
        let mut r = rng::seeded(3);
        let nd = Normal::new(0.0, 0.8).unwrap();
        let xs: Vec<f64> = (0..20_000).map(|_| nd.sample(&mut r)).collect();
        let e = Measure::Empirical(EmpiricalMeasure::uniform(&xs).unwrap());
        let v = rate_sublinear(&e, &p2(), SublinearRegime::SllK).unwrap();
        assert!((v.value + 0.8f64.ln()).abs() < 0.02);
        let ys: Vec<f64> = (0..20_000).map(|_| crate::distributions::p_gaussian_sample(1.0, &mut r)).collect();
        let e = Measure::Empirical(EmpiricalMeasure::uniform(&ys).unwrap());
        assert_eq!(rate_sublinear(&e, &p2(), SublinearRegime::SllK).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn linear_cases() {
        let a = p2();
        let g = Measure::Density(centered_gaussian(0.5));
        let v = rate_linear(&g, &a, 0.5, LinearRegime::SllN).unwrap().value;
        assert!((v + 0.5f64.ln()).abs() < 1e-6);
        let g1 = Measure::Density(centered_gaussian(1.0));
        let vals: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&l| rate_linear(&g1, &a, l, LinearRegime::SeqN).unwrap().value).collect();
        assert!(vals.iter().all(|&v| v < 1e-8), "{vals:?}");
        let e = Measure::Empirical(EmpiricalMeasure::uniform(&[0.0, 1.0]).unwrap());
        let v = rate_linear(&e, &a, 0.5, LinearRegime::SeqN).unwrap();
        assert_eq!(v.value, f64::INFINITY);
        assert!(rate_linear(&g1, &a, 1.0, LinearRegime::SeqN).unwrap().value.is_finite());
        let s: f64 = 1.3;
        let h = centered_gaussian(s).entropy();
        assert!((h - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * s * s).ln()).abs() < 1e-8);
    }
}

use std::cell::Cell;

use crate::measure::{integrate_segment, integrate_segment_with, Density1D, EmpiricalMeasure, Measure};
use crate::quad::QuadOpts;

/// H(ν | λ) = ∫ f log f dλ with f = dν/dλ; +∞ without absolute continuity.
///
/// Empirical measures are never absolutely continuous with respect to a density, so
/// they give +∞; see [`relative_entropy_smoothed`] for a kernel estimate.
pub fn relative_entropy(nu: &Measure, lambda: &Density1D) -> f64 {
    match nu {
        Measure::Empirical(_) => f64::INFINITY,
        Measure::Density(d) => density_relative_entropy(d, lambda),
    }
}

fn density_relative_entropy(nu: &Density1D, lambda: &Density1D) -> f64 {
    let singular = Cell::new(false);
    let h = |x: f64| {
        let a = nu.log_pdf(x);
        if a == f64::NEG_INFINITY {
            return 0.0;
        }
        let b = lambda.log_pdf(x);
        if b == f64::NEG_INFINITY {
            singular.set(true);
            return 0.0;
        }
        a.exp() * (a - b)
    };
    let mut edges = nu.edges();
    for &bp in &lambda.breakpoints {
        if bp > edges[0] && bp < *edges.last().unwrap() {
            edges.push(bp);
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let v: f64 = edges.windows(2).map(|w| integrate_segment(&h, w[0], w[1])).sum();
    if singular.get() || !v.is_finite() {
        return f64::INFINITY;
    }
    v.max(0.0)
}

/// Approximation of H(ν | λ) for an empirical ν through a Gaussian kernel density
/// estimate with the given bandwidth.
pub fn relative_entropy_smoothed(nu: &EmpiricalMeasure, lambda: &Density1D, bandwidth: f64) -> f64 {
    let atoms = nu.atoms().to_vec();
    let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min) - 12.0 * bandwidth;
    let hi = atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max) + 12.0 * bandwidth;
    let c = -(bandwidth * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let kde = Density1D::new("kde", (lo, hi), move |x| {
        let terms: Vec<f64> =
            atoms.iter().map(|&(a, w)| w.ln() + c - (x - a) * (x - a) / (2.0 * bandwidth * bandwidth)).collect();
        crate::special::log_sum_exp(&terms)
    });
    density_relative_entropy(&kde, lambda)
}

/// Logarithmic energy ∬ log|x − y| μ(dx) μ(dy); the diagonal is excluded for atoms.
pub fn log_energy(mu: &Measure) -> f64 {
    match mu {
        Measure::Empirical(e) => empirical_log_energy(e),
        Measure::Density(d) => density_log_energy(d),
    }
}

fn empirical_log_energy(e: &EmpiricalMeasure) -> f64 {
    let a = e.sorted();
    if a.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let d = a[j].0 - a[i].0;
            if d == 0.0 {
                if a[i].1 > 0.0 && a[j].1 > 0.0 {
                    return f64::NEG_INFINITY;
                }
                continue;
            }
            total += 2.0 * a[i].1 * a[j].1 * d.ln();
        }
    }
    total
}

/// Logarithmic potential U(x) = ∫ log|x − y| μ(dy).
pub fn log_potential(d: &Density1D, x: f64) -> f64 {
    let mut edges = d.edges();
    if x > edges[0] && x < *edges.last().unwrap() {
        edges.push(x);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
    }
    let h = |y: f64| {
        let lp = d.log_pdf(y);
        if lp == f64::NEG_INFINITY || y == x {
            0.0
        } else {
            (x - y).abs().ln() * lp.exp()
        }
    };
    let opts = QuadOpts { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 400 };
    edges.windows(2).map(|w| integrate_segment_with(&h, w[0], w[1], &opts)).sum()
}

fn density_log_energy(d: &Density1D) -> f64 {
    let h = |x: f64| {
        let lp = d.log_pdf(x);
        if lp == f64::NEG_INFINITY { 0.0 } else { lp.exp() * log_potential(d, x) }
    };
    let opts = QuadOpts { abs_tol: 1e-12, rel_tol: 1e-9, max_intervals: 200 };
    d.edges().windows(2).map(|w| integrate_segment_with(&h, w[0], w[1], &opts)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{p_gaussian_density, UllmanLaw};
    use crate::measure::centered_gaussian;

    #[test]
    fn entropy_examples() {
        let n1 = centered_gaussian(1.0);
        assert!(relative_entropy(&Measure::Density(n1.clone()), &n1).abs() < 1e-12);
        let n2 = Measure::Density(centered_gaussian(2f64.sqrt()));
        let v = relative_entropy(&n2, &n1);
        assert!((v - (2.0 - 1.0 - 2f64.ln()) / 2.0).abs() < 1e-10);
        assert!((v - 0.15343).abs() < 1e-5);
    }

    #[test]
    fn laplace_vs_gaussian_two_quadratures() {
        let lap = p_gaussian_density(1.0);
        let n1 = centered_gaussian(1.0);
        let v = relative_entropy(&Measure::Density(lap.clone()), &n1);
        // independent midpoint Riemann sum on a fine grid
        let h = 1e-4;
        let mut r = 0.0;
        let mut x = -60.0 + 0.5 * h;
        while x < 60.0 {
            let a = lap.log_pdf(x);
            r += a.exp() * (a - n1.log_pdf(x)) * h;
            x += h;
        }
        assert!(v >= 0.0);
        assert!((v - r).abs() < 1e-5, "{v} vs {r}");
    }

    #[test]
    fn absolute_continuity_failures() {
        let n1 = centered_gaussian(1.0);
        let u = Density1D::new("u", (0.0, 1.0), |_| 0.0);
        assert_eq!(relative_entropy(&Measure::Density(n1.clone()), &u), f64::INFINITY);
        let e = EmpiricalMeasure::uniform(&[0.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&Measure::Empirical(e.clone()), &n1), f64::INFINITY);
        assert!(relative_entropy_smoothed(&e, &n1, 0.3).is_finite());
    }

    #[test]
    fn smoothed_estimator_tracks_truth() {
        let mut r = crate::rng::seeded(5);
        use rand_distr::{Distribution, Normal};
        let nd = Normal::new(0.0, 2f64.sqrt()).unwrap();
        let xs: Vec<f64> = (0..4000).map(|_| nd.sample(&mut r)).collect();
        let e = EmpiricalMeasure::uniform(&xs).unwrap();
        let v = relative_entropy_smoothed(&e, &centered_gaussian(1.0), 0.2);
        assert!((v - 0.15343).abs() < 0.05);
    }

    #[test]
    fn energy_examples() {
        let sc = UllmanLaw::new(2.0).unwrap().density;
        assert!((log_energy(&Measure::Density(sc)) + 0.25).abs() < 1e-4);
        let u = Density1D::new("u", (-1.0, 1.0), |_| 0.5f64.ln());
        assert!((log_energy(&Measure::Density(u)) - (2f64.ln() - 1.5)).abs() < 1e-7);
        let single = EmpiricalMeasure::uniform(&[0.3]).unwrap();
        assert_eq!(log_energy(&Measure::Empirical(single)), f64::NEG_INFINITY);
        let dup = EmpiricalMeasure::uniform(&[0.3, 0.3, 1.0]).unwrap();
        assert_eq!(log_energy(&Measure::Empirical(dup)), f64::NEG_INFINITY);
        let arcsine = UllmanLaw::new(f64::INFINITY).unwrap().density;
        assert!((log_energy(&Measure::Density(arcsine)) + 2f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn empirical_energy_two_points() {
        let e = EmpiricalMeasure::uniform(&[0.0, 2.0]).unwrap();
        assert!((log_energy(&Measure::Empirical(e)) - 0.5 * 2f64.ln()).abs() < 1e-15);
    }
}

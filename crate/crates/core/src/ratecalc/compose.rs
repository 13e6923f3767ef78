use super::RateFunction;
use crate::error::{Flag, Flagged};
use crate::optim;

/// inf { base(x) : x ∈ [lo, hi], map(x) = y } for a one-dimensional base rate.
///
/// The fiber is located by scanning for sign changes of map(x) − y and refining each
/// root; points already inside the tolerance band count as fiber points.
pub fn contract_rate<M: Fn(f64) -> f64>(base: &RateFunction, map: M, y: f64, region: (f64, f64)) -> Flagged {
    let (lo, hi) = region;
    let n = 4000;
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let r: Vec<f64> = xs.iter().map(|&x| map(x) - y).collect();
    let band = 1e-10 * (1.0 + y.abs());
    let mut fiber = Vec::new();
    for i in 0..=n {
        if r[i].abs() <= band {
            fiber.push(xs[i]);
        }
        if i < n && r[i].is_finite() && r[i + 1].is_finite() && r[i] * r[i + 1] < 0.0 {
            if let Ok(root) = optim::root_brent(|x| map(x) - y, xs[i], xs[i + 1], 1e-15 * (1.0 + xs[i].abs())) {
                fiber.push(root);
            }
        }
    }
    if fiber.is_empty() {
        return Flagged::infinite(Flag::OutsideDomain);
    }
    let (mut best, mut arg) = (f64::INFINITY, fiber[0]);
    for &x in &fiber {
        let v = base.eval(x);
        if v < best {
            best = v;
            arg = x;
        }
    }
    let edge = 1e-9 * (hi - lo);
    if (arg - lo).abs() <= edge || (hi - arg).abs() <= edge {
        Flagged::with(best, Flag::BoundaryOptimum)
    } else {
        Flagged::ok(best)
    }
}

/// inf { base(x) : x ∈ box, map(x) = y } on a box in ℝ^d by a penalty method.
pub fn contract_rate_nd<B, M>(base: B, map: M, y: f64, region: &[(f64, f64)]) -> Flagged
where
    B: Fn(&[f64]) -> f64,
    M: Fn(&[f64]) -> f64,
{
    let d = region.len();
    let inside = |x: &[f64]| x.iter().zip(region).all(|(v, r)| *v >= r.0 && *v <= r.1);
    let per_axis: usize = if d <= 2 { 9 } else { 5 };
    let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
    let total = per_axis.pow(d as u32);
    for k in 0..total {
        let mut idx = k;
        let x: Vec<f64> = region
            .iter()
            .map(|r| {
                let i = idx % per_axis;
                idx /= per_axis;
                r.0 + (r.1 - r.0) * (i as f64 + 0.5) / per_axis as f64
            })
            .collect();
        let v = base(&x) + 1e2 * (map(&x) - y).powi(2);
        if v.is_finite() {
            starts.push((v, x));
        }
    }
    starts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    starts.truncate(4);
    let mut best = f64::INFINITY;
    let mut best_x: Option<Vec<f64>> = None;
    for (_, x0) in starts {
        let mut x = x0;
        for &mu in &[1e2, 1e4, 1e6, 1e8, 1e10] {
            let obj = |z: &[f64]| {
                if !inside(z) {
                    return f64::INFINITY;
                }
                base(z) + mu * (map(z) - y).powi(2)
            };
            let step = region.iter().map(|r| 0.05 * (r.1 - r.0)).fold(f64::INFINITY, f64::min);
            let (xn, _, _) = optim::nelder_mead(obj, &x, step / mu.log10(), 1e-14, 4000);
            x = xn;
        }
        if (map(&x) - y).abs() <= 1e-5 * (1.0 + y.abs()) {
            let v = base(&x);
            if v < best {
                best = v;
                best_x = Some(x);
            }
        }
    }
    match best_x {
        None => Flagged::infinite(Flag::OutsideDomain),
        Some(x) => {
            let near = x.iter().zip(region).any(|(v, r)| (v - r.0).abs() < 1e-6 * (r.1 - r.0) || (r.1 - v).abs() < 1e-6 * (r.1 - r.0));
            if near { Flagged::with(best, Flag::BoundaryOptimum) } else { Flagged::ok(best) }
        }
    }
}

/// inf over z = z₁z₂ (z₁, z₂ ≥ 0) of r1(z₁) + r2(z₂).
pub fn combine_independent_product(r1: &RateFunction, r2: &RateFunction, z: f64) -> Flagged {
    if z < 0.0 {
        return Flagged::infinite(Flag::OutsideDomain);
    }
    if z == 0.0 {
        // z₁ = 0 with z₂ free, or z₂ = 0 with z₁ free; a rate function has infimum 0
        return Flagged::ok(r1.eval(0.0).min(r2.eval(0.0)));
    }
    let obj = |u: f64| {
        let z1 = u.exp();
        r1.eval(z1) + r2.eval(z / z1)
    };
    let mut nodes: Vec<f64> = (0..=1200).map(|i| -30.0 + 60.0 * i as f64 / 1200.0).collect();
    for extra in [0.0, z.ln()] {
        for k in -40..=40 {
            nodes.push(extra + k as f64 * 1e-3);
        }
    }
    if let Some(m) = r2.minimizer {
        if m > 0.0 {
            nodes.push((z / m).ln());
        }
    }
    if let Some(m) = r1.minimizer {
        if m > 0.0 {
            nodes.push(m.ln());
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();
    let m = optim::minimize_nodes(obj, &nodes);
    if !m.value.is_finite() {
        return Flagged::infinite(Flag::OutsideDomain);
    }
    if m.at_boundary {
        Flagged::with(m.value, Flag::BoundaryOptimum)
    } else {
        Flagged::ok(m.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratecalc::{rate_lqnorm_low, rate_uniform_power_fn, Speed};
    use crate::distributions::moment_mpq;

    #[test]
    fn identity_contraction() {
        let base = RateFunction::new(|x| x * x / 2.0, "R", Speed::N, Some(0.0));
        let v = contract_rate(&base, |x| x, 1.0, (-5.0, 5.0));
        assert!((v.value - 0.5).abs() < 1e-12);
        assert!(v.flag.is_none());
        let empty = contract_rate(&base, |x| x * x, -1.0, (-5.0, 5.0));
        assert_eq!(empty.value, f64::INFINITY);
        let sq = contract_rate(&base, |x| x * x, 4.0, (-5.0, 5.0));
        assert!((sq.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn product_norm_as_contraction() {
        let (p, q) = (1.0, 2.0);
        let m = moment_mpq(p, q).unwrap();
        let stretched = RateFunction::new(
            move |s: f64| if s >= m { (s - m).powf(p / q) / p } else { f64::INFINITY },
            "[M, ∞)",
            Speed::NPow(p / q),
            Some(m),
        );
        for &z in &[1.5, 2.0, 3.0, 5.0] {
            let v = contract_rate(&stretched, |s: f64| s.max(0.0).powf(1.0 / q), z, (0.0, 100.0));
            assert!((v.value - rate_lqnorm_low(z, p, q).unwrap()).abs() < 1e-8, "z={z}");
        }
    }

    #[test]
    fn nd_contraction_of_quadratic() {
        let v = contract_rate_nd(|x| 0.5 * (x[0] * x[0] + x[1] * x[1]), |x| x[0] + x[1], 2.0, &[(-4.0, 4.0), (-4.0, 4.0)]);
        assert!((v.value - 1.0).abs() < 1e-6, "{}", v.value);
        let e = contract_rate_nd(|x| x[0] * x[0], |x| x[0] * x[0], -1.0, &[(-1.0, 1.0)]);
        assert_eq!(e.value, f64::INFINITY);
    }

    #[test]
    fn product_combination() {
        let iu = rate_uniform_power_fn();
        let m = 0.8;
        let r2 = RateFunction::new(move |z| 3.0 * (z - m) * (z - m), "R", Speed::N, Some(m));
        assert!(combine_independent_product(&iu, &r2, m).value.abs() < 1e-12);
        let delta = RateFunction::new(|z| 1e8 * (z - 1.0) * (z - 1.0), "R", Speed::N, Some(1.0));
        let v = combine_independent_product(&iu, &delta, 0.5);
        assert!((v.value - 2f64.ln()).abs() < 1e-6, "{}", v.value);
        assert_eq!(combine_independent_product(&iu, &r2, 0.0).value, 3.0 * m * m);
        assert_eq!(combine_independent_product(&iu, &r2, -1.0).value, f64::INFINITY);
    }
}

/// [`combine_independent_product`] with the search for z₁ restricted to `[lo, hi]`,
/// for expensive component rates.
pub fn combine_independent_product_bracketed(r1: &RateFunction, r2: &RateFunction, z: f64, lo: f64, hi: f64) -> Flagged {
    if z <= 0.0 {
        return combine_independent_product(r1, r2, z);
    }
    let obj = |z1: f64| r1.eval(z1) + r2.eval(z / z1);
    if hi <= lo {
        let v = obj(lo);
        return if v.is_finite() { Flagged::ok(v) } else { Flagged::infinite(Flag::OutsideDomain) };
    }
    let nodes: Vec<f64> = (0..=6).map(|i| lo + (hi - lo) * i as f64 / 6.0).collect();
    let m = optim::minimize_nodes_tol(obj, &nodes, 1e-5);
    if !m.value.is_finite() {
        Flagged::infinite(Flag::OutsideDomain)
    } else {
        Flagged::ok(m.value)
    }
}

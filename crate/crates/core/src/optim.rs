//! One-dimensional and small-dimensional optimizers and root finders.

use crate::error::{Error, Result};

const GOLD: f64 = 0.381_966_011_250_105_1;

/// Brent's minimization on `[a, b]`. Returns (argmin, min).
pub fn brent_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, maxit: usize) -> (f64, f64) {
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..maxit {
        let m = 0.5 * (a + b);
        let tol = xtol * (x.abs() + 1e-3);
        let t2 = 2.0 * tol;
        if (x - m).abs() <= t2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < t2 || b - u < t2 {
                    d = if x < m { tol } else { -tol };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol { x + d } else if d > 0.0 { x + tol } else { x - tol };
        let mut fu = f(u);
        if fu.is_nan() {
            fu = f64::INFINITY;
        }
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Maximization counterpart of [`brent_min`].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, maxit: usize) -> (f64, f64) {
    let (x, v) = brent_min(
        |x| {
            let y = f(x);
            if y.is_nan() { f64::INFINITY } else { -y }
        },
        a,
        b,
        xtol,
        maxit,
    );
    (x, -v)
}

#[derive(Debug, Clone, Copy)]
pub struct Min1D {
    pub x: f64,
    pub value: f64,
    pub at_boundary: bool,
}

/// Global minimization on `[lo, hi]`: scan `nodes`, then refine around the best node.
pub fn minimize_nodes<F: Fn(f64) -> f64>(f: F, nodes: &[f64]) -> Min1D {
    minimize_nodes_tol(f, nodes, 1e-12)
}

/// [`minimize_nodes`] with the final Brent refinement stopped at `xtol`.
pub fn minimize_nodes_tol<F: Fn(f64) -> f64>(f: F, nodes: &[f64], xtol: f64) -> Min1D {
    let vals: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_nan() { f64::INFINITY } else { v }
        })
        .collect();
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    if !vals[best].is_finite() {
        return Min1D { x: nodes[best], value: vals[best], at_boundary: false };
    }
    let mut lo = nodes[best.saturating_sub(1)];
    let mut hi = nodes[(best + 1).min(nodes.len() - 1)];
    let (mut bx, mut bv) = (nodes[best], vals[best]);
    // a neighbour outside the effective domain: the minimum may sit on its edge
    for (side, &nb) in [(-1, &lo), (1, &hi)] {
        let j = if side < 0 { best.checked_sub(1) } else { Some(best + 1).filter(|&j| j < nodes.len()) };
        if let Some(j) = j {
            if !vals[j].is_finite() {
                let (mut inside, mut outside) = (nodes[best], nb);
                let mut fin = vals[best];
                for _ in 0..60 {
                    let mid = 0.5 * (inside + outside);
                    let v = f(mid);
                    if v.is_finite() {
                        inside = mid;
                        fin = v;
                    } else {
                        outside = mid;
                    }
                }
                if fin < bv {
                    bx = inside;
                    bv = fin;
                }
            }
        }
    }
    if best > 0 && !vals[best - 1].is_finite() && bx < nodes[best] {
        lo = bx;
    }
    if best + 1 < nodes.len() && !vals[best + 1].is_finite() && bx > nodes[best] {
        hi = bx;
    }
    let (x, v) = brent_min(&f, lo, hi, xtol, 500);
    let (x, v) = if v <= bv { (x, v) } else { (bx, bv) };
    let at_boundary = best == 0 || best == nodes.len() - 1;
    Min1D { x, value: v, at_boundary }
}

/// Nodes on `(lo, hi)` clustered toward both ends on a log scale.
pub fn clustered_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let w = hi - lo;
    let mut xs = Vec::with_capacity(2 * n + 40);
    for i in 1..n {
        xs.push(lo + w * i as f64 / n as f64);
    }
    for k in 1..=20 {
        let s = w * 10f64.powf(-(k as f64) * 0.6);
        xs.push(lo + s);
        xs.push(hi - s);
    }
    xs.retain(|&x| x > lo && x < hi);
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// Nodes on `(0, ∞)` spread geometrically between `lo` and `hi`.
pub fn geometric_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect()
}

/// Brent root finder on a sign-changing bracket.
pub fn root_brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Numerical(format!("root not bracketed on [{a}, {b}]")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..400 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else if m > 0.0 { tol } else { -tol };
        fb = f(b);
    }
    Ok(b)
}

/// Nelder–Mead simplex minimization. Returns (argmin, min, converged).
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: f64,
    ftol: f64,
    maxit: usize,
) -> (Vec<f64>, f64, bool) {
    let d = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    for _ in 0..maxit {
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let spread = (vals[d] - vals[0]).abs();
        let size: f64 = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if vals[0].is_finite() && spread <= ftol * (1.0 + vals[0].abs()) && size < 1e-9 {
            return (simplex[0].clone(), vals[0], true);
        }
        let centroid: Vec<f64> =
            (0..d).map(|k| simplex[..d].iter().map(|x| x[k]).sum::<f64>() / d as f64).collect();
        let lerp = |t: f64| -> Vec<f64> {
            (0..d).map(|k| centroid[k] + t * (simplex[d][k] - centroid[k])).collect()
        };
        let xr = lerp(-1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = lerp(-2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[d] = xe;
                vals[d] = fe;
            } else {
                simplex[d] = xr;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            simplex[d] = xr;
            vals[d] = fr;
        } else {
            let (xc, fc) = if fr < vals[d] {
                let x = lerp(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = lerp(0.5);
                let v = eval(&x);
                (x, v)
            };
            if fc < vals[d].min(fr) {
                simplex[d] = xc;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    let x: Vec<f64> =
                        (0..d).map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k])).collect();
                    vals[i] = eval(&x);
                    simplex[i] = x;
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=d {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (simplex[best].clone(), vals[best], false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_quadratic() {
        let (x, v) = brent_min(|x| (x - 1.3) * (x - 1.3) + 2.0, -5.0, 5.0, 1e-12, 200);
        assert!((x - 1.3).abs() < 1e-8);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn brent_handles_infinite_region() {
        let f = |x: f64| if x < 0.4 { f64::INFINITY } else { x };
        let (x, _) = brent_min(f, 0.0, 1.0, 1e-14, 500);
        assert!((x - 0.4).abs() < 1e-10);
    }

    #[test]
    fn root_cubic() {
        let r = root_brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!(root_brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, v, ok) = nelder_mead(f, &[-1.0, 1.0], 0.5, 1e-15, 20_000);
        assert!(ok);
        assert!(v < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn scan_finds_global() {
        let f = |x: f64| (x * 3.0).sin() + 0.1 * x;
        let nodes: Vec<f64> = (0..=200).map(|i| -5.0 + 0.05 * i as f64).collect();
        let m = minimize_nodes(f, &nodes);
        // global minimum near x = -π/2 · ... check against dense scan
        let dense = (0..=200_000).map(|i| -5.0 + 5e-5 * i as f64).map(f).fold(f64::INFINITY, f64::min);
        assert!(m.value <= dense + 1e-12);
    }
}

//! Adaptive Gauss–Kronrod quadrature and log-space integrals of exponentials.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

struct Seg {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn adapt_finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: &QuadOpts) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let (v, e) = gk21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Seg { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol || !total.is_finite() {
            break;
        }
        if count >= opts.max_intervals {
            return QuadResult { value: total, error: err, converged: false };
        }
        let seg = heap.pop().unwrap();
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // interval cannot be split further in floating point
            heap.push(Seg { error: 0.0, ..seg });
            err = heap.iter().map(|s| s.error).sum();
            if heap.iter().all(|s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(f, seg.a, m);
        let (v2, e2) = gk21(f, m, seg.b);
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Seg { a: seg.a, b: m, value: v1, error: e1 });
        heap.push(Seg { a: m, b: seg.b, value: v2, error: e2 });
        count += 1;
        if count % 64 == 0 {
            // resum to limit drift
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    QuadResult { value, error, converged: value.is_finite() }
}

/// Integrates `f` over `[a, b]`; either endpoint may be infinite.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOpts) -> QuadResult {
    integrate_dyn(&f, a, b, opts)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOpts) -> QuadResult {
    if a > b {
        let r = integrate_dyn(f, b, a, opts);
        return QuadResult { value: -r.value, ..r };
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adapt_finite(&f, a, b, opts),
        (true, false) => {
            let g = |t: f64| {
                let u = 1.0 - t;
                let v = f(a + t / u) / (u * u);
                if v.is_finite() { v } else { 0.0 }
            };
            adapt_finite(&g, 0.0, 1.0, opts)
        }
        (false, true) => {
            let g = |t: f64| {
                let u = 1.0 - t;
                let v = f(b - t / u) / (u * u);
                if v.is_finite() { v } else { 0.0 }
            };
            adapt_finite(&g, 0.0, 1.0, opts)
        }
        (false, false) => {
            let l = integrate_dyn(f, f64::NEG_INFINITY, 0.0, opts);
            let r = integrate_dyn(f, 0.0, f64::INFINITY, opts);
            QuadResult {
                value: l.value + r.value,
                error: l.error + r.error,
                converged: l.converged && r.converged,
            }
        }
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate_with(f, a, b, &QuadOpts::default()).value
}

/// Integrates over `[a, b]` split at the interior `points`.
pub fn integrate_pts<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: &[f64]) -> f64 {
    let mut cuts: Vec<f64> = points.iter().cloned().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let opts = QuadOpts::default();
    edges.windows(2).map(|w| integrate_with(&f, w[0], w[1], &opts).value).sum()
}

/// Maximizer of `h` on `[a, b]`, found by a coarse scan followed by golden section.
pub fn locate_peak<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64) -> (f64, f64) {
    let mut xs = Vec::new();
    let anchor = if a.is_finite() { a } else if b.is_finite() { b } else { 0.0 };
    if a.is_finite() && b.is_finite() {
        let n = 64;
        for i in 0..=n {
            xs.push(a + (b - a) * i as f64 / n as f64);
        }
    } else {
        xs.push(anchor);
    }
    let mut step = 1e-6;
    while step < 1e12 {
        for s in [step, -step] {
            let x = anchor + s;
            if x >= a && x <= b {
                xs.push(x);
            }
        }
        step *= 1.5;
    }
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let vals: Vec<f64> = xs.iter().map(|&x| {
        let v = h(x);
        if v.is_nan() || v == f64::INFINITY { f64::NEG_INFINITY } else { v }
    }).collect();
    let (imax, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let lo = xs[imax.saturating_sub(1)];
    let hi = xs[(imax + 1).min(xs.len() - 1)];
    // integrable endpoint singularities are skipped
    let (x, v) = crate::optim::golden_max(|x| {
        let v = h(x);
        if v == f64::INFINITY { f64::NEG_INFINITY } else { v }
    }, lo, hi, 1e-13, 300);
    if v >= vals[imax] { (x, v) } else { (xs[imax], vals[imax]) }
}

/// Distance from `x0` (moving in direction `dir`) at which `h` drops by `drop` below `h0`.
fn width<H: Fn(f64) -> f64>(h: &H, x0: f64, h0: f64, dir: f64, limit: f64, drop: f64) -> f64 {
    let mut s = 1e-8;
    loop {
        let x = x0 + dir * s;
        if (dir > 0.0 && x >= limit) || (dir < 0.0 && x <= limit) {
            return (limit - x0).abs().max(1e-300);
        }
        let v = h(x);
        if !(v > h0 - drop) || s > 1e15 {
            return s;
        }
        s *= 2.0;
    }
}

/// ∫ g(x) e^{h(x) − h0} dx with the range split around the peak x0 of `h`.
fn integrate_around_peak<H, G>(h: &H, a: f64, b: f64, x0: f64, h0: f64, g: &G) -> f64
where
    H: Fn(f64) -> f64,
    G: Fn(f64) -> f64 + ?Sized,
{
    let w = |x: f64| {
        let v = h(x) - h0;
        if v.is_nan() || v == f64::NEG_INFINITY {
            0.0
        } else {
            let r = g(x) * v.exp();
            if r.is_finite() { r } else { 0.0 }
        }
    };
    let opts = QuadOpts { abs_tol: 1e-300, rel_tol: 1e-13, max_intervals: 4000 };
    let mut total = 0.0;
    for dir in [-1.0, 1.0] {
        let limit = if dir < 0.0 { a } else { b };
        if limit == x0 {
            continue;
        }
        let s = width(h, x0, h0, dir, limit, 1.0);
        let part = if limit.is_finite() {
            // split at growing multiples of the peak width
            let mut edges = vec![x0];
            let mut k = 1.0;
            loop {
                let e = x0 + dir * s * k;
                if (dir > 0.0 && e >= limit) || (dir < 0.0 && e <= limit) {
                    break;
                }
                edges.push(e);
                k *= 4.0;
            }
            edges.push(limit);
            edges
                .windows(2)
                .map(|e| integrate_with(w, e[0].min(e[1]), e[0].max(e[1]), &opts).value)
                .sum::<f64>()
        } else {
            let m = |t: f64| {
                let u = 1.0 - t;
                let v = w(x0 + dir * s * t / u) * s / (u * u);
                if v.is_finite() { v } else { 0.0 }
            };
            integrate_with(m, 0.0, 0.5, &opts).value + integrate_with(m, 0.5, 1.0, &opts).value
        };
        total += part;
    }
    total
}

/// log ∫_a^b e^{h(x)} dx for a unimodal (or monotone) exponent `h`.
pub fn log_integral_exp<H: Fn(f64) -> f64>(h: H, a: f64, b: f64) -> f64 {
    let (x0, h0) = locate_peak(&h, a, b);
    if h0 == f64::INFINITY || h0 == f64::NEG_INFINITY {
        return h0;
    }
    h0 + integrate_around_peak(&h, a, b, x0, h0, &|_| 1.0).ln()
}

/// log ∫ e^h together with the normalized moments ∫ g_i e^h / ∫ e^h.
pub fn exp_moments<H: Fn(f64) -> f64>(h: H, a: f64, b: f64, gs: &[&dyn Fn(f64) -> f64]) -> Vec<f64> {
    let (x0, h0) = locate_peak(&h, a, b);
    if !h0.is_finite() {
        return vec![f64::NAN; gs.len()];
    }
    let z = integrate_around_peak(&h, a, b, x0, h0, &|_| 1.0);
    gs.iter().map(|g| integrate_around_peak(&h, a, b, x0, h0, *g) / z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x, 0.0, 3.0);
        assert!((v - 9.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_whole_line() {
        let v = integrate(|x| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY);
        assert!((v - (2.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularities() {
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-8);
        let w = integrate(|x: f64| x.ln(), 0.0, 1.0);
        assert!((w + 1.0).abs() < 1e-9);
    }

    #[test]
    fn log_integral_far_peak() {
        // ∫ e^{-(x-500)^2/2 + 1000} dx
        let v = log_integral_exp(|x| -(x - 500.0) * (x - 500.0) / 2.0 + 1000.0, 0.0, f64::INFINITY);
        assert!((v - (1000.0 + 0.5 * (2.0 * PI).ln())).abs() < 1e-10);
        let n = log_integral_exp(|x| -(x * x) * 1e6, f64::NEG_INFINITY, f64::INFINITY);
        assert!((n - (PI / 1e6).sqrt().ln()).abs() < 1e-10);
    }

    #[test]
    fn log_integral_monotone() {
        let v = log_integral_exp(|x| -x, 0.0, f64::INFINITY);
        assert!(v.abs() < 1e-12);
    }
}

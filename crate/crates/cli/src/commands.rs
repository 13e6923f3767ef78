use serde_json::{json, Map, Value};

use ldgeom::distributions::{log_moment_mpq, p_gaussian_log_pdf};
use ldgeom::orlicz::{intersection_ratio_limit, log_volume_limit, lp_ball_log_volume, volume_estimate};
use ldgeom::projections::{jx_lp, rate_projection_constant, rate_row_haar, OrliczJx, ThinShellAssumption};
use ldgeom::ratecalc::{
    mdp_rate, mdp_sigma2, rate_gkr_highp, rate_gkr_lowp, rate_lqnorm_high, rate_lqnorm_low,
    rate_stretched_cramer, rate_uniform_power, typical_lq,
};
use ldgeom::sampling::{sample_haar_stiefel, sample_lp_ball, sample_uniform_orlicz_ball, BallMode, OrliczMethod};
use ldgeom::spectral::{limit_law, sample_schatten_batch, schatten_rate, spectral_distance, McmcOpts, SpectralMetric};
use ldgeom::verify::{
    fft_tail, fit_ldp_slope, lqnorm_tilted_rare_event, mdp_experiment, norm_ldp_experiment, uniform_root_log_prob,
    LdpSlopeEstimate, NormSource, TailGrid,
};
use ldgeom::{rng, Density1D, EmpiricalMeasure, Error, Flag, Flagged, Measure};

use crate::config::{parse_orlicz, Command, ExperimentConfig as Cfg};

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    /// Bad or missing input.
    Config(String),
    /// The library could not produce a value.
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Invalid(_) | Error::Advisory(_) => Failure::Config(e.to_string()),
            Error::Numerical(_) | Error::Range(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

type Res<T> = std::result::Result<T, Failure>;

#[derive(Debug, Default)]
pub struct Output {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub results: Map<String, Value>,
    pub flags: Vec<Flag>,
}

impl Output {
    fn new(header: &[&str]) -> Self {
        Output { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn note(&mut self, f: Option<Flag>) -> String {
        match f {
            Some(flag) => {
                if !self.flags.contains(&flag) {
                    self.flags.push(flag);
                }
                flag.to_string()
            }
            None => String::new(),
        }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }
}

pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn fmt(v: f64) -> String {
    // no "-0" in tables
    if v == 0.0 { "0".into() } else { v.to_string() }
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Res<T> {
    Ok(Cfg::need(v, name)?)
}

fn ball_mode(cfg: &Cfg) -> Res<BallMode> {
    match cfg.mode.as_deref().unwrap_or("uniform") {
        "uniform" => Ok(BallMode::Uniform),
        "cone" => Ok(BallMode::Cone),
        other => Err(Failure::Config(format!("unknown mode `{other}` (expected uniform or cone)"))),
    }
}

pub fn run(cmd: Command, cfg: &Cfg) -> Res<Output> {
    match cmd {
        Command::Volume => volume(cfg),
        Command::Rate => rate(cfg),
        Command::Sample => sample(cfg),
        Command::Spectral => spectral(cfg),
        Command::Project => project(cfg),
        Command::Verify => verify(cfg),
    }
}

fn volume(cfg: &Cfg) -> Res<Output> {
    let spec = need(&cfg.m, "m")?;
    let m = parse_orlicz(&spec)?;
    let r = cfg.r.unwrap_or(1.0);
    let d = need(&cfg.n, "n")?;
    let mut out = Output::new(&[
        "m", "r", "d", "log_volume_limit", "log_volume_estimate", "exact_log_volume", "ratio", "theta", "dichotomy",
    ]);
    let limit = log_volume_limit(&m, r)?;
    let est = volume_estimate(&m, r, d)?;
    let (exact, ratio) = match m.power_exponent() {
        Some(p) => {
            let e = lp_ball_log_volume(d, p, (d as f64 * r).powf(1.0 / p));
            (Some(e), Some((est.log_volume - e).exp()))
        }
        None => (None, None),
    };
    let (theta, class) = match (&cfg.m2, cfg.r2) {
        (Some(s2), Some(r2)) => {
            let dich = intersection_ratio_limit(&m, r, &parse_orlicz(s2)?, r2)?;
            (Some(dich.theta), Some(dich.class.to_string()))
        }
        (None, None) => (None, None),
        _ => return Err(Failure::Config("the dichotomy needs both `m2` and `r2`".into())),
    };
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    out.row(vec![
        m.name(),
        fmt(r),
        d.to_string(),
        fmt(limit),
        fmt(est.log_volume),
        opt(exact),
        opt(ratio),
        opt(theta),
        class.clone().unwrap_or_default(),
    ]);
    out.put("log_volume_limit", num(limit));
    out.put("log_volume_estimate", num(est.log_volume));
    if let Some(x) = ratio {
        out.put("ratio", num(x));
    }
    if let (Some(t), Some(c)) = (theta, class) {
        out.put("theta", num(t));
        out.put("dichotomy", json!(c));
    }
    Ok(out)
}

fn rate(cfg: &Cfg) -> Res<Output> {
    let catalog = need(&cfg.catalog, "catalog")?;
    let grid = need(&cfg.grid, "grid")?;
    let p = || need(&cfg.p, "p");
    let q = || need(&cfg.q, "q");
    let eval: Box<dyn Fn(f64) -> Res<Flagged>> = match catalog.as_str() {
        "uniform_power" => Box::new(|x| Ok(Flagged::ok(rate_uniform_power(x)))),
        "gkr_lowp" => {
            let p = p()?;
            Box::new(move |x| Ok(Flagged::ok(rate_gkr_lowp(x, p)?)))
        }
        "gkr_highp" => {
            let p = p()?;
            Box::new(move |x| Ok(rate_gkr_highp(x, p)?))
        }
        "lqnorm_low" => {
            let (p, q) = (p()?, q()?);
            Box::new(move |x| Ok(Flagged::ok(rate_lqnorm_low(x, p, q)?)))
        }
        "lqnorm_high" => {
            let (p, q) = (p()?, q()?);
            Box::new(move |x| Ok(rate_lqnorm_high(x, p, q)?))
        }
        "stretched_cramer" => {
            // X = |Y|^q with Y p-Gaussian, q > p
            let (p, q) = (p()?, q()?);
            if !(q > p) {
                return Err(Failure::Config(format!("stretched_cramer needs q > p, got p = {p}, q = {q}")));
            }
            let mean = log_moment_mpq(p, q).exp();
            Box::new(move |x| Ok(Flagged::ok(rate_stretched_cramer(x, 1.0 / p, p / q, mean))))
        }
        "mdp" => {
            let s2 = mdp_sigma2(p()?, q()?)?;
            Box::new(move |x| Ok(Flagged::ok(mdp_rate(x, s2))))
        }
        "jx_lp" => {
            let p = p()?;
            Box::new(move |x| Ok(jx_lp(x, p)?))
        }
        "jx_orlicz" => {
            let jx = OrliczJx::new(&parse_orlicz(&need(&cfg.m, "m")?)?)?;
            Box::new(move |x| Ok(jx.eval(x)))
        }
        "row_haar" => Box::new(|x| Ok(Flagged::ok(rate_row_haar(&[x])))),
        other => return Err(Failure::Config(format!("unknown catalog rate `{other}`"))),
    };
    let mut out = Output::new(&["x", "rate", "flag"]);
    let mut values = Vec::new();
    for &x in &grid {
        let v = eval(x)?;
        let f = out.note(v.flag);
        out.row(vec![fmt(x), fmt(v.value), f]);
        values.push(num(v.value));
    }
    out.put("catalog", json!(catalog));
    out.put("values", Value::Array(values));
    Ok(out)
}

fn sample(cfg: &Cfg) -> Res<Output> {
    let kind = cfg.kind.clone().unwrap_or_else(|| "lp_ball".into());
    let count = cfg.samples.unwrap_or(10);
    let mut r = rng::seeded(cfg.seed.unwrap_or(0));
    let n = need(&cfg.n, "n")?;
    let draws: Vec<Vec<f64>> = match kind.as_str() {
        "lp_ball" => {
            let (p, mode) = (need(&cfg.p, "p")?, ball_mode(cfg)?);
            (0..count).map(|_| sample_lp_ball(n, p, mode, &mut r)).collect::<Result<_, _>>()?
        }
        "orlicz" => {
            let m = parse_orlicz(&need(&cfg.m, "m")?)?;
            let method = match cfg.mode.as_deref().unwrap_or("hit_and_run") {
                "rejection" => OrliczMethod::Rejection,
                "hit_and_run" => OrliczMethod::HitAndRun,
                other => return Err(Failure::Config(format!("unknown Orlicz method `{other}` (expected rejection or hit_and_run)"))),
            };
            sample_uniform_orlicz_ball(n, &m, cfg.r.unwrap_or(1.0), method, count, &mut r)?
        }
        "stiefel" => {
            let k = need(&cfg.k, "k")?;
            let mut rows = Vec::new();
            for _ in 0..count {
                let a = sample_haar_stiefel(n, k, &mut r)?;
                rows.push(a.entries().transpose().iter().cloned().collect());
            }
            rows
        }
        other => return Err(Failure::Config(format!("unknown sampler `{other}` (expected lp_ball, orlicz or stiefel)"))),
    };
    let width = draws.first().map_or(0, |d| d.len());
    let mut header = vec!["draw".to_string()];
    header.extend((0..width).map(|i| format!("x{i}")));
    let mut out = Output { header, ..Default::default() };
    for (i, d) in draws.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(d.iter().map(|&v| fmt(v)));
        out.row(row);
    }
    out.put("sampler", json!(kind));
    out.put("draws", json!(count));
    Ok(out)
}

fn spectral(cfg: &Cfg) -> Res<Output> {
    let n = need(&cfg.n, "n")?;
    let p = need(&cfg.p, "p")?;
    let beta = cfg.beta.unwrap_or(2.0);
    let selfadjoint = cfg.selfadjoint.unwrap_or(true);
    let per_chain = cfg.samples.unwrap_or(200);
    let opts = McmcOpts::for_size(n, per_chain);
    let (samples, run) = sample_schatten_batch(n, p, beta, selfadjoint, ball_mode(cfg)?, &opts, cfg.seed.unwrap_or(0))?;
    let pooled: Vec<f64> = samples.iter().flat_map(|s| s.measure.points()).collect();
    let law = limit_law(p, selfadjoint)?;
    let ks = spectral_distance(&pooled, &law, SpectralMetric::Kolmogorov)?;
    let w1 = spectral_distance(&pooled, &law, SpectralMetric::Wasserstein1)?;
    let rate = schatten_rate(&Measure::Empirical(EmpiricalMeasure::uniform(&pooled)?), p, beta, selfadjoint)?;
    let mut out = Output::new(&["n", "p", "beta", "selfadjoint", "points", "ks", "w1", "rhat", "acceptance", "empirical_rate"]);
    out.row(vec![
        n.to_string(),
        fmt(p),
        fmt(beta),
        selfadjoint.to_string(),
        pooled.len().to_string(),
        fmt(ks),
        fmt(w1),
        fmt(run.rhat),
        fmt(run.acceptance),
        fmt(rate),
    ]);
    if !(run.rhat < 1.05) {
        out.note(Some(Flag::NotConverged));
    }
    out.put("ks", num(ks));
    out.put("w1", num(w1));
    out.put("rhat", num(run.rhat));
    out.put("acceptance", num(run.acceptance));
    Ok(out)
}

fn assumption(cfg: &Cfg) -> Res<ThinShellAssumption> {
    Ok(match (&cfg.m, cfg.p) {
        (Some(spec), None) => ThinShellAssumption::orlicz_ball(&parse_orlicz(spec)?)?,
        (None, Some(p)) => ThinShellAssumption::lp_ball(p)?,
        _ => return Err(Failure::Config("give exactly one of `p` (ℓ_p ball) or `m` (Orlicz ball)".into())),
    })
}

fn project(cfg: &Cfg) -> Res<Output> {
    match cfg.kind.as_deref().unwrap_or("constant") {
        "constant" => {
            let a = assumption(cfg)?;
            let grid = need(&cfg.grid, "grid")?;
            let mut out = Output::new(&["norm", "rate", "flag"]);
            let mut vals = Vec::new();
            for &x in &grid {
                let v = rate_projection_constant(&[x], &a)?;
                let f = out.note(v.flag);
                out.row(vec![fmt(x), fmt(v.value), f]);
                vals.push(num(v.value));
            }
            out.put("assumption", json!(a.label.to_string()));
            out.put("values", Value::Array(vals));
            Ok(out)
        }
        "typicality" => {
            let p = need(&cfg.p, "p")?;
            let n = need(&cfg.n, "n")?;
            let count = cfg.samples.unwrap_or(100);
            let a = ThinShellAssumption::lp_ball(p)?;
            let mut r = rng::seeded(cfg.seed.unwrap_or(0));
            let scale = (n as f64).powf(1.0 / p);
            let mut out = Output::new(&["draw", "normalized_norm"]);
            let mut vals = Vec::with_capacity(count);
            for i in 0..count {
                let x = sample_lp_ball(n, p, BallMode::Uniform, &mut r)?;
                let v = scale * (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
                out.row(vec![i.to_string(), fmt(v)]);
                vals.push(v);
            }
            let mean = vals.iter().sum::<f64>() / count as f64;
            out.put("mean", num(mean));
            out.put("typical", num(a.typical.unwrap_or(f64::NAN)));
            Ok(out)
        }
        other => Err(Failure::Config(format!("unknown projection experiment `{other}` (expected constant or typicality)"))),
    }
}

fn slope_output(out: &mut Output, est: &LdpSlopeEstimate, prediction: f64) {
    out.header = ["n", "s_n", "log_prob", "std_err", "rate_prediction"].iter().map(|s| s.to_string()).collect();
    for i in 0..est.n_grid.len() {
        out.row(vec![
            est.n_grid[i].to_string(),
            fmt(est.speed_values[i]),
            fmt(est.log_probs[i]),
            fmt(est.std_errs[i]),
            fmt(prediction),
        ]);
    }
    let f = est.flag;
    out.note(f);
    out.put("fitted_slope", num(est.fitted_slope));
    out.put("r_squared", num(est.r_squared));
    out.put("rate_prediction", num(prediction));
}

fn verify(cfg: &Cfg) -> Res<Output> {
    let kind = need(&cfg.kind, "kind")?;
    let seed = cfg.seed.unwrap_or(0);
    let mut out = Output::default();
    match kind.as_str() {
        "uniform_power" => {
            let grid = need(&cfg.n_grid, "n_grid")?;
            let z = need(&cfg.level, "level")?;
            let lps: Vec<f64> = grid.iter().map(|&n| uniform_root_log_prob(n, z)).collect();
            let est = fit_ldp_slope(&grid, &lps, &vec![0.0; grid.len()], &|n| n as f64)?;
            slope_output(&mut out, &est, rate_uniform_power(z));
        }
        "gaussian_sum" => {
            let grid = need(&cfg.n_grid, "n_grid")?;
            let a = need(&cfg.level, "level")?;
            let g = ldgeom::measure::centered_gaussian(1.0);
            let lps = tails(&g, &grid, a, &mut out)?;
            let est = fit_ldp_slope(&grid, &lps, &vec![0.0; grid.len()], &|n| n as f64)?;
            slope_output(&mut out, &est, a * a / 2.0);
        }
        "stretched" => {
            let grid = need(&cfg.n_grid, "n_grid")?;
            let a = need(&cfg.level, "level")?;
            let (p, q) = (cfg.p.unwrap_or(1.0), cfg.q.unwrap_or(2.0));
            if !(q > p) {
                return Err(Failure::Config(format!("stretched sums need q > p, got p = {p}, q = {q}")));
            }
            let d = Density1D::new(format!("|Y|^{q}"), (0.0, f64::INFINITY), move |x: f64| {
                2f64.ln() + p_gaussian_log_pdf(x.powf(1.0 / q), p) - q.ln() + (1.0 / q - 1.0) * x.ln()
            });
            let lps = tails(&d, &grid, a, &mut out)?;
            let r = p / q;
            let est = fit_ldp_slope(&grid, &lps, &vec![0.0; grid.len()], &|n| (n as f64).powf(r))?;
            slope_output(&mut out, &est, rate_stretched_cramer(a, 1.0 / p, r, log_moment_mpq(p, q).exp()));
        }
        "norm_lp" | "norm_gaussian" => {
            let grid = need(&cfg.n_grid, "n_grid")?;
            let z = need(&cfg.level, "level")?;
            let samples = cfg.samples.unwrap_or(10_000);
            let (source, prediction) = if kind == "norm_lp" {
                let p = need(&cfg.p, "p")?;
                let a = ThinShellAssumption::lp_ball(p)?;
                (NormSource::ScaledLpBall { p }, a.jx.eval(z))
            } else {
                let v = ldgeom::projections::jx_product(&ldgeom::projections::chi_square_cumulant(), z)?;
                (NormSource::GaussianProduct, v.value)
            };
            let est = norm_ldp_experiment(&source, &grid, z, samples, seed)?;
            slope_output(&mut out, &est, prediction);
        }
        "lqnorm" => {
            let (p, q) = (need(&cfg.p, "p")?, need(&cfg.q, "q")?);
            let n = need(&cfg.n, "n")?;
            let z = need(&cfg.level, "level")?;
            let e = lqnorm_tilted_rare_event(p, q, n, z, cfg.samples.unwrap_or(10_000), seed)?;
            let rate = rate_lqnorm_high(z, p, q)?;
            out.header = ["n", "z", "log_prob", "std_err", "ess", "rate_prediction", "flag"].iter().map(|s| s.to_string()).collect();
            let f = out.note(e.flag.or(rate.flag));
            out.row(vec![n.to_string(), fmt(z), fmt(e.log_prob), fmt(e.std_err), fmt(e.ess), fmt(rate.value), f]);
            out.put("log_prob", num(e.log_prob));
            out.put("typical", num(typical_lq(p, q)));
            out.put("rate_prediction", num(rate.value));
        }
        "mdp" => {
            let (p, q) = (need(&cfg.p, "p")?, need(&cfg.q, "q")?);
            let n = need(&cfg.n, "n")?;
            let gamma = cfg.gamma.unwrap_or(0.25);
            let t_grid = need(&cfg.grid, "grid")?;
            let e = mdp_experiment(p, q, gamma, n, cfg.samples.unwrap_or(10_000), &t_grid, seed)?;
            out.header = ["t", "exceed", "scaled_log_tail", "mdp_prediction", "gaussian_prediction", "flag"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            for row in &e.rows {
                let f = out.note(row.flag);
                out.row(vec![
                    fmt(row.t),
                    row.exceed.to_string(),
                    fmt(row.scaled_log_tail),
                    fmt(row.mdp_prediction),
                    fmt(row.gaussian_prediction),
                    f,
                ]);
            }
            out.put("sigma2", num(e.sigma2));
            out.put("sigma2_empirical", num(e.sigma2_empirical));
            out.put("b_n", num(e.b_n));
        }
        other => {
            return Err(Failure::Config(format!(
                "unknown verification `{other}` (expected uniform_power, gaussian_sum, stretched, norm_lp, norm_gaussian, lqnorm or mdp)"
            )))
        }
    }
    out.put("kind", json!(kind));
    Ok(out)
}

fn tails(d: &Density1D, grid: &[usize], a: f64, out: &mut Output) -> Res<Vec<f64>> {
    let mut lps = Vec::with_capacity(grid.len());
    for &n in grid {
        let v = fft_tail(d, n, a * n as f64, &TailGrid::default())?;
        out.note(v.flag);
        lps.push(v.value);
    }
    Ok(lps)
}

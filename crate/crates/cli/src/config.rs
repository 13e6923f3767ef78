use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ldgeom::orlicz::OrliczFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Volume,
    Rate,
    Sample,
    Spectral,
    Project,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Volume => "volume",
            Command::Rate => "rate",
            Command::Sample => "sample",
            Command::Spectral => "spectral",
            Command::Project => "project",
            Command::Verify => "verify",
        })
    }
}

/// One run, as a JSON document. Every field except `seed` is optional and checked by the
/// subcommand that needs it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// ℓ_p / Schatten exponent
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Dimension or convolution count
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Frame width for Stiefel draws
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Orlicz function: power:<p>, exp_minus_one, optionally followed by @<bound>
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Second Orlicz function for the intersection dichotomy
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// uniform or cone
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Sampler or experiment family, per subcommand
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Catalog rate name for `rate`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Threshold level (a, z or t depending on the experiment)
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// b_n = n^gamma for moderate deviations
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selfadjoint: Option<bool>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Exit with status 3 when a result carries a failure flag
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl ExperimentConfig {
    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &ExperimentConfig) -> Self {
        overlay!(
            self, flags, command, p, q, n, n_grid, k, m, r, m2, r2, beta, mode, kind, catalog, grid, samples, level, gamma,
            selfadjoint, seed, threads, output, strict
        );
        self
    }

    /// Reads a config document, or the `inputs` of a run summary.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let doc = match value.get("ldgeom_summary") {
            Some(_) => value.get("inputs").cloned().ok_or_else(|| format!("{}: summary without inputs", path.display()))?,
            None => value,
        };
        serde_json::from_value(doc).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, String> {
        v.clone().ok_or_else(|| format!("missing required field `{name}`"))
    }
}

pub fn parse_orlicz(spec: &str) -> Result<OrliczFunction, String> {
    let (base, bound) = match spec.split_once('@') {
        Some((b, v)) => (b, Some(v.parse::<f64>().map_err(|_| format!("bad domain bound in `{spec}`"))?)),
        None => (spec, None),
    };
    let m = if base == "exp_minus_one" {
        OrliczFunction::exp_minus_one()
    } else if let Some(p) = base.strip_prefix("power:") {
        let p: f64 = p.parse().map_err(|_| format!("bad exponent in `{spec}`"))?;
        OrliczFunction::power(p).map_err(|e| e.to_string())?
    } else {
        return Err(format!("unknown Orlicz function `{spec}` (expected power:<p> or exp_minus_one)"));
    };
    match bound {
        Some(b) => m.bounded(b).map_err(|e| e.to_string()),
        None => Ok(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orlicz_specs() {
        assert_eq!(parse_orlicz("power:3").unwrap().power_exponent(), Some(3.0));
        assert_eq!(parse_orlicz("exp_minus_one@2").unwrap().domain_bound(), Some(2.0));
        assert!(parse_orlicz("power:x").is_err());
        assert!(parse_orlicz("cosh").is_err());
    }

    #[test]
    fn flags_win() {
        let file = ExperimentConfig { p: Some(1.0), q: Some(2.0), ..Default::default() };
        let flags = ExperimentConfig { p: Some(3.0), ..Default::default() };
        let c = file.overlay(&flags);
        assert_eq!((c.p, c.q), (Some(3.0), Some(2.0)));
    }
}

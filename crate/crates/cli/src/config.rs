//! Run configuration: a flat TOML file whose keys mirror the long flags.
//! Flags override the file; the seed falls back to `SCENERYWALK_SEED`.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use scenerywalk::scenery::SceneryLaw;

pub const SEED_ENV: &str = "SCENERYWALK_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Which exponent `exponents` tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    #[default]
    P,
    Q,
    Displacement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Lln,
    Scaling,
    Tail,
    Strategy,
    Chen,
    Level,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[default]
    Rwrs,
    Rcm,
}

/// A list of numbers: an array, a single number, or text of the form
/// `a,b,c`, `lin:lo:hi:n` or `geom:lo:hi:n`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Many(Vec<f64>),
    One(f64),
    Text(String),
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            Grid::Many(v) => v.clone(),
            Grid::One(x) => vec![*x],
            Grid::Text(s) => parse_grid(s)?,
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(format!("grid value {x} is not finite"));
        }
        Ok(v)
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}"));
    if let Some((kind @ ("lin" | "geom"), rest)) = s.split_once(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected {kind}:lo:hi:n, got {s:?}"));
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n.trim().parse().map_err(|_| format!("not a count: {n:?}"))?;
        if n == 0 {
            return Ok(Vec::new());
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        if kind == "geom" && !(lo > 0.0 && hi > 0.0) {
            return Err("geometric grids need positive ends".into());
        }
        return Ok((0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if kind == "lin" {
                    lo + (hi - lo) * f
                } else {
                    lo * (hi / lo).powf(f)
                }
            })
            .collect());
    }
    s.split(',').filter(|x| !x.trim().is_empty()).map(num).collect()
}

/// Keys accepted in a config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub alpha: Option<Grid>,
    pub dim: Option<usize>,
    pub rho: Option<Grid>,
    pub delta: Option<Grid>,
    pub gamma: Option<f64>,
    pub t_grid: Option<Grid>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub which: Option<Which>,
    pub task: Option<Task>,
    pub model: Option<ModelKind>,
    pub field_seed: Option<u64>,
    pub quantile: Option<f64>,
    pub eta: Option<f64>,
    pub k_eps: Option<f64>,
    pub b: Option<Grid>,
    pub lambda: Option<Grid>,
    pub fields: Option<u64>,
    pub paths: Option<u64>,
    pub bridge: Option<bool>,
    pub suite: Option<Vec<String>>,
    pub law: Option<SceneryLaw>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

/// Master seed: flag, then config, then the environment, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1, 2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_grid("lin:0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("geom:1:100:3").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(parse_grid("lin:0:1").is_err());
        assert!(Grid::Text(String::new()).values().is_err());
        assert!(Grid::Text("1,x".into()).values().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("alpha = 1\nfoo = 2").is_err());
        let c: FileConfig = toml::from_str("alpha = [1, 2]\nt-grid = \"geom:10:1000:3\"\nk-eps = 0.5").unwrap();
        assert_eq!(c.alpha.unwrap().values().unwrap(), vec![1.0, 2.0]);
        assert_eq!(c.k_eps, Some(0.5));
    }
}

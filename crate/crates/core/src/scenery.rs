//! Heavy-tailed i.i.d. scenery on Z^d.
//!
//! Values are never stored. A site's value is computed on demand from a
//! counter-based hash of the seed and the site's coordinates:
//!
//! ```text
//! h₀     = mix64(seed + γ·(d+1))
//! h_{i+1} = mix64((h_i + γ) ⊕ zigzag(x_i))      i = 0..d
//! u      = ((h_d >> 11) + 1) · 2⁻⁵³               u ∈ (0, 1]
//! z      = u^(−1/α)
//! ```
//!
//! with `γ = 0x9E3779B97F4A7C15`, `mix64` the SplitMix64 finalizer and
//! `zigzag(x) = (x << 1) ⊕ (x >> 63)`. Any implementation following these
//! steps reproduces the field bit-exactly.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::lattice::{box_size, BoxIter, Site, MAX_DIM};
use crate::rng::{mix64, unit_open_closed, zigzag, GOLDEN_GAMMA};

/// Default cap on the number of sites a box enumeration may visit.
pub const DEFAULT_SITE_BUDGET: u128 = 50_000_000;

/// Anything that assigns a value z(x) ≥ 1 to the sites of Z^d.
pub trait Scenery: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Site) -> f64;
}

impl<S: Scenery + ?Sized> Scenery for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &Site) -> f64 {
        (**self).value(x)
    }
}

/// Marginal law of the field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneryLaw {
    /// P(z > r) = r^(−α) ∧ 1.
    #[default]
    ParetoExact,
    /// Degenerate law z ≡ value, for checks where the answer is known in closed form.
    Constant { value: f64 },
}

/// Deterministic lazily evaluated field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneryField {
    pub alpha: f64,
    pub dim: usize,
    pub seed: u64,
    #[serde(default)]
    pub law: SceneryLaw,
}

impl SceneryField {
    pub fn pareto(alpha: f64, dim: usize, seed: u64) -> Result<Self> {
        let f = SceneryField {
            alpha,
            dim,
            seed,
            law: SceneryLaw::ParetoExact,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn constant(value: f64, dim: usize) -> Result<Self> {
        let f = SceneryField {
            alpha: 1.0,
            dim,
            seed: 0,
            law: SceneryLaw::Constant { value },
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.alpha.is_finite() && self.alpha > 0.0, || {
            format!("alpha must be positive and finite, got {}", self.alpha)
        })?;
        ensure((1..=MAX_DIM).contains(&self.dim), || {
            format!("dim must be in 1..={MAX_DIM}, got {}", self.dim)
        })?;
        if let SceneryLaw::Constant { value } = self.law {
            ensure(value.is_finite() && value >= 1.0, || {
                format!("constant scenery must be finite and ≥ 1, got {value}")
            })?;
        }
        Ok(())
    }

    /// Same law and seed, different tail index. Values at a site are
    /// monotone in α under this coupling.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The hash uniform u ∈ (0, 1] behind site `x`.
    pub fn uniform(&self, x: &Site) -> f64 {
        debug_assert_eq!(x.dim(), self.dim);
        let mut h = mix64(
            self.seed
                .wrapping_add(GOLDEN_GAMMA.wrapping_mul(self.dim as u64 + 1)),
        );
        for &c in x.coords() {
            h = mix64(h.wrapping_add(GOLDEN_GAMMA) ^ zigzag(c));
        }
        unit_open_closed(h)
    }

    /// z(x); `sample_site` in the field's vocabulary.
    #[inline]
    pub fn sample_site(&self, x: &Site) -> f64 {
        match self.law {
            SceneryLaw::ParetoExact => pareto_from_uniform(self.uniform(x), self.alpha),
            SceneryLaw::Constant { value } => value,
        }
    }

    /// E[z(0)], infinite for α ≤ 1.
    pub fn mean(&self) -> f64 {
        match self.law {
            SceneryLaw::ParetoExact if self.alpha > 1.0 => self.alpha / (self.alpha - 1.0),
            SceneryLaw::ParetoExact => f64::INFINITY,
            SceneryLaw::Constant { value } => value,
        }
    }
}

impl Scenery for SceneryField {
    fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    fn value(&self, x: &Site) -> f64 {
        self.sample_site(x)
    }
}

/// Inverse CDF of the exact Pareto law. `u = 1` maps to the lower endpoint 1.
#[inline]
pub fn pareto_from_uniform(u: f64, alpha: f64) -> f64 {
    debug_assert!(u > 0.0 && u <= 1.0);
    if u >= 1.0 {
        1.0
    } else {
        u.powf(-1.0 / alpha)
    }
}

/// Exact tail P(z > r) = r^(−α) ∧ 1.
pub fn pareto_tail(r: f64, alpha: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else {
        r.powf(-alpha)
    }
}

/// A scenery given by an explicit table, with a default value elsewhere.
#[derive(Clone, Debug)]
pub struct TableScenery {
    dim: usize,
    default: f64,
    values: HashMap<Site, f64>,
}

impl TableScenery {
    pub fn new(dim: usize, default: f64) -> Self {
        TableScenery {
            dim,
            default,
            values: HashMap::new(),
        }
    }

    pub fn set(&mut self, x: Site, value: f64) -> &mut Self {
        assert_eq!(x.dim(), self.dim);
        self.values.insert(x, value);
        self
    }

    /// Values along `e₁` starting at `first`: `values[i]` sits at `(first+i)·e₁`.
    pub fn line(dim: usize, first: i64, values: &[f64]) -> Self {
        let mut t = TableScenery::new(dim, 1.0);
        for (i, &v) in values.iter().enumerate() {
            t.set(Site::on_axis(dim, first + i as i64), v);
        }
        t
    }
}

impl Scenery for TableScenery {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Site) -> f64 {
        self.values.get(x).copied().unwrap_or(self.default)
    }
}

/// Maximum of z over `‖x‖_∞ ≤ radius` and the lexicographically smallest
/// site attaining it.
pub fn box_max<S: Scenery + ?Sized>(field: &S, radius: u64) -> (f64, Site) {
    let mut best = (f64::NEG_INFINITY, Site::origin(field.dim()));
    for x in BoxIter::cube(field.dim(), radius) {
        let v = field.value(&x);
        if v > best.0 {
            best = (v, x);
        }
    }
    best
}

/// P(max_{‖x‖_∞ ≤ radius} z(x) ≥ s) = 1 − (1 − s^(−α))^N with N = (2r+1)^d.
pub fn exceedance_prob(alpha: f64, dim: usize, radius: u64, s: f64) -> Result<f64> {
    ensure(alpha > 0.0, || format!("alpha must be positive, got {alpha}"))?;
    if !(s >= 1.0) {
        return Err(domain(format!("threshold must be ≥ 1, got {s}")));
    }
    let n = box_size(dim, radius) as f64;
    let p = s.powf(-alpha);
    Ok(-(n * (-p).ln_1p()).exp_m1())
}

/// Sites of a box whose scenery value reaches a threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSet {
    pub threshold: f64,
    pub box_radius: u64,
    pub sites: BTreeSet<Site>,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, x: &Site) -> bool {
        self.sites.contains(x)
    }
}

/// `{x : ‖x‖_∞ ≤ box_radius, z(x) ≥ threshold}`, enumerated exactly.
pub fn level_set<S: Scenery + ?Sized>(
    field: &S,
    box_radius: u64,
    threshold: f64,
    site_budget: u128,
) -> Result<LevelSet> {
    if !(threshold >= 1.0) {
        return Err(domain(format!("threshold must be ≥ 1, got {threshold}")));
    }
    let needed = box_size(field.dim(), box_radius);
    if needed > site_budget {
        return Err(Error::Resource {
            needed,
            budget: site_budget,
        });
    }
    let sites = BoxIter::cube(field.dim(), box_radius)
        .filter(|x| field.value(x) >= threshold)
        .collect();
    Ok(LevelSet {
        threshold,
        box_radius,
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_points() {
        assert_eq!(pareto_from_uniform(1.0, 0.7), 1.0);
        assert_eq!(pareto_from_uniform(0.25, 1.0), 4.0);
        assert!((pareto_from_uniform(0.25, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn field_is_deterministic_and_at_least_one() {
        let f = SceneryField::pareto(0.5, 2, 42).unwrap();
        let sites: Vec<Site> = BoxIter::cube(2, 5).collect();
        let a: Vec<f64> = sites.iter().map(|x| f.sample_site(x)).collect();
        let b: Vec<f64> = sites.iter().rev().map(|x| f.sample_site(x)).collect();
        assert!(a.iter().all(|&v| v >= 1.0 && v.is_finite()));
        assert!(a.iter().zip(b.iter().rev()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn exceedance_examples() {
        assert!((exceedance_prob(1.0, 1, 0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(exceedance_prob(1.0, 3, 4, 1.0).unwrap(), 1.0);
        assert!((exceedance_prob(2.0, 1, 1, 10.0).unwrap() - 0.029701).abs() < 1e-12);
        assert!(exceedance_prob(1.0, 1, 1, 0.5).is_err());
    }

    #[test]
    fn table_max_and_level_set() {
        let t = TableScenery::line(1, -1, &[4.0, 2.0, 9.0]);
        assert_eq!(box_max(&t, 1), (9.0, Site::new(&[1])));
        let h = level_set(&t, 1, 3.0, DEFAULT_SITE_BUDGET).unwrap();
        let want: BTreeSet<Site> = [Site::new(&[-1]), Site::new(&[1])].into_iter().collect();
        assert_eq!(h.sites, want);
    }

    #[test]
    fn ties_keep_smallest_site() {
        let f = SceneryField::constant(3.0, 2).unwrap();
        assert_eq!(box_max(&f, 2), (3.0, Site::new(&[-2, -2])));
    }

    #[test]
    fn level_set_budget() {
        let f = SceneryField::pareto(1.0, 3, 1).unwrap();
        assert!(matches!(
            level_set(&f, 100, 1.0, 1000),
            Err(Error::Resource { .. })
        ));
        assert!(level_set(&f, 1, 0.9, 1000).is_err());
    }

    #[test]
    fn record_roundtrip_rejects_unknown_fields() {
        let f = SceneryField::pareto(1.5, 1, 9).unwrap();
        let s = toml::to_string(&f).unwrap();
        let g: SceneryField = toml::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(toml::from_str::<SceneryField>("alpha = 1.0\ndim = 1\nseed = 1\ncolour = 2\n").is_err());
    }
}

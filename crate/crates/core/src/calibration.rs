//! Slack constants chosen from pilot runs, loaded from the checked-in
//! `calibration/pilot.toml`. None of these values is ground truth; each
//! entry records how it was obtained.

use serde::{Deserialize, Serialize};

use crate::ctrw::{srw_log_transition, HkConstants};
use crate::error::{Error, Result};
use crate::lattice::Site;

const PILOT_TOML: &str = include_str!("../calibration/pilot.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFloor {
    /// Tail frequencies must keep their lower confidence bound above t^(−exponent).
    pub exponent: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyTolerance {
    /// Allowed excess of the certified exponent over p(α, ρ).
    pub eps_tol: f64,
    /// Fraction of field seeds that must meet the tolerance.
    pub seed_fraction: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatKernelFit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Safety factor applied to the fitted exponential rates.
    pub slack: f64,
    pub provenance: String,
}

impl HeatKernelFit {
    pub fn constants(&self) -> HkConstants {
        HkConstants {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            c4: self.c4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub polynomial_floor: PolynomialFloor,
    pub strategy: StrategyTolerance,
    pub heat_kernel: HeatKernelFit,
}

impl Calibration {
    /// The checked-in calibration.
    pub fn pilot() -> Self {
        Self::parse(PILOT_TOML).expect("checked-in calibration parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Dimensions and times on which the heat-kernel constants are fitted.
pub const HK_FIT_DIMS: [usize; 3] = [1, 2, 3];
pub const HK_FIT_SLACK: f64 = 10.0;

fn hk_fit_times() -> Vec<f64> {
    (0..=12).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

fn hk_fit_sites(dim: usize, t: f64) -> Vec<Site> {
    let reach = (4.0 * t).ceil() as i64 + 4;
    let mut radii: Vec<i64> = (0..=8).map(|k| (reach as f64 * k as f64 / 8.0).round() as i64).collect();
    radii.dedup();
    let mut out = Vec::new();
    for r in radii {
        out.push(Site::on_axis(dim, r));
        let per = (r as f64 / dim as f64).round() as i64;
        out.push(Site::new(&vec![per; dim]));
    }
    out
}

/// Fits c₁..c₄ of the two-sided envelope to the exact kernel of the rate-1
/// walk, for d ∈ {1, 2, 3} and t ∈ [1, 1000]. The exponential rates get a
/// factor `HK_FIT_SLACK` of room on each side; the prefactors are then the
/// extreme values needed on the fitting grid.
pub fn fit_hk_constants() -> HkConstants {
    let mut points = Vec::new();
    for &dim in &HK_FIT_DIMS {
        for t in hk_fit_times() {
            for x in hk_fit_sites(dim, t) {
                points.push((dim, t, x, srw_log_transition(1.0, t, &x)));
            }
        }
    }
    // Rates seen in the Poissonian range |x| > t.
    let mut poisson_max: f64 = 0.0;
    let mut poisson_min = f64::INFINITY;
    for (_, t, x, lp) in &points {
        let r = x.euclid();
        if r > *t {
            let g = r * (r / t).ln().max(1.0);
            poisson_max = poisson_max.max(-lp / g);
            poisson_min = poisson_min.min(-lp / g);
        }
    }
    let gauss_rate = HK_FIT_DIMS.iter().fold(0.0f64, |m, &d| m.max(d as f64 / 2.0));
    let c2 = HK_FIT_SLACK * poisson_max.max(gauss_rate);
    let c4 = poisson_min.min(0.5) / HK_FIT_SLACK;
    let mut c1 = f64::INFINITY;
    let mut c3: f64 = 0.0;
    for (dim, t, x, lp) in &points {
        let r = x.euclid();
        if r <= *t {
            let base = lp + *dim as f64 / 2.0 * t.ln();
            let q = r * r / t;
            c1 = c1.min((base + c2 * q).exp());
            c3 = c3.max((base + c4 * q).exp());
        }
    }
    HkConstants { c1, c2, c3, c4 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pilot_file_parses() {
        let c = Calibration::pilot();
        assert!(c.polynomial_floor.exponent > 0.0);
        assert!(c.strategy.eps_tol > 0.0);
        c.heat_kernel.constants().validate().unwrap();
        assert!(!c.heat_kernel.provenance.is_empty());
    }

    #[test]
    fn stored_hk_constants_match_fit() {
        let stored = Calibration::pilot().heat_kernel;
        let fit = fit_hk_constants();
        for (a, b) in [
            (stored.c1, fit.c1),
            (stored.c2, fit.c2),
            (stored.c3, fit.c3),
            (stored.c4, fit.c4),
        ] {
            assert!((a - b).abs() <= 1e-9 * b.abs(), "stored {a} vs fitted {b}");
        }
        assert_eq!(stored.slack, HK_FIT_SLACK);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = PILOT_TOML.to_string();
        text.push_str("\n[extra]\nvalue = 1\n");
        assert!(Calibration::parse(&text).is_err());
    }
}

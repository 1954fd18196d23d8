//! Closed-form tail exponents and a numerical solver for the variational
//! characterisation of the displacement exponent.
//!
//! Notation: α is the scenery tail index, d the dimension of the scenery
//! (the transverse dimension in the layered model), ρ the deviation exponent
//! in P(A_t ≥ t^ρ), δ and γ the vertical and transverse displacement
//! exponents.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};

/// Which case of a piecewise exponent formula applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// The probability decays only polynomially.
    Polynomial,
    /// Left end of the first p-regime with α ≤ 1 (d = 1) or α ≤ d/2: exponent 0.
    Boundary,
    /// ρ = 1 when E z < ∞: the tail depends on the constant in front of t.
    LdpBoundary,
    First,
    Second,
    Third,
    Fourth,
    Fifth,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Polynomial => "polynomial",
            Regime::Boundary => "boundary",
            Regime::LdpBoundary => "ldp-boundary",
            Regime::First => "first",
            Regime::Second => "second",
            Regime::Third => "third",
            Regime::Fourth => "fourth",
            Regime::Fifth => "fifth",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An exponent value or a marker for the cases without one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentValue {
    Value(f64),
    /// No stretched-exponential decay.
    Polynomial,
    /// The decay depends on the prefactor of the deviation, not only on ρ.
    DependsOnConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub value: ExponentValue,
    pub regime: Regime,
    pub alpha: f64,
    pub dim: usize,
    /// ρ for p, δ for q.
    pub x: f64,
}

impl ExponentResult {
    pub fn value(&self) -> Option<f64> {
        match self.value {
            ExponentValue::Value(v) => Some(v),
            _ => None,
        }
    }

    /// The value with the markers read as 0, as inside the variational formula.
    pub fn value_or_zero(&self) -> f64 {
        self.value().unwrap_or(0.0)
    }
}

fn check_alpha_dim(alpha: f64, dim: usize) -> Result<()> {
    ensure(alpha.is_finite() && alpha > 0.0, || {
        format!("alpha must be positive and finite, got {alpha}")
    })?;
    ensure(dim >= 1, || "dimension must be ≥ 1".into())
}

/// `a / b₊` with the convention `a / 0 = ∞`.
fn div_pos(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        f64::INFINITY
    }
}

/// Whether the scenery is integrable enough for the LDP scale: α > 1 in
/// d = 1, α > d/2 in d ≥ 2.
pub fn ldp_applies(alpha: f64, dim: usize) -> bool {
    if dim == 1 {
        alpha > 1.0
    } else {
        alpha > dim as f64 / 2.0
    }
}

/// The first p-regime is `(lo, hi]`.
pub fn p_first_regime(alpha: f64, dim: usize) -> (f64, f64) {
    let d = dim as f64;
    if dim == 1 {
        (((alpha + 1.0) / (2.0 * alpha)).max(1.0), (alpha + 1.0) / alpha)
    } else {
        ((d / (2.0 * alpha)).max(1.0), (alpha + d) / alpha)
    }
}

/// The formula of one p-regime evaluated at ρ, regardless of whether ρ lies in it.
pub fn p_branch(alpha: f64, rho: f64, dim: usize, regime: Regime) -> f64 {
    let d = dim as f64;
    match (regime, dim) {
        (Regime::First, 1) => 2.0 * alpha * rho / (alpha + 1.0) - 1.0,
        (Regime::First, _) => (2.0 * alpha * rho - d) / (2.0 * alpha + d),
        (Regime::Second, 1) => alpha * (rho - 1.0),
        (Regime::Second, _) => alpha * (rho - 1.0) / d,
        _ => 0.0,
    }
}

/// Exponent p(α, ρ) of P₀(A_t ≥ t^ρ) = exp(−t^{p + o(1)}).
pub fn p_exponent(alpha: f64, rho: f64, dim: usize) -> Result<ExponentResult> {
    check_alpha_dim(alpha, dim)?;
    ensure(rho.is_finite() && rho > 0.0, || format!("rho must be positive, got {rho}"))?;
    let (lo, hi) = p_first_regime(alpha, dim);
    let (value, regime) = if rho < lo {
        (ExponentValue::Polynomial, Regime::Polynomial)
    } else if rho == lo {
        if ldp_applies(alpha, dim) {
            (ExponentValue::DependsOnConstant, Regime::LdpBoundary)
        } else {
            (ExponentValue::Value(0.0), Regime::Boundary)
        }
    } else if rho <= hi {
        let v = p_branch(alpha, rho, dim, Regime::First);
        (ExponentValue::Value(v), Regime::First)
    } else {
        let v = p_branch(alpha, rho, dim, Regime::Second);
        (ExponentValue::Value(v), Regime::Second)
    };
    Ok(ExponentResult {
        value,
        regime,
        alpha,
        dim,
        x: rho,
    })
}

/// p(α, ρ) with the markers read as 0, extended by 0 to ρ ≤ 0.
pub fn p_or_zero(alpha: f64, rho: f64, dim: usize) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    p_exponent(alpha, rho, dim).map_or(0.0, |r| r.value_or_zero())
}

/// Exponent of P₀(A_t ≥ ct) for c > E z.
pub fn ldp_exponent(alpha: f64, dim: usize) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    let d = dim as f64;
    if !ldp_applies(alpha, dim) {
        return Err(domain(format!(
            "LDP scale needs alpha > {}, got {alpha}",
            if dim == 1 { 1.0 } else { d / 2.0 }
        )));
    }
    Ok(if dim == 1 {
        (alpha - 1.0) / (alpha + 1.0)
    } else {
        (2.0 * alpha - d) / (2.0 * alpha + d)
    })
}

/// Breakpoints of the five q-regimes:
/// first `[0, first_end)`, second `[1/2, second_end)`,
/// third `[third_start, third_end]`, fourth `(third_end, fourth_end)`,
/// fifth `[fourth_end, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QBreakpoints {
    pub first_end: f64,
    pub second_end: f64,
    pub third_start: f64,
    pub third_end: f64,
    pub fourth_end: f64,
}

impl QBreakpoints {
    pub fn second_is_void(&self) -> bool {
        self.second_end <= 0.5
    }
}

pub fn q_breakpoints(alpha: f64, dim: usize) -> QBreakpoints {
    let d = dim as f64;
    if dim == 1 {
        let second_end = alpha / (alpha + 1.0);
        let low = (alpha + 1.0) / (4.0 * alpha);
        QBreakpoints {
            first_end: low.max(0.5),
            second_end,
            third_start: second_end.max(low),
            third_end: (2.0 * alpha + 1.0) / (2.0 * alpha),
            fourth_end: div_pos(alpha, alpha - 1.0),
        }
    } else {
        let second_end = 2.0 * alpha / (2.0 * alpha + d);
        let low = d / (4.0 * alpha);
        QBreakpoints {
            first_end: low.max(0.5),
            second_end,
            third_start: second_end.max(low),
            third_end: (2.0 * alpha + d) / (2.0 * alpha),
            fourth_end: div_pos(alpha, alpha - d),
        }
    }
}

/// The formula of one q-regime evaluated at δ, regardless of whether δ lies in it.
pub fn q_branch(alpha: f64, delta: f64, dim: usize, regime: Regime) -> f64 {
    let d = dim as f64;
    match (regime, dim) {
        (Regime::First, _) => 0.0,
        (Regime::Second, _) => 2.0 * delta - 1.0,
        (Regime::Third, 1) => (4.0 * alpha * delta - alpha - 1.0) / (3.0 * alpha + 1.0),
        (Regime::Third, _) => (4.0 * alpha * delta - d) / (4.0 * alpha + d),
        (Regime::Fourth, 1) => alpha * (2.0 * delta - 1.0) / (alpha + 1.0),
        (Regime::Fourth, _) => alpha * (2.0 * delta - 1.0) / (alpha + d),
        _ => delta,
    }
}

/// Which q-regime contains δ.
pub fn q_regime(alpha: f64, delta: f64, dim: usize) -> Regime {
    let b = q_breakpoints(alpha, dim);
    if delta < b.first_end {
        Regime::First
    } else if delta < b.second_end {
        Regime::Second
    } else if delta <= b.third_end {
        Regime::Third
    } else if delta < b.fourth_end {
        Regime::Fourth
    } else {
        Regime::Fifth
    }
}

/// Exponent q(α, δ) of P^ω₀(X_t = t^δ e₁) = exp(−t^{q + o(1)}).
pub fn q_closed_form(alpha: f64, delta: f64, dim: usize) -> Result<ExponentResult> {
    check_alpha_dim(alpha, dim)?;
    ensure(delta.is_finite() && delta >= 0.0, || {
        format!("delta must be nonnegative, got {delta}")
    })?;
    let regime = q_regime(alpha, delta, dim);
    Ok(ExponentResult {
        value: ExponentValue::Value(q_branch(alpha, delta, dim, regime)),
        regime,
        alpha,
        dim,
        x: delta,
    })
}

/// Upper end of the ρ-search interval in the variational formula. Beyond
/// it p exceeds δ, so the infimum is attained earlier.
pub fn variational_upper_end(alpha: f64, delta: f64, dim: usize) -> f64 {
    2.0 * delta + (alpha + dim as f64) / alpha + 1.0
}

/// q(α, δ) = δ ∧ inf_{ρ ∈ [δ, M]} max(p(α, ρ), 2δ − ρ), with p read as 0
/// where it has no value.
///
/// p is nondecreasing and 2δ − ρ decreasing, so the infimum sits at the
/// first ρ where p catches up with 2δ − ρ; that crossing is found by
/// bisection. p may jump at ρ = 1 and is left-continuous there, so the
/// crossing value is read off the decreasing side.
pub fn q_variational(alpha: f64, delta: f64, dim: usize, tolerance: f64) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    ensure(delta.is_finite() && delta >= 0.0, || {
        format!("delta must be nonnegative, got {delta}")
    })?;
    ensure(tolerance > 0.0, || format!("tolerance must be positive, got {tolerance}"))?;
    let gap = |rho: f64| p_or_zero(alpha, rho, dim) - (2.0 * delta - rho);
    if gap(delta) >= 0.0 {
        return Ok(delta);
    }
    let (mut lo, mut hi) = (delta, variational_upper_end(alpha, delta, dim));
    debug_assert!(gap(hi) >= 0.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((2.0 * delta - hi).max(0.0).min(delta))
}

/// q(α, δ) ∨ ((2γ − 1) ∧ γ).
pub fn displacement_exponent(alpha: f64, delta: f64, gamma: f64, dim: usize) -> Result<f64> {
    ensure(gamma.is_finite() && gamma >= 0.0, || {
        format!("gamma must be nonnegative, got {gamma}")
    })?;
    let q = q_closed_form(alpha, delta, dim)?.value_or_zero();
    Ok(q.max((2.0 * gamma - 1.0).min(gamma)))
}

/// Growth exponent of d^ω(0, t^δ e₁ + t^γ e): (2δα/(2α + d)) ∨ γ.
pub fn chemdist_exponent(alpha: f64, delta: f64, gamma: f64, dim: usize) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    ensure(delta > 0.5, || format!("delta must exceed 1/2, got {delta}"))?;
    ensure(gamma >= 0.0, || format!("gamma must be nonnegative, got {gamma}"))?;
    Ok((2.0 * delta * alpha / (2.0 * alpha + dim as f64)).max(gamma))
}

fn regime_mismatch(message: String, hint: String) -> Error {
    Error::RegimeMismatch { message, hint }
}

/// Optimal radius exponent μ of the region where the walk looks for a large
/// scenery value, for ρ in the first p-regime. Lies in (1/2, 1].
pub fn optimal_mu(alpha: f64, rho: f64, dim: usize) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    let (lo, hi) = p_first_regime(alpha, dim);
    if !(rho > lo && rho <= hi) {
        return Err(regime_mismatch(
            format!("rho = {rho} is outside the first regime"),
            format!("rho must lie in ({lo}, {hi}]"),
        ));
    }
    let d = dim as f64;
    Ok(if dim == 1 {
        alpha * rho / (alpha + 1.0)
    } else {
        alpha * (rho + 1.0) / (2.0 * alpha + d)
    })
}

/// The ρ attaining the infimum in the variational formula, for δ in the
/// third or fourth q-regime.
pub fn optimal_rho(alpha: f64, delta: f64, dim: usize) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    let b = q_breakpoints(alpha, dim);
    if !(delta >= b.third_start && delta < b.fourth_end) {
        return Err(regime_mismatch(
            format!("delta = {delta} is outside the third and fourth regimes"),
            format!("delta must lie in [{}, {})", b.third_start, b.fourth_end),
        ));
    }
    let d = dim as f64;
    let third = delta <= b.third_end;
    Ok(match (dim, third) {
        (1, true) => (2.0 * delta + 1.0) * (alpha + 1.0) / (3.0 * alpha + 1.0),
        (1, false) => (2.0 * delta + alpha) / (alpha + 1.0),
        (_, true) => (2.0 * delta * (2.0 * alpha + d) + d) / (4.0 * alpha + d),
        (_, false) => (2.0 * delta * d + alpha) / (alpha + d),
    })
}

/// Decay exponent e in P(τ_r ≥ t) ≥ t^{−e + o(1)}, where τ_r is the last
/// time the quenched exponent deviates from q by more than r.
pub fn range_tail_exponent(alpha: f64, delta: f64, dim: usize, r: f64) -> Result<f64> {
    check_alpha_dim(alpha, dim)?;
    ensure(r > 0.0, || format!("r must be positive, got {r}"))?;
    let b = q_breakpoints(alpha, dim);
    let d = dim as f64;
    if delta > b.third_start && delta <= b.third_end {
        let c1 = if dim == 1 {
            (alpha + 1.0) / 2.0
        } else {
            alpha + d / 2.0
        };
        Ok(r * c1)
    } else if delta > b.third_end && delta < b.fourth_end {
        Ok(r * d)
    } else if !b.second_is_void() && delta >= 0.5 && delta < b.second_end {
        Ok(if dim == 1 {
            alpha + delta * (alpha - 1.0) + r / 2.0 * (3.0 * alpha + 1.0)
        } else {
            2.0 * alpha - delta * (2.0 * alpha + d) + r / 2.0 * (4.0 * alpha + d)
        })
    } else {
        Err(regime_mismatch(
            format!("delta = {delta} is not in the second, third or fourth regime"),
            format!(
                "second [1/2, {}), third ({}, {}], fourth ({}, {})",
                b.second_end, b.third_start, b.third_end, b.third_end, b.fourth_end
            ),
        ))
    }
}

/// Which exponent a phase diagram tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiagramKind {
    /// p(α, ρ); x is ρ.
    P,
    /// q(α, δ); x is δ.
    Q,
    /// q(α, δ) ∨ ((2γ − 1) ∧ γ) at fixed γ; x is δ.
    Displacement { gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub alpha: f64,
    pub x: f64,
    /// `None` where the exponent is a marker (see `regime`).
    pub value: Option<f64>,
    pub regime: String,
}

fn diagram_point(kind: DiagramKind, alpha: f64, x: f64, dim: usize) -> Result<(Option<f64>, Regime)> {
    match kind {
        DiagramKind::P => {
            let r = p_exponent(alpha, x, dim)?;
            Ok((r.value(), r.regime))
        }
        DiagramKind::Q => {
            let r = q_closed_form(alpha, x, dim)?;
            Ok((r.value(), r.regime))
        }
        DiagramKind::Displacement { gamma } => {
            let r = q_closed_form(alpha, x, dim)?;
            Ok((Some(displacement_exponent(alpha, x, gamma, dim)?), r.regime))
        }
    }
}

/// Regime boundaries along the x axis at fixed α, with the regimes on either side.
pub fn regime_boundaries(kind: DiagramKind, alpha: f64, dim: usize) -> Vec<(f64, Regime, Regime)> {
    match kind {
        DiagramKind::P => {
            let (lo, hi) = p_first_regime(alpha, dim);
            vec![(lo, Regime::Polynomial, Regime::First), (hi, Regime::First, Regime::Second)]
        }
        DiagramKind::Q | DiagramKind::Displacement { .. } => {
            let b = q_breakpoints(alpha, dim);
            let mut v = Vec::new();
            if b.second_is_void() {
                v.push((b.first_end, Regime::First, Regime::Third));
            } else {
                v.push((b.first_end, Regime::First, Regime::Second));
                v.push((b.second_end, Regime::Second, Regime::Third));
            }
            v.push((b.third_end, Regime::Third, Regime::Fourth));
            if b.fourth_end.is_finite() {
                v.push((b.fourth_end, Regime::Fourth, Regime::Fifth));
            }
            v
        }
    }
}

/// Tabulates an exponent over a grid. Regime boundaries falling inside the
/// x range are added as rows labelled `boundary:<left>-<right>`.
pub fn phase_diagram(
    alpha_grid: &[f64],
    x_grid: &[f64],
    kind: DiagramKind,
    dim: usize,
) -> Result<Vec<PhaseRow>> {
    ensure(!alpha_grid.is_empty() && !x_grid.is_empty(), || "grids must be nonempty".into())?;
    let xmin = x_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = x_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rows = Vec::new();
    for &alpha in alpha_grid {
        let mut block = Vec::new();
        for &x in x_grid {
            let (value, regime) = diagram_point(kind, alpha, x, dim)?;
            block.push(PhaseRow {
                alpha,
                x,
                value,
                regime: regime.label().to_string(),
            });
        }
        for (x, left, right) in regime_boundaries(kind, alpha, dim) {
            if x < xmin || x > xmax || x <= 0.0 {
                continue;
            }
            let (value, _) = diagram_point(kind, alpha, x, dim)?;
            block.push(PhaseRow {
                alpha,
                x,
                value,
                regime: format!("boundary:{}-{}", left.label(), right.label()),
            });
        }
        block.sort_by(|a, b| a.x.total_cmp(&b.x));
        rows.extend(block);
    }
    Ok(rows)
}

//! The additive functional A_t = ∫₀ᵗ z(S_u) du, local times and level-set
//! occupations along a stored path.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ctrw::WalkPath;
use crate::error::{ensure, Result};
use crate::lattice::Site;
use crate::scenery::Scenery;
use crate::stats::CompensatedSum;

/// Piecewise-linear clock u ↦ A_u with slope z(S_u).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClockProcess {
    /// `(time, A_time)` at 0 and at every jump.
    pub breakpoints: Vec<(f64, f64)>,
    /// Slope on `[breakpoints[i].0, breakpoints[i+1].0)`; the last one runs to the horizon.
    pub slopes: Vec<f64>,
    horizon: f64,
}

impl ClockProcess {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn piece(&self, u: f64) -> usize {
        self.breakpoints.partition_point(|&(t, _)| t <= u).saturating_sub(1)
    }

    /// A_u for `0 ≤ u ≤ horizon`.
    pub fn eval(&self, u: f64) -> f64 {
        debug_assert!(u <= self.horizon * (1.0 + 1e-12));
        let k = self.piece(u);
        let (t, a) = self.breakpoints[k];
        a + self.slopes[k] * (u - t)
    }

    /// First time the clock reaches `level`, or `None` if it does not by the horizon.
    pub fn inverse(&self, level: f64) -> Option<f64> {
        if level <= 0.0 {
            return Some(0.0);
        }
        let k = self
            .breakpoints
            .partition_point(|&(_, a)| a < level)
            .saturating_sub(1);
        let (t, a) = self.breakpoints[k];
        let u = t + (level - a) / self.slopes[k];
        let end = self.breakpoints.get(k + 1).map_or(self.horizon, |b| b.0);
        (u <= end).then_some(u.min(end))
    }

    pub fn total(&self) -> f64 {
        self.eval(self.horizon)
    }
}

/// Builds the clock of `path` in the given scenery.
pub fn clock<S: Scenery + ?Sized>(field: &S, path: &WalkPath) -> ClockProcess {
    assert_eq!(field.dim(), path.dim, "field and path dimensions differ");
    let n = path.events.len() + 1;
    let mut breakpoints = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    let mut acc = CompensatedSum::new();
    let mut t0 = 0.0;
    let mut z = field.value(&path.start);
    breakpoints.push((0.0, 0.0));
    slopes.push(z);
    for &(t, x) in &path.events {
        acc.add(z * (t - t0));
        breakpoints.push((t, acc.value()));
        z = field.value(&x);
        slopes.push(z);
        t0 = t;
    }
    ClockProcess {
        breakpoints,
        slopes,
        horizon: path.horizon,
    }
}

/// Local times ℓ_t(x) of a path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalTimes {
    pub horizon: f64,
    pub times: BTreeMap<Site, f64>,
    /// max over [0, t] of ‖S_u‖_∞.
    pub max_range: i64,
}

impl LocalTimes {
    pub fn total(&self) -> f64 {
        self.times.values().copied().collect::<CompensatedSum>().value()
    }

    pub fn get(&self, x: &Site) -> f64 {
        self.times.get(x).copied().unwrap_or(0.0)
    }
}

/// Per-site sojourn sums up to time `t`.
pub fn local_times(path: &WalkPath, t: f64) -> Result<LocalTimes> {
    ensure(t >= 0.0 && t <= path.horizon, || {
        format!("t = {t} outside the simulated horizon {}", path.horizon)
    })?;
    let mut acc: BTreeMap<Site, CompensatedSum> = BTreeMap::new();
    let mut max_range = 0;
    for (x, enter, exit) in path.sojourns(t) {
        acc.entry(x).or_default().add(exit - enter);
        max_range = max_range.max(x.linf());
    }
    Ok(LocalTimes {
        horizon: t,
        times: acc.into_iter().map(|(x, s)| (x, s.value())).collect(),
        max_range,
    })
}

/// A_t together with the local times it was assembled from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalRecord {
    pub horizon: f64,
    pub a_t: f64,
    pub local_times: BTreeMap<Site, f64>,
    pub max_range: i64,
}

/// A_t = Σ_x z(x) ℓ_t(x).
pub fn functional_record<S: Scenery + ?Sized>(
    field: &S,
    path: &WalkPath,
    t: f64,
) -> Result<FunctionalRecord> {
    let lt = local_times(path, t)?;
    let a_t = lt
        .times
        .iter()
        .map(|(x, l)| field.value(x) * l)
        .collect::<CompensatedSum>()
        .value();
    Ok(FunctionalRecord {
        horizon: t,
        a_t,
        local_times: lt.times,
        max_range: lt.max_range,
    })
}

/// A_t summed directly over sojourn intervals.
pub fn additive_functional<S: Scenery + ?Sized>(field: &S, path: &WalkPath, t: f64) -> Result<f64> {
    ensure(t >= 0.0 && t <= path.horizon, || {
        format!("t = {t} outside the simulated horizon {}", path.horizon)
    })?;
    Ok(path
        .sojourns(t)
        .map(|(x, a, b)| field.value(&x) * (b - a))
        .collect::<CompensatedSum>()
        .value())
}

/// Default number of slices ⌊dμ/(εα)⌋.
pub fn default_slice_count(dim: usize, mu: f64, epsilon: f64, alpha: f64) -> usize {
    (dim as f64 * mu / (epsilon * alpha)).floor().max(0.0) as usize
}

/// Index k with t^{kε} ≤ z < t^{(k+1)ε}, capped at `k_max`.
pub fn slice_index(z: f64, t: f64, epsilon: f64, k_max: usize) -> usize {
    let step = epsilon * t.ln();
    let mut k = (z.ln() / step).floor().max(0.0) as usize;
    // Correct for rounding of the logarithm at exact slice boundaries.
    while k > 0 && t.powf(k as f64 * epsilon) > z {
        k -= 1;
    }
    while t.powf((k + 1) as f64 * epsilon) <= z {
        k += 1;
    }
    k.min(k_max)
}

/// Time spent in each slice `{t^{kε} ≤ z < t^{(k+1)ε}}`, k = 0..=K. The top
/// slice also collects everything above `t^{Kε}`, so the entries sum to t.
pub fn level_occupations<S: Scenery + ?Sized>(
    field: &S,
    path: &WalkPath,
    t: f64,
    epsilon: f64,
    k_max: usize,
) -> Result<Vec<f64>> {
    ensure(t > 1.0, || format!("slicing by powers of t needs t > 1, got {t}"))?;
    ensure(epsilon > 0.0, || format!("epsilon must be positive, got {epsilon}"))?;
    let lt = local_times(path, t)?;
    let mut slices = vec![CompensatedSum::new(); k_max + 1];
    for (x, l) in &lt.times {
        slices[slice_index(field.value(x), t, epsilon, k_max)].add(*l);
    }
    Ok(slices.iter().map(CompensatedSum::value).collect())
}

/// Dense local-time tape for walks on Z, indexed by site.
#[derive(Clone, Debug, Default)]
pub struct Tape1d {
    lo: i64,
    cells: Vec<f64>,
}

impl Tape1d {
    pub fn new() -> Self {
        Tape1d {
            lo: 0,
            cells: vec![0.0],
        }
    }

    pub fn clear(&mut self) {
        self.lo = 0;
        self.cells.clear();
        self.cells.push(0.0);
    }

    #[inline]
    pub fn add(&mut self, x: i64, dt: f64) {
        if x < self.lo {
            let extra = ((self.lo - x) as usize).max(self.cells.len());
            let mut v = vec![0.0; extra + self.cells.len()];
            v[extra..].copy_from_slice(&self.cells);
            self.cells = v;
            self.lo -= extra as i64;
        }
        let i = (x - self.lo) as usize;
        if i >= self.cells.len() {
            self.cells.resize((i + 1).max(2 * self.cells.len()), 0.0);
        }
        self.cells[i] += dt;
    }

    #[inline]
    pub fn get(&self, x: i64) -> f64 {
        if x < self.lo {
            return 0.0;
        }
        self.cells.get((x - self.lo) as usize).copied().unwrap_or(0.0)
    }

    /// Nonzero entries `(site, time)` in increasing site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(move |(i, &v)| (self.lo + i as i64, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replica_stream;
    use crate::scenery::{SceneryField, TableScenery};

    fn two_piece() -> WalkPath {
        WalkPath {
            dim: 1,
            start: Site::new(&[0]),
            events: vec![(1.5, Site::new(&[1]))],
            horizon: 4.0,
        }
    }

    #[test]
    fn clock_two_pieces() {
        let f = TableScenery::line(1, 0, &[2.0, 5.0]);
        let c = clock(&f, &two_piece());
        assert_eq!(c.eval(4.0), 2.0 * 1.5 + 5.0 * 2.5);
        assert_eq!(c.inverse(3.0), Some(1.5));
        assert_eq!(c.inverse(8.0), Some(2.5));
        assert_eq!(c.inverse(16.0), None);
        assert_eq!(
            additive_functional(&f, &two_piece(), 4.0).unwrap(),
            c.total()
        );
    }

    #[test]
    fn stationary_path() {
        let p = WalkPath::stationary(Site::new(&[3, 1]), 7.0);
        let lt = local_times(&p, 7.0).unwrap();
        assert_eq!(lt.times.len(), 1);
        assert_eq!(lt.get(&Site::new(&[3, 1])), 7.0);
        assert_eq!(lt.max_range, 3);
    }

    #[test]
    fn slice_boundaries_are_exact() {
        assert_eq!(slice_index(1.0, 100.0, 0.5, 10), 0);
        assert_eq!(slice_index(10.0, 100.0, 0.5, 10), 1);
        assert_eq!(slice_index(9.999, 100.0, 0.5, 10), 0);
        assert_eq!(slice_index(1e9, 100.0, 0.5, 3), 3);
        assert_eq!(default_slice_count(1, 0.75, 0.1, 1.0), 7);
    }

    #[test]
    fn constant_field_puts_everything_in_slice_zero() {
        let f = SceneryField::constant(1.0, 1).unwrap();
        let mut rng = replica_stream(3, 0);
        let p = crate::ctrw::simulate_srw(1, 1.0, 50.0, &mut rng);
        let occ = level_occupations(&f, &p, 50.0, 0.3, 4).unwrap();
        assert!((occ[0] - 50.0).abs() < 1e-12);
        assert!(occ[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tape_grows_both_ways() {
        let mut t = Tape1d::new();
        t.add(0, 1.0);
        t.add(-5, 2.0);
        t.add(7, 3.0);
        t.add(-5, 0.5);
        assert_eq!(t.get(-5), 2.5);
        assert_eq!(t.get(7), 3.0);
        assert_eq!(t.get(100), 0.0);
        let v: Vec<_> = t.iter().collect();
        assert_eq!(v, vec![(-5, 2.5), (0, 1.0), (7, 3.0)]);
    }
}

//! Continuous-time walks: the simple random walk at a given total rate, the
//! variable speed walk in a layered conductance field, the time-change
//! construction of the latter, and heat-kernel envelopes.

use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::functional::ClockProcess;
use crate::lattice::{Site, MAX_DIM};
use crate::montecarlo::TailEstimate;
use crate::rng::replica_stream;
use crate::scenery::{Scenery, SceneryField};

/// Trajectory of a continuous-time nearest-neighbour walk stored as its jumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    pub dim: usize,
    pub start: Site,
    /// `(jump_time, site entered)` with strictly increasing times.
    pub events: Vec<(f64, Site)>,
    pub horizon: f64,
}

impl WalkPath {
    pub fn stationary(start: Site, horizon: f64) -> Self {
        WalkPath {
            dim: start.dim(),
            start,
            events: Vec::new(),
            horizon,
        }
    }

    /// Checks the path invariants: increasing jump times within the horizon
    /// and nearest-neighbour steps.
    pub fn validate(&self) -> Result<()> {
        ensure(self.start.dim() == self.dim, || "start has wrong dimension".into())?;
        let mut prev_t = 0.0;
        let mut prev = self.start;
        for (i, &(t, x)) in self.events.iter().enumerate() {
            ensure(t > prev_t || (i == 0 && t > 0.0), || {
                format!("jump {i} at {t} does not follow {prev_t}")
            })?;
            ensure(t <= self.horizon, || format!("jump {i} at {t} beyond horizon"))?;
            ensure(x.dim() == self.dim && x.l1_dist(&prev) == 1, || {
                format!("jump {i} from {prev} to {x} is not a nearest-neighbour step")
            })?;
            prev_t = t;
            prev = x;
        }
        Ok(())
    }

    /// Position at time `u` (right-continuous).
    pub fn position_at(&self, u: f64) -> Site {
        let k = self.events.partition_point(|&(t, _)| t <= u);
        if k == 0 {
            self.start
        } else {
            self.events[k - 1].1
        }
    }

    pub fn end(&self) -> Site {
        self.events.last().map_or(self.start, |e| e.1)
    }

    pub fn jumps(&self) -> usize {
        self.events.len()
    }

    /// Iterates over sojourns `(site, entry time, exit time)` clipped to `[0, t]`.
    pub fn sojourns(&self, t: f64) -> impl Iterator<Item = (Site, f64, f64)> + '_ {
        let t = t.min(self.horizon);
        let firsts = std::iter::once((0.0, self.start)).chain(self.events.iter().copied());
        let exits = self.events.iter().map(|e| e.0).chain(std::iter::once(f64::INFINITY));
        firsts
            .zip(exits)
            .take_while(move |((enter, _), _)| *enter < t || (*enter == 0.0 && t == 0.0))
            .map(move |((enter, x), exit)| (x, enter, exit.min(t)))
    }

    /// Writes the event list as CSV rows `time,x1,...,xd`, with the start as a
    /// row at time 0. A debugging format, not a stable one.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        let rows = std::iter::once((0.0, self.start)).chain(self.events.iter().copied());
        for (t, x) in rows {
            let mut rec = vec![t.to_string()];
            rec.extend(x.coords().iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()
    }
}

/// Jump-rate specification of a walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateModel {
    /// Simple random walk with the given total exit rate split evenly over the 2d neighbours.
    Srw { total_rate: f64 },
    /// Rate z(x₂) across each edge ±e₁ and 1 across each transverse edge.
    LayeredVsrw { field: SceneryField },
}

/// Runs a simple random walk from `start` up to `horizon`, calling
/// `on_jump(time, new_site)` after each jump. Returns the final site.
pub fn run_srw<R: Rng + ?Sized>(
    start: Site,
    total_rate: f64,
    horizon: f64,
    rng: &mut R,
    mut on_jump: impl FnMut(f64, &Site),
) -> Site {
    let d = start.dim();
    let mut x = start;
    let mut t = 0.0;
    loop {
        let hold: f64 = rng.sample(Exp1);
        t += hold / total_rate;
        if t > horizon {
            return x;
        }
        let k = rng.random_range(0..2 * d);
        x = x.step(k >> 1, k & 1 == 1);
        on_jump(t, &x);
    }
}

/// Simple random walk on Z^dim from the origin.
pub fn simulate_srw<R: Rng + ?Sized>(
    dim: usize,
    total_rate: f64,
    horizon: f64,
    rng: &mut R,
) -> WalkPath {
    simulate_srw_from(Site::origin(dim), total_rate, horizon, rng)
}

pub fn simulate_srw_from<R: Rng + ?Sized>(
    start: Site,
    total_rate: f64,
    horizon: f64,
    rng: &mut R,
) -> WalkPath {
    assert!(total_rate > 0.0, "total rate must be positive");
    let mut events = Vec::new();
    run_srw(start, total_rate, horizon, rng, |t, x| events.push((t, *x)));
    WalkPath {
        dim: start.dim(),
        start,
        events,
        horizon,
    }
}

/// Runs the variable speed walk on Z^{1+d} from `start`, calling `on_jump`
/// after each jump. Coordinate 0 is the vertical direction e₁.
pub fn run_vsrw<S: Scenery + ?Sized, R: Rng + ?Sized>(
    field: &S,
    start: Site,
    horizon: f64,
    rng: &mut R,
    mut on_jump: impl FnMut(f64, &Site),
) -> Site {
    let d = field.dim();
    assert_eq!(start.dim(), d + 1, "walk lives in Z^(1+d)");
    let mut x = start;
    let mut z = field.value(&x.split_first().1);
    let mut t = 0.0;
    loop {
        let total = 2.0 * z + 2.0 * d as f64;
        let hold: f64 = rng.sample(Exp1);
        t += hold / total;
        if t > horizon {
            return x;
        }
        let u = rng.random::<f64>() * total;
        if u < 2.0 * z {
            x = x.step(0, u < z);
        } else {
            let k = rng.random_range(0..2 * d);
            x = x.step(1 + (k >> 1), k & 1 == 1);
            z = field.value(&x.split_first().1);
        }
        on_jump(t, &x);
    }
}

/// Variable speed walk from the origin of Z^{1+d}.
pub fn simulate_vsrw<S: Scenery + ?Sized, R: Rng + ?Sized>(
    field: &S,
    horizon: f64,
    rng: &mut R,
) -> WalkPath {
    let start = Site::origin(field.dim() + 1);
    let mut events = Vec::new();
    run_vsrw(field, start, horizon, rng, |t, x| events.push((t, *x)));
    WalkPath {
        dim: start.dim(),
        start,
        events,
        horizon,
    }
}

/// Position `(S¹_{A²_t}, S²_t)` of the time-changed construction, where the
/// clock `A²` integrates z along the transverse path.
pub fn time_change_compose(
    vertical: &WalkPath,
    clock: &ClockProcess,
    transverse: &WalkPath,
    t: f64,
) -> Result<Site> {
    ensure(vertical.dim == 1, || "vertical component must live on Z".into())?;
    ensure(transverse.dim < MAX_DIM, || "transverse dimension too large".into())?;
    ensure(t <= transverse.horizon && t <= clock.horizon(), || {
        format!("t = {t} exceeds the transverse path or clock")
    })?;
    let a = clock.eval(t);
    if vertical.horizon < a {
        return Err(Error::InsufficientHorizon {
            needed: a,
            available: vertical.horizon,
        });
    }
    Ok(Site::join_first(
        vertical.position_at(a).coord(0),
        &transverse.position_at(t),
    ))
}

/// Positive constants of the two-sided heat-kernel envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HkConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl HkConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [self.c1, self.c2, self.c3, self.c4];
        ensure(all.iter().all(|c| c.is_finite() && *c > 0.0), || {
            format!("heat-kernel constants must be positive: {all:?}")
        })
    }
}

/// Log lower and upper envelopes of p_t(0, x). The Gaussian form applies for
/// `|x| ≤ t` (Euclidean norm), the Poissonian form for `|x| > t`.
pub fn hk_envelope(t: f64, x: &Site, c: &HkConstants) -> Result<(f64, f64)> {
    if !(t >= 1.0) {
        return Err(domain(format!("envelope needs t ≥ 1, got {t}")));
    }
    c.validate()?;
    let r = x.euclid();
    if r <= t {
        let base = -(x.dim() as f64) / 2.0 * t.ln();
        let q = r * r / t;
        Ok((c.c1.ln() + base - c.c2 * q, c.c3.ln() + base - c.c4 * q))
    } else {
        let g = r * (r / t).ln().max(1.0);
        Ok((-c.c2 * g, -c.c4 * g))
    }
}

/// Exact log p_t(0, x) for the simple random walk with the given total rate.
///
/// Coordinates move independently, each as a walk on Z with rate
/// `total_rate / d`, whose kernel is `e^{−s} I_n(s)`. The Bessel series is
/// summed in log space.
pub fn srw_log_transition(total_rate: f64, t: f64, x: &Site) -> f64 {
    let d = x.dim() as f64;
    let s = total_rate * t / d;
    x.coords().iter().map(|&n| log_bessel_kernel(s, n)).sum()
}

/// `ln(e^{−s} I_n(s))`.
pub fn log_bessel_kernel(s: f64, n: i64) -> f64 {
    let n = n.unsigned_abs() as f64;
    if s == 0.0 {
        return if n == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let lh = (s / 2.0).ln();
    let mut term = -s + n * lh - statrs::function::gamma::ln_gamma(n + 1.0);
    let mut terms = Vec::with_capacity(64);
    let mut max = term;
    let mut j: f64 = 0.0;
    loop {
        terms.push(term);
        max = max.max(term);
        let next = term + 2.0 * lh - (j + 1.0).ln() - (n + j + 1.0).ln();
        j += 1.0;
        if next < term && next < max - 50.0 {
            break;
        }
        term = next;
    }
    max + terms.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Monte Carlo estimate of p_t(0, x) from independent replicas.
pub fn transition_prob_mc(
    total_rate: f64,
    t: f64,
    x: &Site,
    replicas: u64,
    seed: u64,
) -> Result<TailEstimate> {
    ensure(replicas >= 1, || "replicas must be ≥ 1".into())?;
    ensure(total_rate > 0.0 && t >= 0.0, || "rate must be positive and t nonnegative".into())?;
    let origin = Site::origin(x.dim());
    let hits = (0..replicas)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = replica_stream(seed, i);
            run_srw(origin, total_rate, t, &mut rng, |_, _| {}) == *x
        })
        .count() as u64;
    Ok(TailEstimate::from_counts(hits, replicas, t.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenery::TableScenery;

    #[test]
    fn bessel_kernel_matches_known_value() {
        // e^{-1} I_0(1)
        assert!((log_bessel_kernel(1.0, 0).exp() - 0.465_759_607_593_640_3).abs() < 1e-14);
        let total: f64 = (-60..=60).map(|n| log_bessel_kernel(3.0, n).exp()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn envelope_examples() {
        let one = HkConstants { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0 };
        let (lo, hi) = hk_envelope(100.0, &Site::new(&[20]), &one).unwrap();
        let want = -0.5 * 100f64.ln() - 4.0;
        assert!((lo - want).abs() < 1e-12 && (hi - want).abs() < 1e-12);
        let c = HkConstants { c1: 0.5, c2: 2.0, c3: 3.0, c4: 0.1 };
        let (lo, hi) = hk_envelope(16.0, &Site::origin(2), &c).unwrap();
        assert!((lo - (0.5f64.ln() - 16f64.ln())).abs() < 1e-12);
        assert!((hi - (3f64.ln() - 16f64.ln())).abs() < 1e-12);
        // |x| = t takes the Gaussian form
        let (lo, _) = hk_envelope(5.0, &Site::new(&[3, 4]), &one).unwrap();
        assert!((lo - (-0.5 * 2.0 * 5f64.ln() - 5.0)).abs() < 1e-12);
        assert!(hk_envelope(0.5, &Site::origin(1), &one).is_err());
    }

    #[test]
    fn tiny_horizon_has_no_jumps() {
        let mut rng = replica_stream(1, 0);
        let p = simulate_srw(2, 1.0, 1e-300, &mut rng);
        assert!(p.events.is_empty());
        let f = TableScenery::new(1, 3.0);
        let v = simulate_vsrw(&f, 1e-300, &mut rng);
        assert!(v.events.is_empty());
        assert_eq!(v.end(), Site::origin(2));
    }

    #[test]
    fn paths_are_valid() {
        let f = SceneryField::pareto(0.7, 2, 5).unwrap();
        for s in 0..20 {
            let mut rng = replica_stream(s, 0);
            simulate_srw(3, 2.0, 50.0, &mut rng).validate().unwrap();
            simulate_vsrw(&f, 20.0, &mut rng).validate().unwrap();
        }
    }

    #[test]
    fn position_lookup_and_sojourns() {
        let p = WalkPath {
            dim: 1,
            start: Site::new(&[0]),
            events: vec![(1.0, Site::new(&[1])), (2.5, Site::new(&[0]))],
            horizon: 4.0,
        };
        assert_eq!(p.position_at(0.99), Site::new(&[0]));
        assert_eq!(p.position_at(1.0), Site::new(&[1]));
        assert_eq!(p.position_at(3.0), Site::new(&[0]));
        let s: Vec<_> = p.sojourns(2.0).collect();
        assert_eq!(s, vec![(Site::new(&[0]), 0.0, 1.0), (Site::new(&[1]), 1.0, 2.0)]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,x1\n0,0\n1,1\n2.5,0\n");
    }
}

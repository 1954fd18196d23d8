//! Chemical distance on the layered conductance graph over Z^{1+d}.
//!
//! Edges along ±e₁ at transverse position m carry weight z(m)^(−1/2), the
//! others weight 1. Because the vertical weight depends only on m, a
//! geodesic between x and y can be taken to walk transversally to some m,
//! make all of its |x₁ − y₁| vertical steps there, and walk on to y₂:
//!
//! ```text
//! d(x, y) = min_m  ‖x₂ − m‖₁ + ‖m − y₂‖₁ + |x₁ − y₁| · z(m)^(−1/2)
//! ```
//!
//! Any path visits a cheapest transverse site m, pays at least the vertical
//! count times its weight and at least the transverse detour through it, so
//! the minimum over m is exact. Inside an axis-parallel box the detour path
//! stays in the box whenever m does.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{domain, ensure, Error, Result};
use crate::lattice::{BoxIter, Site};
use crate::scenery::Scenery;
use crate::stats::{ols, LineFit};

/// Weight 1/(√ω ∨ 1) of an edge with conductance ω.
pub fn edge_weight(conductance: f64) -> Result<f64> {
    if !(conductance > 0.0) {
        return Err(domain(format!("conductance must be positive, got {conductance}")));
    }
    Ok(1.0 / conductance.sqrt().max(1.0))
}

#[inline]
fn vertical_weight(z: f64) -> f64 {
    1.0 / z.sqrt().max(1.0)
}

/// A finite box `Π [lower_i, upper_i]` of Z^{1+d} with the scenery living
/// on the transverse coordinates.
#[derive(Clone, Copy, Debug)]
pub struct LayeredGraphSpec<'a, S: Scenery + ?Sized> {
    pub field: &'a S,
    pub lower: Site,
    pub upper: Site,
}

impl<'a, S: Scenery + ?Sized> LayeredGraphSpec<'a, S> {
    pub fn new(field: &'a S, lower: Site, upper: Site) -> Result<Self> {
        ensure(lower.dim() == field.dim() + 1 && upper.dim() == lower.dim(), || {
            format!("box must live in Z^{}", field.dim() + 1)
        })?;
        ensure(lower.coords().iter().zip(upper.coords()).all(|(l, u)| l <= u), || {
            "box lower corner exceeds upper corner".into()
        })?;
        Ok(LayeredGraphSpec { field, lower, upper })
    }

    /// The smallest box that makes the restricted distance between x and y
    /// equal to the distance on the whole lattice: their bounding box grown
    /// by 2‖x − y‖₁ on every side.
    pub fn sufficient_for(field: &'a S, x: &Site, y: &Site) -> Result<Self> {
        let margin = 2 * x.l1_dist(y);
        let mut lo = *x;
        let mut hi = *x;
        for i in 0..x.dim() {
            lo.set_coord(i, x.coord(i).min(y.coord(i)) - margin);
            hi.set_coord(i, x.coord(i).max(y.coord(i)) + margin);
        }
        LayeredGraphSpec::new(field, lo, hi)
    }

    pub fn contains(&self, x: &Site) -> bool {
        x.dim() == self.lower.dim()
            && (0..x.dim()).all(|i| self.lower.coord(i) <= x.coord(i) && x.coord(i) <= self.upper.coord(i))
    }

    fn covers_margin(&self, x: &Site, y: &Site) -> bool {
        let margin = 2 * x.l1_dist(y);
        (0..x.dim()).all(|i| {
            self.lower.coord(i) <= x.coord(i).min(y.coord(i)) - margin
                && self.upper.coord(i) >= x.coord(i).max(y.coord(i)) + margin
        })
    }

    fn transverse_box(&self) -> BoxIter {
        BoxIter::new(self.lower.split_first().1, self.upper.split_first().1)
    }
}

/// A distance together with whether the box was large enough to guarantee
/// it equals the distance on the whole lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChemDistance {
    pub distance: f64,
    pub box_sufficient: bool,
}

fn layered_cost<S: Scenery + ?Sized>(field: &S, x2: &Site, y2: &Site, dv: f64, m: &Site) -> f64 {
    (m.l1_dist(x2) + m.l1_dist(y2)) as f64 + dv * vertical_weight(field.value(m))
}

/// Shortest weighted path length between x and y inside the box.
pub fn chemical_distance<S: Scenery + ?Sized>(
    spec: &LayeredGraphSpec<'_, S>,
    x: &Site,
    y: &Site,
) -> Result<ChemDistance> {
    ensure(spec.contains(x) && spec.contains(y), || format!("{x} or {y} lies outside the box"))?;
    let (x1, x2) = x.split_first();
    let (y1, y2) = y.split_first();
    let dv = (x1 - y1).abs() as f64;
    let distance = if dv == 0.0 {
        x2.l1_dist(&y2) as f64
    } else {
        spec.transverse_box()
            .map(|m| layered_cost(spec.field, &x2, &y2, dv, &m))
            .fold(f64::INFINITY, f64::min)
    };
    Ok(ChemDistance {
        distance,
        box_sufficient: spec.covers_margin(x, y),
    })
}

/// Distance on the whole lattice. The transverse search radius around x₂
/// doubles until no site outside it can beat the best cost found.
pub fn chemical_distance_unbounded<S: Scenery + ?Sized>(field: &S, x: &Site, y: &Site) -> f64 {
    let (x1, x2) = x.split_first();
    let (y1, y2) = y.split_first();
    let dv = (x1 - y1).abs() as f64;
    let gap = x2.l1_dist(&y2);
    if dv == 0.0 {
        return gap as f64;
    }
    let mut best = f64::INFINITY;
    let mut searched: Option<i64> = None;
    let mut radius = gap.max(1);
    loop {
        let mut lo = x2;
        let mut hi = x2;
        for i in 0..x2.dim() {
            lo.set_coord(i, x2.coord(i) - radius);
            hi.set_coord(i, x2.coord(i) + radius);
        }
        for m in BoxIter::new(lo, hi) {
            if let Some(r) = searched {
                if m.sub(&x2).linf() <= r {
                    continue;
                }
            }
            best = best.min(layered_cost(field, &x2, &y2, dv, &m));
        }
        // Any m beyond the searched radius pays at least this much transversally.
        let outside = (radius + 1).max(2 * (radius + 1) - gap) as f64;
        if outside >= best {
            return best;
        }
        searched = Some(radius);
        radius *= 2;
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain Dijkstra over every site of the box. Kept as a reference for the
/// layered reduction.
pub fn dijkstra_box<S: Scenery + ?Sized>(
    spec: &LayeredGraphSpec<'_, S>,
    x: &Site,
    y: &Site,
    site_budget: u128,
) -> Result<f64> {
    ensure(spec.contains(x) && spec.contains(y), || format!("{x} or {y} lies outside the box"))?;
    let dim = x.dim();
    let sides: Vec<i64> = (0..dim)
        .map(|i| spec.upper.coord(i) - spec.lower.coord(i) + 1)
        .collect();
    let needed: u128 = sides.iter().map(|&s| s as u128).product();
    if needed > site_budget {
        return Err(Error::Resource { needed, budget: site_budget });
    }
    let index = |s: &Site| -> usize {
        (0..dim).fold(0usize, |acc, i| {
            acc * sides[i] as usize + (s.coord(i) - spec.lower.coord(i)) as usize
        })
    };
    let mut dist = vec![f64::INFINITY; needed as usize];
    let mut heap = BinaryHeap::new();
    dist[index(x)] = 0.0;
    heap.push((Entry(0.0, index(x)), *x));
    let target = index(y);
    while let Some((Entry(d, i), s)) = heap.pop() {
        if i == target {
            return Ok(d);
        }
        if d > dist[i] {
            continue;
        }
        let vw = vertical_weight(spec.field.value(&s.split_first().1));
        for axis in 0..dim {
            for positive in [false, true] {
                let n = s.step(axis, positive);
                if !spec.contains(&n) {
                    continue;
                }
                let nd = d + if axis == 0 { vw } else { 1.0 };
                let j = index(&n);
                if nd < dist[j] {
                    dist[j] = nd;
                    heap.push((Entry(nd, j), n));
                }
            }
        }
    }
    Ok(dist[target])
}

/// Lattice target `round(t^δ)·e₁ + round(t^γ)·e₂` in Z^{1+d}, rounding
/// halves away from zero.
pub fn chemdist_target(t: f64, delta: f64, gamma: f64, dim: usize) -> Site {
    let mut s = Site::origin(dim + 1);
    s.set_coord(0, t.powf(delta).round() as i64);
    s.set_coord(1, t.powf(gamma).round() as i64);
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChemRow {
    pub t: f64,
    pub seed: u64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChemScaling {
    pub rows: Vec<ChemRow>,
    pub fit: LineFit,
}

/// Distances from the origin to the targets of a t grid in each of the
/// given fields, and the least-squares slope of log d against log t over
/// all (t, field) pairs.
pub fn chemdist_scaling<S: Scenery + Sync>(
    fields: &[(u64, S)],
    delta: f64,
    gamma: f64,
    t_grid: &[f64],
) -> Result<ChemScaling> {
    use rayon::prelude::*;
    ensure(delta > 0.5, || format!("delta must exceed 1/2, got {delta}"))?;
    ensure(t_grid.len() >= 2 && t_grid.iter().all(|&t| t >= 1.0), || {
        "t grid needs at least two points, all ≥ 1".into()
    })?;
    ensure(!fields.is_empty(), || "need at least one field".into())?;
    let dim = fields[0].1.dim();
    let jobs: Vec<(f64, usize)> = t_grid
        .iter()
        .flat_map(|&t| (0..fields.len()).map(move |k| (t, k)))
        .collect();
    let rows: Vec<ChemRow> = jobs
        .par_iter()
        .map(|&(t, k)| {
            let target = chemdist_target(t, delta, gamma, dim);
            let (seed, ref field) = fields[k];
            ChemRow {
                t,
                seed,
                distance: chemical_distance_unbounded(field, &Site::origin(dim + 1), &target),
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.distance.ln()).collect();
    Ok(ChemScaling {
        fit: ols(&xs, &ys),
        rows,
    })
}

/// Number of sites in the box.
pub fn box_sites<S: Scenery + ?Sized>(spec: &LayeredGraphSpec<'_, S>) -> u128 {
    (0..spec.lower.dim())
        .map(|i| (spec.upper.coord(i) - spec.lower.coord(i) + 1) as u128)
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenery::{SceneryField, TableScenery};

    #[test]
    fn weights() {
        assert_eq!(edge_weight(4.0).unwrap(), 0.5);
        assert_eq!(edge_weight(1.0).unwrap(), 1.0);
        assert_eq!(edge_weight(0.25).unwrap(), 1.0);
        assert!(edge_weight(0.0).is_err());
    }

    #[test]
    fn small_boxes_by_hand() {
        // Transverse sites 0 and 1 with conductances 4 and 1.
        let f = TableScenery::line(1, 0, &[4.0, 1.0]);
        let spec = LayeredGraphSpec::new(&f, Site::new(&[0, 0]), Site::new(&[1, 0])).unwrap();
        let d = chemical_distance(&spec, &Site::new(&[0, 0]), &Site::new(&[1, 0])).unwrap();
        assert_eq!(d.distance, 0.5);
        let spec = LayeredGraphSpec::new(&f, Site::new(&[0, 1]), Site::new(&[2, 1])).unwrap();
        let d = chemical_distance(&spec, &Site::new(&[0, 1]), &Site::new(&[2, 1])).unwrap();
        assert_eq!(d.distance, 2.0);
        let spec = LayeredGraphSpec::new(&f, Site::new(&[0, 0]), Site::new(&[2, 1])).unwrap();
        let d = chemical_distance(&spec, &Site::new(&[0, 1]), &Site::new(&[2, 1])).unwrap();
        assert_eq!(d.distance, 2.0);
        assert!(!d.box_sufficient);
        // Two vertical edges of conductance 4 and 1 along one path.
        assert_eq!(edge_weight(4.0).unwrap() + edge_weight(1.0).unwrap(), 1.5);
    }

    #[test]
    fn reduction_matches_dijkstra() {
        for seed in 0..20 {
            let f = SceneryField::pareto(0.6, 1, seed).unwrap();
            let spec = LayeredGraphSpec::new(&f, Site::new(&[-6, -4]), Site::new(&[6, 4])).unwrap();
            for (x, y) in [([-6, 0], [6, 1]), ([0, -4], [5, 4]), ([2, 2], [2, -3])] {
                let (x, y) = (Site::new(&x), Site::new(&y));
                let a = chemical_distance(&spec, &x, &y).unwrap().distance;
                let b = dijkstra_box(&spec, &x, &y, 1 << 20).unwrap();
                assert!((a - b).abs() < 1e-12, "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn unbounded_matches_sufficient_box() {
        for seed in 0..10 {
            let f = SceneryField::pareto(1.0, 1, seed).unwrap();
            let x = Site::new(&[0, 0]);
            let y = Site::new(&[9, 2]);
            let spec = LayeredGraphSpec::sufficient_for(&f, &x, &y).unwrap();
            let boxed = chemical_distance(&spec, &x, &y).unwrap();
            assert!(boxed.box_sufficient);
            let free = chemical_distance_unbounded(&f, &x, &y);
            assert!((boxed.distance - free).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_gives_l1() {
        let f = SceneryField::constant(1.0, 2).unwrap();
        let y = Site::new(&[7, -3, 2]);
        assert_eq!(chemical_distance_unbounded(&f, &Site::origin(3), &y), 12.0);
    }

    #[test]
    fn targets_round_half_away_from_zero() {
        assert_eq!(chemdist_target(2.25, 0.5, 0.0, 1), Site::new(&[2, 1]));
        assert_eq!(chemdist_target(6.25, 0.5, 0.0, 1), Site::new(&[3, 1]));
        assert_eq!(chemdist_target(100.0, 1.0, 0.5, 2), Site::new(&[100, 10, 0]));
    }
}

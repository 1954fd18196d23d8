//! Lattice points in Z^d for small d and box enumeration.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

/// Largest supported lattice dimension. Walks in the layered model live in
/// Z^{1+d}, so scenery dimensions go up to `MAX_DIM - 1`.
pub const MAX_DIM: usize = 4;

/// A point of Z^d, 1 ≤ d ≤ [`MAX_DIM`]. Unused trailing coordinates are zero,
/// so the derived ordering is lexicographic for points of equal dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl Site {
    pub fn origin(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Site {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    pub fn new(coords: &[i64]) -> Self {
        let mut s = Site::origin(coords.len());
        s.coords[..coords.len()].copy_from_slice(coords);
        s
    }

    pub fn try_new(coords: &[i64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(domain(format!(
                "lattice dimension must be in 1..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        Ok(Site::new(coords))
    }

    /// The point `x·e₁` in Z^dim.
    pub fn on_axis(dim: usize, x: i64) -> Self {
        let mut s = Site::origin(dim);
        s.coords[0] = x;
        s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> i64 {
        debug_assert!(axis < self.dim());
        self.coords[axis]
    }

    #[inline]
    pub fn set_coord(&mut self, axis: usize, value: i64) {
        debug_assert!(axis < self.dim());
        self.coords[axis] = value;
    }

    /// Nearest neighbour in direction `±e_axis`.
    #[inline]
    pub fn step(mut self, axis: usize, positive: bool) -> Self {
        debug_assert!(axis < self.dim());
        self.coords[axis] += if positive { 1 } else { -1 };
        self
    }

    pub fn l1(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).sum()
    }

    pub fn linf(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn euclid(&self) -> f64 {
        self.coords()
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn l1_dist(&self, other: &Site) -> i64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn sub(&self, other: &Site) -> Site {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = *self;
        for i in 0..self.dim() {
            s.coords[i] -= other.coords[i];
        }
        s
    }

    /// Splits a point of Z^{1+d} into its first coordinate and the remaining
    /// transverse point of Z^d.
    pub fn split_first(&self) -> (i64, Site) {
        assert!(self.dim >= 2, "split_first needs dimension ≥ 2");
        (self.coords[0], Site::new(&self.coords[1..self.dim()]))
    }

    /// Inverse of [`Site::split_first`].
    pub fn join_first(first: i64, rest: &Site) -> Site {
        let mut s = Site::origin(rest.dim() + 1);
        s.coords[0] = first;
        s.coords[1..=rest.dim()].copy_from_slice(rest.coords());
        s
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Site {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Site::try_new(&v).map_err(serde::de::Error::custom)
    }
}

/// Number of sites in the box `[-r, r]^dim`, saturating.
pub fn box_size(dim: usize, radius: u64) -> u128 {
    let side = 2 * radius as u128 + 1;
    (0..dim).fold(1u128, |acc, _| acc.saturating_mul(side))
}

/// Lexicographic iterator over an axis-aligned box `Π [lower_i, upper_i]`.
#[derive(Clone, Debug)]
pub struct BoxIter {
    lower: Site,
    upper: Site,
    next: Option<Site>,
}

impl BoxIter {
    pub fn new(lower: Site, upper: Site) -> Self {
        assert_eq!(lower.dim(), upper.dim());
        let empty = lower
            .coords()
            .iter()
            .zip(upper.coords())
            .any(|(l, u)| l > u);
        BoxIter {
            lower,
            upper,
            next: if empty { None } else { Some(lower) },
        }
    }

    /// The cube `[-r, r]^dim`.
    pub fn cube(dim: usize, radius: u64) -> Self {
        let r = radius as i64;
        let mut lo = Site::origin(dim);
        let mut hi = Site::origin(dim);
        for i in 0..dim {
            lo.set_coord(i, -r);
            hi.set_coord(i, r);
        }
        BoxIter::new(lo, hi)
    }
}

impl Iterator for BoxIter {
    type Item = Site;

    fn next(&mut self) -> Option<Site> {
        let cur = self.next?;
        let mut succ = cur;
        let mut axis = cur.dim();
        loop {
            if axis == 0 {
                self.next = None;
                break;
            }
            axis -= 1;
            if succ.coord(axis) < self.upper.coord(axis) {
                succ.set_coord(axis, succ.coord(axis) + 1);
                self.next = Some(succ);
                break;
            }
            succ.set_coord(axis, self.lower.coord(axis));
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_enumeration_is_lexicographic_and_complete() {
        let sites: Vec<Site> = BoxIter::cube(2, 1).collect();
        assert_eq!(sites.len(), 9);
        assert_eq!(sites[0], Site::new(&[-1, -1]));
        assert_eq!(sites[1], Site::new(&[-1, 0]));
        assert_eq!(sites[8], Site::new(&[1, 1]));
        assert!(sites.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(box_size(2, 1), 9);
    }

    #[test]
    fn split_and_join_roundtrip() {
        let x = Site::new(&[3, -2, 7]);
        let (first, rest) = x.split_first();
        assert_eq!(first, 3);
        assert_eq!(rest, Site::new(&[-2, 7]));
        assert_eq!(Site::join_first(first, &rest), x);
    }

    #[test]
    fn norms() {
        let x = Site::new(&[3, -4]);
        assert_eq!(x.l1(), 7);
        assert_eq!(x.linf(), 4);
        assert_eq!(x.euclid(), 5.0);
        assert_eq!(x.l1_dist(&Site::new(&[0, 0])), 7);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(Site::try_new(&[]).is_err());
        assert!(Site::try_new(&[0; MAX_DIM + 1]).is_err());
    }
}

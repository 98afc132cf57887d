//! Iterations of the discrete Sierpinski demihypercube.
//!
//! Three independent routes produce `D^n`:
//!
//! * [`iterate_recursive`] follows the construction literally: start from the
//!   even-parity 0/1 vectors and repeatedly place shifted copies at `2^k * D^1`.
//! * [`generate_filtered`] scans the whole cube `[0, 2^n)^d` and keeps the
//!   points whose nim-sum is zero.
//! * [`stream_points`] picks the first `d - 1` coordinates freely and solves
//!   for the last one, visiting each point once in constant memory.
//!
//! Materializing routes are guarded by a [`Budget`] on the number of points.

use rayon::slice::ParallelSliceMut;

use crate::error::{Error, Result};
use crate::nim::{nim_sum, Position};

/// Largest supported bounding exponent; coordinates must stay below `2^63`.
pub const MAX_EXPONENT: u32 = 63;

/// Upper bound on materialized points, stored as a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    exponent: u32,
}

impl Budget {
    pub const DEFAULT_EXPONENT: u32 = 24;

    pub fn new(exponent: u32) -> Self {
        Budget { exponent }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Fails when `2^required` exceeds the budget.
    pub fn check(&self, required: u64) -> Result<()> {
        if required > u64::from(self.exponent) {
            return Err(Error::BudgetExceeded {
                required,
                limit: self.exponent,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_EXPONENT)
    }
}

/// Dimension `d` and iteration index `n` of `D^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IterationSpec {
    d: usize,
    n: u32,
}

impl IterationSpec {
    pub fn new(d: usize, n: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension);
        }
        if n == 0 {
            return Err(Error::InvalidExponent {
                n,
                reason: "iterations start at n = 1",
            });
        }
        if n > MAX_EXPONENT {
            return Err(Error::InvalidExponent {
                n,
                reason: "coordinates must stay below 2^63",
            });
        }
        Ok(IterationSpec { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Side length `2^n` of the bounding cube.
    pub fn side(&self) -> u64 {
        1 << self.n
    }

    /// `log2 |D^n| = n (d - 1)`.
    pub fn points_exponent(&self) -> u64 {
        u64::from(self.n).saturating_mul(self.d as u64 - 1)
    }

    /// `log2` of the number of candidates in `[0, 2^n)^d`.
    pub fn candidates_exponent(&self) -> u64 {
        u64::from(self.n).saturating_mul(self.d as u64)
    }

    pub fn expected_cardinality(&self) -> Option<u64> {
        let e = self.points_exponent();
        (e < 64).then(|| 1u64 << e)
    }
}

/// Lexicographically ordered, duplicate-free points of one dimension, all
/// coordinates below `2^n`. Stored flat, `d` coordinates per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    d: usize,
    n: u32,
    coords: Vec<u64>,
}

impl PointSet {
    /// Validates canonical order, dimension, and bounds.
    pub fn from_points<I, P>(d: usize, n: u32, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[u64]>,
    {
        if d == 0 {
            return Err(Error::InvalidDimension);
        }
        if n > MAX_EXPONENT {
            return Err(Error::InvalidExponent {
                n,
                reason: "coordinates must stay below 2^63",
            });
        }
        let mut coords = Vec::new();
        for (i, p) in points.into_iter().enumerate() {
            let p = p.as_ref();
            if p.len() != d {
                return Err(Error::InvalidPointSet(format!(
                    "point {i} has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            if let Some(&x) = p.iter().find(|&&x| x >> n != 0) {
                return Err(Error::InvalidPointSet(format!(
                    "point {i} has coordinate {x} outside [0, 2^{n})"
                )));
            }
            if i > 0 && coords[coords.len() - d..] >= *p {
                return Err(Error::InvalidPointSet(format!(
                    "point {i} is out of lexicographic order or duplicated"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(PointSet { d, n, coords })
    }

    /// Sorts and deduplicates; returns the set and the number of duplicates dropped.
    fn from_unsorted(d: usize, n: u32, flat: Vec<u64>) -> (Self, usize) {
        let count = flat.len() / d;
        let mut order: Vec<usize> = (0..count).collect();
        order.par_sort_unstable_by(|&a, &b| flat[a * d..(a + 1) * d].cmp(&flat[b * d..(b + 1) * d]));
        let mut coords: Vec<u64> = Vec::with_capacity(flat.len());
        let mut duplicates = 0;
        for i in order {
            let p = &flat[i * d..(i + 1) * d];
            if !coords.is_empty() && &coords[coords.len() - d..] == p {
                duplicates += 1;
                continue;
            }
            coords.extend_from_slice(p);
        }
        (PointSet { d, n, coords }, duplicates)
    }

    /// Built from points already known to be in canonical order.
    pub(crate) fn from_sorted_flat(d: usize, n: u32, coords: Vec<u64>) -> Self {
        debug_assert!(coords.len().is_multiple_of(d));
        PointSet { d, n, coords }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Bounding exponent: every coordinate is below `2^n`.
    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&[u64]> {
        self.coords.get(index * self.d..(index + 1) * self.d)
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u64> {
        self.coords.chunks_exact(self.d)
    }

    pub fn contains(&self, point: &[u64]) -> bool {
        if point.len() != self.d {
            return false;
        }
        let d = self.d;
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coords[mid * d..(mid + 1) * d].cmp(point) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.iter()
            .map(|p| Position::new(p.to_vec()).expect("d >= 1"))
    }

    pub fn to_vecs(&self) -> Vec<Vec<u64>> {
        self.iter().map(<[u64]>::to_vec).collect()
    }

    /// The subset with every coordinate below `2^m`, for `m <= n`.
    pub fn restrict(&self, m: u32) -> Result<PointSet> {
        if m > self.n {
            return Err(Error::RestrictTooLarge {
                requested: m,
                bound: self.n,
            });
        }
        let coords = self
            .iter()
            .filter(|p| p.iter().all(|&x| x >> m == 0))
            .flatten()
            .copied()
            .collect();
        Ok(PointSet::from_sorted_flat(self.d, m, coords))
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a [u64];
    type IntoIter = std::slice::ChunksExact<'a, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// `D^1`: the 0/1 vectors of length `d` with an even number of ones.
pub fn base_demihypercube(d: usize) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::InvalidDimension);
    }
    if d > 62 {
        return Err(Error::BudgetExceeded {
            required: d as u64 - 1,
            limit: 62,
        });
    }
    let mut coords = Vec::with_capacity(d << (d - 1));
    // counting over masks with the first coordinate as the high bit is lexicographic
    for mask in 0u64..(1 << d) {
        if mask.count_ones() % 2 == 0 {
            coords.extend((0..d).rev().map(|bit| (mask >> bit) & 1));
        }
    }
    Ok(PointSet::from_sorted_flat(d, 1, coords))
}

/// `D^n` by the recursion `D^{k+1} = union over a in 2^k D^1 of (a + D^k)`.
pub fn iterate_recursive(spec: IterationSpec, budget: Budget) -> Result<PointSet> {
    budget.check(spec.points_exponent())?;
    let d = spec.d();
    let base = base_demihypercube(d)?;
    let mut current: Vec<u64> = base.coords.clone();
    for k in 1..spec.n() {
        let scale = 1u64 << k;
        let mut next = Vec::with_capacity(current.len() * base.len());
        for shift in base.iter() {
            for point in current.chunks_exact(d) {
                next.extend(point.iter().zip(shift).map(|(&x, &a)| x + scale * a));
            }
        }
        current = next;
    }
    let (set, duplicates) = PointSet::from_unsorted(d, spec.n(), current);
    assert_eq!(duplicates, 0, "shifted copies of D^k overlapped");
    Ok(set)
}

/// `P_n`: every point of `[0, 2^n)^d` whose nim-sum is zero.
pub fn generate_filtered(spec: IterationSpec, budget: Budget) -> Result<PointSet> {
    budget.check(spec.candidates_exponent())?;
    let d = spec.d();
    let mut coords = Vec::new();
    let mut cube = Odometer::new(d, spec.side());
    while let Some(candidate) = cube.next_point() {
        if nim_sum(candidate) == 0 {
            coords.extend_from_slice(candidate);
        }
    }
    Ok(PointSet::from_sorted_flat(d, spec.n(), coords))
}

/// Visits every point of `D^n` once, in lexicographic order, without
/// materializing the set. The last coordinate is the nim-sum of the others.
pub fn stream_points<F>(spec: IterationSpec, mut visitor: F)
where
    F: FnMut(&[u64]),
{
    let d = spec.d();
    let mut point = vec![0u64; d];
    let mut prefixes = Odometer::new(d - 1, spec.side());
    while let Some(prefix) = prefixes.next_point() {
        point[..d - 1].copy_from_slice(prefix);
        point[d - 1] = nim_sum(prefix);
        visitor(&point);
    }
}

/// Materializes [`stream_points`] under a budget.
pub fn generate_streamed(spec: IterationSpec, budget: Budget) -> Result<PointSet> {
    budget.check(spec.points_exponent())?;
    let mut coords = Vec::with_capacity(spec.expected_cardinality().unwrap_or(0) as usize * spec.d());
    stream_points(spec, |p| coords.extend_from_slice(p));
    Ok(PointSet::from_sorted_flat(spec.d(), spec.n(), coords))
}

/// Membership in `D` via the nim-sum.
pub fn membership_nimsum(p: &Position) -> bool {
    p.nim_sum() == 0
}

/// Splits `x` at bit `n` into a high part (`2^n` or 0 per coordinate) and the
/// remaining low part. Coordinates must be below `2^(n+1)`.
pub fn split_high_low(coords: &[u64], n: u32) -> (Vec<u64>, Vec<u64>) {
    let threshold = 1u64 << n;
    debug_assert!(coords.iter().all(|&x| x >> n <= 1));
    coords
        .iter()
        .map(|&x| if x >= threshold { (threshold, x - threshold) } else { (0, x) })
        .unzip()
}

/// Membership in `D` by peeling off high parts.
///
/// Picks the smallest `n` with every coordinate below `2^(n+1)`, then at each
/// level requires the high part to have an even number of nonzero coordinates
/// (a point of `2^n D^1`) and recurses on the low part. Level 0 is the `D^1`
/// parity rule itself.
pub fn membership_recursive(p: &Position) -> bool {
    let max = p.coords().iter().copied().max().unwrap_or(0);
    if max == 0 {
        return true;
    }
    let top = 63 - max.leading_zeros();
    let mut low = p.coords().to_vec();
    for level in (0..=top).rev() {
        let (high, rest) = split_high_low(&low, level);
        if high.iter().filter(|&&h| h != 0).count() % 2 != 0 {
            return false;
        }
        low = rest;
    }
    debug_assert!(low.iter().all(|&x| x == 0));
    true
}

/// Lexicographic counter over `[0, side)^dim`, last coordinate fastest.
/// A zero-dimensional cube has exactly one point, the empty tuple.
pub(crate) struct Odometer {
    digits: Vec<u64>,
    side: u64,
    started: bool,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(dim: usize, side: u64) -> Self {
        Odometer {
            digits: vec![0; dim],
            side,
            started: false,
            done: side == 0 && dim > 0,
        }
    }

    pub(crate) fn next_point(&mut self) -> Option<&[u64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.digits);
        }
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.side {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
        self.done = true;
        None
    }
}

//! Axis-perpendicular shadows and self-similarity of the demihypercube.

use crate::error::{Error, Result};
use crate::fractal::{iterate_recursive, stream_points, Budget, IterationSpec, PointSet};

/// Hit counts of a point set projected along one axis onto the full
/// `(d-1)`-dimensional grid `[0, 2^n)^(d-1)`.
///
/// Cells are stored in lexicographic order of the kept coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowGrid {
    d_reduced: usize,
    n: u32,
    dropped_axis: usize,
    counts: Vec<u64>,
}

impl ShadowGrid {
    fn empty(d: usize, n: u32, dropped_axis: usize) -> Self {
        let d_reduced = d - 1;
        let cells = 1usize << (n as usize * d_reduced);
        ShadowGrid {
            d_reduced,
            n,
            dropped_axis,
            counts: vec![0; cells],
        }
    }

    pub fn d_reduced(&self) -> usize {
        self.d_reduced
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn dropped_axis(&self) -> usize {
        self.dropped_axis
    }

    /// Original axis indices of the kept coordinates, in order.
    pub fn kept_axes(&self) -> Vec<usize> {
        (0..=self.d_reduced).filter(|&a| a != self.dropped_axis).collect()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn all_ones(&self) -> bool {
        self.counts.iter().all(|&c| c == 1)
    }

    fn index_of(&self, cell: &[u64]) -> usize {
        cell.iter()
            .fold(0usize, |acc, &x| (acc << self.n) | x as usize)
    }

    pub fn count_at(&self, cell: &[u64]) -> Option<u64> {
        if cell.len() != self.d_reduced || cell.iter().any(|&x| x >> self.n != 0) {
            return None;
        }
        Some(self.counts[self.index_of(cell)])
    }

    /// Cells with their counts, lexicographically.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<u64>, u64)> + '_ {
        let mask = (1u64 << self.n) - 1;
        self.counts.iter().enumerate().map(move |(index, &count)| {
            let cell = (0..self.d_reduced)
                .rev()
                .map(|i| ((index as u64) >> (i as u32 * self.n)) & mask)
                .collect();
            (cell, count)
        })
    }

    fn hit(&mut self, point: &[u64]) {
        let axis = self.dropped_axis;
        let n = self.n;
        let index = point
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != axis)
            .fold(0usize, |acc, (_, &x)| (acc << n) | x as usize);
        self.counts[index] += 1;
    }
}

fn check_axis(d: usize, axis: usize) -> Result<()> {
    if axis >= d {
        return Err(Error::AxisOutOfRange { axis, d });
    }
    Ok(())
}

/// Shadow of `D^n` along `axis`.
///
/// Dropping the last axis uses the streaming bijection directly: each prefix
/// is its own cell. Dropping any other axis streams the same points and
/// re-indexes them by the kept coordinates; the dropped coordinate is the
/// nim-sum of the kept ones.
pub fn shadow(spec: IterationSpec, axis: usize, budget: Budget) -> Result<ShadowGrid> {
    let d = spec.d();
    check_axis(d, axis)?;
    budget.check(spec.points_exponent())?;
    let mut grid = ShadowGrid::empty(d, spec.n(), axis);
    if axis == d - 1 {
        let mut index = 0usize;
        stream_points(spec, |_| {
            grid.counts[index] += 1;
            index += 1;
        });
    } else {
        stream_points(spec, |p| grid.hit(p));
    }
    Ok(grid)
}

/// Projects a materialized point set along `axis`, counting hits per cell.
pub fn project(ps: &PointSet, axis: usize, budget: Budget) -> Result<ShadowGrid> {
    let d = ps.dim();
    check_axis(d, axis)?;
    budget.check(u64::from(ps.exponent()) * (d as u64 - 1))?;
    let mut grid = ShadowGrid::empty(d, ps.exponent(), axis);
    for p in ps {
        grid.hit(p);
    }
    Ok(grid)
}

/// True iff `restrict(D^n, n-1) = D^(n-1)`.
pub fn verify_self_similarity(spec: IterationSpec, budget: Budget) -> Result<bool> {
    if spec.n() < 2 {
        return Err(Error::InvalidExponent {
            n: spec.n(),
            reason: "self-similarity compares against iteration n - 1 >= 1",
        });
    }
    let outer = iterate_recursive(spec, budget)?;
    let inner = iterate_recursive(IterationSpec::new(spec.d(), spec.n() - 1)?, budget)?;
    Ok(outer.restrict(spec.n() - 1)? == inner)
}

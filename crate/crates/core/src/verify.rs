//! Exhaustive check that the recursive construction and the nim-sum filter
//! produce the same sets, together with the high/low decomposition used to
//! argue it level by level.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::fractal::{
    generate_filtered, iterate_recursive, split_high_low, Budget, IterationSpec, Odometer,
    PointSet,
};
use crate::nim::nim_sum;

/// Cells with `n (d - 1)` above this are skipped by the default sweep.
pub const DEFAULT_SWEEP_EXPONENT: u32 = 16;

/// First index at which two canonically ordered point sets differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub index: usize,
    pub recursive: Option<Vec<u64>>,
    pub filtered: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub d: usize,
    pub n: u32,
    pub equal: bool,
    pub cardinality_recursive: u64,
    pub cardinality_filtered: u64,
    pub expected_cardinality: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
    pub first_discrepancy: Option<Discrepancy>,
}

fn as_millis<S: Serializer>(elapsed: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(elapsed.as_secs_f64() * 1e3)
}

impl VerificationReport {
    /// Equality and all three cardinalities agree.
    pub fn passed(&self) -> bool {
        self.equal
            && self.cardinality_recursive == self.expected_cardinality
            && self.cardinality_filtered == self.expected_cardinality
    }
}

/// Walks both sequences in order; `None` when identical.
pub fn compare_sorted(recursive: &PointSet, filtered: &PointSet) -> Option<Discrepancy> {
    let mut left = recursive.iter();
    let mut right = filtered.iter();
    let mut index = 0;
    loop {
        match (left.next(), right.next()) {
            (None, None) => return None,
            (a, b) if a == b => index += 1,
            (a, b) => {
                return Some(Discrepancy {
                    index,
                    recursive: a.map(<[u64]>::to_vec),
                    filtered: b.map(<[u64]>::to_vec),
                })
            }
        }
    }
}

/// Builds `D^n` both ways and compares them element by element.
pub fn verify_theorem(spec: IterationSpec, budget: Budget) -> Result<VerificationReport> {
    let start = Instant::now();
    let recursive = iterate_recursive(spec, budget)?;
    let filtered = generate_filtered(spec, budget)?;
    let first_discrepancy = compare_sorted(&recursive, &filtered);
    Ok(VerificationReport {
        d: spec.d(),
        n: spec.n(),
        equal: first_discrepancy.is_none(),
        cardinality_recursive: recursive.len() as u64,
        cardinality_filtered: filtered.len() as u64,
        expected_cardinality: spec.expected_cardinality().unwrap_or(u64::MAX),
        elapsed: start.elapsed(),
        first_discrepancy,
    })
}

/// Verifies every `(d, n)` with `d <= max_d`, `n <= max_n` and
/// `n (d - 1) <= sweep_exponent`, in parallel. Reports come back ordered by
/// `(d, n)`.
pub fn sweep(max_d: usize, max_n: u32, sweep_exponent: u32) -> Result<Vec<VerificationReport>> {
    // filtering enumerates 2^(n d) = 2^(n (d - 1) + n) candidates
    let budget = Budget::new(sweep_exponent + max_n);
    let cells: Vec<IterationSpec> = (1..=max_d)
        .flat_map(|d| (1..=max_n).map(move |n| (d, n)))
        .map(|(d, n)| IterationSpec::new(d, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|s| s.points_exponent() <= u64::from(sweep_exponent))
        .collect();
    cells
        .into_par_iter()
        .map(|spec| verify_theorem(spec, budget))
        .collect()
}

/// The two halves of the inductive step for one point `x` of `[0, 2^(n+1))^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveSplit {
    pub high: Vec<u64>,
    pub low: Vec<u64>,
    /// The high part has an even number of nonzero coordinates.
    pub high_even: bool,
    /// The low part lies in `P_n`.
    pub low_in_restriction: bool,
    /// `x` lies in `P_(n+1)`.
    pub in_next_restriction: bool,
}

impl InductiveSplit {
    pub fn new(x: &[u64], n: u32) -> Self {
        let (high, low) = split_high_low(x, n);
        let high_even = high.iter().filter(|&&h| h != 0).count() % 2 == 0;
        let low_in_restriction = low.iter().all(|&y| y >> n == 0) && nim_sum(&low) == 0;
        let in_next_restriction = x.iter().all(|&v| v >> (n + 1) == 0) && nim_sum(x) == 0;
        InductiveSplit {
            high,
            low,
            high_even,
            low_in_restriction,
            in_next_restriction,
        }
    }

    pub fn consistent(&self) -> bool {
        self.in_next_restriction == (self.high_even && self.low_in_restriction)
    }
}

/// First `x` in `[0, 2^(n+1))^d` where membership in `P_(n+1)` disagrees with
/// the decomposition, or `None`.
pub fn find_inductive_counterexample(
    spec: IterationSpec,
    budget: Budget,
) -> Result<Option<Vec<u64>>> {
    let next = IterationSpec::new(spec.d(), spec.n() + 1)?;
    budget.check(next.candidates_exponent())?;
    let mut cube = Odometer::new(spec.d(), next.side());
    while let Some(x) = cube.next_point() {
        if !InductiveSplit::new(x, spec.n()).consistent() {
            return Ok(Some(x.to_vec()));
        }
    }
    Ok(None)
}

pub fn verify_inductive_step(spec: IterationSpec, budget: Budget) -> Result<bool> {
    Ok(find_inductive_counterexample(spec, budget)?.is_none())
}

//! Exhaustive searches: the bounded-count exception census and sumset
//! uniqueness checks.
//!
//! The census keeps one bit per integer and grows the reachable set by one
//! summand per round: layer_{t+1} = layer_t | (layer_t << s) over every
//! power s. Rounds are data-parallel over disjoint word ranges of the new
//! layer; the merge is a pure OR, so results do not depend on worker count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::repr::powers_u64;

/// Default ceiling on census bitmap size (bits); two layers are live.
pub const DEFAULT_CENSUS_BUDGET_BITS: u64 = 1 << 28;

/// Outcome of an exception census: which n <= limit cannot be written as a
/// sum of at most `cap` binary k'th powers.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionCensus {
    pub k: u32,
    pub cap: u32,
    pub limit: u64,
    pub count: u64,
    pub max_exception: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceptions: Option<Vec<u64>>,
}

/// Exact exception set for sums of at most `cap` powers, up to `limit`.
pub fn census(k: u32, cap: u32, limit: u64, keep_list: bool) -> Result<ExceptionCensus> {
    census_with_budget(k, cap, limit, keep_list, DEFAULT_CENSUS_BUDGET_BITS)
}

pub fn census_with_budget(
    k: u32,
    cap: u32,
    limit: u64,
    keep_list: bool,
    budget_bits: u64,
) -> Result<ExceptionCensus> {
    if k == 0 {
        return Err(Error::domain("census requires k >= 1"));
    }
    if limit > budget_bits {
        return Err(Error::Resource(format!(
            "census limit {limit} exceeds the bitmap budget of {budget_bits} bits"
        )));
    }

    let words = (limit / 64 + 1) as usize;
    let powers = powers_u64(2, k, limit);

    // layer 0: only the empty sum
    let mut layer = vec![0u64; words];
    layer[0] = 1;

    for _ in 0..cap {
        let prev = &layer;
        let next: Vec<u64> = (0..words)
            .into_par_iter()
            .map(|w| {
                let mut acc = prev[w];
                for &s in &powers {
                    let (q, r) = ((s / 64) as usize, s % 64);
                    if w < q {
                        continue;
                    }
                    let lo = prev[w - q];
                    acc |= if r == 0 {
                        lo
                    } else {
                        let hi = if w > q { prev[w - q - 1] } else { 0 };
                        // dst bit v comes from src bit v - s
                        (lo << r) | (hi >> (64 - r))
                    };
                }
                acc
            })
            .collect();
        // monotone growth: reachable sets only ever gain members
        debug_assert!(next.iter().zip(&layer).all(|(n, p)| n & p == *p));
        layer = next;
    }

    let mut count = 0u64;
    let mut max_exception = None;
    let mut list = keep_list.then(Vec::new);
    for v in 0..=limit {
        if layer[(v / 64) as usize] >> (v % 64) & 1 == 0 {
            count += 1;
            max_exception = Some(v);
            if let Some(l) = list.as_mut() {
                l.push(v);
            }
        }
    }

    Ok(ExceptionCensus { k, cap, limit, count, max_exception, exceptions: list })
}

/// Expected versus observed size of the sumset C_n + ... + C_{n+k-1},
/// where C_m is the set of 2^{m-1} powers with m-bit blocks. Equality
/// means every sum is achieved exactly one way.
#[derive(Debug, Clone, Serialize)]
pub struct SumsetReport {
    pub k: u32,
    pub n: u64,
    pub expected: u64,
    pub observed: u64,
    /// Up to a handful of colliding sums with two distinct summand tuples.
    pub collisions: Vec<CollisionWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollisionWitness {
    pub sum: u128,
    pub first: Vec<u128>,
    pub second: Vec<u128>,
}

impl SumsetReport {
    pub fn is_unique(&self) -> bool {
        self.observed == self.expected && self.collisions.is_empty()
    }
}

/// Default ceiling on how many sums one report may enumerate.
pub const DEFAULT_SUMSET_BUDGET: u64 = 1 << 22;

pub fn sumset_unique(k: u32, n: u64) -> Result<SumsetReport> {
    sumset_unique_with_budget(k, n, DEFAULT_SUMSET_BUDGET)
}

pub fn sumset_unique_with_budget(k: u32, n: u64, budget: u64) -> Result<SumsetReport> {
    if k == 0 || n == 0 {
        return Err(Error::domain("sumset_unique requires k >= 1 and n >= 1"));
    }
    // expected = prod_i 2^{n+i-1}; sums must also fit u128
    let log_expected: u64 = (0..k as u64).map(|i| n + i - 1).sum();
    if log_expected >= 63 || u64::from(k) * (n + k as u64) >= 120 {
        return Err(Error::Resource(format!(
            "sumset for k = {k}, n = {n} exceeds the enumeration budget"
        )));
    }
    let expected = 1u64 << log_expected;
    if expected > budget {
        return Err(Error::Resource(format!(
            "sumset for k = {k}, n = {n} exceeds the enumeration budget"
        )));
    }

    // the k summand sets, as u128 values
    let sets: Vec<Vec<u128>> = (0..k as u64)
        .map(|i| {
            let m = n + i;
            let c: u128 = (0..k as u128).map(|j| 1u128 << (m as u128 * j)).sum();
            ((1u64 << (m - 1))..(1u64 << m)).map(|a| a as u128 * c).collect()
        })
        .collect();

    let mut seen: HashMap<u128, Vec<u128>> = HashMap::with_capacity(expected as usize);
    let mut collisions = Vec::new();
    let mut tuple = vec![0u128; k as usize];

    fn walk(
        sets: &[Vec<u128>],
        depth: usize,
        acc: u128,
        tuple: &mut Vec<u128>,
        seen: &mut HashMap<u128, Vec<u128>>,
        collisions: &mut Vec<CollisionWitness>,
    ) {
        if depth == sets.len() {
            if let Some(first) = seen.get(&acc) {
                if collisions.len() < 8 {
                    collisions.push(CollisionWitness {
                        sum: acc,
                        first: first.clone(),
                        second: tuple.clone(),
                    });
                }
            } else {
                seen.insert(acc, tuple.clone());
            }
            return;
        }
        for &v in &sets[depth] {
            tuple[depth] = v;
            walk(sets, depth + 1, acc + v, tuple, seen, collisions);
        }
    }
    walk(&sets, 0, 0, &mut tuple, &mut seen, &mut collisions);

    Ok(SumsetReport {
        k,
        n,
        expected,
        observed: seen.len() as u64,
        collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::MinRepTable;

    #[test]
    fn census_of_zero_limit_has_no_exceptions() {
        let c = census(3, 9, 0, true).unwrap();
        assert_eq!(c.count, 0);
        assert_eq!(c.exceptions.as_deref(), Some(&[][..]));
    }

    #[test]
    fn census_matches_dp_oracle_for_squares() {
        let limit = 100_000u64;
        let c = census(2, 4, limit, true).unwrap();
        let dp = MinRepTable::build(2, limit).unwrap();
        let oracle: Vec<u64> = (0..=limit)
            .filter(|&v| dp.min_count(v).is_none_or(|m| m > 4))
            .collect();
        assert_eq!(c.count, oracle.len() as u64);
        assert_eq!(c.exceptions.unwrap(), oracle);
    }

    #[test]
    fn census_matches_dp_oracle_for_cubes() {
        let limit = 100_000u64;
        let c = census(3, 9, limit, true).unwrap();
        let dp = MinRepTable::build(3, limit).unwrap();
        for &v in c.exceptions.as_ref().unwrap().iter().take(200) {
            assert!(dp.min_count(v).is_none_or(|m| m > 9), "v = {v}");
        }
        let oracle_count =
            (0..=limit).filter(|&v| dp.min_count(v).is_none_or(|m| m > 9)).count();
        assert_eq!(c.count, oracle_count as u64);
    }

    #[test]
    fn census_respects_budget() {
        assert!(matches!(
            census_with_budget(3, 9, 1 << 30, false, 1 << 20),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn sumset_single_set_is_trivially_unique() {
        for n in 1..=10u64 {
            let r = sumset_unique(1, n).unwrap();
            assert!(r.is_unique());
            assert_eq!(r.observed, 1 << (n - 1));
        }
    }

    #[test]
    fn sumset_squares_at_n3() {
        let r = sumset_unique(2, 3).unwrap();
        assert_eq!(r.expected, 32);
        assert_eq!(r.observed, 32);
        assert!(r.is_unique());
    }

    #[test]
    fn sumset_cubes_at_n4() {
        // |C_4| * |C_5| * |C_6| = 2^3 * 2^4 * 2^5
        let r = sumset_unique(3, 4).unwrap();
        assert_eq!(r.expected, 4096);
        assert_eq!(r.observed, 4096);
        assert!(r.is_unique());
    }

    #[test]
    fn sumset_budget_guard() {
        assert!(matches!(sumset_unique(3, 30), Err(Error::Resource(_))));
    }
}

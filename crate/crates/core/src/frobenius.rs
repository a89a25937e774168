//! Frobenius numbers and tail representations for the scaled power set.
//!
//! Dividing the binary k'th powers by their gcd E_k leaves a numerical
//! semigroup with gcd 1 whose smallest positive element m0 = (2^k - 1)/E_k
//! is tiny, so an Apery-style table over residues mod m0 — computed as
//! shortest paths in the residue graph — answers representability queries
//! and yields the Frobenius number exactly.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gcd::e_k;
use crate::repr::{big_pow, enumerate, recognize, BlockPower};

/// Residue classes beyond this are refused rather than allocated.
const MAX_MODULUS: u64 = 1 << 26;
/// Cap on how many scaled generators one table may hold.
const MAX_GENERATORS: usize = 1 << 22;
/// Default upper bound on k for the public Frobenius-number entry point.
pub const DEFAULT_MAX_K: u32 = 6;

/// Shortest-path table over residues mod m0 for the scaled semigroup.
#[derive(Debug, Clone)]
pub struct SemigroupTable {
    k: u32,
    e_k: BigUint,
    modulus: u64,
    /// Minimal representable scaled value in each residue class.
    apery: Vec<BigUint>,
    /// Index into `generators` of the edge that last reached each residue.
    entry_gen: Vec<Option<usize>>,
    /// Scaled generators up to the cutoff, ascending.
    generators: Vec<BigUint>,
    /// Largest block length whose elements were admitted as generators.
    block_len_used: u64,
    frobenius: BigUint,
}

impl SemigroupTable {
    /// Builds the table for k >= 2, growing the generator cutoff until it
    /// provably covers every minimal representation (cutoff >= max Apery
    /// value, so any omitted generator is too large to appear in one).
    pub fn build(k: u32) -> Result<Self> {
        Self::build_with_min_block_len(k, 1)
    }

    fn build_with_min_block_len(k: u32, min_block_len: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain("semigroup table requires k >= 2"));
        }
        let e = e_k(2, k)?;
        let c1 = big_pow(2, k as u64) - 1u32;
        let (modulus_big, rem) = c1.div_rem(&e);
        debug_assert!(rem.is_zero());
        let modulus = modulus_big
            .to_u64()
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| {
                Error::Resource(format!("residue table for k = {k} exceeds the memory budget"))
            })?;

        let mut block_len = min_block_len.max(1);
        loop {
            let cutoff_raw = big_pow(2, k as u64 * block_len) - 1u32;
            let generators: Vec<BigUint> = enumerate(2, k, cutoff_raw)
                .skip(1)
                .map(|v| &v / &e)
                .collect();
            if generators.len() > MAX_GENERATORS {
                return Err(Error::Resource(format!(
                    "generator set for k = {k} exceeds {MAX_GENERATORS} elements"
                )));
            }
            let cutoff_scaled = generators.last().cloned().unwrap_or_default();

            if let Some((apery, entry_gen)) = shortest_paths(modulus, &generators) {
                let max_apery = apery.iter().max().cloned().unwrap_or_default();
                if max_apery <= cutoff_scaled {
                    let frobenius = &max_apery - modulus;
                    return Ok(SemigroupTable {
                        k,
                        e_k: e,
                        modulus,
                        apery,
                        entry_gen,
                        generators,
                        block_len_used: block_len,
                        frobenius,
                    });
                }
            }
            block_len += 1;
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gcd(&self) -> &BigUint {
        &self.e_k
    }

    /// Smallest positive scaled generator, the table modulus.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The Frobenius number of the scaled set.
    pub fn frobenius(&self) -> &BigUint {
        &self.frobenius
    }

    pub fn generators(&self) -> &[BigUint] {
        &self.generators
    }

    /// Minimal representable scaled value in the class of r mod m0.
    pub fn apery(&self, residue: u64) -> &BigUint {
        &self.apery[residue as usize]
    }

    /// Whether a scaled value is a non-negative combination of generators.
    pub fn representable_scaled(&self, w: &BigUint) -> bool {
        let r = (w % self.modulus).to_u64().expect("residue fits u64");
        w >= &self.apery[r as usize]
    }

    /// Rebuilds with the generator cutoff pushed one block length further
    /// (at least doubling it) and reports whether the Frobenius number is
    /// unchanged.
    pub fn stable_under_doubled_cutoff(&self) -> Result<bool> {
        let again = Self::build_with_min_block_len(self.k, self.block_len_used + 1)?;
        Ok(again.frobenius == self.frobenius)
    }

    /// Writes v (an unscaled multiple of E_k) as a multiset of k'th powers
    /// by walking the residue table back to zero; multiplicities can be
    /// large, so terms come as (power, count) pairs.
    pub fn represent(&self, v: &BigUint) -> Result<Vec<(BlockPower, BigUint)>> {
        let (w, rem) = v.div_rem(&self.e_k);
        if !rem.is_zero() {
            return Err(Error::NotMultipleOfGcd { n: v.clone(), e_k: self.e_k.clone() });
        }
        if w.is_zero() {
            return Ok(Vec::new());
        }
        let r = (&w % self.modulus).to_u64().expect("residue fits u64") as usize;
        if w < self.apery[r] {
            return Err(Error::NotRepresentable { v: v.clone() });
        }

        let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
        let mut cur = r;
        while !self.apery[cur].is_zero() {
            let g_idx = self.entry_gen[cur].expect("reached residue has an entry edge");
            *counts.entry(g_idx).or_default() += 1u32;
            let g_mod = (&self.generators[g_idx] % self.modulus)
                .to_u64()
                .expect("residue fits u64");
            cur = ((cur as u64 + self.modulus - g_mod) % self.modulus) as usize;
        }
        let copies_of_modulus = (&w - &self.apery[r]) / self.modulus;

        let mut terms: Vec<(BlockPower, BigUint)> = Vec::new();
        let mut push = |scaled: &BigUint, count: BigUint| {
            if count.is_zero() {
                return;
            }
            let raw = scaled * &self.e_k;
            let power = recognize(&raw, self.k, 2)
                .expect("scaled generators come from the power set");
            terms.push((power, count));
        };
        for (g_idx, count) in counts {
            push(&self.generators[g_idx].clone(), count);
        }
        push(&BigUint::from(self.modulus), copies_of_modulus);
        Ok(terms)
    }
}

/// Dijkstra over residues mod m0; edge r -> (r + g) mod m0 costs g.
/// Returns None if some residue is unreachable with these generators.
fn shortest_paths(
    modulus: u64,
    generators: &[BigUint],
) -> Option<(Vec<BigUint>, Vec<Option<usize>>)> {
    let m = modulus as usize;
    // generators that do not change the residue can never shorten a path
    let edges: Vec<(usize, u64)> = generators
        .iter()
        .enumerate()
        .filter_map(|(idx, g)| {
            let r = (g % modulus).to_u64()?;
            (r != 0).then_some((idx, r))
        })
        .collect();

    let mut dist: Vec<Option<BigUint>> = vec![None; m];
    let mut entry: Vec<Option<usize>> = vec![None; m];
    let mut heap: BinaryHeap<Reverse<(BigUint, usize)>> = BinaryHeap::new();
    dist[0] = Some(BigUint::zero());
    heap.push(Reverse((BigUint::zero(), 0)));

    while let Some(Reverse((d, r))) = heap.pop() {
        if dist[r].as_ref() != Some(&d) {
            continue;
        }
        for &(g_idx, g_mod) in &edges {
            let next = (r as u64 + g_mod) as usize % m;
            let cand = &d + &generators[g_idx];
            if dist[next].as_ref().is_none_or(|cur| cand < *cur) {
                dist[next] = Some(cand.clone());
                entry[next] = Some(g_idx);
                heap.push(Reverse((cand, next)));
            }
        }
    }

    let apery: Option<Vec<BigUint>> = dist.into_iter().collect();
    apery.map(|a| (a, entry))
}

/// Exact Frobenius number of k >= 2 binary k'th powers scaled by their gcd,
/// guarded by a configurable maximum (tables above it can be expensive).
pub fn frobenius_number(k: u32) -> Result<BigUint> {
    frobenius_number_with_max(k, DEFAULT_MAX_K)
}

pub fn frobenius_number_with_max(k: u32, max_k: u32) -> Result<BigUint> {
    if k < 2 || k > max_k {
        return Err(Error::domain(format!(
            "frobenius_number supports 2 <= k <= {max_k}, got {k}"
        )));
    }
    Ok(SemigroupTable::build(k)?.frobenius().clone())
}

/// F({a, b}) = ab - a - b for coprime a, b >= 2.
pub fn two_generator_frobenius(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    if a < &BigUint::from(2u32) || b < &BigUint::from(2u32) {
        return Err(Error::domain("two-generator Frobenius requires a, b >= 2"));
    }
    if !a.gcd(b).is_one() {
        return Err(Error::domain(format!("gcd({a}, {b}) != 1")));
    }
    Ok(a * b - a - b)
}

//! Constructive decomposition of a target into binary k'th powers.
//!
//! The driver follows the change-of-basis construction: peel off a fixed
//! offset Z, write the bulk X as an exact rational combination of block
//! multipliers c(n)..c(n+k-1), split the integer parts into powers, turn
//! the fractional parts into repeating-block powers through the periodic
//! binary expansion of 1/d, and resolve whatever remains (always a multiple
//! of the set gcd above its Frobenius bound) through the semigroup table.
//!
//! Multiplicities are first-class: certificates store (power, count) pairs
//! because tail counts grow with the target even though the distinct-term
//! list stays small.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::multiplicative_order;
use crate::error::{Error, Result};
use crate::frobenius::SemigroupTable;
use crate::gcd::e_k;
use crate::repr::{big_pow, block_multiplier, recognize, BlockPower};
use crate::vander::{ratio_to_f64, VanderSystem};

/// Default ceiling for the exact-minimum DP fallback (one byte per value).
pub const DEFAULT_DP_LIMIT: u64 = 1 << 24;

/// Which stage of the construction emitted a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    /// Integer coefficient split across same-length blocks.
    #[serde(rename = "SPLIT_X1")]
    SplitX1,
    /// Fractional mass recovered from the periodic expansion of 1/d.
    #[serde(rename = "FRACTION_X4")]
    FractionX4,
    /// Constant-size remainder resolved by the semigroup table (also used
    /// for whole-target fallback certificates).
    #[serde(rename = "TAIL")]
    Tail,
}

/// How a certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Full change-of-basis pipeline.
    Pipeline,
    /// Exact-minimum DP witness (small targets).
    DpMinimal,
    /// Whole target resolved through the semigroup table.
    TailOnly,
    /// k = 1: the target is its own single block.
    SingleBlock,
}

#[derive(Debug, Clone)]
pub struct DecompTerm {
    pub power: BlockPower,
    pub multiplicity: BigUint,
    pub stage: Stage,
}

/// Residual audit trail of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineAudit {
    pub offset_z: BigUint,
    pub bulk_x: BigUint,
    pub window: u64,
    pub quotient: BigUint,
    pub greedy: Vec<u64>,
    pub integer_coeffs: Vec<BigUint>,
    pub coeff_numerators: Vec<BigInt>,
    pub coeff_denominator: BigUint,
    pub x1: BigUint,
    pub x2: BigUint,
    pub x3: BigUint,
    pub x4: BigUint,
    /// Observed max (e_i + b_i) / 2^n; the lower bound is asserted exactly,
    /// the upper ratio is only recorded.
    pub upper_ratio: f64,
}

/// A certified multiset of binary k'th powers summing to the target.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub target: BigUint,
    pub base: u64,
    pub k: u32,
    pub terms: Vec<DecompTerm>,
    pub method: Method,
    pub audit: Option<PipelineAudit>,
}

impl Decomposition {
    /// Total number of summands, counted with multiplicity.
    pub fn term_count(&self) -> BigUint {
        self.terms.iter().map(|t| t.multiplicity.clone()).sum()
    }

    pub fn sum(&self) -> BigUint {
        self.terms
            .iter()
            .map(|t| t.power.value() * &t.multiplicity)
            .sum()
    }
}

/// Independent certificate check: every term must re-recognize as a base-b
/// k'th power and the multiset must resum to the target exactly.
pub fn verify(d: &Decomposition) -> Result<()> {
    let mut sum = BigUint::zero();
    for term in &d.terms {
        if term.power.base() != d.base || term.power.k() != d.k {
            return Err(Error::domain("certificate term has mismatched base or k"));
        }
        if term.multiplicity.is_zero() {
            return Err(Error::domain("certificate term has zero multiplicity"));
        }
        let value = term.power.value();
        match recognize(&value, d.k, d.base) {
            Some(p) if p == term.power => {}
            _ => {
                return Err(Error::domain(format!(
                    "certificate term {value} is not a base-{} {}'th power",
                    d.base, d.k
                )))
            }
        }
        sum += value * &term.multiplicity;
    }
    if sum != d.target {
        return Err(Error::domain(format!(
            "certificate sums to {sum}, target is {}",
            d.target
        )));
    }
    let e = e_k(d.base, d.k)?;
    if !(&d.target % &e).is_zero() {
        return Err(Error::NotMultipleOfGcd { n: d.target.clone(), e_k: e });
    }
    Ok(())
}

/// Writes a * c(n) as at most ceil(a / (2^n - 1)) powers of block length n:
/// full blocks of 2^n - 1 plus a balanced final pair.
pub fn split_multiple(a: &BigUint, block_len: u64, k: u32) -> Result<Vec<(BlockPower, BigUint)>> {
    if block_len == 0 || k == 0 {
        return Err(Error::domain("split_multiple requires n >= 1 and k >= 1"));
    }
    let lo = big_pow(2, block_len - 1);
    if a < &lo {
        return Err(Error::domain(format!(
            "split_multiple requires a >= 2^{} (got {a})",
            block_len - 1
        )));
    }
    let hi = big_pow(2, block_len);
    let full = &hi - 1u32;

    let mut bag: BTreeMap<BigUint, BigUint> = BTreeMap::new();
    if a < &hi {
        bag.insert(a.clone(), BigUint::one());
    } else {
        // a = (b - 2)(2^n - 1) + d1 + d2 with the final pair balanced around
        // (2^n - 1) - c/2
        let copies = a.div_ceil(&full);
        let excess = &copies * &full - a; // in [0, 2^n - 1)
        let (half, odd) = excess.div_rem(&BigUint::from(2u32));
        let d2 = &full - &half;
        let d1 = if odd.is_zero() { d2.clone() } else { &d2 - 1u32 };
        debug_assert!(d1 >= lo && d2 < hi && d1 <= d2);

        let whole = &copies - 2u32;
        if !whole.is_zero() {
            bag.insert(full.clone(), whole);
        }
        *bag.entry(d1).or_default() += 1u32;
        *bag.entry(d2).or_default() += 1u32;
    }

    bag.into_iter()
        .map(|(block, count)| {
            BlockPower::new(2, k, block_len, block).map(|p| (p, count))
        })
        .collect()
}

/// The binary j'th power floor(2^{jm+e} / f) carried by the periodic binary
/// expansion of 1/f: block length m = ord_2(f), block value q * 2^e with
/// q = (2^m - 1)/f and e = floor(log2 f).
pub fn periodic_fraction_power(f: u64, j: u32) -> Result<BlockPower> {
    if f <= 1 || f % 2 == 0 {
        return Err(Error::domain(format!(
            "periodic_fraction_power requires odd f > 1, got {f}"
        )));
    }
    if j == 0 {
        return Err(Error::domain("periodic_fraction_power requires j >= 1"));
    }
    let e = 63 - f.leading_zeros() as u64;
    let m = multiplicative_order(2, f).expect("2 is a unit mod odd f");
    let q = (big_pow(2, m) - 1u32) / f;
    let block = q << e;
    // the constructor enforces 2^{m-1} <= q * 2^e < 2^m
    BlockPower::new(2, j, m, block)
}

/// One distinct power (with its copy count) plus the integer remainder t
/// from Lemma-style division: sum + t = floor(2^n / g).
type FloorParts = (Vec<(BlockPower, BigUint)>, BigUint);

/// Writes floor(2^n / g) as copies of a single binary k'th power plus a
/// small integer remainder. Requires the exponent to reach at least one
/// full period: n >= l + k (for g = 2^l) or n >= l + e + k*m otherwise.
pub fn floor_pow2_over(n: u64, g: &BigUint, k: u32) -> Result<FloorParts> {
    if g.is_zero() {
        return Err(Error::domain("floor_pow2_over requires g >= 1"));
    }
    if k == 0 {
        return Err(Error::domain("floor_pow2_over requires k >= 1"));
    }
    let two_adic = g.trailing_zeros().unwrap_or(0);
    let odd = g >> two_adic;
    let odd_u64 = odd
        .to_u64()
        .ok_or_else(|| Error::Resource("odd part of g exceeds the factoring budget".into()))?;
    let order = if odd_u64 == 1 {
        None
    } else {
        Some(multiplicative_order(2, odd_u64).expect("2 is a unit mod odd f"))
    };
    floor_pow2_parts(n, two_adic, odd_u64, order, k)
}

fn floor_pow2_parts(
    n: u64,
    two_adic: u64,
    odd: u64,
    order: Option<u64>,
    k: u32,
) -> Result<FloorParts> {
    if odd == 1 {
        // 2^{n-l} = 2^i (2^{rk} - 1) + 2^i
        if n < two_adic + k as u64 {
            return Err(Error::domain(format!(
                "floor_pow2_over needs n >= {} for this g",
                two_adic + k as u64
            )));
        }
        let (r, i) = (n - two_adic).div_rem(&(k as u64));
        let copies = BigUint::one() << i;
        let power = BlockPower::new(2, k, r, big_pow(2, r) - 1u32)?;
        return Ok((vec![(power, copies.clone())], copies));
    }

    let e = 63 - odd.leading_zeros() as u64;
    let m = order.expect("order precomputed for odd > 1");
    let period = k as u64 * m;
    if n < two_adic + e + period {
        return Err(Error::domain(format!(
            "floor_pow2_over needs n >= {} for this g",
            two_adic + e + period
        )));
    }
    let (r, i) = (n - two_adic - e).div_rem(&period);
    debug_assert!(r >= 1);
    let r_u32 = u32::try_from(r)
        .map_err(|_| Error::Resource("repetition count exceeds supported range".into()))?;

    // floor(2^{rkm+e}/f) is a binary (rk)'th power with m-bit blocks; r*k
    // repetitions of an m-bit block regroup as k repetitions of an rm-bit
    // block, which is the k'th power we need.
    let fine = periodic_fraction_power(odd, r_u32.checked_mul(k).ok_or_else(|| {
        Error::Resource("repetition count exceeds supported range".into())
    })?)?;
    let block = fine.block() * block_multiplier(2, r_u32, m);
    let power = BlockPower::new(2, k, r * m, block)?;

    let copies = BigUint::one() << i;
    let total = big_pow(2, n) / (BigUint::from(odd) << two_adic);
    let covered = power.value() << i;
    debug_assert!(covered <= total);
    let t = total - covered;
    debug_assert!(t < copies);
    Ok((vec![(power, copies)], t))
}

/// Read-only DP table of exact minimal representation sizes for one k.
pub struct MinRepTable {
    k: u32,
    limit: u64,
    counts: Vec<u8>,
    powers: Vec<u64>,
}

const DP_UNREACHABLE: u8 = u8::MAX;

impl MinRepTable {
    pub fn build(k: u32, limit: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("MinRepTable requires k >= 1"));
        }
        if limit >= 1 << 32 {
            return Err(Error::Resource(format!(
                "DP table of {limit} bytes exceeds the budget"
            )));
        }
        let powers = crate::repr::powers_u64(2, k, limit);
        let mut counts = vec![DP_UNREACHABLE; limit as usize + 1];
        counts[0] = 0;
        for &p in &powers {
            let p = p as usize;
            for v in p..counts.len() {
                let through = counts[v - p];
                if through < DP_UNREACHABLE - 1 && through + 1 < counts[v] {
                    counts[v] = through + 1;
                }
            }
        }
        Ok(MinRepTable { k, limit, counts, powers })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Minimal number of powers summing to n, if representable at all.
    pub fn min_count(&self, n: u64) -> Option<u32> {
        let c = self.counts[n as usize];
        (c != DP_UNREACHABLE).then_some(c as u32)
    }

    /// One minimal witness, largest parts first.
    pub fn witness(&self, n: u64) -> Option<Vec<BlockPower>> {
        let mut need = self.counts[n as usize];
        if need == DP_UNREACHABLE {
            return None;
        }
        let mut v = n as usize;
        let mut out = Vec::with_capacity(need as usize);
        while need > 0 {
            let &p = self
                .powers
                .iter()
                .rev()
                .find(|&&p| p as usize <= v && self.counts[v - p as usize] == need - 1)
                .expect("DP table is internally consistent");
            out.push(recognize(&BigUint::from(p), self.k, 2).expect("powers are members"));
            v -= p as usize;
            need -= 1;
        }
        Some(out)
    }
}

/// Minimal representation if it uses at most `cap` powers.
pub fn min_representation(
    n: &BigUint,
    k: u32,
    cap: u32,
) -> Result<Option<(u32, Vec<BlockPower>)>> {
    min_representation_with_limit(n, k, cap, DEFAULT_DP_LIMIT)
}

pub fn min_representation_with_limit(
    n: &BigUint,
    k: u32,
    cap: u32,
    limit: u64,
) -> Result<Option<(u32, Vec<BlockPower>)>> {
    if cap == 0 {
        return Err(Error::domain("cap must be at least 1"));
    }
    let n_u64 = n
        .to_u64()
        .filter(|&v| v <= limit)
        .ok_or_else(|| Error::LimitExceeded { n: n.clone(), limit })?;
    let table = MinRepTable::build(k, n_u64)?;
    match table.min_count(n_u64) {
        Some(count) if count <= cap => {
            let witness = table.witness(n_u64).expect("count implies witness");
            Ok(Some((count, witness)))
        }
        _ => Ok(None),
    }
}

/// Precomputed per-k state for decomposition: the change-of-basis system,
/// the semigroup table, and the factored determinant driving the
/// fraction-to-power machinery.
pub struct Decomposer {
    k: u32,
    e_k: BigUint,
    vander: VanderSystem,
    table: Option<SemigroupTable>,
    det: BigUint,
    det_two_adic: u64,
    det_odd: Option<u64>,
    det_order: Option<u64>,
    /// Numerator of the window constant: 2^{nk} * scale < x * d picks n.
    scale_numerator: BigUint,
    dp_limit: u64,
}

impl Decomposer {
    pub fn new(k: u32) -> Result<Self> {
        Self::with_dp_limit(k, DEFAULT_DP_LIMIT)
    }

    pub fn with_dp_limit(k: u32, dp_limit: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("decomposition requires k >= 1"));
        }
        let vander = VanderSystem::build(k);
        let det = vander.det_unsigned();
        let table = if k >= 2 { Some(SemigroupTable::build(k)?) } else { None };

        let det_two_adic = det.trailing_zeros().unwrap_or(0);
        let det_odd = (&det >> det_two_adic).to_u64();
        let det_order = det_odd
            .filter(|&f| f > 1)
            .and_then(|f| multiplicative_order(2, f));

        // scale = (2^{k-2} + k * l_k + 1) * 2^{k^2 - k + 1}, held exactly as
        // numerator over d: ((2^{k-2} + 1) d + k * max|adj|) * 2^{k^2-k+1}
        let scale_numerator = if k >= 2 {
            let kk = k as u64;
            let base = (big_pow(2, kk - 2) + 1u32) * &det
                + BigUint::from(k) * vander.max_abs_adjugate();
            base << (kk * kk - kk + 1)
        } else {
            BigUint::one()
        };

        Ok(Decomposer {
            k,
            e_k: e_k(2, k)?,
            vander,
            table,
            det,
            det_two_adic,
            det_odd,
            det_order,
            scale_numerator,
            dp_limit,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gcd(&self) -> &BigUint {
        &self.e_k
    }

    pub fn frobenius(&self) -> Option<&BigUint> {
        self.table.as_ref().map(|t| t.frobenius())
    }

    pub fn semigroup(&self) -> Option<&SemigroupTable> {
        self.table.as_ref()
    }

    /// Decomposes a multiple of E_k into a certified multiset of binary
    /// k'th powers. Targets big enough for the change-of-basis window run
    /// the full pipeline; small targets get an exact-minimum DP witness;
    /// mid-range targets fall back to the semigroup table.
    pub fn decompose(&self, target: &BigUint) -> Result<Decomposition> {
        if !(target % &self.e_k).is_zero() {
            return Err(Error::NotMultipleOfGcd {
                n: target.clone(),
                e_k: self.e_k.clone(),
            });
        }

        if self.k == 1 {
            if target.is_zero() {
                return Err(Error::BelowFrobeniusRange { n: target.clone() });
            }
            let power = recognize(target, 1, 2).expect("every positive integer");
            return Ok(Decomposition {
                target: target.clone(),
                base: 2,
                k: 1,
                terms: vec![DecompTerm {
                    power,
                    multiplicity: BigUint::one(),
                    stage: Stage::Tail,
                }],
                method: Method::SingleBlock,
                audit: None,
            });
        }

        let table = self.table.as_ref().expect("k >= 2 builds a table");
        let scaled = target / &self.e_k;
        if !table.representable_scaled(&scaled) {
            return Err(Error::BelowFrobeniusRange { n: target.clone() });
        }

        let offset = (table.frobenius() + 1u32) * &self.e_k;
        let mut bound_violation = None;
        if target > &offset {
            let bulk = target - &offset;
            if let Some(window) = self.pick_window(&bulk) {
                let mut candidates = vec![window];
                if window > 1 {
                    candidates.push(window - 1);
                }
                candidates.push(window + 1);
                for n in candidates {
                    match self.pipeline(target, &bulk, &offset, n) {
                        Ok(d) => return Ok(d),
                        Err(e @ Error::InternalBoundViolation(_)) => {
                            bound_violation = Some(e);
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }

        if let Some(small) = target.to_u64().filter(|&v| v <= self.dp_limit) {
            let dp = MinRepTable::build(self.k, small)?;
            if let Some(witness) = dp.witness(small) {
                let mut bag: BTreeMap<BlockPower, BigUint> = BTreeMap::new();
                for p in witness {
                    *bag.entry(p).or_default() += 1u32;
                }
                let terms = bag
                    .into_iter()
                    .map(|(power, multiplicity)| DecompTerm {
                        power,
                        multiplicity,
                        stage: Stage::Tail,
                    })
                    .collect();
                return Ok(Decomposition {
                    target: target.clone(),
                    base: 2,
                    k: self.k,
                    terms,
                    method: Method::DpMinimal,
                    audit: None,
                });
            }
        }

        // a failed pipeline window is a bug, not a reason to fall back
        if let Some(e) = bound_violation {
            return Err(e);
        }

        // representable per the table, so the walk-back cannot fail
        let terms = table
            .represent(target)?
            .into_iter()
            .map(|(power, multiplicity)| DecompTerm { power, multiplicity, stage: Stage::Tail })
            .collect();
        Ok(Decomposition {
            target: target.clone(),
            base: 2,
            k: self.k,
            terms,
            method: Method::TailOnly,
            audit: None,
        })
    }

    /// Largest n >= 1 with 2^{nk} * scale < x * d, if any.
    fn pick_window(&self, bulk: &BigUint) -> Option<u64> {
        let target = bulk * &self.det;
        let k = self.k as u64;
        if (&self.scale_numerator << k) >= target {
            return None;
        }
        // jump near the answer by bit length, then settle exactly
        let mut n = (target.bits().saturating_sub(self.scale_numerator.bits()) / k).max(1);
        while (&self.scale_numerator << ((n + 1) * k)) < target {
            n += 1;
        }
        while n > 1 && (&self.scale_numerator << (n * k)) >= target {
            n -= 1;
        }
        ((&self.scale_numerator << (n * k)) < target).then_some(n)
    }

    fn pipeline(
        &self,
        target: &BigUint,
        bulk: &BigUint,
        offset: &BigUint,
        window: u64,
    ) -> Result<Decomposition> {
        let k = self.k as usize;
        let n = window;
        let table = self.table.as_ref().expect("pipeline requires k >= 2");

        let multipliers: Vec<BigUint> =
            (0..k as u64).map(|i| block_multiplier(2, self.k, n + i)).collect();
        let quotient_sum: BigUint = multipliers.iter().sum();
        let (whole, mut rem) = bulk.div_rem(&quotient_sum);

        // greedy improvement, largest multiplier first
        let mut greedy = vec![0u64; k];
        for i in (0..k).rev() {
            let (q, r) = rem.div_rem(&multipliers[i]);
            greedy[i] = q.to_u64().ok_or_else(|| {
                Error::InternalBoundViolation("greedy coefficient overflowed a word".into())
            })?;
            rem = r;
        }
        let residue = rem; // Y < c(n)
        debug_assert!(residue < multipliers[0]);

        // base-2^n digits of the residue; exactly k of them since Y < c(n)
        let mask = big_pow(2, n) - 1u32;
        let digits: Vec<BigUint> =
            (0..k as u64).map(|i| (&residue >> (i * n)) & &mask).collect();
        debug_assert!((&residue >> (k as u64 * n)).is_zero());

        let coeffs = self.vander.solve_coeffs(&digits)?;
        let det_int = BigInt::from(self.det.clone());
        let integer_coeffs: Vec<BigUint> =
            (0..k).map(|i| &whole + greedy[i]).collect();

        // exact lower bound 2^{n+i-1} <= e_i + b_i, over the common
        // denominator
        let mut upper_ratio = 0.0f64;
        for i in 0..k {
            let exact = BigInt::from(integer_coeffs[i].clone()) * &det_int
                + &coeffs.numerators[i];
            let bound = &det_int << (n + i as u64 - 1);
            if exact < bound {
                return Err(Error::InternalBoundViolation(format!(
                    "coefficient {i} fell below 2^{} at window {n}",
                    n + i as u64 - 1
                )));
            }
            let ratio = ratio_to_f64(
                exact.magnitude(),
                (&det_int << n).magnitude(),
            );
            upper_ratio = upper_ratio.max(ratio);
        }

        // X1: floors, split into same-length blocks
        let mut split_bag: BTreeMap<BlockPower, BigUint> = BTreeMap::new();
        let mut x1 = BigUint::zero();
        for i in 0..k {
            let floor = (BigInt::from(integer_coeffs[i].clone()) + coeffs.floor(i))
                .to_biguint()
                .expect("lower bound keeps floors positive");
            x1 += &floor * &multipliers[i];
            for (power, count) in split_multiple(&floor, n + i as u64, self.k)? {
                *split_bag.entry(power).or_default() += count;
            }
        }
        let x2 = bulk - &x1;

        // X2 = sum_i (v_i / d) c(n+i) = sum_{i,j} v_i 2^{(n+i)j} / d; peel
        // each term into powers where the exponent reaches a full period,
        // and let everything else (floors we cannot shape, per-term
        // remainders, and the fractional mass) flow into the tail.
        let mut fraction_bag: BTreeMap<BlockPower, BigUint> = BTreeMap::new();
        let mut x4 = BigUint::zero();
        let mut tail_integer = BigUint::zero();
        let mut frac_numerator = BigUint::zero();
        for i in 0..k {
            let v = coeffs
                .frac_numerator(i)
                .to_biguint()
                .expect("mod_floor is non-negative");
            if v.is_zero() {
                continue;
            }
            frac_numerator += &v; // the j = 0 term is pure fraction
            for j in 1..k as u64 {
                let exponent = (n + i as u64) * j;
                let (floor, frac) = big_pow(2, exponent).div_rem(&self.det);
                frac_numerator += &v * &frac;
                if floor.is_zero() {
                    continue;
                }
                match self.det_floor_parts(exponent) {
                    Ok((parts, t)) => {
                        x4 += &v * (&floor - &t);
                        tail_integer += &v * &t;
                        for (power, count) in parts {
                            *fraction_bag.entry(power).or_default() += &v * count;
                        }
                    }
                    Err(_) => {
                        // exponent below the period: leave the whole floor
                        // to the tail
                        tail_integer += &v * &floor;
                    }
                }
            }
        }
        let (frac_whole, frac_rem) = frac_numerator.div_rem(&self.det);
        if !frac_rem.is_zero() {
            return Err(Error::InternalBoundViolation(
                "fractional mass did not close to an integer".into(),
            ));
        }
        let x3 = &tail_integer + &frac_whole;
        if &x3 + &x4 != x2 {
            return Err(Error::InternalBoundViolation(
                "stage accounting X2 = X3 + X4 failed".into(),
            ));
        }

        let tail_total = &x3 + offset;
        let tail_terms = table.represent(&tail_total)?;

        let mut terms: Vec<DecompTerm> = Vec::new();
        for (power, multiplicity) in split_bag {
            terms.push(DecompTerm { power, multiplicity, stage: Stage::SplitX1 });
        }
        for (power, multiplicity) in fraction_bag {
            terms.push(DecompTerm { power, multiplicity, stage: Stage::FractionX4 });
        }
        for (power, multiplicity) in tail_terms {
            terms.push(DecompTerm { power, multiplicity, stage: Stage::Tail });
        }

        let decomposition = Decomposition {
            target: target.clone(),
            base: 2,
            k: self.k,
            terms,
            method: Method::Pipeline,
            audit: Some(PipelineAudit {
                offset_z: offset.clone(),
                bulk_x: bulk.clone(),
                window: n,
                quotient: whole,
                greedy,
                integer_coeffs,
                coeff_numerators: coeffs.numerators.clone(),
                coeff_denominator: self.det.clone(),
                x1,
                x2,
                x3,
                x4,
                upper_ratio,
            }),
        };
        if decomposition.sum() != *target {
            return Err(Error::InternalBoundViolation(
                "pipeline certificate does not resum to the target".into(),
            ));
        }
        Ok(decomposition)
    }

    /// Lemma-style split of floor(2^exponent / d) using the cached
    /// factorization of the determinant.
    fn det_floor_parts(&self, exponent: u64) -> Result<FloorParts> {
        let odd = self.det_odd.ok_or_else(|| {
            Error::Resource("odd part of d exceeds the factoring budget".into())
        })?;
        if odd > 1 && self.det_order.is_none() {
            return Err(Error::Resource("order of 2 mod odd(d) unavailable".into()));
        }
        floor_pow2_parts(exponent, self.det_two_adic, odd, self.det_order, self.k)
    }
}

/// One-shot convenience over a fresh `Decomposer`.
pub fn decompose(target: &BigUint, k: u32) -> Result<Decomposition> {
    Decomposer::new(k)?.decompose(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn resum(terms: &[(BlockPower, BigUint)]) -> BigUint {
        terms.iter().map(|(p, c)| p.value() * c).sum()
    }

    #[test]
    fn split_keeps_single_block_values() {
        let terms = split_multiple(&big(5), 3, 2).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.block(), &big(5));
        assert_eq!(terms[0].0.value(), big(45));
        assert_eq!(terms[0].1, big(1));
    }

    #[test]
    fn split_nine_into_three_blocks_of_three() {
        // 9 * c(2) = 45 = 15 + 15 + 15
        let terms = split_multiple(&big(9), 2, 2).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.block(), &big(3));
        assert_eq!(terms[0].1, big(3));
        assert_eq!(resum(&terms), big(9) * block_multiplier(2, 2, 2));
    }

    #[test]
    fn split_twice_full_block() {
        // a = 2 * (2^4 - 1): the balanced pair is {15, 15}
        let terms = split_multiple(&big(30), 4, 2).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.block(), &big(15));
        assert_eq!(terms[0].1, big(2));
    }

    #[test]
    fn split_count_bound_holds() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10_000 {
            let n = rng() % 12 + 1;
            let k = (rng() % 5 + 1) as u32;
            let a = big(rng() % (1 << (n + 7)) + (1 << (n - 1)));
            let terms = split_multiple(&a, n, k).unwrap();
            assert_eq!(resum(&terms), &a * block_multiplier(2, k, n));
            let count: BigUint = terms.iter().map(|(_, c)| c.clone()).sum();
            let bound = a.div_ceil(&(big_pow(2, n) - 1u32));
            assert!(count <= bound, "a={a} n={n} k={k}");
        }
    }

    #[test]
    fn split_rejects_small_blocks() {
        assert!(split_multiple(&big(3), 3, 2).is_err());
    }

    #[test]
    fn periodic_fraction_examples() {
        let p = periodic_fraction_power(3, 2).unwrap();
        assert_eq!((p.block_len(), p.block().clone()), (2, big(2)));
        assert_eq!(p.value(), big(10)); // floor(32/3)

        let p = periodic_fraction_power(7, 3).unwrap();
        assert_eq!(p.value(), big(292)); // floor(2048/7)

        let p = periodic_fraction_power(5, 2).unwrap();
        assert_eq!((p.block_len(), p.block().clone()), (4, big(12)));
        assert_eq!(p.value(), big(204)); // floor(1024/5)
    }

    #[test]
    fn periodic_fraction_rejects_bad_inputs() {
        assert!(periodic_fraction_power(4, 2).is_err());
        assert!(periodic_fraction_power(1, 2).is_err());
        assert!(periodic_fraction_power(9, 0).is_err());
    }

    #[test]
    fn periodic_fraction_matches_direct_floor() {
        for f in (3u64..=201).step_by(2) {
            let m = multiplicative_order(2, f).unwrap();
            let e = 63 - f.leading_zeros() as u64;
            for j in 1..=6u32 {
                let p = periodic_fraction_power(f, j).unwrap();
                let direct = big_pow(2, j as u64 * m + e) / f;
                assert_eq!(p.value(), direct, "f={f} j={j}");
            }
        }
    }

    #[test]
    fn floor_pow2_power_of_two_denominator() {
        // floor(2^9 / 4): two copies of 63 plus 2
        let (terms, t) = floor_pow2_over(9, &big(4), 2).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.value(), big(63));
        assert_eq!(terms[0].1, big(2));
        assert_eq!(t, big(2));

        // floor(2^8 / 1) = 255 + 1
        let (terms, t) = floor_pow2_over(8, &big(1), 2).unwrap();
        assert_eq!(terms[0].0.value(), big(255));
        assert_eq!(terms[0].1, big(1));
        assert_eq!(t, big(1));
    }

    #[test]
    fn floor_pow2_odd_denominator() {
        let (terms, t) = floor_pow2_over(13, &big(3), 2).unwrap();
        assert_eq!(resum(&terms) + t, big(8192 / 3));
    }

    #[test]
    fn floor_pow2_rejects_short_exponents() {
        assert!(floor_pow2_over(3, &big(4), 2).is_err());
        assert!(floor_pow2_over(5, &big(3), 3).is_err());
    }

    #[test]
    fn floor_pow2_identity_and_count_bounds() {
        for g in 1u64..=64 {
            let g_big = big(g);
            let two_adic = g.trailing_zeros() as u64;
            let odd = g >> two_adic;
            let kf = |k: u64| k * odd;
            for k in [2u32, 3] {
                for n in 1..=64u64 {
                    match floor_pow2_over(n, &g_big, k) {
                        Ok((terms, t)) => {
                            let direct = big_pow(2, n) / &g_big;
                            assert_eq!(resum(&terms) + &t, direct, "g={g} n={n} k={k}");
                            let count: BigUint =
                                terms.iter().map(|(_, c)| c.clone()).sum();
                            let bound = big_pow(2, kf(k as u64) - 1);
                            assert!(count <= bound, "g={g} n={n} k={k}");
                            assert!(t <= bound, "g={g} n={n} k={k}");
                        }
                        Err(Error::Domain(_)) => {
                            // exponent below the period for this g
                        }
                        Err(e) => panic!("unexpected error for g={g} n={n}: {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn decompose_single_member_target() {
        let d = decompose(&big(45), 2).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.term_count(), big(1));
        assert_eq!(d.terms[0].power.value(), big(45));
    }

    #[test]
    fn decompose_18_minimally() {
        let d = decompose(&big(18), 2).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.term_count(), big(2));
        let values: Vec<BigUint> =
            d.terms.iter().map(|t| t.power.value()).collect();
        assert!(values.contains(&big(15)) && values.contains(&big(3)));
    }

    #[test]
    fn decompose_rejects_frobenius_number() {
        assert!(matches!(
            decompose(&big(17), 2),
            Err(Error::BelowFrobeniusRange { .. })
        ));
    }

    #[test]
    fn decompose_rejects_non_multiples() {
        assert!(matches!(
            decompose(&big(100), 6), // 100 = 1 mod 3
            Err(Error::NotMultipleOfGcd { .. })
        ));
    }

    #[test]
    fn decompose_k1_is_single_block() {
        let d = decompose(&big(123_456_789), 1).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.term_count(), big(1));
        assert_eq!(d.method, Method::SingleBlock);
    }

    #[test]
    fn decompose_runs_pipeline_for_large_targets() {
        let dec = Decomposer::new(2).unwrap();
        let d = dec.decompose(&big(1_000_000_007)).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.method, Method::Pipeline);
        let audit = d.audit.as_ref().unwrap();
        assert_eq!(&audit.x3 + &audit.x4, audit.x2);
        assert_eq!(
            &audit.x1 + &audit.x2 + &audit.offset_z,
            d.target
        );
    }

    #[test]
    fn decompose_pipeline_k3_mixes_stages() {
        let dec = Decomposer::new(3).unwrap();
        let d = dec.decompose(&big(999_999_999_999_999)).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.method, Method::Pipeline);
        let stages: Vec<Stage> = d.terms.iter().map(|t| t.stage).collect();
        assert!(stages.contains(&Stage::SplitX1));
        assert!(stages.contains(&Stage::FractionX4));
        assert!(stages.contains(&Stage::Tail));
    }

    #[test]
    fn decompose_tail_only_midrange_k5() {
        // beyond the DP limit but below the pipeline window
        let dec = Decomposer::new(5).unwrap();
        let d = dec.decompose(&big(60_000_000)).unwrap();
        verify(&d).unwrap();
        assert_eq!(d.method, Method::TailOnly);
    }

    #[test]
    fn min_representation_examples() {
        assert!(min_representation(&big(17), 2, 200).unwrap().is_none());

        let (count, witness) = min_representation(&big(6), 2, 4).unwrap().unwrap();
        assert_eq!(count, 2);
        assert_eq!(witness.iter().map(|p| p.value()).sum::<BigUint>(), big(6));

        let (count, witness) = min_representation(&BigUint::zero(), 1, 1).unwrap().unwrap();
        assert_eq!(count, 0);
        assert!(witness.is_empty());
    }

    #[test]
    fn min_representation_limit() {
        assert!(matches!(
            min_representation_with_limit(&big(1 << 30), 2, 4, 1 << 20),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn verify_rejects_tampered_certificates() {
        let mut d = decompose(&big(18), 2).unwrap();
        d.target = big(19);
        assert!(verify(&d).is_err());
    }
}

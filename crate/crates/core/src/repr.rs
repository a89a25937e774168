//! Exact arithmetic for digit-block powers.
//!
//! A natural number is a base-b k'th power when its canonical base-b digit
//! string is k consecutive copies of one block. Every positive member
//! factors uniquely as `a * c(b, k, n)` where the block `a` has exactly `n`
//! base-b digits, so recognition and enumeration reduce to exact integer
//! arithmetic on the block multiplier — no digit-string parsing anywhere.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// The block multiplier `1 + b^n + ... + b^{(k-1)n} = (b^{kn}-1)/(b^n-1)`.
///
/// Multiplying an n-digit block value by this constant repeats the block k
/// times in base b.
pub fn c_kb(base: u64, k: u32, block_len: u64) -> Result<BigUint> {
    if base < 2 {
        return Err(Error::domain(format!("base must be at least 2, got {base}")));
    }
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if block_len == 0 {
        return Err(Error::domain("block length must be at least 1"));
    }
    Ok(block_multiplier(base, k, block_len))
}

/// Unchecked geometric sum used internally once arguments are known valid.
pub(crate) fn block_multiplier(base: u64, k: u32, block_len: u64) -> BigUint {
    let step = big_pow(base, block_len);
    let mut acc = BigUint::zero();
    let mut term = BigUint::one();
    for _ in 0..k {
        acc += &term;
        term *= &step;
    }
    acc
}

/// base^exp as a big natural.
pub(crate) fn big_pow(base: u64, exp: u64) -> BigUint {
    if base == 2 {
        return BigUint::one() << exp;
    }
    let mut acc = BigUint::one();
    let mut sq = BigUint::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Number of base-b digits of n in its canonical expansion; 0 for n = 0.
pub(crate) fn digit_count(n: &BigUint, base: u64) -> u64 {
    if n.is_zero() {
        return 0;
    }
    if base == 2 {
        return n.bits();
    }
    // Find len with base^{len-1} <= n < base^len by doubling then bisecting.
    let mut hi = 1u64;
    while big_pow(base, hi) <= *n {
        hi *= 2;
    }
    let mut lo = hi / 2; // invariant: base^lo <= n < base^hi
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if big_pow(base, mid) <= *n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// One base-b k'th power in factored form: value = block * c(b, k, block_len),
/// where block is the leading n-digit block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockPower {
    base: u64,
    k: u32,
    block_len: u64,
    block: BigUint,
}

impl BlockPower {
    /// Validates the canonical-block constraint b^{n-1} <= block < b^n.
    pub fn new(base: u64, k: u32, block_len: u64, block: BigUint) -> Result<Self> {
        if base < 2 || k == 0 || block_len == 0 {
            return Err(Error::domain("BlockPower requires base >= 2, k >= 1, n >= 1"));
        }
        let lo = big_pow(base, block_len - 1);
        let hi = big_pow(base, block_len);
        if block < lo || block >= hi {
            return Err(Error::domain(format!(
                "block {block} does not have exactly {block_len} base-{base} digits"
            )));
        }
        Ok(BlockPower { base, k, block_len, block })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Block length n in base-b digits.
    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    /// Leading block value a.
    pub fn block(&self) -> &BigUint {
        &self.block
    }

    /// The represented number, `a * c(b, k, n)`.
    pub fn value(&self) -> BigUint {
        &self.block * block_multiplier(self.base, self.k, self.block_len)
    }
}

/// Inverts `value()`: the unique factored form of a positive base-b k'th
/// power, or None if n is not one. Zero has no canonical block form and
/// returns None here; set membership including 0 is `is_member`.
pub fn recognize(n: &BigUint, k: u32, base: u64) -> Option<BlockPower> {
    if base < 2 || k == 0 || n.is_zero() {
        return None;
    }
    let digits = digit_count(n, base);
    if digits % k as u64 != 0 {
        return None;
    }
    let block_len = digits / k as u64;
    let (block, rem) = n.div_rem(&block_multiplier(base, k, block_len));
    if !rem.is_zero() {
        return None;
    }
    // The digit-count bound already forces block < base^block_len; the lower
    // bound still needs a check.
    if block < big_pow(base, block_len - 1) {
        return None;
    }
    Some(BlockPower { base, k, block_len, block })
}

/// Set membership, counting 0 as the degenerate member the published
/// sequences start with.
pub fn is_member(n: &BigUint, k: u32, base: u64) -> bool {
    n.is_zero() || recognize(n, k, base).is_some()
}

/// Lazily ordered stream of all base-b k'th powers up to a limit.
///
/// Merges the per-block-length arithmetic progressions `{a * c(b,k,n)}` with
/// a heap; values are strictly increasing and start at 0. Single-consumer.
pub struct PowerSetView {
    base: u64,
    k: u32,
    limit: BigUint,
    yielded_zero: bool,
    // (next value, block_len, block); a stream for block_len + 1 is opened
    // the first time block_len pops.
    heap: BinaryHeap<Reverse<(BigUint, u64, BigUint)>>,
    opened_up_to: u64,
}

impl PowerSetView {
    fn new(base: u64, k: u32, limit: BigUint) -> Self {
        let mut view = PowerSetView {
            base,
            k,
            limit,
            yielded_zero: false,
            heap: BinaryHeap::new(),
            opened_up_to: 0,
        };
        if base >= 2 && k >= 1 {
            view.open_stream(1);
        }
        view
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn limit(&self) -> &BigUint {
        &self.limit
    }

    fn open_stream(&mut self, block_len: u64) {
        if block_len <= self.opened_up_to {
            return;
        }
        self.opened_up_to = block_len;
        let first_block = big_pow(self.base, block_len - 1);
        let first = &first_block * block_multiplier(self.base, self.k, block_len);
        if first <= self.limit {
            self.heap.push(Reverse((first, block_len, first_block)));
        }
    }
}

impl Iterator for PowerSetView {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        if !self.yielded_zero {
            self.yielded_zero = true;
            return Some(BigUint::zero());
        }
        let Reverse((value, block_len, block)) = self.heap.pop()?;
        if block_len == self.opened_up_to {
            self.open_stream(block_len + 1);
        }
        let next_block = &block + 1u32;
        if next_block < big_pow(self.base, block_len) {
            let next_value = &value + block_multiplier(self.base, self.k, block_len);
            if next_value <= self.limit {
                self.heap.push(Reverse((next_value, block_len, next_block)));
            }
        }
        Some(value)
    }
}

/// All of `{s in S_k^b : s <= limit}` in increasing order, starting at 0.
pub fn enumerate(base: u64, k: u32, limit: BigUint) -> PowerSetView {
    PowerSetView::new(base, k, limit)
}

/// Positive members up to a u64 limit, as machine words (used by the
/// search and DP modules, which only ever run at word scale).
pub fn powers_u64(base: u64, k: u32, limit: u64) -> Vec<u64> {
    use num_traits::ToPrimitive;
    enumerate(base, k, BigUint::from(limit))
        .skip(1)
        .map(|v| v.to_u64().expect("bounded by a u64 limit"))
        .collect()
}

//! The gcd structure of the digit-block powers.
//!
//! The gcd of all base-b k'th powers collapses to the closed form
//! `E_k = gcd((b^k - 1)/(b - 1), k)`, and this module computes that value
//! together with the full five-way chain of intermediate gcds so the
//! collapse can be verified numerically at any sample depth.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::repr::{big_pow, block_multiplier, c_kb};

/// Per-block-length cap on sampled elements when folding the set gcd.
/// Folding a subset only ever leaves the gcd too large, so equality with
/// the closed form below still certifies the whole chain.
const SAMPLE_CAP: u64 = 64;

/// `gcd((b^k - 1)/(b - 1), k)`, the gcd of all base-b k'th powers.
///
/// The repunit is materialized exactly, then reduced mod k before the gcd
/// so the Euclid step never grinds through thousands of bits.
pub fn e_k(base: u64, k: u32) -> Result<BigUint> {
    if base < 2 || k == 0 {
        return Err(Error::domain("e_k requires base >= 2 and k >= 1"));
    }
    let k_big = BigUint::from(k);
    let reduced = c_kb(base, k, 1)? % &k_big;
    Ok(k_big.gcd(&reduced))
}

/// The five gcds of the chain, all provably equal.
#[derive(Debug, Clone, Serialize)]
pub struct GcdChain {
    pub base: u64,
    pub k: u32,
    pub sample_depth: u64,
    /// gcd over sampled set elements with block length <= sample_depth.
    pub set_gcd: String,
    /// gcd of the block multipliers c(1..=sample_depth).
    pub multiplier_gcd: String,
    /// gcd of c(1..=k).
    pub multiplier_gcd_to_k: String,
    /// gcd(c(1), c(k)).
    pub endpoint_gcd: String,
    /// The closed form gcd((b^k-1)/(b-1), k).
    pub closed_form: String,
}

/// Computes all five gcds and checks they agree; the error carries the
/// first differing pair and must never fire.
pub fn verify_gcd_chain(base: u64, k: u32, sample_depth: u64) -> Result<GcdChain> {
    if base < 2 || k == 0 {
        return Err(Error::domain("verify_gcd_chain requires base >= 2 and k >= 1"));
    }
    if sample_depth < k as u64 {
        return Err(Error::domain(format!(
            "sample depth {sample_depth} must be at least k = {k}"
        )));
    }

    // A: fold the actual set elements a * c(n), capped per block length.
    let mut set_gcd = BigUint::zero();
    for n in 1..=sample_depth {
        let c = block_multiplier(base, k, n);
        let lo = big_pow(base, n - 1);
        let hi = big_pow(base, n);
        let mut a = lo;
        let mut taken = 0u64;
        while a < hi && taken < SAMPLE_CAP {
            set_gcd = set_gcd.gcd(&(&a * &c));
            if set_gcd.is_one() {
                break;
            }
            a += 1u32;
            taken += 1;
        }
        if set_gcd.is_one() {
            break;
        }
    }

    let fold_multipliers = |up_to: u64| -> BigUint {
        let mut g = BigUint::zero();
        for n in 1..=up_to {
            g = g.gcd(&block_multiplier(base, k, n));
            if g.is_one() {
                break;
            }
        }
        g
    };
    let multiplier_gcd = fold_multipliers(sample_depth);
    let multiplier_gcd_to_k = fold_multipliers(k as u64);
    let endpoint_gcd =
        block_multiplier(base, k, 1).gcd(&block_multiplier(base, k, k as u64));
    let closed_form = e_k(base, k)?;

    let all = [
        ("set", &set_gcd),
        ("multipliers", &multiplier_gcd),
        ("multipliers_to_k", &multiplier_gcd_to_k),
        ("endpoints", &endpoint_gcd),
        ("closed_form", &closed_form),
    ];
    for window in all.windows(2) {
        if window[0].1 != window[1].1 {
            return Err(Error::InternalBoundViolation(format!(
                "gcd chain broke at base {base}, k {k}: {} = {} but {} = {}",
                window[0].0, window[0].1, window[1].0, window[1].1
            )));
        }
    }

    Ok(GcdChain {
        base,
        k,
        sample_depth,
        set_gcd: set_gcd.to_string(),
        multiplier_gcd: multiplier_gcd.to_string(),
        multiplier_gcd_to_k: multiplier_gcd_to_k.to_string(),
        endpoint_gcd: endpoint_gcd.to_string(),
        closed_form: closed_form.to_string(),
    })
}

/// p-adic valuation: the largest e with p^e dividing n. Requires p prime
/// and n >= 1.
pub fn nu_p(p: u64, n: &BigUint) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if n.is_zero() {
        return Err(Error::domain("nu_p is undefined at 0"));
    }
    let p_big = BigUint::from(p);
    let mut e = 0u64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            return Ok(e);
        }
        e += 1;
        m = q;
    }
}

//! Natural density of {k : gcd of the base-b k'th powers equals g}.
//!
//! The density is an alternating series over squarefree d coprime to b with
//! terms mu(d) / L_b(dg), where L_b(x) = lcm(x, ord_x(b)). Partial sums are
//! exact rationals; the empirical side counts gcd values over k <= K using
//! only modular arithmetic, so the two approximations are independent.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_u64, lcm_u64, mobius_sieve, multiplicative_order, pow_mod};
use crate::error::{Error, Result};

/// Memoized multiplicative orders of a fixed base.
#[derive(Debug, Default)]
pub struct OrderCache {
    base: u64,
    orders: HashMap<u64, u64>,
}

impl OrderCache {
    pub fn new(base: u64) -> Self {
        OrderCache { base, orders: HashMap::new() }
    }

    /// ord_x(base); requires gcd(x, base) = 1.
    pub fn order(&mut self, x: u64) -> Result<u64> {
        if let Some(&o) = self.orders.get(&x) {
            return Ok(o);
        }
        let o = multiplicative_order(self.base, x).ok_or_else(|| {
            Error::domain(format!("ord_{x}({}) needs gcd(x, b) = 1", self.base))
        })?;
        self.orders.insert(x, o);
        Ok(o)
    }
}

/// L_b(x) = lcm(x, ord_x(b)); requires x >= 1 coprime to b.
pub fn l_b(x: u64, base: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::domain("L_b requires x >= 1"));
    }
    let ord = multiplicative_order(base, x)
        .ok_or_else(|| Error::domain(format!("L_b requires gcd({x}, {base}) = 1")))?;
    Ok(lcm_u64(x, ord))
}

/// Whether any k has gcd of the base-b k'th powers equal to g: the
/// criterion is g = gcd(L_b(g), (b^{L_b(g)} - 1)/(b - 1)).
///
/// The repunit is reduced modulo L * (b - 1) along the way, so no large
/// integer is ever materialized. A g sharing a factor with b always fails:
/// the repunit is coprime to b, so no gcd value can contain that factor.
pub fn nonempty(g: u64, base: u64) -> bool {
    if g == 0 || base < 2 {
        return false;
    }
    if gcd_u64(g, base) != 1 {
        return false;
    }
    let l = l_b(g, base).expect("coprimality just checked");
    // (b^L - 1) mod L(b-1) = (b-1) * (repunit mod L)
    let modulus = l * (base - 1);
    let pow = pow_mod(base % modulus, l, modulus);
    let repunit_mod_l = (pow + modulus - 1) % modulus / (base - 1);
    gcd_u64(l, repunit_mod_l) == g
}

/// gcd((b^k - 1)/(b - 1), k) without materializing the repunit: reduce
/// modulo k(b-1), divide out b-1, then take a word-sized gcd.
pub fn empirical_gcd(k: u64, base: u64) -> u64 {
    if k == 1 {
        return 1;
    }
    let modulus = k * (base - 1);
    let pow = pow_mod(base % modulus, k, modulus);
    let repunit_mod_k = (pow + modulus - 1) % modulus / (base - 1);
    gcd_u64(k, repunit_mod_k)
}

/// Count of k <= limit with gcd of the base-b k'th powers equal to g.
pub fn empirical_count(g: u64, base: u64, limit: u64) -> u64 {
    (1..=limit)
        .into_par_iter()
        .filter(|&k| empirical_gcd(k, base) == g)
        .count() as u64
}

/// Partial series value plus the empirical comparison point.
#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub base: u64,
    pub g: u64,
    pub depth: u64,
    pub nonempty: bool,
    /// (truncation depth, exact partial sum as "num/den", decimal value)
    pub partial_sums: Vec<(u64, String, f64)>,
    /// Decimal value of the deepest partial sum.
    pub partial_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalDensity>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalDensity {
    pub sample_limit: u64,
    pub matching: u64,
    pub density: f64,
}

/// Exact partial sum over squarefree d <= depth coprime to b, recorded at
/// depth/4, depth/2, and depth for convergence inspection.
pub fn density_partial(g: u64, base: u64, depth: u64) -> Result<DensityReport> {
    if g == 0 || base < 2 || depth == 0 {
        return Err(Error::domain("density_partial requires g >= 1, b >= 2, depth >= 1"));
    }
    let empty_ok = nonempty(g, base);
    if gcd_u64(g, base) != 1 {
        // no k'th-power gcd can share a factor with b; the density is 0 and
        // the series is left empty rather than evaluated at undefined terms
        return Ok(DensityReport {
            base,
            g,
            depth,
            nonempty: empty_ok,
            partial_sums: vec![(depth, "0/1".into(), 0.0)],
            partial_value: 0.0,
            empirical: None,
        });
    }

    let mu = mobius_sieve(depth as usize);
    let checkpoints = [depth / 4, depth / 2, depth];
    let mut sum = BigRational::zero();
    let mut partial_sums = Vec::new();
    for d in 1..=depth {
        let m = mu[d as usize];
        if m != 0 && gcd_u64(d, base) == 1 {
            let l = l_b(d * g, base)?;
            sum += BigRational::new(BigInt::from(m), BigInt::from(l));
        }
        if checkpoints.contains(&d) {
            partial_sums.push((d, format!("{sum}"), rational_to_f64(&sum)));
        }
    }
    let partial_value = rational_to_f64(&sum);

    Ok(DensityReport {
        base,
        g,
        depth,
        nonempty: empty_ok,
        partial_sums,
        partial_value,
        empirical: None,
    })
}

/// Attaches an empirical count over k <= sample_limit to a report.
pub fn with_empirical(mut report: DensityReport, sample_limit: u64) -> DensityReport {
    let matching = empirical_count(report.g, report.base, sample_limit);
    report.empirical = Some(EmpiricalDensity {
        sample_limit,
        matching,
        density: matching as f64 / sample_limit as f64,
    });
    report
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * crate::vander::ratio_to_f64(r.numer().magnitude(), r.denom().magnitude())
}

//! Machine-word number theory shared by the other modules: deterministic
//! Miller-Rabin, trial-division factoring, Carmichael lambda, multiplicative
//! orders, and a Mobius sieve. Everything here is exact u64/u128 arithmetic.

/// (a * b) mod m without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a^e mod m by binary exponentiation. m = 1 yields 0.
pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
///
/// The base set {2,3,5,7,11,13,17,19,23,29,31,37} is known to be exact
/// below 3.3 * 10^24, which covers u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization (p, multiplicity) by trial division, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if *n % p == 0 {
            let mut e = 0;
            while *n % p == 0 {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    // wheel over 6k +- 1
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out.sort_unstable();
    out
}

/// Carmichael's lambda(n): the exponent of the multiplicative group mod n.
pub fn carmichael_lambda(n: u64) -> u64 {
    if n <= 1 {
        return 1;
    }
    let mut l = 1u64;
    for (p, e) in factorize(n) {
        let le = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1u64 << (e - 2),
            }
        } else {
            (p - 1) * p.pow(e - 1)
        };
        l = lcm_u64(l, le);
    }
    l
}

/// Multiplicative order of b modulo m. Requires gcd(b, m) = 1.
///
/// Starts from lambda(m) and strips prime factors while the power still
/// fixes 1, which finds the minimal exponent without enumerating divisors.
pub fn multiplicative_order(b: u64, m: u64) -> Option<u64> {
    if m == 0 || gcd_u64(b % m.max(1), m) != 1 {
        return None;
    }
    if m == 1 {
        return Some(1);
    }
    let mut ord = carmichael_lambda(m);
    debug_assert_eq!(pow_mod(b, ord, m), 1 % m);
    for (p, _) in factorize(ord) {
        while ord % p == 0 && pow_mod(b, ord / p, m) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// Mobius function on 0..=limit via a linear sieve; mu[0] is set to 0.
pub fn mobius_sieve(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    if limit >= 1 {
        mu[0] = 0;
    }
    let mut primes: Vec<usize> = Vec::new();
    let mut is_comp = vec![false; limit + 1];
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_classifier_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime_u64(2_047)); // 23 * 89
    }

    #[test]
    fn factorize_roundtrip() {
        for n in 1u64..2000 {
            let f = factorize(n);
            let back: u64 = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
            for (p, _) in f {
                assert!(is_prime_u64(p));
            }
        }
    }

    #[test]
    fn orders_match_brute_force() {
        for m in 3u64..200 {
            for b in 2u64..20 {
                if gcd_u64(b % m, m) != 1 {
                    assert_eq!(multiplicative_order(b, m), None);
                    continue;
                }
                let ord = multiplicative_order(b, m).unwrap();
                // brute-force minimality
                let mut x = 1u64;
                let mut first = 0;
                for e in 1..=ord {
                    x = mul_mod(x, b, m);
                    if x == 1 {
                        first = e;
                        break;
                    }
                }
                assert_eq!(ord, first, "b={b} m={m}");
            }
        }
    }

    #[test]
    fn order_of_two_known_values() {
        assert_eq!(multiplicative_order(2, 3), Some(2));
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(2, 63), Some(6));
        assert_eq!(multiplicative_order(2, 19845), Some(756));
    }

    #[test]
    fn mobius_small_values() {
        let mu = mobius_sieve(30);
        assert_eq!(mu[1], 1);
        assert_eq!(mu[2], -1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[6], 1);
        assert_eq!(mu[12], 0);
        assert_eq!(mu[30], -1);
    }
}

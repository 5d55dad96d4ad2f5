//! Integer and rational helpers: Bernoulli numbers, factorials, binomials.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// (2n-1)!! with the convention (-1)!! = 1.
pub fn double_factorial_odd(n: u32) -> BigInt {
    (0..n).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k + 1))
}

/// Binomial coefficient, zero outside 0 <= k <= n.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernoulli number B_k with B_1 = -1/2.
///
/// Uses sum_{j<=k} C(k+1, j) B_j = 0 and memoizes the table.
pub fn bernoulli(k: u32) -> Rat {
    static TABLE: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(vec![Rat::one()]));
    let mut t = table.lock().expect("bernoulli table poisoned");
    while t.len() <= k as usize {
        let m = t.len() as i64;
        if m >= 3 && m % 2 == 1 {
            t.push(Rat::zero());
            continue;
        }
        let mut s = Rat::zero();
        for (j, b) in t.iter().enumerate() {
            s += Rat::from_integer(binomial(m + 1, j as i64)) * b;
        }
        t.push(-s / Rat::from_integer(BigInt::from(m + 1)));
    }
    t[k as usize].clone()
}

/// B_k / k, written b_k in the Bernoulli identities.
pub fn bernoulli_over_k(k: u32) -> Rat {
    bernoulli(k) / int(k as i64)
}

/// σ_k(n), the sum of `d^k` over divisors `d` of `n`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: B_n = sum_{k=0}^n 1/(k+1) sum_{j=0}^k (-1)^j C(k,j) j^n,
    // which yields the B_1 = +1/2 convention.
    fn bernoulli_plus(n: u32) -> Rat {
        let mut total = Rat::zero();
        for k in 0..=n {
            let mut inner = Rat::zero();
            for j in 0..=k {
                let term = Rat::from_integer(binomial(k as i64, j as i64) * BigInt::from(j).pow(n));
                if j % 2 == 0 {
                    inner += term;
                } else {
                    inner -= term;
                }
            }
            total += inner / int(k as i64 + 1);
        }
        total
    }

    #[test]
    fn bernoulli_known_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_matches_explicit_sum() {
        for n in 2..=24 {
            assert_eq!(bernoulli(n), bernoulli_plus(n), "B_{n}");
        }
    }

    #[test]
    fn small_helpers() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
        assert_eq!(double_factorial_odd(3), BigInt::from(15));
        assert_eq!(double_factorial_odd(0), BigInt::one());
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        assert_eq!(sigma(0, 12), BigInt::from(6));
    }
}

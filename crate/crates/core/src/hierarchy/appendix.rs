//! Closed formulas for the dispersionless limit and for the top two powers of `eps`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::numbers::{bernoulli, binomial, double_factorial_odd, factorial, int, rat, Rat};
use crate::quantization::{infinite_normalizer, l_operator, QuantizedOperator};
use crate::scalar::Scalar;

/// A truncated power series in `y` with differential-polynomial coefficients.
type YSeries = Vec<DiffPoly>;

fn series_mul(a: &YSeries, b: &YSeries, top: usize) -> YSeries {
    let mut out = vec![DiffPoly::zero(); top + 1];
    for (i, x) in a.iter().enumerate().take(top + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(top + 1 - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// `y S(i y ∂x) u0 = Σ_k (-1)^k y^{2k+1} u_{2k} / (4^k (2k+1)!)`.
fn exponent_series(top: usize) -> YSeries {
    let mut out = vec![DiffPoly::zero(); top + 1];
    let mut k = 0u32;
    while 2 * (k as usize) < top {
        let denom = BigInt::from(4).pow(k) * factorial(2 * k + 1);
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        out[2 * k as usize + 1] = DiffPoly::u(2 * k).scale_rat(&Rat::new(BigInt::from(sign), denom));
        k += 1;
    }
    out
}

/// Coefficients of `1/S(y)` with `S(y) = Σ y^{2k} / (4^k (2k+1)!)`.
fn inverse_s(top: usize) -> Vec<Rat> {
    let s: Vec<Rat> = (0..=top)
        .map(|i| {
            if i % 2 == 1 {
                Rat::zero()
            } else {
                let k = (i / 2) as u32;
                Rat::new(BigInt::one(), BigInt::from(4).pow(k) * factorial(2 * k + 1))
            }
        })
        .collect();
    let mut inv = vec![Rat::zero(); top + 1];
    inv[0] = Rat::one();
    for n in 1..=top {
        let mut acc = Rat::zero();
        for i in 1..=n {
            acc -= &s[i] * &inv[n - i];
        }
        inv[n] = acc;
    }
    inv
}

/// Dispersionless densities from the generating functions: returns `(g_k(eps=0), g̃_k(eps=0))`
/// for `-2 ≤ k ≤ k_max`.
pub fn eliashberg_densities(k_max: i32) -> (BTreeMap<i32, DiffPoly>, BTreeMap<i32, DiffPoly>) {
    assert!(k_max >= -2, "k_max must be at least -2");
    let top = (k_max + 2) as usize;
    let x = exponent_series(top);
    let mut exp = vec![DiffPoly::zero(); top + 1];
    exp[0] = DiffPoly::one();
    let mut power = exp.clone();
    for n in 1..=top {
        power = series_mul(&power, &x, top);
        let inv_fact = Rat::new(BigInt::one(), factorial(n as u32));
        for (slot, p) in exp.iter_mut().zip(&power) {
            if !p.is_zero() {
                *slot = slot.add(&p.scale_rat(&inv_fact));
            }
        }
    }
    let inv_s: YSeries = inverse_s(top).into_iter().map(|r| DiffPoly::constant(Scalar::from_rat(r))).collect();
    let full = series_mul(&exp, &inv_s, top);
    let pick = |s: &YSeries| (0..=top).map(|i| (i as i32 - 2, s[i].clone())).collect::<BTreeMap<_, _>>();
    (pick(&full), pick(&exp))
}

/// `d(j, k)` from the recurrence `(2k+3)(d(j,k+1) + d(j-1,k+1)) = C(2k+3,j)/(2(k+1)!) + 2(d(j-3,k) + d(j,k))`.
pub fn d_coeff(j: i64, k: u32) -> Rat {
    if j < 0 || j > 2 * k as i64 {
        return Rat::zero();
    }
    d_row(k)[j as usize].clone()
}

fn d_row(k: u32) -> Vec<Rat> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Rat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(row) = cache.lock().expect("d cache poisoned").get(&k) {
        return row.clone();
    }
    let row = if k == 0 {
        vec![rat(1, 2)]
    } else {
        let prev = d_row(k - 1);
        let km = k - 1;
        let get = |j: i64| if j < 0 || j as usize >= prev.len() { Rat::zero() } else { prev[j as usize].clone() };
        let lead = Rat::from_integer(BigInt::from(2) * factorial(km + 1));
        let mut row: Vec<Rat> = Vec::with_capacity(2 * k as usize + 1);
        for j in 0..=2 * k as i64 {
            let rhs = Rat::from_integer(binomial(2 * km as i64 + 3, j)) / &lead + int(2) * (get(j - 3) + get(j));
            let below = if j == 0 { Rat::zero() } else { row[j as usize - 1].clone() };
            row.push(rhs / int(2 * km as i64 + 3) - below);
        }
        row
    };
    cache.lock().expect("d cache poisoned").insert(k, row.clone());
    row
}

/// Expands `1/(2√(1-2x(1+y)²)(1-2x(1-y+y²)))` and compares `[x^k y^j]` with `(2k+1)!! d(j,k)`.
pub fn d_genfun_check(j_max: u32, k_max: u32) -> bool {
    let poly_pow = |base: &[Rat], e: u32, cap: usize| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); cap + 1];
        out[0] = Rat::one();
        for _ in 0..e {
            let mut next = vec![Rat::zero(); cap + 1];
            for (i, a) in out.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in base.iter().enumerate() {
                    if i + j <= cap {
                        next[i + j] += a * b;
                    }
                }
            }
            out = next;
        }
        out
    };
    let cap = j_max as usize;
    let sq = [int(1), int(2), int(1)];
    let other = [int(1), int(-1), int(1)];
    for k in 0..=k_max {
        let mut coeffs = vec![Rat::zero(); cap + 1];
        for n in 0..=k {
            let m = k - n;
            // 1/√(1-t) = Σ C(2n,n) t^n / 4^n with t = 2x(1+y)²
            let a = Rat::new(binomial(2 * n as i64, n as i64) * BigInt::from(2).pow(n), BigInt::from(4).pow(n));
            let b = Rat::from_integer(BigInt::from(2).pow(m));
            let left = poly_pow(&sq, n, cap);
            let right = poly_pow(&other, m, cap);
            for (i, l) in left.iter().enumerate() {
                if l.is_zero() {
                    continue;
                }
                for (j, r) in right.iter().enumerate().take(cap + 1 - i) {
                    coeffs[i + j] += &a * &b * l * r / int(2);
                }
            }
        }
        let norm = Rat::from_integer(double_factorial_odd(k + 1));
        for (j, c) in coeffs.iter().enumerate() {
            if *c != &norm * d_coeff(j as i64, k) {
                return false;
            }
        }
    }
    true
}

/// `([eps^{k+1}] g_k, [eps^k] g_k)` in closed form. The subleading part requires `k ≥ 0`.
pub fn epsilon_extremes(k: i32) -> (DiffPoly, Option<DiffPoly>) {
    assert!(k >= -1, "closed forms start at k = -1");
    let kk = (k + 1) as u32;
    let leading = DiffPoly::u(2 * kk).scale_rat(&Rat::new(BigInt::one(), BigInt::from(24).pow(kk) * factorial(kk)));
    if k < 0 {
        return (leading, None);
    }
    let k = k as u32;
    let norm = infinite_normalizer(k);
    let constant = -bernoulli(2 * k + 2) / (norm * int(4 * k as i64 + 4));
    let mut sub = DiffPoly::constant(Scalar::from_rat(constant));
    let scale = Rat::new(BigInt::one(), BigInt::from(24).pow(k));
    for j in 0..=2 * k {
        let d = d_coeff(j as i64, k);
        if !d.is_zero() {
            sub = sub.add(&DiffPoly::monomial(&[j, 2 * k - j]).scale_rat(&(d * &scale)));
        }
    }
    (leading, Some(sub))
}

/// `G_k^[∞] = (c²/2) δ_{k0} + L_{2k+2} / ((-4)^k (2k+1)!!)`.
pub fn g_infinity_operator(k: u32) -> QuantizedOperator {
    let mut op = l_operator(2 * k + 2).scale(&Scalar::from_rat(Rat::one() / infinite_normalizer(k)));
    if k == 0 {
        let shift = QuantizedOperator::with_moments(DiffPoly::constant(Scalar::c().pow(2).scale(&rat(1, 2))), vec![]);
        op = op.add(&shift);
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{densities, reduced_densities, Mode};
    use crate::partition::partitions_of;
    use crate::quantization::{infinite_eigenvalue, quantize};

    #[test]
    fn eliashberg_examples() {
        let (full, reduced) = eliashberg_densities(2);
        assert_eq!(reduced[&0], DiffPoly::u(0).pow(2).scale_rat(&rat(1, 2)));
        let g0 = DiffPoly::u(0).pow(2).scale_rat(&rat(1, 2)).sub(&DiffPoly::constant(Scalar::from_rat(rat(1, 24))));
        assert_eq!(full[&0], g0);
        assert_eq!(full[&-2], DiffPoly::one());
        assert_eq!(full[&-1], DiffPoly::u(0));
    }

    #[test]
    fn eliashberg_matches_recursion() {
        let (full, reduced) = eliashberg_densities(5);
        let t = densities(Mode::Kdv, 5).unwrap();
        let r = reduced_densities(Mode::Kdv, 5).unwrap();
        for k in -2..=5 {
            assert_eq!(full[&k], t.get(k).unwrap().set_eps_zero(), "g_{k}");
            assert_eq!(reduced[&k], r.get(k).unwrap().set_eps_zero(), "reduced g_{k}");
        }
    }

    #[test]
    fn d_examples() {
        assert_eq!(d_coeff(0, 0), rat(1, 2));
        assert_eq!(d_coeff(0, 1), rat(1, 2));
        assert_eq!(d_coeff(1, 1), Rat::zero());
        assert_eq!(d_coeff(2, 1), rat(1, 2));
        assert_eq!(d_coeff(3, 1), Rat::zero());
        for k in 0..=8 {
            for j in 0..=2 * k as i64 {
                assert_eq!(d_coeff(j, k), d_coeff(2 * k as i64 - j, k));
            }
            // alternating sum identity, summed from j = 0
            let alt: Rat = (0..=2 * k as i64).map(|j| if j % 2 == 0 { d_coeff(j, k) } else { -d_coeff(j, k) }).sum();
            let expect = Rat::new(BigInt::from(6).pow(k), BigInt::from(2) * double_factorial_odd(k + 1));
            assert_eq!(alt, expect, "k = {k}");
        }
        assert!(d_genfun_check(20, 8));
    }

    #[test]
    fn extremes_match_recursion() {
        let t = densities(Mode::Kdv, 3).unwrap();
        assert_eq!(epsilon_extremes(0).0, DiffPoly::u(2).scale_rat(&rat(1, 24)));
        let sub1 = DiffPoly::monomial(&[0, 2]).sub(&DiffPoly::constant(Scalar::from_rat(rat(1, 120)))).scale_rat(&rat(1, 24));
        assert_eq!(epsilon_extremes(1).1.unwrap(), sub1);
        for k in -1..=3 {
            let g = t.get(k).unwrap();
            assert_eq!(g.max_eps_degree(), Some((k + 1) as u32));
            let (lead, sub) = epsilon_extremes(k);
            assert_eq!(g.eps_coeff((k + 1) as u32), lead, "leading {k}");
            if let Some(sub) = sub {
                assert_eq!(g.eps_coeff(k as u32), sub, "subleading {k}");
            }
        }
    }

    #[test]
    fn infinite_operator() {
        let t = densities(Mode::Kdv, 2).unwrap();
        for k in 0..=2u32 {
            let op = g_infinity_operator(k);
            let top = quantize(&t.get(k as i32).unwrap().eps_coeff(k));
            for n in 0..=4 {
                assert_eq!(*op.matrix_on(n), *top.matrix_on(n), "k = {k}, n = {n}");
                for l in partitions_of(n) {
                    assert_eq!(op.diagonal(&l), infinite_eigenvalue(k).eval(&l));
                }
            }
        }
    }
}

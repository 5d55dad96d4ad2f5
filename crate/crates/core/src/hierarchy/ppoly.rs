//! The polynomials `P_ℓ(ξ)` entering the commutator formula.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::linalg::System;
use crate::numbers::{bernoulli, binomial, factorial, int, Rat};

/// A polynomial in `ξ` attached to an index vector `ℓ`, stored by coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPolynomial {
    ell: Vec<u32>,
    coeffs: Vec<Rat>,
}

impl PPolynomial {
    pub fn ell(&self) -> &[u32] {
        &self.ell
    }

    /// Coefficient of `ξ^j`.
    pub fn coeff(&self, j: usize) -> Rat {
        self.coeffs.get(j).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Nominal degree `|ℓ| + n - 1`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, xi: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * xi + c)
    }

    /// `P(∂x) f`.
    pub fn apply(&self, f: &DiffPoly) -> DiffPoly {
        let mut acc = DiffPoly::zero();
        let mut d = f.clone();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                d = d.dx();
            }
            if !c.is_zero() {
                acc = acc.add(&d.scale_rat(c));
            }
        }
        acc
    }
}

/// `P̃_ℓ(ξ) = Σ_{a_1+…+a_n=ξ} Π a_i^{ℓ_i}` evaluated at a nonnegative integer.
fn tilde_values(ell: &[u32], upto: usize) -> Vec<BigInt> {
    // convolution of the sequences a ↦ a^{ℓ_i}, with 0^0 = 1
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); upto + 1];
    acc[0] = BigInt::one();
    let mut first = true;
    for &l in ell {
        let seq: Vec<BigInt> = (0..=upto).map(|a| BigInt::from(a).pow(l)).collect();
        if first {
            acc = seq;
            first = false;
            continue;
        }
        let mut next = vec![BigInt::zero(); upto + 1];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in seq[..=upto - i].iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    acc
}

/// `P̃_ℓ` by exact interpolation at `ξ = 1, …, deg + 1`.
pub fn p_tilde(ell: &[u32]) -> PPolynomial {
    assert!(!ell.is_empty(), "index vector must be nonempty");
    let deg = ell.iter().sum::<u32>() as usize + ell.len() - 1;
    let values = tilde_values(ell, deg + 1);
    let rows: Vec<Vec<Rat>> = (1..=deg + 1)
        .map(|x| (0..=deg).map(|j| Rat::from_integer(BigInt::from(x).pow(j as u32))).collect())
        .collect();
    let rhs: Vec<Rat> = (1..=deg + 1).map(|x| Rat::from_integer(values[x].clone())).collect();
    let sol = System::from_rows(rows, deg + 1).solve_unique(&[rhs]).expect("Vandermonde system is regular");
    PPolynomial { ell: ell.to_vec(), coeffs: sol.into_iter().next().expect("one solution") }
}

/// `P_ℓ`: the parity-filtered, phase-twisted `P̃_ℓ`. Cached.
pub fn p_polynomial(ell: &[u32]) -> Arc<PPolynomial> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u32>, Arc<PPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("P cache poisoned").get(ell) {
        return p.clone();
    }
    let tilde = p_tilde(ell);
    let n = ell.len() as i64;
    let total: i64 = ell.iter().map(|&l| l as i64).sum();
    let coeffs = tilde
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let e = n - 1 - j as i64 + total;
            if e.rem_euclid(2) != 0 {
                Rat::zero()
            } else if (e / 2).rem_euclid(2) == 0 {
                c.clone()
            } else {
                -c.clone()
            }
        })
        .collect();
    let p = Arc::new(PPolynomial { ell: ell.to_vec(), coeffs });
    cache.lock().expect("P cache poisoned").insert(ell.to_vec(), p.clone());
    p
}

/// Closed Bernoulli form of `P_{ℓ,m}`. The Bernoulli terms carry an overall `(-1)^{ℓ+m+1}`,
/// which is what the phase convention of [`p_polynomial`] produces.
pub fn p_polynomial_closed(l: u32, m: u32) -> PPolynomial {
    let deg = (l + m + 1) as usize;
    let mut coeffs = vec![Rat::zero(); deg + 1];
    coeffs[deg] = Rat::from_integer(factorial(l) * factorial(m)) / Rat::from_integer(factorial(l + m + 1));
    let mut i = 0i64;
    while 2 * i < (l + m) as i64 {
        let b = bernoulli((2 * i + 2) as u32) / int(2 * i + 2);
        let sign = |e: i64| if e.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        let comb = sign(l as i64 + i) * binomial(l as i64, 2 * i + 1 - m as i64)
            + sign(m as i64 + i) * binomial(m as i64, 2 * i + 1 - l as i64);
        let j = (l + m) as i64 - 2 * i - 1;
        let comb = if (l + m).is_multiple_of(2) { -comb } else { comb };
        coeffs[j as usize] += b * Rat::from_integer(comb);
        i += 1;
    }
    PPolynomial { ell: vec![l, m], coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn examples() {
        for m in 0..6 {
            let p = p_polynomial(&[m]);
            for j in 0..=m as usize {
                assert_eq!(p.coeff(j), if j == m as usize { int(1) } else { int(0) });
            }
        }
        assert_eq!(p_tilde(&[0, 0]).coeffs(), &[int(1), int(1)]);
        assert_eq!(p_polynomial(&[0, 0]).coeffs(), &[int(0), int(1)]);
        // the phase flips the sign of the ξ coefficient of ξ³/6 - ξ/6
        assert_eq!(p_tilde(&[1, 1]).coeffs(), &[int(0), rat(-1, 6), int(0), rat(1, 6)]);
        assert_eq!(p_polynomial(&[1, 1]).coeffs(), &[int(0), rat(1, 6), int(0), rat(1, 6)]);
        assert_eq!(p_polynomial_closed(1, 1).coeffs(), &[int(0), rat(1, 6), int(0), rat(1, 6)]);
        assert_eq!(p_polynomial_closed(0, 3).coeffs(), &[int(0), int(0), rat(-1, 4), int(0), rat(1, 4)]);
        assert_eq!(p_polynomial_closed(0, 0).coeffs(), &[int(0), int(1)]);
    }

    #[test]
    fn closed_form_matches_interpolation() {
        for l in 0..=10 {
            for m in 0..=10 - l {
                assert_eq!(*p_polynomial(&[l, m]), p_polynomial_closed(l, m), "({l}, {m})");
            }
        }
    }

    #[test]
    fn parity_rule() {
        let mut vectors: Vec<Vec<u32>> = Vec::new();
        for a in 0..=6 {
            for b in 0..=6 - a {
                vectors.push(vec![a, b]);
                for c in 0..=6 - a - b {
                    vectors.push(vec![a, b, c]);
                }
            }
        }
        for ell in vectors {
            let p = p_polynomial(&ell);
            let n = ell.len();
            let total: u32 = ell.iter().sum();
            assert_eq!(p.degree(), total as usize + n - 1);
            for j in 0..=p.degree() {
                if (n + total as usize + j + 1) % 2 == 1 {
                    assert!(p.coeff(j).is_zero(), "{ell:?} at {j}");
                }
            }
        }
    }
}

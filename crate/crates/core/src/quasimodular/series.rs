//! Truncated q-expansions with [`Scalar`] coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numbers::{bernoulli, int, sigma, Rat};
use crate::scalar::Scalar;

/// `Σ_{n ≤ N} a_n q^n`, known exactly up to and including `q^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Scalar>,
}

impl QSeries {
    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        QSeries { coeffs }
    }

    pub fn from_rats(coeffs: Vec<Rat>) -> Self {
        QSeries::new(coeffs.into_iter().map(Scalar::from_rat).collect())
    }

    pub fn zero(order: usize) -> Self {
        QSeries::new(vec![Scalar::zero(); order + 1])
    }

    pub fn constant(s: Scalar, order: usize) -> Self {
        let mut v = vec![Scalar::zero(); order + 1];
        v[0] = s;
        QSeries::new(v)
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(Scalar::one(), order)
    }

    /// The truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Scalar {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Drops everything above `q^order`.
    pub fn truncate(&self, order: usize) -> QSeries {
        assert!(order <= self.order(), "cannot extend a truncated series");
        QSeries::new(self.coeffs[..=order].to_vec())
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        QSeries::new((0..=n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect())
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        QSeries::new((0..=n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect())
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let n = self.order().min(o.order());
        let mut out = vec![Scalar::zero(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        QSeries::new(out)
    }

    pub fn scale(&self, s: &Scalar) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn scale_rat(&self, r: &Rat) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| c.scale(r)).collect())
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> QSeries {
        QSeries::new(self.coeffs.iter().map(f).collect())
    }

    /// `q d/dq`.
    pub fn q_d_dq(&self) -> QSeries {
        QSeries::new(self.coeffs.iter().enumerate().map(|(n, c)| c.scale(&int(n as i64))).collect())
    }

    /// Multiplies by `Π (1 - q^k)`, i.e. divides by the partition generating series.
    pub fn divide_by_partition_series(&self) -> QSeries {
        let euler = euler_product(self.order());
        let e = QSeries::from_rats(euler.into_iter().map(Rat::from_integer).collect());
        self.mul(&e)
    }
}

/// Coefficients of `Π_{k ≥ 1} (1 - q^k)` up to `q^n`, from the pentagonal number theorem.
pub fn euler_product(n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    out[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let a = (k * (3 * k - 1) / 2) as usize;
        let b = (k * (3 * k + 1) / 2) as usize;
        if a > n {
            break;
        }
        out[a] += &sign;
        if b <= n {
            out[b] += &sign;
        }
        k += 1;
    }
    out
}

/// `𝔾_k = -B_k/(2k) + Σ_{n ≥ 1} σ_{k-1}(n) q^n` for even `k ≥ 2`.
pub fn eisenstein(k: u32, order: usize) -> QSeries {
    assert!(k >= 2 && k.is_multiple_of(2), "Eisenstein series need even weight >= 2");
    let mut v = Vec::with_capacity(order + 1);
    v.push(-bernoulli(k) / int(2 * k as i64));
    for n in 1..=order {
        v.push(Rat::from_integer(sigma(k - 1, n as u64)));
    }
    QSeries::from_rats(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn eisenstein_examples() {
        let g2 = eisenstein(2, 4);
        let expect: Vec<Rat> = vec![rat(-1, 24), int(1), int(3), int(4), int(7)];
        assert_eq!(g2, QSeries::from_rats(expect));
        assert_eq!(eisenstein(4, 0).coeff(0), &Scalar::from_rat(rat(1, 240)));
        assert_eq!(eisenstein(6, 0).coeff(0), &Scalar::from_rat(rat(-1, 504)));
    }

    #[test]
    fn euler_product_inverts_partition_counts() {
        // brute-force partition counts by the standard coin-change recurrence
        let n = 30;
        let mut p = vec![BigInt::zero(); n + 1];
        p[0] = BigInt::one();
        for part in 1..=n {
            for m in part..=n {
                let add = p[m - part].clone();
                p[m] += add;
            }
        }
        let ps = QSeries::from_rats(p.into_iter().map(Rat::from_integer).collect());
        assert_eq!(ps.divide_by_partition_series(), QSeries::one(n));
    }

    #[test]
    fn truncation_is_min_order() {
        let a = eisenstein(2, 5);
        let b = eisenstein(4, 3);
        assert_eq!(a.mul(&b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
        assert_eq!(a.q_d_dq().coeff(2), &Scalar::from_int(6));
    }
}

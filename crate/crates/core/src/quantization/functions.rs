//! Functions on partitions, their q-brackets, and the diagonal operators `L_k`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::lambda::{inner_product, schur, LambdaElement};
use crate::numbers::{bernoulli, double_factorial_odd, factorial, int, rat, Rat};
use crate::partition::{partitions_of, Partition};
use crate::quasimodular::QSeries;
use crate::scalar::Scalar;

use super::operator::{parallel_map, QuantizedOperator};

type Evaluator = dyn Fn(&Partition) -> Scalar + Send + Sync;

/// A named function `𝒫 → Q[c]`.
#[derive(Clone)]
pub struct PartitionFunction {
    name: String,
    eval: Arc<Evaluator>,
}

impl PartitionFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Partition) -> Scalar + Send + Sync + 'static) -> Self {
        PartitionFunction { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, lambda: &Partition) -> Scalar {
        (self.eval)(lambda)
    }
}

impl fmt::Debug for PartitionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionFunction({})", self.name)
    }
}

/// `Σ_λ f(λ) q^{|λ|} / Σ_λ q^{|λ|}` through `q^order`.
pub fn q_bracket(f: &PartitionFunction, order: usize) -> QSeries {
    let sums = parallel_map(0..=order as u32, |n| {
        let mut acc = Scalar::zero();
        for l in partitions_of(n) {
            acc += &f.eval(&l);
        }
        acc
    });
    QSeries::new(sums).divide_by_partition_series()
}

/// `β_k = (2^{1-k} - 1) B_k / k!`.
fn beta(k: u32) -> Rat {
    let two_pow = Rat::new(BigInt::one(), BigInt::from(2).pow(k - 1));
    (two_pow - Rat::one()) * bernoulli(k) / Rat::from_integer(factorial(k))
}

/// The raw value of `Q_k(λ)` as a rational.
pub fn qk_value(k: u32, lambda: &Partition) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let half = rat(1, 2);
    let mut acc = Rat::zero();
    for (idx, &part) in lambda.parts().iter().enumerate() {
        let i = int(idx as i64 + 1);
        let shifted = int(part as i64) - &i + &half;
        let base = -&i + &half;
        acc += num_traits::pow(shifted, (k - 1) as usize) - num_traits::pow(base, (k - 1) as usize);
    }
    acc / Rat::from_integer(factorial(k - 1)) + beta(k)
}

/// The Bloch–Okounkov generator `Q_k`.
pub fn qk_function(k: u32) -> PartitionFunction {
    PartitionFunction::new(format!("Q{k}"), move |l| Scalar::from_rat(qk_value(k, l)))
}

/// `S_k(λ) = -B_k/(2k) + Σ λ_i^{k-1}`.
pub fn moment_value(k: u32, lambda: &Partition) -> Rat {
    assert!(k >= 1, "moment functions start at k = 1");
    let sum: BigInt = lambda.parts().iter().map(|&p| BigInt::from(p).pow(k - 1)).sum();
    -bernoulli(k) / int(2 * k as i64) + Rat::from_integer(sum)
}

pub fn moment_sk(k: u32) -> PartitionFunction {
    PartitionFunction::new(format!("S{k}"), move |l| Scalar::from_rat(moment_value(k, l)))
}

/// `T_k = ((k-2)!/2) Σ_{i=0}^{k} (-1)^i Q_i Q_{k-i}`.
pub fn hook_tk(k: u32) -> PartitionFunction {
    assert!(k >= 2, "T_k starts at k = 2");
    PartitionFunction::new(format!("T{k}"), move |l| {
        let q: Vec<Rat> = (0..=k).map(|i| qk_value(i, l)).collect();
        let mut acc = Rat::zero();
        for i in 0..=k as usize {
            let term = &q[i] * &q[k as usize - i];
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Scalar::from_rat(acc * Rat::from_integer(factorial(k - 2)) / int(2))
    })
}

/// `E_k^[0] = Σ_{j=0}^{k+2} c^{k+2-j}/(k+2-j)! Q_j`.
pub fn hopf_eigenvalue(k: i32) -> PartitionFunction {
    assert!(k >= -2, "Hopf eigenvalues start at k = -2");
    let top = (k + 2) as u32;
    PartitionFunction::new(format!("E{k}[0]"), move |l| {
        let mut acc = Scalar::zero();
        for j in 0..=top {
            let q = qk_value(j, l);
            if q.is_zero() {
                continue;
            }
            let r = top - j;
            acc += &Scalar::c().pow(r).scale(&(q / Rat::from_integer(factorial(r))));
        }
        acc
    })
}

/// `(-4)^k (2k+1)!!`, the normalization of the infinite-dispersion operators.
pub fn infinite_normalizer(k: u32) -> Rat {
    Rat::from_integer(BigInt::from(-4).pow(k) * double_factorial_odd(k + 1))
}

/// `E_k^[∞] = (c²/2) δ_{k,0} + S_{2k+2} / ((-4)^k (2k+1)!!)`.
pub fn infinite_eigenvalue(k: u32) -> PartitionFunction {
    PartitionFunction::new(format!("E{k}[inf]"), move |l| {
        let mut s = Scalar::from_rat(moment_value(2 * k + 2, l) / infinite_normalizer(k));
        if k == 0 {
            s += &Scalar::c().pow(2).scale(&rat(1, 2));
        }
        s
    })
}

/// `L_k = -B_k/(2k) + Σ_j j^{k-1} p_j ∂/∂p_j`.
pub fn l_operator(k: u32) -> QuantizedOperator {
    assert!(k >= 1, "L_k starts at k = 1");
    let constant = Scalar::from_rat(-bernoulli(k) / int(2 * k as i64));
    QuantizedOperator::with_moments(DiffPoly::constant(constant), vec![(k - 1, Scalar::one())])
}

/// The density form `-B_k/(2k) - (i^k/2) ū0 u_{k-2}` of `L_k`, for `k ≥ 2`.
pub fn l_operator_density(k: u32) -> QuantizedOperator {
    assert!(k >= 2, "density form needs k >= 2");
    let constant = DiffPoly::constant(Scalar::from_rat(-bernoulli(k) / int(2 * k as i64)));
    let unit = Scalar::from_gauss(crate::scalar::Gauss::i_pow(k as i64)).scale(&rat(-1, 2));
    let quad = DiffPoly::monomial(&[0, k - 2]).scale(&unit);
    crate::quantization::quantize(&constant.add(&quad))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    Schur,
}

/// `λ ↦ (b_λ, op b_λ)/(b_λ, b_λ)`.
pub fn diagonal_function(op: &QuantizedOperator, basis: Basis) -> PartitionFunction {
    let op = op.clone();
    match basis {
        Basis::Monomial => PartitionFunction::new("diag[p]", move |l| op.diagonal(l)),
        Basis::Schur => PartitionFunction::new("diag[s]", move |l| {
            let s = schur(l);
            let image: LambdaElement = op.apply(&s);
            inner_product(&s, &image)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasimodular::eisenstein;

    fn part(v: &[u32]) -> Partition {
        Partition::from_parts(v.to_vec())
    }

    #[test]
    fn q_examples() {
        for l in partitions_of(6) {
            assert_eq!(qk_value(0, &l), Rat::one());
            assert_eq!(qk_value(1, &l), Rat::zero());
            assert_eq!(qk_value(2, &l), int(6) - rat(1, 24));
        }
        assert_eq!(qk_value(2, &Partition::empty()), rat(-1, 24));
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment_value(2, &part(&[4, 1])), int(5) - rat(1, 24));
        assert_eq!(moment_value(4, &Partition::empty()), rat(1, 240));
    }

    #[test]
    fn brackets() {
        let one = PartitionFunction::new("one", |_| Scalar::one());
        assert_eq!(q_bracket(&one, 10), QSeries::one(10));
        assert_eq!(q_bracket(&qk_function(2), 12), eisenstein(2, 12));
        for k in [2, 4, 6, 8] {
            assert_eq!(q_bracket(&moment_sk(k), 12), eisenstein(k, 12), "S{k}");
            assert_eq!(q_bracket(&hook_tk(k), 12), eisenstein(k, 12), "T{k}");
        }
    }

    #[test]
    fn hopf_examples() {
        let l = part(&[2, 1]);
        assert_eq!(hopf_eigenvalue(-2).eval(&l), Scalar::one());
        let e0 = &Scalar::c().pow(2).scale(&rat(1, 2)) + &Scalar::from_rat(int(3) - rat(1, 24));
        assert_eq!(hopf_eigenvalue(0).eval(&l), e0);
        assert_eq!(infinite_eigenvalue(0).eval(&l), e0);
    }

    #[test]
    fn l_operator_diagonals() {
        for k in 1..=6 {
            let op = l_operator(k);
            let s = diagonal_function(&op, Basis::Monomial);
            let t = diagonal_function(&op, Basis::Schur);
            for n in 0..=5 {
                for l in partitions_of(n) {
                    assert_eq!(s.eval(&l), Scalar::from_rat(moment_value(k, &l)));
                    if k % 2 == 0 {
                        assert_eq!(t.eval(&l), hook_tk(k).eval(&l), "T{k} at {l}");
                    }
                }
            }
        }
        assert_eq!(
            l_operator(2).apply_monomial(&part(&[1])),
            LambdaElement::term(part(&[1]), Scalar::from_rat(rat(23, 24)))
        );
        // for odd k the alternating sum defining T_k vanishes while the Schur diagonal does not
        assert!(hook_tk(3).eval(&part(&[1])).is_zero());
        assert_eq!(diagonal_function(&l_operator(3), Basis::Schur).eval(&part(&[1])), Scalar::one());
        let one = diagonal_function(&crate::quantization::quantize(&DiffPoly::one()), Basis::Schur);
        assert_eq!(one.eval(&part(&[3, 2])), Scalar::one());
    }

    #[test]
    fn density_form_of_l() {
        for k in (4..=10).step_by(2) {
            for n in 0..=5 {
                assert_eq!(*l_operator_density(k).matrix_on(n), *l_operator(k).matrix_on(n), "k = {k}");
            }
        }
        // at k = 2 the two zero modes of u0^2 add c^2/2
        let shift = QuantizedOperator::with_moments(DiffPoly::constant(Scalar::c().pow(2).scale(&rat(-1, 2))), vec![]);
        for n in 0..=5 {
            assert_eq!(*l_operator_density(2).add(&shift).matrix_on(n), *l_operator(2).matrix_on(n));
        }
    }
}

//! The ring Λ = Q[p1, p2, ...] in the power-sum monomial basis, its scalar product,
//! complete homogeneous functions and Schur functions.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use crate::numbers::{int, Rat};
use crate::partition::Partition;
use crate::scalar::Scalar;

/// Sparse element of Λ: coefficient of `p_λ` for each partition λ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LambdaElement {
    terms: BTreeMap<Partition, Scalar>,
}

impl LambdaElement {
    pub fn zero() -> Self {
        LambdaElement::default()
    }

    pub fn one() -> Self {
        LambdaElement::p(Partition::empty())
    }

    /// The monomial `p_λ`.
    pub fn p(lambda: Partition) -> Self {
        LambdaElement::term(lambda, Scalar::one())
    }

    pub fn term(lambda: Partition, coeff: Scalar) -> Self {
        let mut e = LambdaElement::zero();
        e.add_term(lambda, &coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, lambda: &Partition) -> Scalar {
        self.terms.get(lambda).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, lambda: Partition, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&lambda) {
            Some(v) => {
                *v += coeff;
                if v.is_zero() {
                    self.terms.remove(&lambda);
                }
            }
            None => {
                self.terms.insert(lambda, coeff.clone());
            }
        }
    }

    pub fn add(&self, other: &LambdaElement) -> LambdaElement {
        let mut out = self.clone();
        for (l, s) in &other.terms {
            out.add_term(l.clone(), s);
        }
        out
    }

    pub fn sub(&self, other: &LambdaElement) -> LambdaElement {
        self.add(&other.scale_rat(&-Rat::one()))
    }

    pub fn scale(&self, s: &Scalar) -> LambdaElement {
        let mut out = LambdaElement::zero();
        for (l, c) in &self.terms {
            out.add_term(l.clone(), &(c * s));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> LambdaElement {
        let mut out = LambdaElement::zero();
        for (l, c) in &self.terms {
            out.add_term(l.clone(), &c.scale(r));
        }
        out
    }

    pub fn mul(&self, other: &LambdaElement) -> LambdaElement {
        let mut out = LambdaElement::zero();
        for (la, ca) in &self.terms {
            for (lb, cb) in &other.terms {
                out.add_term(la.union(lb), &(ca * cb));
            }
        }
        out
    }

    /// Splits by the grading `deg p_k = k`; the pieces sum back to `self`.
    pub fn weight_decompose(&self) -> BTreeMap<u32, LambdaElement> {
        let mut out: BTreeMap<u32, LambdaElement> = BTreeMap::new();
        for (l, c) in &self.terms {
            out.entry(l.size()).or_default().add_term(l.clone(), c);
        }
        out
    }

    /// Whether every term has weight `n`.
    pub fn is_homogeneous(&self, n: u32) -> bool {
        self.terms.keys().all(|l| l.size() == n)
    }
}

/// Bilinear extension of `(p_λ, p_μ) = z_λ δ_{λμ}`.
pub fn inner_product(f: &LambdaElement, g: &LambdaElement) -> Scalar {
    let mut acc = Scalar::zero();
    for (l, a) in &f.terms {
        if let Some(b) = g.terms.get(l) {
            acc += &(a * b).scale_int(&l.z_factor());
        }
    }
    acc
}

/// `h_k`, the coefficient of `y^k` in `exp(Σ p_j y^j / j)`; zero for negative `k`.
///
/// Expanded through `k h_k = Σ_{j=1}^{k} p_j h_{k-j}`, the derivative of the exponential.
pub fn complete_homogeneous(k: i64) -> LambdaElement {
    if k < 0 {
        return LambdaElement::zero();
    }
    static CACHE: OnceLock<Mutex<Vec<LambdaElement>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![LambdaElement::one()]));
    let mut table = cache.lock().expect("h cache poisoned");
    while table.len() <= k as usize {
        let m = table.len();
        let mut acc = LambdaElement::zero();
        for j in 1..=m {
            let pj = LambdaElement::p(Partition::from_parts(vec![j as u32]));
            acc = acc.add(&pj.mul(&table[m - j]));
        }
        table.push(acc.scale_rat(&(Rat::one() / int(m as i64))));
    }
    table[k as usize].clone()
}

/// Schur function `s_λ = det[h_{λ_i - i + j}]` in the power-sum basis.
///
/// The determinant is expanded row by row over the sets of used columns; entries with
/// negative index vanish, which keeps the number of reachable column sets small.
pub fn schur(lambda: &Partition) -> LambdaElement {
    static CACHE: OnceLock<Mutex<HashMap<Partition, LambdaElement>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("schur cache poisoned").get(lambda) {
        return s.clone();
    }
    let parts = lambda.parts();
    let l = parts.len();
    let mut states: HashMap<u64, LambdaElement> = HashMap::new();
    states.insert(0, LambdaElement::one());
    for (i, &row_part) in parts.iter().enumerate() {
        let mut next: HashMap<u64, LambdaElement> = HashMap::new();
        for (mask, acc) in &states {
            for j in 0..l {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let idx = row_part as i64 - i as i64 + j as i64;
                if idx < 0 {
                    continue;
                }
                // sign of the permutation grows by the number of used columns to the right of j
                let inversions = (mask >> (j + 1)).count_ones();
                let mut term = acc.mul(&complete_homogeneous(idx));
                if inversions % 2 == 1 {
                    term = term.scale_rat(&-Rat::one());
                }
                let slot = next.entry(mask | (1 << j)).or_default();
                *slot = slot.add(&term);
            }
        }
        states = next;
    }
    let full = if l == 0 { 0 } else { (1u64 << l) - 1 };
    let s = states.remove(&full).unwrap_or_default();
    cache.lock().expect("schur cache poisoned").insert(lambda.clone(), s.clone());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;
    use crate::partition::partitions_of;

    fn pp(parts: &[u32]) -> LambdaElement {
        LambdaElement::p(Partition::from_parts(parts.to_vec()))
    }

    #[test]
    fn scalar_product_examples() {
        assert_eq!(inner_product(&pp(&[2, 1]), &pp(&[2, 1])), Scalar::from_int(2));
        assert!(inner_product(&pp(&[2]), &pp(&[1, 1])).is_zero());
        assert_eq!(inner_product(&pp(&[1]), &pp(&[1])), Scalar::one());
    }

    #[test]
    fn complete_homogeneous_examples() {
        assert_eq!(complete_homogeneous(0), LambdaElement::one());
        assert_eq!(complete_homogeneous(1), pp(&[1]));
        assert_eq!(complete_homogeneous(2), pp(&[1, 1]).add(&pp(&[2])).scale_rat(&rat(1, 2)));
        assert!(complete_homogeneous(-3).is_zero());
    }

    #[test]
    fn complete_homogeneous_matches_z_formula() {
        // h_n = Σ_{λ⊢n} p_λ / z_λ
        for n in 0..=8u32 {
            let mut expect = LambdaElement::zero();
            for l in partitions_of(n) {
                let z = Rat::from_integer(l.z_factor());
                expect.add_term(l, &Scalar::from_rat(Rat::one() / z));
            }
            assert_eq!(complete_homogeneous(n as i64), expect, "h_{n}");
        }
    }

    #[test]
    fn schur_examples() {
        assert_eq!(schur(&Partition::from_parts(vec![1])), pp(&[1]));
        assert_eq!(schur(&Partition::from_parts(vec![2])), pp(&[1, 1]).add(&pp(&[2])).scale_rat(&rat(1, 2)));
        assert_eq!(schur(&Partition::from_parts(vec![1, 1])), pp(&[1, 1]).sub(&pp(&[2])).scale_rat(&rat(1, 2)));
        assert_eq!(schur(&Partition::empty()), LambdaElement::one());
    }

    #[test]
    fn schur_orthonormal() {
        for n in 0..=8u32 {
            let ps = partitions_of(n);
            let ss: Vec<_> = ps.iter().map(schur).collect();
            for (i, a) in ss.iter().enumerate() {
                assert!(a.is_homogeneous(n));
                for (j, b) in ss.iter().enumerate() {
                    let expect = if i == j { Scalar::one() } else { Scalar::zero() };
                    assert_eq!(inner_product(a, b), expect, "({}, {})", ps[i], ps[j]);
                }
            }
        }
    }

    #[test]
    fn weight_decompose_recombines() {
        let f = pp(&[2, 1]).add(&pp(&[1])).add(&pp(&[3]).scale_rat(&rat(-2, 3)));
        let parts = f.weight_decompose();
        assert_eq!(parts.len(), 2);
        let back = parts.values().fold(LambdaElement::zero(), |a, b| a.add(b));
        assert_eq!(back, f);
    }
}

//! Quantized operators `ḡ` acting on Λ in the power-sum basis.
//!
//! A density monomial `u_{a1}···u_{an}` becomes `Σ_{Σk=0} Π (i k_j)^{a_j} ω_{k_j}` with
//! `ω_k ↦ p_k` (k > 0), `c` (k = 0), `-k ∂/∂p_{-k}` (k < 0), normal ordered. Each slot takes
//! one of three roles (creator, zero mode, annihilator); slots with equal index are
//! interchangeable, so a monomial reduces to a short list of role terms
//! `coeff · Σ_{ordered values} Π n^{e+1} Π m^{f} p_m ... ∂_n ...` keyed by the sorted
//! annihilator and creator exponents.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::lambda::LambdaElement;
use crate::numbers::{factorial, Rat};
use crate::partition::{partitions_of, partitions_with_len, Partition};
use crate::quasimodular::QSeries;
use crate::scalar::{Gauss, Scalar};

/// Sorted annihilator exponents and sorted creator exponents.
type RoleKey = (Vec<u32>, Vec<u32>);

/// The matrix of an operator on Λ_n: `entries[(λ, μ)]` is the coefficient of `p_μ` in `op(p_λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    n: u32,
    basis: Vec<Partition>,
    entries: BTreeMap<(Partition, Partition), Scalar>,
}

impl OperatorMatrix {
    pub fn new(n: u32, entries: BTreeMap<(Partition, Partition), Scalar>) -> Self {
        OperatorMatrix { n, basis: partitions_of(n), entries }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Rows and columns in canonical partition order.
    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn get(&self, row: &Partition, col: &Partition) -> Scalar {
        self.entries.get(&(row.clone(), col.clone())).cloned().unwrap_or_default()
    }

    /// Nonzero entries.
    pub fn entries(&self) -> impl Iterator<Item = (&(Partition, Partition), &Scalar)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(r, c)| r == c)
    }

    /// Ordinary matrix product `self · other`.
    pub fn product(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.n, other.n, "matrices on different weights");
        let mut by_row: HashMap<&Partition, Vec<(&Partition, &Scalar)>> = HashMap::new();
        for ((r, c), s) in &other.entries {
            by_row.entry(r).or_default().push((c, s));
        }
        let mut out: BTreeMap<(Partition, Partition), Scalar> = BTreeMap::new();
        for ((r, m), a) in &self.entries {
            if let Some(row) = by_row.get(m) {
                for (c, b) in row {
                    add_entry(&mut out, (r.clone(), (*c).clone()), &(a * b));
                }
            }
        }
        OperatorMatrix { n: self.n, basis: self.basis.clone(), entries: out }
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.entries.clone();
        for (k, s) in &other.entries {
            add_entry(&mut out, k.clone(), s);
        }
        OperatorMatrix { n: self.n, basis: self.basis.clone(), entries: out }
    }

    pub fn sub(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.add(&other.map_scalars(|s| -s))
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> OperatorMatrix {
        let mut out = BTreeMap::new();
        for (k, s) in &self.entries {
            add_entry(&mut out, k.clone(), &f(s));
        }
        OperatorMatrix { n: self.n, basis: self.basis.clone(), entries: out }
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        self.product(other).sub(&other.product(self))
    }

    /// Whether `M[λ,μ] z_μ = conj(M[μ,λ]) z_λ` for all pairs, i.e. self-adjointness for the
    /// Hermitian extension of the Hall product. Real (even-parity) matrices are then symmetric;
    /// purely imaginary (odd-parity) ones are antisymmetric for the bilinear product.
    pub fn is_z_symmetric(&self) -> bool {
        self.entries.iter().all(|((r, c), s)| {
            let lhs = s.scale_int(&c.z_factor());
            let rhs = self.get(c, r).conj().scale_int(&r.z_factor());
            lhs == rhs
        })
    }
}

fn add_entry(map: &mut BTreeMap<(Partition, Partition), Scalar>, key: (Partition, Partition), s: &Scalar) {
    if s.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(v) => {
            *v += s;
            if v.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, s.clone());
        }
    }
}

/// `ḡ` for a density `g`, optionally plus diagonal moment terms `Σ_j j^e p_j ∂/∂p_j`.
pub struct QuantizedOperator {
    source: DiffPoly,
    moments: Vec<(u32, Scalar)>,
    roles: BTreeMap<RoleKey, Scalar>,
    matrices: Mutex<HashMap<u32, Arc<OperatorMatrix>>>,
    kernel: Mutex<HashMap<Partition, Scalar>>,
}

impl Clone for QuantizedOperator {
    fn clone(&self) -> Self {
        QuantizedOperator::with_moments(self.source.clone(), self.moments.clone())
    }
}

impl std::fmt::Debug for QuantizedOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantizedOperator")
            .field("source", &self.source.render())
            .field("moments", &self.moments)
            .finish()
    }
}

/// Quantizes a density.
pub fn quantize(g: &DiffPoly) -> QuantizedOperator {
    QuantizedOperator::with_moments(g.clone(), Vec::new())
}

impl QuantizedOperator {
    /// `ḡ + Σ s_e Σ_j j^e p_j ∂/∂p_j`.
    pub fn with_moments(source: DiffPoly, moments: Vec<(u32, Scalar)>) -> Self {
        let mut roles: BTreeMap<RoleKey, Scalar> = BTreeMap::new();
        for (m, s) in source.terms() {
            for (key, coeff) in role_terms(&m.exponents()) {
                let v = s.scale_gauss(&coeff.0).shift(crate::scalar::ParamKey::new(coeff.1, 0, 0));
                let slot = roles.entry(key.clone()).or_insert_with(|| Scalar::zero().with_trunc(s.trunc()));
                *slot += &v;
                if slot.is_zero() {
                    roles.remove(&key);
                }
            }
        }
        let moments = moments.into_iter().filter(|(_, s)| !s.is_zero()).collect();
        QuantizedOperator {
            source,
            moments,
            roles,
            matrices: Mutex::new(HashMap::new()),
            kernel: Mutex::new(HashMap::new()),
        }
    }

    pub fn source(&self) -> &DiffPoly {
        &self.source
    }

    pub fn moments(&self) -> &[(u32, Scalar)] {
        &self.moments
    }

    /// Sum of two operators (densities and moment parts added).
    pub fn add(&self, other: &QuantizedOperator) -> QuantizedOperator {
        let mut moments = self.moments.clone();
        moments.extend(other.moments.iter().cloned());
        QuantizedOperator::with_moments(self.source.add(&other.source), merge_moments(moments))
    }

    pub fn scale(&self, s: &Scalar) -> QuantizedOperator {
        let moments = self.moments.iter().map(|(e, c)| (*e, c * s)).collect();
        QuantizedOperator::with_moments(self.source.scale(s), moments)
    }

    /// Applies the operator to `p_λ`.
    pub fn apply_monomial(&self, lambda: &Partition) -> LambdaElement {
        let mut out = LambdaElement::zero();
        let moment = self.moment_value(lambda);
        if !moment.is_zero() {
            out.add_term(lambda.clone(), &moment);
        }
        let subs = sub_multisets_by_len(lambda, self.max_annihilators());
        for ((ann, cre), coeff) in &self.roles {
            if ann.is_empty() {
                out.add_term(lambda.clone(), coeff);
                continue;
            }
            let Some(nus) = subs.get(&ann.len()) else { continue };
            for nu in nus {
                let a = arrangement_sum(ann, nu, 1);
                if a.is_zero() {
                    continue;
                }
                let weight = a * falling_factor(lambda, nu);
                let rest = lambda.remove(nu).expect("sub-multiset");
                for kappa in partitions_with_len(nu.size(), cre.len()) {
                    let cv = arrangement_sum(cre, &kappa, 0);
                    if cv.is_zero() {
                        continue;
                    }
                    out.add_term(rest.union(&kappa), &coeff.scale_int(&(&weight * cv)));
                }
            }
        }
        out
    }

    /// Applies the operator to any element of Λ.
    pub fn apply(&self, f: &LambdaElement) -> LambdaElement {
        let mut out = LambdaElement::zero();
        for (lambda, s) in f.terms() {
            out = out.add(&self.apply_monomial(lambda).scale(s));
        }
        out
    }

    /// The matrix on Λ_n, cached per `n`.
    pub fn matrix_on(&self, n: u32) -> Arc<OperatorMatrix> {
        if let Some(m) = self.matrices.lock().expect("matrix cache poisoned").get(&n) {
            return m.clone();
        }
        let mut entries = BTreeMap::new();
        for lambda in partitions_of(n) {
            for (mu, s) in self.apply_monomial(&lambda).terms() {
                add_entry(&mut entries, (lambda.clone(), mu.clone()), s);
            }
        }
        let m = Arc::new(OperatorMatrix::new(n, entries));
        self.matrices.lock().expect("matrix cache poisoned").insert(n, m.clone());
        m
    }

    /// Coefficient of `p_λ` in `op(p_λ)`.
    pub fn diagonal(&self, lambda: &Partition) -> Scalar {
        let mut acc = self.moment_value(lambda);
        for nu in lambda.sub_multisets(self.max_annihilators()) {
            let k = self.kernel(&nu);
            if !k.is_zero() {
                acc += &k.scale_int(&falling_factor(lambda, &nu));
            }
        }
        acc
    }

    /// `tr_{Λ_n}`, summing diagonal coefficients without building the matrix.
    pub fn trace_on(&self, n: u32) -> Scalar {
        let mut acc = Scalar::zero();
        for lambda in partitions_of(n) {
            acc += &self.diagonal(&lambda);
        }
        acc
    }

    /// `Σ q^n tr_{Λ_n} / Σ q^n p(n)` through `q^order`.
    pub fn q_series(&self, order: usize) -> QSeries {
        let traces = parallel_map(0..=order as u32, |n| self.trace_on(n));
        QSeries::new(traces).divide_by_partition_series()
    }

    fn max_annihilators(&self) -> usize {
        self.roles.keys().map(|(a, _)| a.len()).max().unwrap_or(0)
    }

    fn moment_value(&self, lambda: &Partition) -> Scalar {
        let mut acc = Scalar::zero();
        for (e, s) in &self.moments {
            let total: BigInt = lambda.parts().iter().map(|&p| BigInt::from(p).pow(*e)).sum();
            acc += &s.scale_int(&total);
        }
        acc
    }

    /// `K(ν)`: the contribution of annihilating and recreating exactly the parts `ν`.
    fn kernel(&self, nu: &Partition) -> Scalar {
        if let Some(k) = self.kernel.lock().expect("kernel cache poisoned").get(nu) {
            return k.clone();
        }
        let mut acc = Scalar::zero();
        for ((ann, cre), coeff) in &self.roles {
            if ann.len() != nu.len() || cre.len() != nu.len() {
                continue;
            }
            let w = arrangement_sum(ann, nu, 1) * arrangement_sum(cre, nu, 0);
            if !w.is_zero() {
                acc += &coeff.scale_int(&w);
            }
        }
        self.kernel.lock().expect("kernel cache poisoned").insert(nu.clone(), acc.clone());
        acc
    }
}

fn merge_moments(moments: Vec<(u32, Scalar)>) -> Vec<(u32, Scalar)> {
    let mut map: BTreeMap<u32, Scalar> = BTreeMap::new();
    for (e, s) in moments {
        *map.entry(e).or_default() += &s;
    }
    map.into_iter().filter(|(_, s)| !s.is_zero()).collect()
}

/// Role terms of a monomial given as `(index, exponent)` pairs: the key and the pair
/// (unit-and-multiplicity coefficient, number of zero modes).
fn role_terms(exps: &[(u32, u32)]) -> Vec<(RoleKey, (Gauss, u32))> {
    let mut out = Vec::new();
    let mut ann = Vec::new();
    let mut cre = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        exps: &[(u32, u32)],
        idx: usize,
        mult: BigInt,
        zeros: u32,
        i_power: u32,
        sign: bool,
        ann: &mut Vec<u32>,
        cre: &mut Vec<u32>,
        out: &mut Vec<(RoleKey, (Gauss, u32))>,
    ) {
        if idx == exps.len() {
            if ann.is_empty() != cre.is_empty() {
                return;
            }
            let mut a = ann.clone();
            a.sort_unstable();
            let mut c = cre.clone();
            c.sort_unstable();
            let unit = Gauss::i_pow(i_power as i64);
            let unit = if sign { unit.neg() } else { unit };
            out.push(((a, c), (unit.scale(&Rat::from_integer(mult)), zeros)));
            return;
        }
        let (b, e) = exps[idx];
        let max_zero = if b == 0 { e } else { 0 };
        for z in 0..=max_zero {
            for l in 0..=(e - z) {
                let i = e - z - l;
                let m = &mult * factorial(e) / (factorial(i) * factorial(z) * factorial(l));
                ann.extend(std::iter::repeat_n(b, l as usize));
                cre.extend(std::iter::repeat_n(b, i as usize));
                let flip = (b * l) % 2 == 1;
                rec(exps, idx + 1, m, zeros + z, i_power + b * (i + l), sign ^ flip, ann, cre, out);
                ann.truncate(ann.len() - l as usize);
                cre.truncate(cre.len() - i as usize);
            }
        }
    }
    rec(exps, 0, BigInt::one(), 0, 0, false, &mut ann, &mut cre, &mut out);
    out
}

/// `Σ` over distinct orderings `σ` of the parts of `nu` of `Π_j nu_{σ(j)}^{exps_j + shift}`.
fn arrangement_sum(exps: &[u32], nu: &Partition, shift: u32) -> BigInt {
    type Key = (Vec<u32>, Partition, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, BigInt>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (exps.to_vec(), nu.clone(), shift);
    if let Some(v) = cache.lock().expect("arrangement cache poisoned").get(&key) {
        return v.clone();
    }
    let mut counts = nu.multiplicities();
    fn rec(exps: &[u32], shift: u32, counts: &mut [(u32, u32)], slot: usize) -> BigInt {
        if slot == exps.len() {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for i in 0..counts.len() {
            if counts[i].1 == 0 {
                continue;
            }
            let v = counts[i].0;
            counts[i].1 -= 1;
            acc += BigInt::from(v).pow(exps[slot] + shift) * rec(exps, shift, counts, slot + 1);
            counts[i].1 += 1;
        }
        acc
    }
    let v = rec(exps, shift, &mut counts, 0);
    cache.lock().expect("arrangement cache poisoned").insert(key, v.clone());
    v
}

/// `Π_m r_m(λ)! / (r_m(λ) - r_m(ν))!`, the coefficient of `p_{λ∖ν}` in `∂^ν p_λ`.
pub(crate) fn falling_factor(lambda: &Partition, nu: &Partition) -> BigInt {
    let mut acc = BigInt::one();
    for (m, r) in nu.multiplicities() {
        let big = lambda.multiplicity(m);
        for t in 0..r {
            acc *= BigInt::from(big - t);
        }
    }
    acc
}

fn sub_multisets_by_len(lambda: &Partition, max_len: usize) -> HashMap<usize, Vec<Partition>> {
    let mut out: HashMap<usize, Vec<Partition>> = HashMap::new();
    for nu in lambda.sub_multisets(max_len) {
        out.entry(nu.len()).or_default().push(nu);
    }
    out
}

/// Maps `f` over the range on a few threads, preserving order.
pub(crate) fn parallel_map<T: Send>(range: std::ops::RangeInclusive<u32>, f: impl Fn(u32) -> T + Sync) -> Vec<T> {
    let items: Vec<u32> = range.collect();
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    if threads <= 1 {
        return items.into_iter().map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Mutex<Vec<Option<T>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                // largest weights first, they dominate the running time
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let idx = items.len() - 1 - i;
                let v = f(items[idx]);
                results.lock().expect("results poisoned")[idx] = Some(v);
            });
        }
    });
    results.into_inner().expect("results poisoned").into_iter().map(|v| v.expect("computed")).collect()
}

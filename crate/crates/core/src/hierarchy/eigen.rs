//! Perturbative eigenvalues of the quantum KdV Hamiltonians around the dispersionless limit.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lambda::{inner_product, schur};
use crate::numbers::Rat;
use crate::partition::{partitions_of, Partition};
use crate::quantization::{quantize, QuantizedOperator};
use crate::scalar::{ParamKey, Scalar};

use super::recursion::{densities, Mode};

/// `M[λ][μ] = (s_μ, op s_λ)`, split by powers of `eps`.
struct SchurMatrix {
    basis: Vec<Partition>,
    by_eps: Vec<Vec<Vec<Scalar>>>,
}

impl SchurMatrix {
    fn new(op: &QuantizedOperator, n: u32, c: Option<&Rat>) -> Self {
        let basis = partitions_of(n);
        let schurs: Vec<_> = basis.iter().map(schur).collect();
        let mut full = vec![vec![Scalar::zero(); basis.len()]; basis.len()];
        let mut top = 0;
        for (a, s) in schurs.iter().enumerate() {
            let image = op.apply(s);
            for (b, t) in schurs.iter().enumerate() {
                let mut v = inner_product(t, &image);
                if let Some(c) = c {
                    v = v.eval_c(c);
                }
                top = top.max(v.max_eps_degree().unwrap_or(0));
                full[a][b] = v;
            }
        }
        let by_eps = (0..=top)
            .map(|e| full.iter().map(|row| row.iter().map(|x| x.eps_coeff(e)).collect()).collect())
            .collect();
        SchurMatrix { basis, by_eps }
    }

    fn part(&self, e: usize) -> Option<&Vec<Vec<Scalar>>> {
        self.by_eps.get(e)
    }

    /// `(M_e v)_target = Σ_μ M_e[μ][target] v_μ`.
    fn apply_at(&self, e: usize, v: &[Scalar], target: usize) -> Scalar {
        let Some(m) = self.part(e) else { return Scalar::zero() };
        let mut acc = Scalar::zero();
        for (mu, x) in v.iter().enumerate() {
            if !x.is_zero() && !m[mu][target].is_zero() {
                acc += &(&m[mu][target] * x);
            }
        }
        acc
    }

    fn unperturbed(&self, idx: usize) -> Scalar {
        self.by_eps[0][idx][idx].clone()
    }
}

fn quantized_density(k: i32, table: &super::DensityTable) -> QuantizedOperator {
    quantize(table.get(k).expect("density computed"))
}

/// The first pair of partitions whose dispersionless eigenvalues are not separated by a
/// nonzero rational gap, if any.
fn unseparated_pair(m: &SchurMatrix) -> Option<(Partition, Partition)> {
    let len = m.basis.len();
    for a in 0..len {
        for b in a + 1..len {
            let diff = &m.unperturbed(b) - &m.unperturbed(a);
            if !diff.as_rat().is_some_and(|r| !r.is_zero()) {
                return Some((m.basis[a].clone(), m.basis[b].clone()));
            }
        }
    }
    None
}

/// Eigenvalues of `G_k^KdV(eps)` on `Λ_n` as `eps`-polynomials truncated above `eps^order`,
/// labelled by the Schur function they deform. `c` is formal unless a value is supplied.
///
/// The eigenvectors are expanded in `eps` starting from the Schur basis, using an operator of the
/// commuting family `G_1, …, G_{n+1}` whose dispersionless spectrum on `Λ_n` is simple with
/// rational gaps.
pub fn perturbative_eigenvalues(k: i32, n: u32, order: u32, c: Option<&Rat>) -> Result<BTreeMap<Partition, Scalar>> {
    if k < -2 {
        return Err(Error::InvalidInput(format!("k must be at least -2, got {k}")));
    }
    let top_family = (n as i32 + 1).max(1);
    let table = densities(Mode::Kdv, top_family.max(k))?;
    let target = SchurMatrix::new(&quantized_density(k, &table), n, c);
    let basis = target.basis.clone();
    let len = basis.len();

    let mut sep = None;
    let mut failure = None;
    for j in 1..=top_family {
        let m = SchurMatrix::new(&quantized_density(j, &table), n, c);
        match unseparated_pair(&m) {
            None => {
                sep = Some(m);
                break;
            }
            Some(pair) => {
                failure.get_or_insert(pair);
            }
        }
    }
    let Some(sep) = sep else {
        let (first, second) = failure.unwrap_or_default();
        return Err(Error::DegenerateSpectrum { first: first.to_string(), second: second.to_string() });
    };

    let mut out = BTreeMap::new();
    for (lam, label) in basis.iter().enumerate() {
        // v = Σ eps^m v_m with v_0 = s_λ and (v_m)_λ = 0 for m ≥ 1
        let mut vs: Vec<Vec<Scalar>> = Vec::with_capacity(order as usize + 1);
        let mut v0 = vec![Scalar::zero(); len];
        v0[lam] = Scalar::one();
        vs.push(v0);
        let mut sep_eigen: Vec<Scalar> = vec![sep.unperturbed(lam)];
        for m in 1..=order as usize {
            let e_m: Scalar = (1..=m).fold(Scalar::zero(), |acc, a| &acc + &sep.apply_at(a, &vs[m - a], lam));
            let mut vm = vec![Scalar::zero(); len];
            for (mu, slot) in vm.iter_mut().enumerate() {
                if mu == lam {
                    continue;
                }
                let mut rhs = Scalar::zero();
                for b in 1..m {
                    rhs += &(&sep_eigen[b] * &vs[m - b][mu]);
                }
                for a in 1..=m {
                    rhs -= &sep.apply_at(a, &vs[m - a], mu);
                }
                let gap = (&sep.unperturbed(mu) - &sep.unperturbed(lam)).as_rat().expect("separator gaps are rational");
                *slot = rhs.scale(&(Rat::one() / gap));
            }
            sep_eigen.push(e_m);
            vs.push(vm);
        }
        let mut value = Scalar::zero();
        for m in 0..=order as usize {
            let coeff = (0..=m).fold(Scalar::zero(), |acc, a| &acc + &target.apply_at(a, &vs[m - a], lam));
            value += &coeff.shift(ParamKey::new(0, m as u32, 0));
        }
        out.insert(label.clone(), value);
    }
    Ok(out)
}

/// Sum of the truncated eigenvalues over `λ ⊢ n`.
pub fn eigenvalue_sum(values: &BTreeMap<Partition, Scalar>) -> Scalar {
    values.values().fold(Scalar::zero(), |acc, v| &acc + v)
}

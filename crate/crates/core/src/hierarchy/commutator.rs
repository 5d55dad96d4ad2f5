//! A density whose quantization is `i [f̄, ḡ]`.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::diffpoly::DiffPoly;
use crate::numbers::{factorial, Rat};

use super::ppoly::p_polynomial;

/// Indices `i` with `u_i` present in `f`.
pub(crate) fn variables(f: &DiffPoly) -> Vec<u32> {
    let set: BTreeSet<u32> = f.terms().flat_map(|(m, _)| m.indices().to_vec()).collect();
    set.into_iter().collect()
}

/// `Σ_{n≥1} ((-1)^{n-1}/n!) Σ_{r,s} ∂ⁿf/∂u_s (-1)^{|r|} P_{r+s+1}(∂x) ∂ⁿg/∂u_r`.
///
/// The summand is invariant under permuting the pairs `(r_i, s_i)` together, so the sum runs
/// over multisets of pairs weighted by the number of orderings.
pub fn commutator_bracket(f: &DiffPoly, g: &DiffPoly) -> DiffPoly {
    let nmax = f.u_degree().min(g.u_degree());
    let fv = variables(f);
    let gv = variables(g);
    let pairs: Vec<(u32, u32)> = gv.iter().flat_map(|&r| fv.iter().map(move |&s| (r, s))).collect();
    let mut acc = DiffPoly::zero();
    for n in 1..=nmax {
        let mut chosen: Vec<usize> = Vec::new();
        multisets(pairs.len(), n, 0, &mut chosen, &mut |combo| {
            let rs: Vec<u32> = combo.iter().map(|&i| pairs[i].0).collect();
            let ss: Vec<u32> = combo.iter().map(|&i| pairs[i].1).collect();
            let df = f.d_du_multi(&ss);
            if df.is_zero() {
                return;
            }
            let dg = g.d_du_multi(&rs);
            if dg.is_zero() {
                return;
            }
            let ell: Vec<u32> = rs.iter().zip(&ss).map(|(r, s)| r + s + 1).collect();
            let applied = p_polynomial(&ell).apply(&dg);
            if applied.is_zero() {
                return;
            }
            // orderings of the multiset divided by n!
            let mut denom = BigInt::from(1);
            let mut i = 0;
            while i < combo.len() {
                let mut j = i;
                while j < combo.len() && combo[j] == combo[i] {
                    j += 1;
                }
                denom *= factorial((j - i) as u32);
                i = j;
            }
            let r_total: u32 = rs.iter().sum();
            let negative = (n - 1 + r_total as usize) % 2 == 1;
            let mut w = Rat::new(BigInt::from(1), denom);
            if negative {
                w = -w;
            }
            acc = acc.add(&df.mul(&applied).scale_rat(&w));
        });
    }
    acc
}

/// Calls `f` on every non-decreasing sequence of `len` indices below `n`.
fn multisets(n: usize, len: usize, start: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if chosen.len() == len {
        f(chosen);
        return;
    }
    for i in start..n {
        chosen.push(i);
        multisets(n, len, i, chosen, f);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;
    use crate::scalar::Scalar;

    #[test]
    fn constant_gives_zero() {
        let g = DiffPoly::u(0).pow(3);
        assert!(commutator_bracket(&DiffPoly::constant(Scalar::from_int(5)), &g).is_zero());
    }

    #[test]
    fn linear_case() {
        // [u0, (u0²/2)‾]: n = 1, r = s = 0, P_1(∂x) u0 = u1
        let g = DiffPoly::u(0).pow(2).scale_rat(&rat(1, 2));
        assert_eq!(commutator_bracket(&DiffPoly::u(0), &g), DiffPoly::u(1));
    }
}

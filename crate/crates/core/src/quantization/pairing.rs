//! The closed pairing formula for the q-series of a quantized monomial.

use crate::diffpoly::DiffPoly;
use crate::numbers::{bernoulli, int};
use crate::quasimodular::QMPoly;
use crate::scalar::{Gauss, Scalar};

/// `{ū_a}_q` (or `{(𝓑 u_a)‾}_q` when `reduced`) as a polynomial in Eisenstein series.
///
/// Sums over partial pairings of the slots whose unpaired slots all carry index 0; each unpaired
/// slot contributes `c`, each pair `A` contributes `s(a,A) (B_k/(2k) + 𝔾_k)` with `k = a_A + 2`
/// and `s(a,A) = i^{a_A} Σ_{i∈A} (-1)^{a_i}`. The reduced form drops the Bernoulli constant.
pub fn pairing_qseries(a: &[u32], reduced: bool) -> QMPoly {
    let mut used = vec![false; a.len()];
    rec(a, reduced, &mut used)
}

fn rec(a: &[u32], reduced: bool, used: &mut [bool]) -> QMPoly {
    let Some(first) = used.iter().position(|u| !u) else {
        return QMPoly::one();
    };
    used[first] = true;
    let mut acc = QMPoly::zero();
    if a[first] == 0 {
        acc = acc.add(&rec(a, reduced, used).scale(&Scalar::c()));
    }
    for j in first + 1..a.len() {
        if used[j] {
            continue;
        }
        let sum = a[first] + a[j];
        if sum % 2 == 1 {
            continue;
        }
        used[j] = true;
        let k = sum + 2;
        let sign_sum = parity_sign(a[first]) + parity_sign(a[j]);
        if sign_sum != 0 {
            let s = Gauss::i_pow(sum as i64).scale(&int(sign_sum));
            let mut factor = QMPoly::eisenstein(k);
            if !reduced {
                factor = factor.add(&QMPoly::constant(Scalar::from_rat(bernoulli(k) / int(2 * k as i64))));
            }
            let rest = rec(a, reduced, used);
            acc = acc.add(&factor.mul(&rest).scale(&Scalar::from_gauss(s)));
        }
        used[j] = false;
    }
    used[first] = false;
    acc
}

fn parity_sign(x: u32) -> i64 {
    if x.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Linear extension of [`pairing_qseries`] to a density.
pub fn pairing_qseries_poly(g: &DiffPoly, reduced: bool) -> QMPoly {
    let mut acc = QMPoly::zero();
    for (m, s) in g.terms() {
        acc = acc.add(&pairing_qseries(m.indices(), reduced).scale(s));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn examples() {
        let g2 = QMPoly::eisenstein(2);
        let c2 = QMPoly::constant(Scalar::c().pow(2));
        assert_eq!(pairing_qseries(&[0, 0], true), c2.add(&g2.scale_rat(&rat(2, 1))));
        assert_eq!(
            pairing_qseries(&[0, 0], false),
            c2.add(&g2.scale_rat(&rat(2, 1))).add(&QMPoly::constant(Scalar::from_rat(rat(1, 12))))
        );
        assert!(pairing_qseries(&[1], false).is_zero());
        assert_eq!(pairing_qseries(&[0], false), QMPoly::constant(Scalar::c()));
        for k in (4..=12u32).step_by(2) {
            let sign = if ((k - 2) / 2) % 2 == 0 { 2 } else { -2 };
            assert_eq!(pairing_qseries(&[0, k - 2], true), QMPoly::eisenstein(k).scale_rat(&rat(sign, 1)), "k = {k}");
        }
    }

    #[test]
    fn trace_path_agrees_on_small_monomials() {
        use crate::diffpoly::DiffMonomial;
        use crate::quantization::quantize;
        for idx in [vec![0, 0, 0], vec![0, 2], vec![1, 1], vec![0, 1, 1], vec![0, 0, 2], vec![1, 3], vec![0, 0, 0, 0]] {
            let m = DiffMonomial::new(idx.clone());
            let g = DiffPoly::term(m.clone(), Scalar::one());
            let trace = quantize(&g).q_series(12);
            assert_eq!(trace, pairing_qseries(&idx, false).to_series(12), "{idx:?}");
            let reduced = quantize(&g.b_operator(false)).q_series(12);
            assert_eq!(reduced, pairing_qseries(&idx, true).to_series(12), "reduced {idx:?}");
        }
    }
}

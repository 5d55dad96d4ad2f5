//! Recognition of a q-series as a polynomial in `𝔾2, 𝔾4, 𝔾6`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{SolveError, System};
use crate::numbers::Rat;
use crate::scalar::{Gauss, ParamKey, Scalar};

use super::qmpoly::{monomial_series, monomials_up_to_weight, GMono, QMPoly};
use super::series::QSeries;

/// Safety margin of extra q-orders beyond the number of unknowns.
pub const ORDER_MARGIN: usize = 5;

/// Minimal truncation order needed by [`recognize`] at the given weight bound.
pub fn required_order(max_weight: i64) -> usize {
    monomials_up_to_weight(max_weight).len() + ORDER_MARGIN
}

/// Finds the unique `f` of total weight at most `max_weight` whose expansion equals `s`
/// through `q^N`.
///
/// Each `(c, eps, mu)` component is solved separately against the monomials of admissible
/// weight; the solve uses every available order, so a match is checked and not merely fitted.
pub fn recognize(s: &QSeries, max_weight: i64) -> Result<QMPoly> {
    let need = required_order(max_weight);
    if s.order() < need {
        return Err(Error::InsufficientOrder { need, have: s.order() });
    }
    let trunc = s.coeffs().iter().filter_map(Scalar::trunc).min();
    let keys: BTreeSet<ParamKey> = s.coeffs().iter().flat_map(|c| c.terms().map(|(k, _)| *k)).collect();
    let mut systems: HashMap<i64, (Vec<GMono>, System)> = HashMap::new();
    let mut series_cache = HashMap::new();
    let mut out: BTreeMap<GMono, Scalar> = BTreeMap::new();
    for key in keys {
        let re: Vec<Rat> = s.coeffs().iter().map(|c| c.coeff(&key).re).collect();
        let im: Vec<Rat> = s.coeffs().iter().map(|c| c.coeff(&key).im).collect();
        let bound = max_weight - key.weight();
        let detail = || format!("component {}", Scalar::monomial(key, Gauss::one()).render());
        if bound < 0 {
            return Err(Error::NotRecognized { max_weight, detail: format!("{}: weight bound is negative", detail()) });
        }
        let (basis, system) = systems.entry(bound).or_insert_with(|| {
            let basis = monomials_up_to_weight(bound);
            let cols: Vec<QSeries> =
                basis.iter().map(|m| monomial_series(*m, s.order(), &mut series_cache)).collect();
            let rows = (0..=s.order())
                .map(|n| cols.iter().map(|c| c.coeff(n).as_rat().expect("rational expansion")).collect())
                .collect();
            let sys = System::from_rows(rows, basis.len());
            (basis, sys)
        });
        let mut rhs = Vec::new();
        let parts: Vec<bool> = [&re, &im].iter().map(|v| v.iter().any(|x| !x.is_zero())).collect();
        if parts[0] {
            rhs.push(re.clone());
        }
        if parts[1] {
            rhs.push(im.clone());
        }
        let sol = system.solve_unique(&rhs).map_err(|e| match e {
            SolveError::Inconsistent => Error::NotRecognized { max_weight, detail: detail() },
            SolveError::RankDeficient { .. } => Error::InsufficientOrder { need: basis.len() + ORDER_MARGIN, have: s.order() },
        })?;
        let mut it = sol.into_iter();
        let re_sol = if parts[0] { it.next() } else { None };
        let im_sol = if parts[1] { it.next() } else { None };
        for (idx, m) in basis.iter().enumerate() {
            let g = Gauss::new(
                re_sol.as_ref().map(|v| v[idx].clone()).unwrap_or_else(Rat::zero),
                im_sol.as_ref().map(|v| v[idx].clone()).unwrap_or_else(Rat::zero),
            );
            if !g.is_zero() {
                let slot = out.entry(*m).or_insert_with(|| Scalar::zero().with_trunc(trunc));
                slot.add_term(key, &g);
            }
        }
    }
    let mut p = QMPoly::zero();
    for (m, sc) in out {
        p.add_term(m, &sc);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    fn g(k: u32) -> QMPoly {
        QMPoly::eisenstein(k)
    }

    #[test]
    fn recognizes_examples() {
        let c2 = Scalar::c().pow(2).scale(&rat(1, 2));
        let f = g(2).add(&QMPoly::constant(c2));
        assert_eq!(recognize(&f.to_series(20), 2).unwrap(), f);
        assert!(recognize(&QSeries::zero(20), 4).unwrap().is_zero());
        let f1 = g(2)
            .scale(&Scalar::c())
            .add(&QMPoly::constant(Scalar::c().pow(3).scale(&rat(1, 6))))
            .sub(&g(4).scale(&Scalar::eps()).scale_rat(&rat(1, 12)));
        assert_eq!(recognize(&f1.to_series(20), 3).unwrap(), f1);
    }

    #[test]
    fn rejects_low_order_and_non_modular() {
        assert!(matches!(recognize(&g(2).to_series(4), 2), Err(Error::InsufficientOrder { .. })));
        // q alone is not quasimodular of weight <= 2
        let mut v = vec![Rat::zero(); 21];
        v[1] = rat(1, 1);
        assert!(matches!(recognize(&QSeries::from_rats(v), 2), Err(Error::NotRecognized { .. })));
    }

    #[test]
    fn imaginary_components() {
        let f = g(4).scale(&Scalar::i()).add(&g(2).mul(&g(2)));
        assert_eq!(recognize(&f.to_series(20), 4).unwrap(), f);
    }
}

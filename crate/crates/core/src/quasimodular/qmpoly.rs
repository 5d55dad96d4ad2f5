//! Polynomials in the Eisenstein series `𝔾2, 𝔾4, 𝔾6` with [`Scalar`] coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::linalg::System;
use crate::numbers::Rat;
use crate::render;
use crate::scalar::{Gauss, Scalar};

use super::series::{eisenstein, QSeries};

/// Exponents of `𝔾2, 𝔾4, 𝔾6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GMono {
    pub g2: u32,
    pub g4: u32,
    pub g6: u32,
}

impl GMono {
    pub const ONE: GMono = GMono { g2: 0, g4: 0, g6: 0 };

    pub fn new(g2: u32, g4: u32, g6: u32) -> Self {
        GMono { g2, g4, g6 }
    }

    pub fn weight(&self) -> i64 {
        2 * self.g2 as i64 + 4 * self.g4 as i64 + 6 * self.g6 as i64
    }

    pub fn times(&self, o: &GMono) -> GMono {
        GMono::new(self.g2 + o.g2, self.g4 + o.g4, self.g6 + o.g6)
    }

    pub fn symbol(&self) -> String {
        [("G2", self.g2), ("G4", self.g4), ("G6", self.g6)]
            .into_iter()
            .filter(|(_, e)| *e > 0)
            .map(|(n, e)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All monomials of weight at most `w`, ordered by weight and then exponents.
pub fn monomials_up_to_weight(w: i64) -> Vec<GMono> {
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    let w = w as u32;
    for c in 0..=w / 6 {
        for b in 0..=(w - 6 * c) / 4 {
            for a in 0..=(w - 6 * c - 4 * b) / 2 {
                out.push(GMono::new(a, b, c));
            }
        }
    }
    out.sort_by_key(|m| (m.weight(), std::cmp::Reverse(*m)));
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QMPoly {
    terms: BTreeMap<GMono, Scalar>,
}

impl QMPoly {
    pub fn zero() -> Self {
        QMPoly::default()
    }

    pub fn constant(s: Scalar) -> Self {
        QMPoly::term(GMono::ONE, s)
    }

    pub fn one() -> Self {
        QMPoly::constant(Scalar::one())
    }

    pub fn term(m: GMono, s: Scalar) -> Self {
        let mut p = QMPoly::zero();
        p.add_term(m, &s);
        p
    }

    pub fn monomial(m: GMono) -> Self {
        QMPoly::term(m, Scalar::one())
    }

    /// `𝔾_k` for any even `k ≥ 2`, expressed in the generators.
    pub fn eisenstein(k: u32) -> QMPoly {
        match k {
            2 => QMPoly::monomial(GMono::new(1, 0, 0)),
            4 => QMPoly::monomial(GMono::new(0, 1, 0)),
            6 => QMPoly::monomial(GMono::new(0, 0, 1)),
            _ => (*modular_eisenstein(k)).clone(),
        }
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

    pub fn terms(&self) -> impl Iterator<Item = (&GMono, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &GMono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: GMono, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += s;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, s.clone());
            }
        }
    }

    pub fn add(&self, o: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, s) in &o.terms {
            out.add_term(*m, s);
        }
        out
    }

    pub fn sub(&self, o: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, s) in &o.terms {
            out.add_term(*m, &-s);
        }
        out
    }

    pub fn mul(&self, o: &QMPoly) -> QMPoly {
        let mut out = QMPoly::zero();
        for (ma, sa) in &self.terms {
            for (mb, sb) in &o.terms {
                out.add_term(ma.times(mb), &(sa * sb));
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> QMPoly {
        self.map_scalars(|c| c * s)
    }

    pub fn scale_rat(&self, r: &Rat) -> QMPoly {
        self.map_scalars(|c| c.scale(r))
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> QMPoly {
        let mut out = QMPoly::zero();
        for (m, s) in &self.terms {
            out.add_term(*m, &f(s));
        }
        out
    }

    /// `∂/∂c` applied to the coefficients.
    pub fn d_dc(&self) -> QMPoly {
        self.map_scalars(Scalar::d_dc)
    }

    /// Splits by total weight (`𝔾_k`: k, `c`: +1, `eps`/`mu`: -1).
    pub fn weight_split(&self) -> BTreeMap<i64, QMPoly> {
        let mut out: BTreeMap<i64, QMPoly> = BTreeMap::new();
        for (m, s) in &self.terms {
            for (k, g) in s.terms() {
                out.entry(m.weight() + k.weight())
                    .or_default()
                    .add_term(*m, &Scalar::monomial(*k, g.clone()).with_trunc(s.trunc()));
            }
        }
        out
    }

    /// Whether all terms have weight `w` (the zero polynomial is homogeneous of every weight).
    pub fn is_homogeneous(&self, w: i64) -> bool {
        self.weight_split().keys().all(|&x| x == w)
    }

    pub fn weights(&self) -> Vec<i64> {
        self.weight_split().keys().copied().collect()
    }

    /// The derivation with `𝔡𝔾2 = -1/2` and `𝔡𝔾4 = 𝔡𝔾6 = 0`.
    pub fn frak_d(&self) -> QMPoly {
        let mut out = QMPoly::zero();
        for (m, s) in &self.terms {
            if m.g2 > 0 {
                let lowered = GMono::new(m.g2 - 1, m.g4, m.g6);
                out.add_term(lowered, &s.scale(&Rat::new(-BigInt::from(m.g2), BigInt::from(2))));
            }
        }
        out
    }

    /// Substitutes the q-expansions of the generators up to `q^order`.
    pub fn to_series(&self, order: usize) -> QSeries {
        let mut acc = QSeries::zero(order);
        let mut cache: HashMap<GMono, QSeries> = HashMap::new();
        for (m, s) in &self.terms {
            let ser = monomial_series(*m, order, &mut cache);
            acc = acc.add(&ser.scale(s));
        }
        acc
    }

    /// Rendering with `eps` gathered as `(eps/24)^j`, as in `c G2 + c^3/6 - (eps/24) 2 G4`.
    pub fn render_grouped(&self) -> String {
        let max = self.terms.values().filter_map(Scalar::max_eps_degree).max().unwrap_or(0);
        let mut parts = Vec::new();
        for j in 0..=max {
            let scale = Rat::from_integer(BigInt::from(24).pow(j));
            let mut items = Vec::new();
            for (m, s) in self.sorted_terms() {
                let part = s.eps_coeff(j).scale(&scale);
                for (k, g) in part.terms().collect::<Vec<_>>().into_iter().rev() {
                    let sym = [render::param_symbol(k), m.symbol()]
                        .into_iter()
                        .filter(|x| !x.is_empty())
                        .collect::<Vec<_>>()
                        .join(" ");
                    items.push((g.clone(), sym));
                }
            }
            if !items.is_empty() {
                parts.push((j, render::sum(&items)));
            }
        }
        render::eps_grouped(&parts)
    }

    /// Plain rendering.
    pub fn render(&self) -> String {
        let mut items: Vec<(Gauss, String)> = Vec::new();
        for (m, s) in self.sorted_terms() {
            for (k, g) in s.terms().collect::<Vec<_>>().into_iter().rev() {
                let sym = [render::param_symbol(k), m.symbol()]
                    .into_iter()
                    .filter(|x| !x.is_empty())
                    .collect::<Vec<_>>()
                    .join(" ");
                items.push((g.clone(), sym));
            }
        }
        render::sum(&items)
    }

    /// Terms by decreasing 𝔾-weight, then decreasing `𝔾2` exponent.
    fn sorted_terms(&self) -> Vec<(&GMono, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.weight().cmp(&a.0.weight()).then_with(|| b.0.cmp(a.0)));
        v
    }
}

impl fmt::Display for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub(crate) fn monomial_series(m: GMono, order: usize, cache: &mut HashMap<GMono, QSeries>) -> QSeries {
    if let Some(s) = cache.get(&m) {
        return s.clone();
    }
    let s = if m == GMono::ONE {
        QSeries::one(order)
    } else if m.g6 > 0 {
        monomial_series(GMono::new(m.g2, m.g4, m.g6 - 1), order, cache).mul(&eisenstein(6, order))
    } else if m.g4 > 0 {
        monomial_series(GMono::new(m.g2, m.g4 - 1, m.g6), order, cache).mul(&eisenstein(4, order))
    } else {
        monomial_series(GMono::new(m.g2 - 1, m.g4, m.g6), order, cache).mul(&eisenstein(2, order))
    };
    cache.insert(m, s.clone());
    s
}

/// `𝔾_k` for even `k ≥ 8` as a polynomial in `𝔾4, 𝔾6`, found by matching q-expansions.
fn modular_eisenstein(k: u32) -> Arc<QMPoly> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<QMPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("eisenstein cache poisoned").get(&k) {
        return p.clone();
    }
    assert!(k >= 8 && k.is_multiple_of(2), "Eisenstein series need even weight");
    let basis: Vec<GMono> = monomials_up_to_weight(k as i64)
        .into_iter()
        .filter(|m| m.g2 == 0 && m.weight() == k as i64)
        .collect();
    let order = basis.len() + 5;
    let mut series_cache = HashMap::new();
    let cols: Vec<QSeries> = basis.iter().map(|m| monomial_series(*m, order, &mut series_cache)).collect();
    let rows: Vec<Vec<Rat>> = (0..=order)
        .map(|n| cols.iter().map(|s| s.coeff(n).as_rat().expect("rational expansion")).collect())
        .collect();
    let target = eisenstein(k, order);
    let rhs: Vec<Rat> = (0..=order).map(|n| target.coeff(n).as_rat().expect("rational expansion")).collect();
    let sol = System::from_rows(rows, basis.len())
        .solve_unique(&[rhs])
        .expect("Eisenstein series lie in the span of G4^a G6^b");
    let mut p = QMPoly::zero();
    for (m, x) in basis.iter().zip(&sol[0]) {
        if !x.is_zero() {
            p.add_term(*m, &Scalar::from_rat(x.clone()));
        }
    }
    let p = Arc::new(p);
    cache.lock().expect("eisenstein cache poisoned").insert(k, p.clone());
    p
}

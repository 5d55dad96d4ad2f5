//! Coefficient ring: Gaussian-rational polynomials in the parameters `c`, `eps`, `mu`,
//! optionally reduced modulo the ideal `(eps*mu)^G`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numbers::Rat;
use crate::render;

/// A Gaussian rational `re + i*im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gauss {
    pub re: Rat,
    pub im: Rat,
}

impl Gauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gauss { re, im }
    }

    pub fn zero() -> Self {
        Gauss::new(Rat::zero(), Rat::zero())
    }

    pub fn one() -> Self {
        Gauss::from_rat(Rat::one())
    }

    pub fn from_rat(re: Rat) -> Self {
        Gauss::new(re, Rat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Gauss::from_int(1),
            1 => Gauss::new(Rat::zero(), Rat::one()),
            2 => Gauss::from_int(-1),
            _ => Gauss::new(Rat::zero(), -Rat::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, r: &Rat) -> Gauss {
        Gauss::new(&self.re * r, &self.im * r)
    }

    pub fn mul(&self, o: &Gauss) -> Gauss {
        Gauss::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn add_assign(&mut self, o: &Gauss) {
        self.re += &o.re;
        self.im += &o.im;
    }

    pub fn sub_assign(&mut self, o: &Gauss) {
        self.re -= &o.re;
        self.im -= &o.im;
    }

    pub fn neg(&self) -> Gauss {
        Gauss::new(-&self.re, -&self.im)
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Gauss {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        Gauss::new(&self.re / &n, -&self.im / &n)
    }
}

/// Exponents of `c`, `eps`, `mu` in a parameter monomial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamKey {
    pub c: u32,
    pub eps: u32,
    pub mu: u32,
}

impl ParamKey {
    pub const ONE: ParamKey = ParamKey { c: 0, eps: 0, mu: 0 };

    pub fn new(c: u32, eps: u32, mu: u32) -> Self {
        ParamKey { c, eps, mu }
    }

    /// Grading weight: `c` counts +1, `eps` and `mu` count -1.
    pub fn weight(&self) -> i64 {
        self.c as i64 - self.eps as i64 - self.mu as i64
    }

    /// Total degree in `eps` and `mu`, the eigenvalue of `eps d/deps + mu d/dmu`.
    pub fn eps_mu_degree(&self) -> u32 {
        self.eps + self.mu
    }

    fn times(&self, o: &ParamKey) -> ParamKey {
        ParamKey::new(self.c + o.c, self.eps + o.eps, self.mu + o.mu)
    }

    fn survives(&self, trunc: Option<u32>) -> bool {
        match trunc {
            Some(g) => self.eps.min(self.mu) < g,
            None => true,
        }
    }
}

/// Sparse polynomial in `c`, `eps`, `mu` with Gaussian-rational coefficients.
///
/// When `trunc` is `Some(G)`, every stored key satisfies `min(eps, mu) < G`; arithmetic
/// between scalars with different truncations uses the stronger one.
#[derive(Clone, Debug, Default)]
pub struct Scalar {
    terms: BTreeMap<ParamKey, Gauss>,
    trunc: Option<u32>,
}

fn meet(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::monomial(ParamKey::ONE, Gauss::from_rat(r))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn from_gauss(g: Gauss) -> Self {
        Scalar::monomial(ParamKey::ONE, g)
    }

    pub fn monomial(key: ParamKey, g: Gauss) -> Self {
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(key, g);
        }
        Scalar { terms, trunc: None }
    }

    pub fn c() -> Self {
        Scalar::monomial(ParamKey::new(1, 0, 0), Gauss::one())
    }

    pub fn eps() -> Self {
        Scalar::monomial(ParamKey::new(0, 1, 0), Gauss::one())
    }

    pub fn mu() -> Self {
        Scalar::monomial(ParamKey::new(0, 0, 1), Gauss::one())
    }

    pub fn i() -> Self {
        Scalar::from_gauss(Gauss::i_pow(1))
    }

    /// Imposes the truncation `(eps*mu)^g`, dropping terms that fall in the ideal.
    pub fn with_trunc(mut self, g: Option<u32>) -> Self {
        self.trunc = meet(self.trunc, g);
        let t = self.trunc;
        self.terms.retain(|k, _| k.survives(t));
        self
    }

    pub fn trunc(&self) -> Option<u32> {
        self.trunc
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

    pub fn terms(&self) -> impl Iterator<Item = (&ParamKey, &Gauss)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &ParamKey) -> Gauss {
        self.terms.get(key).cloned().unwrap_or_else(Gauss::zero)
    }

    /// The rational constant, when the scalar is one.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (k, g) = self.terms.iter().next()?;
                (*k == ParamKey::ONE && g.im.is_zero()).then(|| g.re.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, key: ParamKey, g: &Gauss) {
        if g.is_zero() || !key.survives(self.trunc) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                v.add_assign(g);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, g.clone());
            }
        }
    }

    pub fn scale(&self, r: &Rat) -> Scalar {
        if r.is_zero() {
            return Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        }
        Scalar {
            terms: self.terms.iter().map(|(k, g)| (*k, g.scale(r))).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Scalar {
        self.scale(&Rat::from_integer(n.clone()))
    }

    pub fn scale_gauss(&self, z: &Gauss) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, g) in &self.terms {
            out.add_term(*k, &g.mul(z));
        }
        out
    }

    /// `self += r * other`.
    pub fn add_scaled(&mut self, other: &Scalar, r: &Rat) {
        self.trunc = meet(self.trunc, other.trunc);
        if self.trunc.is_some() {
            let t = self.trunc;
            self.terms.retain(|k, _| k.survives(t));
        }
        for (k, g) in &other.terms {
            self.add_term(*k, &g.scale(r));
        }
    }

    /// Multiplies by a parameter monomial.
    pub fn shift(&self, key: ParamKey) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, g) in &self.terms {
            out.add_term(k.times(&key), g);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one().with_trunc(self.trunc);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|g| g.im.is_zero())
    }

    pub fn is_imaginary(&self) -> bool {
        self.terms.values().all(|g| g.re.is_zero())
    }

    pub fn real_part(&self) -> Scalar {
        self.map_coeffs(|g| Gauss::from_rat(g.re.clone()))
    }

    pub fn imag_part(&self) -> Scalar {
        self.map_coeffs(|g| Gauss::from_rat(g.im.clone()))
    }

    /// Complex conjugate (the parameters are real).
    pub fn conj(&self) -> Scalar {
        self.map_coeffs(|g| Gauss::new(g.re.clone(), -&g.im))
    }

    fn map_coeffs(&self, f: impl Fn(&Gauss) -> Gauss) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, g) in &self.terms {
            out.add_term(*k, &f(g));
        }
        out
    }

    /// Re-keys every term, merging collisions; the closure may drop a term by returning `None`.
    pub fn map_keys(&self, f: impl Fn(&ParamKey) -> Option<(ParamKey, Rat)>) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, g) in &self.terms {
            if let Some((nk, r)) = f(k) {
                out.add_term(nk, &g.scale(&r));
            }
        }
        out
    }

    /// Substitutes a rational value for `c`.
    pub fn eval_c(&self, value: &Rat) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, g) in &self.terms {
            let p = num_traits::pow(value.clone(), k.c as usize);
            out.add_term(ParamKey::new(0, k.eps, k.mu), &g.scale(&p));
        }
        out
    }

    /// Partial derivative with respect to `c`.
    pub fn d_dc(&self) -> Scalar {
        self.map_keys(|k| (k.c > 0).then(|| (ParamKey::new(k.c - 1, k.eps, k.mu), Rat::from_integer(BigInt::from(k.c)))))
    }

    /// Coefficient of `eps^j`, as a scalar free of `eps`.
    pub fn eps_coeff(&self, j: u32) -> Scalar {
        self.map_keys(|k| (k.eps == j).then(|| (ParamKey::new(k.c, 0, k.mu), Rat::one())))
    }

    /// Coefficient of `c^j`, as a scalar free of `c`.
    pub fn c_coeff(&self, j: u32) -> Scalar {
        self.map_keys(|k| (k.c == j).then(|| (ParamKey::new(0, k.eps, k.mu), Rat::one())))
    }

    pub fn set_mu_zero(&self) -> Scalar {
        self.map_keys(|k| (k.mu == 0).then(|| (*k, Rat::one())))
    }

    pub fn set_eps_zero(&self) -> Scalar {
        self.map_keys(|k| (k.eps == 0).then(|| (*k, Rat::one())))
    }

    /// Keeps only terms of `eps`-degree at most `d`.
    pub fn truncate_eps_degree(&self, d: u32) -> Scalar {
        self.map_keys(|k| (k.eps <= d).then(|| (*k, Rat::one())))
    }

    pub fn max_eps_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.eps).max()
    }

    pub fn max_c_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.c).max()
    }

    /// Applies `eps d/deps + mu d/dmu`.
    pub fn d_operator(&self) -> Scalar {
        self.map_keys(|k| {
            let d = k.eps_mu_degree();
            (d > 0).then(|| (*k, Rat::from_integer(BigInt::from(d))))
        })
    }

    /// Weight of each term (`c` +1, `eps`/`mu` -1); the set of distinct values.
    pub fn weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.terms.keys().map(|k| k.weight()).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn render(&self) -> String {
        let items: Vec<(Gauss, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(k, g)| (g.clone(), render::param_symbol(k)))
            .collect();
        render::sum(&items)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.add_scaled(o, &Rat::one());
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.add_scaled(o, &-Rat::one());
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&-Rat::one())
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar { terms: BTreeMap::new(), trunc: meet(self.trunc, o.trunc) };
        for (ka, ga) in &self.terms {
            for (kb, gb) in &o.terms {
                out.add_term(ka.times(kb), &ga.mul(gb));
            }
        }
        out
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::from_rat(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn arithmetic_and_zero_cleanup() {
        let a = &Scalar::c() + &Scalar::from_rat(rat(1, 2));
        let b = &Scalar::c() - &Scalar::from_rat(rat(1, 2));
        let p = &a * &b;
        let expect = &Scalar::c().pow(2) - &Scalar::from_rat(rat(1, 4));
        assert_eq!(p, expect);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).len(), 0);
    }

    #[test]
    fn truncation_drops_ideal() {
        let em = (&Scalar::eps() * &Scalar::mu()).with_trunc(Some(1));
        assert!(em.is_zero());
        let x = (&Scalar::eps() + &Scalar::mu()).with_trunc(Some(2));
        let sq = &x * &x;
        // eps^2 + 2 eps mu + mu^2 survives modulo (eps mu)^2
        assert_eq!(sq.len(), 3);
        let cube = &sq * &x;
        for (k, _) in cube.terms() {
            assert!(k.eps.min(k.mu) < 2);
        }
        // eps^3 + 3 eps^2 mu + 3 eps mu^2 + mu^3 -> terms with min >= 2 are gone (none here)
        assert_eq!(cube.len(), 4);
        let fourth = &cube * &x;
        assert_eq!(fourth.len(), 4); // eps^2 mu^2 dropped
    }

    #[test]
    fn gaussian_units() {
        let i = Scalar::i();
        assert_eq!(&i * &i, Scalar::from_int(-1));
        assert_eq!(Gauss::i_pow(-1), Gauss::i_pow(3));
        assert!(i.is_imaginary());
    }

    #[test]
    fn c_specialization_and_derivative() {
        let s = &Scalar::c().pow(3) + &Scalar::eps();
        assert_eq!(s.d_dc(), Scalar::c().pow(2).scale(&rat(3, 1)));
        assert_eq!(s.eval_c(&rat(2, 1)), &Scalar::from_int(8) + &Scalar::eps());
    }
}

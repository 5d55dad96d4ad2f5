//! Quantum KdV and ILW Hamiltonian densities from the reduced recursion.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::numbers::{bernoulli, binomial, factorial, int, rat, Rat};
use crate::scalar::{ParamKey, Scalar};

use super::commutator::{commutator_bracket, variables};

/// Which hierarchy, with the `(eps*mu)^G` truncation for ILW.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Kdv,
    Ilw { genus: u32 },
}

impl Mode {
    pub fn trunc(&self) -> Option<u32> {
        match self {
            Mode::Kdv => None,
            Mode::Ilw { genus } => Some(*genus),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Kdv => "kdv",
            Mode::Ilw { .. } => "ilw",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Kdv => write!(f, "kdv"),
            Mode::Ilw { genus } => write!(f, "ilw (G={genus})"),
        }
    }
}

/// `|B_{2g}|`.
fn abs_bernoulli(k: u32) -> Rat {
    bernoulli(k).abs()
}

/// `(eps - mu)(eps mu)^{g-1}` for the given mode; only `g = 1` survives for KdV.
fn genus_prefactor(mode: Mode, g: u32) -> Scalar {
    match mode {
        Mode::Kdv => {
            if g == 1 {
                Scalar::eps()
            } else {
                Scalar::zero()
            }
        }
        Mode::Ilw { genus } => {
            let em = (&Scalar::eps() * &Scalar::mu()).pow(g - 1);
            (&(&Scalar::eps() - &Scalar::mu()) * &em).with_trunc(Some(genus))
        }
    }
}

fn genus_range(mode: Mode) -> std::ops::RangeInclusive<u32> {
    match mode {
        Mode::Kdv => 1..=1,
        Mode::Ilw { genus } => 1..=genus,
    }
}

/// The first nontrivial source `g1 = u0³/6 - u0/24 + (eps-mu) Σ_g (eps mu)^{g-1} |B_2g|/(2(2g)!) (u0 u_2g - |B_{2g+2}|/(2g+2))`.
pub fn ilw_g1(genus: u32) -> DiffPoly {
    assert!(genus >= 1, "genus cutoff must be positive");
    g1_source(Mode::Ilw { genus })
}

fn g1_source(mode: Mode) -> DiffPoly {
    let mut acc = DiffPoly::u(0).pow(3).scale_rat(&rat(1, 6)).sub(&DiffPoly::u(0).scale_rat(&rat(1, 24)));
    for g in genus_range(mode) {
        let coeff = abs_bernoulli(2 * g) / Rat::from_integer(BigInt::from(2) * factorial(2 * g));
        let inner = DiffPoly::monomial(&[0, 2 * g]).sub(&DiffPoly::constant(Scalar::from_rat(
            abs_bernoulli(2 * g + 2) / int(2 * g as i64 + 2),
        )));
        acc = acc.add(&inner.scale(&genus_prefactor(mode, g).scale(&coeff)));
    }
    acc.with_trunc(mode.trunc())
}

/// `u0²/2 + (eps-mu) Σ_g (eps mu)^{g-1} |B_2g|/(2g)! u_2g`, whose x-derivatives drive the first-order part of R₁.
fn r1_potential(mode: Mode) -> DiffPoly {
    let mut acc = DiffPoly::u(0).pow(2).scale_rat(&rat(1, 2));
    for g in genus_range(mode) {
        let coeff = abs_bernoulli(2 * g) / Rat::from_integer(factorial(2 * g));
        acc = acc.add(&DiffPoly::u(2 * g).scale(&genus_prefactor(mode, g).scale(&coeff)));
    }
    acc.with_trunc(mode.trunc())
}

/// `R₁ g = Σ_i ∂x^{i+1}(potential) ∂g/∂u_i - ½ Σ_{i,j} (i+1)!(j+1)!/(i+j+3)! u_{i+j+3} ∂²g/∂u_i∂u_j`.
pub fn r1_ilw(g: &DiffPoly, mode: Mode) -> DiffPoly {
    let vars = variables(g);
    let potential = r1_potential(mode);
    let mut acc = DiffPoly::zero();
    let mut derived = potential.dx();
    let top = vars.last().copied().unwrap_or(0);
    for i in 0..=top {
        if vars.contains(&i) {
            acc = acc.add(&derived.mul(&g.d_du(i)));
        }
        derived = derived.dx();
    }
    for (a, &i) in vars.iter().enumerate() {
        let gi = g.d_du(i);
        for &j in &vars[a..] {
            let gij = gi.d_du(j);
            if gij.is_zero() {
                continue;
            }
            let mut w = Rat::from_integer(factorial(i + 1) * factorial(j + 1)) / Rat::from_integer(factorial(i + j + 3));
            // the (i, j) and (j, i) terms coincide off the diagonal
            w *= if i == j { rat(-1, 2) } else { int(-1) };
            acc = acc.add(&DiffPoly::u(i + j + 3).mul(&gij).scale_rat(&w));
        }
    }
    acc.with_trunc(mode.trunc())
}

/// `R₂ g = -½ Σ_{i,j,l} B_{2l+2}/(2l+2) ((-1)^{i+l} C(j+1, 2l-i) + (-1)^{j+l} C(i+1, 2l-j)) u_{i+j+1-2l} ∂²g/∂u_i∂u_j`,
/// the operator with `[𝓑, R₁] = R₂ 𝓑`.
pub fn r2_ilw(g: &DiffPoly) -> DiffPoly {
    let vars = variables(g);
    let mut acc = DiffPoly::zero();
    let sign = |e: i64| if e.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
    for &i in &vars {
        let gi = g.d_du(i);
        for &j in &vars {
            let gij = gi.d_du(j);
            if gij.is_zero() {
                continue;
            }
            let (ii, jj) = (i as i64, j as i64);
            let mut l = 0i64;
            while 2 * l <= ii + jj + 1 {
                let comb = sign(ii + l) * binomial(jj + 1, 2 * l - ii) + sign(jj + l) * binomial(ii + 1, 2 * l - jj);
                if !comb.is_zero() {
                    let w = bernoulli((2 * l + 2) as u32) / int(-2 * (2 * l + 2)) * Rat::from_integer(comb);
                    let idx = (ii + jj + 1 - 2 * l) as u32;
                    acc = acc.add(&DiffPoly::u(idx).mul(&gij).scale_rat(&w));
                }
                l += 1;
            }
        }
    }
    acc
}

/// `(k + 2 + D)^{-1}`, diagonal on parameter monomials.
fn invert_grading(f: &DiffPoly, k: i32) -> DiffPoly {
    f.map_scalars(|s| {
        s.map_keys(|key: &ParamKey| {
            let d = k as i64 + 2 + key.eps_mu_degree() as i64;
            Some((*key, Rat::one() / int(d)))
        })
    })
}

/// Densities `g_k` (or reduced densities) for `-2 ≤ k ≤ k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTable {
    pub mode: Mode,
    pub reduced: bool,
    densities: BTreeMap<i32, DiffPoly>,
}

impl DensityTable {
    pub fn new(mode: Mode, reduced: bool, densities: BTreeMap<i32, DiffPoly>) -> Self {
        DensityTable { mode, reduced, densities }
    }

    pub fn k_max(&self) -> i32 {
        *self.densities.keys().next_back().expect("table is never empty")
    }

    pub fn get(&self, k: i32) -> Option<&DiffPoly> {
        self.densities.get(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i32, &DiffPoly)> {
        self.densities.iter()
    }
}

/// Reduced densities from `g̃_{k+1} = ∂x^{-1} (k+2+D)^{-1} R₁ g̃_k` with zero constant of integration,
/// each step checked against `∂g̃_{k+1}/∂u0 = g̃_k`.
pub fn reduced_densities(mode: Mode, k_max: i32) -> Result<DensityTable> {
    if k_max < -2 {
        return Err(Error::InvalidInput(format!("k_max must be at least -2, got {k_max}")));
    }
    let trunc = mode.trunc();
    let mut table = BTreeMap::new();
    table.insert(-2, DiffPoly::one().with_trunc(trunc));
    if k_max >= -1 {
        table.insert(-1, DiffPoly::u(0).with_trunc(trunc));
    }
    for k in -1..k_max {
        let prev = &table[&k];
        let rhs = invert_grading(&r1_ilw(prev, mode), k);
        let next = rhs.dx_invert().map_err(|e| Error::RecursionInconsistent {
            k: k + 1,
            detail: format!("right-hand side not exact: {e}"),
        })?;
        let next = next.with_trunc(trunc);
        if next.d_du(0) != *prev {
            return Err(Error::RecursionInconsistent {
                k: k + 1,
                detail: "derivative in u0 does not reproduce the previous density".into(),
            });
        }
        table.insert(k + 1, next);
    }
    Ok(DensityTable::new(mode, true, table))
}

/// Densities `g_k = 𝓑 g̃_k`.
pub fn densities(mode: Mode, k_max: i32) -> Result<DensityTable> {
    let reduced = reduced_densities(mode, k_max)?;
    let map = reduced.iter().map(|(k, g)| (*k, g.b_operator(false).with_trunc(mode.trunc()))).collect();
    Ok(DensityTable::new(mode, false, map))
}

/// Residuals of the unreduced recursion at step `k → k+1`:
/// `∂g_{k+1}/∂u0 - g_k` and `(k+2+D) ∂x g_{k+1} - [g_k, G₁]`.
pub fn recursion_residuals(table: &DensityTable, k: i32) -> Option<(DiffPoly, DiffPoly)> {
    assert!(!table.reduced, "residuals are defined for unreduced tables");
    let gk = table.get(k)?;
    let next = table.get(k + 1)?;
    let g1 = g1_source(table.mode);
    let first = next.d_du(0).sub(gk);
    let dx_next = next.dx();
    let lhs = dx_next.scale_rat(&int(k as i64 + 2)).add(&dx_next.d_operator());
    let second = lhs.sub(&commutator_bracket(gk, &g1)).with_trunc(table.mode.trunc());
    Some((first, second))
}


/// Recomputes an ILW table with genus cutoff `G+1` and checks it agrees with the cutoff-`G` table
/// modulo `(eps mu)^G`.
pub fn stabilization_check(genus: u32, k_max: i32) -> Result<bool> {
    let coarse = densities(Mode::Ilw { genus }, k_max)?;
    let fine = densities(Mode::Ilw { genus: genus + 1 }, k_max)?;
    let stable = coarse.iter().all(|(k, g)| fine.get(*k).map(|f| f.with_trunc(Some(genus))).as_ref() == Some(g));
    Ok(stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::DiffMonomial;

    fn u(i: u32) -> DiffPoly {
        DiffPoly::u(i)
    }

    fn e(j: u32) -> Scalar {
        Scalar::eps().pow(j)
    }

    fn paper_kdv() -> Vec<DiffPoly> {
        let r = |n, d| rat(n, d);
        let k = |x: &DiffPoly, c: Rat| x.scale_rat(&c);
        let konst = |c: Rat| DiffPoly::constant(Scalar::from_rat(c));
        let g0 = k(&u(0).pow(2), r(1, 2)).sub(&konst(r(1, 24))).add(&u(2).scale(&e(1).scale(&r(1, 24))));
        let g1 = k(&u(0).pow(3), r(1, 6))
            .sub(&k(&u(0), r(1, 24)))
            .sub(&k(&u(2), r(1, 24)))
            .add(&u(0).mul(&u(2)).sub(&konst(r(1, 120))).scale(&e(1).scale(&r(1, 24))))
            .add(&k(&u(4), r(1, 2)).scale(&e(2).scale(&r(1, 576))));
        let eps1 = k(&u(0).pow(2).mul(&u(2)), r(1, 2))
            .sub(&k(&u(4), r(1, 30)))
            .sub(&k(&u(2), r(1, 24)))
            .sub(&k(&u(0), r(1, 120)));
        let eps2 = k(&u(2).pow(2), r(7, 10)).add(&k(&u(0).mul(&u(4)), r(1, 2))).sub(&konst(r(1, 210)));
        let g2 = k(&u(0).pow(4), r(1, 24))
            .sub(&k(&u(0).pow(2), r(1, 48)))
            .sub(&k(&u(0).mul(&u(2)), r(1, 24)))
            .add(&konst(r(7, 5760)))
            .add(&eps1.scale(&e(1).scale(&r(1, 24))))
            .add(&eps2.scale(&e(2).scale(&r(1, 576))))
            .add(&k(&u(6), r(1, 6)).scale(&e(3).scale(&r(1, 13824))));
        vec![DiffPoly::one(), u(0), g0, g1, g2]
    }

    #[test]
    fn kdv_matches_displayed_densities() {
        let t = densities(Mode::Kdv, 2).unwrap();
        for (idx, g) in paper_kdv().into_iter().enumerate() {
            assert_eq!(t.get(idx as i32 - 2).unwrap(), &g, "g_{}", idx as i32 - 2);
        }
    }

    #[test]
    fn reduced_examples() {
        let t = reduced_densities(Mode::Kdv, 0).unwrap();
        let g0 = u(0).pow(2).scale_rat(&rat(1, 2)).add(&u(2).scale(&e(1).scale(&rat(1, 24))));
        assert_eq!(t.get(0).unwrap(), &g0);
        assert_eq!(t.get(-1).unwrap(), &u(0));
    }

    #[test]
    fn r1_on_u0() {
        let expect = u(0).mul(&u(1)).add(&u(3).scale(&e(1).scale(&rat(1, 12))));
        assert_eq!(r1_ilw(&u(0), Mode::Kdv), expect);
        assert!(r2_ilw(&u(3)).is_zero());
    }

    #[test]
    fn ilw_g1_examples() {
        let kdv = g1_source(Mode::Kdv);
        for genus in 1..=3 {
            assert_eq!(ilw_g1(genus).set_mu_zero(), kdv);
        }
        let g = ilw_g1(1);
        let term = g.coeff(&DiffMonomial::new(vec![0, 2]));
        assert_eq!(term, (&Scalar::eps() - &Scalar::mu()).scale(&rat(1, 24)));
        assert_eq!(g.constant_term(), (&Scalar::eps() - &Scalar::mu()).scale(&rat(-1, 24 * 120)));
    }

    #[test]
    fn residuals_vanish_kdv() {
        let t = densities(Mode::Kdv, 4).unwrap();
        for k in -1..4 {
            let (a, b) = recursion_residuals(&t, k).unwrap();
            assert!(a.is_zero(), "first residual at {k}: {a}");
            assert!(b.is_zero(), "second residual at {k}: {b}");
        }
    }

    #[test]
    fn b_conjugation() {
        let samples = vec![
            u(0),
            u(3),
            u(0).pow(2),
            u(1).mul(&u(2)),
            u(0).mul(&u(4)),
            u(0).pow(3),
            u(0).mul(&u(1)).mul(&u(3)),
            u(2).pow(3),
            u(1).pow(2).mul(&u(5)),
        ];
        for mode in [Mode::Kdv, Mode::Ilw { genus: 2 }] {
            for f in &samples {
                let bf = f.b_operator(false);
                let lhs = r1_ilw(f, mode).b_operator(false).sub(&r1_ilw(&bf, mode));
                assert_eq!(lhs.with_trunc(mode.trunc()), r2_ilw(&bf).with_trunc(mode.trunc()), "{mode} on {f}");
            }
        }
    }

    #[test]
    fn ilw_stable_under_genus() {
        assert!(stabilization_check(2, 3).unwrap());
    }

    #[test]
    fn ilw_residuals_and_kdv_limit() {
        let t = densities(Mode::Ilw { genus: 2 }, 3).unwrap();
        let kdv = densities(Mode::Kdv, 3).unwrap();
        for k in -2..=3 {
            assert_eq!(t.get(k).unwrap().set_mu_zero(), *kdv.get(k).unwrap(), "g_{k}");
        }
        for k in -1..3 {
            let (a, b) = recursion_residuals(&t, k).unwrap();
            assert!(a.is_zero(), "first residual at {k}: {a}");
            assert!(b.is_zero(), "second residual at {k}: {b}");
        }
    }
}

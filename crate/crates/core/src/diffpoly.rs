//! Differential polynomials in `u0, u1, u2, ...` with coefficients in [`Scalar`].
//!
//! `u_i` has weight `i + 1`; together with the parameter weights of [`ParamKey`] this
//! gives the grading under which reduced densities are homogeneous.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{SolveError, System};
use crate::numbers::{bernoulli, int, Rat};
use crate::partition::partitions_with_max_len;
use crate::render;
use crate::scalar::{Gauss, ParamKey, Scalar};

/// A monomial `u_{a1} ... u_{an}`, stored as its sorted index multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DiffMonomial(Vec<u32>);

impl DiffMonomial {
    pub fn new(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        DiffMonomial(indices)
    }

    pub fn one() -> Self {
        DiffMonomial(Vec::new())
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    /// Number of `u` factors.
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Sum of indices, the eigenvalue of `Σ j u_j ∂/∂u_j`.
    pub fn index_sum(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Σ (i + 1) over factors.
    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&i| i as i64 + 1).sum()
    }

    pub fn exponent(&self, i: u32) -> u32 {
        self.0.iter().filter(|&&j| j == i).count() as u32
    }

    /// `(index, exponent)` pairs with increasing index.
    pub fn exponents(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, e)) if *j == i => *e += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    pub fn times(&self, o: &DiffMonomial) -> DiffMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        DiffMonomial::new(v)
    }

    /// Removes one factor `u_i`, if present.
    pub fn without(&self, i: u32) -> Option<DiffMonomial> {
        let pos = self.0.iter().position(|&j| j == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(DiffMonomial(v))
    }

    pub fn with(&self, i: u32) -> DiffMonomial {
        let mut v = self.0.clone();
        v.push(i);
        DiffMonomial::new(v)
    }

    pub fn symbol(&self) -> String {
        self.exponents()
            .into_iter()
            .map(|(i, e)| if e == 1 { format!("u{i}") } else { format!("u{i}^{e}") })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All monomials of the given degree and index sum, sorted.
pub fn monomials_of(degree: usize, index_sum: u32) -> Vec<DiffMonomial> {
    if degree == 0 {
        return if index_sum == 0 { vec![DiffMonomial::one()] } else { Vec::new() };
    }
    let mut out: Vec<DiffMonomial> = partitions_with_max_len(index_sum, degree)
        .into_iter()
        .map(|p| {
            let mut v = p.parts().to_vec();
            v.resize(degree, 0);
            DiffMonomial::new(v)
        })
        .collect();
    out.sort();
    out
}

/// Sparse differential polynomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMonomial, Scalar>,
}

/// `ν_{ij} = (-1)^{(i-j)/2} B_{i+j+2} / (i+j+2)`, zero when `i` and `j` have different parity.
pub fn nu(i: u32, j: u32) -> Rat {
    if (i + j) % 2 == 1 {
        return Rat::zero();
    }
    let half = (i as i64 - j as i64) / 2;
    let b = bernoulli(i + j + 2) / int((i + j + 2) as i64);
    if half.rem_euclid(2) == 1 {
        -b
    } else {
        b
    }
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Scalar::one())
    }

    pub fn constant(s: Scalar) -> Self {
        DiffPoly::term(DiffMonomial::one(), s)
    }

    /// The variable `u_i`.
    pub fn u(i: u32) -> Self {
        DiffPoly::term(DiffMonomial(vec![i]), Scalar::one())
    }

    /// `u_{a1} ... u_{an}` with unit coefficient.
    pub fn monomial(indices: &[u32]) -> Self {
        DiffPoly::term(DiffMonomial::new(indices.to_vec()), Scalar::one())
    }

    pub fn term(m: DiffMonomial, s: Scalar) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, &s);
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &DiffMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: DiffMonomial, s: &Scalar) {
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

    pub fn add(&self, o: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, s) in &o.terms {
            out.add_term(m.clone(), s);
        }
        out
    }

    pub fn sub(&self, o: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, s) in &o.terms {
            out.add_term(m.clone(), &-s);
        }
        out
    }

    pub fn neg(&self) -> DiffPoly {
        self.scale_rat(&-Rat::one())
    }

    pub fn scale(&self, s: &Scalar) -> DiffPoly {
        self.map_scalars(|c| c * s)
    }

    pub fn scale_rat(&self, r: &Rat) -> DiffPoly {
        self.map_scalars(|c| c.scale(r))
    }

    pub fn mul(&self, o: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, sa) in &self.terms {
            for (mb, sb) in &o.terms {
                out.add_term(ma.times(mb), &(sa * sb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        (0..e).fold(DiffPoly::one(), |acc, _| acc.mul(self))
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, s) in &self.terms {
            out.add_term(m.clone(), &f(s));
        }
        out
    }

    /// Reduces all coefficients modulo `(eps mu)^g`.
    pub fn with_trunc(&self, g: Option<u32>) -> DiffPoly {
        self.map_scalars(|s| s.clone().with_trunc(g))
    }

    pub fn set_mu_zero(&self) -> DiffPoly {
        self.map_scalars(Scalar::set_mu_zero)
    }

    pub fn set_eps_zero(&self) -> DiffPoly {
        self.map_scalars(Scalar::set_eps_zero)
    }

    /// Coefficient of `eps^j`.
    pub fn eps_coeff(&self, j: u32) -> DiffPoly {
        self.map_scalars(|s| s.eps_coeff(j))
    }

    pub fn max_eps_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(Scalar::max_eps_degree).max()
    }

    /// Largest number of `u` factors in a term.
    pub fn u_degree(&self) -> usize {
        self.terms.keys().map(DiffMonomial::degree).max().unwrap_or(0)
    }

    /// Constant (u-free) part.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&DiffMonomial::one())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    /// The derivation `∂x = Σ u_{i+1} ∂/∂u_i`.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, s) in &self.terms {
            for (i, e) in m.exponents() {
                let raised = m.without(i).expect("factor present").with(i + 1);
                out.add_term(raised, &s.scale(&int(e as i64)));
            }
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        (0..n).fold(self.clone(), |acc, _| acc.dx())
    }

    /// The unique `q` without constant term such that `dx(q) = self`.
    pub fn dx_invert(&self) -> Result<DiffPoly> {
        // group by (degree, index sum); ∂x preserves degree and raises the index sum by one
        let mut groups: BTreeMap<(usize, u32), Vec<(&DiffMonomial, &Scalar)>> = BTreeMap::new();
        for (m, s) in &self.terms {
            groups.entry((m.degree(), m.index_sum())).or_default().push((m, s));
        }
        let mut out = DiffPoly::zero();
        for ((deg, sum), items) in groups {
            if deg == 0 || sum == 0 {
                return Err(Error::NotInImage);
            }
            let solver = dx_solver(deg, sum);
            let mut keys: Vec<ParamKey> = items.iter().flat_map(|(_, s)| s.terms().map(|(k, _)| *k)).collect();
            keys.sort();
            keys.dedup();
            let trunc = items.iter().find_map(|(_, s)| s.trunc());
            let mut rhs = Vec::new();
            for k in &keys {
                let mut re = vec![Rat::zero(); solver.rows.len()];
                let mut im = vec![Rat::zero(); solver.rows.len()];
                for (m, s) in &items {
                    let r = solver.row_index[*m];
                    let g = s.coeff(k);
                    re[r] = g.re;
                    im[r] = g.im;
                }
                rhs.push(re);
                rhs.push(im);
            }
            let sol = solver.system.solve_unique(&rhs).map_err(|e| match e {
                SolveError::Inconsistent => Error::NotInImage,
                SolveError::RankDeficient { .. } => unreachable!("∂x is injective on non-constant monomials"),
            })?;
            for (ci, col) in solver.cols.iter().enumerate() {
                let mut s = Scalar::zero().with_trunc(trunc);
                for (ki, k) in keys.iter().enumerate() {
                    s.add_term(*k, &Gauss::new(sol[2 * ki][ci].clone(), sol[2 * ki + 1][ci].clone()));
                }
                out.add_term(col.clone(), &s);
            }
        }
        Ok(out)
    }

    /// Splits by total weight (`u_i`: i+1, `c`: +1, `eps`/`mu`: -1).
    pub fn weight_decompose(&self) -> BTreeMap<i64, DiffPoly> {
        let mut out: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (m, s) in &self.terms {
            for (k, g) in s.terms() {
                let w = m.weight() + k.weight();
                out.entry(w).or_default().add_term(m.clone(), &Scalar::monomial(*k, g.clone()).with_trunc(s.trunc()));
            }
        }
        out
    }

    /// Whether every term has total weight `w`.
    pub fn is_homogeneous(&self, w: i64) -> bool {
        self.weight_decompose().keys().all(|&x| x == w)
    }

    /// `(even, odd)` parts with respect to `Σ j u_j ∂/∂u_j`.
    pub fn parity_split(&self) -> (DiffPoly, DiffPoly) {
        let mut even = DiffPoly::zero();
        let mut odd = DiffPoly::zero();
        for (m, s) in &self.terms {
            if m.index_sum() % 2 == 0 {
                even.add_term(m.clone(), s);
            } else {
                odd.add_term(m.clone(), s);
            }
        }
        (even, odd)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.index_sum() % 2 == 0)
    }

    /// `eps ∂/∂eps + mu ∂/∂mu`.
    pub fn d_operator(&self) -> DiffPoly {
        self.map_scalars(Scalar::d_operator)
    }

    /// Antiderivative in `u0` without u0-free part.
    pub fn u0_integrate(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, s) in &self.terms {
            let e = m.exponent(0);
            out.add_term(m.with(0), &s.scale(&(Rat::one() / int(e as i64 + 1))));
        }
        out
    }

    /// `∂/∂u_i`.
    pub fn d_du(&self, i: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, s) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                out.add_term(m.without(i).expect("factor present"), &s.scale(&int(e as i64)));
            }
        }
        out
    }

    /// `∂^n / ∂u_{i1} ... ∂u_{in}`.
    pub fn d_du_multi(&self, indices: &[u32]) -> DiffPoly {
        indices.iter().fold(self.clone(), |acc, &i| acc.d_du(i))
    }

    /// The second-order operator `Σ_{i,j} ν_{ij} ∂²/∂u_i∂u_j`.
    pub fn laplacian(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, s) in &self.terms {
            let ex = m.exponents();
            for (a, &(i, ei)) in ex.iter().enumerate() {
                if ei >= 2 {
                    let f = nu(i, i) * int((ei * (ei - 1)) as i64);
                    if !f.is_zero() {
                        let red = m.without(i).and_then(|x| x.without(i)).expect("factors present");
                        out.add_term(red, &s.scale(&f));
                    }
                }
                for &(j, ej) in &ex[a + 1..] {
                    let f = nu(i, j) * int(2 * (ei * ej) as i64);
                    if !f.is_zero() {
                        let red = m.without(i).and_then(|x| x.without(j)).expect("factors present");
                        out.add_term(red, &s.scale(&f));
                    }
                }
            }
        }
        out
    }

    /// `exp(∓½ Σ ν_{ij} ∂²/∂u_i∂u_j)`; the minus sign gives the forward operator.
    pub fn b_operator(&self, inverse: bool) -> DiffPoly {
        let half = if inverse { Rat::new(1.into(), 2.into()) } else { Rat::new((-1).into(), 2.into()) };
        let mut acc = self.clone();
        let mut term = self.clone();
        let mut n = 1i64;
        while !term.is_zero() {
            term = term.laplacian().scale_rat(&(&half / int(n)));
            acc = acc.add(&term);
            n += 1;
        }
        acc
    }

    /// Splits a level-`k` density by the power of `(iħ)^{1/2}` produced by the substitutions
    /// `eps -> eps (iħ)^{-1/2}`, `mu -> mu (iħ)^{1/2}`, `u_j -> u_j (iħ)^{-1/2}`, `g -> (iħ)^{(k+2)/2} g`.
    pub fn hbar_normalize(&self, k: i64) -> BTreeMap<i64, DiffPoly> {
        let mut out: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (m, s) in &self.terms {
            for (key, g) in s.terms() {
                let e = (k + 2) - key.eps as i64 - m.degree() as i64 + key.mu as i64;
                out.entry(e).or_default().add_term(m.clone(), &Scalar::monomial(*key, g.clone()));
            }
        }
        out
    }

    /// Plain rendering, e.g. `u0^2/2 - 1/24 + eps u2/24`.
    pub fn render(&self) -> String {
        let mut items = Vec::new();
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

    /// Rendering with powers of `eps` gathered as `(eps/24)^j`, e.g. `u0^2/2 - 1/24 + (eps/24) u2`.
    pub fn render_grouped(&self) -> String {
        let max = self.max_eps_degree().unwrap_or(0);
        let parts: Vec<(u32, String)> = (0..=max)
            .filter_map(|j| {
                let part = self.eps_coeff(j).scale_rat(&Rat::from_integer(BigInt::from(24).pow(j)));
                (!part.is_zero()).then(|| (j, part.render()))
            })
            .collect();
        render::eps_grouped(&parts)
    }

    /// Terms by decreasing u-degree, then increasing indices.
    fn sorted_terms(&self) -> Vec<(&DiffMonomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        v
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

struct DxSolver {
    system: System,
    rows: Vec<DiffMonomial>,
    row_index: HashMap<DiffMonomial, usize>,
    cols: Vec<DiffMonomial>,
}

type SolverCache = Mutex<HashMap<(usize, u32), std::sync::Arc<DxSolver>>>;

/// The matrix of `∂x` from monomials `(deg, sum-1)` to `(deg, sum)`, memoized.
fn dx_solver(deg: usize, sum: u32) -> std::sync::Arc<DxSolver> {
    static CACHE: OnceLock<SolverCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("dx cache poisoned").get(&(deg, sum)) {
        return s.clone();
    }
    let rows = monomials_of(deg, sum);
    let cols = monomials_of(deg, sum - 1);
    let row_index: HashMap<DiffMonomial, usize> = rows.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut matrix = vec![vec![Rat::zero(); cols.len()]; rows.len()];
    for (c, m) in cols.iter().enumerate() {
        let image = DiffPoly::term(m.clone(), Scalar::one()).dx();
        for (r, s) in image.terms() {
            matrix[row_index[r]][c] = s.as_rat().expect("rational image");
        }
    }
    let solver = std::sync::Arc::new(DxSolver {
        system: System::from_rows(matrix, cols.len()),
        rows,
        row_index,
        cols,
    });
    cache.lock().expect("dx cache poisoned").insert((deg, sum), solver.clone());
    solver
}

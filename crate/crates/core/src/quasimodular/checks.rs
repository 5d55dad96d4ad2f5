//! Quasimodularity checks: the holomorphic anomaly, Skoruppa's identity, and the main theorem
//! verified on computed density tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::diffpoly::{monomials_of, DiffPoly};
use crate::error::{Error, Result};
use crate::hierarchy::{densities, DensityTable, Mode};
use crate::linalg::{SolveError, System};
use crate::numbers::{bernoulli, binomial, factorial, int, Rat};
use crate::quantization::{pairing_qseries, q_bracket, qk_function, quantize};
use crate::scalar::{ParamKey, Scalar};

use super::qmpoly::{GMono, QMPoly};
use super::recognize::recognize;
use super::series::eisenstein;

/// The three sides of `-2𝔡{ḡ}_q = ∂²_c {ḡ}_q = {(∂²g/∂u0²)‾}_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnomalySides {
    pub frak_d: QMPoly,
    pub c_second: QMPoly,
    pub u0_second: QMPoly,
}

impl AnomalySides {
    pub fn holds(&self) -> bool {
        self.frak_d == self.c_second && self.c_second == self.u0_second
    }
}

/// Recognizes the brackets entering the holomorphic anomaly equation for `g`.
pub fn anomaly_sides(g: &DiffPoly, order: usize, max_weight: i64) -> Result<AnomalySides> {
    let f = recognize(&quantize(g).q_series(order), max_weight)?;
    let second = g.d_du(0).d_du(0);
    let u0_second = recognize(&quantize(&second).q_series(order), max_weight)?;
    Ok(AnomalySides { frak_d: f.frak_d().scale_rat(&int(-2)), c_second: f.d_dc().d_dc(), u0_second })
}

pub fn anomaly_check(g: &DiffPoly, order: usize, max_weight: i64) -> Result<bool> {
    Ok(anomaly_sides(g, order, max_weight)?.holds())
}

/// `𝔡⟨Q_j⟩_q = -½⟨Q_{j-2}⟩_q`, both sides recognized from q-brackets.
pub fn q_bracket_anomaly(j: u32, order: usize) -> Result<bool> {
    if j < 2 {
        return Err(Error::InvalidInput(format!("need j >= 2, got {j}")));
    }
    let weight = j as i64;
    let top = recognize(&q_bracket(&qk_function(j), order), weight)?;
    let low = recognize(&q_bracket(&qk_function(j - 2), order), weight)?;
    Ok(top.frak_d() == low.scale_rat(&Rat::new((-1).into(), 2.into())))
}

/// Bivariate homogeneous polynomial `Σ h_ν x^ν y^{n-ν}`, stored by `ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Binary {
    coeffs: Vec<Rat>,
}

impl Binary {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `x^a (-y)^b (y-x)^c`.
    fn product(a: u32, b: u32, c: u32) -> Binary {
        let n = (a + b + c) as usize;
        let mut coeffs = vec![Rat::zero(); n + 1];
        for k in 0..=c {
            // (y-x)^c = Σ C(c,k) (-x)^k y^{c-k}
            let sign = if (b + k).is_multiple_of(2) { 1 } else { -1 };
            coeffs[(a + k) as usize] += Rat::from_integer(binomial(c as i64, k as i64) * sign);
        }
        Binary { coeffs }
    }

    fn add(&mut self, o: &Binary) {
        for (x, y) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *x += y;
        }
    }

    fn swapped(&self) -> Binary {
        Binary { coeffs: self.coeffs.iter().rev().cloned().collect() }
    }

    /// `H(y, y - x)`.
    fn transformed(&self) -> Binary {
        let n = self.degree();
        let mut out = vec![Rat::zero(); n + 1];
        for (nu, h) in self.coeffs.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            // y^ν (y-x)^{n-ν}
            let m = n - nu;
            for (k, slot) in out.iter_mut().enumerate().take(m + 1) {
                let sign = if k.is_multiple_of(2) { BigInt::from(1) } else { BigInt::from(-1) };
                *slot += h * Rat::from_integer(binomial(m as i64, k as i64) * sign);
            }
        }
        Binary { coeffs: out }
    }

    /// `-½ ∫_0^1 H(1, y) dy`.
    fn skoruppa_constant(&self) -> Rat {
        let n = self.degree();
        let integral: Rat = self.coeffs.iter().enumerate().map(|(nu, h)| h / int((n - nu + 1) as i64)).sum();
        -integral / int(2)
    }
}

fn b_over_k(k: u32) -> Rat {
    bernoulli(k) / int(k as i64)
}

/// Outcome of the Skoruppa checks for one triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkoruppaReport {
    pub symmetric: bool,
    pub invariant: bool,
    pub series_identity: bool,
    pub bernoulli_identity: bool,
    pub specialized_identity: bool,
}

impl SkoruppaReport {
    pub fn holds(&self) -> bool {
        self.symmetric && self.invariant && self.series_identity && self.bernoulli_identity && self.specialized_identity
    }
}

fn permutations(a: [u32; 3]) -> [[u32; 3]; 6] {
    let [x, y, z] = a;
    [[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]]
}

/// Skoruppa's identity for `H(x,y) = Σ_{π∈S3} x^{a_π1} (-y)^{a_π2} (y-x)^{a_π3}`, checked on
/// q-series through `q^order`, together with its constant-term and specialized Bernoulli forms.
pub fn skoruppa_report(a: [u32; 3], order: usize) -> Result<SkoruppaReport> {
    if a.contains(&0) || a.iter().sum::<u32>() % 2 == 1 {
        return Err(Error::InvalidInput(format!("need positive entries with even sum, got {a:?}")));
    }
    let n = a.iter().sum::<u32>();
    let mut h = Binary { coeffs: vec![Rat::zero(); n as usize + 1] };
    for p in permutations(a) {
        h.add(&Binary::product(p[0], p[1], p[2]));
    }
    let hc = h.skoruppa_constant();
    let h1 = h.coeffs[1].clone();

    let mut lhs = eisenstein(2, order).scale_rat(&Rat::zero());
    let mut bern_lhs = Rat::zero();
    for nu in (1..n).step_by(2) {
        let coeff = &h.coeffs[nu as usize];
        if coeff.is_zero() {
            continue;
        }
        lhs = lhs.add(&eisenstein(nu + 1, order).mul(&eisenstein(n + 1 - nu, order)).scale_rat(coeff));
        bern_lhs += coeff * b_over_k(nu + 1) * b_over_k(n + 1 - nu);
    }
    let rhs = eisenstein(n + 2, order)
        .scale_rat(&hc)
        .sub(&eisenstein(n, order).q_d_dq().scale_rat(&(&h1 / int(n as i64))));

    let mut spec_lhs = Rat::zero();
    let mut spec_rhs = Rat::zero();
    for p in permutations(a) {
        let [x, y, z] = p.map(|v| v as i64);
        let sign = |e: i64| if (e / 2).rem_euclid(2) == 0 { 1 } else { -1 };
        for k in 0..=z {
            let term = b_over_k((x + k + 1) as u32) * b_over_k((y + z - k + 1) as u32);
            spec_lhs += term * Rat::from_integer(binomial(z, k) * sign(x + y - z));
        }
        let frac = Rat::new(factorial(y as u32) * factorial(z as u32), factorial((y + z + 1) as u32));
        spec_rhs -= frac * int(sign(y + z - x));
    }
    spec_rhs *= b_over_k(n + 2);

    Ok(SkoruppaReport {
        symmetric: h.swapped() == h,
        invariant: h.transformed() == h,
        series_identity: lhs == rhs,
        bernoulli_identity: bern_lhs == -int(2) * hc * b_over_k(n + 2),
        specialized_identity: spec_lhs == spec_rhs,
    })
}

pub fn skoruppa_check(a: [u32; 3], order: usize) -> Result<bool> {
    Ok(skoruppa_report(a, order)?.holds())
}

/// Result of checking `{G_k}_q ∈ M̃[c, eps(, mu)]_{k+2}` for one density.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub mode: Mode,
    pub k: i32,
    pub order: usize,
    pub recognized: QMPoly,
    pub weights: Vec<i64>,
    pub homogeneous: bool,
}

impl VerifyReport {
    pub fn expected_weight(&self) -> i64 {
        self.k as i64 + 2
    }

    pub fn passed(&self) -> bool {
        self.homogeneous
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} k={} weight={} : {}",
            self.mode,
            self.k,
            self.expected_weight(),
            self.recognized.render_grouped()
        )
    }
}

/// Recognizes `{G_k}_q` from an existing table.
pub fn verify_density(table: &DensityTable, k: i32, order: usize) -> Result<VerifyReport> {
    let g = table
        .get(k)
        .ok_or_else(|| Error::InvalidInput(format!("density {k} not in table (k_max = {})", table.k_max())))?;
    let weight = k as i64 + 2;
    let recognized = recognize(&quantize(g).q_series(order), weight)?;
    let weights = recognized.weights();
    let homogeneous = recognized.is_homogeneous(weight);
    Ok(VerifyReport { mode: table.mode, k, order, recognized, weights, homogeneous })
}

/// Computes the density table and recognizes `{G_k}_q`.
pub fn verify_theorem(mode: Mode, k: i32, order: usize) -> Result<VerifyReport> {
    let table = densities(mode, k)?;
    verify_density(&table, k, order)
}

/// A density `g` with `{(𝓑g)‾}_q = f`, for `f` homogeneous of weight `w` with rational coefficients.
///
/// Solves over `c^j u_a` with `u_a` even and `|a| + len(a) + j = w`, whose brackets are given by the
/// pairing formula. Powers of `c` are needed: `𝔾2` only arises from `u0²`, which also produces `c²`.
pub fn quasimodular_preimage(f: &QMPoly) -> Result<DiffPoly> {
    let weights = f.weights();
    let w = match weights.as_slice() {
        [] => return Ok(DiffPoly::zero()),
        [w] => *w,
        _ => return Err(Error::InvalidInput("target is not homogeneous".into())),
    };
    // (monomial, power of c) with |a| + len(a) + power = w
    let mut candidates = Vec::new();
    for len in 0..=w as usize {
        for c_power in 0..=(w - len as i64) {
            let index_sum = w - len as i64 - c_power;
            if index_sum % 2 == 1 {
                continue;
            }
            for m in monomials_of(len, index_sum as u32) {
                candidates.push((m, c_power as u32));
            }
        }
    }
    let images: Vec<QMPoly> =
        candidates.iter().map(|(m, p)| pairing_qseries(m.indices(), true).scale(&Scalar::c().pow(*p))).collect();
    let mut rows_index: BTreeSet<(GMono, ParamKey)> = BTreeSet::new();
    for p in images.iter().chain(std::iter::once(f)) {
        for (m, s) in p.terms() {
            for (key, _) in s.terms() {
                rows_index.insert((*m, *key));
            }
        }
    }
    let rows_index: Vec<_> = rows_index.into_iter().collect();
    let entry = |p: &QMPoly, (m, key): &(GMono, ParamKey)| -> Result<Rat> {
        let g = p.coeff(m).coeff(key);
        if !g.im.is_zero() {
            return Err(Error::InvalidInput("preimages are computed for real targets".into()));
        }
        Ok(g.re)
    };
    let mut rows = Vec::with_capacity(rows_index.len());
    let mut rhs = Vec::with_capacity(rows_index.len());
    for idx in &rows_index {
        rows.push(images.iter().map(|p| entry(p, idx)).collect::<Result<Vec<_>>>()?);
        rhs.push(entry(f, idx)?);
    }
    let sol = System::from_rows(rows, candidates.len()).solve_particular(&[rhs]).map_err(|e| match e {
        SolveError::Inconsistent => Error::NotRecognized { max_weight: w, detail: "no preimage among even monomials".into() },
        SolveError::RankDeficient { .. } => unreachable!("particular solutions tolerate free variables"),
    })?;
    let mut g = DiffPoly::zero();
    for ((m, p), x) in candidates.iter().zip(&sol[0]) {
        if !x.is_zero() {
            g.add_term(m.clone(), &Scalar::c().pow(*p).scale(x));
        }
    }
    Ok(g)
}

/// Generator monomials `𝔾2^a 𝔾4^b 𝔾6^c` of weight at most `w` with their preimages.
pub fn surjectivity_witness(w: i64) -> Result<BTreeMap<GMono, DiffPoly>> {
    let mut out = BTreeMap::new();
    for m in super::qmpoly::monomials_up_to_weight(w) {
        if m.weight() == 0 {
            continue;
        }
        out.insert(m, quasimodular_preimage(&QMPoly::monomial(m))?);
    }
    Ok(out)
}

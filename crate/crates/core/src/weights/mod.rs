//! Residue-level nilpotency checks attached to Hodge–Tate weights.

use serde::Serialize;

use crate::base_rings::matrix::{add_scalar, identity, mat_mul, min_valuation, residue_matrix, Matrix};
use crate::base_rings::modint::{add_mod, binomial_table, mul_mod, sub_mod};
use crate::base_rings::{OkElem, OkRing, Ring};
use crate::crystal::{Crystal, NilpotencyVerdict};
use crate::error::{Error, Result};

/// Weakly increasing non-negative weights r_1 ≤ … ≤ r_d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightProfile {
    pub r: Vec<u32>,
}

impl WeightProfile {
    pub fn new(r: Vec<u32>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidSpec("empty weight list".into()));
        }
        if r.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpec(format!("weights {r:?} are not weakly increasing")));
        }
        Ok(WeightProfile { r })
    }

    pub fn d(&self) -> usize {
        self.r.len()
    }

    /// Comma-separated list, e.g. `0,2,5`.
    pub fn parse(s: &str) -> Result<Self> {
        let r = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad weight {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(r)
    }
}

fn residue_nilpotency_index(ok: &OkRing, x: &Matrix<OkElem>) -> Option<usize> {
    let k = &ok.witt().residue;
    let xb = residue_matrix(ok, x);
    let mut acc = xb.clone();
    for power in 1..=x.rows.max(1) {
        if k.mat_is_zero(&acc) {
            return Some(power);
        }
        acc = k.mat_mul(&acc, &xb);
    }
    None
}

/// X = Π_i(−B + r_i α): residue nilpotency, then v(X^m) ≥ target for some
/// m ≤ budget.
pub fn weight_nilpotency_check(
    ok: &OkRing,
    b: &Matrix<OkElem>,
    profile: &WeightProfile,
    alpha: &OkElem,
    target: u32,
    budget: usize,
) -> Result<NilpotencyVerdict> {
    let d = profile.d();
    if b.rows != d || b.cols != d {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix for {d} weights", b.rows, b.cols)));
    }
    let neg_b = b.map(|x| ok.neg(x));
    let mut x = identity(ok, d);
    for &r in &profile.r {
        x = mat_mul(ok, &x, &add_scalar(ok, &neg_b, &ok.mul_int(alpha, r as u64)));
    }
    if residue_nilpotency_index(ok, &x).is_none() {
        return Ok(NilpotencyVerdict::ResidueObstruction { witness_power: d });
    }
    let mut pw = identity(ok, d);
    for m in 1..=budget {
        pw = mat_mul(ok, &pw, &x);
        let v = min_valuation(ok, &pw).value();
        if v >= target {
            return Ok(NilpotencyVerdict::CertifiedNilpotent { n_star: m, attained_valuation: v });
        }
    }
    Ok(NilpotencyVerdict::Inconclusive { budget })
}

/// Π_{i<p}(−A + iα) and Π_{i<p}(A + iα) over O_K.
pub fn residue_products(c: &Crystal) -> (Matrix<OkElem>, Matrix<OkElem>) {
    let ok = &c.ring;
    let neg = c.matrix.map(|x| ok.neg(x));
    let mut minus = identity(ok, c.rank());
    let mut plus = identity(ok, c.rank());
    for i in 0..ok.p() {
        let ia = ok.mul_int(ok.alpha(), i);
        minus = mat_mul(ok, &minus, &add_scalar(ok, &neg, &ia));
        plus = mat_mul(ok, &plus, &add_scalar(ok, &c.matrix, &ia));
    }
    (minus, plus)
}

/// Nilpotency of Π_{i<p}(−Ā + iᾱ) over the residue field. On success
/// `n_star` is the nilpotency index and the product vanishes mod π at that
/// power. The product equals (−1)^p Π(Ā + iᾱ), which is also checked.
pub fn poly_nilpotency_check(c: &Crystal) -> Result<NilpotencyVerdict> {
    let ok = &c.ring;
    let (minus, plus) = residue_products(c);
    let sign = if ok.p() % 2 == 1 { plus.map(|x| ok.neg(x)) } else { plus };
    if residue_matrix(ok, &minus) != residue_matrix(ok, &sign) {
        return Err(Error::StructureViolation("Π(−Ā + iᾱ) ≠ (−1)^p Π(Ā + iᾱ) over k".into()));
    }
    Ok(match residue_nilpotency_index(ok, &minus) {
        Some(n) => NilpotencyVerdict::CertifiedNilpotent { n_star: n, attained_valuation: 1 },
        None => NilpotencyVerdict::ResidueObstruction { witness_power: c.rank() },
    })
}

/// F_p[m1]/(m1^cap), dense.
#[derive(Clone, Debug)]
pub struct TruncPoly {
    pub p: u64,
    pub cap: usize,
}

pub type TElem = Vec<u64>;

impl TruncPoly {
    pub fn new(p: u64, cap: usize) -> Self {
        TruncPoly { p, cap }
    }

    pub fn from_coeffs(&self, c: &[i64]) -> TElem {
        let mut v = self.zero();
        for (j, &x) in c.iter().enumerate().take(self.cap) {
            v[j] = x.rem_euclid(self.p as i64) as u64;
        }
        v
    }

    /// [r]_q mod p = Σ_{j≥1} C(r,j) m1^{p(j−1)}, since μ ≡ m1^p mod p.
    pub fn qint(&self, r: u32) -> TElem {
        let bin = binomial_table(r as usize, self.p);
        let mut v = self.zero();
        for j in 1..=r as usize {
            let at = self.p as usize * (j - 1);
            if at < self.cap {
                v[at] = add_mod(v[at], bin[r as usize][j], self.p);
            }
        }
        v
    }
}

impl Ring for TruncPoly {
    type Elem = TElem;

    fn zero(&self) -> TElem {
        vec![0; self.cap]
    }

    fn one(&self) -> TElem {
        let mut v = self.zero();
        if self.cap > 0 {
            v[0] = 1 % self.p;
        }
        v
    }

    fn add(&self, a: &TElem, b: &TElem) -> TElem {
        a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, self.p)).collect()
    }

    fn sub(&self, a: &TElem, b: &TElem) -> TElem {
        a.iter().zip(b).map(|(&x, &y)| sub_mod(x, y, self.p)).collect()
    }

    fn neg(&self, a: &TElem) -> TElem {
        a.iter().map(|&x| sub_mod(0, x, self.p)).collect()
    }

    fn mul(&self, a: &TElem, b: &TElem) -> TElem {
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(self.cap - i) {
                out[i + j] = add_mod(out[i + j], mul_mod(x, y, self.p), self.p);
            }
        }
        out
    }

    fn is_zero(&self, a: &TElem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    fn int_modulus(&self) -> u64 {
        self.p
    }

    fn mul_int(&self, a: &TElem, n: u64) -> TElem {
        a.iter().map(|&x| mul_mod(x, n % self.p, self.p)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlReport {
    pub p: u64,
    pub weights: Vec<u32>,
    pub m_cap: usize,
    /// Least k with P^k = 0.
    pub nilpotency_index: usize,
    /// P, entry by entry, as m1-coefficient lists.
    pub product: Vec<Vec<TElem>>,
}

fn strictly_upper<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Option<(usize, usize)> {
    (0..m.rows).flat_map(|i| (0..=i.min(m.cols.saturating_sub(1))).map(move |j| (i, j))).find(|&(i, j)| !ring.is_zero(m.get(i, j)))
}

/// P = Π_i([r_i]_q·I + T) with T = −diag([r_i]_q) + N over F_p[m1]/(m1^cap).
/// P must be strictly upper triangular, hence P^d = 0.
pub fn fl_check(p: u64, profile: &WeightProfile, n_upper: &Matrix<TElem>, m_cap: usize) -> Result<FlReport> {
    if !crate::base_rings::modint::is_prime(p) {
        return Err(Error::InvalidSpec(format!("{p} is not prime")));
    }
    let d = profile.d();
    if profile.r[d - 1] as u64 > p {
        return Err(Error::InvalidSpec(format!("largest weight {} exceeds p = {p}", profile.r[d - 1])));
    }
    if n_upper.rows != d || n_upper.cols != d {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix for {d} weights", n_upper.rows, n_upper.cols)));
    }
    let t = TruncPoly::new(p, m_cap);
    let n = n_upper.map(|x| {
        let mut y = x.clone();
        y.resize(m_cap, 0);
        y.iter_mut().for_each(|c| *c %= p);
        y
    });
    if let Some((i, j)) = strictly_upper(&t, &n) {
        return Err(Error::StructureViolation(format!("entry ({i},{j}) on or below the diagonal is nonzero")));
    }
    let q: Vec<TElem> = profile.r.iter().map(|&r| t.qint(r)).collect();
    let tm = Matrix::from_fn(d, d, |i, j| if i == j { t.sub(n.get(i, j), &q[i]) } else { n.get(i, j).clone() });
    let mut prod = identity(&t, d);
    for qi in &q {
        prod = mat_mul(&t, &prod, &add_scalar(&t, &tm, qi));
    }
    if let Some((i, j)) = strictly_upper(&t, &prod) {
        return Err(Error::StructureViolation(format!("P has a nonzero entry at ({i},{j}) on or below the diagonal")));
    }
    let mut pw = prod.clone();
    let mut index = 1;
    while !pw.data.iter().all(|x| t.is_zero(x)) {
        if index >= d {
            return Err(Error::StructureViolation(format!("P^{d} ≠ 0")));
        }
        pw = mat_mul(&t, &pw, &prod);
        index += 1;
    }
    Ok(FlReport { p, weights: profile.r.clone(), m_cap, nilpotency_index: index, product: prod.to_rows() })
}


#[cfg(test)]
mod tests;

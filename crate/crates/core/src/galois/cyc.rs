//! O_K[ζ_p] and truncated power series in the formal unit λ over it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::base_rings::modint::{inv_mod, vp};
use crate::base_rings::{OkElem, OkModule, OkRing, Ring};
use crate::error::{Error, Result};

/// Coordinates in the basis 1, ζ, …, ζ^{p-2}.
pub type CycElem = Vec<OkElem>;

#[derive(Clone, Debug)]
pub struct CycRing {
    pub ok: OkRing,
    pub p: usize,
}

impl CycRing {
    pub fn new(ok: OkRing) -> Self {
        let p = ok.p() as usize;
        CycRing { ok, p }
    }

    fn dim(&self) -> usize {
        self.p - 1
    }

    pub fn from_ok(&self, c: &OkElem) -> CycElem {
        let mut v = vec![self.ok.zero(); self.dim()];
        v[0] = c.clone();
        v
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> CycElem {
        let mut full = vec![self.ok.zero(); self.p];
        full[k.rem_euclid(self.p as i64) as usize] = self.ok.one();
        self.fold(full)
    }

    /// Reduces a vector indexed by ζ^0..ζ^{p-1} using ζ^{p-1} = −Σ_{k<p-1} ζ^k.
    fn fold(&self, mut full: Vec<OkElem>) -> CycElem {
        let top = full.pop().expect("length p");
        full.iter().map(|c| self.ok.sub(c, &top)).collect()
    }

    /// ζ ↦ ζ^c.
    pub fn sigma(&self, x: &CycElem, c: u64) -> CycElem {
        let mut full = vec![self.ok.zero(); self.p];
        for (k, a) in x.iter().enumerate() {
            let t = (k as u64 * c % self.p as u64) as usize;
            full[t] = self.ok.add(&full[t], a);
        }
        self.fold(full)
    }

    /// (ζ − 1)/(ζ^c − 1) = Σ_{k<c'} ζ^{ck} with c·c' ≡ 1 mod p.
    pub fn zeta_ratio(&self, c: u64) -> CycElem {
        let p = self.p as u64;
        let c = c % p;
        let cinv = inv_mod(c, p).expect("c is prime to p");
        let mut out = self.zero();
        for k in 0..cinv {
            out = self.add(&out, &self.zeta_pow((c * k % p) as i64));
        }
        out
    }

    /// (1 − ζ)^n / d!, exact: the integer coordinates of (1 − ζ)^n are
    /// divisible by p^{⌊n/(p−1)⌋}, which is at least v_p(d!) when the
    /// quotient is integral.
    pub fn divided_one_minus_zeta(&self, n: usize, d: usize) -> Result<CycElem> {
        let p = self.p;
        let dim = self.dim();
        let mut poly: Vec<BigInt> = vec![BigInt::zero(); dim];
        poly[0] = BigInt::one();
        for _ in 0..n {
            // multiply by (1 − ζ) in Z[ζ]/(Φ_p)
            let mut full = vec![BigInt::zero(); p];
            for (k, a) in poly.iter().enumerate() {
                full[k] += a;
                full[k + 1] -= a;
            }
            let top = full.pop().expect("length p");
            poly = full.into_iter().map(|c| c - &top).collect();
        }
        let pv: u32 = (1..=d as u64).map(|k| vp(k, p as u64)).sum();
        let pb = BigInt::from(p).pow(pv);
        let m = self.ok.modulus();
        let mut unit = 1u64;
        for k in 1..=d as u64 {
            let mut k0 = k;
            while k0 % p as u64 == 0 {
                k0 /= p as u64;
            }
            unit = crate::base_rings::modint::mul_mod(unit, k0 % m, m);
        }
        let unit_inv = inv_mod(unit, m).expect("unit");
        let mb = BigInt::from(m);
        poly.iter()
            .map(|c| {
                let (q, r) = c.div_rem(&pb);
                if !r.is_zero() {
                    return Err(Error::DivisionFailure(format!("(1−ζ)^{n} is not divisible by p^{pv}")));
                }
                let q = q.mod_floor(&mb).to_u64().expect("reduced");
                Ok(self.ok.from_int(crate::base_rings::modint::mul_mod(q, unit_inv, m) as i64))
            })
            .collect()
    }
}

impl Ring for CycRing {
    type Elem = CycElem;

    fn zero(&self) -> CycElem {
        vec![self.ok.zero(); self.dim()]
    }

    fn one(&self) -> CycElem {
        self.from_ok(&self.ok.one())
    }

    fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a.iter().zip(b).map(|(x, y)| self.ok.add(x, y)).collect()
    }

    fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        a.iter().zip(b).map(|(x, y)| self.ok.sub(x, y)).collect()
    }

    fn neg(&self, a: &CycElem) -> CycElem {
        a.iter().map(|x| self.ok.neg(x)).collect()
    }

    fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let mut full = vec![self.ok.zero(); self.p];
        for (i, x) in a.iter().enumerate() {
            if self.ok.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let k = (i + j) % self.p;
                full[k] = self.ok.add(&full[k], &self.ok.mul(x, y));
            }
        }
        self.fold(full)
    }

    fn is_zero(&self, a: &CycElem) -> bool {
        a.iter().all(|x| self.ok.is_zero(x))
    }

    fn int_modulus(&self) -> u64 {
        self.ok.modulus()
    }

    fn mul_int(&self, a: &CycElem, n: u64) -> CycElem {
        a.iter().map(|x| self.ok.mul_int(x, n)).collect()
    }
}

impl OkModule for CycRing {
    fn ok_scale(&self, s: &OkElem, a: &CycElem) -> CycElem {
        a.iter().map(|x| self.ok.mul(s, x)).collect()
    }
}

/// Σ_{n ≤ cap} c_n λ^n with c_n ∈ O_K[ζ_p].
pub type LamElem = Vec<CycElem>;

#[derive(Clone, Debug)]
pub struct LambdaRing {
    pub cyc: CycRing,
    pub cap: usize,
}

impl LambdaRing {
    pub fn new(cyc: CycRing, cap: usize) -> Self {
        LambdaRing { cyc, cap }
    }

    pub fn ok(&self) -> &OkRing {
        &self.cyc.ok
    }

    pub fn constant(&self, c: CycElem) -> LamElem {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// c·λ^n
    pub fn monomial(&self, n: usize, c: CycElem) -> LamElem {
        let mut v = self.zero();
        if n <= self.cap {
            v[n] = c;
        }
        v
    }

    pub fn lambda(&self) -> LamElem {
        self.monomial(1, self.cyc.one())
    }

    /// (1 − t λ)^{-1} = Σ t^k λ^k.
    pub fn geometric(&self, t: &CycElem) -> LamElem {
        let mut v = self.zero();
        let mut cur = self.cyc.one();
        for slot in v.iter_mut() {
            *slot = cur.clone();
            cur = self.cyc.mul(&cur, t);
        }
        v
    }

    /// First λ-degree ≤ upto where two elements differ.
    pub fn first_difference(&self, a: &LamElem, b: &LamElem, upto: usize) -> Option<usize> {
        (0..=upto.min(self.cap)).find(|&n| a[n] != b[n])
    }

    /// Applies a coefficient map and substitutes λ ↦ image.
    pub fn substitute(&self, x: &LamElem, coeff: impl Fn(&CycElem) -> CycElem, image: &LamElem) -> LamElem {
        let mut out = self.zero();
        let mut pw = self.one();
        for c in x {
            if !self.cyc.is_zero(c) {
                let term: LamElem = pw.iter().map(|q| self.cyc.mul(&coeff(c), q)).collect();
                out = self.add(&out, &term);
            }
            pw = self.mul(&pw, image);
        }
        out
    }
}

impl Ring for LambdaRing {
    type Elem = LamElem;

    fn zero(&self) -> LamElem {
        vec![self.cyc.zero(); self.cap + 1]
    }

    fn one(&self) -> LamElem {
        self.constant(self.cyc.one())
    }

    fn add(&self, a: &LamElem, b: &LamElem) -> LamElem {
        a.iter().zip(b).map(|(x, y)| self.cyc.add(x, y)).collect()
    }

    fn sub(&self, a: &LamElem, b: &LamElem) -> LamElem {
        a.iter().zip(b).map(|(x, y)| self.cyc.sub(x, y)).collect()
    }

    fn neg(&self, a: &LamElem) -> LamElem {
        a.iter().map(|x| self.cyc.neg(x)).collect()
    }

    fn mul(&self, a: &LamElem, b: &LamElem) -> LamElem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.cyc.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(self.cap + 1 - i) {
                out[i + j] = self.cyc.add(&out[i + j], &self.cyc.mul(x, y));
            }
        }
        out
    }

    fn is_zero(&self, a: &LamElem) -> bool {
        a.iter().all(|x| self.cyc.is_zero(x))
    }

    fn int_modulus(&self) -> u64 {
        self.cyc.int_modulus()
    }

    fn mul_int(&self, a: &LamElem, n: u64) -> LamElem {
        a.iter().map(|x| self.cyc.mul_int(x, n)).collect()
    }
}

impl OkModule for LambdaRing {
    fn ok_scale(&self, s: &OkElem, a: &LamElem) -> LamElem {
        a.iter().map(|x| self.cyc.ok_scale(s, x)).collect()
    }
}

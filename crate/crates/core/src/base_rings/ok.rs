//! O_K = W[u]/(E(u)) with all coefficients kept mod p^N.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::modint::{add_mod, inv_mod, mul_mod, neg_mod, reduce_i64, sub_mod, vp};
use super::residue::Fq;
use super::spec::RingSpec;
use super::witt::WittRing;
use super::{OkModule, Ring};
use crate::error::{Error, Result};

/// Coefficients of Σ c_ij x^i u^j, stored row-major at index i*e + j.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OkElem(pub SmallVec<[u64; 8]>);

impl fmt::Debug for OkElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// π-adic valuation, or a lower bound when the element vanishes mod p^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn value(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Inner {
    spec: RingSpec,
    w: WittRing,
    e: usize,
    /// E(u) coefficients mod p^N, e + 1 entries.
    eis: Vec<u64>,
    /// Inverse of E(0)/p mod p^N.
    e0_unit_inv: u64,
    alpha: OkElem,
}

#[derive(Clone, Debug)]
pub struct OkRing(Arc<Inner>);

impl PartialEq for OkRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl OkRing {
    pub fn new(spec: RingSpec) -> Result<Self> {
        spec.validate()?;
        let w = WittRing::new(spec.p, spec.precision, &spec.residue_min_poly);
        let m = w.m;
        let e = spec.e();
        let eis: Vec<u64> = spec.eisenstein.iter().map(|&c| reduce_i64(c, m)).collect();
        let e0 = spec.eisenstein[0];
        let unit = e0 / spec.p as i64;
        let e0_unit_inv = inv_mod(reduce_i64(unit, m), m)
            .ok_or_else(|| Error::InvalidSpec("E(0)/p is not a unit".into()))?;
        let mut inner = Inner {
            spec,
            w,
            e,
            eis,
            e0_unit_inv,
            alpha: OkElem(SmallVec::new()),
        };
        inner.alpha = OkRing(Arc::new(inner.clone())).eval_e_derivative();
        Ok(OkRing(Arc::new(inner)))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn witt(&self) -> &WittRing {
        &self.0.w
    }

    pub fn p(&self) -> u64 {
        self.0.spec.p
    }

    pub fn f(&self) -> usize {
        self.0.spec.f
    }

    pub fn e(&self) -> usize {
        self.0.e
    }

    pub fn precision(&self) -> u32 {
        self.0.spec.precision
    }

    pub fn modulus(&self) -> u64 {
        self.0.w.m
    }

    /// e·N, the valuation horizon.
    pub fn horizon(&self) -> u32 {
        self.e() as u32 * self.precision()
    }

    fn len(&self) -> usize {
        self.f() * self.e()
    }

    pub fn alpha(&self) -> &OkElem {
        &self.0.alpha
    }

    pub fn elem_from_u64(&self, c: &[u64]) -> OkElem {
        debug_assert_eq!(c.len(), self.len());
        OkElem(SmallVec::from_slice(c))
    }

    /// Build an element from a coefficient grid `grid[i][j]` of x^i u^j of any size.
    pub fn from_grid(&self, grid: &[Vec<i64>]) -> OkElem {
        let m = self.modulus();
        let rows = grid.len().max(1);
        let cols = grid.iter().map(|r| r.len()).max().unwrap_or(0).max(1);
        let mut acc = vec![vec![0u64; cols]; rows];
        for (i, r) in grid.iter().enumerate() {
            for (j, &c) in r.iter().enumerate() {
                acc[i][j] = reduce_i64(c, m);
            }
        }
        self.reduce_grid(acc)
    }

    /// Row-major flat coefficients of length f·e.
    pub fn from_flat(&self, c: &[i64]) -> Result<OkElem> {
        if c.len() != self.len() {
            return Err(Error::Parse(format!(
                "element needs {} coefficients, got {}",
                self.len(),
                c.len()
            )));
        }
        let m = self.modulus();
        Ok(OkElem(c.iter().map(|&x| reduce_i64(x, m)).collect()))
    }

    pub fn to_flat(&self, a: &OkElem) -> Vec<i64> {
        a.0.iter().map(|&x| x as i64).collect()
    }

    /// Reduce a grid indexed [x-degree][u-degree] via E and g.
    fn reduce_grid(&self, mut grid: Vec<Vec<u64>>) -> OkElem {
        let m = self.modulus();
        let e = self.e();
        let ucols = grid[0].len();
        // u^j for j >= e: u^e = -Σ_{k<e} E_k u^k
        for j in (e..ucols).rev() {
            for row in grid.iter_mut() {
                let c = row[j];
                if c == 0 {
                    continue;
                }
                row[j] = 0;
                for k in 0..e {
                    let t = mul_mod(c, self.0.eis[k], m);
                    row[j - e + k] = sub_mod(row[j - e + k], t, m);
                }
            }
        }
        let f = self.f();
        let mut out = SmallVec::from_elem(0u64, f * e);
        for j in 0..e.min(ucols) {
            let col: Vec<u64> = grid.iter().map(|r| r[j]).collect();
            let red = self.0.w.reduce_poly(col);
            for i in 0..f {
                out[i * e + j] = red[i];
            }
        }
        OkElem(out)
    }

    pub fn pi(&self) -> OkElem {
        self.from_grid(&[vec![0, 1]])
    }

    /// The generator x of the unramified part.
    pub fn x(&self) -> OkElem {
        let wx = self.0.w.x();
        self.from_witt(&wx)
    }

    pub fn from_witt(&self, a: &[u64]) -> OkElem {
        let e = self.e();
        let mut out = SmallVec::from_elem(0u64, self.len());
        for (i, &c) in a.iter().enumerate() {
            out[i * e] = c;
        }
        OkElem(out)
    }

    /// Coefficient of u^j as an element of W.
    pub fn u_coeff(&self, a: &OkElem, j: usize) -> Vec<u64> {
        let e = self.e();
        (0..self.f()).map(|i| a.0[i * e + j]).collect()
    }

    pub fn valuation(&self, a: &OkElem) -> Valuation {
        let p = self.p();
        let e = self.e();
        let mut best: Option<u32> = None;
        for (idx, &c) in a.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let j = (idx % e) as u32;
            let v = e as u32 * vp(c, p) + j;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.horizon()),
        }
    }

    /// Valuation clipped to the horizon.
    pub fn val(&self, a: &OkElem) -> u32 {
        self.valuation(a).value()
    }

    pub fn is_unit(&self, a: &OkElem) -> bool {
        self.valuation(a) == Valuation::Finite(0)
    }

    /// Image in the residue field k.
    pub fn residue(&self, a: &OkElem) -> Fq {
        let p = self.p();
        self.u_coeff(a, 0).iter().map(|&c| c % p).collect()
    }

    pub fn from_residue(&self, r: &Fq) -> OkElem {
        self.from_witt(r)
    }

    pub fn invert(&self, a: &OkElem) -> Result<OkElem> {
        let v = self.valuation(a);
        if v != Valuation::Finite(0) {
            return Err(Error::NotAUnit(v.value()));
        }
        let r = self.0.w.residue.inv(&self.residue(a)).expect("unit has nonzero residue");
        let mut b = self.from_residue(&r);
        let one = self.one();
        let two = self.from_int(2);
        for _ in 0..128 {
            let ab = self.mul(a, &b);
            if ab == one {
                return Ok(b);
            }
            b = self.mul(&b, &self.sub(&two, &ab));
        }
        Err(Error::PrecisionExhausted("Newton inversion did not converge".into()))
    }

    /// Some q with π·q ≡ a mod p^N; requires v(a) ≥ 1.
    pub fn divide_by_pi(&self, a: &OkElem) -> Result<OkElem> {
        if self.is_zero(a) {
            return Ok(a.clone());
        }
        if self.val(a) == 0 {
            return Err(Error::DivisionFailure("element is not divisible by π".into()));
        }
        let m = self.modulus();
        let p = self.p();
        let e = self.e();
        let f = self.f();
        let mut q = SmallVec::from_elem(0u64, f * e);
        for i in 0..f {
            for j in 1..e {
                q[i * e + j - 1] = a.0[i * e + j];
            }
            let a0 = a.0[i * e];
            debug_assert_eq!(a0 % p, 0);
            let c = mul_mod(a0 / p, self.0.e0_unit_inv, m);
            // c · (-(u^{e-1} + E_{e-1}u^{e-2} + ... + E_1))
            for k in 1..=e {
                let t = mul_mod(c, self.0.eis[k], m);
                q[i * e + k - 1] = sub_mod(q[i * e + k - 1], t, m);
            }
        }
        Ok(OkElem(q))
    }

    pub fn divide_by_pi_power(&self, a: &OkElem, k: u32) -> Result<OkElem> {
        let mut r = a.clone();
        for _ in 0..k {
            r = self.divide_by_pi(&r)?;
        }
        Ok(r)
    }

    /// Unit w and valuation v with a = π^v · w.
    pub fn unit_part(&self, a: &OkElem) -> Result<(OkElem, u32)> {
        match self.valuation(a) {
            Valuation::Finite(v) => Ok((self.divide_by_pi_power(a, v)?, v)),
            Valuation::AtLeast(_) => Err(Error::NotAUnit(self.horizon())),
        }
    }

    pub fn pow(&self, a: &OkElem, mut k: u64) -> OkElem {
        let mut r = self.one();
        let mut b = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        r
    }

    /// E'(π) = Σ i·E_i π^{i-1}.
    pub fn eval_e_derivative(&self) -> OkElem {
        let row: Vec<i64> = self
            .0
            .spec
            .eisenstein
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as i64 * c)
            .collect();
        self.from_grid(&[row])
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng>(&self, rng: &mut R) -> OkElem {
        let m = self.modulus();
        OkElem((0..self.len()).map(|_| rng.gen_range(0..m)).collect())
    }

    /// Random element of small height, convenient for readable instances.
    pub fn random_small<R: rand::Rng>(&self, rng: &mut R, bound: i64) -> OkElem {
        let m = self.modulus();
        OkElem((0..self.len()).map(|_| reduce_i64(rng.gen_range(-bound..=bound), m)).collect())
    }

    pub fn random_unit<R: rand::Rng>(&self, rng: &mut R) -> OkElem {
        loop {
            let a = self.random(rng);
            if self.is_unit(&a) {
                return a;
            }
        }
    }

    pub fn same_ring(&self, other: &OkRing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }
}

impl Ring for OkRing {
    type Elem = OkElem;

    fn zero(&self) -> OkElem {
        OkElem(SmallVec::from_elem(0, self.len()))
    }

    fn one(&self) -> OkElem {
        let mut z = self.zero();
        z.0[0] = 1 % self.modulus();
        z
    }

    fn add(&self, a: &OkElem, b: &OkElem) -> OkElem {
        let m = self.modulus();
        OkElem(a.0.iter().zip(b.0.iter()).map(|(&x, &y)| add_mod(x, y, m)).collect())
    }

    fn sub(&self, a: &OkElem, b: &OkElem) -> OkElem {
        let m = self.modulus();
        OkElem(a.0.iter().zip(b.0.iter()).map(|(&x, &y)| sub_mod(x, y, m)).collect())
    }

    fn neg(&self, a: &OkElem) -> OkElem {
        let m = self.modulus();
        OkElem(a.0.iter().map(|&x| neg_mod(x, m)).collect())
    }

    fn mul(&self, a: &OkElem, b: &OkElem) -> OkElem {
        let m = self.modulus();
        let (f, e) = (self.f(), self.e());
        if f == 1 && e == 1 {
            return OkElem(SmallVec::from_elem(mul_mod(a.0[0], b.0[0], m), 1));
        }
        let mut grid = vec![vec![0u64; 2 * e - 1]; 2 * f - 1];
        for (ia, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let (i1, j1) = (ia / e, ia % e);
            for (ib, &y) in b.0.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let (i2, j2) = (ib / e, ib % e);
                let cell = &mut grid[i1 + i2][j1 + j2];
                *cell = add_mod(*cell, mul_mod(x, y, m), m);
            }
        }
        self.reduce_grid(grid)
    }

    fn is_zero(&self, a: &OkElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn int_modulus(&self) -> u64 {
        self.modulus()
    }

    fn mul_int(&self, a: &OkElem, n: u64) -> OkElem {
        let m = self.modulus();
        OkElem(a.0.iter().map(|&x| mul_mod(x, n, m)).collect())
    }
}

impl OkModule for OkRing {
    fn ok_scale(&self, s: &OkElem, a: &OkElem) -> OkElem {
        self.mul(s, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, f_poly: Vec<i64>, eis: Vec<i64>, n: u32) -> OkRing {
        OkRing::new(RingSpec {
            p,
            f: f_poly.len() - 1,
            residue_min_poly: f_poly,
            eisenstein: eis,
            precision: n,
            assume_linear_disjoint: None,
        })
        .unwrap()
    }

    #[test]
    fn unramified_u_is_p() {
        let r = ring(3, vec![0, 1], vec![-3, 1], 6);
        let u = r.pi();
        assert_eq!(r.mul(&u, &u), r.from_int(9));
        assert_eq!(r.alpha(), &r.one());
    }

    #[test]
    fn ramified_product_reduces() {
        // (1+u)(1-u) = 1 - u^2 = 1 - 3 = -2 when E = u^2 - 3
        let r = ring(3, vec![0, 1], vec![-3, 0, 1], 6);
        let a = r.from_grid(&[vec![1, 1]]);
        let b = r.from_grid(&[vec![1, -1]]);
        assert_eq!(r.mul(&a, &b), r.from_int(-2));
        assert_eq!(r.alpha(), &r.from_grid(&[vec![0, 2]]));
        let r2 = ring(3, vec![1, 0, 1], vec![3, 3, 1], 6);
        assert_eq!(r2.alpha(), &r2.from_grid(&[vec![3, 2]]));
    }

    #[test]
    fn valuations() {
        let r = ring(3, vec![0, 1], vec![-3, 0, 1], 6);
        assert_eq!(r.valuation(&r.pi()), Valuation::Finite(1));
        assert_eq!(r.valuation(&r.from_int(3)), Valuation::Finite(2));
        assert_eq!(r.valuation(&r.zero()), Valuation::AtLeast(12));
        assert_eq!(r.valuation(&r.from_int(27)), Valuation::Finite(6));
    }

    #[test]
    fn inversion_geometric_series() {
        let r = ring(3, vec![0, 1], vec![-3, 1], 3);
        let inv = r.invert(&r.from_int(4)).unwrap();
        assert_eq!(inv, r.from_int(7));
        assert_eq!(r.invert(&r.pi()), Err(Error::NotAUnit(1)));
    }

    #[test]
    fn divide_by_pi_is_exact() {
        let r = ring(5, vec![2, 0, 1], vec![5, 5, 10, 1], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = r.random(&mut rng);
            let pa = r.mul(&r.pi(), &a);
            let q = r.divide_by_pi(&pa).unwrap();
            assert_eq!(r.mul(&r.pi(), &q), pa);
        }
    }

    #[test]
    fn residue_of_x_generates() {
        let r = ring(3, vec![1, 0, 1], vec![-3, 1], 4);
        let x = r.x();
        assert_eq!(r.add(&r.mul(&x, &x), &r.one()), r.zero());
        assert_eq!(r.residue(&x), vec![0, 1]);
    }
}

//! W(k) realized as (Z/p^N)[x]/(g) with g a lift of the residue polynomial.

use super::modint::{add_mod, inv_mod, mul_mod, reduce_i64, sub_mod};
use super::residue::ResidueField;

pub type WElem = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittRing {
    pub p: u64,
    pub f: usize,
    pub n: u32,
    pub m: u64,
    /// Monic modulus, f + 1 coefficients mod p^N.
    pub g: Vec<u64>,
    pub residue: ResidueField,
    sigma_x: WElem,
}

impl WittRing {
    pub fn new(p: u64, n: u32, g: &[i64]) -> Self {
        let m = p.pow(n);
        let f = g.len() - 1;
        let gm: Vec<u64> = g.iter().map(|&c| reduce_i64(c, m)).collect();
        let gp: Vec<u64> = g.iter().map(|&c| reduce_i64(c, p)).collect();
        let mut w = WittRing {
            p,
            f,
            n,
            m,
            g: gm,
            residue: ResidueField::new(p, gp),
            sigma_x: Vec::new(),
        };
        w.sigma_x = w.frobenius_of_x();
        w
    }

    pub fn zero(&self) -> WElem {
        vec![0; self.f]
    }

    pub fn one(&self) -> WElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> WElem {
        let mut v = self.zero();
        v[0] = reduce_i64(c, self.m);
        v
    }

    pub fn x(&self) -> WElem {
        if self.f == 1 {
            // x is the root of the linear g.
            return vec![super::modint::neg_mod(self.g[0], self.m)];
        }
        let mut v = self.zero();
        v[1] = 1;
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> WElem {
        a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, self.m)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> WElem {
        a.iter().zip(b).map(|(&x, &y)| sub_mod(x, y, self.m)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> WElem {
        a.iter().map(|&x| super::modint::neg_mod(x, self.m)).collect()
    }

    pub fn scale_int(&self, a: &[u64], k: u64) -> WElem {
        a.iter().map(|&x| mul_mod(x, k, self.m)).collect()
    }

    /// Reduce a polynomial in x of any length modulo g.
    pub fn reduce_poly(&self, mut r: Vec<u64>) -> WElem {
        let f = self.f;
        if r.len() > f {
            for top in (f..r.len()).rev() {
                let c = r[top];
                if c == 0 {
                    continue;
                }
                r[top] = 0;
                for i in 0..f {
                    let t = mul_mod(c, self.g[i], self.m);
                    r[top - f + i] = sub_mod(r[top - f + i], t, self.m);
                }
            }
        }
        r.resize(f, 0);
        r
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> WElem {
        if self.f == 1 {
            return vec![mul_mod(a[0], b[0], self.m)];
        }
        let mut r = vec![0u64; 2 * self.f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = add_mod(r[i + j], mul_mod(x, y, self.m), self.m);
            }
        }
        self.reduce_poly(r)
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> WElem {
        let mut r = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn to_residue(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&c| c % self.p).collect()
    }

    pub fn from_residue(&self, a: &[u64]) -> WElem {
        a.to_vec()
    }

    /// Inverse by Newton iteration b <- b(2 - ab) from the residue inverse.
    pub fn inv(&self, a: &[u64]) -> Option<WElem> {
        let r = self.residue.inv(&self.to_residue(a))?;
        let mut b = self.from_residue(&r);
        let two = self.from_int(2);
        for _ in 0..64 {
            let ab = self.mul(a, &b);
            if ab == self.one() {
                return Some(b);
            }
            b = self.mul(&b, &self.sub(&two, &ab));
        }
        None
    }

    /// g(y), or g'(y) when `derivative` is set, by Horner's rule.
    fn eval_g(&self, y: &[u64], derivative: bool) -> WElem {
        let mut acc = self.zero();
        let lowest = usize::from(derivative);
        for i in (lowest..=self.f).rev() {
            let c = if derivative {
                mul_mod(self.g[i], i as u64 % self.m, self.m)
            } else {
                self.g[i]
            };
            acc = self.mul(&acc, y);
            acc[0] = add_mod(acc[0], c, self.m);
        }
        acc
    }

    /// The root of g congruent to x^p mod p.
    fn frobenius_of_x(&self) -> WElem {
        let x = if self.f == 1 {
            vec![super::modint::neg_mod(self.g[0], self.m)]
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        };
        let mut y = self.pow(&x, self.p);
        for _ in 0..64 {
            let gy = self.eval_g(&y, false);
            if self.is_zero(&gy) {
                return y;
            }
            let d = self.inv(&self.eval_g(&y, true)).expect("g is separable mod p");
            y = self.sub(&y, &self.mul(&gy, &d));
        }
        panic!("Frobenius lift did not converge");
    }

    /// Frobenius automorphism: x maps to the Hensel lift of x^p.
    pub fn frobenius(&self, a: &[u64]) -> WElem {
        if self.f == 1 {
            return a.to_vec();
        }
        let mut acc = self.zero();
        for i in (0..self.f).rev() {
            acc = self.mul(&acc, &self.sigma_x);
            acc[0] = add_mod(acc[0], a[i], self.m);
        }
        acc
    }

    pub fn inv_int(&self, k: u64) -> Option<u64> {
        inv_mod(k % self.m, self.m)
    }
}

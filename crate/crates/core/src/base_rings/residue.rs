//! The residue field k = F_p[x]/(g) and polynomial helpers over F_p.

use super::modint::{add_mod, inv_mod, mul_mod, sub_mod};

pub type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = add_mod(r[i + j], mul_mod(x, y, p), p);
        }
    }
    trim(r)
}

/// Remainder of `a` modulo a nonzero `b`.
pub fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(*b.last().expect("division by zero polynomial"), p).unwrap();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(c, bi, p), p);
        }
        r = trim(r);
    }
    r
}

pub fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u64], mut e: u128, modulus: &[u64], p: u64) -> Poly {
    let mut result = vec![1u64];
    let mut b = poly_rem(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &b, p), modulus, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), modulus, p);
        e >>= 1;
    }
    result
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let r = (0..n)
        .map(|i| sub_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
        .collect();
    trim(r)
}

/// Rabin's test: a monic g of degree f is irreducible over F_p iff
/// x^(p^f) = x mod g and gcd(x^(p^(f/r)) - x, g) = 1 for each prime r | f.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let g = trim(g.to_vec());
    if g.len() < 2 {
        return false;
    }
    let f = (g.len() - 1) as u32;
    let x = vec![0u64, 1];
    let frob = |k: u32| -> Poly {
        let mut y = x.clone();
        for _ in 0..k {
            y = poly_powmod(&y, p as u128, &g, p);
        }
        y
    };
    if poly_sub(&frob(f), &poly_rem(&x, &g, p), p) != Vec::<u64>::new() {
        return false;
    }
    let mut n = f;
    let mut r = 2;
    let mut primes = Vec::new();
    while n > 1 {
        if n.is_multiple_of(r) {
            primes.push(r);
            while n.is_multiple_of(r) {
                n /= r;
            }
        }
        r += 1;
    }
    for r in primes {
        let h = poly_sub(&frob(f / r), &x, p);
        if poly_gcd(&h, &g, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Finite field F_q, q = p^f, elements as coefficient vectors of length f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub f: usize,
    pub modulus: Poly,
}

pub type Fq = Vec<u64>;

impl ResidueField {
    pub fn new(p: u64, modulus: Poly) -> Self {
        let f = modulus.len() - 1;
        ResidueField { p, f, modulus }
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.f as u32)
    }

    pub fn zero(&self) -> Fq {
        vec![0; self.f]
    }

    pub fn one(&self) -> Fq {
        let mut v = self.zero();
        v[0] = 1 % self.p;
        v
    }

    pub fn from_int(&self, n: i64) -> Fq {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    pub fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn pad(&self, r: Poly) -> Fq {
        let mut r = r;
        r.resize(self.f, 0);
        r
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, self.p)).collect()
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        a.iter().zip(b).map(|(&x, &y)| sub_mod(x, y, self.p)).collect()
    }

    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        self.pad(poly_rem(&poly_mul(a, b, self.p), &self.modulus, self.p))
    }

    pub fn pow(&self, a: &Fq, e: u128) -> Fq {
        self.pad(poly_powmod(a, e, &self.modulus, self.p))
    }

    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    pub fn mat_mul(&self, a: &[Vec<Fq>], b: &[Vec<Fq>]) -> Vec<Vec<Fq>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..k).fold(self.zero(), |acc, t| {
                            self.add(&acc, &self.mul(&a[i][t], &b[t][j]))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn mat_is_zero(&self, a: &[Vec<Fq>]) -> bool {
        a.iter().all(|row| row.iter().all(|x| self.is_zero(x)))
    }

    /// Returns true when `a^power` vanishes.
    pub fn mat_power_vanishes(&self, a: &[Vec<Fq>], power: usize) -> bool {
        if power == 0 {
            return a.is_empty();
        }
        let mut acc = a.to_vec();
        for _ in 1..power {
            if self.mat_is_zero(&acc) {
                return true;
            }
            acc = self.mat_mul(&acc, a);
        }
        self.mat_is_zero(&acc)
    }
}

//! Truncated divided-power series in several variables.
//!
//! A series stores the coefficient of X^{[I]} = Π X_v^{[I_v]} for every
//! multi-index with |I| ≤ cap. Products follow X^{[i]}X^{[j]} = C(i+j,i)X^{[i+j]}.

mod mono;
mod subst;

pub use mono::{Mono, MAX_VARS};
pub use subst::{
    divided_powers, face_map, matrix_binomial_power, pd_affine_power, pd_invert_affine,
    pd_substitute, substitute_many, structure_argument,
};

use std::collections::BTreeMap;

use crate::base_rings::modint::binomial_table;
use crate::base_rings::{OkElem, OkModule, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PdSeries<E> {
    pub nvars: usize,
    pub cap: usize,
    pub terms: BTreeMap<Mono, E>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> PdSeries<E> {
    pub fn zero(nvars: usize, cap: usize) -> Self {
        assert!(nvars <= MAX_VARS && cap <= Mono::MAX_EXP, "series shape out of range");
        PdSeries { nvars, cap, terms: BTreeMap::new() }
    }

    pub fn constant<R: Ring<Elem = E>>(ring: &R, nvars: usize, cap: usize, c: E) -> Self {
        let mut s = Self::zero(nvars, cap);
        s.add_term(ring, Mono::ZERO, c);
        s
    }

    pub fn monomial<R: Ring<Elem = E>>(ring: &R, nvars: usize, cap: usize, idx: &[usize], c: E) -> Self {
        let mut s = Self::zero(nvars, cap);
        s.add_term(ring, Mono::from_slice(idx), c);
        s
    }

    /// The variable X_v (0-based).
    pub fn var<R: Ring<Elem = E>>(ring: &R, nvars: usize, cap: usize, v: usize) -> Self {
        let mut idx = vec![0; nvars];
        idx[v] = 1;
        Self::monomial(ring, nvars, cap, &idx, ring.one())
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

    pub fn coeff(&self, m: Mono) -> Option<&E> {
        self.terms.get(&m)
    }

    pub fn coeff_or<R: Ring<Elem = E>>(&self, ring: &R, idx: &[usize]) -> E {
        self.terms.get(&Mono::from_slice(idx)).cloned().unwrap_or_else(|| ring.zero())
    }

    /// Adds c·X^{[m]}, dropping terms beyond the cap and exact zeros.
    pub fn add_term<R: Ring<Elem = E>>(&mut self, ring: &R, m: Mono, c: E) {
        if m.degree() > self.cap || ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = ring.add(old, &c);
                if ring.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn shape_check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.cap != other.cap {
            return Err(Error::ShapeMismatch(format!(
                "({} vars, cap {}) vs ({} vars, cap {})",
                self.nvars, self.cap, other.nvars, other.cap
            )));
        }
        Ok(())
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(ring, m, c.clone());
        }
        out
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(ring, m, ring.neg(c));
        }
        out
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        self.map(ring, |c| ring.neg(c))
    }

    /// Coefficientwise map; zero images are dropped.
    pub fn map<R: Ring<Elem = E>>(&self, ring: &R, mut f: impl FnMut(&E) -> E) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (&m, c) in &self.terms {
            out.add_term(ring, m, f(c));
        }
        out
    }

    pub fn scale_left<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(ring, |x| ring.mul(c, x))
    }

    pub fn scale_right<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(ring, |x| ring.mul(x, c))
    }

    pub fn ok_scale<R: OkModule<Elem = E>>(&self, ring: &R, s: &OkElem) -> Self {
        self.map(ring, |x| ring.ok_scale(s, x))
    }

    pub fn mul_int<R: Ring<Elem = E>>(&self, ring: &R, n: u64) -> Self {
        self.map(ring, |x| ring.mul_int(x, n))
    }

    /// Re-truncate at a smaller cap.
    pub fn truncate(&self, cap: usize) -> Self {
        let mut out = Self::zero(self.nvars, cap.min(self.cap));
        for (&m, c) in &self.terms {
            if m.degree() <= cap {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// Same coefficients viewed with another cap (terms above it are dropped).
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut out = self.truncate(cap);
        out.cap = cap;
        out
    }

    /// Terms of total degree exactly d.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (&m, c) in &self.terms {
            if m.degree() == d {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Evaluation at X = 0.
    pub fn degeneracy<R: Ring<Elem = E>>(&self, ring: &R) -> E {
        self.terms.get(&Mono::ZERO).cloned().unwrap_or_else(|| ring.zero())
    }

    /// ∂/∂X_v sending X_v^{[n]} to X_v^{[n-1]}.
    pub fn derivative<R: Ring<Elem = E>>(&self, ring: &R, v: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (&m, c) in &self.terms {
            if m.get(v) > 0 {
                out.add_term(ring, m.with(v, m.get(v) - 1), c.clone());
            }
        }
        out
    }

    /// First monomial of degree ≤ `upto` where the two series differ.
    pub fn first_difference<R: Ring<Elem = E>>(&self, ring: &R, other: &Self, upto: usize) -> Option<Mono> {
        let mut keys: Vec<Mono> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().filter(|m| m.degree() <= upto).find(|m| {
            let a = self.terms.get(m);
            let b = other.terms.get(m);
            match (a, b) {
                (Some(x), Some(y)) => x != y,
                (Some(x), None) | (None, Some(x)) => !ring.is_zero(x),
                (None, None) => false,
            }
        })
    }

    pub fn agrees_upto<R: Ring<Elem = E>>(&self, ring: &R, other: &Self, upto: usize) -> bool {
        self.first_difference(ring, other, upto).is_none()
    }

    /// Insert a fresh variable at 0-based position `pos` with exponent 0.
    pub fn insert_variable(&self, pos: usize) -> Self {
        let mut out = Self::zero(self.nvars + 1, self.cap);
        for (&m, c) in &self.terms {
            out.terms.insert(m.insert_zero(pos, self.nvars), c.clone());
        }
        out
    }
}

/// Product with the divided-power multiplication law, truncated at the cap.
pub fn pd_mul<R: Ring>(ring: &R, a: &PdSeries<R::Elem>, b: &PdSeries<R::Elem>) -> Result<PdSeries<R::Elem>> {
    a.shape_check(b)?;
    Ok(pd_mul_unchecked(ring, a, b))
}

pub(crate) fn pd_mul_unchecked<R: Ring>(ring: &R, a: &PdSeries<R::Elem>, b: &PdSeries<R::Elem>) -> PdSeries<R::Elem> {
    let cap = a.cap;
    let table = binomial_table(cap, ring.int_modulus());
    let mut acc: BTreeMap<Mono, R::Elem> = BTreeMap::new();
    for (&ma, ca) in &a.terms {
        let da = ma.degree();
        for (&mb, cb) in &b.terms {
            if da + mb.degree() > cap {
                continue;
            }
            let sum = ma.add(mb);
            let mut factor = 1u64;
            for v in 0..a.nvars {
                let (i, j) = (ma.get(v), mb.get(v));
                if i > 0 && j > 0 {
                    factor = crate::base_rings::modint::mul_mod(factor, table[i + j][i], ring.int_modulus());
                }
            }
            let prod = ring.mul_int(&ring.mul(ca, cb), factor);
            match acc.get_mut(&sum) {
                Some(x) => *x = ring.add(x, &prod),
                None => {
                    acc.insert(sum, prod);
                }
            }
        }
    }
    acc.retain(|_, c| !ring.is_zero(c));
    PdSeries { nvars: a.nvars, cap, terms: acc }
}

/// c·X^{[m]} times a series.
pub fn mul_monomial<R: Ring>(ring: &R, s: &PdSeries<R::Elem>, m: Mono, c: &R::Elem) -> PdSeries<R::Elem> {
    let table = binomial_table(s.cap, ring.int_modulus());
    let mut out = PdSeries::zero(s.nvars, s.cap);
    let dm = m.degree();
    for (&k, a) in &s.terms {
        if k.degree() + dm > s.cap {
            continue;
        }
        let mut factor = 1u64;
        for v in 0..s.nvars {
            let (i, j) = (k.get(v), m.get(v));
            if i > 0 && j > 0 {
                factor = crate::base_rings::modint::mul_mod(factor, table[i + j][i], ring.int_modulus());
            }
        }
        out.add_term(ring, k.add(m), ring.mul_int(&ring.mul(a, c), factor));
    }
    out
}

/// Product of a scalar series with a series over an O_K-module.
pub fn pd_mul_scalar<R: OkModule>(
    ring: &R,
    s: &PdSeries<OkElem>,
    a: &PdSeries<R::Elem>,
) -> Result<PdSeries<R::Elem>> {
    s.shape_check_other(a)?;
    let cap = a.cap;
    let table = binomial_table(cap, ring.int_modulus());
    let mut out = PdSeries::zero(a.nvars, cap);
    for (&ms, cs) in &s.terms {
        for (&ma, ca) in &a.terms {
            if ms.degree() + ma.degree() > cap {
                continue;
            }
            let mut factor = 1u64;
            for v in 0..a.nvars {
                let (i, j) = (ms.get(v), ma.get(v));
                if i > 0 && j > 0 {
                    factor = crate::base_rings::modint::mul_mod(factor, table[i + j][i], ring.int_modulus());
                }
            }
            out.add_term(ring, ms.add(ma), ring.mul_int(&ring.ok_scale(cs, ca), factor));
        }
    }
    Ok(out)
}

impl PdSeries<OkElem> {
    fn shape_check_other<E>(&self, other: &PdSeries<E>) -> Result<()> {
        if self.nvars != other.nvars || self.cap != other.cap {
            return Err(Error::ShapeMismatch(format!(
                "({} vars, cap {}) vs ({} vars, cap {})",
                self.nvars, self.cap, other.nvars, other.cap
            )));
        }
        Ok(())
    }
}

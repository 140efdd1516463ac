//! Dense matrices over a [`Ring`] context, and the ring of square matrices.

use super::ok::{OkElem, OkRing, Valuation};
use super::{OkModule, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

pub fn zeros<R: Ring>(ring: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(rows, cols, |_, _| ring.zero())
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
}

pub fn scalar<R: Ring>(ring: &R, n: usize, c: &R::Elem) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { ring.zero() })
}

pub fn mat_mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows, "matrix shapes do not compose");
    let mut out = zeros(ring, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if ring.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if ring.is_zero(y) {
                    continue;
                }
                let idx = i * out.cols + j;
                out.data[idx] = ring.add(&out.data[idx], &ring.mul(x, y));
            }
        }
    }
    out
}

pub fn mat_add<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.add(x, y)).collect(),
    }
}

pub fn mat_sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.sub(x, y)).collect(),
    }
}

pub fn mat_scale<R: Ring>(ring: &R, c: &R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| ring.mul(c, x))
}

pub fn mat_vec<R: Ring>(ring: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    (0..a.rows)
        .map(|i| {
            (0..a.cols).fold(ring.zero(), |acc, j| ring.add(&acc, &ring.mul(a.get(i, j), &v[j])))
        })
        .collect()
}

pub fn mat_is_zero<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> bool {
    a.data.iter().all(|x| ring.is_zero(x))
}

/// A + c·I.
pub fn add_scalar<R: Ring>(ring: &R, a: &Matrix<R::Elem>, c: &R::Elem) -> Matrix<R::Elem> {
    let mut out = a.clone();
    for i in 0..a.rows.min(a.cols) {
        let idx = i * a.cols + i;
        out.data[idx] = ring.add(&out.data[idx], c);
    }
    out
}

pub fn min_valuation(ring: &OkRing, a: &Matrix<OkElem>) -> Valuation {
    a.data
        .iter()
        .map(|x| ring.valuation(x))
        .min()
        .unwrap_or(Valuation::AtLeast(ring.horizon()))
}

/// Residue-field image of a matrix over O_K.
pub fn residue_matrix(ring: &OkRing, a: &Matrix<OkElem>) -> Vec<Vec<Vec<u64>>> {
    (0..a.rows).map(|i| (0..a.cols).map(|j| ring.residue(a.get(i, j))).collect()).collect()
}

/// Inverse over O_K by Gauss–Jordan elimination with unit pivots.
pub fn mat_inverse(ring: &OkRing, a: &Matrix<OkElem>) -> Result<Matrix<OkElem>> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    let mut m = a.clone();
    let mut inv = identity(ring, n);
    for c in 0..n {
        let piv = (c..n)
            .find(|&r| ring.is_unit(m.get(r, c)))
            .ok_or_else(|| Error::NotAUnit(min_valuation(ring, a).value()))?;
        m.swap_rows(c, piv);
        inv.swap_rows(c, piv);
        let s = ring.invert(m.get(c, c))?;
        for j in 0..n {
            m.set(c, j, ring.mul(&s, m.get(c, j)));
            inv.set(c, j, ring.mul(&s, inv.get(c, j)));
        }
        for r in 0..n {
            if r == c || ring.is_zero(m.get(r, c)) {
                continue;
            }
            let t = m.get(r, c).clone();
            for j in 0..n {
                let x = ring.sub(m.get(r, j), &ring.mul(&t, m.get(c, j)));
                m.set(r, j, x);
                let y = ring.sub(inv.get(r, j), &ring.mul(&t, inv.get(c, j)));
                inv.set(r, j, y);
            }
        }
    }
    Ok(inv)
}

/// Square n×n matrices over a base ring.
#[derive(Clone, Debug)]
pub struct MatRing<R: Ring> {
    pub base: R,
    pub n: usize,
}

impl<R: Ring> MatRing<R> {
    pub fn new(base: R, n: usize) -> Self {
        MatRing { base, n }
    }
}

impl<R: Ring> Ring for MatRing<R> {
    type Elem = Matrix<R::Elem>;

    fn zero(&self) -> Self::Elem {
        zeros(&self.base, self.n, self.n)
    }

    fn one(&self) -> Self::Elem {
        identity(&self.base, self.n)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        mat_add(&self.base, a, b)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        mat_sub(&self.base, a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.map(|x| self.base.neg(x))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        mat_mul(&self.base, a, b)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        mat_is_zero(&self.base, a)
    }

    fn int_modulus(&self) -> u64 {
        self.base.int_modulus()
    }

    fn mul_int(&self, a: &Self::Elem, n: u64) -> Self::Elem {
        a.map(|x| self.base.mul_int(x, n))
    }
}

impl<R: OkModule> OkModule for MatRing<R> {
    fn ok_scale(&self, s: &OkElem, a: &Self::Elem) -> Self::Elem {
        a.map(|x| self.base.ok_scale(s, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_rings::RingSpec;

    #[test]
    fn identity_is_neutral() {
        let r = OkRing::new(RingSpec::unramified(3, 4)).unwrap();
        let a = Matrix::from_fn(2, 2, |i, j| r.from_int((i * 2 + j) as i64 + 1));
        let mr = MatRing::new(r.clone(), 2);
        assert_eq!(mr.mul(&mr.one(), &a), a);
        assert_eq!(mr.mul(&a, &mr.one()), a);
        let v = vec![r.one(), r.from_int(2)];
        assert_eq!(mat_vec(&r, &a, &v), vec![r.from_int(5), r.from_int(11)]);
    }
}

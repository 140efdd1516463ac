use super::{monomials_of_degree, CechComplex, CechLevel};
use crate::base_rings::matrix::{add_scalar, mat_vec};
use crate::base_rings::{OkElem, Ring};
use crate::error::{Error, Result};
use crate::pd_series::Mono;

pub const MAX_PREIMAGE_LEVEL: usize = 4;

fn require_cocycle(cx: &CechComplex, f: &CechLevel, s: usize) -> Result<()> {
    if f.level != s {
        return Err(Error::ShapeMismatch(format!("expected a level-{s} element, got level {}", f.level)));
    }
    let df = cx.differential(f)?;
    if let Some((r, m)) = df.first_difference(cx.ring(), &CechLevel::zero(s + 1, cx.rank(), cx.cap), cx.cap) {
        return Err(Error::NotInKernel(format!("d{s}(f) is nonzero at component {r}, X^{m}")));
    }
    Ok(())
}

fn certify(cx: &CechComplex, g: &CechLevel, f: &CechLevel) -> Result<()> {
    let dg = cx.differential(g)?;
    if let Some((r, m)) = dg.first_difference(cx.ring(), f, cx.cap) {
        return Err(Error::ReconstructionMismatch(format!("d(g) and f differ at component {r}, X^{m}")));
    }
    Ok(())
}

/// g(X_1) = Σ b_n X_1^{[n]} with b_0 = a_{0,0}, b_1 = 0 and
/// b_{n+1} = (A + nα) b_n − a_{1,n}; certifies d^1(g) = f.
pub fn preimage_s2(cx: &CechComplex, f: &CechLevel) -> Result<CechLevel> {
    require_cocycle(cx, f, 2)?;
    let ok = cx.ring();
    let a = &cx.crystal.matrix;
    let alpha = ok.alpha();
    let l = cx.rank();
    let mut g = CechLevel::zero(1, l, cx.cap);
    let mut b = f.coeff(ok, &[0, 0]);
    for n in 0..=cx.cap {
        for (s, c) in g.data.iter_mut().zip(&b) {
            s.add_term(ok, Mono::from_slice(&[n]), c.clone());
        }
        b = if n == 0 {
            vec![ok.zero(); l]
        } else {
            let t = mat_vec(ok, &add_scalar(ok, a, &ok.mul_int(alpha, n as u64)), &b);
            let a1n = f.coeff(ok, &[1, n]);
            t.iter().zip(&a1n).map(|(x, y)| ok.sub(x, y)).collect()
        };
    }
    certify(cx, &g, f)?;
    Ok(g)
}

/// Degree-n block of the equal-degree part of d^{s-1}, reduced to echelon
/// form with unit pivots; columns without a pivot are gauge-fixed to zero.
struct Block {
    rows: Vec<Mono>,
    cols: Vec<Mono>,
    matrix: Vec<Vec<OkElem>>,
}

impl Block {
    fn new(cx: &CechComplex, s: usize, n: usize) -> Result<Self> {
        let ok = cx.ring();
        let rows = monomials_of_degree(s, n);
        let cols = monomials_of_degree(s - 1, n);
        let mut matrix = vec![vec![ok.zero(); cols.len()]; rows.len()];
        for (c, &m) in cols.iter().enumerate() {
            let d = cx.differential(&cx.basis_element(s - 1, 0, m))?;
            for (r, &rm) in rows.iter().enumerate() {
                if let Some(x) = d.data[0].coeff(rm) {
                    matrix[r][c] = x.clone();
                }
            }
        }
        Ok(Block { rows, cols, matrix })
    }

    /// Solves the block against right-hand sides given per row (one vector
    /// per row, one entry per module component).
    fn solve(&self, cx: &CechComplex, rhs: Vec<Vec<OkElem>>) -> Result<Vec<Vec<OkElem>>> {
        let ok = cx.ring();
        let l = cx.rank();
        let mut m = self.matrix.clone();
        let mut b = rhs;
        let mut used = vec![false; self.rows.len()];
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        for c in 0..self.cols.len() {
            let Some(r) = (0..self.rows.len()).find(|&r| !used[r] && ok.is_unit(&m[r][c])) else {
                continue;
            };
            used[r] = true;
            let inv = ok.invert(&m[r][c])?;
            for x in m[r].iter_mut() {
                *x = ok.mul(&inv, x);
            }
            for x in b[r].iter_mut() {
                *x = ok.mul(&inv, x);
            }
            for r2 in 0..self.rows.len() {
                if r2 == r || ok.is_zero(&m[r2][c]) {
                    continue;
                }
                let t = m[r2][c].clone();
                for c2 in 0..self.cols.len() {
                    let v = ok.sub(&m[r2][c2], &ok.mul(&t, &m[r][c2]));
                    m[r2][c2] = v;
                }
                for k in 0..l {
                    let v = ok.sub(&b[r2][k], &ok.mul(&t, &b[r][k]));
                    b[r2][k] = v;
                }
            }
            pivots.push((r, c));
        }
        for (r, row) in b.iter().enumerate() {
            if !used[r] && row.iter().any(|x| !ok.is_zero(x)) {
                return Err(Error::NotInImage(format!("degree-{} block is inconsistent at X^{}", self.rows[r].degree(), self.rows[r])));
            }
        }
        let mut x = vec![vec![ok.zero(); l]; self.cols.len()];
        for (r, c) in pivots {
            x[c] = b[r].clone();
        }
        Ok(x)
    }
}

/// Preimage under d^{s-1} of a level-s cocycle, built one total degree at
/// a time: the equal-degree part of d is the untwisted differential, whose
/// degree-n block is solved exactly; the twisted tail of d(g_n) feeds the
/// right-hand side of later degrees. The result is certified by d(g) = f.
pub fn preimage_general(cx: &CechComplex, s: usize, f: &CechLevel) -> Result<CechLevel> {
    if !(2..=MAX_PREIMAGE_LEVEL).contains(&s) {
        return Err(Error::UnsupportedLevel(s));
    }
    require_cocycle(cx, f, s)?;
    let ok = cx.ring();
    let l = cx.rank();
    let mut g = CechLevel::zero(s - 1, l, cx.cap);
    let mut image = CechLevel::zero(s, l, cx.cap);
    for n in 0..=cx.cap {
        let block = Block::new(cx, s, n)?;
        let rhs: Vec<Vec<OkElem>> = block
            .rows
            .iter()
            .map(|&m| {
                let a = f.coeff_mono(ok, m);
                let done = image.coeff_mono(ok, m);
                a.iter().zip(&done).map(|(x, y)| ok.sub(x, y)).collect()
            })
            .collect();
        let x = block.solve(cx, rhs)?;
        let mut gn = CechLevel::zero(s - 1, l, cx.cap);
        for (&m, v) in block.cols.iter().zip(x) {
            for (series, c) in gn.data.iter_mut().zip(v) {
                series.add_term(ok, m, c);
            }
        }
        if !gn.is_zero() {
            image = image.add(ok, &cx.differential(&gn)?);
            g = g.add(ok, &gn);
        }
    }
    certify(cx, &g, f)?;
    Ok(g)
}


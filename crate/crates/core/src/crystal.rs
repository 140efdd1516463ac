//! Hodge–Tate crystals as pairs (M, A): admissibility, stratifications and
//! the cocycle conditions they satisfy.

use crate::base_rings::matrix::{add_scalar, identity, mat_add, mat_mul, mat_sub, min_valuation, residue_matrix, Matrix};
use crate::base_rings::modint::binomial_table;
use crate::base_rings::{MatRing, OkElem, OkRing, Ring};
use crate::error::{Error, Result};
use crate::pd_series::{
    pd_affine_power, pd_mul, pd_mul_scalar, pd_substitute, structure_argument, Mono, PdSeries,
};

/// A free O_K-module with an endomorphism, given by its matrix in a basis.
/// When `denominator_exp` is k > 0 the endomorphism is `matrix / π^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Crystal {
    pub ring: OkRing,
    pub matrix: Matrix<OkElem>,
    pub denominator_exp: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilpotencyVerdict {
    CertifiedNilpotent { n_star: usize, attained_valuation: u32 },
    ResidueObstruction { witness_power: usize },
    Inconclusive { budget: usize },
}

impl NilpotencyVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, NilpotencyVerdict::CertifiedNilpotent { .. })
    }
}

impl Crystal {
    pub fn new(ring: OkRing, matrix: Matrix<OkElem>) -> Result<Self> {
        Self::with_denominator(ring, matrix, 0)
    }

    pub fn with_denominator(ring: OkRing, matrix: Matrix<OkElem>, denominator_exp: u32) -> Result<Self> {
        if matrix.rows != matrix.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", matrix.rows, matrix.cols)));
        }
        Ok(Crystal { ring, matrix, denominator_exp })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows
    }

    pub fn is_integral(&self) -> bool {
        self.denominator_exp == 0
    }

    fn require_integral(&self) -> Result<()> {
        if self.is_integral() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(format!(
                "lattice operations need an integral matrix (denominator π^{})",
                self.denominator_exp
            )))
        }
    }

    /// Admissibility at the default target and budget.
    pub fn nilpotency(&self) -> NilpotencyVerdict {
        let ok = &self.ring;
        let target = ok.horizon();
        check_nilpotent(ok, &self.matrix, ok.alpha(), target, default_budget(ok, self.rank(), target))
    }

    pub fn require_admissible(&self) -> Result<()> {
        self.require_integral()?;
        match self.nilpotency() {
            NilpotencyVerdict::CertifiedNilpotent { .. } => Ok(()),
            v => Err(Error::NotAdmissible(format!("{v:?}"))),
        }
    }
}

pub fn default_budget(ok: &OkRing, rank: usize, target: u32) -> usize {
    ok.p() as usize * (target as usize + rank * ok.horizon() as usize)
}

/// Decides whether Π_{i<n}(A + iα) tends to zero, to valuation `target`.
pub fn check_nilpotent(ok: &OkRing, a: &Matrix<OkElem>, alpha: &OkElem, target: u32, n_max: usize) -> NilpotencyVerdict {
    let l = a.rows;
    let mut block = identity(ok, l);
    for i in 0..ok.p() {
        block = mat_mul(ok, &block, &add_scalar(ok, a, &ok.mul_int(alpha, i)));
    }
    let k = &ok.witt().residue;
    if !k.mat_power_vanishes(&residue_matrix(ok, &block), l) {
        return NilpotencyVerdict::ResidueObstruction { witness_power: l };
    }
    let mut prod = identity(ok, l);
    for n in 1..=n_max {
        let factor = add_scalar(ok, a, &ok.mul_int(alpha, (n - 1) as u64));
        prod = mat_mul(ok, &prod, &factor);
        let v = min_valuation(ok, &prod).value();
        if v >= target {
            return NilpotencyVerdict::CertifiedNilpotent { n_star: n, attained_valuation: v };
        }
    }
    NilpotencyVerdict::Inconclusive { budget: n_max }
}

/// A_0 = I, A_{k+1} = A_k(kα + A).
pub fn strat_coeffs(c: &Crystal, n: usize) -> Vec<Matrix<OkElem>> {
    coeff_sequence(&c.ring, &c.matrix, c.ring.alpha(), n)
}

pub(crate) fn coeff_sequence(ok: &OkRing, a: &Matrix<OkElem>, alpha: &OkElem, n: usize) -> Vec<Matrix<OkElem>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = identity(ok, a.rows);
    for k in 0..=n {
        out.push(cur.clone());
        if k < n {
            cur = mat_mul(ok, &cur, &add_scalar(ok, a, &ok.mul_int(alpha, k as u64)));
        }
    }
    out
}

fn series_from_coeffs(ok: &OkRing, coeffs: &[Matrix<OkElem>], nvars: usize, var: usize, cap: usize) -> PdSeries<Matrix<OkElem>> {
    let mr = MatRing::new(ok.clone(), coeffs[0].rows);
    let mut out = PdSeries::zero(nvars, cap);
    let mut idx = vec![0; nvars];
    for (n, a) in coeffs.iter().enumerate().take(cap + 1) {
        idx[var] = n;
        out.add_term(&mr, Mono::from_slice(&idx), a.clone());
    }
    out
}

/// ε = Σ A_n X^{[n]} up to degree `cap`.
pub fn build_stratification(c: &Crystal, cap: usize) -> Result<PdSeries<Matrix<OkElem>>> {
    c.require_admissible()?;
    Ok(series_from_coeffs(&c.ring, &strat_coeffs(c, cap), 1, 0, cap))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub degree: usize,
    pub coefficient_identities: usize,
    pub two_variable_terms: usize,
}

/// Checks the coefficient identities, the two-variable cocycle identity and
/// Δ*(ε) = I for the stratification of `c`, all up to degree `cap`.
pub fn verify_cocycle(c: &Crystal, cap: usize) -> Result<CocycleReport> {
    c.require_admissible()?;
    let coeffs = strat_coeffs(c, 2 * cap + 1);
    verify_cocycle_coeffs(&c.ring, c.ring.alpha(), &coeffs, cap)
}

/// Same checks for an explicit coefficient sequence A_0..A_{2D+1}.
pub fn verify_cocycle_coeffs(ok: &OkRing, alpha: &OkElem, coeffs: &[Matrix<OkElem>], cap: usize) -> Result<CocycleReport> {
    if coeffs.len() < 2 * cap + 1 {
        return Err(Error::ShapeMismatch(format!("need {} coefficients, got {}", 2 * cap + 1, coeffs.len())));
    }
    let l = coeffs[0].rows;
    let mr = MatRing::new(ok.clone(), l);
    if coeffs[0] != identity(ok, l) {
        return Err(Error::CocycleViolation { at: "degeneracy: A_0 ≠ I".into() });
    }
    let table = binomial_table(2 * cap + 1, ok.modulus());
    let powers: Vec<PdSeries<OkElem>> =
        (0..=2 * cap).map(|m| pd_affine_power(ok, alpha, -(m as i64), 1, cap, 0)).collect();
    let mut identities = 0;
    for n in 0..=cap {
        let mut lhs = PdSeries::zero(1, cap);
        for i in 0..=cap {
            let mut t = PdSeries::zero(1, cap);
            for j in 0..=cap - i {
                let c = mat_mul(ok, &coeffs[n + i], &coeffs[j]);
                t.add_term(&mr, Mono::from_slice(&[i + j]), mr.mul_int(&c, table[i + j][i]));
            }
            let mut term = pd_mul_scalar(&mr, &powers[n + i], &t)?;
            if i % 2 == 1 {
                term = term.neg(&mr);
            }
            lhs = lhs.add(&mr, &term);
        }
        let rhs = PdSeries::constant(&mr, 1, cap, coeffs[n].clone());
        if let Some(m) = lhs.first_difference(&mr, &rhs, cap) {
            return Err(Error::CocycleViolation { at: format!("coefficient identity n={n}, X1-degree {}", m.get(0)) });
        }
        identities += 1;
    }

    let eps1 = series_from_coeffs(ok, coeffs, 2, 0, cap);
    let eps2 = series_from_coeffs(ok, coeffs, 2, 1, cap);
    let eps = series_from_coeffs(ok, coeffs, 1, 0, cap);
    let arg = structure_argument(ok, alpha, 2, cap, 1);
    let moved = pd_substitute(&mr, ok, &eps, &arg)?;
    let lhs = pd_mul(&mr, &moved, &eps1)?;
    if let Some(m) = lhs.first_difference(&mr, &eps2, cap) {
        return Err(Error::CocycleViolation { at: format!("two-variable identity at monomial {m}") });
    }
    Ok(CocycleReport { degree: cap, coefficient_identities: identities, two_variable_terms: lhs.len() })
}

/// Reads A from the X^{[1]} coefficient and checks the remaining ones.
pub fn pair_from_stratification(ok: &OkRing, eps: &PdSeries<Matrix<OkElem>>) -> Result<Crystal> {
    if eps.nvars != 1 {
        return Err(Error::ShapeMismatch(format!("stratification in {} variables", eps.nvars)));
    }
    let first = eps.terms.values().next().ok_or(Error::NotAStratification { index: 0 })?;
    let l = first.rows;
    let zero = crate::base_rings::matrix::zeros(ok, l, l);
    let coeff = |n: usize| eps.coeff(Mono::from_slice(&[n])).cloned().unwrap_or_else(|| zero.clone());
    if coeff(0) != identity(ok, l) {
        return Err(Error::NotAStratification { index: 0 });
    }
    let a = coeff(1);
    let crystal = Crystal::new(ok.clone(), a.clone())?;
    crystal.require_admissible()?;
    let alpha = ok.alpha();
    let mut cur = a.clone();
    for n in 1..eps.cap {
        cur = mat_mul(ok, &cur, &add_scalar(ok, &a, &ok.mul_int(alpha, n as u64)));
        if coeff(n + 1) != cur {
            return Err(Error::NotAStratification { index: n + 1 });
        }
    }
    Ok(crystal)
}

/// Adds `delta` to A_n, for negative controls.
pub fn perturb(ok: &OkRing, coeffs: &mut [Matrix<OkElem>], n: usize, delta: &Matrix<OkElem>) {
    coeffs[n] = mat_add(ok, &coeffs[n], delta);
}

/// Difference of consecutive recursion terms, zero for a genuine sequence.
pub fn recursion_defect(ok: &OkRing, a: &Matrix<OkElem>, alpha: &OkElem, coeffs: &[Matrix<OkElem>]) -> Option<usize> {
    (0..coeffs.len().saturating_sub(1)).find(|&n| {
        let next = mat_mul(ok, &coeffs[n], &add_scalar(ok, a, &ok.mul_int(alpha, n as u64)));
        !crate::base_rings::matrix::mat_is_zero(ok, &mat_sub(ok, &next, &coeffs[n + 1]))
    })
}

#[cfg(test)]
mod tests;

//! The derivation ∇ = (τ − 1)/(π(ζ_p − 1)) on univariate divided-power series.

use super::{CycElem, CycSpec, LamElem};
use crate::base_rings::{OkElem, OkModule, Ring};
use crate::error::{Error, Result};
use crate::pd_series::{pd_mul, Mono, PdSeries};

/// λ·(1 + (ζ−1)πλα)^{-1}.
fn l0(cs: &CycSpec) -> LamElem {
    let lam = &cs.lam;
    let cyc = cs.cyc();
    let ok = cs.ok();
    let zm1 = cyc.sub(&cyc.zeta_pow(1), &cyc.one());
    let t = cyc.neg(&cyc.ok_scale(&ok.mul(&ok.pi(), ok.alpha()), &zm1));
    lam.mul(&lam.lambda(), &lam.geometric(&t))
}

/// π^k (ζ−1)^j / d! as an element of O_K[ζ_p].
fn divided_zeta_term(cs: &CycSpec, k: usize, j: usize, d: usize) -> Result<CycElem> {
    let cyc = cs.cyc();
    let ok = cs.ok();
    let w = cyc.divided_one_minus_zeta(j, d)?;
    let w = if j % 2 == 1 { cyc.neg(&w) } else { w };
    Ok(cyc.ok_scale(&ok.pow(&ok.pi(), k as u64), &w))
}

fn lift(cs: &CycSpec, f: &PdSeries<OkElem>) -> PdSeries<LamElem> {
    let mut out = PdSeries::zero(f.nvars, f.cap);
    for (m, c) in &f.terms {
        out.add_term(&cs.lam, *m, cs.lam.constant(cs.cyc().from_ok(c)));
    }
    out
}

fn check_univariate(f: &PdSeries<OkElem>) -> Result<()> {
    if f.nvars != 1 {
        return Err(Error::ShapeMismatch(format!("expected a series in one variable, got {}", f.nvars)));
    }
    Ok(())
}

/// ∇X = L0·(1 − αX).
fn nabla_x(cs: &CycSpec, cap: usize) -> PdSeries<LamElem> {
    let lam = &cs.lam;
    let l0 = l0(cs);
    let mut s = PdSeries::zero(1, cap);
    s.add_term(lam, Mono::ZERO, l0.clone());
    let a = cs.cyc().from_ok(&cs.ok().neg(cs.ok().alpha()));
    s.add_term(lam, Mono::from_slice(&[1]), l0.iter().map(|c| cs.cyc().mul(c, &a)).collect());
    s
}

fn scale_series(cs: &CycSpec, s: &PdSeries<LamElem>, c: &CycElem) -> PdSeries<LamElem> {
    s.map(&cs.lam, |x| x.iter().map(|y| cs.cyc().mul(y, c)).collect())
}

/// ∇(X^{[n]}) = Σ_{k=1}^{n} π^{k−1}(ζ−1)^{k−1}/k!·(∇X)^k·X^{[n−k]}, extended
/// linearly. Coefficients of f are constants for τ.
pub fn nabla_pd(cs: &CycSpec, f: &PdSeries<OkElem>) -> Result<PdSeries<LamElem>> {
    check_univariate(f)?;
    let lam = &cs.lam;
    let cap = f.cap;
    let nx = nabla_x(cs, cap);
    let mut powers = vec![PdSeries::constant(lam, 1, cap, lam.one())];
    for k in 1..=cap {
        powers.push(pd_mul(lam, &powers[k - 1], &nx)?);
    }
    let mut basis = Vec::with_capacity(cap + 1);
    for n in 0..=cap {
        let mut acc = PdSeries::zero(1, cap);
        for k in 1..=n {
            let c = divided_zeta_term(cs, k - 1, k - 1, k)?;
            let xm = PdSeries::monomial(lam, 1, cap, &[n - k], lam.one());
            acc = acc.add(lam, &scale_series(cs, &pd_mul(lam, &powers[k], &xm)?, &c));
        }
        basis.push(acc);
    }
    let mut out = PdSeries::zero(1, cap);
    for (m, c) in &f.terms {
        out = out.add(lam, &basis[m.get(0)].ok_scale(lam, c));
    }
    Ok(out)
}

/// τ(X^{[n]}) = Σ_j (1+Z1)^{n−j} X^{[n−j]} Z0^j/j! with τX = X(1+Z1) + Z0.
pub fn tau_pd(cs: &CycSpec, f: &PdSeries<OkElem>) -> Result<PdSeries<LamElem>> {
    check_univariate(f)?;
    let lam = &cs.lam;
    let cyc = cs.cyc();
    let ok = cs.ok();
    let cap = f.cap;
    let l0 = l0(cs);
    let z1_coeff = cyc.ok_scale(ok.alpha(), &divided_zeta_term(cs, 1, 1, 0)?);
    let one_plus_z1 = lam.sub(&lam.one(), &l0.iter().map(|c| cyc.mul(c, &z1_coeff)).collect());
    let mut a_pow = vec![lam.one()];
    let mut l_pow = vec![lam.one()];
    for k in 1..=cap {
        a_pow.push(lam.mul(&a_pow[k - 1], &one_plus_z1));
        l_pow.push(lam.mul(&l_pow[k - 1], &l0));
    }
    let mut out = PdSeries::zero(1, cap);
    for (m, c) in &f.terms {
        let n = m.get(0);
        let c = cyc.from_ok(c);
        for j in 0..=n {
            let z0j: LamElem = {
                let w = cyc.mul(&divided_zeta_term(cs, j, j, j)?, &c);
                l_pow[j].iter().map(|x| cyc.mul(x, &w)).collect()
            };
            let coeff = lam.mul(&a_pow[n - j], &z0j);
            out.add_term(lam, Mono::from_slice(&[n - j]), coeff);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NablaReport {
    pub degree: usize,
    pub lambda_degree: usize,
    pub leibniz_pairs: usize,
}

fn divisible_by_pi(cs: &CycSpec, x: &LamElem) -> bool {
    x.iter().flatten().all(|c| cs.ok().valuation(c).value() >= 1)
}

/// Checks on X^{[n]}, n ≤ cap: ∇1 = 0, τ − 1 = π(ζ−1)∇ against the
/// independent substitution formula for τ, ∇(X^{[n]}) ≡ X^{[n−1]}∇X mod π,
/// and ∇(fg) = ∇f·τg + f·∇g.
pub fn verify_nabla(cs: &CycSpec, cap: usize) -> Result<NablaReport> {
    let lam = &cs.lam;
    let ok = cs.ok();
    let scale = divided_zeta_term(cs, 1, 1, 0)?;
    let basis: Vec<PdSeries<OkElem>> = (0..=cap).map(|n| PdSeries::monomial(ok, 1, cap, &[n], ok.one())).collect();
    let nablas = basis.iter().map(|b| nabla_pd(cs, b)).collect::<Result<Vec<_>>>()?;
    let taus = basis.iter().map(|b| tau_pd(cs, b)).collect::<Result<Vec<_>>>()?;
    if !nablas[0].is_zero() {
        return Err(Error::StructureViolation("∇1 ≠ 0".into()));
    }
    let nx = nabla_x(cs, cap);
    for n in 0..=cap {
        let lhs = taus[n].sub(lam, &lift(cs, &basis[n]));
        let rhs = scale_series(cs, &nablas[n], &scale);
        if let Some(m) = lhs.first_difference(lam, &rhs, cap) {
            return Err(Error::StructureViolation(format!("τ − 1 ≠ π(ζ−1)∇ on X^[{n}] at {m}")));
        }
        if n >= 1 {
            let approx = pd_mul(lam, &lift(cs, &basis[n - 1]), &nx)?;
            let diff = nablas[n].sub(lam, &approx);
            if let Some((m, _)) = diff.terms.iter().find(|(_, c)| !divisible_by_pi(cs, c)) {
                return Err(Error::StructureViolation(format!("∇(X^[{n}]) ≢ X^[{}]∇X mod π at {m}", n - 1)));
            }
        }
    }
    let mut pairs = 0;
    for i in 0..=cap {
        for j in 0..=cap - i {
            let fg = pd_mul(ok, &basis[i], &basis[j])?;
            let lhs = nabla_pd(cs, &fg)?;
            let rhs = pd_mul(lam, &nablas[i], &taus[j])?.add(lam, &pd_mul(lam, &lift(cs, &basis[i]), &nablas[j])?);
            if let Some(m) = lhs.first_difference(lam, &rhs, cap) {
                return Err(Error::StructureViolation(format!("twisted Leibniz fails for X^[{i}]·X^[{j}] at {m}")));
            }
            pairs += 1;
        }
    }
    Ok(NablaReport { degree: cap, lambda_degree: cs.cap(), leibniz_pairs: pairs })
}

use super::{pd_mul_unchecked, Mono, PdSeries};
use crate::base_rings::matrix::{add_scalar, identity, mat_mul, Matrix};
use crate::base_rings::modint::{binomial_table, mul_mod};
use crate::base_rings::{MatRing, OkElem, OkModule, OkRing, Ring};
use crate::crystal::{check_nilpotent, default_budget, NilpotencyVerdict};
use crate::error::{Error, Result};

/// Integer factor c with (X^{[J]})^{[r]} = c·X^{[rJ]}, reduced mod m.
fn power_factor(j: Mono, nvars: usize, r: usize, table: &[Vec<u64>], m: u64) -> u64 {
    if r == 0 {
        return 1 % m;
    }
    let mut out = 1 % m;
    let mut lead = true;
    for v in 0..nvars {
        let jv = j.get(v);
        if jv == 0 {
            continue;
        }
        for k in 1..=r {
            let c = if lead { table[k * jv - 1][jv - 1] } else { table[k * jv][jv] };
            out = mul_mod(out, c, m);
        }
        lead = false;
    }
    out
}

/// arg^{[0]}, …, arg^{[mmax]}.
pub fn divided_powers(ok: &OkRing, arg: &PdSeries<OkElem>, mmax: usize) -> Result<Vec<PdSeries<OkElem>>> {
    if arg.coeff(Mono::ZERO).is_some() {
        return Err(Error::NonzeroConstantTerm);
    }
    let (nvars, cap) = (arg.nvars, arg.cap);
    let m = ok.modulus();
    let table = binomial_table(cap.max(1), m);
    let mut p: Vec<PdSeries<OkElem>> = (0..=mmax).map(|_| PdSeries::zero(nvars, cap)).collect();
    p[0] = PdSeries::constant(ok, nvars, cap, ok.one());
    for (&j, c) in &arg.terms {
        let dj = j.degree();
        let rmax = (cap / dj).min(mmax);
        let mut t = Vec::with_capacity(rmax + 1);
        let mut cpow = ok.one();
        let mut mono = Mono::ZERO;
        for r in 0..=rmax {
            t.push((mono, ok.mul_int(&cpow, power_factor(j, nvars, r, &table, m))));
            cpow = ok.mul(&cpow, c);
            mono = mono.add(j);
        }
        let mut next = p.clone();
        for k in 1..=mmax {
            for r in 1..=rmax.min(k) {
                let (mono, coef) = &t[r];
                if !p[k - r].is_zero() {
                    let term = super::mul_monomial(ok, &p[k - r], *mono, coef);
                    next[k] = next[k].add(ok, &term);
                }
            }
        }
        p = next;
    }
    Ok(p)
}

/// f(arg) for univariate f.
pub fn pd_substitute<R: OkModule>(
    ring: &R,
    ok: &OkRing,
    f: &PdSeries<R::Elem>,
    arg: &PdSeries<OkElem>,
) -> Result<PdSeries<R::Elem>> {
    if f.nvars != 1 {
        return Err(Error::ShapeMismatch(format!("expected a univariate series, got {} vars", f.nvars)));
    }
    substitute_many(ring, ok, f, std::slice::from_ref(arg))
}

/// f(args[0], …, args[n-1]); all arguments share one shape.
pub fn substitute_many<R: OkModule>(
    ring: &R,
    ok: &OkRing,
    f: &PdSeries<R::Elem>,
    args: &[PdSeries<OkElem>],
) -> Result<PdSeries<R::Elem>> {
    if args.len() != f.nvars {
        return Err(Error::ShapeMismatch(format!("{} arguments for {} variables", args.len(), f.nvars)));
    }
    let (nvars, cap) = match args.first() {
        Some(a) => (a.nvars, a.cap),
        None => return Ok(f.clone()),
    };
    for a in args {
        if a.nvars != nvars || a.cap != cap {
            return Err(Error::ShapeMismatch("substitution arguments differ in shape".into()));
        }
    }
    let mmax = f.cap.min(cap);
    let dps: Vec<Vec<PdSeries<OkElem>>> = args.iter().map(|a| divided_powers(ok, a, mmax)).collect::<Result<_>>()?;
    let mut out = PdSeries::zero(nvars, cap);
    for (&i, a) in &f.terms {
        if i.degree() > mmax {
            continue;
        }
        let mut prod = dps[0][i.get(0)].clone();
        for (v, dp) in dps.iter().enumerate().skip(1) {
            if prod.is_zero() {
                break;
            }
            let e = i.get(v);
            if e > 0 {
                prod = pd_mul_unchecked(ok, &prod, &dp[e]);
            }
        }
        for (&k, s) in &prod.terms {
            out.add_term(ring, k, ring.ok_scale(s, a));
        }
    }
    Ok(out)
}

/// (X_j − X_0)(1 − αX_0)^{-1} in `nvars` variables (0-based j ≥ 1).
pub fn structure_argument(ok: &OkRing, alpha: &OkElem, nvars: usize, cap: usize, j: usize) -> PdSeries<OkElem> {
    let diff = PdSeries::var(ok, nvars, cap, j).sub(ok, &PdSeries::var(ok, nvars, cap, 0));
    pd_mul_unchecked(ok, &diff, &pd_invert_affine(ok, alpha, nvars, cap, 0))
}

/// Face map p_i: n variables to n+1.
pub fn face_map<R: OkModule>(ring: &R, ok: &OkRing, f: &PdSeries<R::Elem>, i: usize) -> Result<PdSeries<R::Elem>> {
    let n = f.nvars;
    if i > n + 1 {
        return Err(Error::IndexOutOfRange { index: i, max: n + 1 });
    }
    if i == 0 {
        let alpha = ok.alpha().clone();
        let args: Vec<_> = (1..=n).map(|j| structure_argument(ok, &alpha, n + 1, f.cap, j)).collect();
        if n == 0 {
            return Ok(f.insert_variable(0));
        }
        return substitute_many(ring, ok, f, &args);
    }
    Ok(f.insert_variable(i - 1))
}

/// (1 − αX_var)^{-1} = Σ n!·α^n X_var^{[n]}.
pub fn pd_invert_affine(ok: &OkRing, alpha: &OkElem, nvars: usize, cap: usize, var: usize) -> PdSeries<OkElem> {
    let mut out = PdSeries::zero(nvars, cap);
    let mut c = ok.one();
    let mut idx = vec![0; nvars];
    for n in 0..=cap {
        idx[var] = n;
        out.add_term(ok, Mono::from_slice(&idx), c.clone());
        c = ok.mul_int(&ok.mul(&c, alpha), (n + 1) as u64);
        if ok.is_zero(&c) {
            break;
        }
    }
    out
}

/// (1 − αX_var)^m by repeated products.
pub fn pd_affine_power(ok: &OkRing, alpha: &OkElem, m: i64, nvars: usize, cap: usize, var: usize) -> PdSeries<OkElem> {
    let base = if m < 0 {
        pd_invert_affine(ok, alpha, nvars, cap, var)
    } else {
        let one = PdSeries::constant(ok, nvars, cap, ok.one());
        one.sub(ok, &PdSeries::var(ok, nvars, cap, var).scale_left(ok, alpha))
    };
    let mut out = PdSeries::constant(ok, nvars, cap, ok.one());
    for _ in 0..m.unsigned_abs() {
        out = pd_mul_unchecked(ok, &out, &base);
    }
    out
}

/// Σ_n Π_{i<n}(B + iα) X_var^{[n]}, after certifying that the products decay.
pub fn matrix_binomial_power(
    ok: &OkRing,
    b: &Matrix<OkElem>,
    alpha: &OkElem,
    nvars: usize,
    cap: usize,
    var: usize,
) -> Result<PdSeries<Matrix<OkElem>>> {
    let target = ok.horizon();
    match check_nilpotent(ok, b, alpha, target, default_budget(ok, b.rows, target)) {
        NilpotencyVerdict::CertifiedNilpotent { .. } => {}
        other => return Err(Error::NotAdmissible(format!("{other:?}"))),
    }
    Ok(binomial_power_unchecked(ok, b, alpha, nvars, cap, var))
}

pub(crate) fn binomial_power_unchecked(
    ok: &OkRing,
    b: &Matrix<OkElem>,
    alpha: &OkElem,
    nvars: usize,
    cap: usize,
    var: usize,
) -> PdSeries<Matrix<OkElem>> {
    let mr = MatRing::new(ok.clone(), b.rows);
    let mut out = PdSeries::zero(nvars, cap);
    let mut a = identity(ok, b.rows);
    let mut idx = vec![0; nvars];
    for n in 0..=cap {
        idx[var] = n;
        out.add_term(&mr, Mono::from_slice(&idx), a.clone());
        let shift = ok.mul_int(alpha, n as u64);
        a = mat_mul(ok, &a, &add_scalar(ok, b, &shift));
    }
    out
}

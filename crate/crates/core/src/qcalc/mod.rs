//! q-derivative calculus in the free truncated ring W(k)[[u, m1]], where
//! μ = (1+m1)^p − 1 and ξ = μ/m1.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base_rings::modint::binomial_table;
use crate::base_rings::witt::{WElem, WittRing};
use crate::base_rings::{OkElem, OkRing, Ring};
use crate::error::{Error, Result};

/// Dense Σ c_{ij} u^i m^j with i ≤ du, j ≤ dm. The second variable is m1
/// unless stated otherwise (some internal routines use μ instead).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QElem {
    pub c: Vec<WElem>,
}

#[derive(Clone, Debug)]
pub struct QRing {
    pub w: WittRing,
    pub du: usize,
    pub dm: usize,
    /// μ^k in m1, k ≤ dm.
    mu_pows: Vec<QElem>,
}

impl QRing {
    pub fn new(ok: &OkRing, du: usize, dm: usize) -> Self {
        let mut r = QRing { w: ok.witt().clone(), du, dm, mu_pows: Vec::new() };
        let p = r.w.p as usize;
        let bin = binomial_table(p, r.w.m);
        let mut mu = r.zero();
        for (j, b) in bin[p].iter().enumerate().skip(1) {
            if j <= dm {
                mu.c[j] = r.w.from_int(*b as i64);
            }
        }
        let mut pows = vec![r.one()];
        for k in 1..=dm {
            let next = r.mul(&pows[k - 1], &mu);
            pows.push(next);
        }
        r.mu_pows = pows;
        r
    }

    pub fn p(&self) -> u64 {
        self.w.p
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.dm + 1) + j
    }

    pub fn get(&self, a: &QElem, i: usize, j: usize) -> WElem {
        if i <= self.du && j <= self.dm {
            a.c[self.idx(i, j)].clone()
        } else {
            self.w.zero()
        }
    }

    pub fn set(&self, a: &mut QElem, i: usize, j: usize, v: WElem) {
        if i <= self.du && j <= self.dm {
            let k = self.idx(i, j);
            a.c[k] = v;
        }
    }

    pub fn constant(&self, v: WElem) -> QElem {
        let mut a = self.zero();
        a.c[0] = v;
        a
    }

    pub fn u_pow(&self, n: usize) -> QElem {
        let mut a = self.zero();
        self.set(&mut a, n, 0, self.w.one());
        a
    }

    pub fn m1(&self) -> QElem {
        let mut a = self.zero();
        self.set(&mut a, 0, 1, self.w.one());
        a
    }

    pub fn mu(&self) -> QElem {
        self.mu_pows.get(1).cloned().unwrap_or_else(|| self.zero())
    }

    /// ξ = Σ_{j≥1} C(p,j) m1^{j−1}.
    pub fn xi(&self) -> QElem {
        self.shift(&self.mu(), 0, 1).expect("μ has no constant term")
    }

    /// u-polynomial Σ f_n u^n as an element.
    pub fn from_u_series(&self, f: &[WElem]) -> Result<QElem> {
        let mut a = self.zero();
        for (n, c) in f.iter().enumerate() {
            if n > self.du {
                if !self.w.is_zero(c) {
                    return Err(Error::TruncationLoss(format!("u-degree {n} exceeds the cap {}", self.du)));
                }
                continue;
            }
            self.set(&mut a, n, 0, c.clone());
        }
        Ok(a)
    }

    /// Divides by u^a m1^b, certifying that nothing is lost.
    pub fn shift(&self, x: &QElem, a: usize, b: usize) -> Result<QElem> {
        let mut out = self.zero();
        for i in 0..=self.du {
            for j in 0..=self.dm {
                let c = &x.c[self.idx(i, j)];
                if self.w.is_zero(c) {
                    continue;
                }
                if i < a || j < b {
                    return Err(Error::DivisionFailure(format!("term u^{i} m1^{j} is not divisible by u^{a} m1^{b}")));
                }
                self.set(&mut out, i - a, j - b, c.clone());
            }
        }
        Ok(out)
    }

    /// First (u, m1) exponent with i ≤ upto_u where the two differ.
    pub fn first_difference(&self, a: &QElem, b: &QElem, upto_u: usize) -> Option<(usize, usize)> {
        (0..=upto_u.min(self.du))
            .flat_map(|i| (0..=self.dm).map(move |j| (i, j)))
            .find(|&(i, j)| a.c[self.idx(i, j)] != b.c[self.idx(i, j)])
    }

    /// Largest u-degree with a nonzero coefficient.
    pub fn u_degree(&self, a: &QElem) -> Option<usize> {
        (0..=self.du).rev().find(|&i| (0..=self.dm).any(|j| !self.w.is_zero(&a.c[self.idx(i, j)])))
    }

    pub fn scale(&self, a: &QElem, s: &WElem) -> QElem {
        QElem { c: a.c.iter().map(|x| self.w.mul(x, s)).collect() }
    }

    /// Σ c_{ik} u^i μ^k rewritten in m1.
    fn from_mu_rep(&self, a: &QElem) -> QElem {
        let mut out = self.zero();
        for i in 0..=self.du {
            for k in 0..=self.dm {
                let c = &a.c[self.idx(i, k)];
                if self.w.is_zero(c) {
                    continue;
                }
                for j in k..=self.dm {
                    let t = self.w.mul(c, &self.mu_pows[k].c[j]);
                    let at = self.idx(i, j);
                    out.c[at] = self.w.add(&out.c[at], &t);
                }
            }
        }
        out
    }

    pub fn random_u_series<R: rand::Rng>(&self, rng: &mut R, degree: usize) -> Vec<WElem> {
        (0..=degree).map(|_| (0..self.w.f).map(|_| rng.gen_range(0..self.w.m)).collect()).collect()
    }

    pub fn random(&self, rng: &mut ChaCha8Rng) -> QElem {
        QElem { c: (0..self.zero().c.len()).map(|_| (0..self.w.f).map(|_| rng.gen_range(0..self.w.m)).collect()).collect() }
    }
}

impl Ring for QRing {
    type Elem = QElem;

    fn zero(&self) -> QElem {
        QElem { c: vec![self.w.zero(); (self.du + 1) * (self.dm + 1)] }
    }

    fn one(&self) -> QElem {
        self.constant(self.w.one())
    }

    fn add(&self, a: &QElem, b: &QElem) -> QElem {
        QElem { c: a.c.iter().zip(&b.c).map(|(x, y)| self.w.add(x, y)).collect() }
    }

    fn sub(&self, a: &QElem, b: &QElem) -> QElem {
        QElem { c: a.c.iter().zip(&b.c).map(|(x, y)| self.w.sub(x, y)).collect() }
    }

    fn neg(&self, a: &QElem) -> QElem {
        QElem { c: a.c.iter().map(|x| self.w.neg(x)).collect() }
    }

    fn mul(&self, a: &QElem, b: &QElem) -> QElem {
        let mut out = self.zero();
        let nz_b: Vec<(usize, usize)> = (0..=self.du)
            .flat_map(|i| (0..=self.dm).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.w.is_zero(&b.c[self.idx(i, j)]))
            .collect();
        for i in 0..=self.du {
            for j in 0..=self.dm {
                let x = &a.c[self.idx(i, j)];
                if self.w.is_zero(x) {
                    continue;
                }
                for &(k, l) in &nz_b {
                    if i + k > self.du || j + l > self.dm {
                        continue;
                    }
                    let at = self.idx(i + k, j + l);
                    let t = self.w.mul(x, &b.c[self.idx(k, l)]);
                    out.c[at] = self.w.add(&out.c[at], &t);
                }
            }
        }
        out
    }

    fn is_zero(&self, a: &QElem) -> bool {
        a.c.iter().all(|x| self.w.is_zero(x))
    }

    fn int_modulus(&self) -> u64 {
        self.w.m
    }

    fn mul_int(&self, a: &QElem, n: u64) -> QElem {
        QElem { c: a.c.iter().map(|x| self.w.scale_int(x, n)).collect() }
    }
}

/// [n]_q = Σ_{j≥1} C(n,j) μ^{j−1}, in μ.
fn qint_mu(q: &QRing, n: usize, bin: &[Vec<u64>]) -> Vec<u64> {
    (1..=n).map(|j| bin[n][j]).take(q.dm + 1).collect()
}

/// [n]_q as an element of W[[m1]].
pub fn qint(q: &QRing, n: usize) -> QElem {
    let bin = binomial_table(n, q.w.m);
    let mut a = q.zero();
    for (k, c) in qint_mu(q, n, &bin).into_iter().enumerate() {
        q.set(&mut a, 0, k, q.w.from_int(c as i64));
    }
    q.from_mu_rep(&a)
}

/// d_q(f) = Σ f_n [n]_q u^{n−1}.
pub fn d_q(q: &QRing, f: &[WElem]) -> QElem {
    q.from_mu_rep(&d_q_mu(q, f))
}

/// d_q(f) with the second variable μ.
fn d_q_mu(q: &QRing, f: &[WElem]) -> QElem {
    let n_max = f.len().saturating_sub(1);
    let bin = binomial_table(n_max.max(1), q.w.m);
    let mut a = q.zero();
    for (n, c) in f.iter().enumerate().skip(1) {
        if q.w.is_zero(c) {
            continue;
        }
        for (k, b) in qint_mu(q, n, &bin).into_iter().enumerate() {
            q.set(&mut a, n - 1, k, q.w.scale_int(c, b));
        }
    }
    a
}

/// u ↦ (1+μ)u with m1 and W(k) fixed.
pub fn tau_action(q: &QRing, a: &QElem) -> QElem {
    let one_plus_mu = q.add(&q.one(), &q.mu());
    let mut pw = q.one();
    let mut out = q.zero();
    for i in 0..=q.du {
        let mut row = q.zero();
        for j in 0..=q.dm {
            q.set(&mut row, i, j, q.get(a, i, j));
        }
        out = q.add(&out, &q.mul(&row, &pw));
        pw = q.mul(&pw, &one_plus_mu);
    }
    out
}

/// τ(f) − f for a u-polynomial, with the second variable μ: Σ f_n((1+μ)^n − 1)u^n.
fn tau_minus_one_mu(q: &QRing, f: &[WElem]) -> QElem {
    let bin = binomial_table(f.len().max(1), q.w.m);
    let mut a = q.zero();
    for (n, c) in f.iter().enumerate() {
        for k in 1..=n.min(q.dm) {
            q.set(&mut a, n, k, q.w.scale_int(c, bin[n][k]));
        }
    }
    a
}

/// u ↦ u^p, m1 ↦ μ, Frobenius on W(k). Terms of u-degree above du/p would
/// be cut off and are reported instead.
pub fn phi_action(q: &QRing, a: &QElem) -> Result<QElem> {
    let p = q.p() as usize;
    let mut out = q.zero();
    for i in 0..=q.du {
        for j in 0..=q.dm {
            let c = q.get(a, i, j);
            if q.w.is_zero(&c) {
                continue;
            }
            if p * i > q.du {
                return Err(Error::TruncationLoss(format!("φ(u^{i}) exceeds the u-cap {}", q.du)));
            }
            let c = q.w.frobenius(&c);
            for l in j..=q.dm {
                let t = q.w.mul(&c, &q.mu_pows[j].c[l]);
                let at = q.idx(p * i, l);
                out.c[at] = q.w.add(&out.c[at], &t);
            }
        }
    }
    Ok(out)
}

/// ∇ = ξ·d_q.
pub fn nabla(q: &QRing, f: &[WElem]) -> QElem {
    q.mul(&q.xi(), &d_q(q, f))
}

/// ∇ = (τ − 1)/(m1 u), with the division certified.
pub fn nabla_via_tau(q: &QRing, f: &[WElem]) -> Result<QElem> {
    let x = q.from_u_series(f)?;
    q.shift(&q.sub(&tau_action(q, &x), &x), 1, 1)
}

/// ∇ = ξ·(τ − 1)/(μu), the division by μ done as a shift in the μ-variable.
pub fn nabla_via_mu(q: &QRing, f: &[WElem]) -> Result<QElem> {
    let quot = q.shift(&tau_minus_one_mu(q, f), 1, 1)?;
    Ok(q.mul(&q.xi(), &q.from_mu_rep(&quot)))
}

/// Eisenstein polynomial with W(k) coefficients.
pub fn eisenstein_lift(q: &QRing, ok: &OkRing) -> Vec<WElem> {
    ok.spec().eisenstein.iter().map(|&c| q.w.from_int(c)).collect()
}

/// f(π) for a u-polynomial over W(k).
pub fn eval_at_pi(ok: &OkRing, f: &[WElem]) -> OkElem {
    let pi = ok.pi();
    f.iter().rev().fold(ok.zero(), |acc, c| ok.add(&ok.mul(&acc, &pi), &ok.from_witt(c)))
}

fn u_poly_mul(w: &WittRing, a: &[WElem], b: &[WElem]) -> Vec<WElem> {
    let mut out = vec![w.zero(); (a.len() + b.len()).saturating_sub(1)];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = w.add(&out[i + j], &w.mul(x, y));
        }
    }
    out
}

fn u_poly_pow(w: &WittRing, a: &[WElem], h: usize) -> Vec<WElem> {
    (0..h).fold(vec![w.one()], |acc, _| u_poly_mul(w, &acc, a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DqPowerReport {
    pub h: usize,
    /// u-degree through which d_q(E^h) was compared.
    pub u_margin: usize,
    /// m1-degree through which the division by μu is exact.
    pub m_margin: usize,
}

/// d_q(E^h) three ways: the defining sum, (τ(E)^h − E^h)/(μu) by certified
/// division, and E^{h−1}·Q with Q = Σ_j C(h,j) L^{j−1} d_q(E)^j where the
/// formal symbol L stands for μu/E. Q ≡ h·d_q(E) mod L, and in the free ring
/// d_q(E^h) − h E^{h−1} d_q(E) is divisible by μu.
pub fn verify_dq_power_of_e(q: &QRing, ok: &OkRing, h: usize) -> Result<DqPowerReport> {
    if h == 0 {
        return Err(Error::InvalidSpec("h must be at least 1".into()));
    }
    let e = eisenstein_lift(q, ok);
    let eh = u_poly_pow(&q.w, &e, h);
    if eh.len() > q.du + 1 {
        return Err(Error::TruncationLoss(format!("E^{h} has u-degree {} beyond the cap {}", eh.len() - 1, q.du)));
    }
    // route 1: the defining sum
    let direct = d_q(q, &eh);
    // route 2: (τ(E^h) − E^h)/(μu), computed with μ as the second variable
    let num = tau_minus_one_mu(q, &eh);
    let quot = q.shift(&num, 1, 1).map_err(|e| Error::DivisionFailure(format!("τ(E^{h}) − E^{h} by μu: {e}")))?;
    let divided = q.from_mu_rep(&quot);
    // division by μ loses the top μ-degree, so compare below it
    let m_margin = q.dm.saturating_sub(1);
    let u_margin = q.du;
    let truncate_m = |x: &QElem| {
        let mut y = x.clone();
        for i in 0..=q.du {
            q.set(&mut y, i, q.dm, q.w.zero());
        }
        y
    };
    if let Some(at) = q.first_difference(&truncate_m(&direct), &truncate_m(&divided), u_margin) {
        return Err(Error::StructureViolation(format!("d_q(E^{h}) routes differ at u^{} m1^{}", at.0, at.1)));
    }
    // E^{h−1}·Q with L^{j−1}E^{j−1} = (μu)^{j−1}, in μ
    let dqe = d_q_mu(q, &e);
    let bin = binomial_table(h, q.w.m);
    let mut dqe_pow = q.one();
    let mut mu_u_pow = q.one();
    let mu_u = {
        let mut a = q.zero();
        q.set(&mut a, 1, 1, q.w.one());
        a
    };
    let mut factored = q.zero();
    for j in 1..=h {
        dqe_pow = q.mul(&dqe_pow, &dqe);
        let ehj = q.from_u_series(&u_poly_pow(&q.w, &e, h - j))?;
        let term = q.mul_int(&q.mul(&q.mul(&ehj, &dqe_pow), &mu_u_pow), bin[h][j]);
        factored = q.add(&factored, &term);
        mu_u_pow = q.mul(&mu_u_pow, &mu_u);
    }
    let direct_mu = d_q_mu(q, &eh);
    if let Some(at) = q.first_difference(&factored, &direct_mu, u_margin) {
        return Err(Error::StructureViolation(format!("E^{}·Q ≠ d_q(E^{h}) at u^{} μ^{}", h - 1, at.0, at.1)));
    }
    // free-ring congruence d_q(E^h) ≡ h E^{h−1} d_q(E) mod μu
    let leading = q.mul_int(&q.mul(&q.from_u_series(&u_poly_pow(&q.w, &e, h - 1))?, &dqe), h as u64);
    q.shift(&q.sub(&direct_mu, &leading), 1, 1)
        .map_err(|_| Error::StructureViolation(format!("d_q(E^{h}) ≢ {h}·E^{}·d_q(E) mod μu", h - 1)))?;
    Ok(DqPowerReport { h, u_margin, m_margin })
}

/// (τ − 1)f = μu·d_q(f), exactly.
pub fn verify_tau_identity(q: &QRing, f: &[WElem]) -> Result<()> {
    let x = q.from_u_series(f)?;
    let lhs = q.sub(&tau_action(q, &x), &x);
    let mut mu_u = q.zero();
    for j in 0..=q.dm {
        q.set(&mut mu_u, 1, j, q.get(&q.mu(), 0, j));
    }
    let rhs = q.mul(&mu_u, &d_q(q, f));
    match q.first_difference(&lhs, &rhs, q.du) {
        None => Ok(()),
        Some((i, j)) => Err(Error::StructureViolation(format!("(τ−1)f ≠ μu·d_q(f) at u^{i} m1^{j}"))),
    }
}

/// d_q(fg) = d_q(f)τ(g) + f·d_q(g), through u-degree du − 1.
pub fn verify_leibniz(q: &QRing, f: &[WElem], g: &[WElem]) -> Result<()> {
    let fg: Vec<WElem> = u_poly_mul(&q.w, f, g).into_iter().take(q.du + 1).collect();
    let lhs = d_q(q, &fg);
    let (xf, xg) = (q.from_u_series(f)?, q.from_u_series(g)?);
    let rhs = q.add(&q.mul(&d_q(q, f), &tau_action(q, &xg)), &q.mul(&xf, &d_q(q, g)));
    match q.first_difference(&lhs, &rhs, q.du.saturating_sub(1)) {
        None => Ok(()),
        Some((i, j)) => Err(Error::StructureViolation(format!("q-Leibniz fails at u^{i} m1^{j}"))),
    }
}

/// ∇φ(f) = ξu^{p−1}φ(∇f) for u-degree of f at most du/p.
pub fn verify_phi_nabla(q: &QRing, f: &[WElem]) -> Result<()> {
    let x = q.from_u_series(f)?;
    let phif = phi_action(q, &x)?;
    let phif_series: Vec<WElem> = (0..=q.du).map(|i| q.get(&phif, i, 0)).collect();
    let lhs = nabla(q, &phif_series);
    let mut xi_u = q.zero();
    let p = q.p() as usize;
    let xi = q.xi();
    for j in 0..=q.dm {
        q.set(&mut xi_u, p - 1, j, q.get(&xi, 0, j));
    }
    let rhs = q.mul(&xi_u, &phi_action(q, &nabla(q, f))?);
    match q.first_difference(&lhs, &rhs, q.du) {
        None => Ok(()),
        Some((i, j)) => Err(Error::StructureViolation(format!("∇φ ≠ ξu^(p−1)φ∇ at u^{i} m1^{j}"))),
    }
}

/// ∇ by ξ·d_q, (τ−1)/(m1u) and ξ(τ−1)/(μu) all agree.
pub fn verify_nabla_routes(q: &QRing, f: &[WElem]) -> Result<()> {
    let a = nabla(q, f);
    let b = nabla_via_tau(q, f)?;
    let c = nabla_via_mu(q, f)?;
    // dividing by m1 loses the top m1-degree
    let top = q.dm.saturating_sub(1);
    let cut = |x: &QElem| {
        let mut y = x.clone();
        for i in 0..=q.du {
            for j in top + 1..=q.dm {
                q.set(&mut y, i, j, q.w.zero());
            }
        }
        y
    };
    for (name, other) in [("(τ−1)/(m1u)", &b), ("ξ(τ−1)/(μu)", &c)] {
        if let Some((i, j)) = q.first_difference(&cut(&a), &cut(other), q.du) {
            return Err(Error::StructureViolation(format!("ξ·d_q and {name} differ at u^{i} m1^{j}")));
        }
    }
    Ok(())
}

/// d_q(f) at u = π, m1 = 0 equals f′(π).
pub fn verify_dq_mod_xi(q: &QRing, ok: &OkRing, f: &[WElem]) -> Result<()> {
    let d = d_q(q, f);
    let image: Vec<WElem> = (0..=q.du).map(|i| q.get(&d, i, 0)).collect();
    let lhs = eval_at_pi(ok, &image);
    let deriv: Vec<WElem> = f.iter().enumerate().skip(1).map(|(n, c)| q.w.scale_int(c, n as u64)).collect();
    let rhs = eval_at_pi(ok, &deriv);
    if lhs != rhs {
        return Err(Error::StructureViolation("d_q(f) mod (m1, u − π) ≠ f′(π)".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct QcalcReport {
    pub u_cap: usize,
    pub m_cap: usize,
    pub samples: usize,
    pub dq_powers: Vec<DqPowerReport>,
}

/// Runs every identity on `samples` random u-polynomials and on E^h, h ≤ h_max.
pub fn verify_all(ok: &OkRing, h_max: usize, du: usize, dm: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<QcalcReport> {
    let q = QRing::new(ok, du, dm);
    let p = ok.p() as usize;
    for _ in 0..samples {
        let f = q.random_u_series(rng, du);
        let g = q.random_u_series(rng, du / 2);
        verify_tau_identity(&q, &f)?;
        verify_leibniz(&q, &f, &g)?;
        verify_nabla_routes(&q, &f)?;
        verify_dq_mod_xi(&q, ok, &f)?;
        verify_phi_nabla(&q, &q.random_u_series(rng, du / p))?;
    }
    let dq_powers = (1..=h_max).map(|h| verify_dq_power_of_e(&q, ok, h)).collect::<Result<Vec<_>>>()?;
    Ok(QcalcReport { u_cap: du, m_cap: dm, samples, dq_powers })
}

#[cfg(test)]
mod tests;

//! The Čech–Alexander complex of a crystal and the comparison with the
//! two-term complex [M --A--> M].

mod preimage;
mod rigidity;

pub use preimage::{preimage_general, preimage_s2, MAX_PREIMAGE_LEVEL};
pub use rigidity::{kernel_rigidity_check, RigidityReport};

use std::collections::BTreeMap;

use rand::Rng;

use crate::base_rings::matrix::{add_scalar, identity, mat_inverse, mat_mul, mat_vec, Matrix};
use crate::base_rings::modint::{binomial_table, mul_mod};
use crate::base_rings::{smith_normal_form, OkElem, OkRing, Ring};
use crate::crystal::Crystal;
use crate::error::{Error, Result};
use crate::pd_series::{face_map, matrix_binomial_power, pd_mul, Mono, PdSeries};

pub const DEFAULT_S_MAX: usize = 4;

/// An element of M ⊗ O_K{X_1..X_s}: one scalar series per basis vector of M.
#[derive(Clone, Debug, PartialEq)]
pub struct CechLevel {
    pub level: usize,
    pub data: Vec<PdSeries<OkElem>>,
}

impl CechLevel {
    pub fn zero(level: usize, rank: usize, cap: usize) -> Self {
        CechLevel { level, data: (0..rank).map(|_| PdSeries::zero(level, cap)).collect() }
    }

    pub fn from_series(data: Vec<PdSeries<OkElem>>) -> Result<Self> {
        let first = data.first().ok_or_else(|| Error::ShapeMismatch("empty module".into()))?;
        let (level, cap) = (first.nvars, first.cap);
        if data.iter().any(|s| s.nvars != level || s.cap != cap) {
            return Err(Error::ShapeMismatch("components differ in shape".into()));
        }
        Ok(CechLevel { level, data })
    }

    /// A level-0 element.
    pub fn from_vector(ok: &OkRing, v: &[OkElem], cap: usize) -> Self {
        CechLevel { level: 0, data: v.iter().map(|c| PdSeries::constant(ok, 0, cap, c.clone())).collect() }
    }

    pub fn rank(&self) -> usize {
        self.data.len()
    }

    pub fn cap(&self) -> usize {
        self.data.first().map_or(0, |s| s.cap)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn coeff(&self, ok: &OkRing, idx: &[usize]) -> Vec<OkElem> {
        self.data.iter().map(|s| s.coeff_or(ok, idx)).collect()
    }

    pub fn coeff_mono(&self, ok: &OkRing, m: Mono) -> Vec<OkElem> {
        self.data.iter().map(|s| s.coeff(m).cloned().unwrap_or_else(|| ok.zero())).collect()
    }

    pub fn add(&self, ok: &OkRing, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(ok, b)).collect();
        CechLevel { level: self.level, data }
    }

    pub fn sub(&self, ok: &OkRing, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(ok, b)).collect();
        CechLevel { level: self.level, data }
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        CechLevel { level: self.level, data: self.data.iter().map(|s| s.homogeneous_part(d)).collect() }
    }

    /// First (component, monomial) of degree ≤ upto where the two differ.
    pub fn first_difference(&self, ok: &OkRing, other: &Self, upto: usize) -> Option<(usize, Mono)> {
        self.data
            .iter()
            .zip(&other.data)
            .enumerate()
            .filter_map(|(i, (a, b))| a.first_difference(ok, b, upto).map(|m| (i, m)))
            .min_by_key(|&(i, m)| (m, i))
    }

    fn to_map(&self, ok: &OkRing) -> BTreeMap<Mono, Vec<OkElem>> {
        let mut out: BTreeMap<Mono, Vec<OkElem>> = BTreeMap::new();
        for (i, s) in self.data.iter().enumerate() {
            for (&m, c) in &s.terms {
                out.entry(m).or_insert_with(|| vec![ok.zero(); self.rank()])[i] = c.clone();
            }
        }
        out
    }

    fn from_map(ok: &OkRing, level: usize, rank: usize, cap: usize, map: BTreeMap<Mono, Vec<OkElem>>) -> Self {
        let mut out = Self::zero(level, rank, cap);
        for (m, v) in map {
            for (s, c) in out.data.iter_mut().zip(v) {
                s.add_term(ok, m, c);
            }
        }
        out
    }

    /// Random element with entries on about `density` percent of monomials.
    pub fn random<G: Rng>(ok: &OkRing, level: usize, rank: usize, cap: usize, density: u32, rng: &mut G) -> Self {
        let mut out = Self::zero(level, rank, cap);
        for m in monomials(level, cap) {
            if rng.gen_range(0..100) < density {
                for s in out.data.iter_mut() {
                    s.add_term(ok, m, ok.random(rng));
                }
            }
        }
        out
    }

    /// S(X)·m for a matrix series S.
    pub fn series_times_vector(ok: &OkRing, s: &PdSeries<Matrix<OkElem>>, m: &[OkElem]) -> Self {
        let mut map = BTreeMap::new();
        for (&k, a) in &s.terms {
            map.insert(k, mat_vec(ok, a, m));
        }
        Self::from_map(ok, s.nvars, m.len(), s.cap, map)
    }
}

/// All monomials in `nvars` variables of total degree ≤ cap, in increasing order.
pub fn monomials(nvars: usize, cap: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; nvars];
    fn rec(v: usize, left: usize, idx: &mut Vec<usize>, out: &mut Vec<Mono>) {
        if v == idx.len() {
            out.push(Mono::from_slice(idx));
            return;
        }
        for e in 0..=left {
            idx[v] = e;
            rec(v + 1, left - e, idx, out);
        }
        idx[v] = 0;
    }
    rec(0, cap, &mut idx, &mut out);
    out.sort();
    out
}

/// Monomials of total degree exactly d.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Mono> {
    monomials(nvars, d).into_iter().filter(|m| m.degree() == d).collect()
}

/// The complex together with cached twist coefficients.
#[derive(Clone, Debug)]
pub struct CechComplex {
    pub crystal: Crystal,
    pub cap: usize,
    pub s_max: usize,
    /// twist[m][k] = Π_{i<k}(A + (m+i)α), the X_1^{[k]} coefficient of ε(X_1)(1−αX_1)^{-m}.
    twist: Vec<Vec<Matrix<OkElem>>>,
    binom: Vec<Vec<u64>>,
    flipped_face: Option<usize>,
}

impl CechComplex {
    pub fn new(c: &Crystal, cap: usize, s_max: usize) -> Result<Self> {
        c.require_admissible()?;
        let ok = &c.ring;
        let alpha = ok.alpha();
        let twist = (0..=cap)
            .map(|m| {
                let mut row = Vec::with_capacity(cap + 1);
                let mut cur = identity(ok, c.rank());
                for k in 0..=cap {
                    row.push(cur.clone());
                    cur = mat_mul(ok, &cur, &add_scalar(ok, &c.matrix, &ok.mul_int(alpha, (m + k) as u64)));
                }
                row
            })
            .collect();
        Ok(CechComplex {
            crystal: c.clone(),
            cap,
            s_max,
            twist,
            binom: binomial_table(cap.max(1) * 2, ok.modulus()),
            flipped_face: None,
        })
    }

    /// A copy whose i-th face enters with the wrong sign (negative control).
    pub fn with_flipped_face(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.flipped_face = Some(i);
        c
    }

    pub fn ring(&self) -> &OkRing {
        &self.crystal.ring
    }

    pub fn rank(&self) -> usize {
        self.crystal.rank()
    }

    fn check_input(&self, f: &CechLevel) -> Result<()> {
        if f.level > self.s_max {
            return Err(Error::UnsupportedLevel(f.level));
        }
        if f.rank() != self.rank() {
            return Err(Error::ShapeMismatch(format!("rank {} element for a rank {} crystal", f.rank(), self.rank())));
        }
        if f.cap() != self.cap {
            return Err(Error::DegreeOverflow(format!("element truncated at {} but the complex works to {}", f.cap(), self.cap)));
        }
        Ok(())
    }

    fn face_sign(&self, i: usize) -> bool {
        (i % 2 == 1) != (self.flipped_face == Some(i))
    }

    /// d^n, with the p_0 term expanded in closed form.
    pub fn differential(&self, f: &CechLevel) -> Result<CechLevel> {
        self.check_input(f)?;
        let ok = self.ring();
        let n = f.level;
        let cap = self.cap;
        let m_mod = ok.modulus();
        let l = self.rank();
        let input = f.to_map(ok);

        // G_m: Σ_{|I|=m} a_I Π_j (X_{j+1} − X_1)^{[I_j]}, split by m.
        let mut g: Vec<BTreeMap<Mono, Vec<OkElem>>> = vec![BTreeMap::new(); cap + 1];
        for (&i, a) in &input {
            let idx = i.to_vec(n);
            let m = i.degree();
            let mut b = vec![0usize; n];
            loop {
                let bsum: usize = b.iter().sum();
                let mut mult = 1u64;
                let mut run = 0usize;
                for &bj in &b {
                    run += bj;
                    mult = mul_mod(mult, self.binom[run][bj], m_mod);
                }
                let mut target = vec![bsum];
                target.extend(idx.iter().zip(&b).map(|(x, y)| x - y));
                let factor = if bsum % 2 == 1 { ok.neg(&ok.from_int(mult as i64)) } else { ok.from_int(mult as i64) };
                let slot = g[m].entry(Mono::from_slice(&target)).or_insert_with(|| vec![ok.zero(); l]);
                for (s, c) in slot.iter_mut().zip(a) {
                    *s = ok.add(s, &ok.mul(&factor, c));
                }
                // next b ≤ I
                let mut v = 0;
                while v < n {
                    if b[v] < idx[v] {
                        b[v] += 1;
                        break;
                    }
                    b[v] = 0;
                    v += 1;
                }
                if v == n {
                    break;
                }
            }
        }

        let mut out: BTreeMap<Mono, Vec<OkElem>> = BTreeMap::new();
        let push = |out: &mut BTreeMap<Mono, Vec<OkElem>>, m: Mono, v: Vec<OkElem>| {
            let slot = out.entry(m).or_insert_with(|| vec![ok.zero(); l]);
            for (s, c) in slot.iter_mut().zip(v) {
                *s = ok.add(s, &c);
            }
        };
        for (m, gm) in g.iter().enumerate() {
            for (&j, v) in gm {
                let dj = j.degree();
                let j0 = j.get(0);
                for k in 0..=cap - dj {
                    let w = mat_vec(ok, &self.twist[m][k], v);
                    let w: Vec<_> = w.iter().map(|c| ok.mul_int(c, self.binom[k + j0][k])).collect();
                    push(&mut out, j.with(0, j0 + k), w);
                }
            }
        }
        for i in 1..=n + 1 {
            let neg = self.face_sign(i);
            for (&mono, a) in &input {
                let v = if neg { a.iter().map(|c| ok.neg(c)).collect() } else { a.clone() };
                push(&mut out, mono.insert_zero(i - 1, n), v);
            }
        }
        Ok(CechLevel::from_map(ok, n + 1, l, cap, out))
    }

    /// d^n through generic substitution: ε(X_1)·f(p_0 args) + Σ (−1)^i p_i f.
    pub fn differential_generic(&self, f: &CechLevel) -> Result<CechLevel> {
        self.check_input(f)?;
        let ok = self.ring();
        let n = f.level;
        let eps = matrix_binomial_power(ok, &self.crystal.matrix, ok.alpha(), n + 1, self.cap, 0)?;
        let moved: Vec<PdSeries<OkElem>> = f.data.iter().map(|s| face_map(ok, ok, s, 0)).collect::<Result<_>>()?;
        let l = self.rank();
        let mut out = CechLevel::zero(n + 1, l, self.cap);
        for r in 0..l {
            for (c, mv) in moved.iter().enumerate() {
                let entry = eps.map_entries(ok, |a| a.get(r, c).clone());
                out.data[r] = out.data[r].add(ok, &pd_mul(ok, &entry, mv)?);
            }
        }
        for i in 1..=n + 1 {
            for (r, s) in f.data.iter().enumerate() {
                let t = face_map(ok, ok, s, i)?;
                out.data[r] = if self.face_sign(i) { out.data[r].sub(ok, &t) } else { out.data[r].add(ok, &t) };
            }
        }
        Ok(out)
    }

    /// Unit vector e_j times X^{[m]} at the given level.
    pub fn basis_element(&self, level: usize, j: usize, m: Mono) -> CechLevel {
        let ok = self.ring();
        let mut out = CechLevel::zero(level, self.rank(), self.cap);
        out.data[j].add_term(ok, m, ok.one());
        out
    }
}

impl PdSeries<Matrix<OkElem>> {
    /// Scalar series of one matrix entry.
    pub fn map_entries(&self, ok: &OkRing, f: impl Fn(&Matrix<OkElem>) -> OkElem) -> PdSeries<OkElem> {
        let mut out = PdSeries::zero(self.nvars, self.cap);
        for (&m, a) in &self.terms {
            out.add_term(ok, m, f(a));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    pub levels_checked: usize,
    pub inputs_checked: usize,
    pub margin: usize,
}

/// d^{n+1} ∘ d^n = 0 on every basis element e_j X^{[I]}, 0 ≤ n < s_max.
pub fn verify_complex(cx: &CechComplex) -> Result<ComplexReport> {
    let ok = cx.ring();
    let mut inputs = 0;
    for n in 0..cx.s_max {
        for m in monomials(n, cx.cap) {
            for j in 0..cx.rank() {
                let e = cx.basis_element(n, j, m);
                let dd = cx.differential(&cx.differential(&e)?)?;
                if let Some((comp, mono)) = dd.first_difference(ok, &CechLevel::zero(n + 2, cx.rank(), cx.cap), cx.cap) {
                    return Err(Error::ComplexViolation {
                        level: n,
                        input: format!("e{j}·X^{m}"),
                        monomial: format!("component {comp}, X^{mono}"),
                    });
                }
                inputs += 1;
            }
        }
    }
    Ok(ComplexReport { levels_checked: cx.s_max, inputs_checked: inputs, margin: cx.cap })
}

/// F_A(X) = X + Σ_{n≥1} Π_{i<n}(A + α + iα) X^{[n+1]}.
pub fn f_series(c: &Crystal, cap: usize) -> Result<PdSeries<Matrix<OkElem>>> {
    c.require_admissible()?;
    Ok(f_series_unchecked(c, cap))
}

fn f_series_unchecked(c: &Crystal, cap: usize) -> PdSeries<Matrix<OkElem>> {
    let ok = &c.ring;
    let mr = crate::base_rings::MatRing::new(ok.clone(), c.rank());
    let shifted = add_scalar(ok, &c.matrix, ok.alpha());
    let mut out = PdSeries::zero(1, cap);
    let mut cur = identity(ok, c.rank());
    for n in 0..cap {
        out.add_term(&mr, Mono::from_slice(&[n + 1]), cur.clone());
        cur = mat_mul(ok, &cur, &add_scalar(ok, &shifted, &ok.mul_int(ok.alpha(), n as u64)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSeriesReport {
    /// I + A·F_A = ε holds through this degree.
    pub stratification_degree: usize,
    /// ∂F_A/∂X = (1−αX)^{−A/α−1} holds through this degree.
    pub derivative_degree: usize,
}

pub fn verify_f_identities(c: &Crystal, cap: usize) -> Result<FSeriesReport> {
    let ok = &c.ring;
    let mr = crate::base_rings::MatRing::new(ok.clone(), c.rank());
    let fa = f_series(c, cap)?;
    let eps = crate::crystal::build_stratification(c, cap)?;
    let a_series = PdSeries::constant(&mr, 1, cap, c.matrix.clone());
    let lhs = PdSeries::constant(&mr, 1, cap, identity(ok, c.rank())).add(&mr, &pd_mul(&mr, &a_series, &fa)?);
    if let Some(m) = lhs.first_difference(&mr, &eps, cap) {
        return Err(Error::StructureViolation(format!("I + A·F_A differs from ε at X^{m}")));
    }
    let shifted = add_scalar(ok, &c.matrix, ok.alpha());
    let rhs = matrix_binomial_power(ok, &shifted, ok.alpha(), 1, cap, 0)?;
    let deriv = fa.derivative(&mr, 0);
    if let Some(m) = deriv.first_difference(&mr, &rhs, cap - 1) {
        return Err(Error::StructureViolation(format!("∂F_A differs from (1−αX)^(−A/α−1) at X^{m}")));
    }
    Ok(FSeriesReport { stratification_degree: cap, derivative_degree: cap - 1 })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CohomologyReport {
    pub h0_rank: usize,
    pub h1_free_rank: usize,
    pub h1_torsion: Vec<u32>,
    pub margin: usize,
}

/// H^0 = ker A and H^1 = coker A via Smith normal form.
pub fn compute_h0_h1(c: &Crystal) -> Result<CohomologyReport> {
    c.require_admissible()?;
    let snf = smith_normal_form(&c.ring, &c.matrix)?;
    Ok(CohomologyReport {
        h0_rank: snf.free_rank_kernel,
        h1_free_rank: snf.free_rank_cokernel,
        h1_torsion: snf.torsion(),
        margin: 0,
    })
}

/// Solves A·m = w over O_K, if possible.
pub fn solve_in_image(ok: &OkRing, a: &Matrix<OkElem>, w: &[OkElem]) -> Result<Option<Vec<OkElem>>> {
    let snf = smith_normal_form(ok, a)?;
    let y = mat_vec(ok, &snf.u, w);
    let mut x = vec![ok.zero(); a.cols];
    for (i, yi) in y.iter().enumerate() {
        let d = snf.elementary_divisor_valuations.get(i).copied();
        match d {
            Some(d) if i < snf.rank => {
                if ok.valuation(yi).value() < d {
                    return Ok(None);
                }
                x[i] = ok.divide_by_pi_power(yi, d)?;
            }
            _ => {
                if !ok.is_zero(yi) {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(mat_vec(ok, &snf.v, &x)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyCrossCheck {
    pub kernel_vectors: usize,
    pub torsion_classes: usize,
}

/// Ties the SNF answer to the complex: kernel vectors are d^0-cocycles, and
/// each torsion class π^d is nonzero in H^1 while π^d times it is a boundary.
pub fn cross_check_h0_h1(cx: &CechComplex) -> Result<CohomologyCrossCheck> {
    let ok = cx.ring();
    let a = &cx.crystal.matrix;
    let l = cx.rank();
    let snf = smith_normal_form(ok, a)?;
    let mut kernel = 0;
    for j in snf.rank..l {
        let v = snf.v.column(j);
        let d0 = cx.differential(&CechLevel::from_vector(ok, &v, cx.cap))?;
        if !d0.is_zero() {
            return Err(Error::InvariantsMismatch(format!("kernel vector {j} is not a 0-cocycle")));
        }
        kernel += 1;
    }
    let fa = f_series_unchecked(&cx.crystal, cx.cap);
    let u_inv = mat_inverse(ok, &snf.u)?;
    let mut torsion = 0;
    for (i, &d) in snf.elementary_divisor_valuations.iter().enumerate().take(snf.rank) {
        if d == 0 {
            continue;
        }
        let w = u_inv.column(i);
        if solve_in_image(ok, a, &w)?.is_some() {
            return Err(Error::InvariantsMismatch(format!("torsion class {i} is a boundary")));
        }
        let scaled: Vec<_> = w.iter().map(|c| ok.mul(&ok.pow(&ok.pi(), d as u64), c)).collect();
        let m = solve_in_image(ok, a, &scaled)?
            .ok_or_else(|| Error::InvariantsMismatch(format!("π^{d} times class {i} is not a boundary")))?;
        let d0 = cx.differential(&CechLevel::from_vector(ok, &m, cx.cap))?;
        let target = CechLevel::series_times_vector(ok, &fa, &scaled);
        if d0.first_difference(ok, &target, cx.cap).is_some() {
            return Err(Error::InvariantsMismatch(format!("d^0 of the preimage of class {i} is wrong")));
        }
        torsion += 1;
    }
    Ok(CohomologyCrossCheck { kernel_vectors: kernel, torsion_classes: torsion })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMapReport {
    pub basis_checked: usize,
    pub margin: usize,
}

/// ρ: m ↦ F_A(X_1)m in degree 1, ρ′: f ↦ ∂f/∂X_1(0); checks both are
/// chain maps and ρ′∘ρ = id on a basis.
pub fn rho_and_rho_prime(cx: &CechComplex) -> Result<ChainMapReport> {
    let ok = cx.ring();
    let c = &cx.crystal;
    let l = c.rank();
    let fa = f_series_unchecked(c, cx.cap);
    let one_mono = Mono::from_slice(&[1]);
    for j in 0..l {
        let e: Vec<OkElem> = (0..l).map(|i| if i == j { ok.one() } else { ok.zero() }).collect();
        let rho1 = CechLevel::series_times_vector(ok, &fa, &e);
        // degree 0 square: d^0 ∘ ρ^0 = ρ^1 ∘ A
        let d0 = cx.differential(&CechLevel::from_vector(ok, &e, cx.cap))?;
        let ae = mat_vec(ok, &c.matrix, &e);
        let rho_ae = CechLevel::series_times_vector(ok, &fa, &ae);
        if let Some((r, m)) = d0.first_difference(ok, &rho_ae, cx.cap) {
            return Err(Error::ChainMapViolation(format!("d0∘ρ ≠ ρ∘A for e{j} at component {r}, X^{m}")));
        }
        // ρ^1 lands in the kernel of d^1
        let d1 = cx.differential(&rho1)?;
        if !d1.is_zero() {
            return Err(Error::ChainMapViolation(format!("d1(F_A·e{j}) ≠ 0")));
        }
        // ρ′ ∘ d^0 = A ∘ ρ′ in degree 1
        if d0.coeff_mono(ok, one_mono) != ae {
            return Err(Error::ChainMapViolation(format!("ρ′∘d0 ≠ A for e{j}")));
        }
        // ρ′ ∘ ρ = id
        if rho1.coeff_mono(ok, one_mono) != e {
            return Err(Error::ChainMapViolation(format!("ρ′∘ρ ≠ id on e{j}")));
        }
    }
    Ok(ChainMapReport { basis_checked: l, margin: cx.cap })
}

/// ρ′ in degree 1.
pub fn rho_prime(ok: &OkRing, f: &CechLevel) -> Vec<OkElem> {
    f.coeff(ok, &[1])
}

/// For f ∈ ker d^1, returns a with f = F_A(X_1)·a.
pub fn kernel_membership_d1(cx: &CechComplex, f: &CechLevel) -> Result<Vec<OkElem>> {
    let ok = cx.ring();
    if f.level != 1 {
        return Err(Error::ShapeMismatch(format!("expected a level-1 element, got level {}", f.level)));
    }
    let a0 = f.coeff(ok, &[0]);
    if a0.iter().any(|c| !ok.is_zero(c)) {
        return Err(Error::NotInKernel("constant term f(0) is nonzero".into()));
    }
    if !cx.differential(f)?.is_zero() {
        return Err(Error::NotInKernel("d1(f) ≠ 0".into()));
    }
    let a1 = rho_prime(ok, f);
    let fa = f_series_unchecked(&cx.crystal, cx.cap);
    let back = CechLevel::series_times_vector(ok, &fa, &a1);
    if let Some((r, m)) = back.first_difference(ok, f, cx.cap) {
        return Err(Error::NotInImage(format!("f differs from F_A·a1 at component {r}, X^{m}")));
    }
    Ok(a1)
}

//! The acceptance suite, one function per criterion, at desk-scale defaults.

use std::time::Instant;

use rand::Rng as _;
use serde::Serialize;

use crate::base_rings::matrix::{identity, mat_inverse, mat_mul, min_valuation, scalar, Matrix};
use crate::base_rings::{OkElem, OkRing, Ring};
use crate::cohomology::{
    compute_h0_h1, kernel_membership_d1, kernel_rigidity_check, preimage_general, preimage_s2, rho_and_rho_prime,
    verify_complex, verify_f_identities, CechComplex, CechLevel,
};
use crate::corpus;
use crate::crystal::{
    build_stratification, pair_from_stratification, perturb, strat_coeffs, verify_cocycle, verify_cocycle_coeffs, Crystal,
    NilpotencyVerdict,
};
use crate::error::{Error, Result};
use crate::galois::{self, CycSpec, GroupElem};
use crate::pd_series::Mono;
use crate::qcalc;
use crate::weights::{self, TruncPoly, WeightProfile};

#[derive(Clone, Debug, Serialize)]
pub struct SelftestConfig {
    pub precision: u32,
    pub degree: usize,
    pub lambda_degree: usize,
    pub u_cap: usize,
    pub m_cap: usize,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { precision: 6, degree: 8, lambda_degree: 8, u_cap: 24, m_cap: 12, seed: 42 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn(&SelftestConfig) -> Result<String>;

pub const CRITERIA: [(usize, &str, Check); 11] = [
    (1, "equivalence roundtrip", roundtrip),
    (2, "stratification cocycle identity", cocycle),
    (3, "Čech complex squares to zero", complex),
    (4, "F_A identities", f_identities),
    (5, "cohomology maps and preimages", cohomology),
    (6, "kernel rigidity relations", rigidity),
    (7, "Galois cocycle identity", galois_cocycle),
    (8, "H0 equals invariants", invariants),
    (9, "q-calculus identities", qcalculus),
    (10, "weights and FL nilpotency", weights_fl),
    (11, "negative controls", negative_controls),
];

pub fn run_criterion(id: usize, cfg: &SelftestConfig) -> Option<CriterionResult> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let out = check(cfg);
    let millis = start.elapsed().as_millis();
    Some(match out {
        Ok(detail) => CriterionResult { id, name, passed: true, detail, millis },
        Err(e) => CriterionResult { id, name, passed: false, detail: e.to_string(), millis },
    })
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, cfg)).collect()
}

fn fail(msg: impl Into<String>) -> Error {
    Error::StructureViolation(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

/// 100 crystals: 20 per standard ring, ranks 1..=3.
fn corpus100(cfg: &SelftestConfig) -> Result<Vec<Crystal>> {
    corpus::crystal_corpus(cfg.precision, 3, 20, cfg.seed)
}

fn roundtrip(cfg: &SelftestConfig) -> Result<String> {
    let cs = corpus100(cfg)?;
    for (k, c) in cs.iter().enumerate() {
        let eps = build_stratification(c, cfg.degree)?;
        let back = pair_from_stratification(&c.ring, &eps)?;
        ensure(back == *c, || format!("crystal {k} does not round-trip"))?;
    }
    Ok(format!("{} crystals exact through degree {}", cs.len(), cfg.degree))
}

fn cocycle(cfg: &SelftestConfig) -> Result<String> {
    let cs = corpus100(cfg)?;
    for c in &cs {
        verify_cocycle(c, cfg.degree)?;
    }
    let mut r = corpus::rng(cfg.seed ^ 0xc0c1);
    let k = r.gen_range(0..cs.len());
    let c = &cs[k];
    let ok = &c.ring;
    let mut coeffs = strat_coeffs(c, 2 * cfg.degree + 1);
    let n = r.gen_range(1..=cfg.degree);
    perturb(ok, &mut coeffs, n, &identity(ok, c.rank()));
    match verify_cocycle_coeffs(ok, ok.alpha(), &coeffs, cfg.degree) {
        Err(Error::CocycleViolation { at }) => Ok(format!(
            "{} crystals through degree {}; perturbing A_{n} of crystal {k} fails at {at}",
            cs.len(),
            cfg.degree
        )),
        other => Err(fail(format!("perturbed coefficients were not rejected: {other:?}"))),
    }
}

fn complex(cfg: &SelftestConfig) -> Result<String> {
    let mut r = corpus::rng(cfg.seed ^ 0xd2);
    let mut inputs = 0;
    for ok in corpus::standard_rings(cfg.precision) {
        let c = corpus::random_admissible_crystal(&ok, 2, &mut r)?;
        let cx = CechComplex::new(&c, cfg.degree, 3)?;
        inputs += verify_complex(&cx)?.inputs_checked;
        // a relabelled face must break d∘d = 0
        let bad = cx.with_flipped_face(1);
        ensure(verify_complex(&bad).is_err(), || "flipped face not detected".into())?;
    }
    Ok(format!("d∘d = 0 on {inputs} basis inputs, levels 0..2, through degree {}", cfg.degree))
}

fn f_identities(cfg: &SelftestConfig) -> Result<String> {
    let cs = corpus100(cfg)?;
    for c in &cs {
        verify_f_identities(c, cfg.degree)?;
    }
    Ok(format!("{} crystals, degrees {} and {}", cs.len(), cfg.degree, cfg.degree - 1))
}

fn cohomology(cfg: &SelftestConfig) -> Result<String> {
    let d = cfg.degree;
    let mut r = corpus::rng(cfg.seed ^ 0xe5);
    let rings = corpus::standard_rings(cfg.precision);
    let (mut s2, mut s3, mut kern) = (0, 0, 0);
    for k in 0..50 {
        let ok = &rings[k % rings.len()];
        let c = corpus::random_admissible_crystal(ok, 1 + k % 2, &mut r)?;
        let cx = CechComplex::new(&c, d, 4)?;
        if k < 10 {
            rho_and_rho_prime(&cx)?;
        }
        let l = c.rank();
        let h = CechLevel::random(ok, 1, l, d, 40, &mut r);
        let f = cx.differential(&h)?;
        let g = preimage_s2(&cx, &f)?;
        ensure(cx.differential(&g)? == f, || format!("s = 2 preimage {k} fails"))?;
        s2 += 1;
        if k < 30 {
            let h = CechLevel::random(ok, 2, l, d, 30, &mut r);
            let f = cx.differential(&h)?;
            let g = preimage_general(&cx, 3, &f)?;
            ensure(cx.differential(&g)? == f, || format!("s = 3 preimage {k} fails"))?;
            s3 += 1;
        }
        if k < 20 {
            let m: Vec<OkElem> = (0..l).map(|_| ok.random(&mut r)).collect();
            let fa = crate::cohomology::f_series(&c, d)?;
            let f = CechLevel::series_times_vector(ok, &fa, &m);
            ensure(kernel_membership_d1(&cx, &f)? == m, || format!("F_A multiple {k} not recovered"))?;
            kern += 1;
        }
    }
    let ok = &rings[0];
    let zero = Crystal::new(ok.clone(), scalar(ok, 1, &ok.zero()))?;
    let h = compute_h0_h1(&zero)?;
    ensure(h.h0_rank == 1 && h.h1_free_rank == 1, || format!("A = 0: {h:?}"))?;
    let p = Crystal::new(ok.clone(), scalar(ok, 1, &ok.from_int(ok.p() as i64)))?;
    let h = compute_h0_h1(&p)?;
    ensure(h.h0_rank == 0 && h.h1_torsion == vec![ok.e() as u32], || format!("A = [p]: {h:?}"))?;
    Ok(format!("ρ′∘ρ = id; {s2} s=2 and {s3} s=3 preimages exact through degree {d}; {kern} kernel recoveries"))
}

fn rigidity(cfg: &SelftestConfig) -> Result<String> {
    let d = cfg.degree;
    let mut r = corpus::rng(cfg.seed ^ 0xf6);
    let rings = corpus::standard_rings(cfg.precision);
    let mut relations = 0;
    for k in 0..30 {
        let ok = &rings[k % rings.len()];
        let c = corpus::random_admissible_crystal(ok, 1 + k % 2, &mut r)?;
        let cx = CechComplex::new(&c, d, 3)?;
        let s = 2 + k % 2;
        let h = CechLevel::random(ok, s - 1, c.rank(), d, 40, &mut r);
        relations += kernel_rigidity_check(&cx, s, &cx.differential(&h)?)?.relations_checked;
    }
    let ok = &rings[0];
    let c = corpus::random_admissible_crystal(ok, 1, &mut r)?;
    let cx = CechComplex::new(&c, d, 3)?;
    for (s, idx) in [(2, vec![2, 1]), (3, vec![2, 1, 1])] {
        let mut f = cx.differential(&CechLevel::random(ok, s - 1, 1, d, 40, &mut r))?;
        f.data[0].add_term(ok, Mono::from_slice(&idx), ok.one());
        ensure(matches!(kernel_rigidity_check(&cx, s, &f), Err(Error::RelationViolation { .. })), || {
            format!("violated relation at {idx:?} not detected")
        })?;
    }
    Ok(format!("30 boundaries, {relations} relations; single violations at s = 2, 3 detected"))
}

fn galois_cocycle(cfg: &SelftestConfig) -> Result<String> {
    let cs = corpus::crystal_corpus(cfg.precision, 3, 4, cfg.seed ^ 0x61)?;
    let mut pairs = 0;
    for (k, c) in cs.iter().enumerate() {
        let chi = if k % 2 == 0 { None } else { Some(2) };
        let spec = CycSpec::new(&c.ring, cfg.lambda_degree, chi)?;
        let sample = galois::standard_sample(&spec);
        pairs += galois::verify_cocycle_identity(&spec, c, &sample)?.pairs;
    }
    // A = −α: U(τ²) = 1 − 2x with x = απλ(1−ζ)
    let ok = &corpus::standard_rings(cfg.precision)[2];
    let spec = CycSpec::new(ok, cfg.lambda_degree, None)?;
    let c = Crystal::new(ok.clone(), scalar(ok, 1, &ok.neg(ok.alpha())))?;
    let cyc = spec.cyc();
    let x = cyc.mul(&cyc.from_ok(&ok.mul(&ok.pi(), ok.alpha())), &cyc.sub(&cyc.one(), &cyc.zeta_pow(1)));
    let u_t = galois::cocycle_u(&spec, &c, &GroupElem::TAU)?;
    let lam = &spec.lam;
    let expect_t = lam.sub(&lam.one(), &lam.monomial(1, x.clone()));
    ensure(u_t.get(0, 0) == &expect_t, || "U(τ) ≠ 1 − x".into())?;
    let two = galois::cocycle_u(&spec, &c, &GroupElem::new(2, 0))?;
    let product = lam.mul(u_t.get(0, 0), &spec.galois_act(&GroupElem::TAU, u_t.get(0, 0)));
    let expect = lam.sub(&lam.one(), &lam.monomial(1, cyc.mul_int(&x, 2)));
    ensure(two.get(0, 0) == &expect && product == expect, || "U(τ²) ≠ (1 − x)·τ(1 − x) = 1 − 2x".into())?;
    Ok(format!("{} crystals, {pairs} pairs exact through λ-degree {}; U(τ²) = 1 − 2x", cs.len(), cfg.lambda_degree))
}

/// S·diag(0,…,0, units·π, …)·S^{-1}: kernels of every dimension.
fn mixed_kernel_crystal(ok: &OkRing, rank: usize, kernel: usize, r: &mut rand_chacha::ChaCha8Rng) -> Result<Crystal> {
    let pi = ok.pi();
    let d = Matrix::from_fn(rank, rank, |i, j| {
        if i == j && i >= kernel {
            ok.mul(&pi, &ok.random_unit(r))
        } else if i < j && j >= kernel {
            ok.mul(&pi, &ok.random(r))
        } else {
            ok.zero()
        }
    });
    let s = corpus::random_gl(ok, rank, r);
    let a = mat_mul(ok, &mat_mul(ok, &s, &d), &mat_inverse(ok, &s)?);
    Crystal::new(ok.clone(), a)
}

fn invariants(cfg: &SelftestConfig) -> Result<String> {
    let mut r = corpus::rng(cfg.seed ^ 0x80);
    let rings = corpus::standard_rings(cfg.precision);
    let mut crystals = corpus::crystal_corpus(cfg.precision, 3, 4, cfg.seed ^ 0x81)?;
    for k in 0..10 {
        let ok = &rings[k % rings.len()];
        let rank = 2 + k % 2;
        crystals.push(mixed_kernel_crystal(ok, rank, 1 + k % rank.min(2), &mut r)?);
    }
    let (mut inv, mut wit) = (0, 0);
    for c in &crystals {
        let spec = CycSpec::new(&c.ring, cfg.lambda_degree, None)?;
        let rep = galois::h0_equals_invariants(&spec, c)?;
        let snf = crate::base_rings::smith_normal_form(&c.ring, &c.matrix)?;
        ensure(rep.invariant_vectors == snf.free_rank_kernel, || "invariant count differs from dim ker A".into())?;
        inv += rep.invariant_vectors;
        wit += rep.non_invariant_witnesses;
    }
    Ok(format!("{} crystals: {inv} invariant kernel vectors, {wit} moved vectors", crystals.len()))
}

fn qcalculus(cfg: &SelftestConfig) -> Result<String> {
    let mut r = corpus::rng(cfg.seed ^ 0x9c);
    let rings = corpus::standard_rings(cfg.precision);
    for ok in &rings {
        qcalc::verify_all(ok, 4, cfg.u_cap, cfg.m_cap, 2, &mut r)?;
    }
    Ok(format!("{} rings, h ≤ 4, u-cap {}, m1-cap {}", rings.len(), cfg.u_cap, cfg.m_cap))
}

fn weights_fl(cfg: &SelftestConfig) -> Result<String> {
    let cs = corpus100(cfg)?;
    for (k, c) in cs.iter().enumerate() {
        ensure(weights::poly_nilpotency_check(c)?.is_certified(), || format!("crystal {k} not poly-nilpotent"))?;
    }
    let mut r = corpus::rng(cfg.seed ^ 0xa5);
    let p = 5;
    let t = TruncPoly::new(p, cfg.m_cap);
    for _ in 0..200 {
        let d = r.gen_range(1..=3);
        let mut w: Vec<u32> = (0..d).map(|_| r.gen_range(0..=p as u32)).collect();
        w.sort();
        let n = Matrix::from_fn(d, d, |i, j| if j > i { (0..cfg.m_cap).map(|_| r.gen_range(0..p)).collect() } else { t.zero() });
        weights::fl_check(p, &WeightProfile::new(w)?, &n, cfg.m_cap)?;
    }
    let t3 = TruncPoly::new(3, cfg.m_cap);
    let n = Matrix::from_rows(vec![vec![t3.zero(), t3.one()], vec![t3.zero(), t3.zero()]]);
    let rep = weights::fl_check(3, &WeightProfile::new(vec![0, 1])?, &n, cfg.m_cap)?;
    ensure(rep.product.iter().flatten().all(|x| t3.is_zero(x)), || "d = 2 example: P ≠ 0".into())?;
    Ok(format!("{} crystals poly-nilpotent; 200 FL instances at p = 5; d = 2 example P = 0", cs.len()))
}

fn negative_controls(cfg: &SelftestConfig) -> Result<String> {
    let ok = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 1], cfg.precision))?;
    let c = Crystal::new(ok.clone(), scalar(&ok, 1, &ok.x()))?;
    ensure(matches!(c.nilpotency(), NilpotencyVerdict::ResidueObstruction { .. }), || "admissibility accepted [x]".into())?;
    ensure(matches!(verify_cocycle(&c, cfg.degree), Err(Error::NotAdmissible(_))), || "cocycle check accepted [x]".into())?;
    // the coefficients Π(x + i) stay units: the series does not converge
    let coeffs = crate::crystal::strat_coeffs(&c, cfg.degree);
    let v = min_valuation(&ok, &coeffs[cfg.degree]).value();
    ensure(v == 0, || format!("A_D has valuation {v}"))?;
    ensure(
        matches!(weights::poly_nilpotency_check(&c)?, NilpotencyVerdict::ResidueObstruction { .. }),
        || "poly-nilpotency accepted [x]".into(),
    )?;
    Ok(format!("[x] over F_9: admissibility, cocycle (v(A_{}) = 0) and poly-nilpotency all reject", cfg.degree))
}

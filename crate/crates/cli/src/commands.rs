use prismkit::cohomology::{
    compute_h0_h1, cross_check_h0_h1, kernel_rigidity_check, preimage_general, preimage_s2, rho_and_rho_prime,
    verify_complex, verify_f_identities, CechComplex, CechLevel,
};
use prismkit::corpus;
use prismkit::crystal::{build_stratification, pair_from_stratification, verify_cocycle};
use prismkit::galois::{self, CycSpec, GroupElem, LamElem};
use prismkit::json::{
    crystal_from_json, elem_to_json, matrix_to_json, pd_matrix_series_to_json, ring_from_json, trunc_matrix_from_json,
};
use prismkit::qcalc::{self, QRing};
use prismkit::weights::{self, WeightProfile};
use prismkit::{Crystal, Error, Matrix, NilpotencyVerdict, OkRing, Result};
use serde_json::{json, Value};

use crate::report::Report;

fn load_crystal(rep: &mut Report, path: &str) -> Result<Crystal> {
    let v = rep.read_json(path)?;
    crystal_from_json(&v)
}

fn degree_or_default(c: &Crystal, degree: Option<usize>) -> usize {
    degree.unwrap_or(8).max(1).min(c.ring.horizon() as usize * 4 + 8)
}

/// Records a nilpotency verdict. Returns whether it was certified.
fn record_verdict(rep: &mut Report, name: &str, v: &NilpotencyVerdict) -> bool {
    match v {
        NilpotencyVerdict::CertifiedNilpotent { n_star, attained_valuation } => {
            rep.pass(name, format!("certified at n* = {n_star}, valuation {attained_valuation}"));
            true
        }
        NilpotencyVerdict::ResidueObstruction { witness_power } => {
            rep.fail(name, format!("residue product not nilpotent (power {witness_power})"));
            false
        }
        NilpotencyVerdict::Inconclusive { budget } => {
            rep.exhausted(name, format!("no verdict within {budget} factors"));
            false
        }
    }
}

fn verdict_json(v: &NilpotencyVerdict) -> Value {
    match v {
        NilpotencyVerdict::CertifiedNilpotent { n_star, attained_valuation } => {
            json!({"verdict": "certified", "n_star": n_star, "attained_valuation": attained_valuation})
        }
        NilpotencyVerdict::ResidueObstruction { witness_power } => {
            json!({"verdict": "residue_obstruction", "witness_power": witness_power})
        }
        NilpotencyVerdict::Inconclusive { budget } => json!({"verdict": "inconclusive", "budget": budget}),
    }
}

pub fn check(rep: &mut Report, crystal: &str, degree: Option<usize>) -> Result<()> {
    let c = load_crystal(rep, crystal)?;
    let d = degree_or_default(&c, degree);
    if !c.is_integral() {
        rep.fail("admissibility", format!("matrix has denominator π^{}", c.denominator_exp));
        rep.result = json!({"verdict": "not_integral", "degree": d});
        return Ok(());
    }
    let v = c.nilpotency();
    rep.result = json!({"degree": d, "nilpotency": verdict_json(&v)});
    if !record_verdict(rep, "admissibility", &v) {
        return Ok(());
    }
    rep.record(
        "stratification",
        build_stratification(&c, d).and_then(|eps| {
            let back = pair_from_stratification(&c.ring, &eps)?;
            if back.matrix != c.matrix {
                return Err(Error::ReconstructionMismatch("recovered matrix differs".into()));
            }
            Ok(format!("ε built through degree {d}, A recovered"))
        }),
    )?;
    rep.record(
        "cocycle",
        verify_cocycle(&c, d).map(|r| {
            format!("{} coefficient identities, {} two-variable terms", r.coefficient_identities, r.two_variable_terms)
        }),
    )?;
    Ok(())
}

pub fn stratify(rep: &mut Report, crystal: &str, degree: Option<usize>) -> Result<()> {
    let c = load_crystal(rep, crystal)?;
    let d = degree_or_default(&c, degree);
    let eps = build_stratification(&c, d)?;
    let back = pair_from_stratification(&c.ring, &eps)?;
    if back.matrix == c.matrix {
        rep.pass("roundtrip", format!("A recovered from ε through degree {d}"));
    } else {
        rep.fail("roundtrip", "recovered matrix differs");
    }
    rep.result = json!({"degree": d, "stratification": pd_matrix_series_to_json(&c.ring, &eps)});
    Ok(())
}

pub struct CohomologyArgs<'a> {
    pub crystal: &'a str,
    pub smax: usize,
    pub degree: usize,
    pub preimage_s: Option<usize>,
    pub samples: usize,
    pub seed: u64,
}

pub fn cohomology(rep: &mut Report, a: &CohomologyArgs) -> Result<()> {
    let c = load_crystal(rep, a.crystal)?;
    c.require_admissible()?;
    let d = a.degree;
    let s_max = a.smax.max(a.preimage_s.map_or(0, |s| s + 1));
    let cx = CechComplex::new(&c, d, s_max)?;
    rep.record(
        "complex",
        verify_complex(&cx).map(|r| format!("d∘d = 0 on {} basis inputs, {} levels", r.inputs_checked, r.levels_checked)),
    )?;
    rep.record(
        "f_identities",
        verify_f_identities(&c, d).map(|r| {
            format!("I + A·F_A = ε through {}, derivative through {}", r.stratification_degree, r.derivative_degree)
        }),
    )?;
    rep.record(
        "chain_maps",
        rho_and_rho_prime(&cx).map(|r| format!("ρ′∘ρ = id on {} basis elements", r.basis_checked)),
    )?;
    rep.record(
        "h0_h1_cross_check",
        cross_check_h0_h1(&cx)
            .map(|r| format!("{} kernel vectors, {} torsion classes", r.kernel_vectors, r.torsion_classes)),
    )?;
    let h = compute_h0_h1(&c)?;
    let mut result = json!({"degree": d, "s_max": s_max, "cohomology": h});
    if let Some(s) = a.preimage_s {
        if s < 2 {
            return Err(Error::UnsupportedLevel(s));
        }
        let ok = &c.ring;
        let mut r = corpus::rng(a.seed);
        let mut exact = 0;
        for k in 0..a.samples {
            let f = cx.differential(&CechLevel::random(ok, s - 1, c.rank(), d, 40, &mut r))?;
            let g = if s == 2 { preimage_s2(&cx, &f) } else { preimage_general(&cx, s, &f) };
            let ok_here = rep.record(
                &format!("preimage[{k}]"),
                g.and_then(|g| {
                    if cx.differential(&g)? == f {
                        Ok(format!("d(g) = f at level {s} through degree {d}"))
                    } else {
                        Err(Error::ReconstructionMismatch(format!("d(g) ≠ f for sample {k}")))
                    }
                }),
            )?;
            if s <= 3 {
                rep.record(
                    &format!("rigidity[{k}]"),
                    kernel_rigidity_check(&cx, s, &f).map(|r| format!("{} relations", r.relations_checked)),
                )?;
            }
            exact += ok_here as usize;
        }
        result["preimages"] = json!({"level": s, "samples": a.samples, "exact": exact, "seed": a.seed});
    }
    rep.result = result;
    Ok(())
}

fn lam_to_json(ok: &OkRing, x: &LamElem) -> Value {
    Value::Array(x.iter().map(|c| Value::Array(c.iter().map(|e| elem_to_json(ok, e)).collect())).collect())
}

fn lam_matrix_to_json(ok: &OkRing, m: &Matrix<LamElem>) -> Value {
    Value::Array((0..m.rows).map(|i| Value::Array((0..m.cols).map(|j| lam_to_json(ok, m.get(i, j))).collect())).collect())
}

pub fn galois_cocycle(rep: &mut Report, crystal: &str, g: &str, lambda_degree: usize, chi: Option<i64>) -> Result<()> {
    let c = load_crystal(rep, crystal)?;
    let g: GroupElem = g.parse()?;
    let cs = CycSpec::new(&c.ring, lambda_degree, chi)?;
    let u = galois::cocycle_u(&cs, &c, &g)?;
    let mut sample = galois::standard_sample(&cs);
    if !sample.contains(&g) {
        sample.push(g);
    }
    rep.record(
        "cocycle_identity",
        galois::verify_cocycle_identity(&cs, &c, &sample)
            .map(|r| format!("U(gh) = U(g)·g(U(h)) on {} pairs through λ^{}", r.pairs, r.lambda_degree)),
    )?;
    rep.record(
        "h0_invariants",
        galois::h0_equals_invariants(&cs, &c).map(|r| {
            format!(
                "kernel dim {}, {} invariant vectors, {} non-invariant witnesses",
                r.kernel_dim, r.invariant_vectors, r.non_invariant_witnesses
            )
        }),
    )?;
    let et = galois::etale_comparison_dims(&c)?;
    let detail = format!("conjecture-consistency: φ dims {:?}, Sen dims {:?}", et.phi_dims, et.sen_dims);
    if et.agree {
        rep.pass("etale_dims", detail);
    } else {
        rep.fail("etale_dims", detail);
    }
    let (sen, den) = galois::sen_operator(&c)?;
    rep.result = json!({
        "g": g.to_string(),
        "chi": cs.chi,
        "lambda_degree": lambda_degree,
        "u": lam_matrix_to_json(&c.ring, &u),
        "sen": {"numerator": matrix_to_json(&c.ring, &sen), "pi_denominator": den},
        "etale": {"phi_dims": et.phi_dims, "sen_dims": et.sen_dims, "agree": et.agree},
    });
    Ok(())
}

pub struct QcalcArgs<'a> {
    pub ring: &'a str,
    pub h_max: usize,
    pub u_cap: usize,
    pub m_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

pub fn qcalc_verify(rep: &mut Report, a: &QcalcArgs) -> Result<()> {
    let v = rep.read_json(a.ring)?;
    let ok = ring_from_json(v.get("ring").unwrap_or(&v))?;
    let q = QRing::new(&ok, a.u_cap, a.m_cap);
    let p = ok.p() as usize;
    let mut r = corpus::rng(a.seed);
    for k in 0..a.samples {
        let f = q.random_u_series(&mut r, a.u_cap);
        let g = q.random_u_series(&mut r, a.u_cap / 2);
        let small = q.random_u_series(&mut r, a.u_cap / p);
        let done = |res: Result<()>, what: &str| res.map(|_| what.to_string());
        rep.record(&format!("tau[{k}]"), done(qcalc::verify_tau_identity(&q, &f), "τ = 1 + μu·d_q"))?;
        rep.record(&format!("leibniz[{k}]"), done(qcalc::verify_leibniz(&q, &f, &g), "twisted Leibniz rule"))?;
        rep.record(&format!("nabla_routes[{k}]"), done(qcalc::verify_nabla_routes(&q, &f), "three routes to ∇ agree"))?;
        rep.record(&format!("dq_mod_xi[{k}]"), done(qcalc::verify_dq_mod_xi(&q, &ok, &f), "d_q reduces to d/du"))?;
        rep.record(&format!("phi_nabla[{k}]"), done(qcalc::verify_phi_nabla(&q, &small), "φ intertwines ∇"))?;
    }
    let mut powers = Vec::new();
    for h in 1..=a.h_max {
        let res = qcalc::verify_dq_power_of_e(&q, &ok, h);
        if let Ok(pr) = &res {
            powers.push(pr.clone());
        }
        rep.record(
            &format!("dq_power[h={h}]"),
            res.map(|pr| format!("d_q(E^{h}) factorization, margins u {} m {}", pr.u_margin, pr.m_margin)),
        )?;
    }
    rep.result = json!({"u_cap": a.u_cap, "m_cap": a.m_cap, "samples": a.samples, "seed": a.seed, "dq_powers": powers});
    Ok(())
}

pub fn weights_check(rep: &mut Report, crystal: &str, weights_arg: &str, target: Option<u32>) -> Result<()> {
    let c = load_crystal(rep, crystal)?;
    let profile = WeightProfile::parse(weights_arg)?;
    let ok = &c.ring;
    let target = target.unwrap_or(ok.horizon());
    let budget = profile.d() * (target as usize + 1) * ok.p() as usize;
    let wv = weights::weight_nilpotency_check(ok, &c.matrix, &profile, ok.alpha(), target, budget)?;
    record_verdict(rep, "weight_nilpotency (conjecture-consistency)", &wv);
    let pv = weights::poly_nilpotency_check(&c)?;
    record_verdict(rep, "poly_nilpotency", &pv);
    rep.result = json!({
        "weights": profile.r,
        "target": target,
        "weight_nilpotency": verdict_json(&wv),
        "poly_nilpotency": verdict_json(&pv),
    });
    Ok(())
}

pub fn fl_check(rep: &mut Report, p: u64, weights_arg: &str, matrix: &str, m_cap: usize) -> Result<()> {
    let v = rep.read_json(matrix)?;
    let profile = WeightProfile::parse(weights_arg)?;
    let n = trunc_matrix_from_json(v.get("matrix").unwrap_or(&v), p, m_cap)?;
    let r = weights::fl_check(p, &profile, &n, m_cap);
    if let Ok(r) = &r {
        rep.result = serde_json::to_value(r).unwrap_or(Value::Null);
    }
    rep.record("fl_nilpotency", r.map(|r| format!("P strictly upper triangular, P^{} = 0", r.nilpotency_index)))?;
    Ok(())
}

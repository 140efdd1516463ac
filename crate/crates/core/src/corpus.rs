//! Seeded test rings and random crystals.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base_rings::matrix::{mat_inverse, mat_mul, Matrix};
use crate::base_rings::{OkElem, OkRing, Ring, RingSpec};
use crate::crystal::Crystal;
use crate::error::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spec(p: u64, residue_min_poly: &[i64], eisenstein: &[i64], precision: u32) -> RingSpec {
    RingSpec {
        p,
        f: residue_min_poly.len() - 1,
        residue_min_poly: residue_min_poly.to_vec(),
        eisenstein: eisenstein.to_vec(),
        precision,
        assume_linear_disjoint: None,
    }
}

/// The desk-scale rings: unramified, degree-2 unramified, and ramified
/// examples over p = 3 and p = 5.
pub fn standard_specs(precision: u32) -> Vec<RingSpec> {
    vec![
        spec(3, &[0, 1], &[-3, 1], precision),
        spec(3, &[1, 0, 1], &[-3, 1], precision),
        spec(3, &[0, 1], &[-3, 0, 1], precision),
        spec(5, &[0, 1], &[-5, 1], precision),
        spec(5, &[0, 1], &[5, 5, 0, 1], precision),
    ]
}

pub fn standard_rings(precision: u32) -> Vec<OkRing> {
    standard_specs(precision)
        .into_iter()
        .map(|s| OkRing::new(s).expect("standard ring"))
        .collect()
}

/// A ramified ring over which Φ_3 splits (K contains ζ_3).
pub fn split_cyclotomic_spec(precision: u32) -> RingSpec {
    spec(3, &[1, 0, 1], &[-3, 0, 1], precision)
}

fn random_unitriangular(ok: &OkRing, n: usize, lower: bool, rng: &mut ChaCha8Rng) -> Matrix<OkElem> {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            ok.one()
        } else if (i > j) == lower {
            ok.random(rng)
        } else {
            ok.zero()
        }
    })
}

/// A random invertible matrix.
pub fn random_gl(ok: &OkRing, n: usize, rng: &mut ChaCha8Rng) -> Matrix<OkElem> {
    let l = random_unitriangular(ok, n, true, rng);
    let u = random_unitriangular(ok, n, false, rng);
    mat_mul(ok, &l, &u)
}

/// A random matrix satisfying the admissibility criterion: a conjugate of
/// T + πR with T upper triangular whose diagonal reduces into the allowed
/// residue set.
pub fn random_admissible_matrix(ok: &OkRing, n: usize, rng: &mut ChaCha8Rng) -> Result<Matrix<OkElem>> {
    let pi = ok.pi();
    let unramified_alpha = ok.is_unit(ok.alpha());
    let t = Matrix::from_fn(n, n, |i, j| {
        let noise = ok.mul(&pi, &ok.random(rng));
        let base = if i < j {
            ok.random(rng)
        } else if i == j && unramified_alpha {
            // eigenvalues reduce into F_p · ᾱ
            ok.mul(ok.alpha(), &ok.from_int(rng.gen_range(0..ok.p() as i64)))
        } else {
            ok.zero()
        };
        ok.add(&base, &noise)
    });
    let s = random_gl(ok, n, rng);
    let s_inv = mat_inverse(ok, &s)?;
    Ok(mat_mul(ok, &mat_mul(ok, &s, &t), &s_inv))
}

pub fn random_admissible_crystal(ok: &OkRing, rank: usize, rng: &mut ChaCha8Rng) -> Result<Crystal> {
    Crystal::new(ok.clone(), random_admissible_matrix(ok, rank, rng)?)
}

/// Admissible crystals of ranks 1..=max_rank over every standard ring.
pub fn crystal_corpus(precision: u32, max_rank: usize, per_ring: usize, seed: u64) -> Result<Vec<Crystal>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for ok in standard_rings(precision) {
        for k in 0..per_ring {
            let rank = 1 + k % max_rank;
            out.push(random_admissible_crystal(&ok, rank, &mut r)?);
        }
    }
    Ok(out)
}

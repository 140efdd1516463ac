//! Smith normal form over the discrete valuation ring O_K.

use super::matrix::{identity, Matrix};
use super::ok::{OkElem, OkRing, Valuation};
use super::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Valuations of the nonzero diagonal entries, weakly increasing.
    pub elementary_divisor_valuations: Vec<u32>,
    pub rank: usize,
    pub free_rank_kernel: usize,
    pub free_rank_cokernel: usize,
    /// U·A·V = D.
    pub u: Matrix<OkElem>,
    pub v: Matrix<OkElem>,
    pub diagonal: Matrix<OkElem>,
}

impl SnfResult {
    /// Torsion part of the cokernel as π-valuations (divisors of valuation ≥ 1).
    pub fn torsion(&self) -> Vec<u32> {
        self.elementary_divisor_valuations.iter().copied().filter(|&d| d > 0).collect()
    }
}

/// Pivots on the entry of least valuation, ties broken by lowest row then
/// lowest column. Fails when a pivot lies within one p-adic digit of the
/// precision horizon, where torsion and truncation noise are indistinguishable.
pub fn smith_normal_form(ring: &OkRing, a: &Matrix<OkElem>) -> Result<SnfResult> {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut u = identity(ring, rows);
    let mut v = identity(ring, cols);
    let horizon = ring.horizon();
    let guard = ring.e() as u32;
    let mut divisors = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Valuation::Finite(val) = ring.valuation(m.get(i, j)) {
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        if val + guard > horizon {
            return Err(Error::PrecisionExhausted(format!(
                "pivot valuation {val} is within one digit of the horizon {horizon}"
            )));
        }
        m.swap_rows(k, pi);
        u.swap_rows(k, pi);
        m.swap_cols(k, pj);
        v.swap_cols(k, pj);

        let (w, _) = ring.unit_part(m.get(k, k))?;
        let winv = ring.invert(&w)?;
        scale_row(ring, &mut m, k, &winv);
        scale_row(ring, &mut u, k, &winv);

        for i in k + 1..rows {
            if ring.is_zero(m.get(i, k)) {
                continue;
            }
            let q = ring.divide_by_pi_power(m.get(i, k), val)?;
            row_axpy(ring, &mut m, i, k, &q);
            row_axpy(ring, &mut u, i, k, &q);
        }
        for j in k + 1..cols {
            if ring.is_zero(m.get(k, j)) {
                continue;
            }
            let q = ring.divide_by_pi_power(m.get(k, j), val)?;
            col_axpy(ring, &mut m, j, k, &q);
            col_axpy(ring, &mut v, j, k, &q);
        }
        divisors.push(val);
        k += 1;
    }
    let rank = divisors.len();
    Ok(SnfResult {
        elementary_divisor_valuations: divisors,
        rank,
        free_rank_kernel: cols - rank,
        free_rank_cokernel: rows - rank,
        u,
        v,
        diagonal: m,
    })
}

fn scale_row(ring: &OkRing, m: &mut Matrix<OkElem>, r: usize, c: &OkElem) {
    for j in 0..m.cols {
        let x = ring.mul(c, m.get(r, j));
        m.set(r, j, x);
    }
}

/// row_target -= q · row_source
fn row_axpy(ring: &OkRing, m: &mut Matrix<OkElem>, target: usize, source: usize, q: &OkElem) {
    for j in 0..m.cols {
        let x = ring.sub(m.get(target, j), &ring.mul(q, m.get(source, j)));
        m.set(target, j, x);
    }
}

/// col_target -= q · col_source
fn col_axpy(ring: &OkRing, m: &mut Matrix<OkElem>, target: usize, source: usize, q: &OkElem) {
    for i in 0..m.rows {
        let x = ring.sub(m.get(i, target), &ring.mul(q, m.get(i, source)));
        m.set(i, target, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_rings::matrix::mat_mul;
    use crate::base_rings::RingSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(ring: &OkRing, a: &Matrix<OkElem>) -> SnfResult {
        let s = smith_normal_form(ring, a).unwrap();
        let uav = mat_mul(ring, &mat_mul(ring, &s.u, a), &s.v);
        assert_eq!(uav, s.diagonal);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let x = uav.get(i, j);
                if i != j {
                    assert!(ring.is_zero(x));
                } else if i < s.rank {
                    assert_eq!(*x, ring.pow(&ring.pi(), s.elementary_divisor_valuations[i] as u64));
                }
            }
        }
        assert!(s.elementary_divisor_valuations.windows(2).all(|w| w[0] <= w[1]));
        s
    }

    #[test]
    fn small_examples() {
        let r = OkRing::new(RingSpec::unramified(3, 6)).unwrap();
        let z = Matrix::from_rows(vec![vec![r.zero()]]);
        let s = check(&r, &z);
        assert_eq!((s.free_rank_kernel, s.free_rank_cokernel), (1, 1));
        let p = Matrix::from_rows(vec![vec![r.from_int(3)]]);
        let s = check(&r, &p);
        assert_eq!(s.elementary_divisor_valuations, vec![1]);
        assert_eq!(s.free_rank_kernel, 0);
        let d = Matrix::from_rows(vec![vec![r.one(), r.zero()], vec![r.zero(), r.from_int(3)]]);
        assert_eq!(check(&r, &d).elementary_divisor_valuations, vec![0, 1]);
    }

    #[test]
    fn random_ramified() {
        let r = OkRing::new(RingSpec {
            p: 3,
            f: 2,
            residue_min_poly: vec![1, 0, 1],
            eisenstein: vec![3, 3, 1],
            precision: 6,
            assume_linear_disjoint: None,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let a = Matrix::from_fn(3, 3, |_, _| {
                let x = r.random(&mut rng);
                r.mul(&x, &r.pi())
            });
            check(&r, &a);
        }
    }

    #[test]
    fn horizon_guard() {
        let r = OkRing::new(RingSpec::unramified(3, 4)).unwrap();
        let a = Matrix::from_rows(vec![vec![r.from_int(27)]]);
        assert!(smith_normal_form(&r, &a).is_ok());
        let r2 = OkRing::new(RingSpec {
            eisenstein: vec![-3, 0, 1],
            ..RingSpec::unramified(3, 4)
        })
        .unwrap();
        let a = Matrix::from_rows(vec![vec![r2.mul(&r2.from_int(27), &r2.pi())]]);
        assert!(matches!(smith_normal_form(&r2, &a), Err(Error::PrecisionExhausted(_))));
    }
}

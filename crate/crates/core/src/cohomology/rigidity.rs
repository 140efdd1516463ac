use super::{monomials, CechComplex, CechLevel};
use crate::base_rings::matrix::{add_scalar, mat_vec};
use crate::base_rings::{OkElem, OkRing, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub level: usize,
    pub relations_checked: usize,
}

struct Checker<'a> {
    cx: &'a CechComplex,
    f: &'a CechLevel,
    count: usize,
}

impl Checker<'_> {
    fn ok(&self) -> &OkRing {
        self.cx.ring()
    }

    fn a(&self, idx: &[usize]) -> Vec<OkElem> {
        self.f.coeff(self.ok(), idx)
    }

    /// (A + kα)·v
    fn twist(&self, k: usize, v: &[OkElem]) -> Vec<OkElem> {
        let ok = self.ok();
        mat_vec(ok, &add_scalar(ok, &self.cx.crystal.matrix, &ok.mul_int(ok.alpha(), k as u64)), v)
    }

    fn sub(&self, a: &[OkElem], b: &[OkElem]) -> Vec<OkElem> {
        a.iter().zip(b).map(|(x, y)| self.ok().sub(x, y)).collect()
    }

    fn expect(&mut self, relation: &str, idx: &[usize], lhs: Vec<OkElem>, rhs: Vec<OkElem>) -> Result<()> {
        self.count += 1;
        if lhs != rhs {
            return Err(Error::RelationViolation { relation: relation.into(), index: format!("{idx:?}") });
        }
        Ok(())
    }
}

/// Checks the linear relations every level-s cocycle satisfies, then that
/// f really is a cocycle.
pub fn kernel_rigidity_check(cx: &CechComplex, s: usize, f: &CechLevel) -> Result<RigidityReport> {
    if s < 2 || f.level != s {
        return Err(Error::UnsupportedLevel(s));
    }
    let cap = cx.cap;
    let l = cx.rank();
    let zero = vec![cx.ring().zero(); l];
    let mut ck = Checker { cx, f, count: 0 };

    if s == 2 {
        for j in 1..=cap {
            ck.expect("a_{0,l} = 0", &[0, j], ck.a(&[0, j]), zero.clone())?;
        }
        if cap >= 1 {
            let rhs = mat_vec(cx.ring(), &cx.crystal.matrix, &ck.a(&[0, 0]));
            ck.expect("a_{1,0} = A a_{0,0}", &[1, 0], ck.a(&[1, 0]), rhs)?;
        }
        for l1 in 1..cap {
            for l2 in 1..cap - l1 {
                let rhs = ck.sub(&ck.twist(l1 + l2, &ck.a(&[l1, l2])), &ck.a(&[l1, l2 + 1]));
                ck.expect("a_{1+l1,l2} = (A+(l1+l2)α)a_{l1,l2} − a_{l1,1+l2}", &[l1 + 1, l2], ck.a(&[l1 + 1, l2]), rhs)?;
            }
            let rhs = ck.sub(&ck.sub(&ck.twist(l1, &ck.a(&[l1, 0])), &ck.a(&[1, l1])), &ck.a(&[l1, 1]));
            ck.expect("a_{1+l1,0} = (A+l1α)a_{l1,0} − a_{1,l1} − a_{l1,1}", &[l1 + 1, 0], ck.a(&[l1 + 1, 0]), rhs)?;
        }
    } else {
        // a_I = 0 for I = (0^{2i-1}, J) with every entry of J positive
        for m in monomials(s, cap) {
            let idx = m.to_vec(s);
            let zeros = idx.iter().take_while(|&&x| x == 0).count();
            if zeros % 2 == 1 && zeros < s && idx[zeros..].iter().all(|&x| x > 0) {
                ck.expect("leading-zero constant term vanishes", &idx, ck.a(&idx), zero.clone())?;
            }
        }
        // a_{L+E_1} = (A+|L|α)a_L − Σ_{i≥2} a_{L+E_i}, all L_i ≥ 1
        for m in monomials(s, cap.saturating_sub(1)) {
            let idx = m.to_vec(s);
            if idx.contains(&0) {
                continue;
            }
            let mut rhs = ck.twist(m.degree(), &ck.a(&idx));
            for i in 1..s {
                let mut k = idx.clone();
                k[i] += 1;
                rhs = ck.sub(&rhs, &ck.a(&k));
            }
            let mut k = idx.clone();
            k[0] += 1;
            ck.expect("X1 relation", &k, ck.a(&k), rhs)?;
        }
    }

    let df = cx.differential(f)?;
    if df.first_difference(cx.ring(), &CechLevel::zero(s + 1, l, cap), cap).is_some() {
        return Err(Error::NotInKernel(format!("d{s}(f) ≠ 0")));
    }
    Ok(RigidityReport { level: s, relations_checked: ck.count })
}

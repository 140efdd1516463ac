use serde::{Deserialize, Serialize};

use super::modint::{is_prime, reduce_i64, vp};
use super::residue::is_irreducible;
use crate::error::{Error, Result};

/// Description of K: p, the residue polynomial of the unramified part,
/// the Eisenstein polynomial E(u) and the working precision N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub f: usize,
    /// Monic polynomial of degree f, lowest coefficient first.
    pub residue_min_poly: Vec<i64>,
    /// Monic Eisenstein polynomial E(u), lowest coefficient first.
    pub eisenstein: Vec<i64>,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assume_linear_disjoint: Option<bool>,
}

impl RingSpec {
    /// Q_p-style unramified spec with E = u - p.
    pub fn unramified(p: u64, precision: u32) -> Self {
        RingSpec {
            p,
            f: 1,
            residue_min_poly: vec![0, 1],
            eisenstein: vec![-(p as i64), 1],
            precision,
            assume_linear_disjoint: if p == 2 { Some(true) } else { None },
        }
    }

    pub fn e(&self) -> usize {
        self.eisenstein.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidSpec(s));
        if !is_prime(self.p) {
            return bad(format!("p = {} is not prime", self.p));
        }
        if self.precision < 2 {
            return bad("precision must be at least 2".into());
        }
        let bits = (self.p as f64).log2() * self.precision as f64;
        if bits > 61.0 {
            return bad(format!("p^N = {}^{} exceeds 61 bits", self.p, self.precision));
        }
        if self.f == 0 || self.residue_min_poly.len() != self.f + 1 {
            return bad("residue_min_poly must have degree f".into());
        }
        if *self.residue_min_poly.last().unwrap() != 1 {
            return bad("residue_min_poly must be monic".into());
        }
        let g: Vec<u64> = self.residue_min_poly.iter().map(|&c| reduce_i64(c, self.p)).collect();
        if !is_irreducible(&g, self.p) {
            return bad("residue_min_poly is reducible mod p".into());
        }
        let e = self.e();
        if e == 0 || *self.eisenstein.last().unwrap() != 1 {
            return bad("eisenstein must be monic of degree at least 1".into());
        }
        let c0 = self.eisenstein[0];
        if c0 == 0 || vp(c0.unsigned_abs(), self.p) != 1 {
            return bad("constant term of E must have p-adic valuation 1".into());
        }
        for &c in &self.eisenstein[1..e] {
            if c.rem_euclid(self.p as i64) != 0 {
                return bad("non-leading coefficients of E must be divisible by p".into());
            }
        }
        if self.p == 2 && self.assume_linear_disjoint.is_none() {
            return bad("p = 2 requires assume_linear_disjoint to be set explicitly".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let s: RingSpec = serde_json::from_str(
            r#"{"p":3,"f":1,"residue_min_poly":[0,1],"eisenstein":[-3,1],"precision":8,"assume_linear_disjoint":true}"#,
        )
        .unwrap();
        assert_eq!(s.e(), 1);
        s.validate().unwrap();
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = RingSpec::unramified(3, 6);
        s.eisenstein = vec![-9, 1];
        assert!(s.validate().is_err());
        let mut s = RingSpec::unramified(3, 6);
        s.eisenstein = vec![3, 1, 1];
        assert!(s.validate().is_err());
        let mut s = RingSpec::unramified(5, 6);
        s.f = 2;
        s.residue_min_poly = vec![1, 0, 1];
        assert!(s.validate().is_err());
        let mut s = RingSpec::unramified(2, 6);
        s.assume_linear_disjoint = None;
        assert!(s.validate().is_err());
        assert!(RingSpec::unramified(4, 6).validate().is_err());
    }
}

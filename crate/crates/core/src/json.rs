//! JSON encodings for rings, elements, crystals and divided-power series.
//!
//! Elements of O_K are written as the row-major coefficient array of
//! Σ c_{ij} x^i u^j (length f·e), as a nested grid `[[c_00, c_01, …], …]`
//! or, for integers, as a bare number.

use serde_json::{json, Value};

use crate::base_rings::modint::signed;
use crate::base_rings::{Matrix, OkElem, OkRing, Ring, RingSpec};
use crate::crystal::Crystal;
use crate::error::{Error, Result};
use crate::pd_series::{Mono, PdSeries};

fn perr(s: impl Into<String>) -> Error {
    Error::Parse(s.into())
}

fn as_i64(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| perr(format!("expected an integer, got {v}")))
}

pub fn elem_from_json(ok: &OkRing, v: &Value) -> Result<OkElem> {
    match v {
        Value::Number(_) => Ok(ok.from_int(as_i64(v)?)),
        Value::Array(items) if items.iter().all(Value::is_array) && !items.is_empty() => {
            let grid = items
                .iter()
                .map(|row| row.as_array().expect("array").iter().map(as_i64).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(ok.from_grid(&grid))
        }
        Value::Array(items) => {
            let flat = items.iter().map(as_i64).collect::<Result<Vec<_>>>()?;
            ok.from_flat(&flat)
        }
        _ => Err(perr(format!("expected an element, got {v}"))),
    }
}

/// Row-major coefficients in the symmetric range (−p^N/2, p^N/2].
pub fn elem_to_json(ok: &OkRing, a: &OkElem) -> Value {
    let m = ok.modulus();
    Value::from(ok.to_flat(a).into_iter().map(|c| signed(c as u64, m)).collect::<Vec<_>>())
}

pub fn matrix_from_json(ok: &OkRing, v: &Value) -> Result<Matrix<OkElem>> {
    let rows = v.as_array().ok_or_else(|| perr("matrix must be an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| perr("matrix row must be an array"))?
                .iter()
                .map(|x| elem_from_json(ok, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(perr("matrix rows have different lengths"));
    }
    Ok(Matrix::from_rows(rows))
}

pub fn matrix_to_json(ok: &OkRing, m: &Matrix<OkElem>) -> Value {
    Value::from((0..m.rows).map(|i| Value::from(m.row(i).iter().map(|x| elem_to_json(ok, x)).collect::<Vec<_>>())).collect::<Vec<_>>())
}

pub fn ring_from_json(v: &Value) -> Result<OkRing> {
    let spec: RingSpec = serde_json::from_value(v.clone()).map_err(|e| perr(format!("ring: {e}")))?;
    OkRing::new(spec)
}

/// `{"ring": …, "rank": ℓ, "matrix": [[…]], "denominator_exp": k}`.
pub fn crystal_from_json(v: &Value) -> Result<Crystal> {
    let obj = v.as_object().ok_or_else(|| perr("crystal must be an object"))?;
    let ring = ring_from_json(obj.get("ring").ok_or_else(|| perr("crystal: missing \"ring\""))?)?;
    let matrix = matrix_from_json(&ring, obj.get("matrix").ok_or_else(|| perr("crystal: missing \"matrix\""))?)?;
    if let Some(rank) = obj.get("rank") {
        let rank = as_i64(rank)?;
        if rank as usize != matrix.rows || matrix.rows != matrix.cols {
            return Err(Error::ShapeMismatch(format!("rank {rank} but matrix is {}x{}", matrix.rows, matrix.cols)));
        }
    }
    let den = obj.get("denominator_exp").map(as_i64).transpose()?.unwrap_or(0);
    if den < 0 {
        return Err(perr("denominator_exp must be non-negative"));
    }
    Crystal::with_denominator(ring, matrix, den as u32)
}

pub fn crystal_to_json(c: &Crystal) -> Value {
    json!({
        "ring": c.ring.spec(),
        "rank": c.rank(),
        "matrix": matrix_to_json(&c.ring, &c.matrix),
        "denominator_exp": c.denominator_exp,
    })
}

fn series_to_json<E>(s: &PdSeries<E>, coeff: impl Fn(&E) -> Value) -> Value {
    Value::from(
        s.terms
            .iter()
            .map(|(m, c)| json!({"index": m.to_vec(s.nvars), "coeff": coeff(c)}))
            .collect::<Vec<_>>(),
    )
}

/// `[{"index": [i1, …, is], "coeff": …}, …]`.
pub fn pd_series_to_json(ok: &OkRing, s: &PdSeries<OkElem>) -> Value {
    series_to_json(s, |c| elem_to_json(ok, c))
}

pub fn pd_matrix_series_to_json(ok: &OkRing, s: &PdSeries<Matrix<OkElem>>) -> Value {
    series_to_json(s, |c| matrix_to_json(ok, c))
}

pub fn pd_series_from_json(ok: &OkRing, v: &Value, nvars: usize, cap: usize) -> Result<PdSeries<OkElem>> {
    let entries = v.as_array().ok_or_else(|| perr("series must be an array of entries"))?;
    let mut s = PdSeries::zero(nvars, cap);
    for e in entries {
        let idx = e
            .get("index")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("entry: missing \"index\""))?
            .iter()
            .map(|x| as_i64(x).and_then(|i| usize::try_from(i).map_err(|_| perr("negative index"))))
            .collect::<Result<Vec<_>>>()?;
        if idx.len() != nvars {
            return Err(Error::ShapeMismatch(format!("index {idx:?} has {} entries, expected {nvars}", idx.len())));
        }
        if idx.iter().sum::<usize>() > cap {
            return Err(Error::DegreeOverflow(format!("index {idx:?} exceeds the cap {cap}")));
        }
        let c = elem_from_json(ok, e.get("coeff").ok_or_else(|| perr("entry: missing \"coeff\""))?)?;
        s.add_term(ok, Mono::from_slice(&idx), c);
    }
    Ok(s)
}

/// Matrix over F_p[m1]/(m1^cap) as `[[[c0, c1, …], …], …]`; a bare integer
/// is a constant entry.
pub fn trunc_matrix_from_json(v: &Value, p: u64, cap: usize) -> Result<Matrix<Vec<u64>>> {
    let rows = v.as_array().ok_or_else(|| perr("matrix must be an array of rows"))?;
    let entry = |x: &Value| -> Result<Vec<u64>> {
        let coeffs = match x {
            Value::Number(_) => vec![as_i64(x)?],
            Value::Array(a) => a.iter().map(as_i64).collect::<Result<Vec<_>>>()?,
            _ => return Err(perr(format!("bad entry {x}"))),
        };
        let mut out = vec![0u64; cap];
        for (j, c) in coeffs.into_iter().enumerate().take(cap) {
            out[j] = c.rem_euclid(p as i64) as u64;
        }
        Ok(out)
    };
    let rows = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| perr("matrix row must be an array"))?.iter().map(entry).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(perr("matrix rows have different lengths"));
    }
    Ok(Matrix::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn element_forms() {
        let ok = OkRing::new(corpus::spec(3, &[1, 0, 1], &[-3, 0, 1], 6)).unwrap();
        let a = elem_from_json(&ok, &json!([1, 2, 0, -1])).unwrap();
        assert_eq!(elem_from_json(&ok, &json!([[1, 2], [0, -1]])).unwrap(), a);
        assert_eq!(elem_to_json(&ok, &a), json!([1, 2, 0, -1]));
        assert_eq!(elem_from_json(&ok, &json!(5)).unwrap(), ok.from_int(5));
        // u^2 = 3 in the grid form
        assert_eq!(elem_from_json(&ok, &json!([[0, 0, 1]])).unwrap(), ok.from_int(3));
        assert!(elem_from_json(&ok, &json!([1, 2])).is_err());
        assert!(elem_from_json(&ok, &json!("x")).is_err());
    }

    #[test]
    fn crystal_roundtrip() {
        for c in corpus::crystal_corpus(6, 3, 2, 1).unwrap() {
            let v = crystal_to_json(&c);
            let back = crystal_from_json(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
            assert_eq!(back, c);
        }
        let text = r#"{"ring":{"p":3,"f":1,"residue_min_poly":[0,1],"eisenstein":[-3,1],"precision":8},"rank":1,"matrix":[[0]],"denominator_exp":0}"#;
        let c = crystal_from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(c.rank(), 1);
        assert!(c.ring.is_zero(&c.matrix.data[0]));
        let bad_rank = text.replace("\"rank\":1", "\"rank\":2");
        assert!(matches!(crystal_from_json(&serde_json::from_str(&bad_rank).unwrap()), Err(Error::ShapeMismatch(_))));
        let bad_ring = text.replace("[-3,1]", "[-9,1]");
        assert!(matches!(crystal_from_json(&serde_json::from_str(&bad_ring).unwrap()), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn series_roundtrip() {
        let ok = OkRing::new(corpus::spec(3, &[0, 1], &[-3, 1], 6)).unwrap();
        let v = json!([{"index": [0, 1], "coeff": [2]}, {"index": [2, 0], "coeff": -1}]);
        let s = pd_series_from_json(&ok, &v, 2, 4).unwrap();
        assert_eq!(s.len(), 2);
        let back = pd_series_from_json(&ok, &pd_series_to_json(&ok, &s), 2, 4).unwrap();
        assert_eq!(back, s);
        assert!(matches!(pd_series_from_json(&ok, &json!([{"index": [5, 0], "coeff": 1}]), 2, 4), Err(Error::DegreeOverflow(_))));
        assert!(matches!(pd_series_from_json(&ok, &json!([{"index": [1], "coeff": 1}]), 2, 4), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn trunc_matrix() {
        let m = trunc_matrix_from_json(&json!([[0, [1, 0, 4]], [0, 0]]), 3, 4).unwrap();
        assert_eq!(m.get(0, 1), &vec![1, 0, 1, 0]);
        assert!(trunc_matrix_from_json(&json!([[0, 1], [0]]), 3, 4).is_err());
    }
}

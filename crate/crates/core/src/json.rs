//! Canonical JSON encoding. Object keys are sorted (the default `serde_json` map is ordered),
//! rationals are `"num/den"` strings and collections follow the canonical orderings of their types.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};
use crate::lambda::LambdaElement;
use crate::numbers::Rat;
use crate::partition::Partition;
use crate::quantization::OperatorMatrix;
use crate::quasimodular::{QMPoly, QSeries, VerifyReport};
use crate::scalar::{Gauss, ParamKey, Scalar};

pub fn rat_to_json(r: &Rat) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    let s = v.as_str().ok_or_else(|| Error::Json(format!("expected rational string, got {v}")))?;
    let (n, d) = s.split_once('/').ok_or_else(|| Error::Json(format!("rational without '/': {s}")))?;
    let parse = |x: &str| x.parse::<BigInt>().map_err(|e| Error::Json(format!("bad integer {x:?}: {e}")));
    let den = parse(d)?;
    if den == BigInt::from(0) {
        return Err(Error::Json(format!("zero denominator: {s}")));
    }
    Ok(Rat::new(parse(n)?, den))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    Value::Array(
        s.terms()
            .map(|(k, g)| json!({"c": k.c, "eps": k.eps, "mu": k.mu, "re": rat_to_json(&g.re), "im": rat_to_json(&g.im)}))
            .collect(),
    )
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Json(format!("missing field {name:?} in {v}")))
}

fn u32_field(v: &Value, name: &str) -> Result<u32> {
    field(v, name)?
        .as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| Error::Json(format!("field {name:?} is not a small unsigned integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Json(format!("{what} must be an array")))
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    let mut out = Scalar::zero();
    for t in array(v, "scalar")? {
        let key = ParamKey::new(u32_field(t, "c")?, u32_field(t, "eps")?, u32_field(t, "mu")?);
        out.add_term(key, &Gauss::new(rat_from_json(field(t, "re")?)?, rat_from_json(field(t, "im")?)?));
    }
    Ok(out)
}

fn u32_list(v: &Value, what: &str) -> Result<Vec<u32>> {
    array(v, what)?
        .iter()
        .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| Error::Json(format!("bad entry in {what}"))))
        .collect()
}

pub fn partition_to_json(p: &Partition) -> Value {
    json!(p.parts())
}

pub fn partition_from_json(v: &Value) -> Result<Partition> {
    Partition::new(u32_list(v, "partition")?)
}

pub fn diffpoly_to_json(g: &DiffPoly) -> Value {
    Value::Array(g.terms().map(|(m, s)| json!({"monomial": m.indices(), "scalar": scalar_to_json(s)})).collect())
}

pub fn diffpoly_from_json(v: &Value) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for t in array(v, "diffpoly")? {
        let m = DiffMonomial::new(u32_list(field(t, "monomial")?, "monomial")?);
        out.add_term(m, &scalar_from_json(field(t, "scalar")?)?);
    }
    Ok(out)
}

pub fn lambda_to_json(f: &LambdaElement) -> Value {
    let mut terms: Vec<_> = f.terms().collect();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    Value::Array(terms.into_iter().map(|(p, s)| json!({"partition": partition_to_json(p), "scalar": scalar_to_json(s)})).collect())
}

pub fn qmpoly_to_json(f: &QMPoly) -> Value {
    Value::Array(
        f.terms().map(|(m, s)| json!({"g2": m.g2, "g4": m.g4, "g6": m.g6, "scalar": scalar_to_json(s)})).collect(),
    )
}

pub fn qseries_to_json(s: &QSeries) -> Value {
    json!({"order": s.order(), "coefficients": s.coeffs().iter().map(scalar_to_json).collect::<Vec<_>>()})
}

pub fn matrix_to_json(m: &OperatorMatrix) -> Value {
    let mut entries = Vec::new();
    for row in m.basis() {
        for col in m.basis() {
            let s = m.get(row, col);
            if !s.is_zero() {
                entries.push(json!({"row": partition_to_json(row), "col": partition_to_json(col), "scalar": scalar_to_json(&s)}));
            }
        }
    }
    json!({"n": m.n(), "basis_order": m.basis().iter().map(partition_to_json).collect::<Vec<_>>(), "entries": entries})
}

pub fn report_to_json(r: &VerifyReport) -> Value {
    json!({
        "input": {"mode": r.mode.name(), "genus": r.mode.trunc(), "k": r.k, "order": r.order},
        "recognized": qmpoly_to_json(&r.recognized),
        "weights": r.weights,
        "homogeneous": r.homogeneous,
        "checks": [
            {"name": "recognized", "passed": true},
            {"name": "homogeneous", "expected_weight": r.expected_weight(), "passed": r.homogeneous},
        ],
    })
}

pub fn eigenvalues_to_json(values: &BTreeMap<Partition, Scalar>) -> Value {
    let mut terms: Vec<_> = values.iter().collect();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    Value::Array(terms.into_iter().map(|(p, s)| json!({"schur": partition_to_json(p), "eigenvalue": scalar_to_json(s)})).collect())
}

/// Compact canonical text.
pub fn to_string(v: &Value) -> String {
    serde_json::to_string(v).expect("json values always serialize")
}

/// Indented canonical text with a trailing newline.
pub fn to_string_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{densities, Mode};
    use crate::numbers::rat;
    use proptest::prelude::*;

    #[test]
    fn scalar_layout() {
        let s = &Scalar::c().scale(&rat(1, 2)) + &Scalar::from_rat(rat(-3, 4));
        assert_eq!(
            to_string(&scalar_to_json(&s)),
            r#"[{"c":0,"eps":0,"im":"0/1","mu":0,"re":"-3/4"},{"c":1,"eps":0,"im":"0/1","mu":0,"re":"1/2"}]"#
        );
    }

    #[test]
    fn density_round_trip() {
        let t = densities(Mode::Ilw { genus: 2 }, 2).unwrap();
        for (_, g) in t.iter() {
            let back = diffpoly_from_json(&diffpoly_to_json(g)).unwrap();
            assert_eq!(&back, g);
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(rat_from_json(&json!("1")).is_err());
        assert!(rat_from_json(&json!("1/0")).is_err());
        assert!(scalar_from_json(&json!([{"c": 0}])).is_err());
        assert!(partition_from_json(&json!([1, 2])).is_err());
    }

    proptest! {
        #[test]
        fn rat_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = rat(n, d);
            prop_assert_eq!(rat_from_json(&rat_to_json(&r)).unwrap(), r);
        }

        #[test]
        fn scalar_round_trip(terms in proptest::collection::vec((0u32..4, 0u32..4, 0u32..3, -50i64..50, 1i64..20, -5i64..5), 0..8)) {
            let mut s = Scalar::zero();
            for (c, e, m, n, d, im) in terms {
                s.add_term(ParamKey::new(c, e, m), &Gauss::new(rat(n, d), rat(im, 1)));
            }
            let back = scalar_from_json(&scalar_to_json(&s)).unwrap();
            prop_assert_eq!(to_string(&scalar_to_json(&back)), to_string(&scalar_to_json(&s)));
            prop_assert_eq!(back, s);
        }
    }
}

//! Structured report values and the plain-text renderer.

use std::fmt::Write;

use locsmith_core::recursion::StabilizationReport;
use locsmith_core::{CheckEntry, LaurentSeries, Mat, MatSeries, Scalar};
use serde_json::{json, Map, Value};

pub fn mat<F: Scalar>(m: &Mat<F>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

pub fn vector<F: Scalar>(v: &[F]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

/// A basis matrix as its list of columns.
pub fn columns<F: Scalar>(m: &Mat<F>) -> Value {
    Value::Array((0..m.cols()).map(|j| vector(&m.col(j))).collect())
}

pub fn vectors<F: Scalar>(vs: &[Vec<F>]) -> Value {
    Value::Array(vs.iter().map(|v| vector(v)).collect())
}

/// Coefficients `0..=through`, clamped to what the series knows.
pub fn series<F: Scalar>(s: &MatSeries<F>, through: usize) -> Value {
    let top = s.valid_order().map_or(through, |v| v.min(through));
    let coeffs: Vec<Value> = (0..=top).map(|t| mat(&s.coeff(t).expect("within validity"))).collect();
    json!({ "through_order": top, "coefficients": coeffs })
}

pub fn laurent<F: Scalar>(x: &LaurentSeries<F>) -> Value {
    let p = x.pole_order() as i64;
    let coeffs: Vec<Value> = x
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "exponent": i as i64 - p, "matrix": mat(c) }))
        .collect();
    json!({ "pole_order": x.pole_order(), "through_exponent": x.order(), "coefficients": coeffs })
}

pub fn checks(entries: &[CheckEntry]) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(e.name.clone()));
                m.insert("passed".into(), Value::Bool(e.passed));
                if let Some(d) = &e.detail {
                    m.insert("detail".into(), Value::String(d.clone()));
                }
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn stabilization(st: &StabilizationReport) -> Value {
    json!({
        "k": st.k,
        "exponents": st.exponents(),
        "exponent_multiplicities": st.exponent_multiplicities,
        "dim_kernel_limit": st.dim_kernel_limit,
        "dim_range_limit": st.dim_range_limit,
        "certified": st.certified,
        "certification": st.certification_method.label(),
        "degenerate": st.degenerate,
        "generic_rank": st.generic_rank,
        "horizon": st.horizon,
    })
}

pub fn to_structured(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn is_matrix(v: &Value) -> bool {
    match v {
        Value::Array(rows) => !rows.is_empty() && rows.iter().all(|r| matches!(r, Value::Array(xs) if xs.iter().all(|x| x.is_string()))),
        _ => false,
    }
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.is_empty() => Some("[]".into()),
        Value::Array(xs) if is_matrix(v) && xs.iter().all(|r| r.as_array().is_some_and(|r| !r.is_empty())) => {
            let rows: Vec<String> = xs
                .iter()
                .map(|r| r.as_array().expect("row").iter().map(|x| x.as_str().expect("entry").to_string()).collect::<Vec<_>>().join(", "))
                .collect();
            Some(format!("[{}]", rows.join("; ")))
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => {
            Some(format!("[{}]", xs.iter().map(|x| inline(x).expect("scalar")).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

const LEAD_KEYS: [&str; 6] = ["command", "backend", "field", "input", "shift", "stabilization"];

fn render_into(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            if indent == 0 {
                keys.sort_by_key(|k| (LEAD_KEYS.iter().position(|l| l == k).unwrap_or(LEAD_KEYS.len()), (*k).clone()));
            }
            for k in keys {
                let val = &m[k];
                if k == "verification" {
                    render_checks(out, val, &pad);
                    continue;
                }
                match inline(val) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_into(out, val, indent + 2);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match inline(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}[{i}] {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}[{i}]");
                        render_into(out, x, indent + 2);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other).expect("scalar"));
        }
    }
}

fn render_checks(out: &mut String, v: &Value, pad: &str) {
    let entries = v.as_array().map(Vec::as_slice).unwrap_or_default();
    let failed = entries.iter().filter(|e| e["passed"] == Value::Bool(false)).count();
    let _ = writeln!(out, "{pad}verification: {} checks, {failed} failed", entries.len());
    for e in entries {
        let mark = if e["passed"] == Value::Bool(true) { "PASS" } else { "FAIL" };
        let name = e["name"].as_str().unwrap_or("?");
        match e.get("detail").and_then(Value::as_str) {
            Some(d) => writeln!(out, "{pad}  [{mark}] {name}: {d}"),
            None => writeln!(out, "{pad}  [{mark}] {name}"),
        }
        .expect("writing to a string");
    }
}

pub fn to_text(v: &Value, banner: Option<&str>, timing: Option<f64>) -> String {
    let mut out = String::new();
    if let Some(b) = banner {
        let _ = writeln!(out, "!!! {b} !!!");
    }
    render_into(&mut out, v, 0);
    if let Some(t) = timing {
        let _ = writeln!(out, "timing: {t:.3} s");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_render_inline() {
        let v = json!({ "m": [["1", "0"], ["0", "1/2"]], "k": 2 });
        let t = to_text(&v, None, None);
        assert!(t.contains("m: [1, 0; 0, 1/2]"));
        assert!(t.contains("k: 2"));
    }

    #[test]
    fn checks_render_one_line_each() {
        let v = json!({ "verification": [{ "name": "a", "passed": true }, { "name": "b", "passed": false, "detail": "order 3" }] });
        let t = to_text(&v, None, None);
        assert!(t.contains("verification: 2 checks, 1 failed"));
        assert!(t.contains("[PASS] a\n"));
        assert!(t.contains("[FAIL] b: order 3"));
    }
}

//! CSV and JSON encodings of kernels, distributions and sweep tables.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which round-trips every
//! `f64`. Non-finite values appear as `inf`, `-inf` and `nan` in CSV and as the same
//! strings in JSON.

use serde_json::{json, Map, Value};

use crate::converse::SweepRow;
use crate::fock::{PhotonDistribution, PhotonKernel};

pub const KERNEL_HEADER: &str = "k,l,p";
pub const DISTRIBUTION_HEADER: &str = "l,p";
pub const SWEEP_HEADER: &str = "n,R,bound,exponent,delta2,delta4,delta5";

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Parses the output of [`fmt_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

/// `k,l,p` rows followed by one `k,tail,<mass>` row per input level.
pub fn kernel_csv(kern: &PhotonKernel) -> String {
    let mut out = String::from(KERNEL_HEADER);
    out.push('\n');
    for (k, row) in kern.rows().iter().enumerate() {
        for (l, &p) in row.mass().iter().enumerate() {
            out.push_str(&format!("{k},{l},{}\n", fmt_f64(p)));
        }
        out.push_str(&format!("{k},tail,{}\n", fmt_f64(row.tail_mass())));
    }
    out
}

pub fn kernel_json(kern: &PhotonKernel) -> Value {
    let rows: Vec<Value> = kern
        .rows()
        .iter()
        .enumerate()
        .map(|(k, row)| {
            json!({
                "k": k,
                "p": row.mass().iter().map(|&p| json_f64(p)).collect::<Vec<_>>(),
                "tail": json_f64(row.tail_mass()),
            })
        })
        .collect();
    json!({ "rows": rows })
}

/// `l,p` rows and a final `tail,<mass>` row.
pub fn distribution_csv(dist: &PhotonDistribution) -> String {
    let mut out = String::from(DISTRIBUTION_HEADER);
    out.push('\n');
    for (l, &p) in dist.mass().iter().enumerate() {
        out.push_str(&format!("{l},{}\n", fmt_f64(p)));
    }
    out.push_str(&format!("tail,{}\n", fmt_f64(dist.tail_mass())));
    out
}

pub fn distribution_json(dist: &PhotonDistribution) -> Value {
    json!({
        "p": dist.mass().iter().map(|&p| json_f64(p)).collect::<Vec<_>>(),
        "tail": json_f64(dist.tail_mass()),
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            fmt_f64(r.rate),
            fmt_f64(r.bound),
            fmt_f64(r.exponent),
            fmt_f64(r.delta2),
            fmt_f64(r.delta4),
            fmt_f64(r.delta5)
        ));
    }
    out
}

fn f64_map<'a>(entries: impl Iterator<Item = (&'a String, &'a f64)>) -> Value {
    Value::Object(entries.map(|(k, v)| (k.clone(), json_f64(*v))).collect::<Map<_, _>>())
}

pub fn sweep_json(rows: &[SweepRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "R": json_f64(r.rate),
                    "bound": json_f64(r.bound),
                    "exponent": json_f64(r.exponent),
                    "delta2": json_f64(r.delta2),
                    "delta4": json_f64(r.delta4),
                    "delta5": json_f64(r.delta5),
                    "form": r.form.to_string(),
                    "components": f64_map(r.components.iter()),
                    "additive_terms": f64_map(r.additive_terms.iter()),
                })
            })
            .collect(),
    )
}

/// `name,value` table for scalar results.
pub fn scalars_csv(entries: &[(&str, f64)]) -> String {
    let mut out = String::from("name,value\n");
    for (k, v) in entries {
        out.push_str(&format!("{k},{}\n", fmt_f64(*v)));
    }
    out
}

pub fn scalars_json(entries: &[(&str, f64)]) -> Value {
    Value::Object(
        entries
            .iter()
            .map(|(k, v)| (k.to_string(), json_f64(*v)))
            .collect::<Map<_, _>>(),
    )
}

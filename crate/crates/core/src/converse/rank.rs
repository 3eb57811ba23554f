use std::f64::consts::LOG2_E;

use num_bigint::BigUint;
use serde::Serialize;

use crate::entropy::g;
use crate::error::{Error, Result};
use crate::fock::projector_count;
use crate::special::{ceil_tolerant, log2_biguint};

fn check(n: u64, ns: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(ns > 0.0) || !ns.is_finite() {
        return Err(Error::domain(format!("N_S must be positive, got {ns}")));
    }
    Ok(())
}

/// Smallest admissible rank slack `(log2 e + log2(1 + 1/N_S)) / n`.
pub fn delta0(n: u64, ns: f64) -> Result<f64> {
    check(n, ns)?;
    Ok((LOG2_E + (1.0 / ns).ln_1p() * LOG2_E) / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCheck {
    /// Photon-number cap `ceil(n N_S)`.
    pub cap: u64,
    #[serde(serialize_with = "serialize_decimal")]
    pub count: BigUint,
    pub count_log2: f64,
    /// `n (g(N_S) + delta0)`.
    pub bound_log2: f64,
    pub holds: bool,
}

fn serialize_decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Compares the exact rank of the `n`-mode projector onto total photon number
/// `<= ceil(n N_S)` with `2^{n (g(N_S) + delta0)}`.
pub fn rank_bound_check(n: u64, ns: f64) -> Result<RankCheck> {
    check(n, ns)?;
    let cap = ceil_tolerant(n as f64 * ns);
    let count = projector_count(n, cap)?;
    let count_log2 = log2_biguint(&count);
    let bound_log2 = n as f64 * (g(ns)? + delta0(n, ns)?);
    Ok(RankCheck {
        cap,
        count,
        count_log2,
        bound_log2,
        holds: count_log2 <= bound_log2,
    })
}

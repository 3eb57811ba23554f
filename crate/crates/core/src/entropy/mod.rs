//! Entropy functionals in bits.
//!
//! Spectra are eigenvalue lists (or photon-number distributions) that may be
//! truncated; the unresolved remainder is carried as `tail_mass`, and every
//! functional either accounts for it conservatively or refuses with
//! [`Error::TailTooLarge`].

mod moe;
mod smooth;

pub use moe::{moe_scan, moe_scan_orders, MoeArgmin, MoeScan, MAX_OUTPUT_DIM, VACUUM_TAIL_BUDGET};
pub use smooth::{check_renyi_smoothing, smooth_min_entropy, SmoothingCheck};

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Normalization slack for spectra.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Largest bracket width (bits) `renyi` accepts from an unresolved tail.
pub const RENYI_TAIL_TOLERANCE: f64 = 1e-9;

/// Orders closer than this to 1 are rejected by [`renyi`]; use [`shannon`].
pub const ALPHA_ONE_EXCLUSION: f64 = 1e-6;

/// Entropy of a thermal state with mean photon number `x`:
/// `g(x) = (x+1) log2(x+1) - x log2 x`.
pub fn g(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("g(x) needs finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(((x + 1.0) * x.ln_1p() - x * x.ln()) / LN_2)
}

/// Binary entropy in bits.
pub fn h2(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::domain(format!("h2 needs eps in [0, 1], got {eps}")));
    }
    if eps == 0.0 || eps == 1.0 {
        return Ok(0.0);
    }
    Ok(-(eps * eps.ln() + (1.0 - eps) * (-eps).ln_1p()) / LN_2)
}

/// A (possibly truncated) probability spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
    tail_mass: f64,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("spectrum must have at least one entry"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
        {
            return Err(Error::domain(format!("spectrum entry {i} is {v}")));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::domain(format!("negative tail mass {tail_mass}")));
        }
        let total: f64 = values.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::domain(format!(
                "spectrum plus tail sums to {total}, expected 1"
            )));
        }
        Ok(Spectrum { values, tail_mass })
    }

    /// Spectrum whose tail is whatever mass the values leave unaccounted.
    ///
    /// Negative round-off in eigenvalues (down to `-1e-10`) is clamped to zero and a
    /// deficit below `1e-12` is treated as exact normalization.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let mut values = values;
        for v in values.iter_mut() {
            if *v < 0.0 && *v >= -NORMALIZATION_TOLERANCE {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        let deficit = 1.0 - sum;
        let tail = if deficit.abs() <= 1e-12 { 0.0 } else { deficit.max(0.0) };
        Spectrum::new(values, tail)
    }

    /// Geometric spectrum `N^n / (N+1)^(n+1)` of a thermal state, resolved up to `levels`.
    pub fn thermal(mean: f64, levels: usize) -> Result<Self> {
        if !(mean >= 0.0) || levels == 0 {
            return Err(Error::domain("thermal spectrum needs mean >= 0 and levels >= 1"));
        }
        let ratio = mean / (mean + 1.0);
        let values: Vec<f64> = (0..levels)
            .map(|n| ratio.powi(n as i32) / (mean + 1.0))
            .collect();
        Spectrum::new(values, ratio.powi(levels as i32))
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("uniform spectrum needs d >= 1"));
        }
        Spectrum::new(vec![1.0 / d as f64; d], 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Shannon entropy in bits; an unresolved tail contributes its single-level lower bound.
pub fn shannon(s: &Spectrum) -> f64 {
    let resolved: f64 = s
        .values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    let t = s.tail_mass;
    if t > 0.0 {
        resolved - t * t.log2()
    } else {
        resolved
    }
}

/// Lower and upper bounds on `H_alpha` given the unresolved tail.
///
/// For `alpha > 1` the tail adds between `0` and `t^alpha` to `Tr[rho^alpha]`; for
/// `alpha < 1` it adds at least `t^alpha` and is unbounded above.
pub fn renyi_bracket(s: &Spectrum, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("Renyi order must be positive, got {alpha}")));
    }
    if (alpha - 1.0).abs() < ALPHA_ONE_EXCLUSION {
        return Err(Error::domain(format!(
            "Renyi order {alpha} is within {ALPHA_ONE_EXCLUSION} of 1; use shannon()"
        )));
    }
    let power_sum: f64 = s
        .values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(alpha))
        .sum();
    let t = s.tail_mass;
    let tail_term = if t > 0.0 { t.powf(alpha) } else { 0.0 };
    let scale = 1.0 / (1.0 - alpha);
    if alpha > 1.0 {
        // larger trace -> smaller entropy
        let lo = scale * (power_sum + tail_term).log2();
        let hi = scale * power_sum.log2();
        Ok((lo, hi))
    } else {
        let lo = scale * (power_sum + tail_term).log2();
        let hi = if t > 0.0 { f64::INFINITY } else { lo };
        Ok((lo, hi))
    }
}

/// Rényi entropy of order `alpha` (bits), reported as the conservative lower bracket.
pub fn renyi(s: &Spectrum, alpha: f64) -> Result<f64> {
    let (lo, hi) = renyi_bracket(s, alpha)?;
    if hi - lo > RENYI_TAIL_TOLERANCE {
        return Err(Error::TailTooLarge {
            tail: s.tail_mass,
            tolerance: RENYI_TAIL_TOLERANCE,
        });
    }
    Ok(lo)
}

/// `-log2 max(s)`. Fails if the unresolved tail could hide a larger eigenvalue.
pub fn min_entropy(s: &Spectrum) -> Result<f64> {
    let max = s.max_value();
    if s.tail_mass > max {
        return Err(Error::TailTooLarge {
            tail: s.tail_mass,
            tolerance: 0.0,
        });
    }
    Ok(-max.log2())
}

/// Closed-form Rényi entropy of a thermal state, `log2[(N+1)^a - N^a] / (a - 1)`, for `a > 1`.
///
/// Evaluated as `a log2(N+1) + log2(1 - (N/(N+1))^a)` so very large orders stay finite.
pub fn renyi_thermal(mean: f64, alpha: f64) -> Result<f64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::domain(format!("thermal mean must be >= 0, got {mean}")));
    }
    if !(alpha > 1.0) {
        return Err(Error::domain(format!("renyi_thermal needs alpha > 1, got {alpha}")));
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    let ln_ratio = (mean / (mean + 1.0)).ln();
    let ln_bracket = alpha * mean.ln_1p() + (-(alpha * ln_ratio).exp()).ln_1p();
    Ok(ln_bracket / LN_2 / (alpha - 1.0))
}

/// `v(N) = [(N+1)^{3/2} - N^{3/2}]^2 + [(N+1)^{1/2} - N^{1/2}]^{-2} + 1`.
pub fn v_factor(mean: f64) -> Result<f64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::domain(format!("v_factor needs N >= 0, got {mean}")));
    }
    let a = (mean + 1.0).powf(1.5) - mean.powf(1.5);
    let b = (mean + 1.0).sqrt() - mean.sqrt();
    Ok(a * a + 1.0 / (b * b) + 1.0)
}

/// Continuity factor `K(N) = 4 [log2 v(N)]^2`.
pub fn k_factor(mean: f64) -> Result<f64> {
    let lv = v_factor(mean)?.log2();
    Ok(4.0 * lv * lv)
}

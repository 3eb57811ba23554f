//! Success-probability bounds for codes of rate `R` over `n` channel uses.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channels::ChannelParams;
use crate::entropy::{g, k_factor, renyi_thermal};
use crate::error::{Error, Result};

/// Slack parameters shared by both bound forms.
///
/// The Rényi form reads `alpha` and `eps`; the continuity form reads `delta4` (its
/// `alpha - 1`) and `delta5` (its `eps = 2^{-n delta5}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackParams {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub delta5: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl Default for SlackParams {
    fn default() -> Self {
        SlackParams {
            delta1: 0.0,
            delta2: 0.01,
            delta3: 0.0,
            delta4: 0.01,
            delta5: 0.01,
            alpha: 2.0,
            eps: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundForm {
    /// `2^{-nR} 2^{n[g(N'_S) - H_alpha(vacuum output) + delta2 + log2(1/eps)/(n(alpha-1))]} + eps + delta6`.
    Renyi,
    /// `2^{-nR} 2^{n[g(N'_S) - g(N'_B) + delta2 + delta5/delta4 + delta4 K(N'_B)]} + 2^{-n delta5} + delta6`.
    Continuity,
}

impl std::fmt::Display for BoundForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundForm::Renyi => "renyi",
            BoundForm::Continuity => "continuity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub channel: ChannelParams,
    pub ns: f64,
    pub n: u64,
    pub rate: f64,
    pub slack: SlackParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub form: BoundForm,
    pub n: u64,
    pub rate: f64,
    /// Unclipped bound; values at or above 1 are vacuous.
    pub bound: f64,
    /// Per-mode exponent including `-R`; the sum of `components`.
    pub exponent: f64,
    /// Signed per-mode exponent terms.
    pub components: BTreeMap<String, f64>,
    pub additive_terms: BTreeMap<String, f64>,
    pub slack: SlackParams,
}

impl BoundReport {
    fn assemble(
        form: BoundForm,
        inputs: &BoundInputs,
        components: BTreeMap<String, f64>,
        additive_terms: BTreeMap<String, f64>,
    ) -> Self {
        let exponent: f64 = components.values().sum();
        let bound = (inputs.n as f64 * exponent).exp2() + additive_terms.values().sum::<f64>();
        BoundReport {
            form,
            n: inputs.n,
            rate: inputs.rate,
            bound,
            exponent,
            components,
            additive_terms,
            slack: inputs.slack,
        }
    }

    /// Bound rebuilt from the breakdown.
    pub fn recompute(&self) -> f64 {
        let exponent: f64 = self.components.values().sum();
        (self.n as f64 * exponent).exp2() + self.additive_terms.values().sum::<f64>()
    }

    pub fn clipped(&self) -> f64 {
        self.bound.clamp(0.0, 1.0)
    }

    pub fn is_vacuous(&self) -> bool {
        self.bound >= 1.0
    }
}

/// `delta6 = 2 sqrt(delta1 + 2 sqrt(delta1) + delta3)`.
pub fn delta6(delta1: f64, delta3: f64) -> Result<f64> {
    check_unit("delta1", delta1)?;
    check_unit("delta3", delta3)?;
    Ok(2.0 * (delta1 + 2.0 * delta1.sqrt() + delta3).sqrt())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be in [0, 1], got {x}")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {x}")))
    }
}

fn check_common(inputs: &BoundInputs) -> Result<()> {
    if inputs.n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(inputs.rate >= 0.0) || !inputs.rate.is_finite() {
        return Err(Error::domain(format!("rate must be >= 0, got {}", inputs.rate)));
    }
    if !(inputs.ns >= 0.0) || !inputs.ns.is_finite() {
        return Err(Error::domain(format!("N_S must be >= 0, got {}", inputs.ns)));
    }
    check_positive("delta2", inputs.slack.delta2)
}

fn component_map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Rényi-entropy form of the bound at fixed `alpha` and `eps`.
pub fn theorem1_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    check_common(inputs)?;
    let s = &inputs.slack;
    if !(s.alpha > 1.0) || !s.alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be > 1, got {}", s.alpha)));
    }
    if !(s.eps > 0.0 && s.eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0, 1), got {}", s.eps)));
    }
    let d6 = delta6(s.delta1, s.delta3)?;
    let out = inputs.channel.output_photon_numbers(inputs.ns)?;
    let smoothing = (1.0 / s.eps).log2() / (inputs.n as f64 * (s.alpha - 1.0));
    let components = component_map(&[
        ("rate", -inputs.rate),
        ("g_signal", g(out.signal)?),
        ("renyi_vacuum", -renyi_thermal(out.noise, s.alpha)?),
        ("delta2", s.delta2),
        ("smoothing", smoothing),
    ]);
    let additive = component_map(&[("eps", s.eps), ("delta6", d6)]);
    Ok(BoundReport::assemble(BoundForm::Renyi, inputs, components, additive))
}

/// Continuity form of the bound with `alpha = 1 + delta4` and `eps = 2^{-n delta5}`.
pub fn corollary_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    check_common(inputs)?;
    let s = &inputs.slack;
    check_positive("delta4", s.delta4)?;
    check_positive("delta5", s.delta5)?;
    let d6 = delta6(s.delta1, s.delta3)?;
    let out = inputs.channel.output_photon_numbers(inputs.ns)?;
    let components = component_map(&[
        ("rate", -inputs.rate),
        ("g_signal", g(out.signal)?),
        ("g_noise", -g(out.noise)?),
        ("delta2", s.delta2),
        ("delta5_over_delta4", s.delta5 / s.delta4),
        ("delta4_k", s.delta4 * k_factor(out.noise)?),
    ]);
    let additive = component_map(&[
        ("eps", (-(inputs.n as f64) * s.delta5).exp2()),
        ("delta6", d6),
    ]);
    Ok(BoundReport::assemble(BoundForm::Continuity, inputs, components, additive))
}

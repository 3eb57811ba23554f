//! Tails of the total output photon number `Σ L_i` for a fixed input photon profile.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::channels::ChannelParams;
use crate::error::{Error, Result};
use crate::fock::{channel_row, convolve, row_cutoff, sample_output, PhotonDistribution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationTail {
    /// Resolved part of `P(Σ L_i > threshold)`; the exact value lies within
    /// `[probability, probability + truncation_error]`.
    pub probability: f64,
    pub truncation_error: f64,
    /// `tau Σ a_i + n (N'_B + delta2)`, i.e. `n (N'_S + delta2)` with `N_S` the profile mean.
    pub threshold: f64,
}

fn check_profile(profile: &[u64]) -> Result<()> {
    if profile.is_empty() {
        Err(Error::domain("photon profile must be non-empty"))
    } else {
        Ok(())
    }
}

/// Output mean `tau Σ a_i + n N'_B` of a profile.
pub fn profile_output_mean(ch: &ChannelParams, profile: &[u64]) -> f64 {
    let total: u64 = profile.iter().sum();
    ch.tau() * total as f64 + profile.len() as f64 * ch.noise_photons()
}

/// `n (N'_S + delta2)` for the profile mean `N_S = Σ a_i / n`.
pub fn concentration_threshold(ch: &ChannelParams, profile: &[u64], delta2: f64) -> f64 {
    profile_output_mean(ch, profile) + profile.len() as f64 * delta2
}

/// Exact distribution of `Σ L_i`, each row truncated so the accumulated tail stays
/// within `tail_budget`.
pub fn output_sum_distribution(
    ch: &ChannelParams,
    profile: &[u64],
    tail_budget: f64,
) -> Result<PhotonDistribution> {
    check_profile(profile)?;
    if !(tail_budget > 0.0) {
        return Err(Error::domain(format!("tail budget must be positive, got {tail_budget}")));
    }
    let per_row = tail_budget / profile.len() as f64;
    let mut rows: BTreeMap<u64, PhotonDistribution> = BTreeMap::new();
    for &a in profile {
        if let std::collections::btree_map::Entry::Vacant(slot) = rows.entry(a) {
            let cut = row_cutoff(ch, a as usize, per_row)?;
            slot.insert(channel_row(ch, a as usize, cut));
        }
    }
    let mut acc = PhotonDistribution::point(0);
    for a in profile {
        acc = convolve(&acc, &rows[a]);
    }
    if acc.tail_mass() > tail_budget {
        return Err(Error::Truncation {
            tail: acc.tail_mass(),
            budget: tail_budget,
        });
    }
    Ok(acc)
}

/// `P(Σ L_i > n (N'_S + delta2))` by exact convolution of the kernel rows `a_i`.
pub fn concentration_tail(
    ch: &ChannelParams,
    profile: &[u64],
    delta2: f64,
    tail_budget: f64,
) -> Result<ConcentrationTail> {
    if !(delta2 >= 0.0) || !delta2.is_finite() {
        return Err(Error::domain(format!("delta2 must be >= 0, got {delta2}")));
    }
    let dist = output_sum_distribution(ch, profile, tail_budget)?;
    let threshold = concentration_threshold(ch, profile, delta2);
    // guard against round-off placing an integer threshold a hair below itself
    let cut = threshold + 1e-9 * threshold.abs().max(1.0);
    Ok(ConcentrationTail {
        probability: dist.mass_above(cut),
        truncation_error: dist.tail_mass(),
        threshold,
    })
}

/// Monte Carlo estimate of the same tail from `samples` draws of the full profile.
pub fn concentration_tail_mc<R: Rng + ?Sized>(
    ch: &ChannelParams,
    profile: &[u64],
    delta2: f64,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_profile(profile)?;
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let threshold = concentration_threshold(ch, profile, delta2);
    let cut = threshold + 1e-9 * threshold.abs().max(1.0);
    let hits = (0..samples)
        .filter(|_| {
            let total: u64 = profile.iter().map(|&a| sample_output(ch, a, rng)).sum();
            total as f64 > cut
        })
        .count();
    Ok(hits as f64 / samples as f64)
}

/// `log2 E[2^{s L} | k]` from the closed-form generating function
/// `A(z) (1 - T + T z A(z))^k`, `A(z) = (1 - mu^2) / (1 - mu^2 z)`, at `z = 2^s`.
fn log2_mgf(t: f64, mu2: f64, k: u64, s: f64) -> f64 {
    let z = s.exp2();
    let log2_a = if mu2 == 0.0 {
        0.0
    } else {
        (-mu2).ln_1p() / std::f64::consts::LN_2 - (1.0 - mu2 * z).log2()
    };
    let inner = 1.0 - t + t * z * log2_a.exp2();
    log2_a + k as f64 * inner.log2()
}

/// Chernoff bound `inf_s [Σ_i log2 E 2^{s L_i} - s·threshold]` on
/// `log2 P(Σ L_i >= threshold)`.
///
/// The infimum is taken by golden-section search over `s ∈ (0, s_max)` with
/// `s_max = log2(1/mu^2)` where the amplifier's generating function diverges.
pub fn chernoff_tail(ch: &ChannelParams, profile: &[u64], threshold: f64) -> Result<f64> {
    check_profile(profile)?;
    let mean = profile_output_mean(ch, profile);
    if !(threshold > mean) {
        return Err(Error::domain(format!(
            "threshold {threshold} must exceed the output mean {mean}"
        )));
    }
    let dec = ch.decompose();
    let (t, mu2) = (dec.transmissivity, dec.mu_squared());
    let total: u64 = profile.iter().sum();
    if mu2 == 0.0 && threshold > total as f64 {
        return Ok(f64::NEG_INFINITY);
    }
    let s_max = if mu2 == 0.0 { 64.0 } else { -mu2.log2() };
    if !(s_max > 0.0) {
        return Err(Error::NonDecayingMgf(s_max));
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &a in profile {
        *counts.entry(a).or_default() += 1;
    }
    let objective = |s: f64| -> f64 {
        counts
            .iter()
            .map(|(&k, &c)| c as f64 * log2_mgf(t, mu2, k, s))
            .sum::<f64>()
            - s * threshold
    };
    let hi = if mu2 == 0.0 { s_max } else { s_max * (1.0 - 1e-12) };
    let s = golden_section_min(objective, 0.0, hi, 1e-13);
    Ok(objective(s).min(0.0))
}

pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn thermal() -> ChannelParams {
        ChannelParams::thermal(0.5, 1.0).unwrap()
    }

    #[test]
    fn identity_tail_is_zero() {
        let ch = ChannelParams::identity();
        let r = concentration_tail(&ch, &[3, 3, 3], 0.1, 1e-12).unwrap();
        assert_eq!(r.probability, 0.0);
        assert_eq!(r.truncation_error, 0.0);
        assert_eq!(chernoff_tail(&ch, &[3, 3, 3], 9.3).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn single_vacuum_mode_is_geometric_tail() {
        // thermal output with N'_B = 0.5; P(L > 0.75) = P(L >= 1) = N/(N+1)
        let r = concentration_tail(&thermal(), &[0], 0.25, 1e-14).unwrap();
        assert_abs_diff_eq!(r.threshold, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(r.probability, 1.0 / 3.0, epsilon = 1e-13);
        // threshold 2.5 -> P(L >= 3) = (1/3)^3
        let r = concentration_tail(&thermal(), &[0], 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r.probability, (1.0f64 / 3.0).powi(3), epsilon = 1e-13);
    }

    #[test]
    fn iid_tail_decreases_and_is_chernoff_bounded() {
        let ch = thermal();
        // lattice effects make n = 1 -> 2 increase (7/27 vs 0.3196); doubling from 2 on decreases
        let one = concentration_tail(&ch, &[1], 0.25, 1e-13).unwrap().probability;
        assert_abs_diff_eq!(one, 7.0 / 27.0, epsilon = 1e-12);
        let mut last = 1.0;
        for n in [2usize, 4, 8, 16] {
            let profile = vec![1u64; n];
            let r = concentration_tail(&ch, &profile, 0.25, 1e-13).unwrap();
            assert_abs_diff_eq!(r.threshold, 1.25 * n as f64, epsilon = 1e-12);
            assert!(r.probability < last, "n={n}");
            last = r.probability;
            let c = chernoff_tail(&ch, &profile, r.threshold).unwrap();
            assert!(c >= (r.probability + r.truncation_error).log2(), "n={n}");
        }
    }

    #[test]
    fn mgf_closed_form_matches_kernel_sum() {
        let ch = ChannelParams::additive(0.7).unwrap();
        let dec = ch.decompose();
        for k in [0u64, 1, 4] {
            let row = channel_row(&ch, k as usize, 2000);
            for s in [0.05, 0.2, 0.5] {
                let direct: f64 = row
                    .mass()
                    .iter()
                    .enumerate()
                    .map(|(l, p)| p * (s * l as f64).exp2())
                    .sum();
                assert_abs_diff_eq!(
                    log2_mgf(dec.transmissivity, dec.mu_squared(), k, s),
                    direct.log2(),
                    epsilon = 1e-11
                );
            }
        }
    }

    #[test]
    fn chernoff_rate_is_linear() {
        let ch = thermal();
        let rates: Vec<f64> = [50usize, 100, 200]
            .iter()
            .map(|&n| chernoff_tail(&ch, &vec![1; n], 1.25 * n as f64).unwrap() / n as f64)
            .collect();
        assert!(rates.iter().all(|r| *r < 0.0));
        assert_abs_diff_eq!(rates[0], rates[2], epsilon = 1e-9);
    }

    #[test]
    fn threshold_below_mean_is_rejected() {
        assert!(chernoff_tail(&thermal(), &[1, 1], 1.5).is_err());
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let ch = thermal();
        let profile = vec![1u64; 4];
        let exact = concentration_tail(&ch, &profile, 0.25, 1e-13).unwrap().probability;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mc = concentration_tail_mc(&ch, &profile, 0.25, 200_000, &mut rng).unwrap();
        let sd = (exact * (1.0 - exact) / 200_000.0).sqrt();
        assert!((mc - exact).abs() < 5.0 * sd, "mc {mc} exact {exact}");
    }
}

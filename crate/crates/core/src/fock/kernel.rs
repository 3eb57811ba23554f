//! Photon-number transition kernels `p(l|k)` of the loss, amplifier and composite channels.
//!
//! All probabilities are assembled in log-space from `ln C(n, k)` and exponentiated at
//! the end, so rows stay accurate with hundreds of photons.

use serde::Serialize;

use super::distribution::PhotonDistribution;
use crate::channels::{ChannelParams, LossAmpDecomposition};
use crate::error::{Error, Result};
use crate::special::{ln_choose, xlnx};

/// Largest cutoff the automatic row-cutoff search will try.
pub const MAX_AUTO_CUTOFF: usize = 1 << 16;

/// Per-input-level output distributions `rows[k] = p(·|k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonKernel {
    rows: Vec<PhotonDistribution>,
    /// Geometric decay ratio `mu^2 = 1 - 1/G` of the amplifier stage (0 without gain).
    decay: f64,
}

fn check_transmissivity(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain(format!("transmissivity must be in [0, 1], got {t}")))
    }
}

fn check_gain(gain: f64) -> Result<()> {
    if gain >= 1.0 && gain.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("gain must be >= 1, got {gain}")))
    }
}

/// `Binomial(k, t)` pmf at `m`.
fn binomial_pmf(t: f64, k: usize, m: usize) -> f64 {
    let (k, m) = (k as u64, m as u64);
    (ln_choose(k, m) + xlnx(m as f64, t) + xlnx((k - m) as f64, 1.0 - t)).exp()
}

/// Row `k` of the pure-loss kernel, truncated at `l_max`.
pub(crate) fn loss_row(t: f64, k: usize, l_max: usize) -> PhotonDistribution {
    let mass: Vec<f64> = (0..=l_max)
        .map(|m| if m <= k { binomial_pmf(t, k, m) } else { 0.0 })
        .collect();
    let tail: f64 = (l_max + 1..=k).map(|m| binomial_pmf(t, k, m)).sum();
    PhotonDistribution::from_parts(mass, tail)
}

/// Resolved masses `q(l|m)` for `l <= l_max` and the complemented tail.
fn amp_masses(mu2: f64, m: usize, l_max: usize) -> (Vec<f64>, f64) {
    let mut mass = vec![0.0; l_max + 1];
    if m > l_max {
        return (mass, 1.0);
    }
    if mu2 == 0.0 {
        mass[m] = 1.0;
        return (mass, 0.0);
    }
    let ln_keep = (-mu2).ln_1p(); // ln(1 - mu^2) = -ln G
    let ln_mu2 = mu2.ln();
    for (l, slot) in mass.iter_mut().enumerate().skip(m) {
        let excess = (l - m) as f64;
        *slot = ((m + 1) as f64 * ln_keep + excess * ln_mu2 + ln_choose(l as u64, m as u64)).exp();
    }
    let tail = (1.0 - mass.iter().sum::<f64>()).max(0.0);
    (mass, tail)
}

/// Row `m` of the quantum-limited amplifier kernel.
pub(crate) fn amp_row(mu2: f64, m: usize, l_max: usize) -> PhotonDistribution {
    let (mass, tail) = amp_masses(mu2, m, l_max);
    PhotonDistribution::from_parts(mass, tail)
}

/// Pure-loss kernel: row `k` is `Binomial(k, T)`.
pub fn loss_kernel(t: f64, k_max: usize, l_max: usize) -> Result<PhotonKernel> {
    check_transmissivity(t)?;
    Ok(PhotonKernel {
        rows: (0..=k_max).map(|k| loss_row(t, k, l_max)).collect(),
        decay: 0.0,
    })
}

/// Quantum-limited amplifier kernel:
/// `q(l|m) = (1 - mu^2)^{m+1} mu^{2(l-m)} C(l, m)` for `l >= m`, with `mu^2 = 1 - 1/G`.
pub fn amp_kernel(gain: f64, k_max: usize, l_max: usize) -> Result<PhotonKernel> {
    check_gain(gain)?;
    let mu2 = 1.0 - 1.0 / gain;
    Ok(PhotonKernel {
        rows: (0..=k_max).map(|m| amp_row(mu2, m, l_max)).collect(),
        decay: mu2,
    })
}

/// Composite row `p(l|k) = Σ_m p(m) q(l|m)` given precomputed amplifier rows.
fn composite_row(
    dec: &LossAmpDecomposition,
    k: usize,
    amp_rows: &[(Vec<f64>, f64)],
    l_max: usize,
) -> PhotonDistribution {
    let mut mass = vec![0.0; l_max + 1];
    let mut tail = 0.0;
    for (m, (q, q_tail)) in amp_rows.iter().enumerate().take(k + 1) {
        let pm = binomial_pmf(dec.transmissivity, k, m);
        if pm == 0.0 {
            continue;
        }
        for (slot, &ql) in mass.iter_mut().zip(q) {
            *slot += pm * ql;
        }
        tail += pm * q_tail;
    }
    PhotonDistribution::from_parts(mass, tail)
}

/// Single row `p(·|k)` of the channel kernel.
pub fn channel_row(ch: &ChannelParams, k: usize, l_max: usize) -> PhotonDistribution {
    let dec = ch.decompose();
    let mu2 = dec.mu_squared();
    let amp: Vec<_> = (0..=k).map(|m| amp_masses(mu2, m, l_max)).collect();
    composite_row(&dec, k, &amp, l_max)
}

/// Smallest cutoff at which row `k` leaves at most `budget` unresolved.
pub fn row_cutoff(ch: &ChannelParams, k: usize, budget: f64) -> Result<usize> {
    if !(budget > 0.0) {
        return Err(Error::domain(format!("tail budget must be positive, got {budget}")));
    }
    let mut l_max = (2 * k).max(32);
    loop {
        let row = channel_row(ch, k, l_max);
        if row.tail_mass() <= budget {
            // shrink to the first level where the remaining mass fits the budget
            let mut remaining = row.tail_mass();
            let mut cut = l_max;
            while cut > 0 && remaining + row.pmf(cut) <= budget {
                remaining += row.pmf(cut);
                cut -= 1;
            }
            return Ok(cut);
        }
        if l_max >= MAX_AUTO_CUTOFF {
            return Err(Error::Truncation {
                tail: row.tail_mass(),
                budget,
            });
        }
        l_max = (l_max * 2).min(MAX_AUTO_CUTOFF);
    }
}

/// Full channel kernel for inputs `0..=k_max`, outputs resolved to `l_max`.
///
/// Fails with [`Error::Truncation`] when any row leaves more than `tail_budget` unresolved;
/// pass `f64::INFINITY` to accept any truncation.
pub fn channel_kernel(
    ch: &ChannelParams,
    k_max: usize,
    l_max: usize,
    tail_budget: f64,
) -> Result<PhotonKernel> {
    let dec = ch.decompose();
    let mu2 = dec.mu_squared();
    let amp: Vec<_> = (0..=k_max).map(|m| amp_masses(mu2, m, l_max)).collect();
    let rows: Vec<PhotonDistribution> = (0..=k_max)
        .map(|k| composite_row(&dec, k, &amp, l_max))
        .collect();
    if let Some(worst) = rows
        .iter()
        .map(PhotonDistribution::tail_mass)
        .find(|&t| t > tail_budget)
    {
        return Err(Error::Truncation {
            tail: worst,
            budget: tail_budget,
        });
    }
    Ok(PhotonKernel { rows, decay: mu2 })
}

/// Pushes a photon-number distribution through a kernel.
pub fn apply_kernel(kern: &PhotonKernel, dist: &PhotonDistribution) -> Result<PhotonDistribution> {
    let needed = dist
        .mass()
        .iter()
        .rposition(|&p| p > 0.0)
        .map_or(1, |k| k + 1);
    if needed > kern.rows.len() {
        return Err(Error::SupportMismatch {
            needed,
            available: kern.rows.len(),
        });
    }
    let mut mass = vec![0.0; kern.l_max() + 1];
    let mut tail = dist.tail_mass();
    for (k, &pk) in dist.mass().iter().enumerate().take(needed) {
        if pk == 0.0 {
            continue;
        }
        let row = &kern.rows[k];
        for (slot, &p) in mass.iter_mut().zip(row.mass()) {
            *slot += pk * p;
        }
        tail += pk * row.tail_mass();
    }
    Ok(PhotonDistribution::from_parts(mass, tail))
}

impl PhotonKernel {
    pub fn rows(&self) -> &[PhotonDistribution] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> Option<&PhotonDistribution> {
        self.rows.get(k)
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn l_max(&self) -> usize {
        self.rows[0].max_level()
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Upper bound on `E[L; L > l_max]` for row `k`, the mean hidden in the tail.
    ///
    /// Beyond `c = l_max` every component ratio `q(l+1|m)/q(l|m)` is at most
    /// `r = mu^2 (c+2)/(c+2-k)`, so the tail is dominated by a geometric law with ratio `r`.
    pub fn mean_tail_bound(&self, k: usize) -> f64 {
        let Some(row) = self.rows.get(k) else {
            return f64::INFINITY;
        };
        let t = row.tail_mass();
        if t == 0.0 {
            return 0.0;
        }
        if self.decay == 0.0 {
            // pure loss: support is 0..=k
            return t * k as f64;
        }
        let c = self.l_max() as f64;
        if c + 2.0 <= k as f64 {
            return f64::INFINITY;
        }
        let r = self.decay * (c + 2.0) / (c + 2.0 - k as f64);
        if r >= 1.0 {
            return f64::INFINITY;
        }
        t * (c + 1.0 + r / (1.0 - r))
    }
}

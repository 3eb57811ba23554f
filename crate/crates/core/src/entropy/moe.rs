//! Brute-force minimum-output-entropy scans over pure input states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{renyi, renyi_thermal, Spectrum};
use crate::channels::ChannelParams;
use crate::error::{Error, Result};
use crate::fock::{apply_channel_matrix, row_cutoff, TruncatedOperator};

/// Tail budget per input level when choosing the output cutoff.
const ROW_TAIL_BUDGET: f64 = 1e-13;
/// Largest output cutoff a scan will use.
pub const MAX_OUTPUT_DIM: usize = 512;
/// Largest vacuum-output tail a scan accepts.
pub const VACUUM_TAIL_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoeArgmin {
    pub label: String,
    /// `|<0|psi>|^2` of the minimizing input.
    pub vacuum_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoeScan {
    pub alpha: f64,
    pub min_entropy: f64,
    /// `H_alpha` of the vacuum output, the thermal state with mean `N'_B`.
    pub floor: f64,
    pub argmin: MoeArgmin,
    pub states_evaluated: usize,
    pub output_dim: usize,
}

impl MoeScan {
    pub fn margin(&self) -> f64 {
        self.min_entropy - self.floor
    }
}

fn normalized(v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let v = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalized(v)
}

fn probe_states(d: usize) -> Vec<(String, Vec<Complex64>)> {
    let basis = |coeffs: &[(usize, Complex64)]| {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for &(k, c) in coeffs {
            v[k] = c;
        }
        normalized(v)
    };
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut probes: Vec<(String, Vec<Complex64>)> = (0..d.min(4))
        .map(|k| (format!("fock-{k}"), basis(&[(k, one)])))
        .collect();
    if d >= 2 {
        probes.push(("sup-0+1".into(), basis(&[(0, one), (1, one)])));
        probes.push(("sup-0+i1".into(), basis(&[(0, one), (1, i)])));
    }
    if d >= 3 {
        probes.push(("sup-0+1+2".into(), basis(&[(0, one), (1, one), (2, one)])));
    }
    for amp in [0.25f64, 0.5, 1.0] {
        let mut c = 1.0;
        let v = (0..d)
            .map(|k| {
                if k > 0 {
                    c *= amp / (k as f64).sqrt();
                }
                Complex64::new(c, 0.0)
            })
            .collect();
        probes.push((format!("coherent-{amp}"), normalized(v)));
    }
    probes
}

fn output_dim(ch: &ChannelParams, d: usize) -> Result<usize> {
    let mut needed = 1;
    for k in 0..d {
        match row_cutoff(ch, k, ROW_TAIL_BUDGET) {
            Ok(cut) => needed = needed.max(cut + 1),
            Err(Error::Truncation { .. }) => needed = MAX_OUTPUT_DIM,
            Err(e) => return Err(e),
        }
        if needed >= MAX_OUTPUT_DIM {
            needed = MAX_OUTPUT_DIM;
            break;
        }
    }
    let vacuum = crate::fock::channel_row(ch, 0, needed - 1);
    if vacuum.tail_mass() > VACUUM_TAIL_BUDGET {
        return Err(Error::CutoffTooSmall {
            defect: vacuum.tail_mass(),
            budget: VACUUM_TAIL_BUDGET,
        });
    }
    Ok(needed)
}

fn output_entropies(
    ch: &ChannelParams,
    psi: &[Complex64],
    out_dim: usize,
    alphas: &[f64],
) -> Result<Vec<f64>> {
    let rho = TruncatedOperator::pure(psi)?;
    let out = apply_channel_matrix(ch, &rho, out_dim, 1.0)?;
    let ev: Vec<f64> = DMatrix::clone(out.matrix())
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    let s = Spectrum::from_values(ev)?;
    alphas.iter().map(|&a| renyi(&s, a)).collect()
}

/// Minimum output Rényi entropies over `trials` Haar-random pure states on `d` input
/// levels plus a fixed probe set, for every order in `alphas`.
///
/// Each trial gets its own generator seeded from `rng`, so results do not depend on
/// thread scheduling.
pub fn moe_scan_orders<R: Rng + ?Sized>(
    ch: &ChannelParams,
    alphas: &[f64],
    d: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<MoeScan>> {
    if d == 0 {
        return Err(Error::domain("input cutoff must be >= 1"));
    }
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 1.0)) {
        return Err(Error::domain("moe_scan needs orders alpha > 1"));
    }
    let out_dim = output_dim(ch, d)?;
    let nb = ch.output_photon_numbers(0.0)?.noise;
    let floors: Vec<f64> = alphas
        .iter()
        .map(|&a| renyi_thermal(nb, a))
        .collect::<Result<_>>()?;

    let probes = probe_states(d);
    let seeds: Vec<u64> = (0..trials).map(|_| rng.random()).collect();
    let mut results: Vec<(String, f64, Vec<f64>)> = probes
        .into_par_iter()
        .map(|(label, psi)| {
            let h = output_entropies(ch, &psi, out_dim, alphas)?;
            Ok((label, psi[0].norm_sqr(), h))
        })
        .collect::<Result<_>>()?;
    let random: Vec<(String, f64, Vec<f64>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let mut trial_rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = haar_state(d, &mut trial_rng);
            let h = output_entropies(ch, &psi, out_dim, alphas)?;
            Ok((format!("haar-{i}"), psi[0].norm_sqr(), h))
        })
        .collect::<Result<_>>()?;
    results.extend(random);

    let scans = alphas
        .iter()
        .enumerate()
        .map(|(ai, &alpha)| {
            let (label, vw, h) = results
                .iter()
                .fold(None::<&(String, f64, Vec<f64>)>, |best, r| match best {
                    Some(b) if b.2[ai] <= r.2[ai] => Some(b),
                    _ => Some(r),
                })
                .expect("probe set is non-empty");
            MoeScan {
                alpha,
                min_entropy: h[ai],
                floor: floors[ai],
                argmin: MoeArgmin {
                    label: label.clone(),
                    vacuum_weight: *vw,
                },
                states_evaluated: results.len(),
                output_dim: out_dim,
            }
        })
        .collect();
    Ok(scans)
}

/// Single-order [`moe_scan_orders`].
pub fn moe_scan<R: Rng + ?Sized>(
    ch: &ChannelParams,
    alpha: f64,
    d: usize,
    trials: usize,
    rng: &mut R,
) -> Result<MoeScan> {
    Ok(moe_scan_orders(ch, &[alpha], d, trials, rng)?.remove(0))
}

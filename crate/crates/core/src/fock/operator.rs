use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channels::ChannelParams;
use crate::entropy::Spectrum;
use crate::error::{Error, Result};
use crate::special::{ln_choose, xlnx};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Positive semidefinite operator of trace at most one on the Fock levels `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    matrix: DMatrix<Complex64>,
}

impl TruncatedOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::domain(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::domain(format!("operator is not Hermitian (defect {asym:e})")));
        }
        let op = TruncatedOperator { matrix };
        let trace = op.trace();
        if trace > 1.0 + TRACE_TOLERANCE {
            return Err(Error::domain(format!("trace {trace} exceeds 1")));
        }
        let min_eig = op.eigenvalues().last().copied().unwrap_or(0.0);
        if min_eig < -EIGENVALUE_TOLERANCE {
            return Err(Error::domain(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(op)
    }

    /// Skips validation; for outputs that are PSD by construction.
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        TruncatedOperator { matrix }
    }

    /// `|psi><psi|`; `psi` must have norm at most one.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm2 > 1.0 + TRACE_TOLERANCE {
            return Err(Error::domain(format!("state vector has squared norm {norm2}")));
        }
        let d = psi.len();
        Ok(TruncatedOperator {
            matrix: DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj()),
        })
    }

    pub fn fock(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::domain(format!("Fock level {k} outside cutoff {dim}")));
        }
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        TruncatedOperator::diagonal(&p)
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = DMatrix::from_fn(probs.len(), probs.len(), |i, j| {
            if i == j {
                Complex64::new(probs[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        TruncatedOperator::new(d)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Eigenvalue spectrum with the missing trace as unresolved tail.
    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::from_values(self.eigenvalues())
    }
}

/// Matrix elements of the loss channel's Kraus operators, `amp[k][j] = <k-j|A_j|k>`.
pub(crate) fn loss_amplitudes(t: f64, dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|k| {
            (0..=k)
                .map(|j| {
                    let ln = ln_choose(k as u64, j as u64)
                        + xlnx((k - j) as f64, t)
                        + xlnx(j as f64, 1.0 - t);
                    (0.5 * ln).exp()
                })
                .collect()
        })
        .collect()
}

/// Amplifier Kraus elements `amp[m][j] = <m+j|B_j|m>` for `m + j < out_dim`.
pub(crate) fn amp_amplitudes(mu2: f64, in_dim: usize, out_dim: usize) -> Vec<Vec<f64>> {
    (0..in_dim)
        .map(|m| {
            if m >= out_dim {
                return Vec::new();
            }
            (0..out_dim - m)
                .map(|j| {
                    if mu2 == 0.0 {
                        return if j == 0 { 1.0 } else { 0.0 };
                    }
                    let ln = (m + 1) as f64 * (-mu2).ln_1p()
                        + j as f64 * mu2.ln()
                        + ln_choose((m + j) as u64, j as u64);
                    (0.5 * ln).exp()
                })
                .collect()
        })
        .collect()
}

/// Applies the channel to a truncated density matrix, resolving outputs up to `out_dim`.
///
/// The loss stage maps `|a+j><b+j|` to `|a><b|` and the amplifier maps `|a><b|` to
/// `|a+j><b+j|`, so both are evaluated as shifted-diagonal sums. Fails with
/// [`Error::CutoffTooSmall`] when the output loses more than `trace_budget` of the
/// input trace.
pub fn apply_channel_matrix(
    ch: &ChannelParams,
    rho: &TruncatedOperator,
    out_dim: usize,
    trace_budget: f64,
) -> Result<TruncatedOperator> {
    if out_dim == 0 {
        return Err(Error::domain("output cutoff must be >= 1"));
    }
    let dec = ch.decompose();
    let d = rho.dim();
    let m = rho.matrix();

    let la = loss_amplitudes(dec.transmissivity, d);
    let mut lossy = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        for a in 0..d - j {
            let wa = la[a + j][j];
            if wa == 0.0 {
                continue;
            }
            for b in 0..d - j {
                let w = wa * la[b + j][j];
                if w != 0.0 {
                    lossy[(a, b)] += m[(a + j, b + j)] * w;
                }
            }
        }
    }

    let ba = amp_amplitudes(dec.mu_squared(), d, out_dim);
    let mut out = DMatrix::<Complex64>::zeros(out_dim, out_dim);
    for a in 0..d.min(out_dim) {
        for b in 0..d.min(out_dim) {
            let z = lossy[(a, b)];
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            let jmax = out_dim - a.max(b);
            for j in 0..jmax {
                let w = ba[a][j] * ba[b][j];
                if w != 0.0 {
                    out[(a + j, b + j)] += z * w;
                }
            }
        }
    }
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    let op = TruncatedOperator::from_matrix_unchecked(out);
    let defect = rho.trace() - op.trace();
    if defect > trace_budget {
        return Err(Error::CutoffTooSmall {
            defect,
            budget: trace_budget,
        });
    }
    Ok(op)
}

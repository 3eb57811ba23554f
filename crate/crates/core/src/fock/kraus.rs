//! Kraus families of the pure-loss and quantum-limited amplifier channels on truncated
//! Fock spaces, with real nonnegative matrix elements.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kraus operators mapping a `input_dim`-level space to an `output_dim`-level space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    operators: Vec<DMatrix<f64>>,
    input_dim: usize,
    output_dim: usize,
}

/// Per-level completeness defects of `Σ K^T K` against the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    /// `1 - (Σ K^T K)[k, k]` for each input level `k`: the mass pushed past the cutoff.
    pub level_defects: Vec<f64>,
    /// Largest `|(Σ K^T K)[i, j]|` with `i != j`.
    pub max_off_diagonal: f64,
}

impl CompletenessReport {
    /// Input levels whose output support fits inside the cutoff up to `tol`.
    pub fn untruncated_levels(&self, tol: f64) -> Vec<usize> {
        self.level_defects
            .iter()
            .enumerate()
            .filter(|(_, d)| d.abs() <= tol)
            .map(|(k, _)| k)
            .collect()
    }
}

fn annihilation(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

fn creation(d: usize) -> DMatrix<f64> {
    annihilation(d).transpose()
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::domain("Fock cutoff must be >= 1"))
    } else {
        Ok(())
    }
}

/// Loss Kraus operators `A_j = sqrt((1-T)^j / j!) · T^{n/2} · a^j`, `j = 0..d`.
pub fn kraus_loss(t: f64, d: usize) -> Result<KrausFamily> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("transmissivity must be in [0, 1], got {t}")));
    }
    check_dim(d)?;
    let a = annihilation(d);
    let damp = DMatrix::from_fn(d, d, |i, j| if i == j { t.powf(i as f64 / 2.0) } else { 0.0 });
    let mut a_pow = DMatrix::<f64>::identity(d, d);
    let mut coeff = 1.0;
    let mut operators = Vec::new();
    for j in 0..d {
        if j > 0 {
            a_pow = &a_pow * &a;
            coeff *= ((1.0 - t) / j as f64).sqrt();
        }
        let op = &damp * &a_pow * coeff;
        if op.iter().any(|&x| x != 0.0) {
            operators.push(op);
        }
    }
    Ok(KrausFamily {
        operators,
        input_dim: d,
        output_dim: d,
    })
}

/// Amplifier Kraus operators `B_j = (mu^j / sqrt(j!)) (a†)^j (1-mu^2)^{(n+1)/2}` from
/// `d_in` levels into `d_out` levels, with `mu^2 = 1 - 1/G`.
pub fn kraus_amp(gain: f64, d_in: usize, d_out: usize) -> Result<KrausFamily> {
    if !(gain >= 1.0) || !gain.is_finite() {
        return Err(Error::domain(format!("gain must be >= 1, got {gain}")));
    }
    check_dim(d_in)?;
    check_dim(d_out)?;
    let mu2 = 1.0 - 1.0 / gain;
    let mu = mu2.sqrt();
    let ad = creation(d_out);
    let mut op = DMatrix::from_fn(d_out, d_in, |i, j| {
        if i == j {
            (1.0 - mu2).powf((j + 1) as f64 / 2.0)
        } else {
            0.0
        }
    });
    let mut operators = Vec::new();
    for j in 0..d_out {
        if j > 0 {
            op = &ad * &op * (mu / (j as f64).sqrt());
        }
        if op.iter().any(|&x| x != 0.0) {
            operators.push(op.clone());
        }
    }
    Ok(KrausFamily {
        operators,
        input_dim: d_in,
        output_dim: d_out,
    })
}

impl KrausFamily {
    pub fn operators(&self) -> &[DMatrix<f64>] {
        &self.operators
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// `{ K_2 K_1 }` for `self = K_1` followed by `after = K_2`.
    pub fn then(&self, after: &KrausFamily) -> Result<KrausFamily> {
        if after.input_dim != self.output_dim {
            return Err(Error::SupportMismatch {
                needed: self.output_dim,
                available: after.input_dim,
            });
        }
        let operators = after
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .filter(|op| op.iter().any(|&x| x != 0.0))
            .collect();
        Ok(KrausFamily {
            operators,
            input_dim: self.input_dim,
            output_dim: after.output_dim,
        })
    }

    pub fn completeness(&self) -> DMatrix<f64> {
        self.operators
            .iter()
            .fold(DMatrix::zeros(self.input_dim, self.input_dim), |acc, k| {
                acc + k.transpose() * k
            })
    }

    pub fn completeness_report(&self) -> CompletenessReport {
        let c = self.completeness();
        let level_defects = (0..self.input_dim).map(|k| 1.0 - c[(k, k)]).collect();
        let mut max_off_diagonal: f64 = 0.0;
        for i in 0..self.input_dim {
            for j in 0..self.input_dim {
                if i != j {
                    max_off_diagonal = max_off_diagonal.max(c[(i, j)].abs());
                }
            }
        }
        CompletenessReport {
            level_defects,
            max_off_diagonal,
        }
    }

    /// Output photon-number probabilities for the input `|k><k|`.
    pub fn diagonal_action(&self, k: usize) -> Result<Vec<f64>> {
        if k >= self.input_dim {
            return Err(Error::SupportMismatch {
                needed: k + 1,
                available: self.input_dim,
            });
        }
        let mut out = vec![0.0; self.output_dim];
        for op in &self.operators {
            for (l, slot) in out.iter_mut().enumerate() {
                *slot += op[(l, k)] * op[(l, k)];
            }
        }
        Ok(out)
    }

    /// `Σ K rho K^T` on a dense complex matrix.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if rho.nrows() != self.input_dim || rho.ncols() != self.input_dim {
            return Err(Error::SupportMismatch {
                needed: rho.nrows(),
                available: self.input_dim,
            });
        }
        let mut out = DMatrix::<Complex64>::zeros(self.output_dim, self.output_dim);
        for op in &self.operators {
            let k = op.map(|x| Complex64::new(x, 0.0));
            out += &k * rho * k.transpose();
        }
        Ok(out)
    }
}

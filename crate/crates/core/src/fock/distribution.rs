use serde::Serialize;

use crate::error::{Error, Result};

/// Normalization slack for `sum(mass) + tail_mass`.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Truncated photon-number distribution with explicit unresolved tail.
///
/// `mass[l]` is the probability of exactly `l` photons for `l <= max_level()`;
/// `tail_mass` is everything above.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonDistribution {
    mass: Vec<f64>,
    tail_mass: f64,
}

impl PhotonDistribution {
    pub fn new(mass: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::domain("distribution needs at least one level"));
        }
        if let Some((l, p)) = mass
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= 0.0) || !p.is_finite())
        {
            return Err(Error::domain(format!("mass at level {l} is {p}")));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::domain(format!("tail mass must be >= 0, got {tail_mass}")));
        }
        let total: f64 = mass.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain(format!("mass plus tail is {total}, expected 1")));
        }
        Ok(PhotonDistribution { mass, tail_mass })
    }

    /// Distribution whose tail is the complement of the resolved mass.
    pub fn from_resolved(mass: Vec<f64>) -> Result<Self> {
        let tail = (1.0 - mass.iter().sum::<f64>()).max(0.0);
        PhotonDistribution::new(mass, tail)
    }

    /// Used by kernel builders whose masses are non-negative by construction.
    pub(crate) fn from_parts(mass: Vec<f64>, tail_mass: f64) -> Self {
        debug_assert!(mass.iter().all(|p| *p >= 0.0));
        PhotonDistribution {
            mass,
            tail_mass: tail_mass.max(0.0),
        }
    }

    pub fn point(k: usize) -> Self {
        let mut mass = vec![0.0; k + 1];
        mass[k] = 1.0;
        PhotonDistribution { mass, tail_mass: 0.0 }
    }

    /// Poisson photon statistics of a coherent state, truncated at `l_max`.
    pub fn poisson(mean: f64, l_max: usize) -> Result<Self> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::domain(format!("Poisson mean must be >= 0, got {mean}")));
        }
        let mass: Vec<f64> = (0..=l_max)
            .map(|l| {
                if mean == 0.0 {
                    if l == 0 { 1.0 } else { 0.0 }
                } else {
                    (-mean + l as f64 * mean.ln() - crate::special::ln_factorial(l as u64)).exp()
                }
            })
            .collect();
        PhotonDistribution::from_resolved(mass)
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn max_level(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn pmf(&self, l: usize) -> f64 {
        self.mass.get(l).copied().unwrap_or(0.0)
    }

    /// Mean of the resolved part only; a lower bound on the true mean.
    pub fn resolved_mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.tail_mass
    }

    /// Mass strictly above `threshold` among resolved levels.
    pub fn mass_above(&self, threshold: f64) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|(l, _)| *l as f64 > threshold)
            .map(|(_, p)| p)
            .sum()
    }

    /// Folds every level above `l_max` into the tail.
    pub fn truncated(&self, l_max: usize) -> Self {
        if l_max >= self.max_level() {
            return self.clone();
        }
        let dropped: f64 = self.mass[l_max + 1..].iter().sum();
        PhotonDistribution {
            mass: self.mass[..=l_max].to_vec(),
            tail_mass: self.tail_mass + dropped,
        }
    }
}

/// Distribution of the sum of two independent photon counts.
///
/// The resolved part is the full convolution; the tail is the probability that either
/// summand is unresolved, `t1 + t2 - t1 t2`.
pub fn convolve(a: &PhotonDistribution, b: &PhotonDistribution) -> PhotonDistribution {
    let mut mass = vec![0.0; a.mass.len() + b.mass.len() - 1];
    for (i, &pa) in a.mass.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b.mass.iter().enumerate() {
            mass[i + j] += pa * pb;
        }
    }
    let tail = a.tail_mass + b.tail_mass - a.tail_mass * b.tail_mass;
    PhotonDistribution::from_parts(mass, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validation() {
        assert!(PhotonDistribution::new(vec![0.5, 0.5], 0.0).is_ok());
        assert!(PhotonDistribution::new(vec![0.5, 0.4], 0.0).is_err());
        assert!(PhotonDistribution::new(vec![1.1, -0.1], 0.0).is_err());
        assert!(PhotonDistribution::new(vec![], 1.0).is_err());
        assert!(PhotonDistribution::new(vec![0.5], 0.5).is_ok());
    }

    #[test]
    fn point_convolution() {
        let c = convolve(&PhotonDistribution::point(2), &PhotonDistribution::point(3));
        assert_eq!(c.pmf(5), 1.0);
        assert_eq!(c.total_mass(), 1.0);
        assert_eq!(c.resolved_mean(), 5.0);
    }

    #[test]
    fn convolution_tail_accounting() {
        let a = PhotonDistribution::new(vec![0.5, 0.4], 0.1).unwrap();
        let b = PhotonDistribution::new(vec![0.7, 0.1], 0.2).unwrap();
        let c = convolve(&a, &b);
        assert_abs_diff_eq!(c.tail_mass(), 0.1 + 0.2 - 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(c.total_mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.pmf(1), 0.5 * 0.1 + 0.4 * 0.7, epsilon = 1e-15);
    }

    #[test]
    fn truncation_moves_mass_to_tail() {
        let d = PhotonDistribution::new(vec![0.25, 0.5, 0.25], 0.0).unwrap();
        let t = d.truncated(0);
        assert_eq!(t.mass(), &[0.25]);
        assert_abs_diff_eq!(t.tail_mass(), 0.75, epsilon = 1e-15);
        assert_eq!(d.mass_above(0.5), 0.75);
    }

    #[test]
    fn poisson_statistics() {
        let p = PhotonDistribution::poisson(1.0, 40).unwrap();
        assert_abs_diff_eq!(p.resolved_mean(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.pmf(0), (-1f64).exp(), epsilon = 1e-15);
        assert_eq!(PhotonDistribution::poisson(0.0, 3).unwrap().pmf(0), 1.0);
    }
}

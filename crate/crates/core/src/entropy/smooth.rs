use serde::Serialize;

use super::{min_entropy, renyi, Spectrum};
use crate::error::{Error, Result};

const SEARCH_TOLERANCE: f64 = 1e-12;

/// Mass that must be removed to cap every entry at `cap`.
fn excess_above(values: &[f64], cap: f64) -> f64 {
    values.iter().map(|&p| (p - cap).max(0.0)).sum()
}

/// Smooth min-entropy of a diagonal state over the trace-distance ball of radius `eps`.
///
/// Trace distance is `(1/2) Σ|p_i - q_i|`. The optimal smoother caps the largest
/// entries at `λ` and moves the removed mass onto smaller entries, so the result is
/// `-log2 max(λ_eps, 1/d)` where `λ_eps` removes exactly `eps`. A non-zero tail is
/// treated as unboundedly many unresolved levels, which drops the `1/d` floor.
pub fn smooth_min_entropy(s: &Spectrum, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::domain(format!("smoothing radius must be in [0, 1), got {eps}")));
    }
    if eps == 0.0 {
        return min_entropy(s);
    }
    let values = s.values();
    let max = s.max_value();

    // Bisection on the cap: excess_above is continuous and non-increasing.
    let (mut lo, mut hi) = (0.0, max);
    if excess_above(values, 0.0) <= eps {
        hi = 0.0;
    } else {
        while hi - lo > SEARCH_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if excess_above(values, mid) <= eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Solve exactly on the active set located by the bisection.
        let (count, mass) = values
            .iter()
            .filter(|&&p| p > hi)
            .fold((0usize, 0.0), |(c, m), &p| (c + 1, m + p));
        if count > 0 {
            let exact = (mass - eps) / count as f64;
            if exact >= 0.0 && (exact - hi).abs() <= 2.0 * SEARCH_TOLERANCE {
                hi = exact;
            }
        }
    }

    let floor = if s.tail_mass() > 0.0 {
        0.0
    } else {
        1.0 / values.len() as f64
    };
    let cap = hi.max(floor);
    if cap <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-cap.log2())
}

/// Both sides of `H_min^eps >= H_alpha - log2(1/eps) / (alpha - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn check_renyi_smoothing(s: &Spectrum, eps: f64, alpha: f64) -> Result<SmoothingCheck> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must be in (0, 1), got {eps}")));
    }
    if !(alpha > 1.0) {
        return Err(Error::domain(format!("alpha must exceed 1, got {alpha}")));
    }
    let lhs = smooth_min_entropy(s, eps)?;
    let rhs = renyi(s, alpha)? - (1.0 / eps).log2() / (alpha - 1.0);
    let holds = lhs >= rhs - 1e-12 * rhs.abs().max(1.0);
    Ok(SmoothingCheck { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Smallest achievable max over two-outcome distributions within TV `eps`, on a grid.
    fn two_outcome_grid(p: [f64; 2], eps: f64) -> f64 {
        let steps = 100_000;
        (0..=steps)
            .map(|i| i as f64 / steps as f64)
            .filter(|&q| 0.5 * ((q - p[0]).abs() + ((1.0 - q) - p[1]).abs()) <= eps + 1e-12)
            .map(|q| q.max(1.0 - q))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn zero_radius_is_min_entropy() {
        let s = Spectrum::new(vec![0.7, 0.2, 0.1], 0.0).unwrap();
        assert_eq!(smooth_min_entropy(&s, 0.0).unwrap(), min_entropy(&s).unwrap());
    }

    #[test]
    fn two_outcome_floor() {
        let s = Spectrum::new(vec![0.5, 0.5], 0.0).unwrap();
        assert_abs_diff_eq!(smooth_min_entropy(&s, 0.2).unwrap(), 1.0, epsilon = 1e-12);

        let s = Spectrum::new(vec![0.6, 0.4], 0.0).unwrap();
        let oracle = two_outcome_grid([0.6, 0.4], 0.1);
        assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(smooth_min_entropy(&s, 0.1).unwrap(), -oracle.log2(), epsilon = 1e-9);

        let s = Spectrum::new(vec![0.9, 0.1], 0.0).unwrap();
        let oracle = two_outcome_grid([0.9, 0.1], 0.15);
        assert_abs_diff_eq!(smooth_min_entropy(&s, 0.15).unwrap(), -oracle.log2(), epsilon = 1e-9);
    }

    #[test]
    fn cap_removes_exact_mass() {
        // cap 0.3 on [0.5, 0.3, 0.1, 0.1] removes 0.2
        let s = Spectrum::new(vec![0.5, 0.3, 0.1, 0.1], 0.0).unwrap();
        assert_abs_diff_eq!(
            smooth_min_entropy(&s, 0.2).unwrap(),
            -(0.3f64).log2(),
            epsilon = 1e-12
        );
        // eps = 0.3: two entries above cap: (0.8 - 0.3)/2 = 0.25 = 1/d floor
        assert_abs_diff_eq!(smooth_min_entropy(&s, 0.3).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_renner_wolf_example() {
        let s = Spectrum::uniform(8).unwrap();
        let c = check_renyi_smoothing(&s, 0.01, 2.0).unwrap();
        assert_abs_diff_eq!(c.lhs, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rhs, 3.0 - 100f64.log2(), epsilon = 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn point_mass_renner_wolf() {
        let s = Spectrum::new(vec![1.0], 0.0).unwrap();
        let c = check_renyi_smoothing(&s, 0.05, 3.0).unwrap();
        assert!(c.holds);
        assert!(c.rhs < 0.0);
    }

    #[test]
    fn tail_lifts_normalization_floor() {
        let s = Spectrum::new(vec![0.5, 0.5 - 1e-3], 1e-3).unwrap();
        let h = smooth_min_entropy(&s, 0.2).unwrap();
        assert!(h > 1.0);
    }
}

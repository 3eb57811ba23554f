//! Lattice-point counts for the total-photon-number projector and coherent-state
//! occupation statistics.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::special::{binomial, ln_factorial};

/// Rank of the projector onto `n` modes with total photon number at most `l`:
/// the number of tuples `(a_1..a_n)` with `Σ a_i <= l`, i.e. `C(l + n, n)`.
pub fn projector_count(n: u64, l: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("projector_count needs n >= 1"));
    }
    Ok(binomial(l + n, n))
}

fn poisson_ln_pmf(lambda: f64, j: u64) -> f64 {
    -lambda + j as f64 * lambda.ln() - ln_factorial(j)
}

/// `P(Poisson(lambda) > l)` summed directly over the upper tail.
fn poisson_upper_tail(lambda: f64, l: u64) -> f64 {
    let mut total = 0.0;
    let mut j = l + 1;
    loop {
        let term = poisson_ln_pmf(lambda, j).exp();
        total += term;
        // terms decrease geometrically once j > lambda
        if j as f64 > lambda && term <= total * 1e-18 {
            break;
        }
        j += 1;
    }
    total
}

fn poisson_lower_cdf(lambda: f64, l: u64) -> f64 {
    (0..=l).map(|j| poisson_ln_pmf(lambda, j).exp()).sum()
}

fn check_occupation_args(mean_per_mode: f64, n: u64) -> Result<f64> {
    if !(mean_per_mode >= 0.0) || !mean_per_mode.is_finite() {
        return Err(Error::domain(format!(
            "mean photon number must be >= 0, got {mean_per_mode}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("need at least one mode"));
    }
    Ok(mean_per_mode * n as f64)
}

/// Weight of an `n`-mode coherent product state (mean `mean_per_mode` each) inside the
/// projector onto total photon number `<= l`: `P(Poisson(n·mean) <= l)`.
pub fn coherent_occupation_probability(mean_per_mode: f64, n: u64, l: u64) -> Result<f64> {
    let lambda = check_occupation_args(mean_per_mode, n)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if l as f64 >= lambda {
        Ok(1.0 - poisson_upper_tail(lambda, l))
    } else {
        Ok(poisson_lower_cdf(lambda, l).min(1.0))
    }
}

/// Occupation-constraint failure mass `1 - P(Poisson(n·mean) <= l)`, accurate when tiny.
pub fn coherent_occupation_deficit(mean_per_mode: f64, n: u64, l: u64) -> Result<f64> {
    let lambda = check_occupation_args(mean_per_mode, n)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if l as f64 >= lambda {
        Ok(poisson_upper_tail(lambda, l))
    } else {
        Ok((1.0 - poisson_lower_cdf(lambda, l)).max(0.0))
    }
}

#[cfg(test)]
pub(crate) fn enumerate_tuples(n: usize, l: u64) -> u64 {
    fn rec(modes: usize, budget: u64) -> u64 {
        if modes == 0 {
            return 1;
        }
        (0..=budget).map(|a| rec(modes - 1, budget - a)).sum()
    }
    rec(n, l)
}

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

use crate::channels::ChannelParams;

/// Draws an output photon count for input Fock state `|k>`.
///
/// Binomial thinning through the loss stage, then negative-binomial gain drawn as a
/// Gamma-Poisson mixture: `m + j` with `j ~ NB(m + 1, 1 - mu^2)`.
pub fn sample_output<R: Rng + ?Sized>(ch: &ChannelParams, k: u64, rng: &mut R) -> u64 {
    let dec = ch.decompose();
    let m = if dec.transmissivity >= 1.0 {
        k
    } else {
        Binomial::new(k, dec.transmissivity)
            .expect("transmissivity in [0, 1]")
            .sample(rng)
    };
    let mu2 = dec.mu_squared();
    if mu2 == 0.0 {
        return m;
    }
    let scale = mu2 / (1.0 - mu2);
    let lambda = Gamma::new((m + 1) as f64, scale)
        .expect("positive shape and scale")
        .sample(rng);
    if lambda <= 0.0 {
        return m;
    }
    let extra: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
    m + extra as u64
}

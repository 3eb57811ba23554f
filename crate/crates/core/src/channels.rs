//! Phase-insensitive Gaussian channels parameterized by `(tau, nu)`.
//!
//! The channel maps a single-mode covariance matrix as `Γ → tau·Γ + nu·I`; complete
//! positivity reduces to `nu >= |tau - 1|`. Every valid channel equals a pure-loss
//! channel of transmissivity `T` followed by a quantum-limited amplifier of gain `G`,
//! with `tau = T·G` and `nu = G(1 - T) + G - 1`.

use serde::Serialize;

use crate::entropy::{g, h2};
use crate::error::{Error, Result};

/// Absolute slack on `nu >= |tau - 1|` absorbing float noise in user-supplied parameters.
pub const CPTP_TOLERANCE: f64 = 1e-9;

/// The pair `(tau, nu)`. Always completely positive once constructed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    tau: f64,
    nu: f64,
}

/// Transmissivity `T ∈ [0, 1]` and gain `G >= 1` realizing a channel as amplifier∘loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossAmpDecomposition {
    pub transmissivity: f64,
    pub gain: f64,
}

/// Mean output photon numbers for a thermal input (`N'_S`) and for vacuum (`N'_B`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputPhotons {
    pub signal: f64,
    pub noise: f64,
}

fn check_nonnegative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and >= 0, got {x}")))
    }
}

impl ChannelParams {
    /// Validates complete positivity. A `nu` that falls short of `|tau - 1|` by at most
    /// [`CPTP_TOLERANCE`] is snapped onto the quantum-limited boundary.
    pub fn new(tau: f64, nu: f64) -> Result<Self> {
        check_nonnegative("tau", tau)?;
        check_nonnegative("nu", nu)?;
        let required = (tau - 1.0).abs();
        if nu < required - CPTP_TOLERANCE {
            return Err(Error::NotCompletelyPositive { tau, nu, required });
        }
        Ok(ChannelParams {
            tau,
            nu: nu.max(required),
        })
    }

    pub fn identity() -> Self {
        ChannelParams { tau: 1.0, nu: 0.0 }
    }

    /// Thermal-noise channel: beamsplitter of transmissivity `eta` mixing in a thermal
    /// environment with `nb` photons. `nu = (1 - eta)(2 nb + 1)`.
    pub fn thermal(eta: f64, nb: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::domain(format!("eta must be in [0, 1], got {eta}")));
        }
        check_nonnegative("N_B", nb)?;
        ChannelParams::new(eta, (1.0 - eta) * (2.0 * nb + 1.0))
    }

    /// Pure-loss channel, the `nb = 0` thermal channel.
    pub fn pure_loss(eta: f64) -> Result<Self> {
        ChannelParams::thermal(eta, 0.0)
    }

    /// Additive-noise channel: random displacement with noise variance `nbar`.
    pub fn additive(nbar: f64) -> Result<Self> {
        check_nonnegative("nbar", nbar)?;
        ChannelParams::new(1.0, 2.0 * nbar)
    }

    /// Amplifier of gain `gain` with `n` thermal environment photons.
    pub fn amplifier(gain: f64, n: f64) -> Result<Self> {
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(Error::domain(format!("gain must be >= 1, got {gain}")));
        }
        check_nonnegative("N", n)?;
        ChannelParams::new(gain, (gain - 1.0) * (2.0 * n + 1.0))
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn is_quantum_limited(&self) -> bool {
        (self.nu - (self.tau - 1.0).abs()).abs() <= CPTP_TOLERANCE
    }

    /// `N'_B = (tau + nu - 1) / 2`, the mean photon number of the vacuum's image.
    pub fn noise_photons(&self) -> f64 {
        ((self.tau + self.nu - 1.0) / 2.0).max(0.0)
    }

    pub fn output_photon_numbers(&self, ns: f64) -> Result<OutputPhotons> {
        check_nonnegative("N_S", ns)?;
        let noise = self.noise_photons();
        Ok(OutputPhotons {
            signal: self.tau * ns + noise,
            noise,
        })
    }

    pub fn decompose(&self) -> LossAmpDecomposition {
        let s = self.tau + self.nu + 1.0;
        LossAmpDecomposition {
            transmissivity: (2.0 * self.tau / s).clamp(0.0, 1.0),
            gain: (s / 2.0).max(1.0),
        }
    }

    /// Classical capacity `g(N'_S) - g(N'_B)` in bits per mode.
    pub fn capacity(&self, ns: f64) -> Result<f64> {
        let out = self.output_photon_numbers(ns)?;
        Ok(g(out.signal)? - g(out.noise)?)
    }

    /// `(C + h2(eps)) / (1 - eps)`: the rate limit allowed by a weak converse at error `eps`.
    pub fn weak_converse_rate_bound(&self, ns: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain(format!("eps must be in (0, 1), got {eps}")));
        }
        Ok((self.capacity(ns)? + h2(eps)?) / (1.0 - eps))
    }
}

impl LossAmpDecomposition {
    /// Decomposition from raw `(tau, nu)`, failing when the pair is not completely positive.
    pub fn from_raw(tau: f64, nu: f64) -> Result<Self> {
        Ok(ChannelParams::new(tau, nu)?.decompose())
    }

    /// `(tau, nu) = (T G, G (1 - T) + G - 1)`.
    pub fn recompose(&self) -> (f64, f64) {
        let (t, gain) = (self.transmissivity, self.gain);
        (t * gain, gain * (1.0 - t) + gain - 1.0)
    }

    /// `mu^2 = tanh^2 r = 1 - 1/G`, the geometric ratio of the amplifier's photon statistics.
    pub fn mu_squared(&self) -> f64 {
        1.0 - 1.0 / self.gain
    }

    /// Squeezing parameter `r` with `G = cosh^2 r`.
    pub fn squeezing(&self) -> f64 {
        self.gain.sqrt().acosh()
    }
}

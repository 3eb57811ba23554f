//! Fock-basis machinery: photon-number distributions and transition kernels, Kraus
//! families, truncated density matrices, lattice counts and output sampling.

mod counting;
mod distribution;
mod kernel;
mod kraus;
mod operator;
mod sampling;

pub use counting::{coherent_occupation_deficit, coherent_occupation_probability, projector_count};
pub use distribution::{convolve, PhotonDistribution, MASS_TOLERANCE};
pub use kernel::{
    amp_kernel, apply_kernel, channel_kernel, channel_row, loss_kernel, row_cutoff, PhotonKernel,
    MAX_AUTO_CUTOFF,
};
pub use kraus::{kraus_amp, kraus_loss, CompletenessReport, KrausFamily};
pub use operator::{
    apply_channel_matrix, TruncatedOperator, EIGENVALUE_TOLERANCE, HERMITIAN_TOLERANCE,
    TRACE_TOLERANCE,
};
pub use sampling::sample_output;

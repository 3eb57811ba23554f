//! Strong-converse machinery: projector rank, output photon-number concentration, the
//! success-probability bounds and their slack optimization.
//!
//! Two bound forms are evaluated. Both read `2^{n·exponent} + additive terms` with the
//! exponent carried as a signed per-mode breakdown:
//!
//! * [`BoundForm::Renyi`] uses the Rényi entropy of the vacuum output at order `alpha`
//!   and a smoothing term `log2(1/eps) / (n(alpha - 1))`.
//! * [`BoundForm::Continuity`] replaces that entropy by `g(N'_B) - delta4 K(N'_B)`
//!   with `alpha = 1 + delta4` and `eps = 2^{-n delta5}`.
//!
//! `delta1` (occupation-constraint failure) and `delta3` (concentration failure) are
//! inputs; [`SlackModel`] supplies them per block length in sweeps.

mod bound;
mod concentration;
mod rank;
mod sweep;

pub use bound::{
    corollary_bound, delta6, theorem1_bound, BoundForm, BoundInputs, BoundReport, SlackParams,
};
pub use concentration::{
    chernoff_tail, concentration_tail, concentration_tail_mc, concentration_threshold,
    output_sum_distribution, profile_output_mean, ConcentrationTail,
};
pub use rank::{delta0, rank_bound_check, RankCheck};
pub use sweep::{
    optimize_bound, rate_sweep, slack_grid, transition_rate, OptimizedBound, SlackModel, SweepRow,
    GRID_MAX, GRID_MIN, GRID_POINTS,
};

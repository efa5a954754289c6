//! Energy bookkeeping, the pulsed-coupling cooling run and Monte-Carlo ensembles.

mod cooling;
mod energy;
mod ensemble;

pub use cooling::{run_cooling, CoolingRun, PULSE_WINDOW_WIDTHS};
pub use energy::{energy_breakdown, EnergyBreakdown, SampleObservables};
pub use ensemble::{
    run_ensemble, sample_initial_conditions, trajectory_rng, EnsembleResult, EnsembleSpec,
};

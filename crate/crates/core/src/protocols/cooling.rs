use crate::dynamics::{CouplingSchedule, HybridSystem, Trajectory};
use crate::error::{Error, Result};
use crate::model::{HybridState, ModelParams};

use super::energy::SampleObservables;

/// Half-width of the pulse window, in units of σ.
pub const PULSE_WINDOW_WIDTHS: f64 = 5.0;

/// Result of a pulsed-coupling run.
#[derive(Debug, Clone)]
pub struct CoolingRun {
    pub trajectory: Trajectory,
    pub observables: Vec<SampleObservables>,
    /// (t₀ − 5σ, t₀ + 5σ).
    pub window: (f64, f64),
    /// e_qm at the first sample after the window minus e_qm at the last
    /// sample before it; `None` if the run does not bracket the window.
    pub delta_e_qm: Option<f64>,
}

impl CoolingRun {
    pub fn in_window(&self, t: f64) -> bool {
        t >= self.window.0 && t <= self.window.1
    }
}

pub fn run_cooling(
    init: &HybridState,
    params: &ModelParams,
    pulse: &CouplingSchedule,
    t_max: f64,
    dt: f64,
    stride: usize,
) -> Result<CoolingRun> {
    let CouplingSchedule::GaussianPulse { center, width, .. } = *pulse else {
        return Err(Error::invalid("schedule", "constant", "cooling needs a gaussian-pulse schedule"));
    };
    let system = HybridSystem::new(*params).with_schedule(*pulse);
    let trajectory = system.integrate(init, t_max, dt, stride)?;
    let observables: Vec<_> = trajectory.samples.iter().map(|s| system.observe(s)).collect();
    let window = (center - PULSE_WINDOW_WIDTHS * width, center + PULSE_WINDOW_WIDTHS * width);

    let samples = &trajectory.samples;
    let before = samples.iter().rposition(|s| s.t <= window.0);
    let after = samples.iter().position(|s| s.t >= window.1);
    let delta_e_qm = match (before, after) {
        (Some(b), Some(a)) => Some(observables[a].energy.e_qm - observables[b].energy.e_qm),
        _ => None,
    };
    Ok(CoolingRun {
        trajectory,
        observables,
        window,
        delta_e_qm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::named_state;

    fn init() -> HybridState {
        HybridState::new(0.0, 0.0, 1.0, named_state("fig5_state").unwrap()).unwrap()
    }

    #[test]
    fn needs_a_pulse() {
        let params = ModelParams::with_unit_mass(0.03, 0.0045, 0.2).unwrap();
        assert!(run_cooling(&init(), &params, &CouplingSchedule::Constant, 10.0, 0.01, 10).is_err());
    }

    #[test]
    fn zero_amplitude_keeps_energies() {
        let params = ModelParams::with_unit_mass(0.03, 0.0045, 0.2).unwrap();
        let pulse = CouplingSchedule::gaussian_pulse(0.0, 100.0, 20.0).unwrap();
        let run = run_cooling(&init(), &params, &pulse, 250.0, 0.01, 500).unwrap();
        let e0 = run.observables[0].energy;
        for o in &run.observables {
            assert!((o.energy.e_cl - e0.e_cl).abs() < 1e-10);
            assert!((o.energy.e_qm - e0.e_qm).abs() < 1e-12);
            assert_eq!(o.energy.e_hyb, 0.0);
        }
        assert!(run.delta_e_qm.unwrap().abs() < 1e-12);
    }

    #[test]
    fn window_not_bracketed() {
        let params = ModelParams::with_unit_mass(0.03, 0.0045, 0.2).unwrap();
        let pulse = CouplingSchedule::gaussian_pulse(1.0, 100.0, 20.0).unwrap();
        let run = run_cooling(&init(), &params, &pulse, 150.0, 0.01, 100).unwrap();
        assert_eq!(run.delta_e_qm, None);
        assert!(run.in_window(100.0));
        assert!(!run.in_window(-1.0));
    }
}

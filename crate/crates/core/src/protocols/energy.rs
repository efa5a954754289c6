use crate::dynamics::{CouplingSchedule, HybridSystem};
use crate::entanglement::flip_overlap;
use crate::model::{constraint_value, spin_z, HybridState, ModelParams};
use crate::perturbations::PerturbationMatrix;

/// Energy components of the hybrid at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub e_cl: f64,
    pub e_qm: f64,
    pub e_hyb: f64,
    pub e_pert: f64,
    pub e_total: f64,
}

impl EnergyBreakdown {
    fn from_parts(e_cl: f64, e_qm: f64, e_hyb: f64, e_pert: f64) -> Self {
        Self {
            e_cl,
            e_qm,
            e_hyb,
            e_pert,
            e_total: e_cl + e_qm + e_hyb + e_pert,
        }
    }
}

pub fn energy_breakdown(
    s: &HybridState,
    params: &ModelParams,
    schedule: &CouplingSchedule,
    pert: Option<&PerturbationMatrix>,
) -> EnergyBreakdown {
    let m = params.mass();
    let w = params.omega();
    let c = s.q.as_vector();
    let e_cl = s.p * s.p / (2.0 * m) + 0.5 * m * w * w * s.x * s.x;
    let e_qm = params.omega0() * s.q.expectation(&spin_z());
    let coupling = schedule.coupling_at(s.t, params);
    let e_hyb = params.beta() * coupling * s.x * (c[0].norm_sqr() - c[1].norm_sqr());
    let e_pert = pert.map_or(0.0, |h| s.q.expectation(&h.matrix));
    EnergyBreakdown::from_parts(e_cl, e_qm, e_hyb, e_pert)
}

/// Derived per-sample quantities written next to each trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleObservables {
    pub energy: EnergyBreakdown,
    /// |cᵀ(σ_y⊗σ_y)c| of the unrenormalized amplitudes.
    pub concurrence: f64,
    pub constraint: f64,
}

impl HybridSystem {
    pub fn energy(&self, s: &HybridState) -> EnergyBreakdown {
        energy_breakdown(s, &self.params, &self.schedule, self.perturbation.as_ref())
    }

    pub fn observe(&self, s: &HybridState) -> SampleObservables {
        SampleObservables {
            energy: self.energy(s),
            concurrence: flip_overlap(&s.q).norm(),
            constraint: constraint_value(&s.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{named_state, re, QuantumAmplitudes};
    use approx::assert_abs_diff_eq;

    fn fig1() -> ModelParams {
        ModelParams::with_unit_mass(0.03, 0.0045, 0.2).unwrap()
    }

    #[test]
    fn fig1_initial_energies() {
        let s = HybridState::new(0.0, 0.0, 1.0, named_state("bell_plus").unwrap()).unwrap();
        let e = energy_breakdown(&s, &fig1(), &CouplingSchedule::Constant, None);
        assert_eq!(e.e_cl, 0.5);
        assert_eq!(e.e_qm, 0.0);
        assert_eq!(e.e_hyb, 0.0);
        assert_eq!(e.e_pert, 0.0);
        assert_eq!(e.e_total, 0.5);
    }

    #[test]
    fn singlet_has_no_quantum_energy() {
        let singlet = QuantumAmplitudes::new([re(0.0), re(0.0), re(0.0), re(1.0)]).unwrap();
        for (x, p) in [(0.3, -2.0), (-7.0, 0.1)] {
            let s = HybridState::new(4.0, x, p, singlet).unwrap();
            let e = energy_breakdown(&s, &fig1(), &CouplingSchedule::Constant, None);
            assert_eq!(e.e_qm, 0.0);
            assert_eq!(e.e_hyb, 0.0);
        }
    }

    #[test]
    fn total_is_the_sum() {
        let pert = crate::perturbations::two_qubit_perturbation(0.001, 0.002, 0.003).unwrap();
        let q = QuantumAmplitudes::normalized([re(2.0), re(1.0), re(1.0), re(0.5)]).unwrap();
        let s = HybridState::new(1.0, 0.7, -0.4, q).unwrap();
        let e = energy_breakdown(&s, &fig1(), &CouplingSchedule::Constant, Some(&pert));
        assert_eq!(e.e_total, e.e_cl + e.e_qm + e.e_hyb + e.e_pert);
        assert!(e.e_pert != 0.0);
        assert!(e.e_hyb != 0.0);
    }

    #[test]
    fn decoupled_sectors_keep_their_energies() {
        let params = ModelParams::with_unit_mass(0.03, 0.0045, 0.0).unwrap();
        let sys = HybridSystem::new(params);
        let init = HybridState::new(0.0, 0.5, 1.0, named_state("fig5_state").unwrap()).unwrap();
        let traj = sys.integrate(&init, 500.0, 0.01, 1000).unwrap();
        let e0 = sys.energy(&init);
        for s in &traj.samples {
            let e = sys.energy(s);
            assert_abs_diff_eq!(e.e_cl, e0.e_cl, epsilon = 1e-10);
            assert_abs_diff_eq!(e.e_qm, e0.e_qm, epsilon = 1e-12);
        }
    }
}

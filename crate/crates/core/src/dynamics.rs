//! Coupled equations of motion and the fixed-step RK4 integrator.
//!
//! With the effective q-bit Hamiltonian H(x) = ω₀Ŝ_z + βΩ(t)·x·Ŝ_x (+ H_pert):
//!
//! ```text
//! dx/dt = p/m
//! dp/dt = −mω²x − βΩ(t)(|c₁|² − |c₂|²)
//! dc/dt = −i H(x) c
//! ```
//!
//! Amplitudes are never renormalized; drift is left visible to the
//! invariant checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{re, spin_x, spin_z, HybridState, Mat4, ModelParams, QuantumAmplitudes, Vec4};
use crate::perturbations::PerturbationMatrix;

/// Time dependence of the hybrid coupling frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSchedule {
    /// Ω(t) = Ω.
    Constant,
    /// Ω(t) = A·Ω·exp(−(t − t₀)²/(2σ²)); `amplitude` is in units of Ω.
    GaussianPulse { amplitude: f64, center: f64, width: f64 },
}

impl CouplingSchedule {
    pub fn gaussian_pulse(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("sigma", width, "pulse width must be finite and > 0"));
        }
        if !amplitude.is_finite() || !center.is_finite() {
            return Err(Error::invalid("pulse", format!("A={amplitude}, t0={center}"), "must be finite"));
        }
        Ok(CouplingSchedule::GaussianPulse { amplitude, center, width })
    }

    /// The coupling frequency that replaces Ω in the hybrid term at time `t`.
    pub fn coupling_at(&self, t: f64, params: &ModelParams) -> f64 {
        let base = params.coupling_frequency();
        match *self {
            CouplingSchedule::Constant => base,
            CouplingSchedule::GaussianPulse { amplitude, center, width } => {
                let u = (t - center) / width;
                amplitude * base * (-0.5 * u * u).exp()
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CouplingSchedule::Constant)
    }
}

/// H(x) = ω₀Ŝ_z + βΩ(t)·x·Ŝ_x + H_pert.
pub fn effective_hamiltonian(
    x: f64,
    params: &ModelParams,
    pert: Option<&PerturbationMatrix>,
    coupling: f64,
) -> Mat4 {
    let mut h = spin_z() * re(params.omega0()) + spin_x() * re(params.beta() * coupling * x);
    if let Some(pert) = pert {
        h += pert.matrix;
    }
    h
}

/// βΩ(t)(|c₁|² − |c₂|²), the force the q-bits exert back on the oscillator.
pub fn back_reaction_force(q: &QuantumAmplitudes, params: &ModelParams, coupling: f64) -> f64 {
    let c = q.as_vector();
    params.beta() * coupling * (c[0].norm_sqr() - c[1].norm_sqr())
}

/// Time derivative of a [`HybridState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub dx: f64,
    pub dp: f64,
    pub dc: Vec4,
}

/// The model, its coupling schedule and an optional static perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSystem {
    pub params: ModelParams,
    pub schedule: CouplingSchedule,
    pub perturbation: Option<PerturbationMatrix>,
}

impl HybridSystem {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            schedule: CouplingSchedule::Constant,
            perturbation: None,
        }
    }

    pub fn with_schedule(mut self, schedule: CouplingSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_perturbation(mut self, pert: Option<PerturbationMatrix>) -> Self {
        self.perturbation = pert;
        self
    }

    pub fn coupling_at(&self, t: f64) -> f64 {
        self.schedule.coupling_at(t, &self.params)
    }

    pub fn hamiltonian(&self, x: f64, t: f64) -> Mat4 {
        effective_hamiltonian(x, &self.params, self.perturbation.as_ref(), self.coupling_at(t))
    }

    fn derivative_at(&self, t: f64, x: f64, p: f64, c: &Vec4) -> StateDerivative {
        let coupling = self.coupling_at(t);
        let m = self.params.mass();
        let w = self.params.omega();
        let force = self.params.beta() * coupling * (c[0].norm_sqr() - c[1].norm_sqr());
        let h = effective_hamiltonian(x, &self.params, self.perturbation.as_ref(), coupling);
        StateDerivative {
            dx: p / m,
            dp: -m * w * w * x - force,
            dc: (h * c) * Complex64::new(0.0, -1.0),
        }
    }

    pub fn derivative(&self, s: &HybridState) -> StateDerivative {
        self.derivative_at(s.t, s.x, s.p, s.q.as_vector())
    }

    /// One classical RK4 step of size `h` (negative steps integrate backwards).
    pub fn step(&self, s: &HybridState, h: f64) -> HybridState {
        let (t, x, p, c) = (s.t, s.x, s.p, *s.q.as_vector());
        let half = 0.5 * h;
        let k1 = self.derivative_at(t, x, p, &c);
        let k2 = self.derivative_at(t + half, x + half * k1.dx, p + half * k1.dp, &(c + k1.dc * re(half)));
        let k3 = self.derivative_at(t + half, x + half * k2.dx, p + half * k2.dp, &(c + k2.dc * re(half)));
        let k4 = self.derivative_at(t + h, x + h * k3.dx, p + h * k3.dp, &(c + k3.dc * re(h)));
        let sixth = h / 6.0;
        HybridState {
            t: t + h,
            x: x + sixth * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
            p: p + sixth * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
            q: QuantumAmplitudes::from_vector(c + (k1.dc + k2.dc * re(2.0) + k3.dc * re(2.0) + k4.dc) * re(sixth)),
        }
    }

    /// Takes `steps` steps of size `h` from `init`, calling `observe` after
    /// each one with the step index (1-based) and the new state.
    pub fn propagate<F>(&self, init: &HybridState, h: f64, steps: usize, mut observe: F) -> Result<HybridState>
    where
        F: FnMut(usize, &HybridState),
    {
        let t0 = init.t;
        let mut s = *init;
        for k in 1..=steps {
            s = self.step(&s, h);
            // Times come from the step count, not from accumulated increments.
            s.t = t0 + k as f64 * h;
            if !s.is_finite() {
                return Err(Error::NonFinite { t: s.t });
            }
            observe(k, &s);
        }
        Ok(s)
    }

    /// Integrates from `init` to `init.t + t_max`, keeping the initial state,
    /// every `stride`-th step and the final step.
    pub fn integrate(&self, init: &HybridState, t_max: f64, dt: f64, stride: usize) -> Result<Trajectory> {
        let steps = IntegrationControls::new(t_max, dt, stride)?.steps();
        let mut samples = Vec::with_capacity(steps / stride + 2);
        samples.push(*init);
        self.propagate(init, dt, steps, |k, s| {
            if k % stride == 0 || k == steps {
                samples.push(*s);
            }
        })?;
        Ok(Trajectory {
            system: self.clone(),
            samples,
        })
    }
}

/// Validated (t_max, dt, stride).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationControls {
    pub t_max: f64,
    pub dt: f64,
    pub stride: usize,
}

impl IntegrationControls {
    pub fn new(t_max: f64, dt: f64, stride: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", dt, "must be finite and > 0"));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("t_max", t_max, "must be finite and > 0"));
        }
        if stride == 0 {
            return Err(Error::invalid("stride", stride, "must be >= 1"));
        }
        Ok(Self { t_max, dt, stride })
    }

    /// Number of steps; the final time lands within half a step of t_max.
    pub fn steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }
}

/// Time-derivative of the full state for a given system (free-function form).
pub fn rhs(
    s: &HybridState,
    params: &ModelParams,
    schedule: &CouplingSchedule,
    pert: Option<&PerturbationMatrix>,
) -> StateDerivative {
    HybridSystem {
        params: *params,
        schedule: *schedule,
        perturbation: pert.cloned(),
    }
    .derivative(s)
}

pub fn integrate(
    init: &HybridState,
    params: &ModelParams,
    schedule: &CouplingSchedule,
    pert: Option<&PerturbationMatrix>,
    t_max: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    HybridSystem {
        params: *params,
        schedule: *schedule,
        perturbation: pert.cloned(),
    }
    .integrate(init, t_max, dt, stride)
}

/// Sampled states of one integration, with the system that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub system: HybridSystem,
    pub samples: Vec<HybridState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn last(&self) -> &HybridState {
        self.samples.last().expect("trajectory always holds the initial state")
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dynamics::{HybridSystem, IntegrationControls};
use crate::entanglement::{concurrence_mixed, linear_entropy, TwoQubitDensity};
use crate::error::{Error, Result};
use crate::model::{HybridState, Mat4, QuantumAmplitudes, Vec4, NORM_TOLERANCE};

/// Monte-Carlo ensemble over Gaussian classical initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub trajectories: usize,
    pub x_mean: f64,
    pub p_mean: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub seed: u64,
    pub initial: QuantumAmplitudes,
    pub system: HybridSystem,
    pub controls: IntegrationControls,
    /// Also report the standard error of ρ̄ across trajectories.
    pub with_stderr: bool,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trajectories == 0 {
            return Err(Error::invalid("trajectories", 0, "must be >= 1"));
        }
        for (name, v) in [("sigma_x", self.sigma_x), ("sigma_p", self.sigma_p)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, v, "must be finite and > 0"));
            }
        }
        for (name, v) in [("x_mean", self.x_mean), ("p_mean", self.p_mean)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, v, "must be finite"));
            }
        }
        let n = self.initial.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(())
    }
}

/// Generator for trajectory `index`: stream `index` of ChaCha8 keyed by `seed`.
///
/// Trajectory i sees the same draws whatever M is and whichever worker runs it.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// (x₀, p₀) for each trajectory, x₀ ~ N(x̄, σ_x²) and p₀ ~ N(p̄, σ_p²) independently.
pub fn sample_initial_conditions(spec: &EnsembleSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let nx = Normal::new(spec.x_mean, spec.sigma_x).map_err(|e| Error::invalid("sigma_x", spec.sigma_x, e.to_string()))?;
    let np = Normal::new(spec.p_mean, spec.sigma_p).map_err(|e| Error::invalid("sigma_p", spec.sigma_p, e.to_string()))?;
    Ok((0..spec.trajectories)
        .map(|i| {
            let mut rng = trajectory_rng(spec.seed, i);
            let x = nx.sample(&mut rng);
            let p = np.sample(&mut rng);
            (x, p)
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// ρ̄(t) = (1/M) Σᵢ ρᵢ(t), summed in trajectory order.
    pub densities: Vec<TwoQubitDensity>,
    pub concurrence: Vec<f64>,
    pub linear_entropy: Vec<f64>,
    pub purity: Vec<f64>,
    /// Largest standard error of the ρ̄ entries at each sample (M ≥ 2 only).
    pub rho_stderr: Option<Vec<f64>>,
    pub seed: u64,
    /// Sampled (x₀, p₀); entry i came from [`trajectory_rng`]`(seed, i)`.
    pub initial_conditions: Vec<(f64, f64)>,
}

impl EnsembleResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn sample_steps(steps: usize, stride: usize) -> Vec<usize> {
    (0..=steps).filter(|k| k % stride == 0 || *k == steps).collect()
}

pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    let initial_conditions = sample_initial_conditions(spec)?;
    let IntegrationControls { dt, stride, .. } = spec.controls;
    let steps = spec.controls.steps();
    let grid = sample_steps(steps, stride);

    let runs: Vec<Result<Vec<Vec4>>> = initial_conditions
        .par_iter()
        .enumerate()
        .map(|(index, &(x, p))| {
            let wrap = |e: Error| Error::Ensemble {
                index,
                seed: spec.seed,
                source: Box::new(e),
            };
            let init = HybridState::new(0.0, x, p, spec.initial).map_err(wrap)?;
            let mut amps = Vec::with_capacity(grid.len());
            amps.push(*init.q.as_vector());
            spec.system
                .propagate(&init, dt, steps, |k, s| {
                    if k % stride == 0 || k == steps {
                        amps.push(*s.q.as_vector());
                    }
                })
                .map_err(wrap)?;
            Ok(amps)
        })
        .collect();
    let runs: Vec<Vec<Vec4>> = runs.into_iter().collect::<Result<_>>()?;

    let m = runs.len() as f64;
    let scale = Mat4::from_element(num_complex::Complex64::new(1.0 / m, 0.0));
    let mut densities = Vec::with_capacity(grid.len());
    let mut rho_stderr = (spec.with_stderr && runs.len() > 1).then(|| Vec::with_capacity(grid.len()));
    for j in 0..grid.len() {
        let mut sum = Mat4::zeros();
        for run in &runs {
            sum += run[j] * run[j].adjoint();
        }
        let mean = sum.component_mul(&scale);
        if let Some(errs) = rho_stderr.as_mut() {
            let mut var = [0.0f64; 16];
            for run in &runs {
                let d = run[j] * run[j].adjoint() - mean;
                for (v, z) in var.iter_mut().zip(d.iter()) {
                    *v += z.norm_sqr();
                }
            }
            let worst = var.iter().fold(0.0f64, |a, &v| a.max(v));
            errs.push((worst / (m - 1.0) / m).sqrt());
        }
        densities.push(TwoQubitDensity::from_matrix_unchecked(mean));
    }

    let concurrence = densities.par_iter().map(concurrence_mixed).collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult {
        times: grid.iter().map(|&k| k as f64 * dt).collect(),
        linear_entropy: densities.iter().map(linear_entropy).collect(),
        purity: densities.iter().map(TwoQubitDensity::purity).collect(),
        densities,
        concurrence,
        rho_stderr,
        seed: spec.seed,
        initial_conditions,
    })
}

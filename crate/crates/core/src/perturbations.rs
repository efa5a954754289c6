//! External q-bit perturbations and Poisson brackets of the registered
//! phase-space observables.
//!
//! Brackets are taken in oscillator-expansion variables: the canonical pairs
//! are (X_α, P_α) with X_α + iP_α = √2·c_α, together with (x, p). In those
//! variables a quantum expectation is ⟨A⟩ = ½ z†Az, whose gradient is
//! ∂/∂X = Re(Az), ∂/∂P = Im(Az).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{re, sigma_yy, spin_x, spin_z, ModelParams, Mat4, QuantumAmplitudes, HybridState, SPIN_X_DIAGONAL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    /// I ⊗ (ω₁σ_x + ω₂σ_y + ω₃σ_z), acting on q-bit B only.
    SingleQubit,
    /// ω₁σ_x⊗σ_x + ω₂σ_y⊗σ_y + ω₃σ_z⊗σ_z.
    TwoQubit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMatrix {
    pub matrix: Mat4,
    pub kind: PerturbationKind,
    pub weights: [f64; 3],
}

/// I ⊗ σ_x in the φ basis.
pub fn id_sigma_x() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = re(1.0);
    m[(1, 1)] = re(-1.0);
    m[(2, 3)] = re(-1.0);
    m[(3, 2)] = re(-1.0);
    m
}

/// I ⊗ σ_y in the φ basis (|−⟩ = (|0⟩ − |1⟩)/√2 phase convention).
pub fn id_sigma_y() -> Mat4 {
    let i = Complex64::i() * FRAC_1_SQRT_2;
    let mut m = Mat4::zeros();
    m[(0, 2)] = i;
    m[(0, 3)] = i;
    m[(1, 2)] = -i;
    m[(1, 3)] = i;
    m[(2, 0)] = -i;
    m[(2, 1)] = i;
    m[(3, 0)] = -i;
    m[(3, 1)] = -i;
    m
}

/// I ⊗ σ_z in the φ basis. σ_z flips |±⟩, so this maps |++⟩ to
/// |+−⟩ = (φ₃ + φ₄)/√2.
pub fn id_sigma_z() -> Mat4 {
    let s = re(FRAC_1_SQRT_2);
    let mut m = Mat4::zeros();
    m[(0, 2)] = s;
    m[(0, 3)] = s;
    m[(1, 2)] = s;
    m[(1, 3)] = -s;
    m[(2, 0)] = s;
    m[(2, 1)] = s;
    m[(3, 0)] = s;
    m[(3, 1)] = -s;
    m
}

/// σ_x ⊗ σ_x in the φ basis: diag(1, 1, −1, −1).
pub fn sigma_xx() -> Mat4 {
    Mat4::from_diagonal(&nalgebra::Vector4::new(re(1.0), re(1.0), re(-1.0), re(-1.0)))
}

/// σ_z ⊗ σ_z in the φ basis.
pub fn sigma_zz() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 1)] = re(1.0);
    m[(1, 0)] = re(1.0);
    m[(2, 2)] = re(1.0);
    m[(3, 3)] = re(-1.0);
    m
}

fn check_weights(weights: [f64; 3]) -> Result<()> {
    for (k, w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::invalid(format!("omega{}", k + 1), w, "must be finite"));
        }
    }
    Ok(())
}

pub fn single_qubit_perturbation(w1: f64, w2: f64, w3: f64) -> Result<PerturbationMatrix> {
    check_weights([w1, w2, w3])?;
    Ok(PerturbationMatrix {
        matrix: id_sigma_x() * re(w1) + id_sigma_y() * re(w2) + id_sigma_z() * re(w3),
        kind: PerturbationKind::SingleQubit,
        weights: [w1, w2, w3],
    })
}

pub fn two_qubit_perturbation(w1: f64, w2: f64, w3: f64) -> Result<PerturbationMatrix> {
    check_weights([w1, w2, w3])?;
    Ok(PerturbationMatrix {
        matrix: sigma_xx() * re(w1) + sigma_yy() * re(w2) + sigma_zz() * re(w3),
        kind: PerturbationKind::TwoQubit,
        weights: [w1, w2, w3],
    })
}

impl PerturbationMatrix {
    pub fn new(kind: PerturbationKind, weights: [f64; 3]) -> Result<Self> {
        let [w1, w2, w3] = weights;
        match kind {
            PerturbationKind::SingleQubit => single_qubit_perturbation(w1, w2, w3),
            PerturbationKind::TwoQubit => two_qubit_perturbation(w1, w2, w3),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0)
    }
}

/// A point of phase space in canonical oscillator-expansion variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
    pub big_x: [f64; 4],
    pub big_p: [f64; 4],
}

impl PhasePoint {
    pub fn from_state(s: &HybridState) -> Self {
        let z = s.q.oscillator_variables();
        Self {
            x: s.x,
            p: s.p,
            big_x: z.map(|z| z.re),
            big_p: z.map(|z| z.im),
        }
    }

    pub fn z(&self) -> [Complex64; 4] {
        std::array::from_fn(|a| Complex64::new(self.big_x[a], self.big_p[a]))
    }

    /// The normalized amplitudes c = z/√2 (not re-normalized).
    pub fn amplitudes(&self) -> QuantumAmplitudes {
        let z = self.z();
        QuantumAmplitudes::from_vector(nalgebra::Vector4::from(z.map(|z| z * FRAC_1_SQRT_2)))
    }

    /// Coordinates in the order (x, X₁..X₄) and momenta (p, P₁..P₄).
    fn coordinate(&mut self, k: usize) -> &mut f64 {
        match k {
            0 => &mut self.x,
            1..=4 => &mut self.big_x[k - 1],
            5 => &mut self.p,
            _ => &mut self.big_p[k - 6],
        }
    }

    /// Mutable access to canonical coordinate `k` in the flattened order
    /// (x, X₁, X₂, X₃, X₄, p, P₁, P₂, P₃, P₄).
    pub fn component_mut(&mut self, k: usize) -> &mut f64 {
        assert!(k < 10, "phase-space index {k} out of range");
        self.coordinate(k)
    }
}

/// Partial derivatives of an observable with respect to every canonical variable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseGradient {
    pub dx: f64,
    pub dp: f64,
    pub d_big_x: [f64; 4],
    pub d_big_p: [f64; 4],
}

impl PhaseGradient {
    /// Flattened in the same order as [`PhasePoint::component_mut`].
    pub fn flatten(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[0] = self.dx;
        out[1..5].copy_from_slice(&self.d_big_x);
        out[5] = self.dp;
        out[6..10].copy_from_slice(&self.d_big_p);
        out
    }

    fn add(mut self, other: &PhaseGradient) -> Self {
        self.dx += other.dx;
        self.dp += other.dp;
        for a in 0..4 {
            self.d_big_x[a] += other.d_big_x[a];
            self.d_big_p[a] += other.d_big_p[a];
        }
        self
    }
}

/// Everything the registered observables need besides the phase point.
#[derive(Debug, Clone, Copy)]
pub struct BracketContext {
    pub params: ModelParams,
    /// Instantaneous coupling frequency Ω(t); Ω for a constant schedule.
    pub coupling: f64,
}

impl BracketContext {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            coupling: params.coupling_frequency(),
        }
    }

    fn hybrid_strength(&self) -> f64 {
        self.params.beta() * self.coupling
    }
}

/// The observables the bracket evaluator knows closed-form gradients for.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// H_cl = p²/2m + mω²x²/2.
    ClassicalEnergy,
    /// H_qm = ω₀⟨Ŝ_z⟩.
    QuantumEnergy,
    /// I_hyb = βΩ x ⟨Ŝ_x⟩.
    HybridInteraction,
    /// ⟨H_pert⟩ for any perturbation matrix.
    Perturbation(PerturbationMatrix),
    /// λ = C², the squared pure-state concurrence |cᵀ(σ_y⊗σ_y)c|².
    ConcurrenceSquared,
    /// 𝒞 = Σ(X_α² + P_α²).
    Constraint,
    /// Back-reaction force F = βΩ⟨Ŝ_x⟩ = (βΩ/2)(X₁² + P₁² − X₂² − P₂²).
    BackReactionForce,
    Sum(Vec<Observable>),
}

impl Observable {
    /// H_qm + I_hyb, the quantum part of the hybrid Hamiltonian function.
    pub fn quantum_hamiltonian() -> Self {
        Observable::Sum(vec![Observable::QuantumEnergy, Observable::HybridInteraction])
    }

    pub fn value(&self, s: &PhasePoint, ctx: &BracketContext) -> f64 {
        let params = &ctx.params;
        match self {
            Observable::ClassicalEnergy => {
                let m = params.mass();
                let w = params.omega();
                s.p * s.p / (2.0 * m) + m * w * w * s.x * s.x / 2.0
            }
            Observable::QuantumEnergy => params.omega0() * half_quadratic_form(&spin_z(), s),
            Observable::HybridInteraction => ctx.hybrid_strength() * s.x * half_quadratic_form(&spin_x(), s),
            Observable::Perturbation(pert) => half_quadratic_form(&pert.matrix, s),
            Observable::ConcurrenceSquared => flip_form(s).norm_sqr(),
            Observable::Constraint => (0..4).map(|a| s.big_x[a].powi(2) + s.big_p[a].powi(2)).sum(),
            Observable::BackReactionForce => ctx.hybrid_strength() * half_quadratic_form(&spin_x(), s),
            Observable::Sum(terms) => terms.iter().map(|t| t.value(s, ctx)).sum(),
        }
    }

    pub fn gradient(&self, s: &PhasePoint, ctx: &BracketContext) -> PhaseGradient {
        let params = &ctx.params;
        match self {
            Observable::ClassicalEnergy => PhaseGradient {
                dx: params.mass() * params.omega().powi(2) * s.x,
                dp: s.p / params.mass(),
                ..Default::default()
            },
            Observable::QuantumEnergy => scaled(quadratic_gradient(&spin_z(), s), params.omega0()),
            Observable::HybridInteraction => {
                let g = ctx.hybrid_strength();
                let mut grad = PhaseGradient::default();
                for a in 0..4 {
                    let e = SPIN_X_DIAGONAL[a];
                    grad.d_big_x[a] = g * s.x * e * s.big_x[a];
                    grad.d_big_p[a] = g * s.x * e * s.big_p[a];
                }
                grad.dx = g * half_quadratic_form(&spin_x(), s);
                grad
            }
            Observable::Perturbation(pert) => quadratic_gradient(&pert.matrix, s),
            Observable::ConcurrenceSquared => {
                // b = ½ zᵀYz is holomorphic with ∂b/∂z = Yz; λ = |b|².
                let b = flip_form(s);
                let yz = sigma_yy() * nalgebra::Vector4::from(s.z());
                let mut grad = PhaseGradient::default();
                for a in 0..4 {
                    let w = b.conj() * yz[a];
                    grad.d_big_x[a] = 2.0 * w.re;
                    grad.d_big_p[a] = -2.0 * w.im;
                }
                grad
            }
            Observable::Constraint => PhaseGradient {
                d_big_x: s.big_x.map(|v| 2.0 * v),
                d_big_p: s.big_p.map(|v| 2.0 * v),
                ..Default::default()
            },
            Observable::BackReactionForce => {
                let g = ctx.hybrid_strength();
                PhaseGradient {
                    d_big_x: std::array::from_fn(|a| g * SPIN_X_DIAGONAL[a] * s.big_x[a]),
                    d_big_p: std::array::from_fn(|a| g * SPIN_X_DIAGONAL[a] * s.big_p[a]),
                    ..Default::default()
                }
            }
            Observable::Sum(terms) => terms
                .iter()
                .fold(PhaseGradient::default(), |acc, t| acc.add(&t.gradient(s, ctx))),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::ClassicalEnergy => f.write_str("h_cl"),
            Observable::QuantumEnergy => f.write_str("h_qm"),
            Observable::HybridInteraction => f.write_str("i_hyb"),
            Observable::Perturbation(p) => match p.kind {
                PerturbationKind::SingleQubit => write!(f, "h_pert1{:?}", p.weights),
                PerturbationKind::TwoQubit => write!(f, "h_pert2{:?}", p.weights),
            },
            Observable::ConcurrenceSquared => f.write_str("lambda"),
            Observable::Constraint => f.write_str("constraint"),
            Observable::BackReactionForce => f.write_str("force"),
            Observable::Sum(terms) => {
                let names: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                f.write_str(&names.join("+"))
            }
        }
    }
}

/// Parses the parameter-free observables by name; `a+b` builds a sum.
/// Perturbations carry weights and are constructed directly.
impl FromStr for Observable {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        if name.contains('+') {
            let terms = name.split('+').map(|t| t.trim().parse()).collect::<Result<Vec<_>>>()?;
            return Ok(Observable::Sum(terms));
        }
        Ok(match name.trim() {
            "h_cl" => Observable::ClassicalEnergy,
            "h_qm" => Observable::QuantumEnergy,
            "i_hyb" => Observable::HybridInteraction,
            "lambda" => Observable::ConcurrenceSquared,
            "constraint" => Observable::Constraint,
            "force" => Observable::BackReactionForce,
            other => return Err(Error::UnknownObservable(other.to_string())),
        })
    }
}

/// ½ z†Az.
fn half_quadratic_form(a: &Mat4, s: &PhasePoint) -> f64 {
    let z = nalgebra::Vector4::from(s.z());
    0.5 * z.dotc(&(a * z)).re
}

fn quadratic_gradient(a: &Mat4, s: &PhasePoint) -> PhaseGradient {
    let az = a * nalgebra::Vector4::from(s.z());
    PhaseGradient {
        d_big_x: std::array::from_fn(|k| az[k].re),
        d_big_p: std::array::from_fn(|k| az[k].im),
        ..Default::default()
    }
}

fn scaled(mut g: PhaseGradient, k: f64) -> PhaseGradient {
    g.dx *= k;
    g.dp *= k;
    for a in 0..4 {
        g.d_big_x[a] *= k;
        g.d_big_p[a] *= k;
    }
    g
}

/// ½ zᵀ(σ_y⊗σ_y)z, equal to cᵀ(σ_y⊗σ_y)c for the normalized amplitudes.
fn flip_form(s: &PhasePoint) -> Complex64 {
    let z = nalgebra::Vector4::from(s.z());
    (z.transpose() * sigma_yy() * z)[(0, 0)] * 0.5
}

/// {f, g} = Σ (∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q) over (x, p) and every (X_α, P_α).
pub fn poisson_bracket(f: &Observable, g: &Observable, s: &PhasePoint, ctx: &BracketContext) -> f64 {
    let df = f.gradient(s, ctx);
    let dg = g.gradient(s, ctx);
    let mut sum = df.dx * dg.dp - df.dp * dg.dx;
    for a in 0..4 {
        sum += df.d_big_x[a] * dg.d_big_p[a] - df.d_big_p[a] * dg.d_big_x[a];
    }
    sum
}

/// Closed form of {⟨ω₁σ_x⊗σ_x + ω₂σ_y⊗σ_y + ω₃σ_z⊗σ_z⟩, F}:
/// 2βΩ(ω₂ − ω₃)(X₁P₂ − X₂P₁). Only σ_y⊗σ_y and σ_z⊗σ_z fail to commute
/// with Ŝ_x, and they enter with opposite signs on the φ₁φ₂ block.
pub fn two_qubit_force_bracket(weights: [f64; 3], s: &PhasePoint, ctx: &BracketContext) -> f64 {
    let [_, w2, w3] = weights;
    2.0 * ctx.hybrid_strength() * (w2 - w3) * (s.big_x[0] * s.big_p[1] - s.big_x[1] * s.big_p[0])
}

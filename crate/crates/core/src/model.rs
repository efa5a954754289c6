//! Model constants, the φ basis and the phase-space state.
//!
//! The quantum sector lives in ℂ⁴ spanned by the φ basis, built from the
//! σ_x eigenstates |±⟩ of each q-bit:
//!
//! ```text
//! φ₁ = |++⟩,  φ₂ = |−−⟩,  φ₃ = (|+−⟩ + |−+⟩)/√2,  φ₄ = (|+−⟩ − |−+⟩)/√2
//! ```
//!
//! Amplitudes are stored normalized, Σ|c_α|² = 1. The canonical pairs of the
//! oscillator expansion are recovered as `X_α + iP_α = z_α = √2·c_α`, so the
//! constraint Σ(X_α² + P_α²) = 2 is the same statement as unit norm.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<Complex64>;
pub type Vec4 = Vector4<Complex64>;

/// Relative tolerance for accepting externally supplied amplitudes as normalized.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[inline]
pub(crate) fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn real_matrix(rows: [[f64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| re(rows[i][j]))
}

/// Ŝ_z = (σ_z^A + σ_z^B)/2 in the φ basis.
pub fn spin_z() -> Mat4 {
    let s = FRAC_1_SQRT_2;
    real_matrix([
        [0.0, 0.0, s, 0.0],
        [0.0, 0.0, s, 0.0],
        [s, s, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
}

/// Ŝ_x = (σ_x^A + σ_x^B)/2 in the φ basis: diag(1, −1, 0, 0).
pub fn spin_x() -> Mat4 {
    Mat4::from_diagonal(&Vec4::new(re(1.0), re(-1.0), re(0.0), re(0.0)))
}

/// Diagonal of [`spin_x`], the weights E_α of the hybrid interaction.
pub const SPIN_X_DIAGONAL: [f64; 4] = [1.0, -1.0, 0.0, 0.0];

/// σ_y ⊗ σ_y in the φ basis.
pub fn sigma_yy() -> Mat4 {
    real_matrix([
        [0.0, -1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ])
}

/// Physical constants of the hybrid model.
///
/// The coupling frequency Ω = ω·√(mω) and the effective coupling λ = βω are
/// derived on construction and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    mass: f64,
    omega: f64,
    omega0: f64,
    beta: f64,
    coupling_frequency: f64,
    effective_coupling: f64,
}

impl ModelParams {
    pub fn new(mass: f64, omega: f64, omega0: f64, beta: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", mass, "must be finite and > 0"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", omega, "must be finite and > 0"));
        }
        if !(omega0.is_finite() && omega0 >= 0.0) {
            return Err(Error::invalid("omega0", omega0, "must be finite and >= 0"));
        }
        if !beta.is_finite() {
            return Err(Error::invalid("beta", beta, "must be finite"));
        }
        Ok(Self {
            mass,
            omega,
            omega0,
            beta,
            coupling_frequency: omega * (mass * omega).sqrt(),
            effective_coupling: beta * omega,
        })
    }

    /// Unit mass, the convention used for every figure configuration.
    pub fn with_unit_mass(omega: f64, omega0: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, omega, omega0, beta)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// Ω = ω·√(mω).
    pub fn coupling_frequency(&self) -> f64 {
        self.coupling_frequency
    }
    /// λ = βω.
    pub fn effective_coupling(&self) -> f64 {
        self.effective_coupling
    }
}

/// The four complex coefficients of the two-q-bit state in the φ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumAmplitudes {
    c: Vec4,
}

impl QuantumAmplitudes {
    /// Accepts amplitudes that are already normalized within [`NORM_TOLERANCE`].
    pub fn new(c: [Complex64; 4]) -> Result<Self> {
        let q = Self::from_vector(Vec4::from(c));
        check_finite(&q.c)?;
        let n = q.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(q)
    }

    /// Normalizes arbitrary nonzero coefficients.
    pub fn normalized(c: [Complex64; 4]) -> Result<Self> {
        let v = Vec4::from(c);
        check_finite(&v)?;
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::invalid("amplitudes", "0", "must not all vanish"));
        }
        Ok(Self::from_vector(v.unscale(n)))
    }

    /// Wraps a vector without checking its norm. Integration output and
    /// diagnostics of deliberately unnormalized input go through here.
    pub fn from_vector(c: Vec4) -> Self {
        Self { c }
    }

    /// Builds amplitudes from coefficients in the σ_x product basis
    /// `(|++⟩, |+−⟩, |−+⟩, |−−⟩)`, normalizing the result.
    pub fn from_product_basis(pp: Complex64, pm: Complex64, mp: Complex64, mm: Complex64) -> Result<Self> {
        let s = FRAC_1_SQRT_2;
        Self::normalized([pp, mm, (pm + mp) * s, (pm - mp) * s])
    }

    pub fn as_vector(&self) -> &Vec4 {
        &self.c
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.c[0], self.c[1], self.c[2], self.c[3]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.norm_squared()
    }

    /// Oscillator-expansion variables z_α = X_α + iP_α = √2·c_α.
    pub fn oscillator_variables(&self) -> [Complex64; 4] {
        let r = std::f64::consts::SQRT_2;
        [self.c[0] * r, self.c[1] * r, self.c[2] * r, self.c[3] * r]
    }

    /// ⟨ψ|A|ψ⟩ for a Hermitian A (imaginary round-off discarded).
    pub fn expectation(&self, a: &Mat4) -> f64 {
        self.c.dotc(&(a * self.c)).re
    }
}

fn check_finite(v: &Vec4) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("amplitudes", format!("{:?}", v.as_slice()), "must be finite"))
    }
}

/// Σ(X_α² + P_α²) in oscillator-expansion variables, i.e. 2·Σ|c_α|².
pub fn constraint_value(q: &QuantumAmplitudes) -> f64 {
    2.0 * q.norm_sqr()
}

/// One point of the full phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridState {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub q: QuantumAmplitudes,
}

impl HybridState {
    pub fn new(t: f64, x: f64, p: f64, q: QuantumAmplitudes) -> Result<Self> {
        for (name, v) in [("t", t), ("x", x), ("p", p)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, v, "must be finite"));
            }
        }
        let n = q.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: n });
        }
        Ok(Self { t, x, p, q })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.p.is_finite()
            && self.q.c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Catalog of named initial q-bit states, all read in the σ_x product basis.
pub const STATE_CATALOG: [&str; 6] = [
    "bell_plus",
    "bell_i",
    "prod_pm",
    "triplet0",
    "fig5_state",
    "fig6_state",
];

/// Looks up a named initial state.
///
/// | name         | state                                         |
/// |--------------|-----------------------------------------------|
/// | `bell_plus`  | (\|++⟩ + \|−−⟩)/√2                            |
/// | `bell_i`     | (\|++⟩ + i\|−−⟩)/√2                           |
/// | `prod_pm`    | \|+−⟩                                         |
/// | `triplet0`   | (\|+−⟩ + \|−+⟩)/√2                            |
/// | `fig5_state` | (\|+−⟩ + \|−+⟩)/√6 + (\|−−⟩ + \|++⟩)/√3       |
/// | `fig6_state` | (−\|++⟩ − \|−−⟩ + \|+−⟩ + \|−+⟩)/2            |
pub fn named_state(name: &str) -> Result<QuantumAmplitudes> {
    let one = re(1.0);
    let zero = re(0.0);
    let (pp, pm, mp, mm) = match name {
        "bell_plus" => (one, zero, zero, one),
        "bell_i" => (one, zero, zero, Complex64::i()),
        "prod_pm" => (zero, one, zero, zero),
        "triplet0" => (zero, one, one, zero),
        "fig5_state" => {
            let a = re(1.0 / 6f64.sqrt());
            let b = re(1.0 / 3f64.sqrt());
            (b, a, a, b)
        }
        "fig6_state" => (-one, one, one, -one),
        _ => {
            return Err(Error::UnknownState {
                name: name.to_string(),
                valid: STATE_CATALOG.join(", "),
            })
        }
    };
    QuantumAmplitudes::from_product_basis(pp, pm, mp, mm)
}

//! Two-q-bit density matrices and entanglement measures.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::eigen::eigenvalues;
use crate::error::{Error, Result};
use crate::model::{sigma_yy, Mat4, QuantumAmplitudes, NORM_TOLERANCE};

/// Imaginary parts of the ρρ̃ spectrum below this are discarded.
pub const SPECTRUM_IMAG_TOLERANCE: f64 = 1e-9;
/// Negative pivots of ρ above −this are treated as zero.
pub const SPECTRUM_NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// Pivots below this fraction of tr ρ end the factorization of ρ.
pub const RANK_TOLERANCE: f64 = 1e-14;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-10;
const PSD_TOLERANCE: f64 = 1e-10;

/// A 4×4 density matrix in the φ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity {
    rho: Mat4,
}

impl TwoQubitDensity {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Mat4) -> Result<Self> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity {
                reason: format!("not Hermitian (max |rho - rho^H| = {herm:e})"),
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity {
                reason: format!("trace is {tr}, expected 1"),
            });
        }
        let min_eig = eigenvalues(&rho)?.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::InvalidDensity {
                reason: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        Ok(Self { rho })
    }

    /// Wraps a matrix known to be a valid density by construction
    /// (a pure projector or an average of them).
    pub(crate) fn from_matrix_unchecked(rho: Mat4) -> Self {
        Self { rho }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Mat4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ.
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Convex combination `w·self + (1 − w)·other`.
    pub fn mix(&self, other: &TwoQubitDensity, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange { what: "mixing weight", value: w });
        }
        Ok(Self {
            rho: self.rho * Complex64::new(w, 0.0) + other.rho * Complex64::new(1.0 - w, 0.0),
        })
    }
}

/// ρ = |ψ⟩⟨ψ| with entries ρ[β][α] = c_β·c̄_α.
pub fn density_from_amplitudes(q: &QuantumAmplitudes) -> TwoQubitDensity {
    let c = q.as_vector();
    TwoQubitDensity {
        rho: c * c.adjoint(),
    }
}

/// ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
pub fn spin_flip(rho: &TwoQubitDensity) -> Mat4 {
    let y = sigma_yy();
    y * rho.rho.conjugate() * y
}

fn check_normalized(q: &QuantumAmplitudes) -> Result<()> {
    let n = q.norm_sqr();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr: n });
    }
    Ok(())
}

/// |⟨ψ|ψ̃⟩| = |cᵀ(σ_y⊗σ_y)c| = |−2c₁c₂ + c₃² − c₄²|.
pub fn concurrence_pure(q: &QuantumAmplitudes) -> Result<f64> {
    check_normalized(q)?;
    Ok(flip_overlap(q).norm())
}

/// cᵀ(σ_y⊗σ_y)c, the complex overlap whose modulus is the concurrence.
pub fn flip_overlap(q: &QuantumAmplitudes) -> Complex64 {
    let c = q.as_vector();
    -(c[0] * c[1]) * 2.0 + c[2] * c[2] - c[3] * c[3]
}

/// Wootters concurrence max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄), λ the spectrum of ρρ̃.
///
/// With ρ = WW† the √λᵢ are the singular values of τ = Wᵀ(σ_y⊗σ_y)W, read off
/// as the eigenvalues ±sᵢ of the Hermitian embedding [[0, τ], [τ†, 0]]. This
/// avoids square roots of roundoff-level eigenvalues of the non-Hermitian ρρ̃.
pub fn concurrence_mixed(rho: &TwoQubitDensity) -> Result<f64> {
    let s = flip_singular_values(rho)?;
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// √λᵢ in descending order, λᵢ the eigenvalues of ρρ̃.
pub fn flip_singular_values(rho: &TwoQubitDensity) -> Result<[f64; 4]> {
    let w = psd_factor(&rho.rho)?;
    let tau = w.transpose() * sigma_yy() * w;
    let mut embed = SMatrix::<Complex64, 8, 8>::zeros();
    embed.fixed_view_mut::<4, 4>(0, 4).copy_from(&tau);
    embed.fixed_view_mut::<4, 4>(4, 0).copy_from(&tau.adjoint());
    let spectrum = eigenvalues(&embed)?;
    if spectrum.iter().any(|l| l.im.abs() > SPECTRUM_IMAG_TOLERANCE) {
        return Err(Error::DegenerateSpectrum {
            spectrum: spectrum.to_vec(),
        });
    }
    let mut values = spectrum.map(|l| l.re);
    values.sort_by(|a, b| b.total_cmp(a));
    Ok([values[0], values[1], values[2], values[3]].map(|v| v.max(0.0)))
}

/// Pivoted Cholesky factor W (columns beyond the numerical rank are zero).
fn psd_factor(rho: &Mat4) -> Result<Mat4> {
    let tol = RANK_TOLERANCE * rho.trace().re.abs();
    let mut a = *rho;
    let mut w = Mat4::zeros();
    for col in 0..4 {
        let (k, d) = (0..4)
            .map(|i| (i, a[(i, i)].re))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("four diagonal entries");
        if d < -SPECTRUM_NEGATIVITY_TOLERANCE {
            return Err(Error::InvalidDensity {
                reason: format!("negative pivot {d:e} while factoring"),
            });
        }
        if d <= tol {
            break;
        }
        let v = a.column(k) / Complex64::new(d.sqrt(), 0.0);
        a -= v * v.adjoint();
        w.set_column(col, &v);
    }
    Ok(w)
}

/// Binary entropy h(x) = −x log₂x − (1−x) log₂(1−x), with h(0) = h(1) = 0.
fn binary_entropy(x: f64) -> f64 {
    let term = |v: f64| if v <= 0.0 { 0.0 } else { -v * v.log2() };
    term(x) + term(1.0 - x)
}

/// E(C) = h((1 + √(1 − C²))/2).
pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=1.0 + SLACK).contains(&concurrence) {
        return Err(Error::OutOfRange {
            what: "concurrence",
            value: concurrence,
        });
    }
    let c = concurrence.clamp(0.0, 1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

/// (4/3)(1 − tr ρ²), normalized so the maximally mixed state gives 1.
pub fn linear_entropy(rho: &TwoQubitDensity) -> f64 {
    4.0 / 3.0 * (1.0 - rho.purity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{named_state, re, Vec4};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn diag(d: [f64; 4]) -> TwoQubitDensity {
        TwoQubitDensity::new(Mat4::from_diagonal(&Vec4::new(re(d[0]), re(d[1]), re(d[2]), re(d[3])))).unwrap()
    }

    fn amps(c: [Complex64; 4]) -> QuantumAmplitudes {
        QuantumAmplitudes::new(c).unwrap()
    }

    #[test]
    fn density_examples() {
        let rho = density_from_amplitudes(&amps([re(1.0), re(0.0), re(0.0), re(0.0)]));
        assert_eq!(rho, diag([1.0, 0.0, 0.0, 0.0]));

        let rho = density_from_amplitudes(&named_state("bell_plus").unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i < 2 && j < 2 { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(rho.matrix()[(i, j)].re, want, epsilon = 1e-15);
                assert_abs_diff_eq!(rho.matrix()[(i, j)].im, 0.0);
            }
        }
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(TwoQubitDensity::new(Mat4::identity()).is_err());
        let mut m = Mat4::identity() * re(0.25);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(TwoQubitDensity::new(m).is_err());
        let bad = Mat4::from_diagonal(&Vec4::new(re(1.5), re(-0.5), re(0.0), re(0.0)));
        assert!(TwoQubitDensity::new(bad).is_err());
    }

    #[test]
    fn spin_flip_examples() {
        let flipped = spin_flip(&diag([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(flipped, *diag([0.0, 1.0, 0.0, 0.0]).matrix());

        let mixed = TwoQubitDensity::maximally_mixed();
        assert_eq!(spin_flip(&mixed), *mixed.matrix());

        // Hand multiplication: Y·(½ on the φ₁φ₂ block)·Y returns the same block.
        let bell = density_from_amplitudes(&named_state("bell_plus").unwrap());
        let mut expected = Mat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                expected[(i, j)] = re(0.5);
            }
        }
        assert!((spin_flip(&bell) - expected).norm() < 1e-15);
    }

    #[test]
    fn spin_flip_of_pure_state_matches_amplitude_pattern() {
        let q = QuantumAmplitudes::normalized([
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
        ])
        .unwrap();
        let c = q.components();
        let f = spin_flip(&density_from_amplitudes(&q));
        assert!((f[(0, 0)] - re(c[1].norm_sqr())).norm() < 1e-15);
        assert!((f[(1, 1)] - re(c[0].norm_sqr())).norm() < 1e-15);
        assert!((f[(0, 1)] - c[1].conj() * c[0]).norm() < 1e-15);
        assert!((f[(0, 2)] + c[1].conj() * c[2]).norm() < 1e-15);
        assert!((f[(2, 3)] + c[2].conj() * c[3]).norm() < 1e-15);
    }

    #[test]
    fn pure_concurrence_examples() {
        let s = FRAC_1_SQRT_2;
        assert_abs_diff_eq!(concurrence_pure(&named_state("bell_plus").unwrap()).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(concurrence_pure(&amps([re(1.0), re(0.0), re(0.0), re(0.0)])).unwrap(), 0.0);
        assert_eq!(concurrence_pure(&amps([re(0.0), re(0.0), re(0.0), re(1.0)])).unwrap(), 1.0);
        let fig2 = amps([re(s), Complex64::new(0.0, s), re(0.0), re(0.0)]);
        assert_abs_diff_eq!(concurrence_pure(&fig2).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            concurrence_mixed(&density_from_amplitudes(&fig2)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(concurrence_pure(&named_state("prod_pm").unwrap()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pure_concurrence_rejects_unnormalized() {
        let q = QuantumAmplitudes::from_vector(Vec4::new(re(0.5), re(0.0), re(0.0), re(0.0)));
        assert!(matches!(concurrence_pure(&q), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn mixed_concurrence_examples() {
        let bell = density_from_amplitudes(&named_state("bell_plus").unwrap());
        assert_abs_diff_eq!(concurrence_mixed(&bell).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(concurrence_mixed(&TwoQubitDensity::maximally_mixed()).unwrap(), 0.0);
    }

    #[test]
    fn werner_family() {
        // Oracle: ρ = w|Φ⁺⟩⟨Φ⁺| + (1−w)I/4 is flip-invariant, so ρρ̃ = ρ² with
        // eigenvalues ((1+3w)/4)² and ((1−w)/4)² (×3), giving max(0, (3w−1)/2).
        let bell = density_from_amplitudes(&named_state("bell_plus").unwrap());
        for w in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let rho = bell.mix(&TwoQubitDensity::maximally_mixed(), w).unwrap();
            let oracle = ((3.0 * w - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence_mixed(&rho).unwrap(), oracle, epsilon = 1e-9);
        }
        let rho = bell.mix(&TwoQubitDensity::maximally_mixed(), 0.5).unwrap();
        assert_abs_diff_eq!(concurrence_mixed(&rho).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn formation_examples() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(entanglement_of_formation(1.0).unwrap(), 1.0, epsilon = 1e-15);
        // h(0.9) = −0.9 log₂0.9 − 0.1 log₂0.1, evaluated at 30 digits.
        assert_abs_diff_eq!(entanglement_of_formation(0.6).unwrap(), 0.468_995_593_589_281_2, epsilon = 1e-14);
        assert!(entanglement_of_formation(1.1).is_err());
        assert!(entanglement_of_formation(-0.5).is_err());
        assert!(entanglement_of_formation(f64::NAN).is_err());
        assert!(entanglement_of_formation(1.0 + 1e-12).is_ok());
    }

    #[test]
    fn linear_entropy_examples() {
        let pure = density_from_amplitudes(&named_state("fig6_state").unwrap());
        assert_abs_diff_eq!(linear_entropy(&pure), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(linear_entropy(&TwoQubitDensity::maximally_mixed()), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(linear_entropy(&diag([0.5, 0.5, 0.0, 0.0])), 2.0 / 3.0, epsilon = 1e-15);
    }

    fn arb_state() -> impl Strategy<Value = QuantumAmplitudes> {
        prop::array::uniform8(-1.0f64..1.0)
            .prop_filter("nonzero", |v| v.iter().map(|a| a * a).sum::<f64>() > 1e-4)
            .prop_map(|v| {
                QuantumAmplitudes::normalized(std::array::from_fn(|a| Complex64::new(v[a], v[a + 4]))).unwrap()
            })
    }

    proptest! {
        #[test]
        fn pure_and_mixed_routes_agree(q in arb_state()) {
            let pure = concurrence_pure(&q).unwrap();
            let mixed = concurrence_mixed(&density_from_amplitudes(&q)).unwrap();
            prop_assert!((pure - mixed).abs() < 1e-9, "{pure} vs {mixed}");
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pure));
        }

        #[test]
        fn flip_is_an_involution(q in arb_state(), r in arb_state(), w in 0.0f64..1.0) {
            let rho = density_from_amplitudes(&q).mix(&density_from_amplitudes(&r), w).unwrap();
            let twice = TwoQubitDensity::from_matrix_unchecked(spin_flip(&rho));
            prop_assert!((spin_flip(&twice) - rho.matrix()).norm() < 1e-12);
        }

        #[test]
        fn singular_values_square_to_flip_spectrum(q in arb_state(), r in arb_state(), w in 0.05f64..0.95) {
            let rho = density_from_amplitudes(&q).mix(&density_from_amplitudes(&r), w).unwrap();
            let s = flip_singular_values(&rho).unwrap();
            let mut direct: Vec<f64> = eigenvalues(&(rho.matrix() * spin_flip(&rho))).unwrap().iter().map(|l| l.re).collect();
            direct.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in s.iter().zip(direct) {
                prop_assert!((a * a - b).abs() < 1e-10, "{s:?}");
            }
        }

        #[test]
        fn global_phase_invariance(q in arb_state(), phi in 0.0f64..std::f64::consts::TAU) {
            let rotated = QuantumAmplitudes::from_vector(q.as_vector() * Complex64::from_polar(1.0, phi));
            let a = concurrence_mixed(&density_from_amplitudes(&q)).unwrap();
            let b = concurrence_mixed(&density_from_amplitudes(&rotated)).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn formation_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (elo, ehi) = (entanglement_of_formation(lo).unwrap(), entanglement_of_formation(hi).unwrap());
            prop_assert!(elo < ehi);
            prop_assert!((0.0..=1.0).contains(&elo) && (0.0..=1.0).contains(&ehi));
        }
    }
}

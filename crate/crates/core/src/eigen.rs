//! Eigenvalues of small dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! complex QR iteration with Wilkinson shifts and deflation. Only the
//! spectrum is computed; no eigenvectors are accumulated.

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of `a`, in the order they deflate (not sorted).
pub fn eigenvalues<const N: usize>(a: &SMatrix<Complex64, N, N>) -> Result<[Complex64; N]> {
    let mut h = *a;
    if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("matrix", "non-finite entry", "eigenvalues need finite input"));
    }
    hessenberg(&mut h);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = [Complex64::new(0.0, 0.0); N];
    if N == 0 {
        return Ok(out);
    }
    if scale == 0.0 {
        return Ok(out);
    }

    let mut hi = N - 1;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            return Ok(out);
        }
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let tol = f64::EPSILON * if diag > 0.0 { diag } else { scale };
            if sub <= tol {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        iter += 1;
        since_deflation += 1;
        if since_deflation > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::EigenNoConvergence { iterations: iter });
        }

        let shift = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
}

fn hessenberg<const N: usize>(h: &mut SMatrix<Complex64, N, N>) {
    if N < 3 {
        return;
    }
    for k in 0..N - 2 {
        let norm: f64 = (k + 1..N).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v = [Complex64::new(0.0, 0.0); N];
        for i in k + 1..N {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vv†) H (I − 2vv†)
        for j in 0..N {
            let dot: Complex64 = (k + 1..N).map(|i| v[i].conj() * h[(i, j)]).sum();
            for i in k + 1..N {
                h[(i, j)] -= v[i] * dot * 2.0;
            }
        }
        for i in 0..N {
            let dot: Complex64 = (k + 1..N).map(|j| h[(i, j)] * v[j]).sum();
            for j in k + 1..N {
                h[(i, j)] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..N {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit-by-Givens shifted QR step on the block `lo..=hi`.
fn qr_sweep<const N: usize>(h: &mut SMatrix<Complex64, N, N>, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let u = h[(k, j)];
            let w = h[(k + 1, j)];
            h[(k, j)] = u * c + s.conj() * w;
            h[(k + 1, j)] = -s * u + w * c;
        }
        rotations.push((c, s));
    }
    for (offset, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 2).min(hi) {
            let u = h[(i, k)];
            let w = h[(i, k + 1)];
            h[(i, k)] = u * c + w * s;
            h[(i, k + 1)] = -u * s.conj() + w * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Rotation [[c, s̄], [−s, c]] with real c that zeroes `b` below `a`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, b / b.norm());
    }
    let phase = a / a.norm();
    let c = a.norm() / r;
    let s = b * phase.conj() / r;
    (c, s)
}

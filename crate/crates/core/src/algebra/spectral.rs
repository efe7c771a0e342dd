//! Cyclic complex Jacobi eigenvalue kernel for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a[p][q]` with a
//! diagonal unitary, then applies the classical real Jacobi rotation that
//! annihilates the now-real pivot. Pivots are visited in a fixed row-major
//! order, so the result is deterministic for a given input.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the Hermitian matrix stored row-major in `entries`,
/// sorted ascending. Only the Hermitian part is meaningful: the caller is
/// expected to pass an exactly Hermitian array.
pub(crate) fn hermitian_spectrum(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(entries.len(), dim * dim);
    let mut a = entries.to_vec();
    let idx = |i: usize, j: usize| i * dim + j;

    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob > 0.0 {
        let target = f64::EPSILON * frob;
        // rotations on pivots below this size cannot move any eigenvalue
        let skip = target / (dim as f64);
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(dim, &a) <= target {
                break;
            }
            for p in 0..dim {
                for q in (p + 1)..dim {
                    let pivot = a[idx(p, q)];
                    let r = pivot.norm();
                    if r <= skip {
                        continue;
                    }
                    rotate(dim, &mut a, p, q, pivot, r);
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..dim).map(|i| a[idx(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

fn off_diagonal_norm(dim: usize, a: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                acc += a[i * dim + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(dim: usize, a: &mut [Complex64], p: usize, q: usize, pivot: Complex64, r: f64) {
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    let theta = (aqq - app) / (2.0 * r);
    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    // phase that makes the pivot real and positive
    let w = pivot.conj() / r;

    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -w * s;
    let j_qq = w * c;

    // A <- A J
    for k in 0..dim {
        let ap = a[k * dim + p];
        let aq = a[k * dim + q];
        a[k * dim + p] = ap * j_pp + aq * j_qp;
        a[k * dim + q] = ap * j_pq + aq * j_qq;
    }
    // A <- J^H A
    for k in 0..dim {
        let rp = a[p * dim + k];
        let rq = a[q * dim + k];
        a[p * dim + k] = j_pp.conj() * rp + j_qp.conj() * rq;
        a[q * dim + k] = j_pq.conj() * rp + j_qq.conj() * rq;
    }

    a[p * dim + q] = Complex64::new(0.0, 0.0);
    a[q * dim + p] = Complex64::new(0.0, 0.0);
    a[p * dim + p].im = 0.0;
    a[q * dim + q].im = 0.0;
}

//! The spectral kernel against nalgebra as an independent oracle, plus the
//! C*-algebra identities as property tests.

mod common;

use common::{random_element, random_hermitian, random_positive, rng};
use cstar_fixpoint::algebra::{AlgebraElement, ComplexScalar, ToleranceConfig};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use rand::Rng;

fn to_nalgebra(m: &AlgebraElement) -> DMatrix<Complex<f64>> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| {
        let z = m.get(i, j);
        Complex::new(z.re, z.im)
    })
}

fn oracle_eigenvalues(m: &AlgebraElement) -> Vec<f64> {
    let mut e: Vec<f64> = to_nalgebra(m).symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn oracle_norm(m: &AlgebraElement) -> f64 {
    to_nalgebra(m).singular_values().max()
}

#[test]
fn jacobi_matches_oracle_to_1e12_up_to_64() {
    let mut r = rng(42);
    for n in [1, 2, 3, 5, 8, 13, 16, 32, 64] {
        for _ in 0..3 {
            let m = random_hermitian(&mut r, n, 1.0);
            let ours = m.hermitian_eigenvalues(0.0).unwrap();
            let theirs = oracle_eigenvalues(&m);
            let scale = theirs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() <= 1e-12 * scale, "n={n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn eigenvalues_are_deterministic() {
    let m = random_hermitian(&mut rng(3), 20, 1.0);
    assert_eq!(m.hermitian_eigenvalues(0.0).unwrap(), m.hermitian_eigenvalues(0.0).unwrap());
}

#[test]
fn operator_norm_matches_singular_values() {
    let mut r = rng(7);
    for n in 1..=16 {
        for _ in 0..5 {
            let m = random_element(&mut r, n, 2.0);
            let (ours, theirs) = (m.operator_norm(), oracle_norm(&m));
            assert!((ours - theirs).abs() <= 1e-10 * theirs, "n={n}: {ours} vs {theirs}");
        }
    }
}

#[test]
fn degenerate_spectra() {
    // repeated eigenvalues and a rank-one matrix
    let mut r = rng(9);
    let v: Vec<ComplexScalar> = (0..6).map(|_| ComplexScalar::new(r.gen(), r.gen())).collect();
    let entries = (0..36).map(|k| v[k / 6] * v[k % 6].conj()).collect();
    let rank_one = AlgebraElement::from_entries(6, entries).unwrap().symmetrized();
    let e = rank_one.hermitian_eigenvalues(0.0).unwrap();
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    assert!((e[5] - vv).abs() < 1e-12 * vv);
    for x in &e[..5] {
        assert!(x.abs() < 1e-12 * vv);
    }
    let e = AlgebraElement::scalar(7, 2.5).hermitian_eigenvalues(0.0).unwrap();
    assert_eq!(e, vec![2.5; 7]);
}

fn element(max_dim: usize) -> impl Strategy<Value = AlgebraElement> {
    (1..=max_dim, any::<u64>()).prop_map(|(n, seed)| random_element(&mut rng(seed), n, 3.0))
}

fn pair(max_dim: usize) -> impl Strategy<Value = (AlgebraElement, AlgebraElement)> {
    (1..=max_dim, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        (random_element(&mut r, n, 3.0), random_element(&mut r, n, 3.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermitian_norm_is_spectral_radius(seed in any::<u64>(), n in 1usize..=12) {
        let m = random_hermitian(&mut rng(seed), n, 5.0);
        let e = m.hermitian_eigenvalues(0.0).unwrap();
        let radius = e.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let norm = m.operator_norm();
        prop_assert!((norm - radius).abs() <= 1e-10 * radius.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn submultiplicative((a, b) in pair(10)) {
        let ab = a.checked_mul(&b).unwrap();
        prop_assert!(ab.operator_norm() <= a.operator_norm() * b.operator_norm() + 1e-10);
    }

    #[test]
    fn cstar_identity(a in element(10)) {
        let n2 = a.operator_norm().powi(2);
        let gram = a.adjoint().checked_mul(&a).unwrap();
        prop_assert!((gram.operator_norm() - n2).abs() <= 1e-10 * n2.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn conjugation_preserves_positivity(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let a = random_element(&mut r, n, 3.0);
        let p = random_positive(&mut r, n, 3.0);
        let s = AlgebraElement::conjugate_sandwich(&a, &p).unwrap();
        prop_assert!(s.is_positive(&ToleranceConfig::default()));
    }

    #[test]
    fn conjugation_is_order_monotone(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let tol = ToleranceConfig::default();
        let a = random_element(&mut r, n, 3.0);
        let p = random_hermitian(&mut r, n, 3.0);
        let q = p.checked_add(&random_positive(&mut r, n, 1.0)).unwrap();
        prop_assert!(p.loewner_leq(&q, &tol).unwrap());
        let sp = AlgebraElement::conjugate_sandwich(&a, &p).unwrap();
        let sq = AlgebraElement::conjugate_sandwich(&a, &q).unwrap();
        prop_assert!(sp.loewner_leq(&sq, &tol).unwrap());
    }

    #[test]
    fn norm_is_monotone_on_positive_cone(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let p = random_positive(&mut r, n, 2.0);
        let q = p.checked_add(&random_positive(&mut r, n, 1.0)).unwrap();
        prop_assert!(p.operator_norm() <= q.operator_norm() + 1e-10);
    }

    #[test]
    fn adjoint_is_an_involution(a in element(8)) {
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }
}

//! Properties of the metric, contraction and solver layers on seeded random
//! instances.

mod common;

use common::{orbit, random_element, random_instance, rng, Family};
use cstar_fixpoint::algebra::{AlgebraElement, ToleranceConfig};
use cstar_fixpoint::contraction::{make_certificate, verify_contraction};
use cstar_fixpoint::metric::{check_axioms, scalarize};
use cstar_fixpoint::solver::{
    apriori_bound, cauchy_pair_bound, picard_solve, picard_solve_traced, BoundInputs, DEFAULT_MAX_ITER,
};
use cstar_fixpoint::Error;
use proptest::prelude::*;

fn rounding_allowance(p: &cstar_fixpoint::Point) -> f64 {
    64.0 * f64::EPSILON * (1.0 + p.coords().iter().fold(0.0_f64, |a, c| a.max(c.abs())))
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn scalarized_triangle_inequality_on_valid_instances() {
    for i in 0..30 {
        let inst = random_instance(11, i);
        let s = &inst.problem.space;
        assert!(check_axioms(s, 5, 200, &tol()).unwrap().passed());
        let rho = scalarize(s);
        for t in s.sample(99, 600).chunks_exact(3) {
            let (x, y, z) = (&t[0], &t[1], &t[2]);
            let lhs = rho.distance(x, y).unwrap();
            let rhs = rho.distance(x, z).unwrap() + rho.distance(z, y).unwrap();
            assert!(lhs <= rhs + 1e-9, "instance {i}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn axiom_reports_are_deterministic_and_witnesses_reproduce() {
    let p = cstar_fixpoint::instances::builtin("broken-indefinite").unwrap().unwrap();
    let a = check_axioms(&p.space, 17, 400, &tol()).unwrap();
    assert_eq!(a, check_axioms(&p.space, 17, 400, &tol()).unwrap());
    assert!(!a.positivity.witnesses.is_empty());
    for w in a.positivity.witnesses.iter().chain(&a.triangle.witnesses) {
        assert!(w.reproduces(&p.space, &tol()).unwrap());
    }
}

#[test]
fn passing_contraction_implies_scalar_factor_bound() {
    for i in 0..30 {
        let p = random_instance(12, i).problem;
        let report = verify_contraction(&p.space, &p.map, &p.certificate, 3, 300, &tol()).unwrap();
        assert!(report.passed(), "instance {i}");
        assert_eq!(
            report,
            verify_contraction(&p.space, &p.map, &p.certificate, 3, 300, &tol()).unwrap()
        );
        let rho = scalarize(&p.space);
        for pair in p.space.sample(3, 600).chunks_exact(2) {
            let (x, y) = (&pair[0], &pair[1]);
            let lhs = rho.distance(&p.map.apply(x), &p.map.apply(y)).unwrap();
            let rhs = p.certificate.factor() * rho.distance(x, y).unwrap();
            assert!(lhs <= rhs + 1e-9, "instance {i}: {lhs} > {rhs}");
        }
    }
}

#[test]
fn cauchy_and_step_bounds_hold_along_orbits() {
    for i in 0..30 {
        let p = random_instance(13, i).problem;
        let xs = orbit(&p, 50);
        let d0 = p.space.distance_norm(&xs[0], &xs[1]).unwrap();
        let b = BoundInputs::new(p.certificate.norm_a(), d0).unwrap();
        let q = p.certificate.factor();
        for n in 0..50 {
            let step = p.space.distance_norm(&xs[n], &xs[n + 1]).unwrap();
            assert!(step <= q.powi(n as i32) * d0 + 1e-9, "instance {i}, n={n}");
            for m in (n + 1)..=50 {
                let gap = p.space.distance_norm(&xs[n], &xs[m]).unwrap();
                assert!(gap <= cauchy_pair_bound(&b, n, m) + 1e-9, "instance {i}, ({n}, {m})");
            }
        }
    }
}

#[test]
fn bounds_dominate_the_true_error() {
    for i in 0..30 {
        let p = random_instance(14, i).problem;
        let tight = tol().with_conv_tol(1e-13).unwrap();
        let reference = picard_solve(&p.space, &p.map, &p.certificate, &p.x0, &tight, 100_000).unwrap();
        let (result, trace) =
            picard_solve_traced(&p.space, &p.map, &p.certificate, &p.x0, &tol(), DEFAULT_MAX_ITER).unwrap();
        assert!(result.converged);
        let b = BoundInputs::new(result.norm_a, result.d0_norm).unwrap();
        for rec in &trace {
            let err = p.space.distance_norm(&rec.point, &reference.point).unwrap();
            assert!(err <= apriori_bound(&b, rec.index) + 1e-8, "instance {i}, n={}", rec.index);
            assert!(err <= rec.aposteriori_bound(result.norm_a) + 1e-8, "instance {i}, n={}", rec.index);
        }
        assert_eq!(result.apriori_bound, apriori_bound(&b, result.iterations));
        assert_eq!(
            result.aposteriori_bound,
            result.residual_norm / (1.0 - result.norm_a * result.norm_a)
        );
        assert!(result.residual_norm <= tol().conv_tol());
    }
}

#[test]
fn closed_form_fixed_points_lie_within_the_certificate() {
    for i in 0..30 {
        let inst = random_instance(15, i);
        if inst.family == Family::Weighted {
            continue;
        }
        let p = inst.problem;
        let r = picard_solve(&p.space, &p.map, &p.certificate, &p.x0, &tol(), DEFAULT_MAX_ITER).unwrap();
        let exact = p.exact_fixed_point.as_ref().unwrap();
        // the bound is attained for positive slopes, so allow rounding only
        let ulps = rounding_allowance(exact);
        assert!(p.space.distance_norm(&r.point, exact).unwrap() <= r.aposteriori_bound + ulps, "instance {i}");
    }
}

#[test]
fn divergence_from_a_false_certificate() {
    let p = cstar_fixpoint::instances::build_scalar(0.5, 0.0, 1.0).unwrap();
    let blowup = cstar_fixpoint::MapInstance::new(
        "x -> 1e300 x",
        std::sync::Arc::new(|x: &cstar_fixpoint::Point| cstar_fixpoint::Point::unchecked(vec![1e300 * x.coords()[0] + 1.0])),
    );
    let err = picard_solve(&p.space, &blowup, &p.certificate, &p.x0, &tol(), 100);
    assert!(matches!(err, Err(Error::Divergence { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificate_accepted_iff_norm_below_one(seed in any::<u64>(), n in 1usize..=6, target in 0.5f64..1.5) {
        let a = random_element(&mut rng(seed), n, 1.0);
        let norm = a.operator_norm();
        prop_assume!(norm > 0.0);
        let a = a.scale_real(target / norm).unwrap();
        let expected = a.operator_norm() < 1.0;
        match make_certificate(a) {
            Ok(c) => {
                prop_assert!(expected);
                prop_assert_eq!(c.factor(), c.norm_a() * c.norm_a());
            }
            Err(Error::CertificateInvalid { norm }) => {
                prop_assert!(!expected);
                prop_assert!(norm >= 1.0);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn apriori_strictly_decreasing(norm_a in 0.01f64..0.99, d0 in 0.001f64..100.0, n in 0usize..500) {
        let b = BoundInputs::new(norm_a, d0).unwrap();
        let (now, next) = (apriori_bound(&b, n), apriori_bound(&b, n + 1));
        prop_assume!(next > 0.0);
        prop_assert!(next < now);
    }

    #[test]
    fn cauchy_bound_limits_to_apriori(norm_a in 0.0f64..0.95, d0 in 0.0f64..10.0, n in 0usize..40) {
        let b = BoundInputs::new(norm_a, d0).unwrap();
        let far = cauchy_pair_bound(&b, n, 100_000);
        prop_assert!((far - apriori_bound(&b, n)).abs() <= 1e-12 * (1.0 + far));
    }

    #[test]
    fn sandwich_by_unit_multiple_scales(seed in any::<u64>(), n in 1usize..=6, c in -1.0f64..1.0) {
        let d = random_element(&mut rng(seed), n, 2.0);
        let s = AlgebraElement::conjugate_sandwich(&AlgebraElement::scalar(n, c), &d).unwrap();
        let expect = d.scale_real(c * c).unwrap();
        let diff = s.checked_sub(&expect).unwrap().max_abs();
        prop_assert!(diff <= 1e-14 * (1.0 + d.max_abs()));
    }
}

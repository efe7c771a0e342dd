#![allow(dead_code)]

use cstar_fixpoint::algebra::{AlgebraElement, ComplexScalar};
use cstar_fixpoint::instances::{build_coordinatewise, build_linear_weighted, build_scalar, Problem};
use cstar_fixpoint::Point;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_element(rng: &mut impl Rng, n: usize, scale: f64) -> AlgebraElement {
    let entries = (0..n * n)
        .map(|_| ComplexScalar::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    AlgebraElement::from_entries(n, entries).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> AlgebraElement {
    random_element(rng, n, scale).symmetrized()
}

/// `B* B`, positive by construction.
pub fn random_positive(rng: &mut impl Rng, n: usize, scale: f64) -> AlgebraElement {
    let b = random_element(rng, n, scale);
    b.adjoint().checked_mul(&b).unwrap()
}

/// Positive weight with operator norm at most about 2.1.
fn random_weight(rng: &mut impl Rng, n: usize) -> AlgebraElement {
    let g = random_positive(rng, n, 1.0);
    let frob = g.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    g.scale_real(2.0 / frob)
        .unwrap()
        .checked_add(&AlgebraElement::scalar(n, 0.1))
        .unwrap()
}

/// `lipschitz` times a Householder reflection: an exact Euclidean
/// `lipschitz`-Lipschitz linear map, row-major `k x k`.
fn scaled_reflection(rng: &mut impl Rng, k: usize, lipschitz: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i * k + j] = lipschitz * (id - 2.0 * v[i] * v[j] / vv);
        }
    }
    m
}

fn random_vec(rng: &mut impl Rng, k: usize, half_width: f64) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Scalar,
    Weighted,
    Coordinatewise,
}

pub struct RandomInstance {
    pub family: Family,
    pub problem: Problem,
    /// The sandwich is a multiple of the unit.
    pub scalar_sandwich: bool,
    /// `offset_i / (1 - slope_i)` for the families that have one.
    pub closed_form: Option<Vec<f64>>,
}

fn closed_form(slopes: &[f64], offsets: &[f64]) -> Vec<f64> {
    slopes.iter().zip(offsets).map(|(s, b)| b / (1.0 - s)).collect()
}

/// Instance `index` of a fixed, seeded catalog cycling through the three
/// families. Algebra dimensions stay at or below 8 and the contraction
/// factor at or below 0.9.
pub fn random_instance(seed: u64, index: usize) -> RandomInstance {
    let mut r = rng(seed.wrapping_mul(1_000_003).wrapping_add(index as u64));
    let (family, problem, closed) = match index % 3 {
        0 => {
            let slope = r.gen_range(-0.9..0.9);
            let offset = r.gen_range(-5.0..5.0);
            let p = build_scalar(slope, offset, r.gen_range(-10.0..10.0)).unwrap();
            (Family::Scalar, p, Some(closed_form(&[slope], &[offset])))
        }
        1 => {
            let n = r.gen_range(1..=8);
            let k = r.gen_range(1..=4);
            let lipschitz = r.gen_range(0.0..0.9);
            let weight = random_weight(&mut r, n);
            let m = scaled_reflection(&mut r, k, lipschitz);
            let offset = random_vec(&mut r, k, 5.0);
            let x0 = Point::new(random_vec(&mut r, k, 10.0)).unwrap();
            // a tiny margin absorbs rounding in the reflection's norm
            let p = build_linear_weighted(weight, lipschitz * (1.0 + 1e-12), m, offset, x0).unwrap();
            (Family::Weighted, p, None)
        }
        _ => {
            let n = r.gen_range(1..=8);
            let slopes = random_vec(&mut r, n, 0.9);
            let offsets = random_vec(&mut r, n, 5.0);
            let x0 = Point::new(random_vec(&mut r, n, 10.0)).unwrap();
            let closed = closed_form(&slopes, &offsets);
            let p = build_coordinatewise(slopes, offsets, x0).unwrap();
            (Family::Coordinatewise, p, Some(closed))
        }
    };
    let a = problem.certificate.sandwich();
    let scalar_sandwich = *a == AlgebraElement::scalar(a.dim(), a.get(0, 0).re);
    RandomInstance {
        family,
        problem,
        scalar_sandwich,
        closed_form: closed,
    }
}

/// `x_0, T x_0, ..., T^steps x_0` by direct application of the map.
pub fn orbit(p: &Problem, steps: usize) -> Vec<Point> {
    let mut out = vec![p.x0.clone()];
    for _ in 0..steps {
        let next = p.map.apply(out.last().unwrap());
        out.push(next);
    }
    out
}

/// Every shipped instance file and the exit code `solve` must produce.
pub const SHIPPED: [(&str, i32); 10] = [
    ("scalar_half.inst", 0),
    ("scalar_oscillating.inst", 0),
    ("weighted_rotation.inst", 0),
    ("affine_weighted.inst", 0),
    ("coordinatewise.inst", 0),
    ("coordinatewise_complex_sandwich.inst", 0),
    ("lying_certificate.inst", 1),
    ("broken_signed.inst", 1),
    ("broken_indefinite.inst", 2),
    ("bad_slope.inst", 2),
];


pub fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

//! Picard iteration with certified error bounds.
//!
//! Two bounds accompany every solve. Both are driven by the contraction
//! factor `q = ||A||^2` of the certificate.
//!
//! * The a priori bound `q^n / (1 - q) * ||d(x0, T x0)||` follows from the
//!   Cauchy-pair estimate
//!   `||d(T^n x, T^m x)|| <= (q^n + q^m) / (1 - q) * ||d(x, T x)||`
//!   by letting `m` grow without bound. It is known before iterating.
//! * The a posteriori bound `||d(x_n, T x_n)|| / (1 - q)` comes from the
//!   fundamental contraction inequality
//!   `||d(x1, x2)|| <= ||d(x1, T x1) + d(T x2, x2)|| / (1 - q)`
//!   with `x2` set to the (unknown) fixed point, where the second summand
//!   vanishes. It uses only the current residual.
//!
//! The iteration stops once the residual `||d(x_n, T x_n)||` drops to the
//! configured `conv_tol`, or after `max_iter` steps.

use crate::algebra::ToleranceConfig;
use crate::contraction::{ContractionCertificate, MapInstance};
use crate::error::{Error, Result};
use crate::metric::MetricSpaceInstance;
use crate::point::Point;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// The two scalars the a priori bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    norm_a: f64,
    d0_norm: f64,
}

impl BoundInputs {
    pub fn new(norm_a: f64, d0_norm: f64) -> Result<Self> {
        if !(norm_a.is_finite() && (0.0..1.0).contains(&norm_a)) {
            return Err(Error::CertificateInvalid { norm: norm_a });
        }
        if !(d0_norm.is_finite() && d0_norm >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "initial displacement must be finite and nonnegative, got {d0_norm}"
            )));
        }
        Ok(Self { norm_a, d0_norm })
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn d0_norm(&self) -> f64 {
        self.d0_norm
    }

    fn factor(&self) -> f64 {
        self.norm_a * self.norm_a
    }
}

fn factor_pow(factor: f64, n: usize) -> f64 {
    factor.powi(i32::try_from(n).unwrap_or(i32::MAX))
}

/// `(q^n + q^m) / (1 - q) * ||d(x0, T x0)||`, bounding
/// `||d(T^n x0, T^m x0)||`.
pub fn cauchy_pair_bound(b: &BoundInputs, n: usize, m: usize) -> f64 {
    let q = b.factor();
    (factor_pow(q, n) + factor_pow(q, m)) / (1.0 - q) * b.d0_norm
}

/// `q^n / (1 - q) * ||d(x0, T x0)||`, bounding the distance from `T^n x0`
/// to the fixed point.
pub fn apriori_bound(b: &BoundInputs, n: usize) -> f64 {
    let q = b.factor();
    factor_pow(q, n) / (1.0 - q) * b.d0_norm
}

/// `residual / (1 - ||A||^2)`, bounding the distance from the point whose
/// residual was measured to the fixed point.
pub fn aposteriori_bound(norm_a: f64, residual_norm: f64) -> f64 {
    residual_norm / (1.0 - norm_a * norm_a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    /// The last iterate `x_n`.
    pub point: Point,
    pub iterations: usize,
    /// `||d(x_n, T x_n)||`
    pub residual_norm: f64,
    pub apriori_bound: f64,
    pub aposteriori_bound: f64,
    pub converged: bool,
    pub norm_a: f64,
    /// `||d(x_0, T x_0)||`, shared by all a priori bounds of the run.
    pub d0_norm: f64,
}

/// One visited iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub index: usize,
    pub point: Point,
    pub residual_norm: f64,
}

impl IterationRecord {
    pub fn aposteriori_bound(&self, norm_a: f64) -> f64 {
        aposteriori_bound(norm_a, self.residual_norm)
    }
}

pub fn picard_solve(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    x0: &Point,
    tol: &ToleranceConfig,
    max_iter: usize,
) -> Result<FixedPointResult> {
    run(s, t, c, x0, tol, max_iter, |_| {})
}

/// [`picard_solve`] that also returns every visited iterate `x_0..=x_n`.
pub fn picard_solve_traced(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    x0: &Point,
    tol: &ToleranceConfig,
    max_iter: usize,
) -> Result<(FixedPointResult, Vec<IterationRecord>)> {
    let mut trace = Vec::new();
    let result = run(s, t, c, x0, tol, max_iter, |r| trace.push(r))?;
    Ok((result, trace))
}

fn run(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    x0: &Point,
    tol: &ToleranceConfig,
    max_iter: usize,
    mut observe: impl FnMut(IterationRecord),
) -> Result<FixedPointResult> {
    if s.algebra_dim() != c.sandwich().dim() {
        return Err(Error::DimensionMismatch {
            expected: s.algebra_dim(),
            found: c.sandwich().dim(),
        });
    }
    if x0.dim() != s.point_dim() {
        return Err(Error::DimensionMismatch {
            expected: s.point_dim(),
            found: x0.dim(),
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }

    let step = |x: &Point, k: usize| -> Result<Point> {
        let tx = t.apply(x);
        if tx.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: tx.dim(),
            });
        }
        if !tx.is_finite() {
            return Err(Error::Divergence { iteration: k });
        }
        Ok(tx)
    };

    let mut x = x0.clone();
    let mut tx = step(&x, 1)?;
    let d0_norm = s.distance_norm(&x, &tx)?;
    let mut residual = d0_norm;
    let mut k = 0;
    observe(IterationRecord {
        index: 0,
        point: x.clone(),
        residual_norm: residual,
    });
    while residual > tol.conv_tol() && k < max_iter {
        x = tx;
        k += 1;
        tx = step(&x, k + 1)?;
        residual = s.distance_norm(&x, &tx)?;
        observe(IterationRecord {
            index: k,
            point: x.clone(),
            residual_norm: residual,
        });
    }

    let bounds = BoundInputs::new(c.norm_a(), d0_norm)?;
    Ok(FixedPointResult {
        point: x,
        iterations: k,
        residual_norm: residual,
        apriori_bound: apriori_bound(&bounds, k),
        aposteriori_bound: aposteriori_bound(c.norm_a(), residual),
        converged: residual <= tol.conv_tol(),
        norm_a: c.norm_a(),
        d0_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    /// One solve per start, in start order.
    pub results: Vec<FixedPointResult>,
    pub max_pairwise_dnorm: f64,
    pub consistent: bool,
}

impl UniquenessReport {
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.results.iter().map(|r| &r.point)
    }
}

/// Solves from each start and checks that all limits agree: every pair must
/// satisfy `||d(p_i, p_j)|| <= post_i + post_j + conv_tol`, the bound the
/// fundamental inequality gives for two approximate fixed points.
pub fn uniqueness_check(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    starts: &[Point],
    tol: &ToleranceConfig,
    max_iter: usize,
) -> Result<UniquenessReport> {
    if starts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "uniqueness check needs at least 2 starts, got {}",
            starts.len()
        )));
    }
    let results = starts
        .iter()
        .map(|x0| picard_solve(s, t, c, x0, tol, max_iter))
        .collect::<Result<Vec<_>>>()?;

    let mut max_pairwise_dnorm = 0.0_f64;
    let mut consistent = true;
    for (i, ri) in results.iter().enumerate() {
        for rj in &results[i + 1..] {
            let dist = s.distance_norm(&ri.point, &rj.point)?;
            max_pairwise_dnorm = max_pairwise_dnorm.max(dist);
            if dist > ri.aposteriori_bound + rj.aposteriori_bound + tol.conv_tol() {
                consistent = false;
            }
        }
    }
    Ok(UniquenessReport {
        results,
        max_pairwise_dnorm,
        consistent,
    })
}

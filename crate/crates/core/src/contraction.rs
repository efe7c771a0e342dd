//! Sandwich contractions: `d(Tx, Ty) <= A* d(x, y) A` with `||A|| < 1`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraElement, ToleranceConfig};
use crate::error::{Error, Result};
use crate::metric::{MetricSpaceInstance, MAX_WITNESSES};
use crate::point::Point;

pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// A self-map `T: X -> X`.
#[derive(Clone)]
pub struct MapInstance {
    description: String,
    map: MapFn,
}

impl MapInstance {
    pub fn new(description: impl Into<String>, map: MapFn) -> Self {
        Self {
            description: description.into(),
            map,
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", Arc::new(Point::clone))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `T(x)`. The image may carry non-finite coordinates if the map
    /// overflows; callers that iterate check [`Point::is_finite`].
    pub fn apply(&self, x: &Point) -> Point {
        (self.map)(x)
    }
}

impl fmt::Debug for MapInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapInstance")
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

/// The sandwich element `A` together with its cached norm and the factor
/// `||A||^2` that drives every error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    sandwich: AlgebraElement,
    norm_a: f64,
    factor: f64,
}

impl ContractionCertificate {
    pub fn new(sandwich: AlgebraElement) -> Result<Self> {
        let norm_a = sandwich.operator_norm();
        if norm_a.is_nan() || norm_a >= 1.0 {
            return Err(Error::CertificateInvalid { norm: norm_a });
        }
        Ok(Self {
            sandwich,
            norm_a,
            factor: norm_a * norm_a,
        })
    }

    pub fn sandwich(&self) -> &AlgebraElement {
        &self.sandwich
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

pub fn make_certificate(a: AlgebraElement) -> Result<ContractionCertificate> {
    ContractionCertificate::new(a)
}

pub fn scalar_contraction_factor(c: &ContractionCertificate) -> f64 {
    c.factor()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionWitness {
    pub x: Point,
    pub y: Point,
    /// `d(Tx, Ty)`
    pub image_distance: AlgebraElement,
    /// `A* d(x, y) A`
    pub sandwiched_distance: AlgebraElement,
}

impl ContractionWitness {
    pub fn reproduces(
        &self,
        s: &MetricSpaceInstance,
        t: &MapInstance,
        c: &ContractionCertificate,
        tol: &ToleranceConfig,
    ) -> Result<bool> {
        Ok(pair_violation(s, t, c, &self.x, &self.y, tol)?.is_some())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContractionReport {
    pub checked: usize,
    pub failures: usize,
    pub witnesses: Vec<ContractionWitness>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Sampled check of the sandwich condition on `n_samples` pairs.
pub fn verify_contraction(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    seed: u64,
    n_samples: usize,
    tol: &ToleranceConfig,
) -> Result<ContractionReport> {
    check_dims(s, c)?;
    let pts = s.sample(seed, 2 * n_samples);
    let mut report = ContractionReport::default();
    for pair in pts.chunks_exact(2) {
        let (x, y) = (&pair[0], &pair[1]);
        report.checked += 1;
        if let Some(w) = pair_violation(s, t, c, x, y, tol)? {
            report.failures += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(w);
            }
        }
    }
    Ok(report)
}

fn pair_violation(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    c: &ContractionCertificate,
    x: &Point,
    y: &Point,
    tol: &ToleranceConfig,
) -> Result<Option<ContractionWitness>> {
    let (tx, ty) = (t.apply(x), t.apply(y));
    if !(tx.is_finite() && ty.is_finite()) {
        return Err(Error::NonFinite("map image"));
    }
    let image_distance = s.eval(&tx, &ty)?;
    let sandwiched_distance = AlgebraElement::conjugate_sandwich(c.sandwich(), &s.eval(x, y)?)?;
    if image_distance.loewner_leq(&sandwiched_distance, tol)? {
        return Ok(None);
    }
    Ok(Some(ContractionWitness {
        x: x.clone(),
        y: y.clone(),
        image_distance,
        sandwiched_distance,
    }))
}

fn check_dims(s: &MetricSpaceInstance, c: &ContractionCertificate) -> Result<()> {
    if s.algebra_dim() != c.sandwich().dim() {
        return Err(Error::DimensionMismatch {
            expected: s.algebra_dim(),
            found: c.sandwich().dim(),
        });
    }
    Ok(())
}

/// Heuristic scalar certificate `sqrt(rho) * 1` where `rho` is the largest
/// observed ratio `||d(Tx, Ty)|| / ||d(x, y)||` over sampled pairs.
///
/// This only corroborates: a sample maximum can underestimate the true
/// Lipschitz ratio, so the result must still pass [`verify_contraction`].
/// Pairs with `||d(x, y)|| <= pos_tol` are skipped.
pub fn fit_scalar_certificate(
    s: &MetricSpaceInstance,
    t: &MapInstance,
    seed: u64,
    n_samples: usize,
    tol: &ToleranceConfig,
) -> Result<ContractionCertificate> {
    let pts = s.sample(seed, 2 * n_samples);
    let mut worst = 0.0_f64;
    for pair in pts.chunks_exact(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let base = s.distance_norm(x, y)?;
        if base <= tol.pos_tol() {
            continue;
        }
        let (tx, ty) = (t.apply(x), t.apply(y));
        if !(tx.is_finite() && ty.is_finite()) {
            return Err(Error::NonFinite("map image"));
        }
        worst = worst.max(s.distance_norm(&tx, &ty)? / base);
    }
    ContractionCertificate::new(AlgebraElement::scalar(s.algebra_dim(), worst.sqrt()))
}

//! C*-algebra-valued metric spaces.
//!
//! A [`MetricSpaceInstance`] couples a point set (a region of `R^k`) with a
//! metric `d: X x X -> M_n(C)`. The axioms are never assumed: they are
//! checked on seeded samples by [`check_axioms`], which records every
//! violation together with the elements that exhibit it.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraElement, ToleranceConfig};
use crate::error::{Error, Result};
use crate::point::{BoundingBox, Point};

pub type MetricFn = Arc<dyn Fn(&Point, &Point) -> Result<AlgebraElement> + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(u64, usize) -> Vec<Point> + Send + Sync>;

/// Maximum witnesses kept per axiom.
pub const MAX_WITNESSES: usize = 5;

/// The triple `(X, A, d)` with a seeded sampler over `X`.
#[derive(Clone)]
pub struct MetricSpaceInstance {
    description: String,
    point_dim: usize,
    algebra_dim: usize,
    metric: MetricFn,
    sampler: SamplerFn,
    bounding_box: BoundingBox,
}

impl MetricSpaceInstance {
    /// A space sampled uniformly from `bounding_box`.
    pub fn new(
        description: impl Into<String>,
        algebra_dim: usize,
        bounding_box: BoundingBox,
        metric: MetricFn,
    ) -> Result<Self> {
        if algebra_dim == 0 {
            return Err(Error::InvalidInput("algebra dimension must be at least 1".into()));
        }
        let sample_box = bounding_box.clone();
        Ok(Self {
            description: description.into(),
            point_dim: bounding_box.dim(),
            algebra_dim,
            metric,
            sampler: Arc::new(move |seed, count| sample_box.sample(seed, count)),
            bounding_box,
        })
    }

    /// Replaces the uniform box sampler.
    pub fn with_sampler(mut self, sampler: SamplerFn) -> Self {
        self.sampler = sampler;
        self
    }

    /// Re-targets the uniform sampler at a new box of the same dimension.
    pub fn with_bounding_box(mut self, bounding_box: BoundingBox) -> Result<Self> {
        if bounding_box.dim() != self.point_dim {
            return Err(Error::DimensionMismatch {
                expected: self.point_dim,
                found: bounding_box.dim(),
            });
        }
        let sample_box = bounding_box.clone();
        self.sampler = Arc::new(move |seed, count| sample_box.sample(seed, count));
        self.bounding_box = bounding_box;
        Ok(self)
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn point_dim(&self) -> usize {
        self.point_dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bounding_box
    }

    pub fn sample(&self, seed: u64, count: usize) -> Vec<Point> {
        (self.sampler)(seed, count)
    }

    /// `d(x, y)`.
    pub fn eval(&self, x: &Point, y: &Point) -> Result<AlgebraElement> {
        for p in [x, y] {
            if p.dim() != self.point_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.point_dim,
                    found: p.dim(),
                });
            }
        }
        let d = (self.metric)(x, y)?;
        if d.dim() != self.algebra_dim {
            return Err(Error::DimensionMismatch {
                expected: self.algebra_dim,
                found: d.dim(),
            });
        }
        Ok(d)
    }

    /// `||d(x, y)||`, the scalarized distance.
    pub fn distance_norm(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.eval(x, y)?.operator_norm())
    }
}

impl fmt::Debug for MetricSpaceInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpaceInstance")
            .field("description", &self.description)
            .field("point_dim", &self.point_dim)
            .field("algebra_dim", &self.algebra_dim)
            .field("bounding_box", &self.bounding_box)
            .finish_non_exhaustive()
    }
}

pub fn eval_metric(s: &MetricSpaceInstance, x: &Point, y: &Point) -> Result<AlgebraElement> {
    s.eval(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// `d(x, y) >= 0`
    Positivity,
    /// `d(x, y) = 0` iff `x = y`
    Identity,
    /// `d(x, y) = d(y, x)`
    Symmetry,
    /// `d(x, y) <= d(x, z) + d(z, y)`
    Triangle,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::Positivity, Axiom::Identity, Axiom::Symmetry, Axiom::Triangle];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Positivity => "positivity",
            Axiom::Identity => "identity",
            Axiom::Symmetry => "symmetry",
            Axiom::Triangle => "triangle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// A failing tuple together with the algebra elements that exhibit the
/// failure, in the order the check evaluates them.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomWitness {
    pub axiom: Axiom,
    pub points: Vec<Point>,
    pub values: Vec<AlgebraElement>,
}

impl AxiomWitness {
    /// Re-evaluates the tuple against `s`; true when the failure recurs.
    pub fn reproduces(&self, s: &MetricSpaceInstance, tol: &ToleranceConfig) -> Result<bool> {
        Ok(violation(self.axiom, s, &self.points, tol)?.is_some())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxiomRecord {
    pub checked: usize,
    pub failures: usize,
    pub witnesses: Vec<AxiomWitness>,
}

impl AxiomRecord {
    fn observe(&mut self, axiom: Axiom, points: &[&Point], outcome: Option<Vec<AlgebraElement>>) {
        self.checked += 1;
        if let Some(values) = outcome {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(AxiomWitness {
                    axiom,
                    points: points.iter().map(|&p| p.clone()).collect(),
                    values,
                });
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AxiomReport {
    pub positivity: AxiomRecord,
    pub identity: AxiomRecord,
    pub symmetry: AxiomRecord,
    pub triangle: AxiomRecord,
}

impl AxiomReport {
    pub fn record(&self, axiom: Axiom) -> &AxiomRecord {
        match axiom {
            Axiom::Positivity => &self.positivity,
            Axiom::Identity => &self.identity,
            Axiom::Symmetry => &self.symmetry,
            Axiom::Triangle => &self.triangle,
        }
    }

    pub fn record_mut(&mut self, axiom: Axiom) -> &mut AxiomRecord {
        match axiom {
            Axiom::Positivity => &mut self.positivity,
            Axiom::Identity => &mut self.identity,
            Axiom::Symmetry => &mut self.symmetry,
            Axiom::Triangle => &mut self.triangle,
        }
    }

    pub fn total_failures(&self) -> usize {
        Axiom::ALL.iter().map(|&a| self.record(a).failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }
}

/// Sampled verification of the metric axioms.
///
/// Draws `3 * n_samples` points from the instance sampler and walks them as
/// triples `(x, y, z)`. Each triple contributes one positivity, symmetry and
/// triangle check, one `d(x, x) = 0` check, and, when `x != y`, one check
/// that `||d(x, y)|| > pos_tol`.
pub fn check_axioms(
    s: &MetricSpaceInstance,
    seed: u64,
    n_samples: usize,
    tol: &ToleranceConfig,
) -> Result<AxiomReport> {
    let pts = s.sample(seed, 3 * n_samples);
    let mut report = AxiomReport::default();
    for triple in pts.chunks_exact(3) {
        let (x, y, z) = (&triple[0], &triple[1], &triple[2]);

        let out = violation(Axiom::Positivity, s, &[x.clone(), y.clone()], tol)?;
        report.positivity.observe(Axiom::Positivity, &[x, y], out);

        let out = violation(Axiom::Identity, s, std::slice::from_ref(x), tol)?;
        report.identity.observe(Axiom::Identity, &[x], out);
        if x != y {
            let out = violation(Axiom::Identity, s, &[x.clone(), y.clone()], tol)?;
            report.identity.observe(Axiom::Identity, &[x, y], out);
        }

        let out = violation(Axiom::Symmetry, s, &[x.clone(), y.clone()], tol)?;
        report.symmetry.observe(Axiom::Symmetry, &[x, y], out);

        let out = violation(Axiom::Triangle, s, triple, tol)?;
        report.triangle.observe(Axiom::Triangle, &[x, y, z], out);
    }
    Ok(report)
}

/// Evaluates one axiom on one tuple. Returns the offending elements when the
/// axiom fails, `None` when it holds.
fn violation(
    axiom: Axiom,
    s: &MetricSpaceInstance,
    points: &[Point],
    tol: &ToleranceConfig,
) -> Result<Option<Vec<AlgebraElement>>> {
    let arity_err = || Error::InvalidInput(format!("wrong tuple size for {} check", axiom.name()));
    let failed = |bad: bool, values: Vec<AlgebraElement>| if bad { Some(values) } else { None };
    match (axiom, points) {
        (Axiom::Positivity, [x, y]) => {
            let d = s.eval(x, y)?;
            Ok(failed(!d.is_positive(tol), vec![d]))
        }
        (Axiom::Identity, [x]) => {
            let d = s.eval(x, x)?;
            Ok(failed(d.operator_norm() > tol.pos_tol(), vec![d]))
        }
        (Axiom::Identity, [x, y]) => {
            let d = s.eval(x, y)?;
            Ok(failed(x != y && d.operator_norm() <= tol.pos_tol(), vec![d]))
        }
        (Axiom::Symmetry, [x, y]) => {
            let dxy = s.eval(x, y)?;
            let dyx = s.eval(y, x)?;
            let holds = dxy.loewner_leq(&dyx, tol)? && dyx.loewner_leq(&dxy, tol)?;
            Ok(failed(!holds, vec![dxy, dyx]))
        }
        (Axiom::Triangle, [x, y, z]) => {
            let dxy = s.eval(x, y)?;
            let dxz = s.eval(x, z)?;
            let dzy = s.eval(z, y)?;
            let holds = dxy.loewner_leq(&dxz.checked_add(&dzy)?, tol)?;
            Ok(failed(!holds, vec![dxy, dxz, dzy]))
        }
        _ => Err(arity_err()),
    }
}

/// The classical metric `(x, y) -> ||d(x, y)||` obtained from a C*-valued
/// one.
#[derive(Debug, Clone)]
pub struct ScalarizedMetric {
    space: MetricSpaceInstance,
}

impl ScalarizedMetric {
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.space.distance_norm(x, y)
    }

    pub fn space(&self) -> &MetricSpaceInstance {
        &self.space
    }
}

pub fn scalarize(s: &MetricSpaceInstance) -> ScalarizedMetric {
    ScalarizedMetric { space: s.clone() }
}

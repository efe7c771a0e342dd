//! Built-in problem families.
//!
//! Three regimes are covered: the classical scalar case (`A = C`), matrix
//! metrics with a scalar sandwich `sqrt(L) * 1`, and diagonal metrics whose
//! sandwich `diag(sqrt|s_i|)` is not a multiple of the unit. Two deliberately
//! broken spaces are kept alongside for exercising the axiom verifier.

use std::sync::Arc;

use crate::algebra::{AlgebraElement, ToleranceConfig};
use crate::contraction::{make_certificate, ContractionCertificate, MapInstance};
use crate::error::{Error, Result};
use crate::metric::MetricSpaceInstance;
use crate::point::{BoundingBox, Point};

/// A metric space, a self-map, its certificate and a start point.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: MetricSpaceInstance,
    pub map: MapInstance,
    pub certificate: ContractionCertificate,
    pub x0: Point,
    /// Closed-form fixed point, when the family has one.
    pub exact_fixed_point: Option<Point>,
}

impl Problem {
    pub fn with_bounding_box(mut self, bounding_box: BoundingBox) -> Result<Self> {
        self.space = self.space.with_bounding_box(bounding_box)?;
        Ok(self)
    }

    /// Replaces the family's default certificate with an explicit one.
    pub fn with_sandwich(mut self, sandwich: AlgebraElement) -> Result<Self> {
        if sandwich.dim() != self.space.algebra_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.algebra_dim(),
                found: sandwich.dim(),
            });
        }
        self.certificate = make_certificate(sandwich)?;
        Ok(self)
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.space = self.space.with_description(description);
        self
    }
}

fn one_dim_abs(kind: &'static str) -> Result<MetricSpaceInstance> {
    MetricSpaceInstance::new(
        kind,
        1,
        BoundingBox::default_for(1),
        Arc::new(|x: &Point, y: &Point| AlgebraElement::from_real(1, &[(x.coords()[0] - y.coords()[0]).abs()])),
    )
}

fn affine_map(slope: f64, offset: Vec<f64>) -> MapInstance {
    MapInstance::new(
        format!("x -> {slope} x + {offset:?}"),
        Arc::new(move |x: &Point| {
            Point::unchecked(x.coords().iter().zip(&offset).map(|(c, o)| slope * c + o).collect())
        }),
    )
}

fn check_slope(slope: f64) -> Result<()> {
    if !slope.is_finite() {
        return Err(Error::NonFinite("slope"));
    }
    Ok(())
}

/// `X = R`, `d(x, y) = |x - y|`, `T(x) = slope x + offset`,
/// `A = sqrt|slope|`.
pub fn build_scalar(slope: f64, offset: f64, x0: f64) -> Result<Problem> {
    check_slope(slope)?;
    let certificate = make_certificate(AlgebraElement::scalar(1, slope.abs().sqrt()))?;
    Ok(Problem {
        space: one_dim_abs("scalar |x - y|")?,
        map: affine_map(slope, vec![offset]),
        certificate,
        x0: Point::scalar(x0)?,
        exact_fixed_point: Some(Point::scalar(offset / (1.0 - slope))?),
    })
}

/// `d(x, y) = ||x - y||_2 * P` for a positive weight `P`, with the scalar
/// sandwich `A = sqrt(lipschitz) * 1`. The map is trusted to be
/// `lipschitz`-Lipschitz in the Euclidean norm; [`verify_contraction`]
/// corroborates it on samples.
///
/// [`verify_contraction`]: crate::contraction::verify_contraction
pub fn build_weighted(weight: AlgebraElement, lipschitz: f64, map: MapInstance, x0: Point) -> Result<Problem> {
    check_weight(&weight)?;
    if !(lipschitz.is_finite() && lipschitz >= 0.0) {
        return Err(Error::InvalidInput(format!("Lipschitz constant must be nonnegative, got {lipschitz}")));
    }
    let n = weight.dim();
    let certificate = make_certificate(AlgebraElement::scalar(n, lipschitz.sqrt()))?;
    Ok(Problem {
        space: weighted_space(weight, x0.dim())?,
        map,
        certificate,
        x0,
        exact_fixed_point: None,
    })
}

fn weighted_space(weight: AlgebraElement, point_dim: usize) -> Result<MetricSpaceInstance> {
    MetricSpaceInstance::new(
        format!("weighted ||x - y|| P, P in M_{}", weight.dim()),
        weight.dim(),
        BoundingBox::default_for(point_dim),
        Arc::new(move |x: &Point, y: &Point| weight.scale_real(x.euclidean_distance(y))),
    )
}

fn check_weight(weight: &AlgebraElement) -> Result<()> {
    let tol = ToleranceConfig::default();
    if weight.is_positive(&tol) {
        return Ok(());
    }
    let min_eigenvalue = weight
        .hermitian_eigenvalues(tol.herm_tol())
        .map(|e| e[0])
        .unwrap_or(f64::NAN);
    Err(Error::WeightNotPositive { min_eigenvalue })
}

/// Weighted metric with the map `x -> slope x + offset`, Lipschitz `|slope|`.
pub fn build_affine(weight: AlgebraElement, slope: f64, offset: Vec<f64>, x0: Point) -> Result<Problem> {
    check_slope(slope)?;
    if offset.len() != x0.dim() {
        return Err(Error::DimensionMismatch {
            expected: x0.dim(),
            found: offset.len(),
        });
    }
    let exact = Point::new(offset.iter().map(|o| o / (1.0 - slope)).collect())?;
    let map = affine_map(slope, offset);
    let mut problem = build_weighted(weight, slope.abs(), map, x0)?;
    problem.exact_fixed_point = Some(exact);
    Ok(problem)
}

/// Weighted metric with the map `x -> M x + b` for a real `k x k` matrix
/// `M` (row-major). Rejects `M` whose spectral norm exceeds `lipschitz`.
pub fn build_linear_weighted(
    weight: AlgebraElement,
    lipschitz: f64,
    matrix: Vec<f64>,
    offset: Vec<f64>,
    x0: Point,
) -> Result<Problem> {
    let k = x0.dim();
    if offset.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: offset.len(),
        });
    }
    let m_norm = AlgebraElement::from_real(k, &matrix)?.operator_norm();
    if m_norm > lipschitz * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "map matrix has norm {m_norm}, exceeding the declared Lipschitz constant {lipschitz}"
        )));
    }
    let map = MapInstance::new(
        "x -> M x + b",
        Arc::new(move |x: &Point| {
            let c = x.coords();
            Point::unchecked(
                (0..k)
                    .map(|i| (0..k).map(|j| matrix[i * k + j] * c[j]).sum::<f64>() + offset[i])
                    .collect(),
            )
        }),
    );
    build_weighted(weight, lipschitz, map, x0)
}

/// Diagonal algebra: `d(x, y) = diag(|x_i - y_i|)`,
/// `T(x)_i = s_i x_i + o_i` and `A = diag(sqrt|s_i|)`.
pub fn build_coordinatewise(slopes: Vec<f64>, offsets: Vec<f64>, x0: Point) -> Result<Problem> {
    let n = slopes.len();
    if n == 0 {
        return Err(Error::InvalidInput("coordinatewise instance needs at least one slope".into()));
    }
    for (expected, found) in [(n, offsets.len()), (n, x0.dim())] {
        if expected != found {
            return Err(Error::DimensionMismatch { expected, found });
        }
    }
    for &s in &slopes {
        check_slope(s)?;
    }
    let sandwich = AlgebraElement::diag(&slopes.iter().map(|s| s.abs().sqrt()).collect::<Vec<_>>())?;
    let certificate = make_certificate(sandwich)?;
    let exact = Point::new(slopes.iter().zip(&offsets).map(|(s, o)| o / (1.0 - s)).collect())?;
    let space = MetricSpaceInstance::new(
        format!("coordinatewise diag(|x_i - y_i|), n = {n}"),
        n,
        BoundingBox::default_for(n),
        Arc::new(|x: &Point, y: &Point| {
            AlgebraElement::diag(&x.coords().iter().zip(y.coords()).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
        }),
    )?;
    let map = MapInstance::new(
        "coordinatewise affine",
        Arc::new(move |x: &Point| {
            Point::unchecked(
                x.coords()
                    .iter()
                    .zip(&slopes)
                    .zip(&offsets)
                    .map(|((c, s), o)| s * c + o)
                    .collect(),
            )
        }),
    );
    Ok(Problem {
        space,
        map,
        certificate,
        x0,
        exact_fixed_point: Some(exact),
    })
}

/// Broken on purpose: `d(x, y) = x - y` is not positive when `x < y`.
pub fn build_signed_scalar(slope: f64, offset: f64, x0: f64) -> Result<Problem> {
    let valid = build_scalar(slope, offset, x0)?;
    let space = MetricSpaceInstance::new(
        "signed scalar x - y (broken)",
        1,
        BoundingBox::default_for(1),
        Arc::new(|x: &Point, y: &Point| AlgebraElement::from_real(1, &[x.coords()[0] - y.coords()[0]])),
    )?;
    Ok(Problem { space, ..valid })
}

/// Broken on purpose: the weight `diag(1, -1)` is indefinite. Bypasses the
/// positivity check of [`build_weighted`].
pub fn build_indefinite_weight() -> Result<Problem> {
    let weight = AlgebraElement::diag(&[1.0, -1.0])?;
    let space = weighted_space(weight, 1)?.with_description("weighted by indefinite diag(1, -1) (broken)");
    Ok(Problem {
        space,
        map: affine_map(0.5, vec![0.0]),
        certificate: make_certificate(AlgebraElement::scalar(2, 0.5f64.sqrt()))?,
        x0: Point::scalar(1.0)?,
        exact_fixed_point: Some(Point::scalar(0.0)?),
    })
}

/// Names of the certified built-ins, in catalog order.
pub const VALID_BUILTINS: [&str; 7] = [
    "scalar-half",
    "scalar-constant",
    "scalar-oscillating",
    "weighted-rotation",
    "affine-weighted",
    "coordinatewise",
    "coordinatewise-skewed",
];

pub const BROKEN_BUILTINS: [&str; 2] = ["broken-signed", "broken-indefinite"];

pub fn builtin(name: &str) -> Option<Result<Problem>> {
    let pt = |v: &[f64]| Point::new(v.to_vec());
    let problem = match name {
        "scalar-half" => build_scalar(0.5, 1.0, 0.0),
        "scalar-constant" => build_scalar(0.0, 3.0, -4.0),
        "scalar-oscillating" => build_scalar(-0.9, 0.0, 1.0),
        "weighted-rotation" => (|| {
            // 0.5 times a rotation by 0.3 rad, plus an offset
            let (s, c) = 0.3f64.sin_cos();
            let m = vec![0.5 * c, -0.5 * s, 0.5 * s, 0.5 * c];
            let weight = AlgebraElement::from_real(2, &[2.0, 1.0, 1.0, 2.0])?;
            build_linear_weighted(weight, 0.5, m, vec![1.0, -2.0], pt(&[0.0, 0.0])?)
        })(),
        "affine-weighted" => AlgebraElement::diag(&[1.0, 2.0])
            .and_then(|w| build_affine(w, 0.5, vec![1.0], Point::scalar(0.0)?)),
        "coordinatewise" => pt(&[0.0, 0.0]).and_then(|x0| build_coordinatewise(vec![0.5, 0.25], vec![1.0, 3.0], x0)),
        "coordinatewise-skewed" => {
            pt(&[5.0, -5.0]).and_then(|x0| build_coordinatewise(vec![0.9, 0.1], vec![1.0, -1.0], x0))
        }
        "broken-signed" => build_signed_scalar(0.5, 1.0, 0.0),
        "broken-indefinite" => build_indefinite_weight(),
        _ => return None,
    };
    Some(problem.map(|p| {
        let description = format!("{name}: {}", p.space.description());
        p.with_description(description)
    }))
}

/// Instance kinds accepted in instance files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Scalar,
    Weighted,
    Coordinatewise,
    Affine,
    /// The broken signed metric, kept for verifier demos.
    SignedScalar,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Scalar => "scalar",
            InstanceKind::Weighted => "weighted",
            InstanceKind::Coordinatewise => "coordinatewise",
            InstanceKind::Affine => "affine",
            InstanceKind::SignedScalar => "signed_scalar",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            InstanceKind::Scalar,
            InstanceKind::Weighted,
            InstanceKind::Coordinatewise,
            InstanceKind::Affine,
            InstanceKind::SignedScalar,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceParams {
    Scalar { slope: f64, offset: f64 },
    SignedScalar { slope: f64, offset: f64 },
    Weighted {
        weight: AlgebraElement,
        lipschitz: f64,
        map_matrix: Vec<f64>,
        map_offset: Vec<f64>,
    },
    Affine {
        weight: AlgebraElement,
        slope: f64,
        offset: Vec<f64>,
    },
    Coordinatewise { slopes: Vec<f64>, offsets: Vec<f64> },
}

impl InstanceParams {
    pub fn kind(&self) -> InstanceKind {
        match self {
            InstanceParams::Scalar { .. } => InstanceKind::Scalar,
            InstanceParams::SignedScalar { .. } => InstanceKind::SignedScalar,
            InstanceParams::Weighted { .. } => InstanceKind::Weighted,
            InstanceParams::Affine { .. } => InstanceKind::Affine,
            InstanceParams::Coordinatewise { .. } => InstanceKind::Coordinatewise,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub pos_tol: Option<f64>,
    pub herm_tol: Option<f64>,
    pub conv_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: ToleranceConfig) -> Result<ToleranceConfig> {
        ToleranceConfig::new(
            self.pos_tol.unwrap_or(base.pos_tol()),
            self.herm_tol.unwrap_or(base.herm_tol()),
            self.conv_tol.unwrap_or(base.conv_tol()),
        )
    }
}

/// A fully described instance, as read from an instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub description: Option<String>,
    pub params: InstanceParams,
    pub x0: Point,
    pub sandwich: Option<AlgebraElement>,
    pub bounding_box: Option<BoundingBox>,
    pub tolerances: ToleranceOverrides,
}

impl InstanceSpec {
    pub fn kind(&self) -> InstanceKind {
        self.params.kind()
    }

    pub fn build(&self) -> Result<Problem> {
        let scalar_start = || -> Result<f64> {
            match self.x0.coords() {
                [x] => Ok(*x),
                other => Err(Error::DimensionMismatch { expected: 1, found: other.len() }),
            }
        };
        let mut problem = match &self.params {
            InstanceParams::Scalar { slope, offset } => build_scalar(*slope, *offset, scalar_start()?)?,
            InstanceParams::SignedScalar { slope, offset } => build_signed_scalar(*slope, *offset, scalar_start()?)?,
            InstanceParams::Weighted { weight, lipschitz, map_matrix, map_offset } => build_linear_weighted(
                weight.clone(),
                *lipschitz,
                map_matrix.clone(),
                map_offset.clone(),
                self.x0.clone(),
            )?,
            InstanceParams::Affine { weight, slope, offset } => {
                build_affine(weight.clone(), *slope, offset.clone(), self.x0.clone())?
            }
            InstanceParams::Coordinatewise { slopes, offsets } => {
                build_coordinatewise(slopes.clone(), offsets.clone(), self.x0.clone())?
            }
        };
        if let Some(a) = &self.sandwich {
            problem = problem.with_sandwich(a.clone())?;
        }
        if let Some(b) = &self.bounding_box {
            problem = problem.with_bounding_box(b.clone())?;
        }
        if let Some(d) = &self.description {
            problem = problem.with_description(d.clone());
        }
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::verify_contraction;
    use crate::metric::check_axioms;
    use crate::solver::{picard_solve, DEFAULT_MAX_ITER};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn solve(p: &Problem) -> crate::solver::FixedPointResult {
        picard_solve(&p.space, &p.map, &p.certificate, &p.x0, &tol(), DEFAULT_MAX_ITER).unwrap()
    }

    #[test]
    fn scalar_constant_map_fixes_in_one_step() {
        let p = build_scalar(0.0, 3.0, -4.0).unwrap();
        let r = solve(&p);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.point.coords(), &[3.0]);
        assert_eq!(r.apriori_bound, 0.0);
    }

    #[test]
    fn scalar_half_fixes_at_two() {
        let p = build_scalar(0.5, 1.0, 0.0).unwrap();
        assert_eq!(p.exact_fixed_point.as_ref().unwrap().coords(), &[2.0]);
        let r = solve(&p);
        assert!((r.point.coords()[0] - 2.0).abs() <= r.aposteriori_bound);
    }

    #[test]
    fn scalar_negative_slope_oscillates() {
        let p = build_scalar(-0.9, 0.0, 1.0).unwrap();
        let x1 = p.map.apply(&p.x0);
        let x2 = p.map.apply(&x1);
        assert!(x1.coords()[0] < 0.0 && x2.coords()[0] > 0.0);
        let r = solve(&p);
        assert!(r.converged);
        assert!(r.point.coords()[0].abs() <= r.aposteriori_bound);
    }

    #[test]
    fn scalar_rejects_unit_slope() {
        assert_eq!(build_scalar(1.0, 0.0, 0.0).unwrap_err(), Error::CertificateInvalid { norm: 1.0 });
        assert!(build_scalar(-1.5, 0.0, 0.0).is_err());
        assert!(build_scalar(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn weighted_examples() {
        let half = affine_map(0.5, vec![0.0, 0.0]);
        let x0 = Point::new(vec![1.0, 1.0]).unwrap();
        let p = build_weighted(AlgebraElement::unit(2), 0.5, half, x0).unwrap();
        let a = Point::new(vec![0.0, 0.0]).unwrap();
        let b = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(p.space.eval(&a, &b).unwrap(), AlgebraElement::scalar(2, 5.0));

        let p = build_affine(AlgebraElement::diag(&[1.0, 2.0]).unwrap(), 0.5, vec![1.0], Point::scalar(0.0).unwrap())
            .unwrap();
        let d = p.space.eval(&Point::scalar(0.0).unwrap(), &Point::scalar(3.0).unwrap()).unwrap();
        assert_eq!(d, AlgebraElement::diag(&[3.0, 6.0]).unwrap());

        let weight = AlgebraElement::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let p = build_affine(weight, 0.5, vec![0.0], Point::scalar(1.0).unwrap()).unwrap();
        assert!((p.certificate.norm_a() - 0.5f64.sqrt()).abs() < 1e-15);
        let report = verify_contraction(&p.space, &p.map, &p.certificate, 0, 1000, &tol()).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn weighted_rejects_bad_weight_and_constant() {
        let map = affine_map(0.5, vec![0.0]);
        let x0 = Point::scalar(0.0).unwrap();
        let err = build_weighted(AlgebraElement::diag(&[1.0, -1.0]).unwrap(), 0.5, map.clone(), x0.clone());
        assert_eq!(err.unwrap_err(), Error::WeightNotPositive { min_eigenvalue: -1.0 });
        let err = build_weighted(AlgebraElement::unit(2), 1.0, map.clone(), x0.clone());
        assert!(matches!(err, Err(Error::CertificateInvalid { .. })));
        assert!(build_weighted(AlgebraElement::unit(2), -0.1, map, x0).is_err());
    }

    #[test]
    fn linear_weighted_checks_map_norm() {
        let x0 = Point::new(vec![0.0, 0.0]).unwrap();
        let m = vec![0.0, 0.6, 0.0, 0.0];
        assert!(build_linear_weighted(AlgebraElement::unit(1), 0.5, m.clone(), vec![0.0, 0.0], x0.clone()).is_err());
        assert!(build_linear_weighted(AlgebraElement::unit(1), 0.6, m, vec![0.0, 0.0], x0).is_ok());
    }

    #[test]
    fn coordinatewise_examples() {
        let x0 = Point::new(vec![0.0, 0.0]).unwrap();
        let p = build_coordinatewise(vec![0.5, 0.25], vec![1.0, 3.0], x0.clone()).unwrap();
        assert_eq!(p.exact_fixed_point.as_ref().unwrap().coords(), &[2.0, 4.0]);
        let r = solve(&p);
        let err = p.space.distance_norm(&r.point, p.exact_fixed_point.as_ref().unwrap()).unwrap();
        assert!(err <= r.aposteriori_bound);

        let p = build_coordinatewise(vec![0.0, 0.0], vec![7.0, -2.0], x0.clone()).unwrap();
        let r = solve(&p);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.point.coords(), &[7.0, -2.0]);

        let p = build_coordinatewise(vec![0.9, 0.1], vec![0.0, 0.0], x0.clone()).unwrap();
        assert!((p.certificate.norm_a() - 0.9f64.sqrt()).abs() < 1e-15);
        assert!((p.certificate.factor() - 0.9).abs() < 1e-15);
        // not a multiple of the unit
        assert_ne!(p.certificate.sandwich().get(0, 0), p.certificate.sandwich().get(1, 1));

        assert!(build_coordinatewise(vec![0.5, 1.0], vec![0.0, 0.0], x0.clone()).is_err());
        assert!(build_coordinatewise(vec![0.5], vec![0.0, 0.0], x0).is_err());
    }

    #[test]
    fn every_valid_builtin_is_certified() {
        for name in VALID_BUILTINS {
            let p = builtin(name).unwrap().unwrap();
            let axioms = check_axioms(&p.space, 0, 1000, &tol()).unwrap();
            assert!(axioms.passed(), "{name}: {axioms:?}");
            let contraction = verify_contraction(&p.space, &p.map, &p.certificate, 0, 1000, &tol()).unwrap();
            assert!(contraction.passed(), "{name}: {contraction:?}");
            assert!(solve(&p).converged, "{name}");
        }
    }

    #[test]
    fn broken_builtins_fail_positivity() {
        for name in BROKEN_BUILTINS {
            let p = builtin(name).unwrap().unwrap();
            let axioms = check_axioms(&p.space, 0, 1000, &tol()).unwrap();
            assert!(axioms.positivity.failures > 0, "{name}");
        }
        assert!(builtin("no-such-instance").is_none());
    }

    #[test]
    fn spec_build_applies_overrides() {
        let spec = InstanceSpec {
            description: Some("custom".into()),
            params: InstanceParams::Scalar { slope: 0.5, offset: 1.0 },
            x0: Point::scalar(0.0).unwrap(),
            sandwich: Some(AlgebraElement::scalar(1, 0.75)),
            bounding_box: Some(BoundingBox::cube(1, -1.0, 1.0).unwrap()),
            tolerances: ToleranceOverrides::default(),
        };
        let p = spec.build().unwrap();
        assert_eq!(p.certificate.norm_a(), 0.75);
        assert_eq!(p.space.bounding_box().hi(), &[1.0]);
        assert_eq!(p.space.description(), "custom");

        let bad = InstanceSpec { sandwich: Some(AlgebraElement::scalar(1, 1.0)), ..spec.clone() };
        assert!(matches!(bad.build(), Err(Error::CertificateInvalid { .. })));
        let bad = InstanceSpec { sandwich: Some(AlgebraElement::scalar(2, 0.1)), ..spec };
        assert!(bad.build().is_err());
    }
}

//! Instance file format.
//!
//! ```text
//! # comments run to end of line
//! kind = weighted
//! description = two-dimensional rotation
//! weight =
//! 2
//! 2 1
//! 1 2
//! lipschitz = 0.5
//! map_matrix =
//! 2
//! 0.4 -0.3
//! 0.3 0.4
//! map_offset = 1 -2
//! x0 = 0 0
//! box = -10 10
//! ```
//!
//! Scalars and vectors sit on the key line. A matrix-valued key has an empty
//! value and is followed by a matrix block in the text matrix format.
//! Recognised keys per kind:
//!
//! | kind             | required                                     | optional |
//! |------------------|----------------------------------------------|----------|
//! | `scalar`         | `slope`, `offset`, `x0`                      |          |
//! | `signed_scalar`  | `slope`, `offset`, `x0`                      |          |
//! | `affine`         | `weight`, `slope`, `offset`, `x0`            |          |
//! | `weighted`       | `weight`, `lipschitz`, `map_matrix`, `map_offset`, `x0` | |
//! | `coordinatewise` | `slopes`, `offsets`, `x0`                    |          |
//!
//! Every kind also accepts `description`, `algebra_dim`, `point_dim`,
//! `sandwich`, `box`, `pos_tol`, `herm_tol` and `conv_tol`. The box is
//! either `lo hi` for every coordinate or `lo_1 hi_1 ... lo_k hi_k`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::algebra::text::{parse_dim, parse_real, parse_rows};
use crate::algebra::AlgebraElement;
use crate::error::Error;
use crate::instances::{InstanceKind, InstanceParams, InstanceSpec, Problem, ToleranceOverrides};
use crate::point::{BoundingBox, Point};

const MATRIX_KEYS: [&str; 3] = ["weight", "sandwich", "map_matrix"];
const VALUE_KEYS: [&str; 15] = [
    "kind",
    "description",
    "algebra_dim",
    "point_dim",
    "slope",
    "offset",
    "slopes",
    "offsets",
    "lipschitz",
    "map_offset",
    "x0",
    "box",
    "pos_tol",
    "herm_tol",
    "conv_tol",
];

/// A parse or validation failure, positioned by line and field where known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, field: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(line), Some(field)) => write!(f, "line {line}, field `{field}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(field)) => write!(f, "field `{field}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug)]
enum Value {
    Text(String),
    Matrix(AlgebraElement),
}

struct Entry {
    line: usize,
    value: Value,
}

struct Fields(HashMap<String, Entry>);

impl Fields {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|e| e.line)
    }

    fn text(&self, key: &str) -> Result<Option<(usize, &str)>, ParseError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Entry { line, value: Value::Text(t) }) => Ok(Some((*line, t.as_str()))),
            Some(Entry { line, .. }) => Err(ParseError::at(*line, key, "expected a value on the key line")),
        }
    }

    fn require_text(&self, key: &str) -> Result<(usize, &str), ParseError> {
        self.text(key)?.ok_or_else(|| missing(key))
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ParseError> {
        self.text(key)?
            .map(|(line, t)| parse_real(t).map_err(|m| ParseError::at(line, key, m)))
            .transpose()
    }

    fn require_real(&self, key: &str) -> Result<f64, ParseError> {
        self.real(key)?.ok_or_else(|| missing(key))
    }

    fn vector(&self, key: &str) -> Result<Option<Vec<f64>>, ParseError> {
        let Some((line, t)) = self.text(key)? else {
            return Ok(None);
        };
        let v = t
            .split_whitespace()
            .map(parse_real)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| ParseError::at(line, key, m))?;
        if v.is_empty() {
            return Err(ParseError::at(line, key, "expected at least one number"));
        }
        Ok(Some(v))
    }

    fn require_vector(&self, key: &str) -> Result<Vec<f64>, ParseError> {
        self.vector(key)?.ok_or_else(|| missing(key))
    }

    fn matrix(&self, key: &str) -> Result<Option<AlgebraElement>, ParseError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Entry { value: Value::Matrix(m), .. }) => Ok(Some(m.clone())),
            Some(Entry { line, .. }) => Err(ParseError::at(*line, key, "expected a matrix block")),
        }
    }

    fn require_matrix(&self, key: &str) -> Result<AlgebraElement, ParseError> {
        self.matrix(key)?.ok_or_else(|| missing(key))
    }

    fn dim(&self, key: &str) -> Result<Option<(usize, usize)>, ParseError> {
        self.text(key)?
            .map(|(line, t)| parse_dim(t).map(|d| (line, d)).map_err(|m| ParseError::at(line, key, m)))
            .transpose()
    }
}

fn missing(key: &str) -> ParseError {
    ParseError {
        line: None,
        field: Some(key.to_string()),
        message: "missing required field".into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(before, _)| before)
}

fn tokenize(text: &str) -> Result<Fields, ParseError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut fields: HashMap<String, Entry> = HashMap::new();
    let mut cursor = 0;
    while cursor < lines.len() {
        let (line, content) = lines[cursor];
        cursor += 1;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError {
                line: Some(line),
                field: None,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
        let (key, value) = (key.trim(), value.trim());
        if fields.contains_key(key) {
            return Err(ParseError::at(line, key, "duplicate field"));
        }
        let value = if MATRIX_KEYS.contains(&key) {
            if !value.is_empty() {
                return Err(ParseError::at(line, key, "matrix fields take a block on the following lines"));
            }
            let (dim_line, header) = *lines
                .get(cursor)
                .ok_or_else(|| ParseError::at(line, key, "missing matrix block"))?;
            let n = parse_dim(header).map_err(|m| ParseError::at(dim_line, key, m))?;
            cursor += 1;
            let rows = lines.get(cursor..cursor + n).ok_or_else(|| {
                ParseError::at(dim_line, key, format!("matrix block needs {n} rows"))
            })?;
            cursor += n;
            let m = parse_rows(n, rows).map_err(|e| ParseError::at(e.line, key, e.message))?;
            Value::Matrix(m)
        } else if VALUE_KEYS.contains(&key) {
            Value::Text(value.to_string())
        } else {
            return Err(ParseError::at(line, key, "unknown field"));
        };
        fields.insert(key.to_string(), Entry { line, value });
    }
    Ok(Fields(fields))
}

fn real_entries(m: &AlgebraElement, line: Option<usize>, key: &str) -> Result<Vec<f64>, ParseError> {
    if m.entries().iter().any(|z| z.im != 0.0) {
        return Err(ParseError {
            line,
            field: Some(key.into()),
            message: "map matrix must be real".into(),
        });
    }
    Ok(m.entries().iter().map(|z| z.re).collect())
}

fn parse_box(fields: &Fields, point_dim: usize) -> Result<Option<BoundingBox>, ParseError> {
    let Some(v) = fields.vector("box")? else {
        return Ok(None);
    };
    let line = fields.line_of("box");
    let fail = |m: String| ParseError { line, field: Some("box".into()), message: m };
    let (lo, hi): (Vec<f64>, Vec<f64>) = if v.len() == 2 {
        (vec![v[0]; point_dim], vec![v[1]; point_dim])
    } else if v.len() == 2 * point_dim {
        v.chunks_exact(2).map(|c| (c[0], c[1])).unzip()
    } else {
        return Err(fail(format!("expected 2 or {} numbers, found {}", 2 * point_dim, v.len())));
    };
    BoundingBox::new(lo, hi).map(Some).map_err(|e| fail(e.to_string()))
}

/// Parses and fully validates an instance document: every builder
/// precondition is re-checked by building the problem once.
pub fn parse_instance_str(text: &str) -> Result<InstanceSpec, ParseError> {
    let fields = tokenize(text)?;
    let (kind_line, kind_name) = fields.require_text("kind")?;
    let kind = InstanceKind::from_name(kind_name)
        .ok_or_else(|| ParseError::at(kind_line, "kind", format!("unknown kind `{kind_name}`")))?;

    let x0_coords = fields.require_vector("x0")?;
    let x0_line = fields.line_of("x0");
    let x0 = Point::new(x0_coords).map_err(|e| ParseError {
        line: x0_line,
        field: Some("x0".into()),
        message: e.to_string(),
    })?;

    let params = match kind {
        InstanceKind::Scalar => InstanceParams::Scalar {
            slope: fields.require_real("slope")?,
            offset: fields.require_real("offset")?,
        },
        InstanceKind::SignedScalar => InstanceParams::SignedScalar {
            slope: fields.require_real("slope")?,
            offset: fields.require_real("offset")?,
        },
        InstanceKind::Affine => InstanceParams::Affine {
            weight: fields.require_matrix("weight")?,
            slope: fields.require_real("slope")?,
            offset: fields.require_vector("offset")?,
        },
        InstanceKind::Weighted => {
            let m = fields.require_matrix("map_matrix")?;
            InstanceParams::Weighted {
                weight: fields.require_matrix("weight")?,
                lipschitz: fields.require_real("lipschitz")?,
                map_matrix: real_entries(&m, fields.line_of("map_matrix"), "map_matrix")?,
                map_offset: fields.require_vector("map_offset")?,
            }
        }
        InstanceKind::Coordinatewise => InstanceParams::Coordinatewise {
            slopes: fields.require_vector("slopes")?,
            offsets: fields.require_vector("offsets")?,
        },
    };

    let (expected_algebra, expected_point) = match &params {
        InstanceParams::Scalar { .. } | InstanceParams::SignedScalar { .. } => (1, 1),
        InstanceParams::Affine { weight, .. } | InstanceParams::Weighted { weight, .. } => {
            (weight.dim(), x0.dim())
        }
        InstanceParams::Coordinatewise { slopes, .. } => (slopes.len(), slopes.len()),
    };
    for (key, expected) in [("algebra_dim", expected_algebra), ("point_dim", expected_point)] {
        if let Some((line, declared)) = fields.dim(key)? {
            if declared != expected {
                return Err(ParseError::at(
                    line,
                    key,
                    format!("declared {declared} but the instance implies {expected}"),
                ));
            }
        }
    }
    if x0.dim() != expected_point {
        return Err(ParseError {
            line: x0_line,
            field: Some("x0".into()),
            message: format!("expected {expected_point} coordinates, found {}", x0.dim()),
        });
    }

    let tolerances = ToleranceOverrides {
        pos_tol: fields.real("pos_tol")?,
        herm_tol: fields.real("herm_tol")?,
        conv_tol: fields.real("conv_tol")?,
    };
    if let Err(e) = tolerances.apply(Default::default()) {
        return Err(ParseError { line: None, field: None, message: e.to_string() });
    }

    let spec = InstanceSpec {
        description: fields.text("description")?.map(|(_, t)| t.to_string()),
        params,
        x0,
        sandwich: fields.matrix("sandwich")?,
        bounding_box: parse_box(&fields, expected_point)?,
        tolerances,
    };
    spec.build().map_err(|e| locate_build_error(&fields, &spec, e))?;
    Ok(spec)
}

/// Attaches a builder failure to the field that caused it.
fn locate_build_error(fields: &Fields, spec: &InstanceSpec, e: Error) -> ParseError {
    let field = match (&e, spec.kind()) {
        (Error::WeightNotPositive { .. }, _) => Some("weight"),
        (Error::CertificateInvalid { .. }, _) if spec.sandwich.is_some() => Some("sandwich"),
        (Error::DimensionMismatch { .. }, _) if spec.sandwich.is_some() => Some("sandwich"),
        (Error::CertificateInvalid { .. }, InstanceKind::Weighted) => Some("lipschitz"),
        (Error::CertificateInvalid { .. }, InstanceKind::Coordinatewise) => Some("slopes"),
        (Error::CertificateInvalid { .. }, _) => Some("slope"),
        (Error::InvalidInput(_), InstanceKind::Weighted) => Some("map_matrix"),
        (Error::DimensionMismatch { .. }, InstanceKind::Coordinatewise) => Some("offsets"),
        (Error::DimensionMismatch { .. }, InstanceKind::Affine) => Some("offset"),
        (Error::DimensionMismatch { .. }, InstanceKind::Weighted) => Some("map_offset"),
        _ => None,
    };
    ParseError {
        line: field.and_then(|f| fields.line_of(f)),
        field: field.map(str::to_string),
        message: e.to_string(),
    }
}

pub fn parse_instance(path: &Path) -> Result<InstanceSpec, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        line: None,
        field: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_instance_str(&text)
}

pub fn load_problem(path: &Path) -> Result<(InstanceSpec, Problem), ParseError> {
    let spec = parse_instance(path)?;
    let problem = spec.build().map_err(|e| ParseError { line: None, field: None, message: e.to_string() })?;
    Ok((spec, problem))
}

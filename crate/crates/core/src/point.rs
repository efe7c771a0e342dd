use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A point of the underlying set `X`, a finite real vector.
#[derive(Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("points need at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point"));
        }
        Ok(Self(coords))
    }

    /// Like [`Point::new`] but lets non-finite coordinates through. Maps use
    /// it so that the solver can detect and report divergence.
    pub fn unchecked(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn euclidean_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.0)
    }
}

/// Axis-aligned sampling region `[lo_i, hi_i]` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

pub const DEFAULT_BOX_HALF_WIDTH: f64 = 10.0;

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidInput(format!(
                "bounding box needs matching non-empty bounds, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::InvalidInput(format!("invalid bounding interval [{l}, {h}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    /// `[-10, 10]^dim`.
    pub fn default_for(dim: usize) -> Self {
        Self::cube(dim, -DEFAULT_BOX_HALF_WIDTH, DEFAULT_BOX_HALF_WIDTH)
            .expect("default box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// Per-coordinate widths `hi - lo`.
    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    /// `count` points drawn uniformly from the box with a seeded ChaCha8
    /// stream; identical seeds give identical samples on every platform.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let coords = self
                    .lo
                    .iter()
                    .zip(&self.hi)
                    .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
                    .collect();
                Point(coords)
            })
            .collect()
    }
}

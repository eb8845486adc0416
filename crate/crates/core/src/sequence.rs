use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finite complex sequence. Zeros are structural: an element belongs to
/// the support exactly when it is not `0 + 0j`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexSequence {
    values: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of non-zero elements.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Largest elementwise distance relative to the larger peak magnitude.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let scale = self
            .values
            .iter()
            .chain(other.values.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.max_rel_diff(other) <= rel_tol
    }
}

impl From<Vec<Complex64>> for ComplexSequence {
    fn from(values: Vec<Complex64>) -> Self {
        Self::new(values)
    }
}

/// `ξ^(r + j·i)` with `ξ = e^(2π/H)`; `r` scales the amplitude and `i` is a
/// phase exponent read modulo `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UnitExpElement {
    Zero,
    Exp { r: f64, i: f64 },
}

impl UnitExpElement {
    pub fn new(r: f64, i: f64) -> Self {
        Self::Exp { r, i }
    }

    pub fn to_complex(self, h: u32) -> Complex64 {
        match self {
            Self::Zero => Complex64::new(0.0, 0.0),
            Self::Exp { r, i } => {
                let unit = 2.0 * PI / h as f64;
                let phase = i.rem_euclid(h as f64) * unit;
                Complex64::from_polar((unit * r).exp(), phase)
            }
        }
    }
}

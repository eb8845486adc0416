//! Generalized Boolean functions in algebraic normal form.
//!
//! A function over `m` variables is stored as a map from monomial mask to a
//! real coefficient. Mask bit `m - j` selects variable `x_j`, so variable
//! `x_1` is the most significant bit, matching the lexicographic indexing
//! `x = Σ x_j 2^(m-j)` used to list a function as a sequence. With this
//! convention a monomial with mask `k` is 1 at point `x` exactly when
//! `x & k == k`.
//!
//! Coefficients are kept as `f64` even when the function is read over `Z_H`;
//! reduction happens at evaluation time only.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How values of a function are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulus {
    /// Plain real-valued sums.
    Real,
    /// Values are reduced into `[0, H)`.
    Mod(u32),
}

/// A point of `{0,1}^m`, `x_1` being the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    m: usize,
    index: usize,
}

impl BitVector {
    pub fn new(m: usize, index: usize) -> Result<Self> {
        if m >= usize::BITS as usize || index >> m != 0 {
            return Err(Error::InvalidParams(format!(
                "index {index} does not fit in {m} bits"
            )));
        }
        Ok(Self { m, index })
    }

    /// Builds the point from `(x_1, ..., x_m)`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidParams(format!("bit value {b}")));
            }
            index = (index << 1) | b as usize;
        }
        Ok(Self {
            m: bits.len(),
            index,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Value of `x_j` for `1 <= j <= m`.
    pub fn bit(&self, j: usize) -> u8 {
        debug_assert!(j >= 1 && j <= self.m);
        ((self.index >> (self.m - j)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.m).map(|j| self.bit(j)).collect()
    }
}

/// Value of `x_j` at lexicographic index `x` for `m` variables.
#[inline]
pub fn bit_of(m: usize, x: usize, j: usize) -> u8 {
    ((x >> (m - j)) & 1) as u8
}

/// Mask selecting variable `x_j`.
#[inline]
pub fn var_mask(m: usize, j: usize) -> usize {
    1 << (m - j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBooleanFunction {
    m: usize,
    modulus: Modulus,
    coeffs: BTreeMap<usize, f64>,
}

impl GeneralizedBooleanFunction {
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            modulus: Modulus::Real,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Self::zero(m).with_term(0, c)
    }

    /// The single-variable function `x_j`, `1 <= j <= m`.
    pub fn var(m: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= m, "variable x_{j} out of range for m = {m}");
        Self::zero(m).with_term(var_mask(m, j), 1.0)
    }

    /// `1 - x_j`.
    pub fn not_var(m: usize, j: usize) -> Self {
        Self::constant(m, 1.0).sub(&Self::var(m, j))
    }

    /// Builds a function from explicit `(mask, coefficient)` pairs.
    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut f = Self::zero(m);
        for (mask, c) in terms {
            if mask >> m != 0 {
                return Err(Error::InvalidParams(format!(
                    "mask {mask:#b} has bits beyond m = {m}"
                )));
            }
            f = f.with_term(mask, c);
        }
        Ok(f)
    }

    fn with_term(mut self, mask: usize, c: f64) -> Self {
        self.add_term(mask, c);
        self
    }

    fn add_term(&mut self, mask: usize, c: f64) {
        let entry = self.coeffs.entry(mask).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    pub fn with_modulus(mut self, modulus: Modulus) -> Self {
        self.modulus = modulus;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs.get(&mask).copied().unwrap_or(0.0)
    }

    /// Non-zero `(mask, coefficient)` pairs in increasing mask order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "adding functions of different arity");
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.m).with_modulus(self.modulus);
        if c != 0.0 {
            for (k, v) in self.terms() {
                out.add_term(k, v * c);
            }
        }
        out
    }

    /// Pointwise product. Variables are idempotent, so monomial masks combine
    /// by bitwise or.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "multiplying functions of different arity");
        let mut out = Self::zero(self.m).with_modulus(self.modulus);
        for (ka, ca) in self.terms() {
            for (kb, cb) in other.terms() {
                out.add_term(ka | kb, ca * cb);
            }
        }
        out
    }

    /// Evaluates at lexicographic index `x` without dimension checks.
    pub fn eval_index(&self, x: usize) -> f64 {
        let raw: f64 = self
            .coeffs
            .iter()
            .filter(|(&k, _)| x & k == k)
            .map(|(_, &c)| c)
            .sum();
        match self.modulus {
            Modulus::Real => raw,
            Modulus::Mod(h) => raw.rem_euclid(h as f64),
        }
    }

    pub fn eval(&self, x: &BitVector) -> Result<f64> {
        if x.m() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.m(),
            });
        }
        Ok(self.eval_index(x.index()))
    }

    /// Lists the function over `{0,1}^m` in lexicographic order.
    pub fn to_sequence(&self) -> Vec<f64> {
        (0..1usize << self.m).map(|x| self.eval_index(x)).collect()
    }

    /// True when every value is exactly 0 or 1.
    pub fn is_boolean_valued(&self) -> bool {
        self.first_non_boolean().is_none()
    }

    fn first_non_boolean(&self) -> Option<usize> {
        (0..1usize << self.m).find(|&x| {
            let v = self.eval_index(x);
            v != 0.0 && v != 1.0
        })
    }

    /// Expands `c·(f ± g)_2` into `c·f + c·g − 2c·f·g` over the reals.
    ///
    /// Both inputs must be `{0,1}`-valued. The sign inside the reduction does
    /// not matter modulo 2, so a single form covers both cases.
    pub fn combine_mod2(f: &Self, g: &Self, scalar: f64) -> Result<Self> {
        if f.m != g.m {
            return Err(Error::DimensionMismatch {
                expected: f.m,
                got: g.m,
            });
        }
        for h in [f, g] {
            if let Some(index) = h.first_non_boolean() {
                return Err(Error::NotBoolean { index });
            }
        }
        let f = f.clone().with_modulus(Modulus::Real);
        let g = g.clone().with_modulus(Modulus::Real);
        Ok(f.add(&g).sub(&f.mul(&g).scale(2.0)).scale(scalar))
    }
}

impl fmt::Display for GeneralizedBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (mask, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = (1..=self.m)
                .filter(|&j| mask & var_mask(self.m, j) != 0)
                .map(|j| format!("x{j}"))
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c == 1.0 {
                write!(f, "{}", vars.join("·"))?;
            } else {
                write!(f, "{c}·{}", vars.join("·"))?;
            }
        }
        Ok(())
    }
}

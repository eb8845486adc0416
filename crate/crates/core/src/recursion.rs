//! Construction sequences of a two-operator polynomial recursion.
//!
//! The recursion
//!
//! ```text
//! f_n = O11(f_{n-1}) + O12(g_{n-1})·w^(2^ψ_n)
//! g_n = O21(f_{n-1}) + O22(g_{n-1})·w^(2^ψ_n)
//! ```
//!
//! picks each `Oij` from a pair `{O0, O1}` of linear operators at step `n`.
//! After `m` steps, the coefficient of `w^x` is a composition of one operator
//! per step, and which of the pair was used at step `n` is a Boolean
//! function of `x`. [`construction_anf`] gives that function in closed form;
//! [`symbolic_expand`] unrolls the recursion literally and serves as its
//! oracle.

use std::fmt;
use std::str::FromStr;

use crate::boolean::GeneralizedBooleanFunction as Gbf;
use crate::{Error, Result};

/// Largest `m` accepted by [`symbolic_expand`].
pub const SYMBOLIC_MAX_M: usize = 12;

/// Operator selector `(v11, v12, v21, v22)` for one recursion step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConfigurationVector {
    pub v11: u8,
    pub v12: u8,
    pub v21: u8,
    pub v22: u8,
}

impl ConfigurationVector {
    pub fn new(bits: [u8; 4]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams(format!(
                "configuration vector {bits:?} must be binary"
            )));
        }
        Ok(Self {
            v11: bits[0],
            v12: bits[1],
            v21: bits[2],
            v22: bits[3],
        })
    }

    /// The vector whose bits read `v11 v12 v21 v22` from most to least
    /// significant in `index` (`0..16`).
    pub fn from_index(index: u8) -> Self {
        assert!(index < 16);
        Self {
            v11: (index >> 3) & 1,
            v12: (index >> 2) & 1,
            v21: (index >> 1) & 1,
            v22: index & 1,
        }
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..16).map(Self::from_index)
    }

    pub fn bits(&self) -> [u8; 4] {
        [self.v11, self.v12, self.v21, self.v22]
    }
}

impl fmt::Display for ConfigurationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {} {} {}]", self.v11, self.v12, self.v21, self.v22)
    }
}

/// Step exponents `ψ`, a permutation of `{0, ..., m-1}`. Step `n` uses
/// `w^(2^ψ_n)` and touches variable `x_{π_n}` with `π_n = m − ψ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationPsi(Vec<usize>);

impl PermutationPsi {
    pub fn new(psi: Vec<usize>) -> Result<Self> {
        let m = psi.len();
        if m == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; m];
        for &p in &psi {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{psi:?} is not a permutation of 0..{m}"
                )));
            }
        }
        Ok(Self(psi))
    }

    /// Builds `ψ` from the 1-based variable order `π`.
    pub fn from_pi(pi: &[usize]) -> Result<Self> {
        let m = pi.len();
        if pi.iter().any(|&p| p == 0 || p > m) {
            return Err(Error::InvalidPermutation(format!(
                "{pi:?} is not a permutation of 1..={m}"
            )));
        }
        Self::new(pi.iter().map(|&p| m - p).collect())
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `π_n = m − ψ_n` for `n = 1..=m`.
    pub fn pi(&self) -> Vec<usize> {
        let m = self.m();
        self.0.iter().map(|&p| m - p).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    F,
    G,
}

/// Boolean function telling which operator (`O0` or `O1`) step `n` applies
/// to the coefficient of `w^x` in the `branch` output.
///
/// For the last step only the branch itself matters. For earlier steps the
/// operator depends on whether step `n+1` consumed the `f` or the `g` branch,
/// i.e. on `x_{π_{n+1}}`, so both branches share one function.
pub fn construction_anf(
    n: usize,
    v: ConfigurationVector,
    psi: &PermutationPsi,
    branch: Branch,
) -> Result<Gbf> {
    let m = psi.m();
    if n == 0 || n > m {
        return Err(Error::StepOutOfRange { n, m });
    }
    let pi = psi.pi();
    let x_n = Gbf::var(m, pi[n - 1]);
    let not_n = Gbf::not_var(m, pi[n - 1]);
    let weight = |bit: u8, f: Gbf| if bit == 1 { f } else { Gbf::zero(m) };

    let out = if n == m {
        let (low, high) = match branch {
            Branch::F => (v.v11, v.v12),
            Branch::G => (v.v21, v.v22),
        };
        weight(low, not_n.clone()).add(&weight(high, x_n.clone()))
    } else {
        let x_next = Gbf::var(m, pi[n]);
        let not_next = Gbf::not_var(m, pi[n]);
        weight(v.v11, not_n.mul(&not_next))
            .add(&weight(v.v12, x_n.mul(&not_next)))
            .add(&weight(v.v21, not_n.mul(&x_next)))
            .add(&weight(v.v22, x_n.mul(&x_next)))
    };
    Ok(out)
}

/// Literal unrolling of the recursion over abstract operator symbols.
///
/// `f_words[x][n-1]` is the index (0 or 1) of the operator applied at step
/// `n` in the coefficient of `w^x` of `f_m`; likewise for `g_words`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicExpansion {
    m: usize,
    f_words: Vec<Vec<u8>>,
    g_words: Vec<Vec<u8>>,
}

impl SymbolicExpansion {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn words(&self, branch: Branch) -> &[Vec<u8>] {
        match branch {
            Branch::F => &self.f_words,
            Branch::G => &self.g_words,
        }
    }

    /// Construction sequence for step `n` (1-based) of `branch`.
    pub fn step_sequence(&self, branch: Branch, n: usize) -> Vec<u8> {
        self.words(branch).iter().map(|w| w[n - 1]).collect()
    }
}

pub fn symbolic_expand(
    configs: &[ConfigurationVector],
    psi: &PermutationPsi,
) -> Result<SymbolicExpansion> {
    let m = psi.m();
    if m > SYMBOLIC_MAX_M {
        return Err(Error::TooLarge {
            m,
            max: SYMBOLIC_MAX_M,
        });
    }
    if configs.len() != m {
        return Err(Error::LengthMismatch(configs.len(), m));
    }

    // Each polynomial is a list of (power of w, operator word) terms.
    let mut f: Vec<(usize, Vec<u8>)> = vec![(0, Vec::new())];
    let mut g = f.clone();
    for (step, v) in configs.iter().enumerate() {
        let shift = 1usize << psi.as_slice()[step];
        let apply = |terms: &[(usize, Vec<u8>)], op: u8, by: usize| {
            terms
                .iter()
                .map(|(p, w)| {
                    let mut w = w.clone();
                    w.push(op);
                    (p + by, w)
                })
                .collect::<Vec<_>>()
        };
        let mut next_f = apply(&f, v.v11, 0);
        next_f.extend(apply(&g, v.v12, shift));
        let mut next_g = apply(&f, v.v21, 0);
        next_g.extend(apply(&g, v.v22, shift));
        f = next_f;
        g = next_g;
    }

    let collect = |terms: Vec<(usize, Vec<u8>)>| {
        let mut words = vec![Vec::new(); 1 << m];
        for (p, w) in terms {
            debug_assert!(words[p].is_empty(), "powers of w collide");
            words[p] = w;
        }
        words
    };
    Ok(SymbolicExpansion {
        m,
        f_words: collect(f),
        g_words: collect(g),
    })
}

/// Operators of the complementary-pair recursion, each expressed as a
/// two-choice sub-recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    ScaleA,
    ScaleB,
    PhaseA,
    PhaseAConj,
    PhaseB,
    PhaseBConj,
    Sign,
    PhaseGolay,
    Shift,
    OrderA,
    OrderB,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 11] = [
        Self::ScaleA,
        Self::ScaleB,
        Self::PhaseA,
        Self::PhaseAConj,
        Self::PhaseB,
        Self::PhaseBConj,
        Self::Sign,
        Self::PhaseGolay,
        Self::Shift,
        Self::OrderA,
        Self::OrderB,
    ];
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "scaleA" => Self::ScaleA,
            "scaleB" => Self::ScaleB,
            "phaseA" => Self::PhaseA,
            "phaseAconj" => Self::PhaseAConj,
            "phaseB" => Self::PhaseB,
            "phaseBconj" => Self::PhaseBConj,
            "sign" => Self::Sign,
            "phaseGolay" => Self::PhaseGolay,
            "shift" => Self::Shift,
            "orderA" => Self::OrderA,
            "orderB" => Self::OrderB,
            other => {
                return Err(Error::InvalidParams(format!(
                    "unknown operator kind `{other}`"
                )))
            }
        })
    }
}

/// Configuration vector under which the sub-recursion of `kind` places its
/// non-trivial operator.
pub fn table1_config(kind: OperatorKind) -> ConfigurationVector {
    use OperatorKind::*;
    let bits = match kind {
        ScaleA => [1, 0, 0, 1],
        ScaleB => [0, 1, 1, 0],
        PhaseA => [1, 0, 0, 0],
        PhaseAConj => [0, 0, 0, 1],
        PhaseB => [0, 1, 0, 0],
        PhaseBConj => [0, 0, 1, 0],
        Sign => [0, 0, 0, 1],
        PhaseGolay | Shift | OrderB => [0, 1, 0, 1],
        OrderA => [1, 0, 1, 0],
    };
    ConfigurationVector {
        v11: bits[0],
        v12: bits[1],
        v21: bits[2],
        v22: bits[3],
    }
}

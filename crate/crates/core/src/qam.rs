//! Complementary sequences on `4s²`-QAM constellations.
//!
//! The constellation holds the points `±(2u−1) ± j(2v−1)` for
//! `u, v ∈ {1, …, s}`. Encoder outputs with `H = 4` sit on a rotated grid, so
//! every generated element is mapped onto the lattice by [`to_lattice`], a
//! multiplication by `1 + j`.
//!
//! Five rules pick amplitude and phase offsets so that every element lands on
//! the lattice:
//!
//! * **green** scales and rotates a whole quaternary sequence onto one point
//! * **yellow** gives the two halves of the sequence two diagonal amplitudes
//! * **blue** also rotates one half off the diagonal
//! * **cyan** moves both halves off the diagonal
//! * **orange** keeps one amplitude but rotates half of the elements by `∓μ`
//!
//! [`count_sequences`] returns the closed-form family sizes and
//! [`enumerate_rule`] walks every parameter combination for exhaustive checks.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::encoder::{
    convert_corollary1, encode_pair, validate_pi, EncoderParams, RecursionParams, SeedPair,
};
use crate::recursion::PermutationPsi;
use crate::sequence::ComplexSequence;
use crate::{Error, Result};

/// Phase alphabet every rule is built on.
pub const QAM_H: u32 = 4;

/// Default tolerance for lattice membership.
pub const LATTICE_TOL: f64 = 1e-6;

/// Default cap on enumeration size.
pub const DEFAULT_ENUM_LIMIT: u128 = 10_000_000;

const SCALE: f64 = 4.0 / (2.0 * PI);

/// Sizes of the point sets of a `4s²`-QAM constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QamGeometry {
    pub s: u32,
}

impl QamGeometry {
    pub fn new(s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("s must be at least 1".into()));
        }
        Ok(Self { s })
    }

    pub fn order(&self) -> u64 {
        4 * self.s as u64 * self.s as u64
    }

    /// Points in one quadrant.
    pub fn n_quad(&self) -> u64 {
        self.s as u64 * self.s as u64
    }

    /// Points on the diagonal of one quadrant.
    pub fn n_h(&self) -> u64 {
        self.s as u64
    }

    /// Points strictly on one side of the diagonal.
    pub fn n_nh(&self) -> u64 {
        self.s as u64 * (self.s as u64 - 1) / 2
    }

    /// Points on or below the diagonal.
    pub fn n_tri(&self) -> u64 {
        self.s as u64 * (self.s as u64 + 1) / 2
    }
}

/// First-quadrant point `(2u−1) + j(2v−1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub u: u32,
    pub v: u32,
}

/// Distance, scale and angles of a lattice point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    /// Distance to the origin.
    pub d: f64,
    /// `d / √2`, the amplitude relative to the unit QPSK symbol.
    pub gamma: f64,
    /// Angle to the real axis.
    pub theta: f64,
    /// Angle to the diagonal, `π/4 − θ`.
    pub phi: f64,
    /// Angle to the mirror point across the diagonal, `2φ`.
    pub mu: f64,
}

impl LatticePoint {
    pub fn new(u: u32, v: u32, s: u32) -> Result<Self> {
        if u == 0 || v == 0 || u > s || v > s {
            return Err(Error::IndexConstraint(format!(
                "lattice indices ({u}, {v}) outside 1..={s}"
            )));
        }
        Ok(Self { u, v })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(2.0 * self.u as f64 - 1.0, 2.0 * self.v as f64 - 1.0)
    }

    pub fn geometry(&self) -> PointGeometry {
        let (x, y) = (2.0 * self.u as f64 - 1.0, 2.0 * self.v as f64 - 1.0);
        let d = x.hypot(y);
        let theta = (y / x).atan();
        let phi = FRAC_PI_4 - theta;
        PointGeometry {
            d,
            gamma: d / 2f64.sqrt(),
            theta,
            phi,
            mu: 2.0 * phi,
        }
    }
}

/// Geometry of `(2u−1) + j(2v−1)` for `1 ≤ u, v ≤ s`.
pub fn geometry(u: u32, v: u32, s: u32) -> Result<PointGeometry> {
    Ok(LatticePoint::new(u, v, s)?.geometry())
}

/// Whether `value` lies within `tol` of a point of the `4s²`-QAM set.
pub fn is_qam_point(value: Complex64, s: u32, tol: f64) -> bool {
    let near = |x: f64| {
        let u = ((x.abs() + 1.0) / 2.0).round().clamp(1.0, s as f64);
        (x.abs() - (2.0 * u - 1.0)).abs() <= tol
    };
    s >= 1 && near(value.re) && near(value.im)
}

/// Rotates and scales an encoder output onto the odd-integer lattice.
pub fn to_lattice(seq: &ComplexSequence) -> ComplexSequence {
    seq.scaled(Complex64::new(1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Green,
    Yellow,
    Blue,
    Cyan,
    Orange,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Green, Rule::Yellow, Rule::Blue, Rule::Cyan, Rule::Orange];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Green => "green",
            Rule::Yellow => "yellow",
            Rule::Blue => "blue",
            Rule::Cyan => "cyan",
            Rule::Orange => "orange",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown rule `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply(self, x: f64) -> f64 {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }
}

/// One member of a rule's parameter family.
///
/// Index usage per rule:
///
/// | rule   | indices            | constraint            |
/// |--------|--------------------|-----------------------|
/// | green  | `u, v`             |                       |
/// | yellow | `u, v`             | `u ≠ v`               |
/// | blue   | `u, v, w`          | `v > w`               |
/// | cyan   | `u, t, v, w`       | `u > t`, `v > w`      |
/// | orange | `u, v`             | `u > v`               |
///
/// `swap` moves the rotated half of a blue sequence from `b` to `a`.
/// `sign_a` is the only sign for blue and orange; cyan uses both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QamRuleSpec {
    pub rule: Rule,
    pub s: u32,
    pub u: u32,
    pub v: u32,
    pub w: u32,
    pub t: u32,
    pub swap: bool,
    pub sign_a: Sign,
    pub sign_b: Sign,
    /// Step carrying the amplitude change, `1..=m`. Unused by green.
    pub ell: usize,
    /// Variable order.
    pub pi: Vec<usize>,
    /// Quaternary linear phases `k_n`.
    pub base_k: Vec<u8>,
    /// Quaternary global phase.
    pub z: u8,
}

impl QamRuleSpec {
    /// A spec with every index at 1, identity order and zero phases.
    pub fn new(rule: Rule, s: u32, m: usize) -> Self {
        Self {
            rule,
            s,
            u: 1,
            v: 1,
            w: 1,
            t: 1,
            swap: false,
            sign_a: Sign::Plus,
            sign_b: Sign::Plus,
            ell: m,
            pi: (1..=m).collect(),
            base_k: vec![0; m],
            z: 0,
        }
    }

    pub fn m(&self) -> usize {
        self.pi.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        validate_pi(&self.pi, m)?;
        let s = self.s;
        let in_range = |x: u32| (1..=s).contains(&x);
        let c = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::IndexConstraint(format!("{}: {msg}", self.rule)))
            }
        };
        c(s >= 1, "s must be at least 1")?;
        c(self.base_k.len() == m, "base_k needs m entries")?;
        c(self.base_k.iter().chain([&self.z]).all(|&k| k < 4), "phases must lie in Z4")?;
        if self.rule != Rule::Green {
            c((1..=m).contains(&self.ell), "ℓ outside 1..=m")?;
        }
        match self.rule {
            Rule::Green => c(in_range(self.u) && in_range(self.v), "u, v outside 1..=s"),
            Rule::Yellow => {
                c(in_range(self.u) && in_range(self.v), "u, v outside 1..=s")?;
                c(self.u != self.v, "requires u ≠ v")
            }
            Rule::Blue => {
                c(
                    [self.u, self.v, self.w].into_iter().all(in_range),
                    "u, v, w outside 1..=s",
                )?;
                c(self.v > self.w, "requires v > w")
            }
            Rule::Cyan => {
                c(
                    [self.u, self.t, self.v, self.w].into_iter().all(in_range),
                    "u, t, v, w outside 1..=s",
                )?;
                c(self.u > self.t && self.v > self.w, "requires u > t and v > w")
            }
            Rule::Orange => {
                c(in_range(self.u) && in_range(self.v), "u, v outside 1..=s")?;
                c(self.u > self.v, "requires u > v")
            }
        }
    }
}

fn point(u: u32, v: u32) -> PointGeometry {
    LatticePoint { u, v }.geometry()
}

/// Encoder parameters realising `spec` with `H = 4`.
pub fn rule_params(spec: &QamRuleSpec, seed: SeedPair) -> Result<EncoderParams> {
    spec.validate()?;
    let m = spec.m();
    let l = spec.ell.saturating_sub(1);
    let base: Vec<f64> = spec.base_k.iter().map(|&k| k as f64).collect();
    let z = spec.z as f64;

    let direct = |e_prime: f64, k_prime: f64, k: Vec<f64>| EncoderParams {
        m,
        h: QAM_H,
        pi: spec.pi.clone(),
        e: vec![0.0; m],
        e_prime,
        k,
        k_prime,
        k_dprime: k_prime,
        d: vec![0; m],
        seed: seed.clone(),
    };

    let params = match spec.rule {
        Rule::Green => {
            let g = point(spec.u, spec.v);
            direct(SCALE * g.gamma.ln(), z - SCALE * g.phi, base)
        }
        Rule::Orange => {
            let g = point(spec.u, spec.v);
            let mut k = base;
            k[l] -= spec.sign_a.apply(SCALE * g.mu);
            direct(SCALE * g.gamma.ln(), z + spec.sign_a.apply(SCALE * g.phi), k)
        }
        Rule::Yellow | Rule::Blue | Rule::Cyan => {
            let psi = PermutationPsi::from_pi(&spec.pi)?;
            let mut rp = RecursionParams::neutral(QAM_H, psi, seed);
            let (ca, cb, ka, kb) = match spec.rule {
                Rule::Yellow => {
                    let (a, b) = (point(spec.u, spec.u), point(spec.v, spec.v));
                    (a.gamma, b.gamma, 0.0, 0.0)
                }
                Rule::Blue => {
                    let diag = point(spec.u, spec.u).gamma;
                    let off = point(spec.v, spec.w);
                    let rot = spec.sign_a.apply(SCALE * off.phi);
                    if spec.swap {
                        (off.gamma, diag, rot, 0.0)
                    } else {
                        (diag, off.gamma, 0.0, rot)
                    }
                }
                _ => {
                    let (a, b) = (point(spec.u, spec.t), point(spec.v, spec.w));
                    (
                        a.gamma,
                        b.gamma,
                        spec.sign_a.apply(SCALE * a.phi),
                        spec.sign_b.apply(SCALE * b.phi),
                    )
                }
            };
            rp.c_a[l] = SCALE * ca.ln();
            rp.c_b[l] = SCALE * cb.ln();
            rp.k_a[l] = ka;
            rp.k_b[l] = kb;
            let mut p = convert_corollary1(&rp)?;
            for (k, b) in p.k.iter_mut().zip(&base) {
                *k += b;
            }
            p.k_prime += z;
            p.k_dprime += z;
            p
        }
    };
    Ok(params.reduce_phases())
}

/// Whether the family is counted for length-1 seeds or longer seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedClass {
    /// `N = 1`: counted in units of `G0 = (m!/2)·4^{m+1}`.
    Single,
    /// `N > 1`: counted in units of `A0 = m!·4^{m+1}`.
    Long,
}

impl SeedClass {
    pub fn of_len(n: usize) -> Self {
        if n <= 1 {
            SeedClass::Single
        } else {
            SeedClass::Long
        }
    }
}

/// A family size as a multiple of its counting unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceCount {
    pub units: u128,
    pub unit: u128,
    pub absolute: u128,
}

fn overflow(m: usize) -> Error {
    Error::TooLarge { m, max: 20 }
}

fn factorial(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// `A0 = m!·4^{m+1}`.
pub fn unit_a0(m: usize) -> Result<u128> {
    let pow = 4u128.checked_pow(m as u32 + 1).ok_or_else(|| overflow(m))?;
    factorial(m)
        .and_then(|f| f.checked_mul(pow))
        .ok_or_else(|| overflow(m))
}

/// `G0 = (m!/2)·4^{m+1}`, i.e. `A0 / 2`.
pub fn unit_g0(m: usize) -> Result<u128> {
    Ok(unit_a0(m)? / 2)
}

fn unit(class: SeedClass, m: usize) -> Result<u128> {
    match class {
        SeedClass::Single => unit_g0(m),
        SeedClass::Long => unit_a0(m),
    }
}

fn finish(units: u128, class: SeedClass, m: usize) -> Result<SequenceCount> {
    let unit = unit(class, m)?;
    Ok(SequenceCount {
        units,
        unit,
        absolute: units.checked_mul(unit).ok_or_else(|| overflow(m))?,
    })
}

/// Closed-form number of sequences a rule yields.
pub fn count_sequences(rule: Rule, s: u32, m: usize, class: SeedClass) -> Result<SequenceCount> {
    if s == 0 || m == 0 {
        return Err(Error::InvalidParams("s and m must be at least 1".into()));
    }
    let (s, mm) = (s as u128, m as u128);
    // amplitude-carrying rules gain one extra unit for N = 1 because the last
    // step is not symmetric under reversing π
    let steps = match class {
        SeedClass::Single => mm + 1,
        SeedClass::Long => mm,
    };
    let units = match rule {
        Rule::Green => s * s,
        Rule::Yellow => s * (s - 1) * steps,
        Rule::Blue => 2 * s * s * (s - 1) * steps,
        Rule::Cyan => (s + 1) * s * (s - 1) * s.saturating_sub(2) * steps,
        Rule::Orange => s * (s - 1) * mm,
    };
    finish(units, class, m)
}

/// Closed-form total over all five rules.
pub fn count_total(s: u32, m: usize, class: SeedClass) -> Result<SequenceCount> {
    if s == 0 || m == 0 {
        return Err(Error::InvalidParams("s and m must be at least 1".into()));
    }
    let (s, mm) = (s as u128, m as u128);
    let core = s.pow(4) - s * s;
    let units = match class {
        SeedClass::Single => core * (mm + 1) + s,
        SeedClass::Long => core * mm + s * s,
    };
    finish(units, class, m)
}

/// The index and sign choices a rule ranges over, in enumeration order.
fn point_choices(rule: Rule, s: u32) -> Vec<QamRuleSpec> {
    let mut out = Vec::new();
    let base = QamRuleSpec::new(rule, s, 0);
    let signs = [Sign::Plus, Sign::Minus];
    let pairs_below: Vec<(u32, u32)> = (1..=s)
        .flat_map(|a| (1..a).map(move |b| (a, b)))
        .collect();
    match rule {
        Rule::Green | Rule::Yellow => {
            for u in 1..=s {
                for v in 1..=s {
                    if rule == Rule::Green || u != v {
                        out.push(QamRuleSpec { u, v, ..base.clone() });
                    }
                }
            }
        }
        Rule::Blue => {
            for swap in [false, true] {
                for u in 1..=s {
                    for &(v, w) in &pairs_below {
                        for sign_a in signs {
                            out.push(QamRuleSpec { u, v, w, swap, sign_a, ..base.clone() });
                        }
                    }
                }
            }
        }
        Rule::Cyan => {
            for &(u, t) in &pairs_below {
                for &(v, w) in &pairs_below {
                    if (u, t) == (v, w) {
                        continue;
                    }
                    for sign_a in signs {
                        for sign_b in signs {
                            out.push(QamRuleSpec { u, t, v, w, sign_a, sign_b, ..base.clone() });
                        }
                    }
                }
            }
        }
        Rule::Orange => {
            for &(u, v) in &pairs_below {
                for sign_a in signs {
                    out.push(QamRuleSpec { u, v, sign_a, ..base.clone() });
                }
            }
        }
    }
    out
}

/// Lexicographic `k`-th permutation of `1..=m`.
fn nth_permutation(m: usize, mut k: u128) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut out = Vec::with_capacity(m);
    for i in (0..m).rev() {
        let f = factorial(i).expect("m is bounded by the guard");
        out.push(pool.remove((k / f) as usize));
        k %= f;
    }
    out
}

/// Every parameter combination of one rule, addressable by index.
#[derive(Debug, Clone)]
pub struct RuleFamily {
    rule: Rule,
    m: usize,
    points: Vec<QamRuleSpec>,
    ells: usize,
    perms: u128,
    size: u128,
}

impl RuleFamily {
    pub fn new(rule: Rule, s: u32, m: usize) -> Result<Self> {
        if s == 0 || m == 0 {
            return Err(Error::InvalidParams("s and m must be at least 1".into()));
        }
        let points = point_choices(rule, s);
        let ells = if rule == Rule::Green { 1 } else { m };
        let perms = factorial(m).ok_or_else(|| overflow(m))?;
        let size = [points.len() as u128, ells as u128, perms]
            .into_iter()
            .try_fold(4u128.checked_pow(m as u32 + 1).ok_or_else(|| overflow(m))?, |a, b| {
                a.checked_mul(b)
            })
            .ok_or_else(|| overflow(m))?;
        Ok(Self {
            rule,
            m,
            points,
            ells,
            perms,
            size,
        })
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Number of parameter combinations, duplicates included.
    pub fn size(&self) -> u128 {
        self.size
    }

    /// The `index`-th combination. Points vary slowest, then `ℓ`, `π`, the
    /// linear phases and finally the global phase.
    pub fn spec_at(&self, index: u128) -> Option<QamRuleSpec> {
        if index >= self.size {
            return None;
        }
        let mut rest = index;
        let z = (rest % 4) as u8;
        rest /= 4;
        let mut base_k = vec![0u8; self.m];
        for k in base_k.iter_mut().rev() {
            *k = (rest % 4) as u8;
            rest /= 4;
        }
        let pi = nth_permutation(self.m, rest % self.perms);
        rest /= self.perms;
        let ell = (rest % self.ells as u128) as usize + 1;
        rest /= self.ells as u128;
        let point = &self.points[rest as usize];
        Some(QamRuleSpec {
            ell: if self.rule == Rule::Green { self.m } else { ell },
            pi,
            base_k,
            z,
            ..point.clone()
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = QamRuleSpec> + '_ {
        (0..self.size).map_while(|i| self.spec_at(i))
    }
}

/// Enumerates a rule's family after checking it against `limit`.
pub fn enumerate_rule(rule: Rule, s: u32, m: usize, limit: u128) -> Result<RuleFamily> {
    let family = RuleFamily::new(rule, s, m)?;
    if family.size > limit {
        return Err(Error::GuardExceeded {
            size: family.size,
            limit,
        });
    }
    Ok(family)
}

/// Hashable form of a sequence, rounded to 12 decimals.
pub fn dedup_key(seq: &ComplexSequence) -> Vec<(i64, i64)> {
    let q = |x: f64| (x * 1e12).round() as i64;
    seq.values().iter().map(|v| (q(v.re), q(v.im))).collect()
}

/// Number of distinct `c` sequences a family produces.
pub fn count_distinct(family: &RuleFamily, seed: &SeedPair) -> Result<u128> {
    let mut seen = HashSet::new();
    for spec in family.iter() {
        let c = encode_pair(&rule_params(&spec, seed.clone())?)?.c;
        seen.insert(dedup_key(&c));
    }
    Ok(seen.len() as u128)
}

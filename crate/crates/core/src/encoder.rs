//! Closed-form complementary pair encoder.
//!
//! For a seed pair `(a, b)` of length `N`, a variable order `π` and real
//! parameters `e_n, e′, k_n, k′, k″, d_n`, the sequence `c` is
//!
//! ```text
//! C(z) = Σ_x  f_o(x, z) · ξ^(f_r(x) + j·f_i(x)) · z^(f_s(x) + x·N),   ξ = e^(2π/H)
//! ```
//!
//! where `f_r` is the amplitude encoder, `f_i` the phase encoder, `f_s` the
//! shift encoder and `f_o` picks `a` or `b` from `x_{π_1}`. The companion `d`
//! uses `g_r` and `g_i`. [`direct_recursion`] evaluates the underlying
//! recursive construction coefficient by coefficient and is kept independent
//! of the closed form so the two can check each other.

use num_complex::Complex64;

use crate::analysis;
use crate::boolean::{bit_of, GeneralizedBooleanFunction as Gbf, Modulus};
use crate::recursion::PermutationPsi;
use crate::sequence::{ComplexSequence, UnitExpElement};
use crate::{Error, Result, REL_TOL};

/// Largest supported number of variables.
pub const MAX_M: usize = 24;

/// A complementary seed pair, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedPair {
    a: ComplexSequence,
    b: ComplexSequence,
}

impl SeedPair {
    pub fn new(a: ComplexSequence, b: ComplexSequence) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySequence);
        }
        let check = analysis::is_gcp(&a, &b, REL_TOL)?;
        if !check.ok {
            return Err(Error::InvalidSeed {
                residual: check.max_violation,
            });
        }
        Ok(Self { a, b })
    }

    /// `a = b = (1)`.
    pub fn trivial() -> Self {
        let one = ComplexSequence::from_real(&[1.0]);
        Self {
            a: one.clone(),
            b: one,
        }
    }

    pub fn a(&self) -> &ComplexSequence {
        &self.a
    }

    pub fn b(&self) -> &ComplexSequence {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which seed sequence a block of the output starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedChoice {
    UseA,
    UseB,
}

/// Parameters of the closed-form encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub m: usize,
    pub h: u32,
    /// Variable order, a permutation of `1..=m`.
    pub pi: Vec<usize>,
    /// Amplitude exponents `e_n`.
    pub e: Vec<f64>,
    pub e_prime: f64,
    /// Phase exponents `k_n` in `[0, H)`.
    pub k: Vec<f64>,
    pub k_prime: f64,
    pub k_dprime: f64,
    /// Shifts `d_n`.
    pub d: Vec<usize>,
    pub seed: SeedPair,
}

impl EncoderParams {
    /// All amplitude, phase and shift parameters zero.
    pub fn neutral(h: u32, pi: Vec<usize>, seed: SeedPair) -> Self {
        let m = pi.len();
        Self {
            m,
            h,
            pi,
            e: vec![0.0; m],
            e_prime: 0.0,
            k: vec![0.0; m],
            k_prime: 0.0,
            k_dprime: 0.0,
            d: vec![0; m],
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidParams(format!("m = {m} outside 1..={MAX_M}")));
        }
        if self.h == 0 || !self.h.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "H = {} must be a positive even integer",
                self.h
            )));
        }
        validate_pi(&self.pi, m)?;
        for (name, len) in [("e", self.e.len()), ("k", self.k.len()), ("d", self.d.len())] {
            if len != m {
                return Err(Error::InvalidParams(format!(
                    "`{name}` has {len} entries, expected m = {m}"
                )));
            }
        }
        if !self.e.iter().chain([&self.e_prime]).all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("amplitude exponents must be finite".into()));
        }
        let h = self.h as f64;
        for (name, v) in self
            .k
            .iter()
            .map(|v| ("k_n", *v))
            .chain([("k'", self.k_prime), ("k''", self.k_dprime)])
        {
            if !(v.is_finite() && (0.0..h).contains(&v)) {
                return Err(Error::InvalidParams(format!(
                    "phase {name} = {v} outside [0, {h})"
                )));
            }
        }
        Ok(())
    }

    /// Output length `N·2^m + Σ d_n`.
    pub fn output_len(&self) -> usize {
        self.seed.len() * (1 << self.m) + self.d.iter().sum::<usize>()
    }

    /// Reduces every phase exponent into `[0, H)`.
    pub fn reduce_phases(mut self) -> Self {
        let h = self.h as f64;
        for k in &mut self.k {
            *k = reduce(*k, h);
        }
        self.k_prime = reduce(self.k_prime, h);
        self.k_dprime = reduce(self.k_dprime, h);
        self
    }
}

fn reduce(v: f64, h: f64) -> f64 {
    let r = v.rem_euclid(h);
    // rem_euclid can round up to h for tiny negative inputs
    if r >= h {
        0.0
    } else {
        r
    }
}

pub(crate) fn validate_pi(pi: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m + 1];
    if pi.len() != m {
        return Err(Error::InvalidPermutation(format!(
            "π = {pi:?} has {} entries, expected {m}",
            pi.len()
        )));
    }
    for &p in pi {
        if p == 0 || p > m || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "π = {pi:?} is not a permutation of 1..={m}"
            )));
        }
    }
    Ok(())
}

/// The five Boolean functions behind an encoded pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFunctions {
    /// Amplitude exponent of `c`.
    pub f_r: Gbf,
    /// Amplitude exponent of `d`.
    pub g_r: Gbf,
    /// Phase exponent of `c`, read modulo `H`.
    pub f_i: Gbf,
    /// Phase exponent of `d`, read modulo `H`.
    pub g_i: Gbf,
    /// Shift of each block.
    pub f_s: Gbf,
}

pub fn build_component_functions(p: &EncoderParams) -> Result<ComponentFunctions> {
    p.validate()?;
    let m = p.m;
    let x = |n: usize| Gbf::var(m, p.pi[n - 1]);
    let half_h = p.h as f64 / 2.0;

    // Σ_{n<m} e_n (x_{π_n} + x_{π_{n+1}})_2 + e′
    let mut shared_r = Gbf::constant(m, p.e_prime);
    // Σ_{n<m} x_{π_n} x_{π_{n+1}}
    let mut quadratic = Gbf::zero(m);
    for n in 1..m {
        shared_r = shared_r.add(&Gbf::combine_mod2(&x(n), &x(n + 1), p.e[n - 1])?);
        quadratic = quadratic.add(&x(n).mul(&x(n + 1)));
    }
    let last = x(m);
    let not_last = Gbf::not_var(m, p.pi[m - 1]);
    let f_r = shared_r.add(&last.scale(p.e[m - 1]));
    let g_r = shared_r.add(&not_last.scale(p.e[m - 1]));

    let mut linear = Gbf::zero(m);
    let mut f_s = Gbf::zero(m);
    for n in 1..=m {
        linear = linear.add(&x(n).scale(p.k[n - 1]));
        f_s = f_s.add(&x(n).scale(p.d[n - 1] as f64));
    }
    let modulus = Modulus::Mod(p.h);
    let f_i = quadratic
        .scale(half_h)
        .add(&linear)
        .add(&Gbf::constant(m, p.k_prime))
        .with_modulus(modulus);
    let g_i = quadratic
        .add(&last)
        .scale(half_h)
        .add(&linear)
        .add(&Gbf::constant(m, p.k_dprime))
        .with_modulus(modulus);

    Ok(ComponentFunctions {
        f_r,
        g_r,
        f_i,
        g_i,
        f_s,
    })
}

/// Seed used for the block at lexicographic index `x`.
pub fn order_function(p: &EncoderParams, x: &crate::boolean::BitVector) -> Result<SeedChoice> {
    validate_pi(&p.pi, p.m)?;
    if x.m() != p.m {
        return Err(Error::DimensionMismatch {
            expected: p.m,
            got: x.m(),
        });
    }
    Ok(seed_choice(p.m, &p.pi, x.index()))
}

fn seed_choice(m: usize, pi: &[usize], x: usize) -> SeedChoice {
    if bit_of(m, x, pi[0]) == 0 {
        SeedChoice::UseA
    } else {
        SeedChoice::UseB
    }
}

/// An encoded pair. `overlap` reports whether two blocks landed on a shared
/// position, in which case their contributions were summed.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPair {
    pub c: ComplexSequence,
    pub d: ComplexSequence,
    pub overlap: bool,
}

pub fn encode_pair(p: &EncoderParams) -> Result<EncodedPair> {
    let funcs = build_component_functions(p)?;
    let n_seed = p.seed.len();
    let len = p.output_len();
    let f_r = funcs.f_r.to_sequence();
    let g_r = funcs.g_r.to_sequence();
    let f_i = funcs.f_i.to_sequence();
    let g_i = funcs.g_i.to_sequence();
    let f_s = funcs.f_s.to_sequence();

    let mut c = vec![Complex64::new(0.0, 0.0); len];
    let mut d = c.clone();
    let mut covered = vec![false; len];
    let mut overlap = false;
    for x in 0..1usize << p.m {
        let seed = match seed_choice(p.m, &p.pi, x) {
            SeedChoice::UseA => p.seed.a(),
            SeedChoice::UseB => p.seed.b(),
        };
        let offset = f_s[x] as usize + x * n_seed;
        let c_factor = UnitExpElement::new(f_r[x], f_i[x]).to_complex(p.h);
        let d_factor = UnitExpElement::new(g_r[x], g_i[x]).to_complex(p.h);
        for (t, s) in seed.values().iter().enumerate() {
            let i = offset + t;
            overlap |= std::mem::replace(&mut covered[i], true);
            c[i] += s * c_factor;
            d[i] += s * d_factor;
        }
    }
    Ok(EncodedPair {
        c: c.into(),
        d: d.into(),
        overlap,
    })
}

/// Parameters of the recursive construction, all exponents of `ξ`.
///
/// At step `n` the scalars are `ξ^{c_{a,n}}`, `ξ^{c_{b,n}}`, the unit phases
/// `ξ^{j k_{a,n}}`, `ξ^{j k_{b,n}}`, `ξ^{j k_n}` and the shift is
/// `z^{d_n} · w^{2^{ψ_n}}` with `w = z^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionParams {
    pub h: u32,
    pub psi: PermutationPsi,
    pub c_a: Vec<f64>,
    pub c_b: Vec<f64>,
    pub k_a: Vec<f64>,
    pub k_b: Vec<f64>,
    pub k: Vec<f64>,
    pub d: Vec<usize>,
    pub seed: SeedPair,
}

impl RecursionParams {
    pub fn neutral(h: u32, psi: PermutationPsi, seed: SeedPair) -> Self {
        let m = psi.m();
        Self {
            h,
            psi,
            c_a: vec![0.0; m],
            c_b: vec![0.0; m],
            k_a: vec![0.0; m],
            k_b: vec![0.0; m],
            k: vec![0.0; m],
            d: vec![0; m],
            seed,
        }
    }

    pub fn m(&self) -> usize {
        self.psi.m()
    }

    fn validate(&self) -> Result<()> {
        let m = self.m();
        if m > MAX_M {
            return Err(Error::InvalidParams(format!("m = {m} exceeds {MAX_M}")));
        }
        if self.h == 0 || !self.h.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "H = {} must be a positive even integer",
                self.h
            )));
        }
        let lens = [
            self.c_a.len(),
            self.c_b.len(),
            self.k_a.len(),
            self.k_b.len(),
            self.k.len(),
            self.d.len(),
        ];
        if lens.iter().any(|&l| l != m) {
            return Err(Error::InvalidParams(format!(
                "per-step parameter lengths {lens:?} must all equal m = {m}"
            )));
        }
        Ok(())
    }
}

/// Maps recursion parameters onto the closed-form parameters producing the
/// same pair.
pub fn convert_corollary1(rp: &RecursionParams) -> Result<EncoderParams> {
    rp.validate()?;
    let m = rp.m();
    let e = (0..m).map(|n| rp.c_b[n] - rp.c_a[n]).collect();
    let e_prime = rp.c_a.iter().sum();
    let k = (0..m)
        .map(|n| {
            let mut v = rp.k[n] + rp.k_b[n] - rp.k_a[n];
            if n > 0 {
                v -= rp.k_b[n - 1] + rp.k_a[n - 1];
            }
            v
        })
        .collect();
    let k_prime = rp.k_a.iter().sum();
    let k_dprime = -rp.k_b[m - 1] + rp.k_a[..m - 1].iter().sum::<f64>();
    Ok(EncoderParams {
        m,
        h: rp.h,
        pi: rp.psi.pi(),
        e,
        e_prime,
        k,
        k_prime,
        k_dprime,
        d: rp.d.clone(),
        seed: rp.seed.clone(),
    }
    .reduce_phases())
}

/// Runs the recursive construction on coefficient arrays.
pub fn direct_recursion(rp: &RecursionParams) -> Result<EncodedPair> {
    rp.validate()?;
    let unit = 2.0 * std::f64::consts::PI / rp.h as f64;
    let scalar = |c: f64| (unit * c).exp();
    let phase = |k: f64| Complex64::from_polar(1.0, unit * k);
    let n_seed = rp.seed.len();

    let mut a = rp.seed.a().values().to_vec();
    let mut b = rp.seed.b().values().to_vec();
    for n in 0..rp.m() {
        let shift = rp.d[n] + n_seed * (1usize << rp.psi.as_slice()[n]);
        let len = a.len() + shift;
        let gamma_a = phase(rp.k_a[n]);
        let gamma_b = phase(rp.k_b[n]);
        let gamma = phase(rp.k[n]);
        let zeta_a = scalar(rp.c_a[n]);
        let zeta_b = scalar(rp.c_b[n]);

        let mut next_a = vec![Complex64::new(0.0, 0.0); len];
        let mut next_b = next_a.clone();
        for (i, v) in a.iter().enumerate() {
            next_a[i] += gamma_a * zeta_a * v;
            next_b[i] += gamma_b.conj() * zeta_b * v;
        }
        for (i, v) in b.iter().enumerate() {
            next_a[i + shift] += gamma_b * zeta_b * gamma * v;
            next_b[i + shift] -= gamma_a.conj() * zeta_a * gamma * v;
        }
        a = next_a;
        b = next_b;
    }

    let total = n_seed * (1 << rp.m()) + rp.d.iter().sum::<usize>();
    debug_assert_eq!(a.len(), total);
    Ok(EncodedPair {
        c: a.into(),
        d: b.into(),
        overlap: false,
    })
}

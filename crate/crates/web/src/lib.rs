//! Browser bindings. Each export takes plain numbers and arrays so the page
//! needs no glue beyond the generated module.

use cs_forge::analysis::{classify_alphabet, is_gcp, papr_oversampled, power_trace, Alphabet};
use cs_forge::encoder::{encode_pair, EncoderParams, SeedPair};
use cs_forge::qam::{rule_params, to_lattice, RuleFamily, LATTICE_TOL};
use cs_forge::{ComplexSequence, REL_TOL};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

const MAX_WEB_M: usize = 10;

/// Encoded pair with its headline figures.
#[wasm_bindgen]
pub struct Encoded {
    c: ComplexSequence,
    d: ComplexSequence,
    residual: f64,
    papr_db: f64,
    overlap: bool,
    alphabet: String,
}

fn split(seq: &ComplexSequence, part: fn(&Complex64) -> f64) -> Vec<f64> {
    seq.values().iter().map(part).collect()
}

fn alphabet_name(seq: &ComplexSequence) -> String {
    let name = |a| match a {
        Alphabet::Psk(q) => Some(format!("{q}-PSK")),
        Alphabet::Qam(s) => Some(format!("{}-QAM", 4 * s * s)),
        Alphabet::General => None,
    };
    name(classify_alphabet(seq, LATTICE_TOL))
        .or_else(|| name(classify_alphabet(&to_lattice(seq), LATTICE_TOL)).map(|n| format!("{n} (×(1+j))")))
        .unwrap_or_else(|| "general".into())
}

fn finish(pair: cs_forge::encoder::EncodedPair, oversample: usize) -> Result<Encoded, String> {
    let check = is_gcp(&pair.c, &pair.d, REL_TOL).map_err(|e| e.to_string())?;
    let (papr_db, _) = papr_oversampled(&pair.c, oversample).map_err(|e| e.to_string())?;
    Ok(Encoded {
        alphabet: alphabet_name(&pair.c),
        c: pair.c,
        d: pair.d,
        residual: check.relative_violation,
        papr_db,
        overlap: pair.overlap,
    })
}

#[wasm_bindgen]
impl Encoded {
    pub fn c_re(&self) -> Vec<f64> {
        split(&self.c, |v| v.re)
    }
    pub fn c_im(&self) -> Vec<f64> {
        split(&self.c, |v| v.im)
    }
    pub fn d_re(&self) -> Vec<f64> {
        split(&self.d, |v| v.re)
    }
    pub fn d_im(&self) -> Vec<f64> {
        split(&self.d, |v| v.im)
    }
    /// Worst sidelobe sum relative to the zero-lag energy.
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn papr_db(&self) -> f64 {
        self.papr_db
    }
    pub fn overlap(&self) -> bool {
        self.overlap
    }
    pub fn alphabet(&self) -> String {
        self.alphabet.clone()
    }
}

fn check_m(m: usize) -> Result<(), String> {
    if (1..=MAX_WEB_M).contains(&m) {
        Ok(())
    } else {
        Err(format!("the demo handles 1 ≤ m ≤ {MAX_WEB_M}"))
    }
}

/// Encodes with the trivial seed. `pi`, `e`, `k` and `d` share one length m.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn encode(
    h: u32,
    pi: Vec<u32>,
    e: Vec<f64>,
    k: Vec<f64>,
    d: Vec<u32>,
    e_prime: f64,
    k_prime: f64,
    k_dprime: f64,
    oversample: usize,
) -> Result<Encoded, String> {
    check_m(pi.len())?;
    let seed = SeedPair::trivial();
    let mut p = EncoderParams::neutral(h, pi.iter().map(|&v| v as usize).collect(), seed);
    p.e = e;
    p.k = k;
    p.d = d.iter().map(|&v| v as usize).collect();
    p.e_prime = e_prime;
    p.k_prime = k_prime;
    p.k_dprime = k_dprime;
    let p = p.reduce_phases();
    let pair = encode_pair(&p).map_err(|e| e.to_string())?;
    finish(pair, oversample)
}

/// Instantaneous power of `re + j·im` on an `oversample`-fold grid.
#[wasm_bindgen]
pub fn power_envelope(re: Vec<f64>, im: Vec<f64>, oversample: usize) -> Result<Vec<f64>, String> {
    if re.len() != im.len() {
        return Err("real and imaginary parts differ in length".into());
    }
    let seq: ComplexSequence = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect::<Vec<_>>().into();
    power_trace(&seq, oversample).map(|t| t.power).map_err(|e| e.to_string())
}

/// Number of parameter combinations in a rule family.
#[wasm_bindgen]
pub fn rule_family_size(rule: &str, s: u32, m: usize) -> Result<f64, String> {
    check_m(m)?;
    let rule = rule.parse().map_err(|e: cs_forge::Error| e.to_string())?;
    let family = RuleFamily::new(rule, s, m).map_err(|e| e.to_string())?;
    Ok(family.size() as f64)
}

/// One member of a rule family, mapped onto the QAM lattice.
#[wasm_bindgen]
pub fn rule_member(rule: &str, s: u32, m: usize, index: f64, oversample: usize) -> Result<Encoded, String> {
    check_m(m)?;
    let rule = rule.parse().map_err(|e: cs_forge::Error| e.to_string())?;
    let family = RuleFamily::new(rule, s, m).map_err(|e| e.to_string())?;
    let spec = family
        .spec_at(index.max(0.0) as u128)
        .ok_or_else(|| format!("index beyond the {} family members", family.size()))?;
    let mut pair = encode_pair(&rule_params(&spec, SeedPair::trivial()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    pair.c = to_lattice(&pair.c);
    pair.d = to_lattice(&pair.d);
    finish(pair, oversample)
}

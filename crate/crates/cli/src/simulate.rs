//! Minimum-distance decoding of a sequence codebook over an AWGN channel.
//!
//! Codeword `i` carries the bits of `i`, so bit errors are the Hamming
//! distance between sent and decoded indices. `Eb` is the mean codeword
//! energy divided by the bits per codeword, and the noise has variance
//! `N0/2` per real dimension.

use std::collections::HashSet;
use std::str::FromStr;

use cs_forge::analysis::papr_oversampled;
use cs_forge::encoder::{encode_pair, SeedPair};
use cs_forge::qam::{dedup_key, enumerate_rule, rule_params, Rule};
use cs_forge::ComplexSequence;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::records::SCHEMA;

pub const MAX_CODEBOOK: usize = 1 << 16;
pub const MAX_SIM_M: usize = 4;
const CHUNK: u64 = 2048;

/// An `Eb/N0` value in dB; `None` is the noiseless channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbN0(pub Option<f64>);

impl FromStr for EbN0 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "noiseless" => Ok(EbN0(None)),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|v| EbN0(Some(v)))
                .ok_or_else(|| format!("`{s}` is neither a finite dB value nor `inf`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Codebook {
    entries: Vec<ComplexSequence>,
    bits: u32,
}

impl Codebook {
    /// Keeps the largest power-of-two prefix of `entries`.
    pub fn new(mut entries: Vec<ComplexSequence>) -> CliResult<Self> {
        if entries.len() < 2 {
            return Err(CliError::invalid("a codebook needs at least two sequences"));
        }
        let len = entries[0].len();
        if entries.iter().any(|e| e.len() != len) {
            return Err(CliError::invalid("codebook sequences differ in length"));
        }
        let bits = usize::BITS - 1 - entries.len().leading_zeros();
        entries.truncate(1 << bits);
        if entries.len() > MAX_CODEBOOK {
            return Err(CliError::guard(format!(
                "codebook of {} sequences exceeds {MAX_CODEBOOK}",
                entries.len()
            )));
        }
        Ok(Self { entries, bits })
    }

    /// Distinct outputs of a rule family in enumeration order, optionally
    /// restricted to one variable order.
    pub fn from_rule(
        rule: Rule,
        s: u32,
        m: usize,
        pi: Option<&[usize]>,
        seed: &SeedPair,
        limit: u128,
    ) -> CliResult<Self> {
        if m > MAX_SIM_M {
            return Err(CliError::invalid(format!(
                "simulation codebooks are limited to m ≤ {MAX_SIM_M}"
            )));
        }
        let family = enumerate_rule(rule, s, m, limit)?;
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for spec in family.iter() {
            if pi.is_some_and(|p| p != spec.pi.as_slice()) {
                continue;
            }
            let c = encode_pair(&rule_params(&spec, seed.clone())?)?.c;
            if seen.insert(dedup_key(&c)) {
                entries.push(c);
                if entries.len() > 2 * MAX_CODEBOOK {
                    return Err(CliError::guard(format!(
                        "codebook exceeds {MAX_CODEBOOK} sequences"
                    )));
                }
            }
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn entries(&self) -> &[ComplexSequence] {
        &self.entries
    }

    pub fn mean_energy(&self) -> f64 {
        self.entries.iter().map(|e| e.energy()).sum::<f64>() / self.len() as f64
    }

    fn decode(&self, r: &[Complex64]) -> usize {
        let dist = |c: &ComplexSequence| -> f64 {
            c.values().iter().zip(r).map(|(a, b)| (a - b).norm_sqr()).sum()
        };
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.entries.iter().enumerate() {
            let d = dist(c);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

/// Upper-tail probability of the standard normal.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPoint {
    /// `null` for the noiseless channel.
    pub ebn0_db: Option<f64>,
    pub n0: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub ber: f64,
    /// Exact BER for a two-word codebook.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_ber: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaprPercentiles {
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub schema: u32,
    pub codebook_size: usize,
    pub bits_per_codeword: u32,
    pub sequence_length: usize,
    pub mean_energy: f64,
    pub trials: u64,
    pub rng_seed: u64,
    pub points: Vec<SimPoint>,
    pub codebook_papr_db: PaprPercentiles,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn run_chunk(book: &Codebook, n0: f64, rng: &mut ChaCha8Rng, trials: u64) -> u64 {
    let sigma = (n0 / 2.0).sqrt();
    let size = book.len();
    let mut errors = 0u64;
    let mut received = Vec::new();
    for _ in 0..trials {
        let sent = rng.gen_range(0..size);
        received.clear();
        received.extend(book.entries[sent].values().iter().map(|v| {
            if sigma == 0.0 {
                *v
            } else {
                let (x, y): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                v + Complex64::new(sigma * x, sigma * y)
            }
        }));
        let got = book.decode(&received);
        errors += (sent ^ got).count_ones() as u64;
    }
    errors
}

pub fn simulate(
    book: &Codebook,
    ebn0: &[EbN0],
    trials: u64,
    rng_seed: u64,
    oversample: usize,
) -> CliResult<SimReport> {
    if trials == 0 {
        return Err(CliError::invalid("--trials must be positive"));
    }
    if ebn0.is_empty() {
        return Err(CliError::invalid("--ebn0 needs at least one value"));
    }
    let bits = book.bits() as u64;
    let eb = book.mean_energy() / bits as f64;
    if eb == 0.0 {
        return Err(CliError::invalid("codebook has zero energy"));
    }
    let chunks = trials.div_ceil(CHUNK);
    let points = ebn0
        .iter()
        .enumerate()
        .map(|(p, &EbN0(db))| {
            let n0 = db.map_or(0.0, |db| eb / 10f64.powf(db / 10.0));
            let bit_errors: u64 = (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                    rng.set_stream((p as u64) << 32 | chunk);
                    let n = CHUNK.min(trials - chunk * CHUNK);
                    run_chunk(book, n0, &mut rng, n)
                })
                .sum();
            let analytic_ber = (book.len() == 2).then(|| {
                let d2: f64 = book.entries[0]
                    .values()
                    .iter()
                    .zip(book.entries[1].values())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                if n0 == 0.0 {
                    0.0
                } else {
                    q_function((d2 / (2.0 * n0)).sqrt())
                }
            });
            SimPoint {
                ebn0_db: db,
                n0,
                bit_errors,
                bits: trials * bits,
                ber: bit_errors as f64 / (trials * bits) as f64,
                analytic_ber,
            }
        })
        .collect();

    let mut paprs = book
        .entries
        .iter()
        .filter(|e| e.energy() > 0.0)
        .map(|e| papr_oversampled(e, oversample).map(|(p, _)| p))
        .collect::<Result<Vec<_>, _>>()?;
    paprs.sort_by(f64::total_cmp);
    Ok(SimReport {
        schema: SCHEMA,
        codebook_size: book.len(),
        bits_per_codeword: book.bits(),
        sequence_length: book.entries[0].len(),
        mean_energy: book.mean_energy(),
        trials,
        rng_seed,
        points,
        codebook_papr_db: PaprPercentiles {
            p50: percentile(&paprs, 0.5),
            p90: percentile(&paprs, 0.9),
            max: *paprs.last().expect("codebook is non-empty"),
        },
    })
}

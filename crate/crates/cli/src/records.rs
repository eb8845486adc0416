//! JSON forms of parameters, seeds and encoded sequences.

use std::fs;
use std::io::Write;
use std::path::Path;

use cs_forge::encoder::{EncoderParams, SeedPair};
use cs_forge::ComplexSequence;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

fn schema_v1() -> u32 {
    SCHEMA
}

fn check_schema(found: u32) -> CliResult<()> {
    if found == SCHEMA {
        Ok(())
    } else {
        Err(CliError::invalid(format!("unsupported schema {found}, expected {SCHEMA}")))
    }
}

/// A complex sequence as parallel real and imaginary arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexArrays {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexArrays {
    pub fn from_seq(seq: &ComplexSequence) -> Self {
        Self {
            re: seq.values().iter().map(|v| v.re).collect(),
            im: seq.values().iter().map(|v| v.im).collect(),
        }
    }

    pub fn to_seq(&self) -> CliResult<ComplexSequence> {
        if self.re.len() != self.im.len() {
            return Err(CliError::invalid(format!(
                "re has {} entries but im has {}",
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect::<Vec<_>>()
            .into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedJson {
    #[serde(default = "schema_v1")]
    pub schema: u32,
    pub a: ComplexArrays,
    pub b: ComplexArrays,
}

impl SeedJson {
    pub fn from_seed(seed: &SeedPair) -> Self {
        Self {
            schema: SCHEMA,
            a: ComplexArrays::from_seq(seed.a()),
            b: ComplexArrays::from_seq(seed.b()),
        }
    }

    pub fn to_seed(&self) -> CliResult<SeedPair> {
        check_schema(self.schema)?;
        Ok(SeedPair::new(self.a.to_seq()?, self.b.to_seq()?)?)
    }
}

/// Encoder parameters. Omitted vectors default to zeros and an omitted seed
/// to the length-one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(default = "schema_v1")]
    pub schema: u32,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(rename = "H")]
    pub h: u32,
    pub pi: Vec<usize>,
    #[serde(default)]
    pub e: Option<Vec<f64>>,
    #[serde(default)]
    pub e_prime: f64,
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    #[serde(default)]
    pub k_prime: f64,
    #[serde(default)]
    pub k_dprime: f64,
    #[serde(default)]
    pub d: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: Option<SeedJson>,
}

impl ParamsJson {
    pub fn from_params(p: &EncoderParams) -> Self {
        Self {
            schema: SCHEMA,
            m: Some(p.m),
            h: p.h,
            pi: p.pi.clone(),
            e: Some(p.e.clone()),
            e_prime: p.e_prime,
            k: Some(p.k.clone()),
            k_prime: p.k_prime,
            k_dprime: p.k_dprime,
            d: Some(p.d.clone()),
            seed: Some(SeedJson::from_seed(&p.seed)),
        }
    }

    pub fn to_params(&self) -> CliResult<EncoderParams> {
        check_schema(self.schema)?;
        let m = self.pi.len();
        if let Some(declared) = self.m {
            if declared != m {
                return Err(CliError::invalid(format!(
                    "m = {declared} but π has {m} entries"
                )));
            }
        }
        let seed = match &self.seed {
            Some(s) => s.to_seed()?,
            None => SeedPair::trivial(),
        };
        let p = EncoderParams {
            m,
            h: self.h,
            pi: self.pi.clone(),
            e: self.e.clone().unwrap_or_else(|| vec![0.0; m]),
            e_prime: self.e_prime,
            k: self.k.clone().unwrap_or_else(|| vec![0.0; m]),
            k_prime: self.k_prime,
            k_dprime: self.k_dprime,
            d: self.d.clone().unwrap_or_else(|| vec![0; m]),
            seed,
        };
        p.validate()?;
        Ok(p)
    }
}

/// One encoded sequence with its companion and summary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    #[serde(default = "schema_v1")]
    pub schema: u32,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsJson>,
    pub length: usize,
    pub values: ComplexArrays,
    pub companion: ComplexArrays,
    pub support: Vec<usize>,
    pub papr_db: f64,
    pub gcp_residual: f64,
    #[serde(default)]
    pub overlap: bool,
}

/// Anything `verify` accepts.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum VerifyInput {
    Records(Vec<SequenceRecord>),
    Record(Box<SequenceRecord>),
    Pair(SeedJson),
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("{}: malformed JSON: {e}", path.display())))
}

/// Writes to `out` if given, otherwise to standard output.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                // a closed pipe downstream is not an error of ours
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::invalid(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

//! Resolves encoder parameters from a file, a QAM rule or raw flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use cs_forge::encoder::{EncoderParams, SeedPair};
use cs_forge::qam::{rule_params, QamRuleSpec, Rule, Sign, QAM_H};

use crate::error::{CliError, CliResult};
use crate::records::{read_json, ParamsJson, SeedJson};

/// Default number of variables when neither `--m` nor `--pi` is given.
const DEFAULT_M: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    #[value(alias = "pos")]
    Plus,
    #[value(alias = "neg")]
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// JSON file holding a complementary seed pair `{"a": {re, im}, "b": {re, im}}`
    #[arg(long, value_name = "FILE", conflicts_with = "seed_trivial")]
    pub seed_pair: Option<PathBuf>,
    /// Use the length-one seed a = b = (1) (the default)
    #[arg(long)]
    pub seed_trivial: bool,
}

impl SeedArgs {
    pub fn resolve(&self) -> CliResult<Option<SeedPair>> {
        self.seed_pair
            .as_ref()
            .map(|p| read_json::<SeedJson>(p)?.to_seed())
            .transpose()
    }
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// JSON parameter file
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// QAM rule: green, yellow, blue, cyan or orange
    #[arg(long, value_name = "NAME", conflicts_with = "params")]
    pub rule: Option<String>,
    /// Constellation size parameter, 4s²-QAM
    #[arg(long = "s", default_value_t = 2)]
    pub s: u32,
    /// Rule indices: u,v (green, yellow, orange), u,v,w (blue) or u,t,v,w (cyan)
    #[arg(long, value_delimiter = ',')]
    pub indices: Vec<u32>,
    /// Step carrying the amplitude change (default m)
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign_a: SignArg,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign_b: SignArg,
    /// Blue rule: rotate the `a` half instead of the `b` half
    #[arg(long)]
    pub swap: bool,
    /// Quaternary linear phases for rules
    #[arg(long, value_delimiter = ',')]
    pub phases: Vec<u8>,
    /// Quaternary global phase for rules
    #[arg(long, default_value_t = 0)]
    pub z: u8,

    /// Number of variables
    #[arg(long = "m")]
    pub m: Option<usize>,
    /// Phase alphabet size, even
    #[arg(long = "H")]
    pub h: Option<u32>,
    /// Variable order, a permutation of 1..=m
    #[arg(long, value_delimiter = ',')]
    pub pi: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub e: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub e_prime: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub k_prime: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub k_dprime: f64,
    /// Shifts d_n
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,

    #[command(flatten)]
    pub seed: SeedArgs,
}

/// Parameters together with a readable rule description when one was used.
pub struct Resolved {
    pub params: EncoderParams,
    pub rule: Option<String>,
}

fn vector_or<T: Clone>(v: &[T], m: usize, zero: T, name: &str) -> CliResult<Vec<T>> {
    match v.len() {
        0 => Ok(vec![zero; m]),
        n if n == m => Ok(v.to_vec()),
        n => Err(CliError::invalid(format!("--{name} has {n} entries, expected m = {m}"))),
    }
}

impl SourceArgs {
    fn m(&self) -> CliResult<usize> {
        match (self.m, self.pi.len()) {
            (Some(m), 0) => Ok(m),
            (Some(m), n) if m != n => Err(CliError::invalid(format!(
                "--m {m} disagrees with --pi of length {n}"
            ))),
            (_, 0) => Ok(DEFAULT_M),
            (_, n) => Ok(n),
        }
    }

    fn pi(&self, m: usize) -> Vec<usize> {
        if self.pi.is_empty() {
            (1..=m).collect()
        } else {
            self.pi.clone()
        }
    }

    pub fn rule_spec(&self, rule: Rule) -> CliResult<QamRuleSpec> {
        let m = self.m()?;
        let mut spec = QamRuleSpec::new(rule, self.s, m);
        spec.pi = self.pi(m);
        spec.ell = self.ell.unwrap_or(m);
        spec.sign_a = self.sign_a.into();
        spec.sign_b = self.sign_b.into();
        spec.swap = self.swap;
        spec.base_k = vector_or(&self.phases, m, 0, "phases")?;
        spec.z = self.z;
        let want = match rule {
            Rule::Blue => 3,
            Rule::Cyan => 4,
            _ => 2,
        };
        let idx = &self.indices;
        if !idx.is_empty() {
            if idx.len() != want {
                return Err(CliError::invalid(format!(
                    "rule {rule} takes {want} indices, got {}",
                    idx.len()
                )));
            }
            match rule {
                Rule::Blue => (spec.u, spec.v, spec.w) = (idx[0], idx[1], idx[2]),
                Rule::Cyan => (spec.u, spec.t, spec.v, spec.w) = (idx[0], idx[1], idx[2], idx[3]),
                _ => (spec.u, spec.v) = (idx[0], idx[1]),
            }
        } else if rule != Rule::Green {
            return Err(CliError::invalid(format!("rule {rule} needs --indices")));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let seed = self.seed.resolve()?;
        if let Some(path) = &self.params {
            let mut params = read_json::<ParamsJson>(path)?.to_params()?;
            if let Some(seed) = seed {
                params.seed = seed;
            }
            return Ok(Resolved { params, rule: None });
        }
        let seed = seed.unwrap_or_else(SeedPair::trivial);
        if let Some(name) = &self.rule {
            if self.h.is_some_and(|h| h != QAM_H) {
                return Err(CliError::invalid(format!("QAM rules require H = {QAM_H}")));
            }
            let spec = self.rule_spec(name.parse()?)?;
            let params = rule_params(&spec, seed)?;
            return Ok(Resolved {
                params,
                rule: Some(describe(&spec)),
            });
        }
        let m = self.m()?;
        let params = EncoderParams {
            m,
            h: self.h.unwrap_or(QAM_H),
            pi: self.pi(m),
            e: vector_or(&self.e, m, 0.0, "e")?,
            e_prime: self.e_prime,
            k: vector_or(&self.k, m, 0.0, "k")?,
            k_prime: self.k_prime,
            k_dprime: self.k_dprime,
            d: vector_or(&self.d, m, 0, "d")?,
            seed,
        };
        params.validate()?;
        Ok(Resolved { params, rule: None })
    }
}

pub fn describe(spec: &QamRuleSpec) -> String {
    let sign = |s: Sign| if s == Sign::Plus { '+' } else { '-' };
    let idx = match spec.rule {
        Rule::Blue => format!("u={} v={} w={}", spec.u, spec.v, spec.w),
        Rule::Cyan => format!("u={} t={} v={} w={}", spec.u, spec.t, spec.v, spec.w),
        _ => format!("u={} v={}", spec.u, spec.v),
    };
    format!(
        "{} s={} {idx} ell={} signs={}{} swap={} pi={:?} phases={:?} z={}",
        spec.rule,
        spec.s,
        spec.ell,
        sign(spec.sign_a),
        sign(spec.sign_b),
        spec.swap,
        spec.pi,
        spec.base_k,
        spec.z
    )
}

//! The `encode`, `verify`, `enumerate` and `papr` subcommands.

use std::collections::HashSet;
use std::path::Path;

use cs_forge::analysis::{
    classify_alphabet, cluster_gaps, is_gcp, papr_bound, papr_oversampled, support_clusters,
    Alphabet,
};
use cs_forge::encoder::{encode_pair, EncoderParams, SeedPair};
use cs_forge::qam::{
    count_sequences, count_total, dedup_key, enumerate_rule, rule_params, Rule, RuleFamily,
    SeedClass, SequenceCount,
};
use cs_forge::{ComplexSequence, REL_TOL};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_VERIFY};
use crate::records::{
    read_json, ComplexArrays, ParamsJson, SequenceRecord, VerifyInput, SCHEMA,
};

pub const MIN_OVERSAMPLE: usize = 4;

pub fn check_oversample(l: usize) -> CliResult<()> {
    if l < MIN_OVERSAMPLE {
        return Err(CliError::invalid(format!(
            "--oversample must be at least {MIN_OVERSAMPLE}, got {l}"
        )));
    }
    Ok(())
}

pub fn make_record(
    id: &str,
    params: &EncoderParams,
    rule: Option<String>,
    oversample: usize,
) -> CliResult<SequenceRecord> {
    let pair = encode_pair(params)?;
    let gcp = is_gcp(&pair.c, &pair.d, REL_TOL)?;
    let (papr_db, _) = papr_oversampled(&pair.c, oversample)?;
    Ok(SequenceRecord {
        schema: SCHEMA,
        id: id.to_string(),
        rule,
        params: Some(ParamsJson::from_params(params)),
        length: pair.c.len(),
        values: ComplexArrays::from_seq(&pair.c),
        companion: ComplexArrays::from_seq(&pair.d),
        support: pair.c.support(),
        papr_db,
        gcp_residual: gcp.relative_violation,
        overlap: pair.overlap,
    })
}

pub fn encode(
    params: &EncoderParams,
    rule: Option<String>,
    oversample: usize,
) -> CliResult<Vec<SequenceRecord>> {
    check_oversample(oversample)?;
    Ok(vec![make_record("c0", params, rule, oversample)?])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyResult {
    pub id: String,
    pub length: usize,
    pub gcp_ok: bool,
    pub gcp_residual: f64,
    pub max_violation: f64,
    pub papr_db: f64,
    pub papr_bound_db: f64,
    pub alphabet: String,
    pub clusters: Vec<ClusterReport>,
    pub gaps: Vec<usize>,
    /// Whether re-encoding the stored parameters reproduces the values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params_match: Option<bool>,
}

impl VerifyResult {
    pub fn ok(&self) -> bool {
        self.gcp_ok && self.params_match != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub ok: bool,
    pub results: Vec<VerifyResult>,
}

fn alphabet_name(a: Alphabet) -> String {
    match a {
        Alphabet::Psk(h) => format!("{h}-PSK"),
        Alphabet::Qam(s) => format!("{}-QAM", 4 * s * s),
        Alphabet::General => "general".into(),
    }
}

/// Alphabet of the sequence, trying the QAM lattice orientation second.
fn alphabet_of(c: &ComplexSequence) -> String {
    match classify_alphabet(c, 1e-6) {
        Alphabet::General => match classify_alphabet(&cs_forge::qam::to_lattice(c), 1e-6) {
            Alphabet::Qam(s) => format!("{} (after ×(1+j))", alphabet_name(Alphabet::Qam(s))),
            _ => "general".into(),
        },
        a => alphabet_name(a),
    }
}

pub fn verify_pair(
    id: &str,
    c: &ComplexSequence,
    d: &ComplexSequence,
    params: Option<&ParamsJson>,
    oversample: usize,
) -> CliResult<VerifyResult> {
    let gcp = is_gcp(c, d, REL_TOL)?;
    let clusters = support_clusters(c);
    let params_match = params
        .map(|p| -> CliResult<bool> {
            let pair = encode_pair(&p.to_params()?)?;
            Ok(pair.c.approx_eq(c, REL_TOL) && pair.d.approx_eq(d, REL_TOL))
        })
        .transpose()?;
    let zero = c.energy() == 0.0;
    Ok(VerifyResult {
        id: id.to_string(),
        length: c.len(),
        gcp_ok: gcp.ok,
        gcp_residual: gcp.relative_violation,
        max_violation: gcp.max_violation,
        papr_db: if zero { f64::NAN } else { papr_oversampled(c, oversample)?.0 },
        papr_bound_db: if zero { f64::NAN } else { papr_bound(c)? },
        alphabet: alphabet_of(c),
        gaps: cluster_gaps(&clusters),
        clusters: clusters
            .iter()
            .map(|c| ClusterReport { start: c.start, len: c.len })
            .collect(),
        params_match,
    })
}

pub fn verify(path: &Path, oversample: usize) -> CliResult<VerifyReport> {
    check_oversample(oversample)?;
    let input: VerifyInput = read_json(path)?;
    let results = match input {
        VerifyInput::Records(records) => records
            .iter()
            .map(|r| verify_record(r, oversample))
            .collect::<CliResult<Vec<_>>>()?,
        VerifyInput::Record(r) => vec![verify_record(&r, oversample)?],
        VerifyInput::Pair(p) => {
            vec![verify_pair("pair", &p.a.to_seq()?, &p.b.to_seq()?, None, oversample)?]
        }
    };
    if results.is_empty() {
        return Err(CliError::invalid("no sequences to verify"));
    }
    Ok(VerifyReport {
        schema: SCHEMA,
        ok: results.iter().all(VerifyResult::ok),
        results,
    })
}

fn verify_record(r: &SequenceRecord, oversample: usize) -> CliResult<VerifyResult> {
    let c = r.values.to_seq()?;
    let d = r.companion.to_seq()?;
    if c.len() != r.length {
        return Err(CliError::invalid(format!(
            "record {} declares length {} but holds {} values",
            r.id,
            r.length,
            c.len()
        )));
    }
    verify_pair(&r.id, &c, &d, r.params.as_ref(), oversample)
}

/// Exit status for a verification report.
pub fn verify_status(report: &VerifyReport) -> u8 {
    if report.ok {
        0
    } else {
        EXIT_VERIFY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DedupReport {
    /// Parameter combinations visited.
    pub raw: u128,
    pub distinct: u128,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountEntry {
    pub rule: String,
    pub units: u128,
    pub count: u128,
    /// `⌊log2(count)⌋`, absent for empty families.
    pub bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dedup: Option<DedupReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerateReport {
    pub schema: u32,
    pub s: u32,
    pub m: usize,
    pub n: usize,
    pub unit_name: &'static str,
    pub unit: u128,
    /// Sequence length `N·2^m`.
    pub length: usize,
    pub rules: Vec<CountEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<CountEntry>,
}

impl EnumerateReport {
    pub fn all_match(&self) -> bool {
        self.rules
            .iter()
            .chain(&self.total)
            .all(|e| e.dedup.as_ref().is_none_or(|d| d.matches))
    }
}

fn floor_log2(n: u128) -> Option<u32> {
    (n > 0).then(|| 127 - n.leading_zeros())
}

fn entry(rule: String, c: SequenceCount) -> CountEntry {
    CountEntry {
        rule,
        units: c.units,
        count: c.absolute,
        bits: floor_log2(c.absolute),
        dedup: None,
    }
}

/// Canonical seeds for the lengths with a known short pair.
pub fn default_seed(n: usize) -> CliResult<SeedPair> {
    let c = |re, im| Complex64::new(re, im);
    let (a, b) = match n {
        1 => return Ok(SeedPair::trivial()),
        2 => (vec![c(1., 0.), c(1., 0.)], vec![c(1., 0.), c(-1., 0.)]),
        3 => (
            vec![c(1., 0.), c(0., 1.), c(1., 0.)],
            vec![c(1., 0.), c(1., 0.), c(-1., 0.)],
        ),
        _ => {
            return Err(CliError::invalid(format!(
                "no built-in seed of length {n}; pass --seed-pair"
            )))
        }
    };
    Ok(SeedPair::new(a.into(), b.into())?)
}

type Key = Vec<(i64, i64)>;

/// Distinct `c` sequences of a family, computed in parallel.
pub fn distinct_keys(family: &RuleFamily, seed: &SeedPair) -> CliResult<HashSet<Key>> {
    const CHUNK: u128 = 4096;
    let chunks = family.size().div_ceil(CHUNK);
    (0..chunks as u64)
        .into_par_iter()
        .map(|chunk| -> CliResult<HashSet<Key>> {
            let lo = chunk as u128 * CHUNK;
            let hi = (lo + CHUNK).min(family.size());
            let mut set = HashSet::new();
            for i in lo..hi {
                let spec = family.spec_at(i).expect("index within family");
                let c = encode_pair(&rule_params(&spec, seed.clone())?)?.c;
                set.insert(dedup_key(&c));
            }
            Ok(set)
        })
        .try_reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return Ok(b.into_iter().chain(a).collect());
            }
            a.extend(b);
            Ok(a)
        })
}

pub struct EnumerateArgs {
    pub rule: Option<Rule>,
    pub s: u32,
    pub m: usize,
    pub n: usize,
    pub dedup: bool,
    pub seed: Option<SeedPair>,
    pub limit: u128,
}

pub fn enumerate(args: &EnumerateArgs) -> CliResult<EnumerateReport> {
    let seed = match &args.seed {
        Some(seed) => {
            if seed.len() != args.n {
                return Err(CliError::invalid(format!(
                    "--n {} disagrees with seed length {}",
                    args.n,
                    seed.len()
                )));
            }
            seed.clone()
        }
        None if args.dedup => default_seed(args.n)?,
        None => SeedPair::trivial(),
    };
    if args.n == 0 {
        return Err(CliError::invalid("--n must be at least 1"));
    }
    let class = SeedClass::of_len(args.n);
    let rules: Vec<Rule> = args.rule.map_or_else(|| Rule::ALL.to_vec(), |r| vec![r]);

    let mut union: HashSet<Key> = HashSet::new();
    let mut raw_total = 0u128;
    let mut entries = Vec::new();
    for &rule in &rules {
        let mut e = entry(rule.to_string(), count_sequences(rule, args.s, args.m, class)?);
        if args.dedup {
            let family = enumerate_rule(rule, args.s, args.m, args.limit)?;
            raw_total += family.size();
            if raw_total > args.limit {
                return Err(CliError::guard(format!(
                    "enumeration visits {raw_total} combinations, above the limit {}",
                    args.limit
                )));
            }
            let keys = distinct_keys(&family, &seed)?;
            let distinct = keys.len() as u128;
            e.dedup = Some(DedupReport {
                raw: family.size(),
                distinct,
                matches: distinct == e.count,
            });
            union.extend(keys);
        }
        entries.push(e);
    }
    let total = if args.rule.is_none() {
        let mut t = entry("total".into(), count_total(args.s, args.m, class)?);
        if args.dedup {
            let distinct = union.len() as u128;
            t.dedup = Some(DedupReport {
                raw: raw_total,
                distinct,
                matches: distinct == t.count,
            });
        }
        Some(t)
    } else {
        None
    };
    let unit = count_total(args.s, args.m, class)?.unit;
    Ok(EnumerateReport {
        schema: SCHEMA,
        s: args.s,
        m: args.m,
        n: args.n,
        unit_name: match class {
            SeedClass::Single => "G0",
            SeedClass::Long => "A0",
        },
        unit,
        length: args.n << args.m,
        rules: entries,
        total,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PaprReport {
    pub schema: u32,
    pub length: usize,
    pub oversample: usize,
    pub papr_db: f64,
    pub papr_bound_db: f64,
    pub peak: f64,
    pub mean: f64,
    pub samples: usize,
}

/// PAPR summary and the CSV trace.
pub fn papr(c: &ComplexSequence, oversample: usize) -> CliResult<(PaprReport, String)> {
    check_oversample(oversample)?;
    let (papr_db, trace) = papr_oversampled(c, oversample)?;
    Ok((
        PaprReport {
            schema: SCHEMA,
            length: c.len(),
            oversample,
            papr_db,
            papr_bound_db: papr_bound(c)?,
            peak: trace.peak,
            mean: trace.mean,
            samples: trace.power.len(),
        },
        trace.to_csv(),
    ))
}

//! Sequence metrology: autocorrelation, complementarity, envelope power and
//! PAPR, block layout and alphabet classification.

use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::sequence::ComplexSequence;
use crate::{Error, Result};

/// Default oversampling factor for envelope power.
pub const DEFAULT_OVERSAMPLE: usize = 16;

/// Aperiodic autocorrelation `ρ(k) = Σ_i a_i* · a_{i+k}` for `|k| < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApacProfile {
    // index k + N − 1 holds ρ(k)
    values: Vec<Complex64>,
    n: usize,
}

impl ApacProfile {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `ρ(k)`, zero outside `(−N, N)`.
    pub fn at(&self, k: isize) -> Complex64 {
        let idx = k + self.n as isize - 1;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    /// `ρ(0)`, the sequence energy.
    pub fn zero_lag(&self) -> f64 {
        self.at(0).re
    }

    /// `ρ(k)` for `k = 0, …, N − 1`.
    pub fn non_negative(&self) -> &[Complex64] {
        &self.values[self.n - 1..]
    }

    /// All lags from `−(N − 1)` to `N − 1`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

pub fn apac(seq: &ComplexSequence) -> Result<ApacProfile> {
    let a = seq.values();
    let n = a.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let mut values = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
    for k in 0..n {
        let rho: Complex64 = (0..n - k).map(|i| a[i].conj() * a[i + k]).sum();
        values[n - 1 + k] = rho;
        values[n - 1 - k] = rho.conj();
    }
    // ρ(0) is real by definition; drop rounding noise in the imaginary part
    values[n - 1].im = 0.0;
    Ok(ApacProfile { values, n })
}

/// Result of a complementarity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcpCheck {
    pub ok: bool,
    /// `max_{k≠0} |ρ_a(k) + ρ_b(k)|`.
    pub max_violation: f64,
    /// The same, divided by `ρ_a(0) + ρ_b(0)`.
    pub relative_violation: f64,
}

pub fn is_gcp(a: &ComplexSequence, b: &ComplexSequence, tol: f64) -> Result<GcpCheck> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let ra = apac(a)?;
    let rb = apac(b)?;
    let energy = ra.zero_lag() + rb.zero_lag();
    let max_violation = (1..a.len() as isize)
        .map(|k| (ra.at(k) + rb.at(k)).norm())
        .fold(0.0, f64::max);
    let relative_violation = if energy > 0.0 {
        max_violation / energy
    } else {
        0.0
    };
    Ok(GcpCheck {
        ok: max_violation <= tol * energy,
        max_violation,
        relative_violation,
    })
}

/// Autocorrelation bound on the PAPR, in dB.
pub fn papr_bound(seq: &ComplexSequence) -> Result<f64> {
    let r = apac(seq)?;
    let rho0 = r.zero_lag();
    if rho0 == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let side: f64 = r.non_negative()[1..].iter().map(|v| v.norm()).sum();
    Ok(10.0 * ((rho0 + 2.0 * side) / rho0).log10())
}

/// Instantaneous envelope power `|Σ a_n e^{j2πnt/T}|²` sampled at
/// `t/T = i / (L·N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    pub oversample: usize,
    pub power: Vec<f64>,
    pub peak: f64,
    /// Time average over the symbol, equal to `ρ(0)`.
    pub mean: f64,
}

impl PowerTrace {
    pub fn t_norm(&self, i: usize) -> f64 {
        i as f64 / self.power.len() as f64
    }

    pub fn papr_db(&self) -> f64 {
        10.0 * (self.peak / self.mean).log10()
    }

    /// Header `t_norm,power` followed by one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_norm,power\n");
        for (i, p) in self.power.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.t_norm(i), p);
        }
        out
    }
}

/// Envelope power on an `L·N` point grid via a zero-padded transform.
pub fn power_trace(seq: &ComplexSequence, oversample: usize) -> Result<PowerTrace> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if oversample == 0 {
        return Err(Error::InvalidParams("oversampling factor must be ≥ 1".into()));
    }
    let mean = seq.energy();
    if mean == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let size = seq.len() * oversample;
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..seq.len()].copy_from_slice(seq.values());
    FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|v| v.norm_sqr()).collect();
    let peak = power.iter().copied().fold(0.0, f64::max);
    Ok(PowerTrace {
        oversample,
        power,
        peak,
        mean,
    })
}

/// Oversampled PAPR in dB together with the trace it was measured on.
pub fn papr_oversampled(seq: &ComplexSequence, oversample: usize) -> Result<(f64, PowerTrace)> {
    let trace = power_trace(seq, oversample)?;
    Ok((trace.papr_db(), trace))
}

/// Sufficient condition for blocks not to collide: for every variable `a < m`
/// the shift attached to `x_a` is at least the sum of the shifts attached to
/// the later variables.
pub fn check_no_overlap(d: &[usize], pi: &[usize]) -> Result<bool> {
    let m = pi.len();
    crate::encoder::validate_pi(pi, m)?;
    if d.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: d.len(),
        });
    }
    // shift_of[a] = d_k with π_k = a
    let mut shift_of = vec![0usize; m + 1];
    for (k, &p) in pi.iter().enumerate() {
        shift_of[p] = d[k];
    }
    Ok((1..m).all(|a| shift_of[a] >= shift_of[a + 1..].iter().sum::<usize>()))
}

/// A maximal run of non-zero elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    pub start: usize,
    pub len: usize,
}

/// Non-zero runs of a sequence, in order.
pub fn support_clusters(seq: &ComplexSequence) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for i in seq.support() {
        match out.last_mut() {
            Some(c) if c.start + c.len == i => c.len += 1,
            _ => out.push(Cluster { start: i, len: 1 }),
        }
    }
    out
}

/// Lengths of the zero runs between consecutive clusters.
pub fn cluster_gaps(clusters: &[Cluster]) -> Vec<usize> {
    clusters
        .windows(2)
        .map(|w| w[1].start - (w[0].start + w[0].len))
        .collect()
}

/// Smallest familiar alphabet that holds every non-zero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// Unit magnitude, phases on the `H`-th roots of unity.
    Psk(u32),
    /// Odd-integer lattice of the `4s²`-QAM constellation, carrying `s`.
    Qam(u32),
    General,
}

const PSK_ORDERS: [u32; 6] = [2, 4, 8, 16, 32, 64];
const MAX_QAM_S: u32 = 64;

pub fn classify_alphabet(seq: &ComplexSequence, tol: f64) -> Alphabet {
    let nonzero: Vec<Complex64> = seq
        .values()
        .iter()
        .copied()
        .filter(|v| *v != Complex64::new(0.0, 0.0))
        .collect();
    if nonzero.iter().all(|v| (v.norm() - 1.0).abs() <= tol) {
        for h in PSK_ORDERS {
            let step = 2.0 * std::f64::consts::PI / h as f64;
            let on_grid = nonzero.iter().all(|v| {
                let q = v.arg() / step;
                (q - q.round()).abs() * step <= tol
            });
            if on_grid {
                return Alphabet::Psk(h);
            }
        }
    }
    let needed = nonzero
        .iter()
        .map(|v| lattice_index(v.re, tol).zip(lattice_index(v.im, tol)))
        .try_fold(1u32, |acc, uv| uv.map(|(u, v)| acc.max(u).max(v)));
    match needed {
        Some(s) if s <= MAX_QAM_S => Alphabet::Qam(s),
        _ => Alphabet::General,
    }
}

/// `u` such that `|x| = 2u − 1`, if `x` is an odd integer within `tol`.
pub(crate) fn lattice_index(x: f64, tol: f64) -> Option<u32> {
    let a = x.abs();
    let u = ((a + 1.0) / 2.0).round();
    (u >= 1.0 && (a - (2.0 * u - 1.0)).abs() <= tol && u < u32::MAX as f64).then_some(u as u32)
}

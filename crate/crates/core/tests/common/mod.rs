#![allow(dead_code)]

use cs_forge::encoder::{EncoderParams, RecursionParams, SeedPair};
use cs_forge::recursion::PermutationPsi;
use cs_forge::ComplexSequence;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn seq(v: &[Complex64]) -> ComplexSequence {
    v.to_vec().into()
}

/// Blockwise concatenation of scaled seeds.
pub fn blocks(parts: &[(Complex64, &ComplexSequence)]) -> ComplexSequence {
    parts
        .iter()
        .flat_map(|(k, s)| s.values().iter().map(move |v| v * k))
        .collect::<Vec<_>>()
        .into()
}

fn reverse_conj(s: &[Complex64]) -> Vec<Complex64> {
    s.iter().rev().map(|v| v.conj()).collect()
}

/// A random complementary seed of length 1, 2 or 3. With `balanced` the two
/// sequences carry equal energy.
pub fn random_seed<R: Rng>(rng: &mut R, n: usize, balanced: bool) -> SeedPair {
    let unit = |rng: &mut R| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let amp = rng.gen_range(0.5..2.0);
    let (mut a, mut b) = match n {
        1 => {
            let other = if balanced { amp } else { rng.gen_range(0.5..2.0) };
            (vec![unit(rng) * amp], vec![unit(rng) * other])
        }
        2 => {
            let x = unit(rng) * rng.gen_range(0.2..2.0);
            let y = unit(rng) * rng.gen_range(0.2..2.0);
            (vec![x, y], vec![y.conj(), -x.conj()])
        }
        3 => {
            let a = vec![c(1., 0.), c(0., 1.), c(1., 0.)];
            let b = vec![c(1., 0.), c(1., 0.), c(-1., 0.)];
            let (pa, pb) = (unit(rng) * amp, unit(rng) * amp);
            (
                a.into_iter().map(|v| v * pa).collect(),
                b.into_iter().map(|v| v * pb).collect(),
            )
        }
        _ => unreachable!("seed lengths 1..=3 only"),
    };
    if rng.gen_bool(0.5) {
        a = reverse_conj(&a);
    }
    if rng.gen_bool(0.5) {
        b = reverse_conj(&b);
    }
    SeedPair::new(a.into(), b.into()).expect("seed generator yields complementary pairs")
}

pub fn random_pi<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut pi: Vec<usize> = (1..=m).collect();
    pi.shuffle(rng);
    pi
}

/// Random closed-form parameters. `max_shift = 0` keeps the output contiguous.
pub fn random_params<R: Rng>(
    rng: &mut R,
    max_m: usize,
    seed: SeedPair,
    max_shift: usize,
) -> EncoderParams {
    let m = rng.gen_range(1..=max_m);
    let h = *[2u32, 4, 8].choose(rng).unwrap();
    let hf = h as f64;
    let mut p = EncoderParams::neutral(h, random_pi(rng, m), seed);
    for n in 0..m {
        p.e[n] = rng.gen_range(-1.0..1.0);
        p.k[n] = rng.gen_range(0.0..hf);
        p.d[n] = rng.gen_range(0..=max_shift);
    }
    p.e_prime = rng.gen_range(-1.0..1.0);
    p.k_prime = rng.gen_range(0.0..hf);
    p.k_dprime = rng.gen_range(0.0..hf);
    p
}

pub fn random_recursion<R: Rng>(rng: &mut R, max_m: usize, seed: SeedPair) -> RecursionParams {
    let m = rng.gen_range(1..=max_m);
    let h = *[2u32, 4, 8].choose(rng).unwrap();
    let mut psi: Vec<usize> = (0..m).collect();
    psi.shuffle(rng);
    let mut rp = RecursionParams::neutral(h, PermutationPsi::new(psi).unwrap(), seed);
    let hf = h as f64;
    for n in 0..m {
        rp.c_a[n] = rng.gen_range(-1.0..1.0);
        rp.c_b[n] = rng.gen_range(-1.0..1.0);
        rp.k_a[n] = rng.gen_range(-hf..hf);
        rp.k_b[n] = rng.gen_range(-hf..hf);
        rp.k[n] = rng.gen_range(-hf..hf);
        rp.d[n] = rng.gen_range(0..=4);
    }
    rp
}

/// Random shifts that keep every block apart: the shift of each variable is
/// at least the sum of the shifts of the later variables.
pub fn gapped_shifts<R: Rng>(rng: &mut R, pi: &[usize], max_extra: usize) -> Vec<usize> {
    let m = pi.len();
    let mut by_var = vec![0usize; m + 1];
    let mut later = 0;
    for a in (1..=m).rev() {
        by_var[a] = if rng.gen_bool(0.5) || later > 0 {
            later + rng.gen_range(0..=max_extra)
        } else {
            0
        };
        later += by_var[a];
    }
    pi.iter().map(|&p| by_var[p]).collect()
}

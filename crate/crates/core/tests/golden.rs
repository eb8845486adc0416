mod common;

use std::f64::consts::PI;

use common::{blocks, c, seq};
use cs_forge::analysis::{check_no_overlap, cluster_gaps, is_gcp, papr_oversampled, support_clusters};
use cs_forge::encoder::{encode_pair, EncoderParams, SeedPair};
use cs_forge::{ComplexSequence, REL_TOL};

fn e1() -> f64 {
    2.0 / PI * 3f64.ln()
}

fn synthesis(pi: Vec<usize>, seed: SeedPair) -> EncoderParams {
    let mut p = EncoderParams::neutral(4, pi, seed);
    p.e[0] = e1();
    p
}

fn holzmann6() -> (ComplexSequence, ComplexSequence) {
    let a = seq(&[c(1., 0.), c(0., 1.), c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]);
    let b = seq(&[c(1., 0.), c(0., 1.), c(1., 0.), c(-1., 0.), c(-1., 0.), c(1., 0.)]);
    (a, b)
}

#[test]
fn example3_trivial_seed() {
    let pair = encode_pair(&synthesis(vec![2, 1, 3], SeedPair::trivial())).unwrap();
    let want = ComplexSequence::from_real(&[1., 1., 3., 3., 3., -3., -1., 1.]);
    assert!(pair.c.approx_eq(&want, REL_TOL), "{:?}", pair.c);
    assert!(is_gcp(&pair.c, &pair.d, REL_TOL).unwrap().ok);
}

#[test]
fn example4_length6_seed() {
    let (a, b) = holzmann6();
    let seed = SeedPair::new(a.clone(), b.clone()).unwrap();
    let one = c(1., 0.);
    let three = c(3., 0.);

    let pair = encode_pair(&synthesis(vec![2, 1, 3], seed.clone())).unwrap();
    let want = blocks(&[
        (one, &a),
        (one, &a),
        (three, &b),
        (three, &b),
        (three, &a),
        (-three, &a),
        (-one, &b),
        (one, &b),
    ]);
    assert_eq!(pair.c.len(), 48);
    assert!(pair.c.approx_eq(&want, REL_TOL));
    assert!(is_gcp(&pair.c, &pair.d, REL_TOL).unwrap().ok);

    // Reversed order. The amplitude step moves to n = 2 so that it still
    // couples x1 and x2, which keeps the amplitude and phase tables intact.
    let mut rev = EncoderParams::neutral(4, vec![3, 1, 2], seed);
    rev.e[1] = e1();
    let pair = encode_pair(&rev).unwrap();
    let want = blocks(&[
        (one, &a),
        (one, &b),
        (three, &a),
        (three, &b),
        (three, &a),
        (-three, &b),
        (-one, &a),
        (one, &b),
    ]);
    assert!(pair.c.approx_eq(&want, REL_TOL));
    assert!(is_gcp(&pair.c, &pair.d, REL_TOL).unwrap().ok);
}

#[test]
fn example5_two_clusters() {
    let a = seq(&[c(1., 0.), c(0., 1.), c(1., 0.)]);
    let b = ComplexSequence::from_real(&[1., 1., -1.]);
    let seed = SeedPair::new(a.clone(), b.clone()).unwrap();
    let mut p = synthesis(vec![2, 1, 3], seed);
    p.d[1] = 60;
    assert!(check_no_overlap(&p.d, &p.pi).unwrap());

    let pair = encode_pair(&p).unwrap();
    assert!(!pair.overlap);
    assert_eq!(pair.c.len(), 84);
    let one = c(1., 0.);
    let three = c(3., 0.);
    let gap = ComplexSequence::zeros(60);
    let want = blocks(&[
        (one, &a),
        (one, &a),
        (three, &b),
        (three, &b),
        (one, &gap),
        (three, &a),
        (-three, &a),
        (-one, &b),
        (one, &b),
    ]);
    assert!(pair.c.approx_eq(&want, REL_TOL));

    let clusters = support_clusters(&pair.c);
    assert_eq!(clusters.len(), 2);
    assert_eq!((clusters[0].len, clusters[1].len), (12, 12));
    assert_eq!(cluster_gaps(&clusters), vec![60]);
    assert!(is_gcp(&pair.c, &pair.d, REL_TOL).unwrap().ok);
    let (papr, _) = papr_oversampled(&pair.c, 16).unwrap();
    assert!(papr <= 3.02, "{papr}");
}

//! Library results against independent oracles, live and frozen.
//!
//! Frozen values were produced by the oracles in `common` (operator
//! exponentials on a 100-level truncation and creation-operator expansion of
//! interferometer amplitudes) and are pinned here so regressions in either
//! path show up.

mod common;

use bosim::fock::{enumerate_patterns, transition_amplitude, OccupationPattern};
use bosim::gaussian::{displaced_squeezed_prefix, squeezed_vacuum_coefficients};
use bosim::haar::{haar_unitary, RandomSeed};
use bosim::matrix::ComplexMatrix;
use bosim::tsbs::{joint_probability_general, squeezed_input_probability, TsbsConfig};
use bosim::gaussian::SqueezeVector;
use bosim::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pat(v: &[usize]) -> OccupationPattern {
    OccupationPattern::new(v.to_vec())
}

const DISPLACED_SQUEEZED: [(f64, f64); 6] = [
    (8.43816361582050978e-1, -3.68956383678446589e-2),
    (3.13294147380748789e-1, 3.13815476307755692e-1),
    (1.66352519619608313e-1, 1.56849418867957474e-1),
    (7.34700446587779749e-2, 1.43937858699224153e-1),
    (2.71046071430456163e-2, 7.93032736133588573e-2),
    (9.69928146052814570e-3, 5.47669389961924005e-2),
];

const DISPLACED_SQUEEZED_NEG: [(f64, f64); 6] = [
    (4.38404905445583248e-1, -8.43023588620754744e-2),
    (-5.78840511768850652e-1, 2.52249660914355134e-1),
    (3.91733651397800198e-1, -3.50383002420573741e-1),
    (-6.98114593072439310e-2, 2.71018052826919043e-1),
    (-1.22741307771047234e-1, -8.25252734087052325e-2),
    (1.10914009110337622e-1, -5.81906853396072718e-2),
];

const SQUEEZED_HALF: [f64; 9] = [
    9.41710615831667708e-1,
    0.0,
    3.07719176458369936e-1,
    0.0,
    1.23150813854239774e-1,
    0.0,
    5.19515795294235930e-2,
    0.0,
    2.24571622090749337e-2,
];

#[test]
fn displaced_squeezed_frozen() {
    let got = displaced_squeezed_prefix(c(0.5, 0.3), 0.3, 5);
    for (g, &(re, im)) in got.iter().zip(&DISPLACED_SQUEEZED) {
        assert!((g - c(re, im)).norm() < 1e-13);
    }
    let got = displaced_squeezed_prefix(c(-1.0, 0.5), -0.4, 5);
    for (g, &(re, im)) in got.iter().zip(&DISPLACED_SQUEEZED_NEG) {
        assert!((g - c(re, im)).norm() < 1e-13);
    }
}

#[test]
fn squeezed_vacuum_frozen() {
    let got = squeezed_vacuum_coefficients(0.5, 8).unwrap();
    for (g, e) in got.iter().zip(&SQUEEZED_HALF) {
        assert!((g - e).abs() < 1e-14);
    }
}

fn fixed_pair() -> (ComplexMatrix, ComplexMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u_a = ComplexMatrix::from_rows(&[vec![c(h, 0.0), c(0.0, h)], vec![c(0.0, h), c(h, 0.0)]]).unwrap();
    let u_b = ComplexMatrix::from_rows(&[vec![c(0.6, 0.0), c(0.0, 0.8)], vec![c(0.0, 0.8), c(0.6, 0.0)]]).unwrap();
    (u_a, u_b)
}

#[test]
fn scattershot_joint_frozen() {
    let (u_a, u_b) = fixed_pair();
    let cfg = TsbsConfig::equal(u_a.clone(), u_b.clone(), 0.4).unwrap();
    let cases = [
        ([2, 0], [1, 1], 7.08083712000000926e-4),
        ([1, 1], [1, 1], 1.66471925760000132e-2),
        ([0, 2], [2, 0], 1.73480509440000139e-2),
        ([1, 0], [0, 1], 1.10638080000000000e-1),
    ];
    for (k, m, expected) in cases {
        let p = joint_probability_general(&cfg, &pat(&k), &pat(&m)).unwrap();
        assert!((p - expected).abs() < 1e-15, "{k:?} {m:?}: {p}");
    }
    let unequal = TsbsConfig::new(u_a, u_b, vec![0.2, 0.6]).unwrap();
    let p = joint_probability_general(&unequal, &pat(&[1, 1]), &pat(&[2, 0])).unwrap();
    assert!((p - 1.43327232000000099e-2).abs() < 1e-15);
}

#[test]
fn transition_amplitudes_match_creation_operator_expansion() {
    let u = haar_unitary(3, RandomSeed(41)).unwrap();
    for n in 0..=3 {
        for out in enumerate_patterns(3, n) {
            for input in enumerate_patterns(3, n) {
                let lib = transition_amplitude(&u, &out, &input).unwrap();
                let oracle = common::transition_amplitude_oracle(&u, &out, &input);
                assert!((lib - oracle).norm() < 1e-13, "{out} {input}");
            }
        }
    }
}

#[test]
fn general_joint_matches_oracle_for_unequal_squeezing() {
    let u_a = haar_unitary(3, RandomSeed(42)).unwrap();
    let u_b = haar_unitary(3, RandomSeed(43)).unwrap();
    let t = vec![0.15, 0.45, 0.7];
    let cfg = TsbsConfig::new(u_a.clone(), u_b.clone(), t.clone()).unwrap();
    for n in 0..=2 {
        for k in enumerate_patterns(3, n) {
            for m in enumerate_patterns(3, n) {
                let lib = joint_probability_general(&cfg, &k, &m).unwrap();
                let oracle = common::tsbs_joint_oracle(&u_a, &u_b, &t, &k, &m);
                assert!((lib - oracle).abs() <= 1e-13 * oracle.max(1e-3), "{k} {m}");
            }
        }
    }
}

#[test]
fn squeezed_input_matches_fock_oracle_for_arbitrary_profile() {
    let u = haar_unitary(3, RandomSeed(44)).unwrap();
    let xi = vec![0.2, -0.35, 0.5];
    let sv = SqueezeVector::new(xi.clone());
    for n in [0, 2, 4] {
        for out in enumerate_patterns(3, n) {
            let lib = squeezed_input_probability(&u, &sv, &out).unwrap();
            let oracle = common::squeezed_fock_oracle(&u, &xi, &out);
            assert!((lib - oracle).abs() <= 1e-12 * oracle.max(1e-6), "{out}");
        }
    }
    assert_eq!(squeezed_input_probability(&u, &sv, &pat(&[1, 0, 0])).unwrap(), 0.0);
}

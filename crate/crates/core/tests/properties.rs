//! Randomized invariants.

use proptest::prelude::*;

use bosim::fock::{enumerate_patterns, sector_unitary, transition_amplitude, OccupationPattern};
use bosim::haar::{ginibre, haar_unitary, RandomSeed};
use bosim::homodyne::{segment, DensityEvaluator, EightPortSpec, HomodyneOutcome};
use bosim::matrix::ComplexMatrix;
use bosim::permanent::{permanent, permanent_naive};
use bosim::tsbs::{conditional_probability, unfolded_probability, TsbsConfig};
use bosim::Complex64;

fn permuted(a: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    let n = a.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a[(rows[i], cols[j])];
        }
    }
    out
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permanent_ignores_row_and_column_order(
        seed in any::<u64>(),
        rows in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
        cols in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let a = ginibre(6, RandomSeed(seed));
        let p = permanent(&a).unwrap();
        let q = permanent(&permuted(&a, &rows, &cols)).unwrap();
        prop_assert!(relative(q, p) < 1e-11);
        prop_assert!(relative(permanent(&a.transpose()).unwrap(), p) < 1e-11);
    }

    #[test]
    fn permanent_is_linear_in_each_row(seed in any::<u64>(), row in 0usize..5, re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let a = ginibre(5, RandomSeed(seed));
        let b = ginibre(5, RandomSeed(seed.wrapping_add(1)));
        let s = Complex64::new(re, im);
        let mut sum = a.clone();
        let mut only_b = a.clone();
        let mut scaled = a.clone();
        for j in 0..5 {
            sum[(row, j)] = a[(row, j)] + b[(row, j)];
            only_b[(row, j)] = b[(row, j)];
            scaled[(row, j)] = a[(row, j)] * s;
        }
        let pa = permanent(&a).unwrap();
        let lhs = permanent(&sum).unwrap();
        let rhs = pa + permanent(&only_b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        prop_assert!((permanent(&scaled).unwrap() - pa * s).norm() < 1e-10 * (1.0 + pa.norm()));
        prop_assert!(relative(permanent_naive(&a).unwrap(), pa) < 1e-10);
    }

    #[test]
    fn sector_unitaries_are_unitary(seed in any::<u64>(), modes in 1usize..5, photons in 0usize..4) {
        let u = haar_unitary(modes, RandomSeed(seed)).unwrap();
        prop_assert!(sector_unitary(&u, photons).unwrap().is_unitary(1e-11));
    }

    #[test]
    fn interferometers_compose(seed in any::<u64>(), photons in 0usize..4) {
        let u = haar_unitary(3, RandomSeed(seed)).unwrap();
        let v = haar_unitary(3, RandomSeed(seed.wrapping_add(7))).unwrap();
        let uv = &u * &v;
        let pats = enumerate_patterns(3, photons);
        for k in &pats {
            for m in &pats {
                let direct = transition_amplitude(&uv, k, m).unwrap();
                let composed: Complex64 = pats
                    .iter()
                    .map(|n| transition_amplitude(&u, k, n).unwrap() * transition_amplitude(&v, n, m).unwrap())
                    .sum();
                prop_assert!((direct - composed).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn conditional_equals_unfolded(seed in any::<u64>(), t in 0.05..0.95f64) {
        let u_a = haar_unitary(3, RandomSeed(seed)).unwrap();
        let u_b = haar_unitary(3, RandomSeed(seed.wrapping_add(3))).unwrap();
        let cfg = TsbsConfig::equal(u_a.clone(), u_b.clone(), t).unwrap();
        let m = OccupationPattern::new(vec![1, 0, 1]);
        for k in enumerate_patterns(3, 2) {
            let c = conditional_probability(&cfg, &k, &m).unwrap();
            let u = unfolded_probability(&u_a, &u_b, &k, &m).unwrap();
            prop_assert!((c - u).abs() < 1e-11);
        }
    }

    #[test]
    fn every_point_lies_in_exactly_one_segment(x in -20.0..20.0f64, eta in 0.5..4.0f64) {
        let hits = (0..=100).filter(|&j| segment(j, eta).unwrap().contains(x)).count();
        prop_assert_eq!(hits, 1);
    }

    #[test]
    fn chained_detectors_alternate(tau0 in 0.05..0.95f64, pairs in 1usize..5) {
        let xi = EightPortSpec::chained(tau0, 2 * pairs).unwrap().xi();
        for (i, x) in xi.iter().enumerate() {
            let expected = if i % 2 == 0 { xi[0] } else { -xi[0] };
            prop_assert!((x - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn densities_are_nonnegative(
        seed in any::<u64>(),
        xi in -0.5..0.5f64,
        q in prop::collection::vec(-3.0..3.0f64, 2),
        p in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let spec = EightPortSpec::from_xi(&[xi, -xi]).unwrap();
        let u = haar_unitary(2, RandomSeed(seed)).unwrap();
        let eval = DensityEvaluator::new(&spec, &u, &OccupationPattern::new(vec![1, 1])).unwrap();
        let d = eval.density(&HomodyneOutcome::new(q, p).unwrap()).unwrap();
        prop_assert!(d >= 0.0 && d.is_finite());
    }
}

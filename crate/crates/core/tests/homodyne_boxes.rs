//! Phase-space box probabilities against direct quadrature.

use bosim::homodyne::{box_integral, origin_evaluator, BoxIndex, DensityEvaluator};
use bosim::matrix::ComplexMatrix;
use bosim::quadrature::integrate_box;
use bosim::OccupationPattern;

fn heralded_pair(xi: f64) -> DensityEvaluator {
    let one = OccupationPattern::new(vec![1]);
    origin_evaluator(&ComplexMatrix::identity(1), &ComplexMatrix::identity(1), xi, &one, &one).unwrap()
}

#[test]
fn central_grid_matches_direct_quadrature() {
    // segments 0..5 at η = 1 tile (−5/2, 5/2] on every axis
    let eval = heralded_pair(0.3);
    let mut total = 0.0;
    let mut smallest = f64::INFINITY;
    for r0 in 0..5 {
        for r1 in 0..5 {
            for s0 in 0..5 {
                for s1 in 0..5 {
                    let bx = BoxIndex { r: vec![r0, r1], s: vec![s0, s1], eta: 1.0 };
                    let p = box_integral(&eval, &bx, 8).unwrap();
                    smallest = smallest.min(p);
                    total += p;
                }
            }
        }
    }
    let direct = integrate_box(|x| eval.density_at(x), &[-2.5; 4], &[2.5; 4], 40).unwrap();
    assert!(smallest >= 0.0);
    assert!((total - direct).abs() < 1e-6, "{total} vs {direct}");
    assert!(total <= 1.0);
}

#[test]
fn growing_tilings_approach_one() {
    let eval = heralded_pair(-0.2);
    let mass = |half: f64| integrate_box(|x| eval.density_at(x), &[-half; 4], &[half; 4], 48).unwrap();
    let small = mass(1.5);
    let medium = mass(3.5);
    let large = mass(7.5);
    assert!(small < medium && medium < large && large <= 1.0 + 1e-9);
    assert!((1.0 - large).abs() < 1e-6, "{large}");
}

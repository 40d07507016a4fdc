use odenet::error::Error;
use odenet::trial::{build_case1, build_case2, build_case3, build_case4};
use odenet::{ConstraintSpec, Jet, Polynomial, TrialForm};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
enum Case {
    One,
    Two,
    Three,
    Four,
}

const MIN_SEPARATION: f64 = 0.15;

/// `count` points in [-1, 2] at least `MIN_SEPARATION` apart.
fn spread_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let mut points: Vec<f64> = Vec::with_capacity(count);
    while points.len() < count {
        let p = rng.gen_range(-1.0..2.0);
        if points.iter().all(|q| (p - q).abs() >= MIN_SEPARATION) {
            points.push(p);
        }
    }
    points
}

fn random_constraints(rng: &mut ChaCha8Rng, case: Case, n: usize) -> Vec<ConstraintSpec> {
    let orders: Vec<usize> = match case {
        Case::One => vec![0; n],
        Case::Two => vec![n - 1; n],
        Case::Three => (0..n).collect(),
        Case::Four => (0..n).map(|_| rng.gen_range(0..n)).collect(),
    };
    let mut out = Vec::with_capacity(n);
    for order in 0..n {
        let count = orders.iter().filter(|&&o| o == order).count();
        for point in spread_points(rng, count) {
            out.push(ConstraintSpec::new(order, point, rng.gen_range(-10.0..10.0)));
        }
    }
    out
}

fn build(case: Case, constraints: &[ConstraintSpec], n: usize) -> odenet::Result<TrialForm> {
    match case {
        Case::One => build_case1(constraints),
        Case::Two => build_case2(constraints),
        Case::Three => build_case3(constraints),
        Case::Four => build_case4(constraints, n),
    }
}

/// A random instance that builds; degenerate recursion denominators are
/// redrawn.
fn instance(rng: &mut ChaCha8Rng, case: Case, n: usize) -> (Vec<ConstraintSpec>, TrialForm) {
    loop {
        let constraints = random_constraints(rng, case, n);
        match build(case, &constraints, n) {
            Ok(trial) => return (constraints, trial),
            Err(Error::DegenerateDenominator { .. }) => continue,
            Err(e) => panic!("{case:?} n={n} {constraints:?}: {e}"),
        }
    }
}

fn assert_exact(trial: &TrialForm, constraints: &[ConstraintSpec], rng: &mut ChaCha8Rng, jets: usize) {
    let n = trial.ode_order();
    for _ in 0..jets {
        let values: Vec<f64> = (0..=n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let jet = Jet::new(values);
        for c in constraints {
            let u = trial.eval(c.point, &jet).unwrap();
            let err = (u[c.order] - c.value).abs();
            assert!(
                err <= 1e-8 * (1.0 + c.value.abs()),
                "u^({})({}) = {} but the condition is {} (err {err:e})",
                c.order,
                c.point,
                u[c.order],
                c.value
            );
        }
    }
}

fn assert_same_poly(a: &Polynomial, b: &Polynomial, what: &str) {
    assert_eq!(a.degree(), b.degree(), "{what}: {a} vs {b}");
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1e-300);
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        assert!((x - y).abs() <= 1e-9 * scale, "{what}: {a} vs {b}");
    }
}

#[test]
fn every_case_meets_its_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in [Case::One, Case::Two, Case::Three, Case::Four] {
        for n in 1..=5 {
            for _ in 0..25 {
                let (constraints, trial) = instance(&mut rng, case, n);
                assert_exact(&trial, &constraints, &mut rng, 50);
            }
        }
    }
}

#[test]
fn direct_builders_agree_with_general_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..100 {
        let case = [Case::One, Case::Two, Case::Three][i % 3];
        let n = 1 + (i / 3) % 5;
        let (constraints, direct) = instance(&mut rng, case, n);
        let general = build_case4(&constraints, n).unwrap();
        assert_same_poly(general.fixed_part(), direct.fixed_part(), "fixed part");
        assert_same_poly(general.multiplier_poly(), direct.multiplier_poly(), "multiplier");
    }
}

#[test]
fn degree_bound_for_one_condition_per_order_pattern() {
    // with multiplicities alpha_i the multiplier has degree sum alpha_i (i + 1)
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5 {
        for case in [Case::One, Case::Two, Case::Three, Case::Four] {
            let (constraints, trial) = instance(&mut rng, case, n);
            let bound: usize = constraints.iter().map(|c| c.order + 1).sum();
            assert_eq!(trial.multiplier_poly().degree(), bound);
            assert!(trial.fixed_part().degree() < bound.max(1) || trial.fixed_part().is_zero());
        }
        let (_, trial) = instance(&mut rng, Case::Three, n);
        assert!(trial.multiplier_poly().degree() <= n * (n + 1) / 2);
    }
}

#[test]
fn coincident_points_across_orders_are_allowed() {
    let constraints = [ConstraintSpec::new(0, 0.5, 1.0), ConstraintSpec::new(1, 0.5, -2.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for trial in [build_case3(&constraints).unwrap(), build_case4(&constraints, 2).unwrap()] {
        assert_exact(&trial, &constraints, &mut rng, 10);
    }
}

#[test]
fn three_conditions_at_one_point_are_singular() {
    // the second-order denominator is ((x - a)^3)'' = 0 at a
    let constraints = [
        ConstraintSpec::new(0, 0.5, 1.0),
        ConstraintSpec::new(1, 0.5, -2.0),
        ConstraintSpec::new(2, 0.5, 3.0),
    ];
    assert!(matches!(build_case3(&constraints), Err(Error::DegenerateDenominator { order: 2, .. })));
    assert!(matches!(build_case4(&constraints, 3), Err(Error::DegenerateDenominator { order: 2, .. })));
}

#[test]
fn coincident_points_within_an_order_are_rejected() {
    let constraints = [ConstraintSpec::new(1, 0.5, 1.0), ConstraintSpec::new(1, 0.5, 2.0)];
    assert!(matches!(build_case4(&constraints, 2), Err(Error::DuplicatePoint { .. })));
    assert!(matches!(build_case2(&constraints), Err(Error::DuplicatePoint { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_engine_is_exact(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (constraints, trial) = instance(&mut rng, Case::Four, n);
        assert_exact(&trial, &constraints, &mut rng, 5);
    }

    #[test]
    fn trial_is_linear_in_the_network_jet(seed in any::<u64>(), n in 1usize..=4, x in -1.0f64..2.0) {
        // u[N] - u[0] is linear in N
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, trial) = instance(&mut rng, Case::Four, n);
        let a: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let zero = trial.eval(x, &Jet::zero(n)).unwrap();
        let ua = trial.eval(x, &Jet::new(a)).unwrap();
        let ub = trial.eval(x, &Jet::new(b)).unwrap();
        let us = trial.eval(x, &Jet::new(sum)).unwrap();
        for k in 0..=n {
            let lhs = us[k] - zero[k];
            let rhs = (ua[k] - zero[k]) + (ub[k] - zero[k]);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs() + zero[k].abs()));
        }
    }
}

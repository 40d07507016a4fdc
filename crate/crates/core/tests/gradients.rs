use odenet::models::{home_heating_problem, newton_cooling_problem, suspension_problem};
use odenet::train::{build_trials, collocate, LossContext};
use odenet::{Activation, BasisForm, Mlp, OdeProblem, ParamGradient};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// k-th central difference of `f` at `x` with step `h`.
fn central_difference(f: impl Fn(f64) -> f64, x: f64, k: usize, h: f64) -> f64 {
    match k {
        0 => f(x),
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        _ => unreachable!(),
    }
}

fn random_net(rng: &mut ChaCha8Rng) -> Mlp {
    let depth = rng.gen_range(1..=2);
    let mut sizes = vec![1];
    for _ in 0..depth {
        sizes.push(rng.gen_range(1..=5));
    }
    sizes.push(1);
    let act = if rng.gen_bool(0.5) { Activation::Sigmoid } else { Activation::Tanh };
    let mut mlp = Mlp::new(&sizes, act, rng.gen()).unwrap();
    // nonzero biases exercise every path of the reverse sweep
    for p in mlp.params_mut() {
        *p += rng.gen_range(-0.3..0.3);
    }
    mlp
}

#[test]
fn jets_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mlp = random_net(&mut rng);
        let x = rng.gen_range(-2.0..2.0);
        let jet = mlp.forward_jet(x, 3).unwrap();
        for k in 1..=3 {
            let fd = central_difference(|t| mlp.forward(t), x, k, 1e-3);
            let exact = jet.values()[k];
            assert!(
                (exact - fd).abs() <= 1e-5 * exact.abs().max(1.0),
                "order {k} at {x}: jet {exact} vs fd {fd}"
            );
        }
    }
}

#[test]
fn parameter_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mlp = random_net(&mut rng);
        let order = rng.gen_range(0..=3);
        let x = rng.gen_range(-2.0..2.0);
        let cot: Vec<f64> = (0..=order).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let grad = mlp.backprop_jet(x, order, &cot).unwrap();
        let objective = |m: &Mlp| -> f64 {
            let jet = m.forward_jet(x, order).unwrap();
            jet.values().iter().zip(&cot).map(|(a, b)| a * b).sum()
        };
        for i in 0..mlp.params().len() {
            let h = 1e-5;
            let mut plus = mlp.clone();
            plus.params_mut()[i] += h;
            let mut minus = mlp.clone();
            minus.params_mut()[i] -= h;
            let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
            let g = grad.values()[i];
            assert!(
                (g - fd).abs() <= 1e-4 * g.abs().max(fd.abs()).max(1e-3),
                "param {i}: grad {g} vs fd {fd}"
            );
        }
    }
}

fn check_loss_gradient(problem: &OdeProblem, basis: BasisForm, seed: u64) {
    let trials = build_trials(problem, basis).unwrap();
    let (lo, hi) = problem.domain;
    // three interior points keep every term of the loss active
    let points = vec![lo + 0.13 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.91 * (hi - lo)];
    let ctx = LossContext::new(problem, &trials, &points).unwrap();
    let mlps: Vec<Mlp> = (0..problem.dim)
        .map(|k| Mlp::new(&[1, 4, 1], Activation::Sigmoid, seed + k as u64).unwrap())
        .collect();
    let mut grads: Vec<ParamGradient> = mlps.iter().map(ParamGradient::zeros_like).collect();
    let loss = ctx.loss_and_gradient(&mlps, &mut grads).unwrap();
    assert_eq!(loss, ctx.loss(&mlps).unwrap());
    for k in 0..mlps.len() {
        for i in 0..mlps[k].params().len() {
            let h = 1e-5;
            let mut plus = mlps.clone();
            plus[k].params_mut()[i] += h;
            let mut minus = mlps.clone();
            minus[k].params_mut()[i] -= h;
            let fd = (ctx.loss(&plus).unwrap() - ctx.loss(&minus).unwrap()) / (2.0 * h);
            let g = grads[k].values()[i];
            assert!(
                rel_err(g, fd) <= 1e-4 || (g - fd).abs() <= 1e-7 * loss.max(1.0),
                "{} {basis} net {k} param {i}: grad {g} vs fd {fd}",
                problem.name
            );
        }
    }
}

#[test]
fn cooling_loss_gradient() {
    for basis in BasisForm::all(3.0, 2.0) {
        check_loss_gradient(&newton_cooling_problem(), basis, 1);
    }
}

#[test]
fn suspension_loss_gradient() {
    check_loss_gradient(&suspension_problem(), BasisForm::Polynomial { c: 10.0 }, 2);
    check_loss_gradient(&suspension_problem(), BasisForm::Exponential, 3);
}

#[test]
fn heating_loss_gradient_couples_components() {
    for basis in [BasisForm::Exponential, BasisForm::Logarithmic { base: 4.0 }] {
        check_loss_gradient(&home_heating_problem(), basis, 4);
    }
}

#[test]
fn untrained_cooling_loss_is_finite_and_positive() {
    let problem = newton_cooling_problem();
    let trials = build_trials(&problem, BasisForm::Exponential).unwrap();
    let mlp = Mlp::new(&[1, 10, 1], Activation::Sigmoid, 42).unwrap();
    let points = collocate(problem.domain, 32).unwrap();
    let loss = odenet::residual_loss(&problem, &trials, &[mlp], &points).unwrap();
    assert!(loss.is_finite() && loss > 0.0);
}

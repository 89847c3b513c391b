//! Exact solution in one step by choosing the source split well.
//!
//! The benchmark `y'' = e^s - s + int_0^1 s t y(t) dt`, `y(0) = y'(0) = 1`
//! has solution `e^s`. Splitting the source as `x_0 = e^s`, `x_1 = -s` makes
//! the split-source scheme's initial equation `L[u_0] = x_0` produce the
//! exact solution, and every later iterate collapses to zero. The standard
//! scheme does the same when handed the exact solution as initial guess.
//!
//! Run with: `cargo run --example exact_recovery`

use hamsolve::algebra::{rat_int, ExpPoly, Rational};
use hamsolve::homotopy::{run, MethodConfig, Variant};
use hamsolve::problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};
use num_traits::Zero;

fn problem(split: Vec<ExpPoly>) -> VFIDEProblem {
    VFIDEProblem {
        p: 2,
        a_coeffs: vec![],
        split,
        lambda1: Rational::zero(),
        lambda2: rat_int(1),
        kernel1: SeparableKernel::zero(),
        kernel2: SeparableKernel::product(ExpPoly::var(), ExpPoly::var()),
        f1: PowerNonlinearity::identity(),
        f2: PowerNonlinearity::identity(),
        domain: (rat_int(0), rat_int(1)),
        alphas: vec![rat_int(1), rat_int(1)],
    }
}

fn main() {
    // split (e^t, -t): u_0 already solves the equation
    let exact_split = problem(vec![ExpPoly::exp(1), ExpPoly::term(rat_int(-1), 1, 0)]);
    let sol = run(&exact_split, &MethodConfig::new(Variant::NdHam, rat_int(-1), 5)).unwrap();
    println!("split-source scheme, split (e^t, -t):");
    for (m, u) in sol.iterates.iter().enumerate() {
        println!("  u[{m}] = {u}");
    }
    println!("  sum  = {}", sol.full_sum());
    assert_eq!(sol.full_sum(), ExpPoly::exp(1));

    // standard scheme started at the exact solution stays there
    let plain = problem(vec![ExpPoly::exp(1).sub(&ExpPoly::var())]);
    let config = MethodConfig::new(Variant::Ham, rat_int(-1), 5).with_initial_guess(ExpPoly::exp(1));
    let sol = run(&plain, &config).unwrap();
    println!("standard scheme, initial guess e^t:");
    for (m, u) in sol.iterates.iter().enumerate() {
        println!("  u[{m}] = {u}");
    }
    assert!(sol.iterates[1..].iter().all(ExpPoly::is_zero));
    println!("all corrections vanish exactly.");
}

//! Effect of the convergence-control parameter: residual norms across a
//! sweep of hbar values, including a divergent choice caught by the guard.
//!
//! Run with: `cargo run --example hbar_sweep`

use hamsolve::algebra::{rat, rat_int, ExpPoly, Rational};
use hamsolve::diagnostics::residual_norm;
use hamsolve::homotopy::{run, MethodConfig, Variant};
use hamsolve::problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};
use num_traits::Zero;

fn main() {
    let problem = VFIDEProblem {
        p: 1,
        a_coeffs: vec![],
        split: vec![ExpPoly::constant(rat_int(-1)), ExpPoly::zero()],
        lambda1: rat_int(1),
        lambda2: Rational::zero(),
        kernel1: SeparableKernel::one(),
        kernel2: SeparableKernel::zero(),
        f1: PowerNonlinearity::power(2),
        f2: PowerNonlinearity::identity(),
        domain: (rat_int(0), rat_int(1)),
        alphas: vec![rat_int(0)],
    };

    println!("max residual |N[sum] - f| on a 101-point grid, 5 iterations:\n");
    println!("{:>8} {:>14}", "hbar", "residual");
    for num in [-20i64, -15, -12, -10, -8, -5, -2] {
        let hbar = rat(num, 10);
        let config = MethodConfig::new(Variant::NdHam, hbar.clone(), 5);
        let sol = run(&problem, &config).unwrap();
        let norm = residual_norm(&problem, &sol.full_sum(), 101).unwrap();
        println!("{:>8} {norm:>14.6e}", format!("{hbar}"));
    }

    // residual decay across orders at the best-behaved value
    println!("\nresidual decay at hbar = -1:");
    let sol = run(&problem, &MethodConfig::new(Variant::NdHam, rat_int(-1), 5)).unwrap();
    for m in 1..=5 {
        let norm = residual_norm(&problem, &sol.partial_sum(m), 101).unwrap();
        println!("  after {m} iteration(s): {norm:.6e}");
    }

    // a far-out hbar balloons the coefficients; the guard reports it but the
    // run still completes with exact arithmetic
    let mut config = MethodConfig::new(Variant::NdHam, rat_int(-60), 6);
    config.divergence_bound = 1e12;
    let sol = run(&problem, &config).unwrap();
    match &sol.divergence {
        Some(note) => println!(
            "\nhbar = -60 trips the divergence guard at iterate {} (magnitude {:.3e})",
            note.iterate, note.magnitude
        ),
        None => println!("\nhbar = -60 stayed under the divergence bound"),
    }
}

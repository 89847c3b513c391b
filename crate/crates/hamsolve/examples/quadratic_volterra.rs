//! Series solution of the quadratic Volterra problem
//! `u'(s) = -1 + int_0^s u^2(t) dt`, `u(0) = 0`, compared against stored
//! reference data on the published sample grid.
//!
//! Run with: `cargo run --example quadratic_volterra`

use hamsolve::algebra::{rat, rat_int, ExpPoly, Rational};
use hamsolve::diagnostics::build_table;
use hamsolve::homotopy::{run, MethodConfig, Variant};
use hamsolve::problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};
use hamsolve::reference;
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

    // five iterations of the split-source scheme at hbar = -1
    let config = MethodConfig::new(Variant::NdHam, rat_int(-1), 5).with_label("nd-ham");
    let sol = run(&problem, &config).unwrap();
    println!("iterates:");
    for (m, u) in sol.iterates.iter().enumerate() {
        println!("  u[{m}] = {u}");
    }
    println!("\nfifth-term series: {}", sol.full_sum());

    // halving weights on the same iterate family give the weighted variant
    let mut weighted = ExpPoly::zero();
    for (m, u) in sol.iterates.iter().enumerate() {
        weighted = weighted.add(&u.scale(&rat(1, 1 << m)));
    }
    println!("halved-weight sum: {weighted}");
    assert_eq!(weighted, reference::oqham_fifth_series());

    // numeric comparison on the published grid, Wavelet-Galerkin surrogate
    // as the reference column
    let table = build_table(
        &[&sol],
        &reference::TABLE_GRID,
        Some(("wavelet-galerkin", &reference::WAVELET_GALERKIN_COLUMN)),
    )
    .unwrap();

    println!("\n{:>8} {:>14} {:>14} {:>12}", "s", "nd-ham", "reference", "abs err");
    let errors = table.abs_errors(0).unwrap();
    for (i, &s) in table.grid.iter().enumerate() {
        println!(
            "{s:>8.4} {:>14.9} {:>14.4} {:>12.3e}",
            table.columns[0].1[i],
            table.reference.as_ref().unwrap().1[i],
            errors[i]
        );
    }

    // the stored decomposition-method series differs only in the top term
    let adm = reference::adm_fifth_series();
    println!("\nstored ADM series:  {adm}");
    println!("difference:         {}", sol.full_sum().sub(&adm));
}

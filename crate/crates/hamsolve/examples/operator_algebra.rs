//! Tour of the exact function algebra: exp-polynomials, derivatives and
//! repeated integrals.
//!
//! Run with: `cargo run --example operator_algebra`

use hamsolve::algebra::{rat, rat_int, ExpPoly};
use hamsolve::calculus::{
    antiderivative, differentiate, repeated_integral, IntegralOriginA,
};

fn main() {
    let origin = IntegralOriginA::origin_zero();

    // f(t) = e^t - 1 - t - t^3/36, assembled term by term
    let f = ExpPoly::exp(1)
        .sub(&ExpPoly::constant(rat_int(1)))
        .sub(&ExpPoly::var())
        .sub(&ExpPoly::term(rat(1, 36), 3, 0));
    println!("f      = {f}");
    println!("f'     = {}", differentiate(&f, 1));
    println!("f''    = {}", differentiate(&f, 2));

    // coefficients stay exact rationals: squaring keeps fractions like 1/1296
    let square = f.mul(&f);
    println!("f^2    = {square}");

    // antidifferentiation is closed: integral of t*e^t from 0 is (t-1)e^t + 1
    let by_parts = antiderivative(&ExpPoly::term(rat_int(1), 1, 1), &origin).unwrap();
    println!("int t e^t dt           = {by_parts}");

    // the two-fold integral via the single-integral formula...
    let j2 = repeated_integral(&ExpPoly::exp(1), 2, &origin).unwrap();
    println!("J^2[e^t] (formula)     = {j2}");

    // ...agrees exactly with antidifferentiating twice
    let twice = antiderivative(&antiderivative(&ExpPoly::exp(1), &origin).unwrap(), &origin).unwrap();
    println!("J^2[e^t] (iterated)    = {twice}");
    assert_eq!(j2, twice);

    // evaluation: exact rationals for polynomials, floats otherwise
    let poly = ExpPoly::term(rat(1, 12), 4, 0);
    println!(
        "t^4/12 at t=1: exact {} / float {}",
        poly.eval_rational(&rat_int(1)).unwrap(),
        poly.eval_float(1.0)
    );
    println!("f at t=1 (float only): {}", f.eval_float(1.0));
}

//! # hamsolve
//!
//! Exact series solver for nonlinear Volterra-Fredholm integro-differential
//! equations with initial conditions,
//!
//! ```text
//! u^(p)(t) + sum_j a_j(t) u^(j)(t) = f(t) + lambda1 * int_a^t K1(t,s) F1(u(s)) ds
//!                                         + lambda2 * int_a^b K2(t,s) F2(u(s)) ds,
//! u^(k)(a) = alpha_k,
//! ```
//!
//! implementing five homotopy-analysis iteration schemes (HAM, MHAM, mHAM,
//! q-HAM, ND-HAM). All arithmetic is exact: iterates live in a ring of
//! exp-polynomials `sum c * t^k * e^(r*t)` with unbounded-precision rational
//! coefficients, so closed-form correction terms like `s^3/2160` come out as
//! exact fractions. Floats appear only at the evaluation/reporting boundary.
//!
//! ## Example
//!
//! ```
//! use hamsolve::algebra::{rat_int, ExpPoly, Rational};
//! use hamsolve::homotopy::{run, MethodConfig, Variant};
//! use hamsolve::problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};
//! use num_traits::Zero;
//!
//! // u'(s) = -1 + int_0^s u^2(t) dt, u(0) = 0
//! let problem = VFIDEProblem {
//!     p: 1,
//!     a_coeffs: vec![],
//!     split: vec![ExpPoly::constant(rat_int(-1)), ExpPoly::zero()],
//!     lambda1: rat_int(1),
//!     lambda2: Rational::zero(),
//!     kernel1: SeparableKernel::one(),
//!     kernel2: SeparableKernel::zero(),
//!     f1: PowerNonlinearity::power(2),
//!     f2: PowerNonlinearity::identity(),
//!     domain: (rat_int(0), rat_int(1)),
//!     alphas: vec![rat_int(0)],
//! };
//! let config = MethodConfig::new(Variant::NdHam, rat_int(-1), 5);
//! let solution = run(&problem, &config).unwrap();
//! assert_eq!(
//!     solution.full_sum().pretty_print(),
//!     "-t + (1/12)*t^4 - (1/252)*t^7 + (1/6048)*t^10 - (1/157248)*t^13 + (37/158505984)*t^16",
//! );
//! ```
//!
//! The `examples/` directory walks through each capability; the `hamsolve`
//! binary drives batch runs from a configuration file (see [`cli`]).

pub mod algebra;
pub mod calculus;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod homotopy;
pub mod problem;
pub mod reference;

pub use algebra::{ExpConstant, ExpPoly, Rational};
pub use error::SolverError;
pub use homotopy::{run, MethodConfig, SeriesSolution, Variant};
pub use problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};

//! Exact differential and repeated-integral operators on exp-polynomials.
//!
//! `J^n_a` (the n-fold integral from `a`) is computed by the one-dimensional
//! Cauchy formula `(1/(n-1)!) * int_a^s (s-x)^(n-1) f(x) dx`; n-fold
//! antidifferentiation is kept alongside as an independent cross-check.

use num_traits::{One, Zero};

use crate::algebra::{pow_rational, ExpPoly, Rational};
use crate::error::SolverError;

/// Lower limit of every `J`-operator and the point where initial conditions
/// are imposed. Wraps the problem's left endpoint `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralOriginA(pub Rational);

impl IntegralOriginA {
    pub fn origin_zero() -> Self {
        IntegralOriginA(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// Exact j-th derivative.
///
/// One differentiation maps `t^k e^(rt)` to `k t^(k-1) e^(rt) + r t^k e^(rt)`,
/// which realizes the Leibniz expansion for the monomial-exponential product.
pub fn differentiate(p: &ExpPoly, j: u32) -> ExpPoly {
    let mut out = p.clone();
    for _ in 0..j {
        out = ExpPoly::from_terms(out.terms().flat_map(|(c, power, rate)| {
            let mut parts = Vec::with_capacity(2);
            if power > 0 {
                parts.push((c.clone() * Rational::from_integer(power.into()), power - 1, rate));
            }
            if rate != 0 {
                parts.push((c.clone() * Rational::from_integer(rate.into()), power, rate));
            }
            parts
        }));
    }
    out
}

/// Antiderivative of a single term `t^k e^(rt)` with no constant adjustment.
///
/// For r = 0 this is `t^(k+1)/(k+1)`; for r != 0 the closed-form descending
/// recursion on k: `int t^k e^(rt) = t^k e^(rt)/r - (k/r) int t^(k-1) e^(rt)`.
fn raw_antiderivative_term(coeff: &Rational, power: u32, rate: i64) -> ExpPoly {
    if rate == 0 {
        let new_coeff = coeff.clone() / Rational::from_integer((power + 1).into());
        return ExpPoly::term(new_coeff, power + 1, 0);
    }
    let r = Rational::from_integer(rate.into());
    let mut out = ExpPoly::zero();
    let mut factor = coeff.clone() / r.clone();
    let mut k = power;
    loop {
        out = out.add(&ExpPoly::term(factor.clone(), k, rate));
        if k == 0 {
            break;
        }
        factor = -factor * Rational::from_integer(k.into()) / r.clone();
        k -= 1;
    }
    out
}

/// Antiderivative with no constant adjustment; the Fredholm path evaluates
/// this at both endpoints instead of anchoring at the origin.
pub(crate) fn raw_antiderivative(p: &ExpPoly) -> ExpPoly {
    let mut out = ExpPoly::zero();
    for (c, power, rate) in p.terms() {
        out = out.add(&raw_antiderivative_term(c, power, rate));
    }
    out
}

/// Returns `F` with `F' = p` and `F(a) = 0`.
///
/// The adjusting constant `-F(a)` must be rational: that always holds at
/// `a = 0`, and for `a != 0` only when `p` is a plain polynomial; otherwise
/// the constant needs `e^(r*a)` and a `NonClosedConstant` is raised.
pub fn antiderivative(p: &ExpPoly, origin: &IntegralOriginA) -> Result<ExpPoly, SolverError> {
    let raw = raw_antiderivative(p);
    let at_origin = raw.eval_exact(origin.value());
    match at_origin.as_rational() {
        Some(value) => Ok(raw.sub(&ExpPoly::constant(value))),
        None => Err(SolverError::NonClosedConstant { constant: at_origin }),
    }
}

/// `J^n_a(p)` by the Cauchy single-integral formula: binomial expansion of
/// `(s-x)^(n-1)` followed by term-wise antidifferentiation.
pub fn repeated_integral(
    p: &ExpPoly,
    n: u32,
    origin: &IntegralOriginA,
) -> Result<ExpPoly, SolverError> {
    assert!(n >= 1, "repeated integral order must be at least 1");
    let mut out = ExpPoly::zero();
    let mut binom = Rational::one(); // C(n-1, j) running value
    for j in 0..n {
        // coefficient of s^(n-1-j) * int_a^s x^j p(x) dx, with sign (-1)^j
        let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
        let x_power = ExpPoly::term(Rational::one(), j, 0);
        let inner = antiderivative(&x_power.mul(p), origin)?;
        let outer = ExpPoly::term(sign * binom.clone(), n - 1 - j, 0);
        out = out.add(&outer.mul(&inner));
        binom = binom * Rational::from_integer((n - 1 - j).into())
            / Rational::from_integer((j + 1).into());
    }
    Ok(out.scale(&factorial(n - 1).recip()))
}

/// `J^n_a[D^n_a f] = f - sum_{k<n} f^(k)(a)/k! (t-a)^k` given the initial data
/// `f(a), f'(a), ..., f^(n-1)(a)`.
///
/// The subtraction happens directly from the supplied values, so the solver
/// can resolve a deformation step without re-deriving the previous iterate.
pub fn j_of_d(
    p: &ExpPoly,
    n: u32,
    initial_values: &[Rational],
    origin: &IntegralOriginA,
) -> Result<ExpPoly, SolverError> {
    if initial_values.len() != n as usize {
        return Err(SolverError::ArityMismatch {
            expected: n as usize,
            got: initial_values.len(),
        });
    }
    let mut out = p.clone();
    for (k, value) in initial_values.iter().enumerate() {
        let coeff = value.clone() / factorial(k as u32);
        out = out.sub(&shifted_power(origin.value(), k as u32).scale(&coeff));
    }
    Ok(out)
}

/// `(t-a)^k` expanded into the monomial basis.
pub fn shifted_power(a: &Rational, k: u32) -> ExpPoly {
    let mut binom = Rational::one();
    let mut terms = Vec::with_capacity(k as usize + 1);
    for j in 0..=k {
        // C(k,j) * (-a)^(k-j) * t^j
        let shift = pow_rational(&(-a.clone()), k - j);
        terms.push((binom.clone() * shift, j, 0));
        binom = binom * Rational::from_integer((k - j).into())
            / Rational::from_integer((j + 1).into());
    }
    ExpPoly::from_terms(terms)
}

/// The initial data `p(a), p'(a), ..., p^(n-1)(a)` of an exp-polynomial,
/// exact; fails with `NonClosedConstant` when a value is not rational.
pub fn taylor_data(
    p: &ExpPoly,
    n: u32,
    origin: &IntegralOriginA,
) -> Result<Vec<Rational>, SolverError> {
    let mut values = Vec::with_capacity(n as usize);
    let mut current = p.clone();
    for _ in 0..n {
        let v = current.eval_exact(origin.value());
        match v.as_rational() {
            Some(q) => values.push(q),
            None => return Err(SolverError::NonClosedConstant { constant: v }),
        }
        current = differentiate(&current, 1);
    }
    Ok(values)
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 2..=n {
        acc *= Rational::from_integer(i.into());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int, rational_to_f64};
    use proptest::prelude::*;

    fn origin0() -> IntegralOriginA {
        IntegralOriginA::origin_zero()
    }

    /// Composite Simpson quadrature over [0, s]; test-only numeric oracle.
    fn simpson(f: impl Fn(f64) -> f64, s: f64, panels: usize) -> f64 {
        let h = s / panels as f64;
        let mut acc = f(0.0) + f(s);
        for i in 1..panels {
            let x = i as f64 * h;
            acc += if i % 2 == 0 { 2.0 } else { 4.0 } * f(x);
        }
        acc * h / 3.0
    }

    #[test]
    fn second_derivative_of_exponential() {
        let e = ExpPoly::exp(1);
        assert_eq!(differentiate(&e, 2), e);
    }

    #[test]
    fn derivative_annihilates_low_powers() {
        assert_eq!(differentiate(&ExpPoly::constant(rat_int(1)), 1), ExpPoly::zero());
        // D^n (t-a)^k = 0 for k < n
        assert_eq!(differentiate(&shifted_power(&rat(1, 2), 2), 3), ExpPoly::zero());
    }

    #[test]
    fn derivative_of_negated_linear() {
        let neg_t = ExpPoly::term(rat_int(-1), 1, 0);
        assert_eq!(differentiate(&neg_t, 1), ExpPoly::constant(rat_int(-1)));
    }

    #[test]
    fn antiderivative_monomial_rule() {
        let t = ExpPoly::var();
        let result = antiderivative(&t, &origin0()).unwrap();
        assert_eq!(result, ExpPoly::term(rat(1, 2), 2, 0));
    }

    #[test]
    fn antiderivative_by_parts() {
        // int_0^s x e^x dx = (s-1)e^s + 1
        let t_exp = ExpPoly::term(rat_int(1), 1, 1);
        let result = antiderivative(&t_exp, &origin0()).unwrap();
        let expected = ExpPoly::from_terms([
            (rat_int(1), 1, 1),
            (rat_int(-1), 0, 1),
            (rat_int(1), 0, 0),
        ]);
        assert_eq!(result, expected);
    }

    #[test]
    fn antiderivative_of_square_checked_by_quadrature() {
        // int_0^s x^2 dx = s^3/3, cross-checked against Simpson quadrature
        let integrand = ExpPoly::term(rat_int(-1), 1, 0).pow(2);
        let result = antiderivative(&integrand, &origin0()).unwrap();
        assert_eq!(result, ExpPoly::term(rat(1, 3), 3, 0));
        for i in 1..=20 {
            let s = i as f64 / 20.0;
            let numeric = simpson(|x| integrand.eval_float(x), s, 256);
            assert!((result.eval_float(s) - numeric).abs() < 1e-10);
        }
    }

    #[test]
    fn antiderivative_nonzero_origin_polynomial() {
        // F(t) = int_{1/2}^t x dx = t^2/2 - 1/8
        let origin = IntegralOriginA(rat(1, 2));
        let result = antiderivative(&ExpPoly::var(), &origin).unwrap();
        assert_eq!(
            result,
            ExpPoly::from_terms([(rat(1, 2), 2, 0), (rat(-1, 8), 0, 0)])
        );
        assert!(result.eval_rational(&rat(1, 2)).unwrap().is_zero());
    }

    #[test]
    fn antiderivative_nonzero_origin_exponential_fails() {
        let origin = IntegralOriginA(rat_int(1));
        let err = antiderivative(&ExpPoly::exp(1), &origin).unwrap_err();
        assert!(matches!(err, SolverError::NonClosedConstant { .. }));
    }

    #[test]
    fn repeated_integral_monomial_law() {
        // J^2[t] = t^3/6
        let result = repeated_integral(&ExpPoly::var(), 2, &origin0()).unwrap();
        assert_eq!(result, ExpPoly::term(rat(1, 6), 3, 0));
    }

    #[test]
    fn repeated_integral_mixed_terms() {
        // J^2[e^x - x/6] = e^s - 1 - s - s^3/36
        let p = ExpPoly::exp(1).sub(&ExpPoly::term(rat(1, 6), 1, 0));
        let result = repeated_integral(&p, 2, &origin0()).unwrap();
        let expected = ExpPoly::from_terms([
            (rat_int(1), 0, 1),
            (rat_int(-1), 0, 0),
            (rat_int(-1), 1, 0),
            (rat(-1, 36), 3, 0),
        ]);
        assert_eq!(result, expected);
    }

    #[test]
    fn single_integral_scaled() {
        // hbar * J^1[-s^3/3] at hbar = -1 is s^4/12
        let p = ExpPoly::term(rat(-1, 3), 3, 0);
        let result = repeated_integral(&p, 1, &origin0()).unwrap().scale(&rat_int(-1));
        assert_eq!(result, ExpPoly::term(rat(1, 12), 4, 0));
    }

    #[test]
    fn j_of_d_subtracts_taylor_data() {
        // e^s with data (1, 1) at 0 becomes e^s - 1 - s
        let result = j_of_d(&ExpPoly::exp(1), 2, &[rat_int(1), rat_int(1)], &origin0()).unwrap();
        let expected = ExpPoly::from_terms([
            (rat_int(1), 0, 1),
            (rat_int(-1), 0, 0),
            (rat_int(-1), 1, 0),
        ]);
        assert_eq!(result, expected);
    }

    #[test]
    fn j_of_d_constant_annihilated() {
        let c = ExpPoly::constant(rat(5, 3));
        let result = j_of_d(&c, 1, &[rat(5, 3)], &origin0()).unwrap();
        assert!(result.is_zero());
    }

    #[test]
    fn j_of_d_zero_data_is_identity() {
        let p = ExpPoly::term(rat(1, 12), 4, 0);
        let result = j_of_d(&p, 1, &[rat_int(0)], &origin0()).unwrap();
        assert_eq!(result, p);
    }

    #[test]
    fn j_of_d_arity_checked() {
        let err = j_of_d(&ExpPoly::var(), 2, &[rat_int(0)], &origin0()).unwrap_err();
        assert_eq!(err, SolverError::ArityMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn taylor_data_of_exponential() {
        let data = taylor_data(&ExpPoly::exp(1), 3, &origin0()).unwrap();
        assert_eq!(data, vec![rat_int(1), rat_int(1), rat_int(1)]);
    }

    #[test]
    fn monomial_law_shifted_origin() {
        // J^m (t-a)^k = k!/(m+k)! (t-a)^(m+k) for k, m <= 5
        for &(a_num, a_den) in &[(0i64, 1i64), (1, 2), (-2, 3)] {
            let a = rat(a_num, a_den);
            let origin = IntegralOriginA(a.clone());
            for k in 0u32..=5 {
                for m in 1u32..=5 {
                    let lhs = repeated_integral(&shifted_power(&a, k), m, &origin).unwrap();
                    let rhs = shifted_power(&a, m + k)
                        .scale(&(factorial(k) / factorial(m + k)));
                    assert_eq!(lhs, rhs, "k={k} m={m} a={a}");
                }
            }
        }
    }

    prop_compose! {
        fn arb_rational()(num in -10i64..=10, den in 1i64..=10) -> Rational {
            rat(num, den)
        }
    }

    prop_compose! {
        fn arb_exp_poly()(terms in prop::collection::vec(
            (arb_rational(), 0u32..=4, -1i64..=2), 0..=5)) -> ExpPoly {
            ExpPoly::from_terms(terms)
        }
    }

    proptest! {
        #[test]
        fn derivative_inverts_repeated_integral(p in arb_exp_poly(), n in 1u32..=3) {
            let integral = repeated_integral(&p, n, &origin0()).unwrap();
            prop_assert_eq!(differentiate(&integral, n), p);
        }

        #[test]
        fn cauchy_formula_matches_iterated_antiderivative(p in arb_exp_poly(), n in 1u32..=3) {
            let via_cauchy = repeated_integral(&p, n, &origin0()).unwrap();
            let mut via_iteration = p.clone();
            for _ in 0..n {
                via_iteration = antiderivative(&via_iteration, &origin0()).unwrap();
            }
            prop_assert_eq!(via_cauchy, via_iteration);
        }

        #[test]
        fn integral_semigroup(p in arb_exp_poly(), n in 1u32..=3, m in 1u32..=3) {
            let nested = repeated_integral(
                &repeated_integral(&p, m, &origin0()).unwrap(), n, &origin0()).unwrap();
            let flat = repeated_integral(&p, n + m, &origin0()).unwrap();
            prop_assert_eq!(nested, flat);
        }

        #[test]
        fn antiderivative_vanishes_at_origin(p in arb_exp_poly()) {
            let f = antiderivative(&p, &origin0()).unwrap();
            if f.is_polynomial() {
                prop_assert!(f.eval_rational(&rat_int(0)).unwrap().is_zero());
            } else {
                prop_assert!(f.eval_float(0.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn antiderivative_matches_quadrature(p in arb_exp_poly(), idx in 1usize..=10) {
            let f = antiderivative(&p, &origin0()).unwrap();
            let s = idx as f64 / 10.0;
            let numeric = simpson(|x| p.eval_float(x), s, 512);
            let scale = numeric.abs().max(1.0);
            prop_assert!((f.eval_float(s) - numeric).abs() <= 1e-8 * scale);
        }

        #[test]
        fn taylor_data_matches_eval(p in arb_exp_poly(), k in 0u32..=3) {
            let data = taylor_data(&p, 4, &origin0()).unwrap();
            let direct = differentiate(&p, k).eval_exact(&rat_int(0)).as_rational().unwrap();
            prop_assert_eq!(rational_to_f64(&data[k as usize]), rational_to_f64(&direct));
        }
    }
}

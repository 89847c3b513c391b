//! Data model for integro-differential problem instances of order `p`:
//!
//! `u^(p)(t) + sum_j a_j(t) u^(j)(t) = f(t) + lambda1 * int_a^t K1(t,s) F1(u(s)) ds
//!                                          + lambda2 * int_a^b K2(t,s) F2(u(s)) ds`
//!
//! with initial conditions `u^(k)(a) = alpha_k`, plus the operator building
//! blocks: the nonlinear operator `N`, its homotopy power coefficients, the
//! Volterra/Fredholm kernel applications and the initial guess.

use num_traits::{One, Zero};

use crate::algebra::{ExpPoly, Rational};
use crate::calculus::{
    antiderivative, differentiate, factorial, raw_antiderivative, repeated_integral,
    shifted_power, IntegralOriginA,
};
use crate::error::SolverError;

/// Separable kernel `K(t,s) = sum_i g_i(t) * h_i(s)`; the zero kernel is the
/// empty part list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeparableKernel {
    pub parts: Vec<(ExpPoly, ExpPoly)>,
}

impl SeparableKernel {
    pub fn zero() -> Self {
        SeparableKernel { parts: Vec::new() }
    }

    /// Kernel with a single separable part `g(t) * h(s)`.
    pub fn product(g: ExpPoly, h: ExpPoly) -> Self {
        SeparableKernel { parts: vec![(g, h)] }
    }

    /// The constant kernel `K = 1`.
    pub fn one() -> Self {
        Self::product(
            ExpPoly::constant(Rational::one()),
            ExpPoly::constant(Rational::one()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Polynomial nonlinearity `F(u) = sum coeff * u^degree` with strictly
/// increasing degrees and nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerNonlinearity {
    monomials: Vec<(Rational, u32)>,
}

impl PowerNonlinearity {
    /// Canonicalizes arbitrary `(coeff, degree)` pairs: merges duplicate
    /// degrees, drops zero coefficients, sorts by degree.
    pub fn new<I: IntoIterator<Item = (Rational, u32)>>(monomials: I) -> Self {
        let mut acc: std::collections::BTreeMap<u32, Rational> = Default::default();
        for (coeff, degree) in monomials {
            let slot = acc.entry(degree).or_insert_with(Rational::zero);
            *slot += coeff;
        }
        PowerNonlinearity {
            monomials: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(d, c)| (c, d))
                .collect(),
        }
    }

    /// The identity `F(u) = u`.
    pub fn identity() -> Self {
        Self::new([(Rational::one(), 1)])
    }

    /// The pure power `F(u) = u^degree`.
    pub fn power(degree: u32) -> Self {
        Self::new([(Rational::one(), degree)])
    }

    pub fn monomials(&self) -> &[(Rational, u32)] {
        &self.monomials
    }
}

/// A full problem instance: order, damping coefficients, split right-hand
/// side, kernels, nonlinearities, domain and initial data.
///
/// The split `x_0 ... x_n` is authoritative for the source term: `f` is its
/// sum. Methods that do not use a split simply consume `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct VFIDEProblem {
    /// Derivative order `p >= 1`.
    pub p: u32,
    /// Coefficients `a_1 ... a_{p-1}` of the lower-order derivative terms.
    pub a_coeffs: Vec<ExpPoly>,
    /// Source split `x_0 ... x_n`; the sum is `f`.
    pub split: Vec<ExpPoly>,
    pub lambda1: Rational,
    pub lambda2: Rational,
    /// Volterra kernel `K1` (integral from `a` to `t`).
    pub kernel1: SeparableKernel,
    /// Fredholm kernel `K2` (integral over the whole domain).
    pub kernel2: SeparableKernel,
    pub f1: PowerNonlinearity,
    pub f2: PowerNonlinearity,
    /// Domain `[a, b]`.
    pub domain: (Rational, Rational),
    /// Initial data `alpha_0 ... alpha_{p-1}`.
    pub alphas: Vec<Rational>,
}

impl VFIDEProblem {
    /// Validates the structural invariants; call after manual construction.
    pub fn validate(&self) -> Result<(), String> {
        if self.p < 1 {
            return Err("derivative order p must be at least 1".into());
        }
        if self.alphas.len() != self.p as usize {
            return Err(format!(
                "expected {} initial values, got {}",
                self.p,
                self.alphas.len()
            ));
        }
        if self.a_coeffs.len() != (self.p - 1) as usize {
            return Err(format!(
                "expected {} lower-order coefficients, got {}",
                self.p - 1,
                self.a_coeffs.len()
            ));
        }
        if self.domain.0 >= self.domain.1 {
            return Err("domain must satisfy a < b".into());
        }
        if self.split.is_empty() {
            return Err("source split must be non-empty".into());
        }
        Ok(())
    }

    /// The full source `f = sum_k x_k`.
    pub fn source(&self) -> ExpPoly {
        self.split
            .iter()
            .fold(ExpPoly::zero(), |acc, x| acc.add(x))
    }

    pub fn origin(&self) -> IntegralOriginA {
        IntegralOriginA(self.domain.0.clone())
    }
}

/// Default initial guess: `sum_k alpha_k/k! (t-a)^k + J^p_a(x_0)`.
///
/// When `x_0 = 0` this is the pure Taylor polynomial of the initial data.
pub fn initial_guess(prob: &VFIDEProblem) -> Result<ExpPoly, SolverError> {
    let origin = prob.origin();
    let mut guess = taylor_polynomial(&prob.alphas, origin.value());
    if !prob.split[0].is_zero() {
        guess = guess.add(&repeated_integral(&prob.split[0], prob.p, &origin)?);
    }
    Ok(guess)
}

/// `sum_k alpha_k/k! (t-a)^k`.
pub fn taylor_polynomial(alphas: &[Rational], a: &Rational) -> ExpPoly {
    let mut out = ExpPoly::zero();
    for (k, alpha) in alphas.iter().enumerate() {
        let coeff = alpha.clone() / factorial(k as u32);
        out = out.add(&shifted_power(a, k as u32).scale(&coeff));
    }
    out
}

/// Volterra application: `sum_i g_i(t) * int_a^t h_i(s) * integrand(s) ds`,
/// exact.
pub fn apply_volterra(
    kernel: &SeparableKernel,
    integrand: &ExpPoly,
    origin: &IntegralOriginA,
) -> Result<ExpPoly, SolverError> {
    let mut out = ExpPoly::zero();
    for (g, h) in &kernel.parts {
        let inner = antiderivative(&h.mul(integrand), origin)?;
        out = out.add(&g.mul(&inner));
    }
    Ok(out)
}

/// Fredholm application: `sum_i g_i(t) * C_i` with
/// `C_i = int_a^b h_i(s) * integrand(s) ds`.
///
/// Each `C_i` is computed in the exact constant ring `sum q * e^c`; if a
/// transcendental component survives, the operation fails with
/// `NonClosedConstant` carrying the symbolic constant, never a float.
pub fn apply_fredholm(
    kernel: &SeparableKernel,
    integrand: &ExpPoly,
    domain: &(Rational, Rational),
) -> Result<ExpPoly, SolverError> {
    let mut out = ExpPoly::zero();
    for (g, h) in &kernel.parts {
        // raw antiderivative evaluated at both endpoints keeps the constant
        // exact for any rational a, b
        let raw = raw_antiderivative(&h.mul(integrand));
        let value = raw.eval_exact(&domain.1).sub(&raw.eval_exact(&domain.0));
        match value.as_rational() {
            Some(constant) => out = out.add(&g.scale(&constant)),
            None => return Err(SolverError::NonClosedConstant { constant: value }),
        }
    }
    Ok(out)
}

/// Coefficient of `q^m` in `F(sum_i u_i q^i)`.
///
/// For a monomial `c * u^d` this is `c` times the degree-`d` truncated Cauchy
/// product of the iterate sequence; degree 1 reduces to `u_m` and degree 0 to
/// the constant at `m = 0`.
pub fn apply_nonlinearity_coeff(
    f: &PowerNonlinearity,
    iterates: &[ExpPoly],
    m: usize,
) -> ExpPoly {
    assert!(
        iterates.len() > m,
        "need at least {} iterates for coefficient {m}",
        m + 1
    );
    let mut out = ExpPoly::zero();
    for (coeff, degree) in f.monomials() {
        let contribution = match degree {
            0 => {
                if m == 0 {
                    ExpPoly::constant(Rational::one())
                } else {
                    ExpPoly::zero()
                }
            }
            1 => iterates[m].clone(),
            d => power_series_coefficient(iterates, *d, m),
        };
        out = out.add(&contribution.scale(coeff));
    }
    out
}

// coefficient of q^m in (sum u_i q^i)^degree via repeated truncated Cauchy
// products, keeping only the first m+1 coefficients at every stage
fn power_series_coefficient(iterates: &[ExpPoly], degree: u32, m: usize) -> ExpPoly {
    let base: Vec<ExpPoly> = iterates[..=m].to_vec();
    let mut power = base.clone();
    for _ in 1..degree {
        let mut next = vec![ExpPoly::zero(); m + 1];
        for (i, pi) in power.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, bj) in base.iter().enumerate() {
                if i + j > m {
                    break;
                }
                next[i + j] = next[i + j].add(&pi.mul(bj));
            }
        }
        power = next;
    }
    power[m].clone()
}

/// Coefficient of `q^m` in `N[phi(t;q)]` where `N` is the problem's nonlinear
/// operator:
///
/// `D^p u_m + sum_j a_j D^j u_m - lambda1 * Volterra(K1, F1-coeff)
///                              - lambda2 * Fredholm(K2, F2-coeff)`.
pub fn apply_n_coeff(
    prob: &VFIDEProblem,
    iterates: &[ExpPoly],
    m: usize,
) -> Result<ExpPoly, SolverError> {
    assert!(
        iterates.len() > m,
        "need at least {} iterates for coefficient {m}",
        m + 1
    );
    let origin = prob.origin();
    let u_m = &iterates[m];
    let mut out = differentiate(u_m, prob.p);
    for (j, a_j) in prob.a_coeffs.iter().enumerate() {
        if a_j.is_zero() {
            continue;
        }
        out = out.add(&a_j.mul(&differentiate(u_m, (j + 1) as u32)));
    }
    if !prob.lambda1.is_zero() && !prob.kernel1.is_zero() {
        let inner = apply_nonlinearity_coeff(&prob.f1, iterates, m);
        let volterra = apply_volterra(&prob.kernel1, &inner, &origin)?;
        out = out.sub(&volterra.scale(&prob.lambda1));
    }
    if !prob.lambda2.is_zero() && !prob.kernel2.is_zero() {
        let inner = apply_nonlinearity_coeff(&prob.f2, iterates, m);
        let fredholm = apply_fredholm(&prob.kernel2, &inner, &prob.domain)?;
        out = out.sub(&fredholm.scale(&prob.lambda2));
    }
    Ok(out)
}

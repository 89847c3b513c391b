//! Exact symbolic kernel: exp-polynomials with unbounded-precision rational
//! coefficients.
//!
//! An [`ExpPoly`] is a finite sum of terms `c * t^k * e^(r*t)` with rational
//! `c`, nonnegative integer power `k` and integer rate `r`. This class is
//! closed under addition, multiplication, differentiation and (from origin 0)
//! antidifferentiation, which makes it the universe all solver iterates,
//! right-hand sides, kernels and coefficients live in.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for every coefficient in the crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Shorthand for an integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Signals that an exact rational evaluation was requested on a function
/// containing a nonzero exponential rate; the caller must use [`ExpPoly::eval_float`]
/// or [`ExpPoly::eval_exact`] instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("function contains an exponential term and cannot be evaluated as an exact rational")]
pub struct NotExactlyEvaluable;

/// Term key: exponential rate first, then monomial power.
///
/// Keys are unique per term; a coefficient of zero is never stored, so two
/// values represent the same function iff their maps are equal.
type TermKey = (i64, u32);

/// Finite sum of `c * t^k * e^(r*t)` terms in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: BTreeMap<TermKey, Rational>,
}

impl ExpPoly {
    /// The zero function (empty term map).
    pub fn zero() -> Self {
        ExpPoly { terms: BTreeMap::new() }
    }

    /// A constant function.
    pub fn constant(c: Rational) -> Self {
        Self::term(c, 0, 0)
    }

    /// The identity `t`.
    pub fn var() -> Self {
        Self::term(Rational::one(), 1, 0)
    }

    /// The exponential `e^(rate*t)`.
    pub fn exp(rate: i64) -> Self {
        Self::term(Rational::one(), 0, rate)
    }

    /// A single term `coeff * t^power * e^(rate*t)`.
    pub fn term(coeff: Rational, power: u32, rate: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((rate, power), coeff);
        }
        ExpPoly { terms }
    }

    /// Collects `(coeff, power, rate)` triples into canonical form; duplicate
    /// keys accumulate and zero coefficients drop out.
    pub fn from_terms<I: IntoIterator<Item = (Rational, u32, i64)>>(iter: I) -> Self {
        let mut p = ExpPoly::zero();
        for (coeff, power, rate) in iter {
            p.accumulate((rate, power), coeff);
        }
        p
    }

    fn accumulate(&mut self, key: TermKey, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms as `(coeff, power, rate)` in key order (rate, power).
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32, i64)> {
        self.terms.iter().map(|(&(rate, power), c)| (c, power, rate))
    }

    /// True when every term has rate 0 (a plain polynomial in `t`).
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|&(rate, _)| rate == 0)
    }

    /// Pointwise functional sum in canonical form.
    pub fn add(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&key, c) in &rhs.terms {
            out.accumulate(key, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&key, c) in &rhs.terms {
            out.accumulate(key, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }

    /// Multiplies every coefficient by a rational scalar.
    pub fn scale(&self, factor: &Rational) -> ExpPoly {
        if factor.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, c.clone() * factor))
                .collect(),
        }
    }

    /// Functional product: `(k1,r1)` and `(k2,r2)` term pairs combine to
    /// `(k1+k2, r1+r2)`.
    pub fn mul(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (&(r1, k1), c1) in &self.terms {
            for (&(r2, k2), c2) in &rhs.terms {
                out.accumulate((r1 + r2, k1 + k2), c1.clone() * c2.clone());
            }
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exp: u32) -> ExpPoly {
        let mut out = ExpPoly::constant(Rational::one());
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Exact value at rational `t`, defined only for plain polynomials.
    pub fn eval_rational(&self, t: &Rational) -> Result<Rational, NotExactlyEvaluable> {
        if !self.is_polynomial() {
            return Err(NotExactlyEvaluable);
        }
        let mut acc = Rational::zero();
        for (&(_, power), c) in &self.terms {
            acc += c.clone() * pow_rational(t, power);
        }
        Ok(acc)
    }

    /// Exact value at rational `t` in the constant ring extension
    /// `sum q_i * e^(c_i)`, defined for every exp-polynomial.
    pub fn eval_exact(&self, t: &Rational) -> ExpConstant {
        let mut acc = ExpConstant::zero();
        for (&(rate, power), c) in &self.terms {
            let exponent = Rational::from_integer(rate.into()) * t;
            acc.accumulate(exponent, c.clone() * pow_rational(t, power));
        }
        acc
    }

    /// Floating evaluation; terms are summed in ascending order of |coefficient|
    /// to bound rounding drift.
    pub fn eval_float(&self, t: f64) -> f64 {
        let mut parts: Vec<(&Rational, u32, i64)> = self.terms().collect();
        parts.sort_by_key(|(c, _, _)| c.abs());
        let mut acc = 0.0;
        for (c, power, rate) in parts {
            acc += rational_to_f64(c) * t.powi(power as i32) * (rate as f64 * t).exp();
        }
        acc
    }

    /// Largest |coefficient| as a float estimate; used by the divergence guard.
    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms
            .values()
            .map(|c| rational_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    /// Deterministic human-readable rendering.
    ///
    /// Terms are ordered by rate descending then power ascending, so
    /// exponentials print first, e.g. `e^t - 1 - t - (1/36)*t^3`. Fractional
    /// coefficients render parenthesized as `(num/den)`; unit coefficients
    /// are omitted in front of a nontrivial factor.
    pub fn pretty_print(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts: Vec<(&Rational, u32, i64)> = self.terms().collect();
        parts.sort_by(|a, b| b.2.cmp(&a.2).then(a.1.cmp(&b.1)));

        let mut out = String::new();
        for (i, (coeff, power, rate)) in parts.into_iter().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&render_term(&coeff.abs(), power, rate));
        }
        out
    }
}

fn render_term(abs_coeff: &Rational, power: u32, rate: i64) -> String {
    let mut factors: Vec<String> = Vec::new();
    if power == 1 {
        factors.push("t".to_string());
    } else if power > 1 {
        factors.push(format!("t^{power}"));
    }
    match rate {
        0 => {}
        1 => factors.push("e^t".to_string()),
        -1 => factors.push("e^(-t)".to_string()),
        r => factors.push(format!("e^({r}t)")),
    }
    let coeff_str = if abs_coeff.is_integer() {
        abs_coeff.to_string()
    } else {
        format!("({abs_coeff})")
    };
    if factors.is_empty() {
        coeff_str
    } else if abs_coeff.is_one() {
        factors.join("*")
    } else {
        format!("{coeff_str}*{}", factors.join("*"))
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty_print())
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::add(self, rhs)
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::sub(self, rhs)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::mul(self, rhs)
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        ExpPoly::neg(self)
    }
}

/// Exact constant of the form `sum q_i * e^(c_i)` with rational `q_i`, `c_i`.
///
/// Definite integrals of exponential terms over rational endpoints produce
/// values of this shape; the solver keeps them symbolic and only folds the
/// result back into an [`ExpPoly`] when every transcendental component
/// cancels exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpConstant {
    // exponent -> coefficient; canonical: no zero coefficients stored
    terms: BTreeMap<Rational, Rational>,
}

impl ExpConstant {
    pub fn zero() -> Self {
        ExpConstant { terms: BTreeMap::new() }
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut c = ExpConstant::zero();
        c.accumulate(Rational::zero(), q);
        c
    }

    fn accumulate(&mut self, exponent: Rational, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponent) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &ExpConstant) -> ExpConstant {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &ExpConstant) -> ExpConstant {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.accumulate(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> ExpConstant {
        if factor.is_zero() {
            return ExpConstant::zero();
        }
        ExpConstant {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone() * factor))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exact rational value, if no transcendental component survives.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * rational_to_f64(e).exp())
            .sum()
    }
}

impl fmt::Display for ExpConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*e^({e})")?;
            }
        }
        Ok(())
    }
}

/// `t^power` for rational `t`, exact.
pub fn pow_rational(t: &Rational, power: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..power {
        acc *= t;
    }
    acc
}

/// Rational to f64 with bignum-safe fallback for operands outside f64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let num_bits = r.numer().bits() as i64;
        let den_bits = r.denom().bits() as i64;
        if num_bits - den_bits > 1100 {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            0.0
        }
    })
}

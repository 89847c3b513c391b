//! The five homotopy-analysis iteration schemes.
//!
//! Every scheme produces iterates `u_0, u_1, ..., u_M` from linear
//! deformation equations `L[u_m - chi_m u_{m-1}] = hbar * R_m` with
//! `L = D^p_a`, solved exactly by the `p`-fold integral from `a`. The
//! schemes differ in how the source term enters the residual `R_m`:
//!
//! * `HAM` - `f` subtracted at the first step only.
//! * `MHAM` - source expansion `phi = x_0 + q x_1 + ... + q^n x_n`
//!   subtracted coefficient-wise inside every residual.
//! * `mHAM` - staged source: `L[u_0] = x_0`, `L[u_1 - u_0] = hbar [R_1 - x_1]`,
//!   then `L[u_m - u_{m-1}] = hbar [R_m - x_m]` while parts remain.
//! * `q-HAM` - embedding on `[0, 1/n]`: `chi_m = n` for `m > 1` and the
//!   series is summed with weights `(1/n)^m`.
//! * `ND-HAM` - split source `g(t;q)`: `x_0` defines the initial guess via
//!   `L[u_0] = x_0`, `x_0 + x_1` is subtracted at the first step and each
//!   later part `x_m` enters `u_m` carrying the factor `hbar^(m-1)`.

use num_traits::{One, Zero};

use crate::algebra::{pow_rational, ExpPoly, Rational};
use crate::calculus::{differentiate, j_of_d, repeated_integral, taylor_data};
use crate::error::SolverError;
use crate::problem::{apply_n_coeff, initial_guess, VFIDEProblem};

/// Default bound on iterate coefficient magnitude before a divergence
/// warning is recorded.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e300;

/// Which iteration scheme to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Standard scheme (source subtracted at the first step only).
    Ham,
    /// Modified scheme subtracting the source expansion `phi(t,q)` inside
    /// every residual (MHAM).
    Mham,
    /// Staged-source modification `L[u_m - u_{m-1}] = hbar [R_m - x_m]`
    /// (mHAM); the first stage couples `u_0`.
    MhamStaged,
    /// Embedding on `[0, 1/n]` with `chi_m = n` and `(1/n)^m` summation
    /// weights (q-HAM).
    Qham,
    /// Split-source scheme with `L[u_0] = x_0` and the expansion `g(t;q)`
    /// (ND-HAM).
    NdHam,
}

impl Variant {
    /// Canonical display name, also accepted by the config parser.
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Ham => "HAM",
            Variant::Mham => "MHAM",
            Variant::MhamStaged => "mHAM",
            Variant::Qham => "QHAM",
            Variant::NdHam => "NDHAM",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Scheme selection plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    /// Column label in tables and CSV output.
    pub label: String,
    pub variant: Variant,
    /// Convergence-control parameter, nonzero.
    pub hbar: Rational,
    /// The `n` of the q-HAM embedding; ignored by the other variants.
    pub n_qham: u32,
    /// Number of iterates beyond `u_0`.
    pub iterations: u32,
    /// Explicit initial guess; when absent, `u_0` comes from the problem's
    /// initial data and leading split part.
    pub initial_guess_override: Option<ExpPoly>,
    /// Coefficient-magnitude bound for the divergence guard.
    pub divergence_bound: f64,
}

impl MethodConfig {
    pub fn new(variant: Variant, hbar: Rational, iterations: u32) -> Self {
        MethodConfig {
            label: variant.name().to_lowercase(),
            variant,
            hbar,
            n_qham: 1,
            iterations,
            initial_guess_override: None,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n_qham = n;
        self
    }

    pub fn with_initial_guess(mut self, guess: ExpPoly) -> Self {
        self.initial_guess_override = Some(guess);
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.hbar.is_zero() {
            return Err("hbar must be nonzero".into());
        }
        if self.n_qham < 1 {
            return Err("n must be at least 1".into());
        }
        if self.iterations < 1 {
            return Err("iterations must be at least 1".into());
        }
        Ok(())
    }
}

/// Recorded when an iterate's largest coefficient magnitude exceeds the
/// configured bound; diagnostic only, the run continues.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceNote {
    /// Index of the first offending iterate.
    pub iterate: usize,
    /// Estimated magnitude of its largest coefficient.
    pub magnitude: f64,
}

/// Ordered iterates with their summation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    /// `u_0 ... u_M`.
    pub iterates: Vec<ExpPoly>,
    /// `w_0 ... w_M`; all ones except q-HAM, where `w_m = (1/n)^m`.
    pub weights: Vec<Rational>,
    pub config: MethodConfig,
    pub problem: VFIDEProblem,
    /// First divergence-guard trigger, if any.
    pub divergence: Option<DivergenceNote>,
}

impl SeriesSolution {
    /// Weighted partial sum `sum_{i<=m} w_i u_i`.
    pub fn partial_sum(&self, m: usize) -> ExpPoly {
        assert!(m < self.iterates.len(), "partial sum order {m} out of range");
        let mut acc = ExpPoly::zero();
        for i in 0..=m {
            acc = acc.add(&self.iterates[i].scale(&self.weights[i]));
        }
        acc
    }

    /// Weighted sum of all computed iterates.
    pub fn full_sum(&self) -> ExpPoly {
        self.partial_sum(self.iterates.len() - 1)
    }
}

/// Weighted partial sum of a solution (free-function form).
pub fn partial_sum(sol: &SeriesSolution, m: usize) -> ExpPoly {
    sol.partial_sum(m)
}

/// The switch constant of the m-th deformation equation: 0 for `m = 1`,
/// then 1, except q-HAM where it is `n`.
pub fn chi(m: u32, variant: Variant, n_qham: u32) -> Rational {
    assert!(m >= 1, "chi is defined for m >= 1");
    if m <= 1 {
        Rational::zero()
    } else if variant == Variant::Qham {
        Rational::from_integer(n_qham.into())
    } else {
        Rational::one()
    }
}

/// The residual `R_m` of the m-th deformation equation, built from the
/// operator coefficient `Nc(m) = [q^(m-1)] N[phi]` minus the scheme-specific
/// source expansion coefficient.
///
/// For ND-HAM the part `x_m` (2 <= m <= n) appears here with `hbar^(m-2)` so
/// that, after the stepper multiplies by `hbar`, it enters `u_m` with the
/// scheme's `hbar^(m-1)` weight.
pub fn residual_term(
    prob: &VFIDEProblem,
    config: &MethodConfig,
    iterates: &[ExpPoly],
    m: u32,
) -> Result<ExpPoly, SolverError> {
    assert!(m >= 1, "residuals are defined for m >= 1");
    assert_eq!(
        iterates.len(),
        m as usize,
        "residual {m} needs iterates u_0 ... u_{}",
        m - 1
    );
    let nc = apply_n_coeff(prob, iterates, (m - 1) as usize)?;
    let n_parts = prob.split.len() - 1; // split is x_0 ... x_n
    let mi = m as usize;
    let out = match config.variant {
        Variant::Ham | Variant::Qham => {
            if m == 1 {
                nc.sub(&prob.source())
            } else {
                nc
            }
        }
        Variant::Mham => {
            // phi(t,q) = x_0 + q x_1 + ... + q^n x_n
            if mi - 1 <= n_parts {
                nc.sub(&prob.split[mi - 1])
            } else {
                nc
            }
        }
        Variant::MhamStaged => {
            if mi <= n_parts {
                nc.sub(&prob.split[mi])
            } else {
                nc
            }
        }
        Variant::NdHam => {
            if m == 1 {
                let mut lead = prob.split[0].clone();
                if let Some(x1) = prob.split.get(1) {
                    lead = lead.add(x1);
                }
                nc.sub(&lead)
            } else if mi <= n_parts {
                let weight = pow_rational(&config.hbar, m - 2);
                nc.sub(&prob.split[mi].scale(&weight))
            } else {
                nc
            }
        }
    };
    Ok(out)
}

/// One deformation step: solves `L[u_m - chi_m u_{m-1}] = hbar R_m` with
/// zero initial data for `u_m`, i.e.
/// `u_m = chi_m * (u_{m-1} - taylor data) + hbar * J^p_a(R_m)`.
///
/// The staged scheme's first equation couples `u_0` with coupling constant 1
/// and `u_0`'s own initial data.
pub fn step(
    prob: &VFIDEProblem,
    config: &MethodConfig,
    iterates: &[ExpPoly],
    m: u32,
) -> Result<ExpPoly, SolverError> {
    let origin = prob.origin();
    let residual = residual_term(prob, config, iterates, m)?;
    let mut u_m = repeated_integral(&residual, prob.p, &origin)?.scale(&config.hbar);

    let staged_first = config.variant == Variant::MhamStaged && m == 1;
    let coupling = if staged_first {
        Rational::one()
    } else {
        chi(m, config.variant, config.n_qham)
    };
    if !coupling.is_zero() {
        let prev = &iterates[(m - 1) as usize];
        // iterates beyond u_0 carry zero initial data; only the staged first
        // stage needs the actual data of u_0
        let data = if m == 1 {
            taylor_data(prev, prob.p, &origin)?
        } else {
            vec![Rational::zero(); prob.p as usize]
        };
        let adjusted = j_of_d(prev, prob.p, &data, &origin)?;
        u_m = u_m.add(&adjusted.scale(&coupling));
    }
    Ok(u_m)
}

/// Runs a full solve: `u_0` from the override or the problem's initial
/// guess, then `iterations` deformation steps, with per-variant weights.
pub fn run(prob: &VFIDEProblem, config: &MethodConfig) -> Result<SeriesSolution, SolverError> {
    debug_assert!(config.validate().is_ok(), "invalid method configuration");
    let u0 = match &config.initial_guess_override {
        Some(guess) => guess.clone(),
        None => initial_guess(prob)?,
    };
    let mut iterates = vec![u0];
    let mut divergence = None;
    for m in 1..=config.iterations {
        let u_m = step(prob, config, &iterates, m)?;
        if divergence.is_none() {
            let magnitude = u_m.max_coeff_magnitude();
            if magnitude > config.divergence_bound {
                divergence = Some(DivergenceNote { iterate: m as usize, magnitude });
            }
        }
        iterates.push(u_m);
    }

    let weights = (0..iterates.len())
        .map(|m| match config.variant {
            Variant::Qham => {
                pow_rational(&Rational::from_integer(config.n_qham.into()), m as u32).recip()
            }
            _ => Rational::one(),
        })
        .collect();

    let solution = SeriesSolution {
        iterates,
        weights,
        config: config.clone(),
        problem: prob.clone(),
        divergence,
    };
    debug_assert!(zero_initial_data_holds(&solution));
    Ok(solution)
}

/// Checks `u_m^(k)(a) = 0` for every `m >= 1`, `k < p`, exactly.
pub fn zero_initial_data_holds(sol: &SeriesSolution) -> bool {
    let a = sol.problem.domain.0.clone();
    sol.iterates.iter().skip(1).all(|u| {
        (0..sol.problem.p).all(|k| {
            differentiate(u, k)
                .eval_exact(&a)
                .as_rational()
                .map(|v| v.is_zero())
                .unwrap_or(false)
        })
    })
}

/// Interpolates iterate `m` as a polynomial in `hbar` from runs at distinct
/// rational nodes, returning the coefficient list (constant term first).
///
/// Each `u_m` is a polynomial of degree at most `m` in the
/// convergence-control parameter, so `m + 1` nodes determine it exactly.
pub fn interpolate_iterate_in_hbar(
    prob: &VFIDEProblem,
    template: &MethodConfig,
    nodes: &[Rational],
    m: usize,
) -> Result<Vec<ExpPoly>, SolverError> {
    let samples: Vec<ExpPoly> = nodes
        .iter()
        .map(|h| {
            let mut config = template.clone();
            config.hbar = h.clone();
            run(prob, &config).map(|sol| sol.iterates[m].clone())
        })
        .collect::<Result<_, _>>()?;

    // Lagrange interpolation with exact rational node weights, expanded into
    // monomial coefficients of hbar
    let k = nodes.len();
    let mut coeffs = vec![ExpPoly::zero(); k];
    for (i, sample) in samples.iter().enumerate() {
        // basis polynomial prod_{j != i} (h - x_j)/(x_i - x_j) as coefficients
        let mut basis = vec![Rational::zero(); k];
        basis[0] = Rational::one();
        let mut degree = 0;
        let mut denom = Rational::one();
        for (j, node) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            denom *= nodes[i].clone() - node.clone();
            // multiply the running polynomial by (h - node)
            for d in (0..=degree).rev() {
                let c = basis[d].clone();
                basis[d + 1] += c.clone();
                basis[d] = -node.clone() * c;
            }
            degree += 1;
        }
        for (d, c) in basis.into_iter().enumerate() {
            let weight = c / denom.clone();
            coeffs[d] = coeffs[d].add(&sample.scale(&weight));
        }
    }
    Ok(coeffs)
}

/// Evaluates an `hbar`-coefficient list at a concrete `hbar`.
pub fn eval_hbar_polynomial(coeffs: &[ExpPoly], hbar: &Rational) -> ExpPoly {
    let mut acc = ExpPoly::zero();
    let mut power = Rational::one();
    for c in coeffs {
        acc = acc.add(&c.scale(&power));
        power *= hbar;
    }
    acc
}

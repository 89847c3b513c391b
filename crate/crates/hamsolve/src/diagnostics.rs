//! Residual and error measurement, and comparison-table assembly.

use crate::algebra::{rational_to_f64, ExpPoly};
use crate::error::SolverError;
use crate::homotopy::SeriesSolution;
use crate::problem::{apply_n_coeff, VFIDEProblem};

/// Evaluation grid with one value column per method run and an optional
/// reference column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    /// Strictly increasing sample points within the problem domain.
    pub grid: Vec<f64>,
    /// `(label, values)` pairs, one per run, in input order.
    pub columns: Vec<(String, Vec<f64>)>,
    /// Label and values of the reference column, when present.
    pub reference: Option<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error("grid point {value} at index {index} lies outside the domain")]
    GridOutOfDomain { index: usize, value: f64 },
    #[error("grid must be strictly increasing (violated at index {index})")]
    GridNotIncreasing { index: usize },
    #[error("reference column has {got} values for a grid of {expected}")]
    ReferenceLengthMismatch { expected: usize, got: usize },
}

/// Max-norm of the residual `N[approximant] - f` over a uniform grid.
///
/// The Volterra/Fredholm terms are computed symbolically first; only the
/// final max is taken in floating point.
pub fn residual_norm(
    prob: &VFIDEProblem,
    approximant: &ExpPoly,
    grid_size: usize,
) -> Result<f64, SolverError> {
    assert!(grid_size >= 2, "residual grid needs at least two points");
    // a single-iterate coefficient list makes the q^0 coefficient N[u] itself
    let applied = apply_n_coeff(prob, std::slice::from_ref(approximant), 0)?;
    let residual = applied.sub(&prob.source());
    let a = rational_to_f64(&prob.domain.0);
    let b = rational_to_f64(&prob.domain.1);
    let mut worst: f64 = 0.0;
    for i in 0..grid_size {
        let t = a + (b - a) * i as f64 / (grid_size - 1) as f64;
        worst = worst.max(residual.eval_float(t).abs());
    }
    Ok(worst)
}

/// Absolute deviation of the approximant from tabulated `(t, value)` pairs.
pub fn error_vs_reference(approximant: &ExpPoly, reference: &[(f64, f64)]) -> Vec<f64> {
    reference
        .iter()
        .map(|&(t, value)| (approximant.eval_float(t) - value).abs())
        .collect()
}

/// Builds a comparison table: one column per run (its full weighted sum
/// evaluated on the grid), plus an optional reference column.
///
/// Column order follows input order; values share the exact evaluation code
/// path used everywhere else.
pub fn build_table(
    runs: &[&SeriesSolution],
    grid: &[f64],
    reference: Option<(&str, &[f64])>,
) -> Result<ComparisonTable, TableError> {
    if let Some(first) = runs.first() {
        let a = rational_to_f64(&first.problem.domain.0);
        let b = rational_to_f64(&first.problem.domain.1);
        for (index, &value) in grid.iter().enumerate() {
            if value < a || value > b {
                return Err(TableError::GridOutOfDomain { index, value });
            }
        }
    }
    for index in 1..grid.len() {
        if grid[index] <= grid[index - 1] {
            return Err(TableError::GridNotIncreasing { index });
        }
    }
    if let Some((_, values)) = reference {
        if values.len() != grid.len() {
            return Err(TableError::ReferenceLengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
    }

    let columns = runs
        .iter()
        .map(|sol| {
            let sum = sol.full_sum();
            let values = grid.iter().map(|&t| sum.eval_float(t)).collect();
            (sol.config.label.clone(), values)
        })
        .collect();
    Ok(ComparisonTable {
        grid: grid.to_vec(),
        columns,
        reference: reference.map(|(label, values)| (label.to_string(), values.to_vec())),
    })
}

impl ComparisonTable {
    /// Absolute errors of a column against the reference column.
    pub fn abs_errors(&self, column: usize) -> Option<Vec<f64>> {
        let (_, reference) = self.reference.as_ref()?;
        let (_, values) = self.columns.get(column)?;
        Some(
            values
                .iter()
                .zip(reference)
                .map(|(v, r)| (v - r).abs())
                .collect(),
        )
    }

    /// All columns (and the reference) agree with the grid length.
    pub fn is_consistent(&self) -> bool {
        self.columns.iter().all(|(_, v)| v.len() == self.grid.len())
            && self
                .reference
                .as_ref()
                .map(|(_, v)| v.len() == self.grid.len())
                .unwrap_or(true)
    }
}

/// Symbolic defect `partial_sum - exact` of a run at a given order.
pub fn defect(sol: &SeriesSolution, m: usize, exact: &ExpPoly) -> ExpPoly {
    sol.partial_sum(m).sub(exact)
}

/// True when the zero-initial-data property holds for every iterate of the
/// run beyond `u_0` (checked exactly at the domain's left endpoint).
pub fn initial_data_clean(sol: &SeriesSolution) -> bool {
    crate::homotopy::zero_initial_data_holds(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int, Rational};
    use crate::homotopy::{run, MethodConfig, Variant};
    use crate::problem::{PowerNonlinearity, SeparableKernel};
    use num_traits::Zero;

    fn exp_kernel_problem(split: Vec<ExpPoly>) -> VFIDEProblem {
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

    fn quadratic_problem() -> VFIDEProblem {
        VFIDEProblem {
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
        }
    }

    #[test]
    fn residual_of_exact_solution_vanishes() {
        let prob = exp_kernel_problem(vec![ExpPoly::exp(1).sub(&ExpPoly::var())]);
        let norm = residual_norm(&prob, &ExpPoly::exp(1), 101).unwrap();
        assert!(norm <= 1e-12, "norm = {norm}");
    }

    #[test]
    fn residual_of_linear_guess() {
        // N[1+s] - f = s/6 - e^s; the max over [0,1] sits at t = 1 with
        // value e - 1/6 (brute-force: |1/6 - e|)
        let prob = exp_kernel_problem(vec![ExpPoly::exp(1).sub(&ExpPoly::var())]);
        let guess = ExpPoly::constant(rat_int(1)).add(&ExpPoly::var());
        let norm = residual_norm(&prob, &guess, 101).unwrap();
        let expected = 1f64.exp() - 1.0 / 6.0;
        assert!((norm - expected).abs() < 1e-12, "norm = {norm}");
    }

    #[test]
    fn residual_norm_decreases_with_order() {
        // empirical decay across partial sums, both benchmark problems
        let nd = exp_kernel_problem(vec![
            ExpPoly::zero(),
            ExpPoly::exp(1).sub(&ExpPoly::term(rat(3, 4), 1, 0)),
            ExpPoly::term(rat(-1, 4), 1, 0),
        ]);
        let sol = run(&nd, &MethodConfig::new(Variant::NdHam, rat_int(-1), 5)).unwrap();
        let mut last = f64::INFINITY;
        for m in 1..=5 {
            let norm = residual_norm(&nd, &sol.partial_sum(m), 101).unwrap();
            assert!(norm <= last + 1e-12, "m={m}: {norm} > {last}");
            last = norm;
        }

        let quad = quadratic_problem();
        let sol = run(&quad, &MethodConfig::new(Variant::NdHam, rat_int(-1), 5)).unwrap();
        let mut last = f64::INFINITY;
        for m in 1..=5 {
            let norm = residual_norm(&quad, &sol.partial_sum(m), 101).unwrap();
            assert!(norm <= last + 1e-12, "m={m}: {norm} > {last}");
            last = norm;
        }
    }

    #[test]
    fn error_vs_reference_self_is_zero() {
        let p = ExpPoly::term(rat(1, 3), 2, 0);
        let points: Vec<(f64, f64)> = (0..5)
            .map(|i| {
                let t = i as f64 / 4.0;
                (t, p.eval_float(t))
            })
            .collect();
        assert!(error_vs_reference(&p, &points).iter().all(|&e| e == 0.0));
    }

    #[test]
    fn error_vs_reference_against_stored_table() {
        let prob = quadratic_problem();
        let sol = run(&prob, &MethodConfig::new(Variant::NdHam, rat_int(-1), 5)).unwrap();
        let points: Vec<(f64, f64)> = crate::reference::TABLE_GRID
            .iter()
            .copied()
            .zip(crate::reference::WAVELET_GALERKIN_COLUMN.iter().copied())
            .collect();
        let errors = error_vs_reference(&sol.full_sum(), &points);
        // the reference carries four printed decimals
        assert!(errors.iter().all(|&e| e < 1e-4 + 5e-5), "{errors:?}");
        assert!(errors[2] < 1e-5); // s = 0.3125 sits especially close
    }

    #[test]
    fn build_table_columns_match_eval() {
        let prob = quadratic_problem();
        let sol = run(&prob, &MethodConfig::new(Variant::NdHam, rat_int(-1), 3)).unwrap();
        let grid = [0.0, 0.5, 1.0];
        let reference = [0.0, -0.4948, -0.9205];
        let table = build_table(&[&sol], &grid, Some(("exact", &reference))).unwrap();
        assert!(table.is_consistent());
        let sum = sol.full_sum();
        for (i, &t) in grid.iter().enumerate() {
            assert_eq!(table.columns[0].1[i], sum.eval_float(t));
        }
        let errors = table.abs_errors(0).unwrap();
        assert!(errors[0] == 0.0 && errors[2] < 1e-3);
    }

    #[test]
    fn build_table_empty_runs_keeps_reference() {
        let grid = [0.0, 1.0];
        let reference = [1.0, 2.0];
        let table = build_table(&[], &grid, Some(("exact", &reference))).unwrap();
        assert!(table.columns.is_empty());
        assert_eq!(table.reference.unwrap().1, vec![1.0, 2.0]);
    }

    #[test]
    fn build_table_rejects_bad_grids() {
        let prob = quadratic_problem();
        let sol = run(&prob, &MethodConfig::new(Variant::NdHam, rat_int(-1), 2)).unwrap();
        let err = build_table(&[&sol], &[0.0, 1.5], None).unwrap_err();
        assert!(matches!(err, TableError::GridOutOfDomain { index: 1, .. }));
        let err = build_table(&[&sol], &[0.5, 0.5], None).unwrap_err();
        assert!(matches!(err, TableError::GridNotIncreasing { index: 1 }));
    }

    #[test]
    fn symbolic_defect_monomials() {
        // three-term sums vs the exact solution, all five schemes
        let exp_t = ExpPoly::exp(1);
        let guess = ExpPoly::constant(rat_int(1)).add(&ExpPoly::var());
        let nd = exp_kernel_problem(vec![
            ExpPoly::zero(),
            exp_t.sub(&ExpPoly::term(rat(3, 4), 1, 0)),
            ExpPoly::term(rat(-1, 4), 1, 0),
        ]);
        let sol = run(&nd, &MethodConfig::new(Variant::NdHam, rat_int(-1), 2)).unwrap();
        assert_eq!(defect(&sol, 2, &exp_t), ExpPoly::term(rat(1, 2160), 3, 0));

        let plain = exp_kernel_problem(vec![exp_t.sub(&ExpPoly::var())]);
        let sol = run(
            &plain,
            &MethodConfig::new(Variant::Ham, rat_int(-1), 2).with_initial_guess(guess.clone()),
        )
        .unwrap();
        assert_eq!(defect(&sol, 2, &exp_t), ExpPoly::term(rat(-1, 1080), 3, 0));

        let mham = exp_kernel_problem(vec![
            exp_t.sub(&ExpPoly::term(rat(1, 2), 1, 0)),
            ExpPoly::term(rat(-1, 2), 1, 0),
        ]);
        let sol = run(
            &mham,
            &MethodConfig::new(Variant::Mham, rat_int(-1), 2).with_initial_guess(guess),
        )
        .unwrap();
        assert_eq!(defect(&sol, 2, &exp_t), ExpPoly::term(rat(1, 540), 3, 0));
    }
}

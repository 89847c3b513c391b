//! Stored validation references for the quadratic Volterra benchmark
//! `u'(s) = -1 + int_0^s u^2(t) dt`, `u(0) = 0`.
//!
//! The problem has no elementary closed-form solution; published results
//! from other methods serve as comparison data. Values are stored exactly as
//! printed at their sources and are never recomputed here.

use crate::algebra::{ExpPoly, Rational};

fn big_rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Fifth-term Adomian-decomposition series for the benchmark:
/// `-s + s^4/12 - s^7/252 + s^10/6048 - s^13/157248 + 79 s^16/264176640`.
pub fn adm_fifth_series() -> ExpPoly {
    ExpPoly::from_terms([
        (big_rat(-1, 1), 1, 0),
        (big_rat(1, 12), 4, 0),
        (big_rat(-1, 252), 7, 0),
        (big_rat(1, 6048), 10, 0),
        (big_rat(-1, 157248), 13, 0),
        (big_rat(79, 264176640), 16, 0),
    ])
}

/// Fifth-term q-scheme series (`n = 2` halving weights):
/// `-s + s^4/24 - s^7/1008 + s^10/48384 - s^13/2515968 + 37 s^16/5072191488`.
pub fn oqham_fifth_series() -> ExpPoly {
    ExpPoly::from_terms([
        (big_rat(-1, 1), 1, 0),
        (big_rat(1, 24), 4, 0),
        (big_rat(-1, 1008), 7, 0),
        (big_rat(1, 48384), 10, 0),
        (big_rat(-1, 2515968), 13, 0),
        (big_rat(37, 5072191488), 16, 0),
    ])
}

/// Sample abscissae of the published comparison table.
pub const TABLE_GRID: [f64; 7] = [0.0, 0.0938, 0.3125, 0.5, 0.7188, 0.9062, 1.0];

/// Wavelet-Galerkin values (4 printed decimals), used as the surrogate for
/// the exact solution.
pub const WAVELET_GALERKIN_COLUMN: [f64; 7] =
    [0.0, -0.0937, -0.3117, -0.4948, -0.6969, -0.8520, -0.9205];

/// Published split-source column (9 printed decimals).
pub const NDHAM_COLUMN: [f64; 7] = [
    0.0,
    -0.093793549,
    -0.311706425,
    -0.494822508,
    -0.696941464,
    -0.851934173,
    -0.920475703,
];

/// Published q-scheme column (8 printed decimals).
pub const OQHAM_COLUMN: [f64; 7] = [
    0.0,
    -0.09379677,
    -0.31210292,
    -0.49740330,
    -0.70776777,
    -0.86852216,
    -0.92911909,
];

/// Published Adomian-decomposition column (9 printed decimals).
pub const ADM_COLUMN: [f64; 7] = [
    0.0,
    -0.093793549,
    -0.311706425,
    -0.494822508,
    -0.696941463,
    -0.851934160,
    -0.920475637,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adm_series_matches_its_printed_column() {
        let series = adm_fifth_series();
        for (&t, &printed) in TABLE_GRID.iter().zip(&ADM_COLUMN) {
            assert!(
                (series.eval_float(t) - printed).abs() < 1e-9,
                "t = {t}: {} vs {printed}",
                series.eval_float(t)
            );
        }
    }

    #[test]
    fn adm_value_at_right_endpoint() {
        assert!((adm_fifth_series().eval_float(1.0) - (-0.920475637)).abs() < 1e-9);
    }
}
